"""Command-line front end.

Exit codes: 0 ok, 1 internal error, 2 validation or I/O error, 3 fit gate failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import analytic_table
from .backward import (
    FitError,
    backward_efficiency,
    fit_forward_model,
    fit_quality_gate,
    length_grid,
)
from .comb import effective_depth, finesse, thermal_comb, write_comb
from .config import ConfigError, RunConfig
from .csvio import read_csv, write_csv
from .ensemble import DisorderSpec, EfficiencyCurve, default_sigma, sweep_length, sweep_strength
from .propagation import (
    GridError,
    echo_peak_time,
    echo_window,
    first_echo_efficiency,
    gaussian_spectrum,
    make_grid,
    propagate_forward,
)

log = logging.getLogger("iafc")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_GATE = 3

DEFAULT_SPACING_STRENGTHS = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
DEFAULT_DEPTH_FRACTIONS = [0.0, 1 / 12, 1 / 6, 1 / 4, 1 / 3]


class GateFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _out(cfg: RunConfig) -> Path:
    p = Path(cfg.out_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _comb_meta(comb):
    return {
        "centers": comb.centers.tolist(),
        "widths": comb.widths.tolist(),
        "depths": comb.depths.tolist(),
    }


def _write_manifest(cfg: RunConfig, out: Path):
    (out / "manifest.cfg").write_text(cfg.to_text())


def _simulate_comb(cfg, comb):
    sigma = cfg.sigma if cfg.sigma is not None else default_sigma(comb)
    grid = make_grid(comb, sigma, max_points=cfg.max_points)
    pulse = gaussian_spectrum(grid, sigma)
    _, out_t = propagate_forward(pulse, comb, cfg.L_scale)
    inp_t = pulse.to_time()
    return sigma, grid, inp_t, out_t


def cmd_simulate(cfg: RunConfig) -> int:
    comb = cfg.build_comb()
    out = _out(cfg)
    sigma, grid, inp_t, out_t = _simulate_comb(cfg, comb)
    meta = {"n_points": grid.n_points, "d_omega": grid.d_omega, "sigma": sigma,
            "L_scale": cfg.L_scale, "seed": cfg.seed} | _comb_meta(comb)
    for name, f in (("trace_input.csv", inp_t), ("trace_output.csv", out_t)):
        a = f.amplitudes
        write_csv(out / name, ["t", "re", "im", "intensity"],
                  np.column_stack([f.times, a.real, a.imag, f.intensity]), meta)
    write_comb(comb, out / "comb.txt", header=comb.label)
    if len(comb) > 1:
        eta = first_echo_efficiency(out_t, inp_t, comb.spacing)
        peak = echo_peak_time(out_t, echo_window(comb.spacing))
        row = [eta, peak.time, float(peak.reliable), finesse(comb)]
    else:
        row = [0.0, float("nan"), 0.0, float("nan")]
        log.warning("single-tooth comb: no echo period, efficiency reported as 0")
    write_csv(out / "efficiency.csv", ["eta", "echo_peak_time", "peak_reliable", "finesse"], [row], meta)
    _write_manifest(cfg, out)
    print(f"eta = {row[0]:.6f}")
    if cfg.plot:
        from .plot import plot_trace

        plot_trace(out / "trace.svg", inp_t.times, [inp_t.intensity, out_t.intensity],
                   ["input", "output"], comb.spacing if len(comb) > 1 else None)
    return EXIT_OK


def _sweep_strength(cfg: RunConfig, kind: str) -> int:
    comb = cfg.build_comb()
    out = _out(cfg)
    if kind == "spacing":
        strengths = cfg.strengths if cfg.strengths is not None else DEFAULT_SPACING_STRENGTHS
        absolute = list(strengths)
        xlabel = "gamma_r / gamma"
    else:
        # depth strengths are fractions of the mean tooth depth
        strengths = cfg.strengths if cfg.strengths is not None else DEFAULT_DEPTH_FRACTIONS
        absolute = [s * float(np.mean(comb.depths)) for s in strengths]
        xlabel = "d_r / mean depth"
    curves = sweep_strength(comb, kind, absolute, cfg.finesses, cfg.sigma, cfg.L_scale,
                            cfg.n_trials, cfg.seed, workers=cfg.workers)
    for f, c in zip(cfg.finesses, curves):
        c.metadata["strength_units"] = "gamma" if kind == "spacing" else "depth"
        c.metadata["strengths_requested"] = list(strengths)
        EfficiencyCurve(strengths, c.ordinate, c.errors, c.metadata).to_csv(out / f"curve_{kind}_F{f:g}.csv")
        print(f"F={f:g}: " + " ".join(f"{y:.4f}" for y in c.ordinate))
    _write_manifest(cfg, out)
    if cfg.plot:
        from .plot import plot_curves

        shown = [EfficiencyCurve(strengths, c.ordinate, c.errors) for c in curves]
        plot_curves(out / f"sweep_{kind}.svg", shown, xlabel, [f"F={f:g}" for f in cfg.finesses])
    return EXIT_OK


def _length_curve(cfg: RunConfig):
    comb = cfg.build_comb()
    spec = DisorderSpec(cfg.kind, cfg.strength, cfg.n_trials, cfg.seed)
    L = np.asarray(cfg.lengths, dtype=float) if cfg.lengths else length_grid(comb, cfg.length_points, cfg.x_max)
    curve = sweep_length(comb, spec, cfg.sigma, L, workers=cfg.workers)
    curve.metadata["effective_depth_per_L"] = effective_depth(comb) if len(comb) > 1 else 0.0
    return curve


def cmd_sweep_length(cfg: RunConfig) -> int:
    out = _out(cfg)
    curve = _length_curve(cfg)
    curve.to_csv(out / "length_curve.csv")
    _write_manifest(cfg, out)
    for L, y in zip(curve.abscissa, curve.ordinate):
        print(f"L={L:.4f} eta={y:.4f}")
    if cfg.plot:
        from .plot import plot_curves

        plot_curves(out / "length_curve.svg", [curve], "L_scale", ["I-AFC"])
    return EXIT_OK


def cmd_fit_backward(cfg: RunConfig) -> int:
    out = _out(cfg)
    if cfg.input is not None:
        meta, _, data = read_csv(cfg.input)
        if data.shape[1] < 2:
            raise ConfigError(f"{cfg.input}: need at least two columns (L, eta)")
        L, y = data[:, 0], data[:, 1]
        source = str(cfg.input)
    else:
        curve = _length_curve(cfg)
        curve.to_csv(out / "length_curve.csv")
        L, y = curve.abscissa, curve.ordinate
        source = "sweep-length"
    fit = fit_forward_model(L, y)
    gate = fit_quality_gate(fit, cfg.gate_threshold)
    meta = {"source": source, "seed": cfg.seed, "gate_threshold": cfg.gate_threshold}
    write_csv(out / "fit.csv", ["eta0", "alpha_tilde", "rms_residual", "converged", "gate_passed"],
              [[fit.eta0, fit.alpha_tilde, fit.rms_residual, float(fit.converged), float(gate)]], meta)
    _write_manifest(cfg, out)
    print(f"eta0={fit.eta0:.6f} alpha_tilde={fit.alpha_tilde:.6g} rms={fit.rms_residual:.4g} "
          f"converged={fit.converged} gate={'pass' if gate else 'FAIL'}")
    if not fit.converged:
        raise GateFailure("fit did not converge; no backward estimate")
    eta_b = backward_efficiency(fit, L)
    write_csv(out / "backward.csv", ["L_scale", "eta_backward"], np.column_stack([L, eta_b]),
              meta | {"reliable": gate})
    print(f"backward efficiency at L={L[-1]:.4g}: {eta_b[-1]:.4f}" + ("" if gate else " (unreliable)"))
    if cfg.plot:
        from .plot import plot_xy

        model = fit.eta0 * (fit.alpha_tilde * L) ** 2 * np.exp(-fit.alpha_tilde * L)
        plot_xy(out / "fit.svg", L, [y, model, eta_b], ["forward data", "forward fit", "backward"],
                "L_scale", "efficiency")
    if not gate:
        raise GateFailure(f"fit residual {fit.rms_residual:.4g} exceeds gate {cfg.gate_threshold}")
    return EXIT_OK


def cmd_thermal(cfg: RunConfig) -> int:
    comb = cfg.build_comb()
    out = _out(cfg)
    rows = []
    for T in cfg.temperatures:
        spec = cfg.thermal_spec(T, len(comb))
        c = thermal_comb(comb, spec)
        write_comb(c, out / f"comb_T{T:g}.txt", header=f"thermal reweighting at T={T:g} K")
        _, _, inp_t, out_t = _simulate_comb(cfg, c)
        eta = first_echo_efficiency(out_t, inp_t, c.spacing)
        rows.append([T, eta])
        print(f"T={T:g} K: eta={eta:.6f}")
    meta = {"ground_span": cfg.ground_span, "seed": cfg.seed} | _comb_meta(comb)
    write_csv(out / "thermal.csv", ["temperature", "eta"], rows, meta)
    _write_manifest(cfg, out)
    if cfg.plot:
        from .plot import plot_xy

        r = np.array(rows)
        plot_xy(out / "thermal.svg", r[:, 0], [r[:, 1]], ["I-AFC"], "T (K)", "efficiency")
    return EXIT_OK


def cmd_analytic_table(cfg: RunConfig) -> int:
    out = _out(cfg)
    x = np.round(np.arange(0.0, 8.0 + 1e-9, 0.05), 10)
    cols = ["alpha_tilde_L", "finesse", "eta_f", "eta_b"]
    write_csv(out / "analytic_table.csv", cols, analytic_table(x, cfg.finesses, True), {"prefactor": True})
    write_csv(out / "analytic_table_no_prefactor.csv", cols, analytic_table(x, [np.inf], False),
              {"prefactor": False})
    if cfg.plot:
        from .plot import plot_xy

        t = analytic_table(x, [np.inf], False)
        plot_xy(out / "analytic.svg", t[:, 0], [t[:, 2], t[:, 3]], ["forward", "backward"],
                "alpha~ L", "efficiency")
    print(f"wrote {out / 'analytic_table.csv'}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep-spacing": lambda cfg: _sweep_strength(cfg, "spacing"),
    "sweep-depth": lambda cfg: _sweep_strength(cfg, "depth"),
    "sweep-length": cmd_sweep_length,
    "fit-backward": cmd_fit_backward,
    "thermal": cmd_thermal,
    "analytic-table": cmd_analytic_table,
}


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _add_globals(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--config", default=d(None), help="key = value configuration file")
    p.add_argument("--seed", type=int, default=d(None), help="master seed")
    p.add_argument("--trials", type=int, default=d(None), help="Monte-Carlo trials per point")
    p.add_argument("--out-dir", default=d(None), help="output directory")
    p.add_argument("--plot", action="store_true", default=d(False), help="also write SVG plots")
    p.add_argument("--workers", type=int, default=d(None), help="threads for ensemble trials")
    p.add_argument("--set", action="append", default=d([]), metavar="KEY=VALUE",
                   help="override any configuration key (repeatable)")


def build_parser():
    parser = argparse.ArgumentParser(prog="iafc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"iafc {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        _add_globals(sp, suppress=True)
        if name == "fit-backward":
            sp.add_argument("input", nargs="?", default=None, help="CSV with columns L, eta")
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg.update_from_file(args.config)
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        cfg.set(k, v)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.trials is not None:
        cfg.n_trials = args.trials
    if args.out_dir is not None:
        cfg.out_dir = args.out_dir
    if args.workers is not None:
        cfg.workers = args.workers
    if args.plot:
        cfg.plot = True
    if getattr(args, "input", None):
        cfg.input = args.input
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except GateFailure as exc:
        print(f"fit gate failure: {exc}", file=sys.stderr)
        return EXIT_GATE
    except (ConfigError, GridError, FitError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
