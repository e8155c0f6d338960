"""Run configuration: flat ``key = value`` text files plus command-line overrides.

Grammar, one entry per line::

    # comment
    key = value            # trailing comments allowed
    finesses = 20, 60, 100 # lists are comma separated

Numeric values may be arithmetic expressions over ``pi``, e.g. ``2*pi*5``.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .comb import FrequencyComb, ThermalSpec, read_comb, uniform_comb

TWO_PI = 2 * math.pi


class ConfigError(ValueError):
    """Configuration is malformed or violates a precondition."""


_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def eval_number(text: str) -> float:
    """Evaluate a numeric literal or arithmetic expression over ``pi``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ConfigError(f"not a number: {text!r}")

    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"not a number: {text!r}") from exc
    return float(ev(tree))


@dataclass
class RunConfig:
    # comb
    n_teeth: int = 7
    gamma: float = TWO_PI * 5
    finesse: float = 20.0
    delta: float | None = None
    optical_depth: float = 30.0
    comb_file: str | None = None
    # pulse and propagation
    sigma: float | None = None
    L_scale: float = 1.0
    max_points: int = 2**22
    # disorder and sweeps
    kind: str = "spacing"
    strength: float = 0.0
    strengths: list | None = None
    finesses: list = field(default_factory=lambda: [20.0, 60.0, 100.0])
    lengths: list | None = None
    length_points: int = 16
    x_max: float = 5.0
    n_trials: int = 500
    seed: int = 0
    workers: int = 1
    # backward fit
    input: str | None = None
    gate_threshold: float = 0.02
    # thermal
    temperatures: list = field(default_factory=lambda: [4.0, 100.0, 300.0])
    ground_span: float = TWO_PI * 3e5
    ground_energies: list | None = None
    tooth_assignment: list | None = None
    # output
    out_dir: str = "out"
    plot: bool = False

    # ------------------------------------------------------------------

    def set(self, key: str, raw: str):
        key = key.strip()
        if key == "total_depth":
            key = "optical_depth"
        types = {f.name: f.type for f in fields(self)}
        if key not in types:
            raise ConfigError(f"unknown configuration key {key!r}")
        raw = raw.strip()
        t = types[key]
        if raw.lower() in ("none", "") and "None" in t:
            value = None
        elif t.startswith("list"):
            value = [eval_number(p) for p in raw.split(",") if p.strip()]
        elif t.startswith("int"):
            value = eval_number(raw)
            if value != int(value):
                raise ConfigError(f"{key} must be an integer, got {raw!r}")
            value = int(value)
        elif t.startswith("float"):
            value = eval_number(raw)
        elif t.startswith("bool"):
            low = raw.lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ConfigError(f"{key} must be a boolean, got {raw!r}")
            value = low in ("1", "true", "yes", "on")
        else:
            value = raw
        setattr(self, key, value)

    def update_from_file(self, path):
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"configuration file not found: {p}")
        for lineno, line in enumerate(p.read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{p}:{lineno}: expected 'key = value'")
            k, v = line.split("=", 1)
            try:
                self.set(k, v)
            except ConfigError as exc:
                raise ConfigError(f"{p}:{lineno}: {exc}") from None

    def to_text(self) -> str:
        lines = [f"# iafc {__version__} run manifest; replay with --config"]
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                s = "none"
            elif isinstance(v, list):
                s = ", ".join(repr(float(x)) for x in v)
            elif isinstance(v, float):
                s = repr(v)
            else:
                s = str(v)
            lines.append(f"{f.name} = {s}")
        return "\n".join(lines) + "\n"

    # ------------------------------------------------------------------

    def validate(self):
        """Reject anything a downstream precondition would refuse, before computing."""
        if self.comb_file is not None and not Path(self.comb_file).is_file():
            raise ConfigError(f"comb file not found: {self.comb_file}")
        if self.input is not None and not Path(self.input).is_file():
            raise ConfigError(f"input file not found: {self.input}")
        if self.comb_file is None:
            if self.n_teeth < 1 or self.n_teeth % 2 == 0:
                raise ConfigError("n_teeth must be a positive odd integer")
            if not self.gamma > 0:
                raise ConfigError("gamma must be positive")
            if self.n_teeth > 1 and not self.spacing() > self.gamma:
                raise ConfigError("finesse must exceed 1 (delta > gamma)")
            if not self.optical_depth >= 0:
                raise ConfigError("optical_depth must be non-negative")
        if self.sigma is not None and not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if not self.L_scale >= 0:
            raise ConfigError("L_scale must be non-negative")
        if self.kind not in ("spacing", "depth", "none"):
            raise ConfigError(f"kind must be spacing, depth or none, got {self.kind!r}")
        if not self.strength >= 0:
            raise ConfigError("strength must be non-negative")
        if self.strengths is not None and (
            not self.strengths or min(self.strengths) < 0 or np.any(np.diff(self.strengths) <= 0)
        ):
            raise ConfigError("strengths must be non-negative and strictly increasing")
        if not self.finesses or min(self.finesses) <= 1:
            raise ConfigError("finesses must all exceed 1")
        if self.lengths is not None and (
            len(self.lengths) < 5 or min(self.lengths) <= 0 or np.any(np.diff(self.lengths) <= 0)
        ):
            raise ConfigError("lengths need >= 5 positive, strictly increasing values")
        if self.length_points < 5:
            raise ConfigError("length_points must be at least 5")
        if not self.x_max > 0:
            raise ConfigError("x_max must be positive")
        if self.n_trials < 1:
            raise ConfigError("n_trials must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not self.gate_threshold >= 0:
            raise ConfigError("gate_threshold must be non-negative")
        if not self.temperatures or min(self.temperatures) <= 0:
            raise ConfigError("temperatures must be positive")
        if self.tooth_assignment is not None:
            n_ground = len(self.ground_energies) if self.ground_energies else self.n_teeth
            if any(int(m) != m or not 0 <= m < n_ground for m in self.tooth_assignment):
                raise ConfigError("tooth_assignment entries must be valid ground-state indices")

    def spacing(self) -> float:
        return self.delta if self.delta is not None else self.finesse * self.gamma

    def build_comb(self) -> FrequencyComb:
        if self.comb_file is not None:
            return read_comb(self.comb_file)
        return uniform_comb(self.n_teeth, self.spacing(), self.gamma, self.optical_depth)

    def thermal_spec(self, temperature: float, n_teeth: int) -> ThermalSpec:
        if self.ground_energies:
            e = [float(x) for x in self.ground_energies]
        else:
            e = list(np.linspace(0.0, self.ground_span, n_teeth)) if n_teeth > 1 else [0.0]
        assign = {}
        if self.tooth_assignment is not None:
            if len(self.tooth_assignment) != n_teeth:
                raise ConfigError("tooth_assignment needs one entry per tooth")
            assign = {n: int(m) for n, m in enumerate(self.tooth_assignment)}
        elif len(e) != n_teeth:
            raise ConfigError("ground_energies needs one entry per tooth unless tooth_assignment is given")
        return ThermalSpec(tuple(e), float(temperature), assign)
