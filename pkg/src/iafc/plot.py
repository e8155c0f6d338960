"""Optional static SVG renderings of the CSV outputs."""

from pathlib import Path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_trace(path, times, intensities, labels, delta=None):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for y, lab in zip(intensities, labels):
        ax.plot(times, y, lw=1, label=lab)
    if delta:
        period = 6.283185307179586 / delta
        ax.set_xlim(-0.5 * period, 2.5 * period)
        ax.axvspan(0.5 * period, 1.5 * period, color="0.9", zorder=0)
    ax.set_xlabel("t (us)")
    ax.set_ylabel("|E(t)|^2")
    ax.legend()
    fig.tight_layout()
    fig.savefig(Path(path), format="svg")
    plt.close(fig)


def plot_curves(path, curves, xlabel, labels):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for c, lab in zip(curves, labels):
        ax.errorbar(c.abscissa, c.ordinate, yerr=c.errors, marker="o", ms=3, lw=1, label=lab)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("efficiency")
    ax.legend()
    fig.tight_layout()
    fig.savefig(Path(path), format="svg")
    plt.close(fig)


def plot_xy(path, x, ys, labels, xlabel, ylabel):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for y, lab in zip(ys, labels):
        ax.plot(x, y, marker="o", ms=3, lw=1, label=lab)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(Path(path), format="svg")
    plt.close(fig)
