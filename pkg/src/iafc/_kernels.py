"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: a plain numpy version and an ``@njit`` version
with identical semantics.  The numba path is used unless numba is missing
or ``IAFC_DISABLE_NUMBA`` is set to a truthy value before import.
"""

import os

import numpy as np


def _env_disabled():
    return os.environ.get("IAFC_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------


def _propagator_np(omega, centers, widths, depths, scale):
    out = np.zeros(omega.shape, dtype=np.complex128)
    for c, g, b in zip(centers, widths, depths):
        if b == 0.0:
            continue
        out += (b * scale) / (0.5 + 1j * (omega - c) / g)
    return out


def _transmit_np(field, dl, scale):
    return field * np.exp(-dl * scale)


def _abs2_np(x):
    return x.real * x.real + x.imag * x.imag


def _neumaier_add_np(total, comp, x):
    t = total + x
    big = np.abs(total) >= np.abs(x)
    comp += np.where(big, (total - t) + x, (x - t) + total)
    total[:] = t


def _window_trapz_np(t, y, lo, hi):
    # trapezoid over [lo, hi] with linearly interpolated end samples
    inside = (t > lo) & (t < hi)
    ti = t[inside]
    yi = y[inside]
    ylo = np.interp(lo, t, y)
    yhi = np.interp(hi, t, y)
    tt = np.concatenate(([lo], ti, [hi]))
    yy = np.concatenate(([ylo], yi, [yhi]))
    return float(np.sum(0.5 * (yy[1:] + yy[:-1]) * np.diff(tt)))


NUMPY_KERNELS = {
    "propagator": _propagator_np,
    "transmit": _transmit_np,
    "abs2": _abs2_np,
    "neumaier_add": _neumaier_add_np,
    "window_trapz": _window_trapz_np,
}


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


def _build_numba_kernels():
    from numba import njit

    @njit(cache=True, nogil=True)
    def propagator(omega, centers, widths, depths, scale):
        n = omega.shape[0]
        out = np.zeros(n, dtype=np.complex128)
        for k in range(centers.shape[0]):
            b = depths[k] * scale
            if b == 0.0:
                continue
            c = centers[k]
            inv_g = 1.0 / widths[k]
            for i in range(n):
                # b / (1/2 + i x) = b (1/2 - i x) / (1/4 + x^2)
                x = (omega[i] - c) * inv_g
                d = b / (0.25 + x * x)
                out[i] += complex(0.5 * d, -x * d)
        return out

    @njit(cache=True, nogil=True)
    def transmit(field, dl, scale):
        n = field.shape[0]
        out = np.empty(n, dtype=np.complex128)
        for i in range(n):
            out[i] = field[i] * np.exp(-dl[i] * scale)
        return out

    @njit(cache=True, nogil=True)
    def abs2(x):
        n = x.shape[0]
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            out[i] = x[i].real * x[i].real + x[i].imag * x[i].imag
        return out

    @njit(cache=True, nogil=True)
    def neumaier_add(total, comp, x):
        for i in range(total.shape[0]):
            s = total[i]
            v = x[i]
            t = s + v
            if abs(s) >= abs(v):
                comp[i] += (s - t) + v
            else:
                comp[i] += (v - t) + s
            total[i] = t

    @njit(cache=True, nogil=True)
    def window_trapz(t, y, lo, hi):
        n = t.shape[0]
        acc = 0.0
        prev_t = lo
        prev_y = np.nan
        for i in range(n - 1):
            if t[i] <= lo < t[i + 1]:
                w = (lo - t[i]) / (t[i + 1] - t[i])
                prev_y = y[i] + w * (y[i + 1] - y[i])
                break
        for i in range(n):
            if t[i] <= lo:
                continue
            if t[i] >= hi:
                break
            acc += 0.5 * (prev_y + y[i]) * (t[i] - prev_t)
            prev_t = t[i]
            prev_y = y[i]
        for i in range(n - 1):
            if t[i] <= hi <= t[i + 1]:
                w = (hi - t[i]) / (t[i + 1] - t[i])
                yh = y[i] + w * (y[i + 1] - y[i])
                acc += 0.5 * (prev_y + yh) * (hi - prev_t)
                break
        return acc

    return {
        "propagator": propagator,
        "transmit": transmit,
        "abs2": abs2,
        "neumaier_add": neumaier_add,
        "window_trapz": window_trapz,
    }


try:
    NUMBA_KERNELS = _build_numba_kernels()
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    NUMBA_KERNELS = None

USE_NUMBA = NUMBA_KERNELS is not None and not _env_disabled()
_active = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS

propagator = _active["propagator"]
transmit = _active["transmit"]
abs2 = _active["abs2"]
neumaier_add = _active["neumaier_add"]
window_trapz = _active["window_trapz"]


def backend():
    """Name of the kernel backend in use: ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
