"""Hot inner loops, each in two flavours.

Every kernel exists as a vectorised numpy function (``*_np``) and as an
explicit loop compiled with ``numba.njit`` (``*_jit``).  The public name binds
to the jitted version unless numba is missing or ``GENGSP_DISABLE_NUMBA`` is
set to a truthy value at import time.  ``GENGSP_THREADS`` caps numba's thread
pool.
"""
import os

import numpy as np

_FALSY = ("", "0", "false", "no", "off")


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() not in _FALSY


try:
    if _env_flag("GENGSP_DISABLE_NUMBA"):
        raise ImportError("numba disabled by GENGSP_DISABLE_NUMBA")
    import numba

    njit = numba.njit(cache=True, nogil=True)
    HAVE_NUMBA = True
    _threads = os.environ.get("GENGSP_THREADS")
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
except ImportError:
    HAVE_NUMBA = False

    def njit(f):
        return f


BACKEND = "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------- exponentials

def exp_eval_np(xs, freqs, norm):
    """E[l, m] = exp(i * freqs[m] * xs[l]) / norm."""
    return np.exp(1j * np.outer(xs, freqs)) / norm


@njit
def exp_eval_jit(xs, freqs, norm):
    out = np.empty((xs.shape[0], freqs.shape[0]), dtype=np.complex128)
    for l in range(xs.shape[0]):
        for m in range(freqs.shape[0]):
            a = freqs[m] * xs[l]
            out[l, m] = complex(np.cos(a), np.sin(a)) / norm
    return out


# ------------------------------------------------------------------ chebyshev

def cheb_eval_np(xs, count):
    """Orthonormal first-kind Chebyshev values under dx/sqrt(1-x^2)."""
    out = np.empty((xs.shape[0], count))
    if count == 0:
        return out
    out[:, 0] = 1.0
    if count > 1:
        out[:, 1] = xs
    for j in range(2, count):
        out[:, j] = 2.0 * xs * out[:, j - 1] - out[:, j - 2]
    out[:, 0] *= 1.0 / np.sqrt(np.pi)
    out[:, 1:] *= np.sqrt(2.0 / np.pi)
    return out


@njit
def cheb_eval_jit(xs, count):
    out = np.empty((xs.shape[0], count))
    s0 = 1.0 / np.sqrt(np.pi)
    s1 = np.sqrt(2.0 / np.pi)
    for l in range(xs.shape[0]):
        x = xs[l]
        t_prev = 1.0
        t_cur = x
        for j in range(count):
            if j == 0:
                out[l, 0] = s0
            elif j == 1:
                out[l, 1] = s1 * x
            else:
                t_next = 2.0 * x * t_cur - t_prev
                out[l, j] = s1 * t_next
                t_prev = t_cur
                t_cur = t_next
    return out


# ------------------------------------------------------------- design matrix

def design_matrix_np(phi_rows, xi_rows):
    """Row l is kron(phi_rows[l], xi_rows[l]); column order (i outer, m inner)."""
    n_rows = phi_rows.shape[0]
    return (phi_rows[:, :, None] * xi_rows[:, None, :]).reshape(n_rows, -1)


@njit
def design_matrix_jit(phi_rows, xi_rows):
    n_rows, k = phi_rows.shape
    b = xi_rows.shape[1]
    out = np.empty((n_rows, k * b), dtype=np.complex128)
    for l in range(n_rows):
        for i in range(k):
            p = phi_rows[l, i]
            for m in range(b):
                out[l, i * b + m] = p * xi_rows[l, m]
    return out


# ----------------------------------------------------- step-function spectra

def step_coeffs_np(nodes, starts, ends, freqs, n, norm):
    """h[v, m] = <1_[s,e], exp(i w_m x)/norm> summed over the intervals of v."""
    w = freqs[None, :]
    s = starts[:, None]
    e = ends[:, None]
    safe = np.where(w == 0.0, 1.0, w)
    osc = (np.exp(-1j * w * s) - np.exp(-1j * w * e)) / (1j * safe)
    contrib = np.where(w == 0.0, (e - s) + 0j, osc) / norm
    out = np.zeros((n, freqs.shape[0]), dtype=np.complex128)
    np.add.at(out, nodes, contrib)
    return out


@njit
def step_coeffs_jit(nodes, starts, ends, freqs, n, norm):
    out = np.zeros((n, freqs.shape[0]), dtype=np.complex128)
    for r in range(nodes.shape[0]):
        v = nodes[r]
        s = starts[r]
        e = ends[r]
        for m in range(freqs.shape[0]):
            w = freqs[m]
            if w == 0.0:
                out[v, m] += (e - s) / norm
            else:
                a = complex(np.cos(w * s), -np.sin(w * s))
                b = complex(np.cos(w * e), -np.sin(w * e))
                out[v, m] += (a - b) / (1j * w) / norm
    return out


# ------------------------------------------------------- slot status sampling

def slot_status_np(nodes, starts, ends, times, n):
    """S[v, s] = 1 if some interval [start, end) of v contains times[s]."""
    inside = (starts[:, None] <= times[None, :]) & (times[None, :] < ends[:, None])
    out = np.zeros((n, times.shape[0]))
    np.add.at(out, nodes, inside.astype(np.float64))
    return np.minimum(out, 1.0)


@njit
def slot_status_jit(nodes, starts, ends, times, n):
    out = np.zeros((n, times.shape[0]))
    for r in range(nodes.shape[0]):
        v = nodes[r]
        for s in range(times.shape[0]):
            t = times[s]
            if starts[r] <= t and t < ends[r]:
                out[v, s] = 1.0
    return out


if HAVE_NUMBA:
    exp_eval = exp_eval_jit
    cheb_eval = cheb_eval_jit
    design_matrix = design_matrix_jit
    step_coeffs = step_coeffs_jit
    slot_status = slot_status_jit
else:
    exp_eval = exp_eval_np
    cheb_eval = cheb_eval_np
    design_matrix = design_matrix_np
    step_coeffs = step_coeffs_np
    slot_status = slot_status_np
