"""Pure-Python reference kernels.

These mirror the compiled kernels in ``_kernels.pyx`` one-to-one and are used
when the extension is unavailable (or when ``MIDSPEC_PURE=1``).
"""
import numpy as np

BACKEND = "python"


def qp_eval(p0, ptau, tau, z):
    """Evaluate Delta, Delta' and the rounding scale of the evaluation.

    The scale is ``sum |c_k| |z|^k + |e^{-tau z}| sum |alpha_k| |z|^k``.

    ``p0`` and ``ptau`` are ascending real coefficient arrays, ``z`` a complex
    array. Horner in complex arithmetic.
    """
    p0 = np.asarray(p0, dtype=float)
    ptau = np.asarray(ptau, dtype=float)
    z = np.asarray(z, dtype=complex)
    az = np.abs(z)
    v0 = np.zeros_like(z)
    d0 = np.zeros_like(z)
    s0 = np.zeros(z.shape)
    for c in p0[::-1]:
        d0 = d0 * z + v0
        v0 = v0 * z + c
        s0 = s0 * az + abs(c)
    v1 = np.zeros_like(z)
    d1 = np.zeros_like(z)
    s1 = np.zeros(z.shape)
    for c in ptau[::-1]:
        d1 = d1 * z + v1
        v1 = v1 * z + c
        s1 = s1 * az + abs(c)
    e = np.exp(-tau * z)
    val = v0 + v1 * e
    der = d0 + (d1 - tau * v1) * e
    scale = s0 + s1 * np.abs(e)
    return val, der, scale


def kummer_series(a, b, z, max_terms=10000, rel_tol=1e-16):
    """Sum the Kummer series; returns (sum, terms_used, max|term|, converged)."""
    a = complex(a)
    b = complex(b)
    z = complex(z)
    term = 1.0 + 0.0j
    total = term
    biggest = 1.0
    small_run = 0
    for k in range(max_terms):
        term = term * (a + k) / (b + k) * z / (k + 1)
        total += term
        at = abs(term)
        if at > biggest:
            biggest = at
        if at <= rel_tol * abs(total):
            small_run += 1
            if small_run >= 3:
                return total, k + 2, biggest, True
        else:
            small_run = 0
    return total, max_terms + 1, biggest, False


def rk4_dde(a0, atau, hist_grid, hist_half, n_steps, dt):
    """Fixed-step RK4 for x' = A0 x(t) + Atau x(t - tau) with tau = N dt.

    ``hist_grid`` holds the state at t = -tau, ..., 0 (N + 1 rows) and
    ``hist_half`` at the N interval midpoints. Delayed midpoints inside the
    computed solution use cubic Hermite interpolation.
    """
    a0 = np.asarray(a0, dtype=float)
    atau = np.asarray(atau, dtype=float)
    hist_grid = np.asarray(hist_grid, dtype=float)
    hist_half = np.asarray(hist_half, dtype=float)
    n_delay = hist_grid.shape[0] - 1
    dim = a0.shape[0]
    # index j <-> time (j - n_delay) * dt
    xs = np.empty((n_delay + n_steps + 1, dim))
    xs[: n_delay + 1] = hist_grid
    fs = np.zeros_like(xs)

    def delayed_mid(j):
        # midpoint of [j, j+1] in the stored grid
        if j < n_delay:
            return hist_half[j]
        return 0.5 * (xs[j] + xs[j + 1]) + dt * (fs[j] - fs[j + 1]) / 8.0

    x = xs[n_delay].copy()
    fs[n_delay] = a0 @ x + atau @ xs[0]
    for k in range(n_steps):
        j = n_delay + k
        xdm = delayed_mid(j - n_delay)
        xd1 = xs[j - n_delay + 1]
        k1 = fs[j]
        k2 = a0 @ (x + 0.5 * dt * k1) + atau @ xdm
        k3 = a0 @ (x + 0.5 * dt * k2) + atau @ xdm
        k4 = a0 @ (x + dt * k3) + atau @ xd1
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        xs[j + 1] = x
        fs[j + 1] = a0 @ x + atau @ xs[j + 1 - n_delay]
    return xs[n_delay:].copy()
