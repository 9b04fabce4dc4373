"""Fixed-step integration of the scalar DDE behind a quasipolynomial.

The equation ``y^(n) + sum a_k y^(k)(t) + sum alpha_k y^(k)(t - tau) = 0``
is integrated in companion form with classical RK4; the delay is an integer
number of steps so breakpoints fall on the grid.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _core
from .errors import InputError
from .quasipoly import Quasipolynomial, RealPolynomial, companion

__all__ = ["DdeProblem", "Trajectory", "integrate", "fit_decay_rate", "peak_envelope"]


def _history_fn(history, n: int) -> Callable[[float], np.ndarray]:
    if callable(history) and not isinstance(history, RealPolynomial):
        def f(t):
            v = np.atleast_1d(np.asarray(history(t), dtype=float))
            if v.shape != (n,):
                raise InputError(f"history must return {n} values (y and {n - 1} derivatives)")
            return v
        return f
    if isinstance(history, RealPolynomial):
        derivs = [history.derivative(k) for k in range(n)]
        return lambda t: np.array([float(p(t)) for p in derivs])
    if np.isscalar(history):
        const = np.zeros(n)
        const[0] = float(history)
        return lambda t: const
    raise InputError("history must be a number, a RealPolynomial or a callable")


@dataclass
class DdeProblem:
    quasi: Quasipolynomial
    history: object = 1.0
    t_end: float = 20.0
    dt: float | None = None

    def __post_init__(self):
        tau = self.quasi.tau
        if self.dt is None:
            self.dt = tau / 100
        if self.dt > tau / 20 * (1 + 1e-12):
            raise InputError("dt must not exceed tau / 20")
        ratio = tau / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise InputError("tau must be an integer multiple of dt")
        if self.t_end < 5 * tau * (1 - 1e-12):
            raise InputError("t_end must be at least 5 tau")

    @property
    def delay_steps(self) -> int:
        return int(round(self.quasi.tau / self.dt))


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    dt: float

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.states.shape[1]
        w.writerow(["t", "y"] + [f"y{k}" for k in range(1, n)])
        for t, row in zip(self.t, self.states):
            w.writerow(["%.17g" % t] + ["%.17g" % v for v in row])
        return buf.getvalue()


def integrate(prob: DdeProblem) -> Trajectory:
    q = prob.quasi
    cp = companion(q)
    n_delay = prob.delay_steps
    dt = prob.dt
    h = _history_fn(prob.history, q.n)
    tau = n_delay * dt
    grid = np.array([h(-tau + k * dt) for k in range(n_delay + 1)])
    half = np.array([h(-tau + (k + 0.5) * dt) for k in range(n_delay)])
    n_steps = int(math.ceil(prob.t_end / dt - 1e-9))
    states = _core.rk4_dde(cp.a0, cp.atau, grid, half, n_steps, dt)
    t = dt * np.arange(n_steps + 1)
    return Trajectory(t, np.asarray(states), dt)


def peak_envelope(t: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Samples of ``|y|`` used for the envelope fit.

    Interior local maxima of ``|y|``; when ``|y|`` is strictly monotone (no
    oscillation) every sample is an envelope point.
    """
    a = np.abs(np.asarray(y, dtype=float))
    t = np.asarray(t, dtype=float)
    d = np.diff(a)
    if np.all(d < 0) or np.all(d > 0):
        return t, a
    k = np.nonzero((a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:]))[0] + 1
    return t[k], a[k]


def fit_decay_rate(traj: Trajectory | tuple, window: Sequence[float]) -> float:
    """Least-squares slope of ``log`` of the peak envelope of ``|y|`` on ``window``.

    ``traj`` may also be a ``(t, y)`` pair of sampled arrays.
    """
    if isinstance(traj, Trajectory):
        t, y = traj.t, traj.y
    else:
        t, y = (np.asarray(v, dtype=float) for v in traj)
    t1, t2 = window
    if not t1 < t2:
        raise InputError("window must satisfy t1 < t2")
    if t2 > t[-1] + 1e-9:
        raise InputError("window ends after the trajectory")
    sel = (t >= t1) & (t <= t2)
    tp, ap = peak_envelope(t[sel], y[sel])
    keep = ap > 0
    tp, ap = tp[keep], ap[keep]
    if len(tp) < 5:
        raise InputError(f"only {len(tp)} envelope peaks in the window; need at least 5")
    slope, _ = np.polyfit(tp, np.log(ap), 1)
    return float(slope)
