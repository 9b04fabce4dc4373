"""Delayed PD designs for the classical and the inverted pendulum.

Classical closed loop: ``lam^2 + g/L + (k_d lam + k_p) exp(-lam tau)``.
Inverted pendulum on a cart (linearized, dimensionless), with
``c = 1 / (1 - 3 eps / 4)``: ``lam^2 - c + c (k_d lam + k_p) exp(-lam tau)``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InfeasibleError, InputError
from .midcore import MidDesign, force_multiplicity, kernel_positivity
from .quasipoly import Quasipolynomial

__all__ = [
    "PendulumConfig",
    "PdDesign",
    "lambda0_of_tau",
    "tau_max",
    "gmid_design",
    "intermediate_design",
    "solve_assignment",
    "inverted_design",
    "triple_root_curves",
    "triple_root_table",
    "omega_plus",
    "omega_plus_max",
]


@dataclass(frozen=True)
class PendulumConfig:
    g: float = 1.0
    L: float = 1.0
    variant: str = "classical"
    eps: float = 0.0

    def __post_init__(self):
        if not (self.g > 0 and self.L > 0):
            raise InputError("g and L must be positive")
        if self.variant not in ("classical", "inverted"):
            raise InputError(f"unknown variant {self.variant!r}")
        if not (0.0 <= self.eps < 4.0 / 3.0):
            raise InputError("eps must lie in [0, 4/3)")

    @property
    def ratio(self) -> float:
        return self.g / self.L

    @property
    def gain_factor(self) -> float:
        """``c`` multiplying the input in the inverted-pendulum model."""
        return 1.0 / (1.0 - 0.75 * self.eps)

    def open_loop(self) -> tuple[float, float]:
        """``(a1, a0)`` of the delay-free part ``lam^2 + a1 lam + a0``."""
        if self.variant == "classical":
            return 0.0, self.ratio
        return 0.0, -self.gain_factor


@dataclass(frozen=True)
class PdDesign:
    k_p: float
    k_d: float
    tau: float
    lambda0: float
    mu: float
    certificate_eligible: bool
    a_param: float
    cfg: PendulumConfig = PendulumConfig()

    def quasi(self) -> Quasipolynomial:
        a1, a0 = self.cfg.open_loop()
        c = 1.0 if self.cfg.variant == "classical" else self.cfg.gain_factor
        return Quasipolynomial((a0, a1, 1.0), (c * self.k_p, c * self.k_d), self.tau, m=1)

    def mid_design(self) -> MidDesign:
        return force_multiplicity(2, 1, self.tau, self.lambda0, self.a_param)

    def to_dict(self) -> dict:
        return {
            "variant": self.cfg.variant,
            "g": self.cfg.g,
            "L": self.cfg.L,
            "eps": self.cfg.eps,
            "k_p": self.k_p,
            "k_d": self.k_d,
            "tau": self.tau,
            "lambda0": self.lambda0,
            "mu": self.mu,
            "A": self.a_param,
            "certificate_eligible": self.certificate_eligible,
        }


def tau_max(cfg: PendulumConfig) -> float:
    return math.sqrt(2.0 / cfg.ratio)


def lambda0_of_tau(ratio: float, tau: float) -> float:
    """Triple-root location for the classical pendulum, ``0 < tau <= sqrt(2 / ratio)``."""
    if not tau > 0:
        raise InputError("tau must be positive")
    rad = 2.0 - ratio * tau * tau
    if rad < 0:
        if rad > -1e-12:
            rad = 0.0
        else:
            raise InputError(f"tau={tau} exceeds sqrt(2 L / g); no real triple root")
    return (-2.0 + math.sqrt(rad)) / tau


def gmid_design(cfg: PendulumConfig) -> PdDesign:
    """Quadruple root at ``-sqrt(2 g / L)``: the only GMID configuration."""
    if cfg.variant != "classical":
        raise InputError("the GMID closed form is for the classical pendulum")
    r = cfg.ratio
    lam0 = -math.sqrt(2 * r)
    tau = math.sqrt(2 / r)
    kd = -math.exp(-2) * math.sqrt(2 * r)
    kp = -5 * math.exp(-2) * r
    mu = tau * lam0
    return PdDesign(kp, kd, tau, lam0, mu, False, -1 - 2 * mu, cfg)


def intermediate_design(cfg: PendulumConfig, tau: float) -> PdDesign:
    """Triple root at ``lambda0(tau)`` with closed-form PD gains."""
    if cfg.variant != "classical":
        raise InputError("use inverted_design for the inverted pendulum")
    tmax = tau_max(cfg)
    if not 0 < tau < tmax:
        raise InputError(f"tau must lie in (0, {tmax:.17g})")
    g, L = cfg.g, cfg.L
    lam0 = lambda0_of_tau(cfg.ratio, tau)
    mu = tau * lam0
    e = math.exp(mu)
    kd = 2 * (mu + 1) * e / tau
    kp = 2 * (5 * L * mu + g * tau * tau + 3 * L) * e / (tau * tau * L)
    eligible = mu >= -1.0
    return PdDesign(kp, kd, tau, lam0, mu, eligible, -1 - 2 * mu, cfg)


def _assignment_residual(tau, lam0, A, a1, a0):
    try:
        d = force_multiplicity(2, 1, tau, lam0, A)
    except ArithmeticError:
        # overflow far from any solution; the line search rejects the step
        return np.array([np.inf, np.inf])
    c = d.quasi.p0.coeffs
    return np.array([c[1] - a1, c[0] - a0])


def solve_assignment(tau: float, a1: float, a0: float, max_iter: int = 100) -> tuple[float, float]:
    """``(lambda0, A)`` whose multiplicity-3 design has delay-free part ``lam^2 + a1 lam + a0``.

    Damped Newton from ``(-1/tau, 0)`` with a central-difference Jacobian.
    """
    if not tau > 0:
        raise InputError("tau must be positive")
    x = np.array([-1.0 / tau, 0.0])
    r = _assignment_residual(tau, *x, a1, a0)
    scale = max(1.0, abs(a0), abs(a1))
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= 1e-12 * scale:
            return float(x[0]), float(x[1])
        h = 1e-6 * max(1.0, np.max(np.abs(x)))
        jac = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            jac[:, k] = (_assignment_residual(tau, *(x + e), a1, a0) - _assignment_residual(tau, *(x - e), a1, a0)) / (2 * h)
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        norm = np.linalg.norm(r)
        while t > 1e-4:
            trial = x + t * step
            rt = _assignment_residual(tau, *trial, a1, a0)
            if np.linalg.norm(rt) < norm:
                x, r = trial, rt
                break
            t *= 0.5
        else:
            break
    if np.max(np.abs(r)) <= 1e-10 * scale:
        return float(x[0]), float(x[1])
    raise InfeasibleError(
        f"no multiplicity-3 assignment for tau={tau}, a1={a1}, a0={a0} (residual {np.max(np.abs(r)):.3g})"
    )


def inverted_design(cfg: PendulumConfig, tau: float) -> PdDesign:
    """Multiplicity-3 PD design for the linearized inverted pendulum on a cart."""
    if cfg.variant != "inverted":
        raise InputError("inverted_design needs variant='inverted'")
    a1, a0 = cfg.open_loop()
    lam0, A = solve_assignment(tau, a1, a0)
    d = force_multiplicity(2, 1, tau, lam0, A)
    alpha = d.quasi.ptau.coeffs + (0.0,) * (2 - len(d.quasi.ptau.coeffs))
    c = cfg.gain_factor
    return PdDesign(alpha[0] / c, alpha[1] / c, tau, lam0, tau * lam0, kernel_positivity(2, 1, A), A, cfg)


def triple_root_curves(ratios: Sequence[float], tau_grid: int) -> list[tuple[float, float, float]]:
    """``(ratio, tau, lambda0)`` on ``tau_k = tau_max k / tau_grid``, ``k = 1..tau_grid``.

    The last row of each curve is the closed endpoint, where the triple root
    merges into the GMID quadruple root.
    """
    if tau_grid < 2:
        raise InputError("tau_grid must be at least 2")
    rows = []
    for r in ratios:
        if not r > 0:
            raise InputError("ratios must be positive")
        tmax = math.sqrt(2.0 / r)
        for k in range(1, tau_grid + 1):
            tau = tmax * k / tau_grid
            rows.append((float(r), tau, lambda0_of_tau(r, tau)))
    return rows


def triple_root_table(ratios: Sequence[float] = tuple(range(1, 8)), tau_grid: int = 200) -> str:
    """CSV text with columns ``ratio, tau, lambda0``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ratio", "tau", "lambda0"])
    for row in triple_root_curves(ratios, tau_grid):
        w.writerow(["%.17g" % v for v in row])
    return buf.getvalue()


def omega_plus(x):
    """Delay-independent upper envelope of the larger root in ``Omega`` of the order-1 ``H``."""
    x = np.asarray(x, dtype=float)
    return x / (1 + 2 * x) * (-2 * x**2 + 3 * x + 2 + 2 * np.sqrt(4 * x + 3))


def omega_plus_max() -> tuple[float, float]:
    """``(x*, Omega+(x*))`` by bounded scalar maximization."""
    res = minimize_scalar(lambda x: -omega_plus(x), bounds=(0.0, 3.0), method="bounded", options={"xatol": 1e-10})
    return float(res.x), float(-res.fun)
