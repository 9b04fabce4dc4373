"""Multiplicity-(n+m) coefficient synthesis and dominance certification.

For a real ``lambda0`` and a free parameter ``A`` the quasipolynomial

    Delta(lam) = tau^m (lam - lambda0)^(n+m) / (m-1)!
                 * int_0^1 t^(m-1) (1-t)^(n-1) (1 - A t) exp(-t tau (lam - lambda0)) dt

is the unique member of the retarded family with a root of multiplicity at
least ``n + m`` at ``lambda0``. Splitting ``1 - A t = (1 - A) + A (1 - t)``
turns the integral into a Kummer-type function ``F(-tau (lam - lambda0), p)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import InputError, SingularityError
from .quasipoly import (
    Quasipolynomial,
    RealPolynomial,
    SearchBox,
    denormalize,
    eval_derivatives,
    normalize,
)


MAX_ORDER = 20
MULTIPLICITY_TOL = 1e-9

__all__ = [
    "MidDesign",
    "Certificate",
    "HilleScan",
    "kernel_polynomial",
    "integral_poly_exp",
    "force_multiplicity",
    "multiplicity_check",
    "combination_params",
    "factorization_residual",
    "integral_form",
    "kernel_positivity",
    "hille_condition_scan",
    "certify_dominance",
    "design_from_quasi",
    "plant_root",
]


@dataclass(frozen=True)
class MidDesign:
    n: int
    m: int
    tau: float
    lambda0: float
    a_param: float
    quasi: Quasipolynomial
    combo: specfun.CombinationParams

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "tau": self.tau,
            "lambda0": self.lambda0,
            "A": self.a_param,
        }


@dataclass
class Certificate:
    verdict: str  # "certified" | "not-certified-by-method" | "refuted"
    freq_bound: float | None
    kernel_positive: bool
    notes: list[str] = field(default_factory=list)
    order_used: int | None = None
    numeric_margin: float | None = None

    def __post_init__(self):
        if self.verdict == "certified":
            assert self.kernel_positive
            assert self.freq_bound is None or self.freq_bound <= math.pi

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "freq_bound": self.freq_bound,
            "kernel_positive": self.kernel_positive,
            "order_used": self.order_used,
            "numeric_margin": self.numeric_margin,
            "notes": list(self.notes),
        }


def _factorial(k: int) -> float:
    return float(math.factorial(k))


def _check_orders(n: int, m: int):
    if n < 1 or m < 1:
        raise InputError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if m >= n:
        raise InputError(f"need m < n (retarded type), got n={n}, m={m}")
    if n + m > MAX_ORDER:
        raise InputError(f"n + m = {n + m} exceeds the supported order {MAX_ORDER}")


def kernel_polynomial(n: int, m: int, A: float) -> RealPolynomial:
    """``t^(m-1) (1-t)^(n-1) (1 - A t)``."""
    p = RealPolynomial((0.0,) * (m - 1) + (1.0,))
    for _ in range(n - 1):
        p = p * RealPolynomial((1.0, -1.0))
    return p * RealPolynomial((1.0, -float(A)))


def integral_poly_exp(p: RealPolynomial, z: complex) -> complex:
    """``int_0^1 p(t) exp(-z t) dt``.

    Closed form by repeated integration by parts; near ``z = 0`` (where that
    form cancels catastrophically) the exponential is expanded instead.
    """
    z = complex(z)
    if not p.coeffs:
        return 0j
    if abs(z) < 1.0:
        # int t^k e^{-zt} = sum_j (-z)^j / (j! (k + j + 1))
        total = 0j
        for k, c in enumerate(p.coeffs):
            if c == 0.0:
                continue
            term = 1.0 + 0j
            s = term / (k + 1)
            for j in range(1, 200):
                term *= -z / j
                inc = term / (k + j + 1)
                s += inc
                if abs(inc) < 1e-18 * abs(s):
                    break
            total += c * s
        return total
    ez = np.exp(-z)
    d0 = p.taylor(0.0, p.degree)
    d1 = p.taylor(1.0, p.degree)
    total = 0j
    zk = z
    for k in range(p.degree + 1):
        total += (d0[k] - d1[k] * ez) / zk
        zk *= z
    return complex(total)


def combination_params(n: int, m: int, A: float) -> specfun.CombinationParams:
    """``(m, n+m, (1-A)(n-1)!/(n+m-1)!, A n!/(n+m)!)``."""
    if n < 1 or m < 1:
        raise InputError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    alpha = (1.0 - A) * _factorial(n - 1) / _factorial(n + m - 1)
    beta = A * _factorial(n) / _factorial(n + m)
    if alpha == 0 and beta == 0:
        raise InputError("alpha and beta both vanish")
    return specfun.CombinationParams(float(m), float(n + m), alpha, beta)


def _normalized_coefficients(n: int, m: int, A: float) -> tuple[list[float], list[float]]:
    """Coefficients of the unit-delay quasipolynomial in ``z = tau (lam - lambda0)``.

    From the integration-by-parts expansion:
    ``P0~(z) = sum_k p^(k)(0) z^(n+m-k-1) / (m-1)!`` and
    ``Ptau~(z) = -sum_k p^(k)(1) z^(n+m-k-1) / (m-1)!``.
    """
    p = kernel_polynomial(n, m, A)
    d = n + m - 1
    at0 = p.taylor(0.0, d)
    at1 = p.taylor(1.0, d)
    fm = _factorial(m - 1)
    c0 = [0.0] * (d + 1)
    c1 = [0.0] * (d + 1)
    for k in range(d + 1):
        c0[d - k] = at0[k] / fm
        c1[d - k] = -at1[k] / fm
    # exact structure: P0~ has degree n with unit leading term, Ptau~ degree <= m
    c0 = c0[: n + 1]
    c0[n] = 1.0
    return c0, c1[: m + 1]


def multiplicity_check(q: Quasipolynomial, lambda0: float, k_max: int | None = None) -> int:
    """Number of leading derivatives of ``Delta`` vanishing at ``lambda0``.

    A derivative counts as zero when below ``1e-9 * scale`` with
    ``scale = max|coefficient| * max(1, |lambda0|)^n``.
    """
    limit = q.degree()
    if k_max is None:
        k_max = limit
    if k_max > limit:
        raise InputError(f"k_max={k_max} exceeds the degree bound {limit}")
    scale = q.coefficient_scale() * max(1.0, abs(lambda0)) ** q.n
    derivs = eval_derivatives(q, lambda0, k_max)
    for k in range(k_max + 1):
        if abs(derivs[k]) > MULTIPLICITY_TOL * scale:
            return k
    return k_max


def force_multiplicity(n: int, m: int, tau: float, lambda0: float, A: float) -> MidDesign:
    """Synthesize ``Delta`` with a root of multiplicity ``n + m`` at ``lambda0``."""
    _check_orders(n, m)
    if not tau > 0:
        raise InputError(f"delay must be positive, got {tau}")
    c0, c1 = _normalized_coefficients(n, m, A)
    qn = Quasipolynomial(RealPolynomial(tuple(c0)), RealPolynomial(tuple(c1)), 1.0, m=m)
    q = denormalize(qn, lambda0, tau)
    design = MidDesign(n, m, float(tau), float(lambda0), float(A), q, combination_params(n, m, A))
    k = multiplicity_check(q, lambda0, n + m)
    if k < n + m:
        raise ArithmeticError(
            f"synthesized design has multiplicity {k} < {n + m} at lambda0={lambda0}"
        )
    return design


def factorization_residual(d: MidDesign, lam: complex) -> complex:
    """Relative residual of ``Delta(lam) = tau^m (lam-lambda0)^(n+m) F(-tau(lam-lambda0))``.

    Normalized by the larger of the two sides.
    """
    lam = complex(lam)
    if lam == d.lambda0:
        raise InputError("lam must differ from lambda0")
    lhs = complex(d.quasi(lam))
    w = lam - d.lambda0
    rhs = d.tau**d.m * w ** (d.n + d.m) * specfun.combo_F(d.combo, -d.tau * w)
    return (lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


def integral_form(d: MidDesign, lam: complex, nodes: int = 64) -> complex:
    """Right-hand side of the integral representation by Gauss-Legendre quadrature."""
    lam = complex(lam)
    w = lam - d.lambda0
    x, wts = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (1.0 + x)
    kern = t ** (d.m - 1) * (1 - t) ** (d.n - 1) * (1 - d.a_param * t)
    integral = 0.5 * np.sum(wts * kern * np.exp(-t * d.tau * w))
    return complex(d.tau**d.m * w ** (d.n + d.m) / _factorial(d.m - 1) * integral)


def kernel_positivity(n: int, m: int, A: float) -> bool:
    """``t^(m-1)(1-t)^(n-1)(1-At) > 0`` on ``(0, 1)``, i.e. ``A <= 1``."""
    return A <= 1.0


@dataclass
class HilleScan:
    ok: bool
    worst_value: float
    worst_t: float | None
    worst_z: complex | None
    skipped: int
    note: str


def hille_condition_scan(
    p: specfun.CombinationParams, box: SearchBox | None, grid: int = 16
) -> HilleScan:
    """Sample ``Re[z G(t z, p)]`` over ``t in (0,1)`` and ``z`` in a left-half-plane box.

    Evidence on the sampled points only. Ties in the minimum are broken by
    lexicographic ``(Re z, Im z, t)``.
    """
    note = "sampled surrogate: checked only on the grid, not on the (unknown) zeros of F"
    if box is None:
        return HilleScan(True, math.inf, None, None, 0, note + "; empty box")
    if box.re_max > 0:
        raise InputError("scan box must lie in the closed left half-plane")
    if grid < 8:
        raise InputError("grid must be at least 8")
    ts = (np.arange(grid) + 0.5) / grid
    xs = np.linspace(box.re_min, box.re_max, grid)
    ys = np.linspace(box.im_min, box.im_max, grid)
    worst = (math.inf, 0.0, 0.0, 0.0)
    skipped = 0
    for x in xs:
        for y in ys:
            z = complex(x, y)
            if z == 0:
                skipped += 1
                continue
            for t in ts:
                try:
                    g = specfun.ode_data(p, t * z).g_val
                except SingularityError:
                    skipped += 1
                    continue
                v = (z * g).real
                cand = (v, x, y, t)
                if cand < worst:
                    worst = cand
    v, x, y, t = worst
    if skipped:
        note += f"; {skipped} singular samples skipped"
    if math.isinf(v):
        return HilleScan(True, v, None, None, skipped, note)
    return HilleScan(v >= -1e-12, v, t, complex(x, y), skipped, note)


def _padded(p: RealPolynomial, length: int) -> list[float]:
    return list(p.coeffs) + [0.0] * (length - len(p.coeffs))


def design_from_quasi(q: Quasipolynomial, lambda0: float, rtol: float = 1e-9) -> MidDesign:
    """Recover ``A`` from a quasipolynomial built by :func:`force_multiplicity`.

    The ``z^(n-1)`` coefficient of the normalized ``P0`` equals ``-m (n - 1 + A)``.
    """
    n, m = q.n, q.m
    _check_orders(n, m)
    qn = normalize(q, lambda0)
    A = -(n - 1) - qn.p0.coeffs[n - 1] / m
    d = force_multiplicity(n, m, q.tau, lambda0, A)
    got = _padded(q.p0, n + 1) + _padded(q.ptau, m + 1)
    ref = _padded(d.quasi.p0, n + 1) + _padded(d.quasi.ptau, m + 1)
    diff = max(abs(u - v) for u, v in zip(got, ref))
    if diff > rtol * max(1.0, max(abs(v) for v in ref)):
        raise InputError(
            f"quasipolynomial is not a multiplicity-{n + m} design at lambda0={lambda0}"
        )
    return MidDesign(n, m, q.tau, lambda0, A, q, d.combo)


def plant_root(n: int, m: int, tau: float, lambda0: float, shift: float) -> MidDesign:
    """Design whose free parameter places an extra real root at ``lambda0 + shift``.

    ``Delta(lambda0 + shift) = 0`` iff ``F(-tau shift) = 0``, which is linear in ``A``.
    """
    _check_orders(n, m)
    z = -tau * shift
    c1 = _factorial(n - 1) / _factorial(n + m - 1)
    c2 = _factorial(n) / _factorial(n + m)
    f1 = specfun.kummer_phi((m, n + m), z).real
    f2 = specfun.kummer_phi((m, n + m + 1), z).real
    denom = c1 * f1 - c2 * f2
    if denom == 0:
        raise InputError("cannot place a root at this shift")
    return force_multiplicity(n, m, tau, lambda0, c1 * f1 / denom)


def certify_dominance(d: MidDesign, max_ord: int = 5, numeric_check: bool = True) -> Certificate:
    """Frequency bound + kernel positivity, overridden by a numeric scan.

    When the right-half-plane roots of the normalized quasipolynomial satisfy
    ``|omega| <= pi`` and the kernel ``q`` is positive on ``(0, 1)``, any such
    root ``x + i omega`` would need ``int q(t) e^{-tx} sin(omega t) dt = 0``
    (or ``int q(t) e^{-tx} dt = 0`` for ``omega = 0``), impossible for a
    positive integrand. The numeric scan turns any found right-of-``lambda0``
    root into a refutation.
    """
    from . import freqbound, roots  # local: freqbound/roots import this module's types

    notes = []
    qn = normalize(d.quasi, d.lambda0)
    report = freqbound.frequency_bound(qn, max_ord)
    notes.append(f"frequency bound: x_max={report.x_max:.6g} ({report.x_max_rule})")
    kpos = kernel_positivity(d.n, d.m, d.a_param)
    if not kpos:
        notes.append(f"kernel changes sign on (0,1): A={d.a_param:.6g} > 1")
    if report.dominance_flag and kpos:
        verdict = "certified"
        notes.append("sine-integral contradiction excludes right-half roots (positive integrand)")
    else:
        verdict = "not-certified-by-method"
        if not report.dominance_flag:
            notes.append(f"no order <= {max_ord} gives sup Omega <= pi^2")
    margin = None
    if numeric_check:
        im_cap = max(math.pi / d.tau, 1.0) * 4
        res = roots.verify_dominance_numeric(d.quasi, d.lambda0, im_cap)
        margin = res.margin
        notes.append(f"numeric scan: {res.note}")
        if not res.dominant:
            verdict = "refuted"
            notes.append("numeric scan found a root to the right of lambda0")
    return Certificate(
        verdict,
        report.omega_bound,
        kpos,
        notes,
        order_used=report.order_used if report.dominance_flag else None,
        numeric_margin=margin,
    )
