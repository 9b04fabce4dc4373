"""Frequency bound for right-half-plane roots of a normalized quasipolynomial.

A root ``z = x + i w`` of ``P0(z) + Ptau(z) e^{-z}`` satisfies
``|Ptau(z)|^2 = |P0(z)|^2 e^{2x}``. For ``x >= 0`` the truncated Taylor sum
``T_ord(x) <= e^{2x}``, so every such root has ``H(x, w^2) >= 0`` where

    H(x, W) = |Ptau(x + i sqrt(W))|^2 - |P0(x + i sqrt(W))|^2 T_ord(x).

Raising ``ord`` until ``sup_x max{W : H(x, W) = 0} <= pi^2`` yields
``|w| <= pi`` for all such roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InputError
from .quasipoly import Quasipolynomial, companion, matrix_norm2

__all__ = [
    "BivariatePoly",
    "FreqBoundReport",
    "build_H",
    "taylor_exp2",
    "real_roots",
    "max_root",
    "sup_frequency",
    "frequency_bound",
]

X_FALLBACK = 50.0
GRID_POINTS = 512
X_RESOLUTION = 1e-4
BISECT_TOL = 1e-10


@dataclass(frozen=True)
class BivariatePoly:
    """Exact polynomial ``sum c[(i, j)] x^i W^j`` with rational coefficients."""

    coeffs: dict

    def __post_init__(self):
        clean = {k: Fraction(v) for k, v in self.coeffs.items() if v != 0}
        object.__setattr__(self, "coeffs", clean)

    @property
    def deg_x(self) -> int:
        return max((i for i, _ in self.coeffs), default=-1)

    @property
    def deg_w(self) -> int:
        return max((j for _, j in self.coeffs), default=-1)

    def grid(self) -> np.ndarray:
        """Float coefficient grid ``g[i, j]`` (trimmed)."""
        g = np.zeros((self.deg_x + 1, self.deg_w + 1))
        for (i, j), c in self.coeffs.items():
            g[i, j] = float(c)
        return g

    def __call__(self, x, w):
        return sum(float(c) * x**i * w**j for (i, j), c in self.coeffs.items())

    def in_w(self, x: float) -> np.ndarray:
        """Ascending coefficients of ``W -> H(x, W)`` at fixed ``x``."""
        g = self.grid()
        if g.size == 0:
            return np.zeros(1)
        powers = x ** np.arange(g.shape[0])
        return powers @ g


def _mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for (i1, j1), a in p.items():
        for (i2, j2), b in q.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0) + a * b
    return out


def _add(p: dict, q: dict, sign=1) -> dict:
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0) + sign * v
    return out


def _abs2_xw(coeffs: Sequence) -> dict:
    """``|P(x + i w)|^2`` as a polynomial in ``(x, w)``."""
    re: dict = {}
    im: dict = {}
    for k, c in enumerate(coeffs):
        c = Fraction(c)
        if c == 0:
            continue
        for j in range(k + 1):
            term = c * math.comb(k, j)
            key = (k - j, j)
            # i^j: real for even j, imaginary for odd j
            if j % 2 == 0:
                re[key] = re.get(key, 0) + term * (-1) ** (j // 2)
            else:
                im[key] = im.get(key, 0) + term * (-1) ** (j // 2)
    return _add(_mul(re, re), _mul(im, im))


def taylor_exp2(order: int) -> dict:
    """``T_order(x) = sum_{k <= order} (2x)^k / k!`` as ``{(k, 0): coeff}``."""
    return {(k, 0): Fraction(2**k, math.factorial(k)) for k in range(order + 1)}


def _coefficients(q) -> tuple[list, list]:
    if isinstance(q, Quasipolynomial):
        if q.tau != 1.0:
            raise InputError("build_H needs a normalized quasipolynomial (delay 1)")
        return [Fraction(c) for c in q.p0.coeffs], [Fraction(c) for c in q.ptau.coeffs]
    p0, ptau = q
    return [Fraction(c) for c in p0], [Fraction(c) for c in ptau]


def build_H(q_norm, order: int) -> BivariatePoly:
    """Exact ``H(x, W)`` for a normalized quasipolynomial.

    ``q_norm`` is a unit-delay :class:`Quasipolynomial` or a pair of ascending
    coefficient sequences ``(p0, ptau)`` (ints, floats or Fractions).
    """
    if order < 0:
        raise InputError("order must be nonnegative")
    p0, ptau = _coefficients(q_norm)
    f = _add(_abs2_xw(ptau), _mul(_abs2_xw(p0), taylor_exp2(order)), sign=-1)
    h = {}
    for (i, j), c in f.items():
        if c == 0:
            continue
        assert j % 2 == 0, "odd power of omega survived: coefficients must be real"
        h[(i, j // 2)] = c
    return BivariatePoly(h)


def _polyval(c: np.ndarray, x: float) -> float:
    acc = 0.0
    for v in c[::-1]:
        acc = acc * x + v
    return acc


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    scale = np.max(np.abs(c)) if c.size else 0.0
    k = len(c)
    while k > 0 and abs(c[k - 1]) <= 1e-300 + 1e-15 * scale * 0:
        k -= 1
    return c[:k]


def _bisect(c, a, b, fa):
    for _ in range(200):
        mid = 0.5 * (a + b)
        if b - a <= BISECT_TOL * max(1.0, abs(mid)):
            break
        fm = _polyval(c, mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def real_roots(c, lo: float, hi: float) -> list[float]:
    """Real roots of an ascending-coefficient polynomial in ``[lo, hi]``.

    Roots of the derivative split the interval into monotone pieces, each
    holding at most one root, which is then bisected.
    """
    c = _trim(c)
    deg = len(c) - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -c[0] / c[1]
        return [r] if lo <= r <= hi else []
    dc = c[1:] * np.arange(1, deg + 1)
    crit = real_roots(dc, lo, hi)
    pts = [lo] + crit + [hi]
    vals = [_polyval(c, x) for x in pts]
    scale = np.sum(np.abs(c) * np.maximum(1.0, abs(hi)) ** np.arange(deg + 1))
    out = []
    for k in range(len(pts) - 1):
        a, b = pts[k], pts[k + 1]
        fa, fb = vals[k], vals[k + 1]
        if fa == 0.0:
            out.append(a)
        elif fa * fb < 0:
            out.append(_bisect(c, a, b, fa))
        elif k > 0 and abs(fa) <= 1e-14 * scale:
            # tangential (even-multiplicity) root at a critical point
            out.append(a)
    if vals[-1] == 0.0:
        out.append(hi)
    dedup = []
    for r in sorted(out):
        if not dedup or r - dedup[-1] > BISECT_TOL * max(1.0, abs(r)):
            dedup.append(r)
    return dedup


def max_root(h: BivariatePoly, x: float) -> float | None:
    """Largest nonnegative real root of ``W -> H(x, W)``, or ``None``."""
    c = _trim(h.in_w(x))
    if len(c) <= 1:
        return None
    lead = abs(c[-1])
    bound = 1.0 + np.max(np.abs(c[:-1])) / lead
    roots = real_roots(c, 0.0, bound)
    return max(roots) if roots else None


@dataclass
class SupResult:
    sup: float | None
    x_at_sup: float | None
    curve: list[tuple[float, float | None]]


def _golden_max(f, a, b, tol):
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    best = max((fc, c), (fd, d))
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        best = max(best, (fc, c), (fd, d))
    return best


def _sup_detail(h: BivariatePoly, x_max: float) -> SupResult:
    if not x_max > 0:
        raise InputError("x_max must be positive")
    xs = np.linspace(0.0, x_max, GRID_POINTS)
    vals = [max_root(h, float(x)) for x in xs]
    curve = [(float(x), v) for x, v in zip(xs, vals)]
    num = np.array([-np.inf if v is None else v for v in vals])
    if np.all(np.isinf(num)):
        return SupResult(None, None, curve)

    def g(x):
        v = max_root(h, x)
        return -math.inf if v is None else v

    best = (float(np.max(num)), float(xs[int(np.argmax(num))]))
    # refine around every sampled local maximum
    for k in range(len(xs)):
        if np.isinf(num[k]):
            continue
        left = num[k - 1] if k > 0 else -np.inf
        right = num[k + 1] if k + 1 < len(xs) else -np.inf
        if num[k] >= left and num[k] >= right:
            a = xs[max(k - 1, 0)]
            b = xs[min(k + 1, len(xs) - 1)]
            cand = _golden_max(g, float(a), float(b), X_RESOLUTION)
            curve.append((cand[1], cand[0] if math.isfinite(cand[0]) else None))
            if cand[0] > best[0]:
                best = (cand[0], cand[1])
    curve.sort(key=lambda r: r[0])
    return SupResult(float(best[0]), float(best[1]), curve)


def sup_frequency(h: BivariatePoly, x_max: float) -> float | None:
    """``sup_{0 <= x <= x_max} max_k W_k(x)`` by sampling and local refinement."""
    return _sup_detail(h, x_max).sup


@dataclass
class FreqBoundReport:
    order_used: int
    omega_bound: float | None
    dominance_flag: bool
    sup_curve: list = field(default_factory=list)
    sup_value: float | None = None
    x_at_sup: float | None = None
    x_max: float = X_FALLBACK
    x_max_rule: str = ""
    history: list = field(default_factory=list)

    def __post_init__(self):
        if self.dominance_flag and self.omega_bound is not None:
            assert self.omega_bound <= math.pi

    def to_dict(self) -> dict:
        return {
            "order_used": self.order_used,
            "omega_bound": self.omega_bound,
            "dominance_flag": self.dominance_flag,
            "sup_value": self.sup_value,
            "x_at_sup": self.x_at_sup,
            "x_max": self.x_max,
            "x_max_rule": self.x_max_rule,
            "history": [{"order": o, "sup": s} for o, s in self.history],
        }


def choose_x_max(q_norm: Quasipolynomial) -> tuple[float, str]:
    """Twice the envelope bound at ``x = 0`` (roots with ``x >= 0`` have ``x <= |z|``)."""
    cp = companion(q_norm)
    env = matrix_norm2(cp.a0) + matrix_norm2(cp.atau)
    if math.isfinite(env) and env > 0:
        return 2.0 * env, "2 x envelope bound ||A0|| + ||Atau|| at x = 0"
    return X_FALLBACK, "fallback constant"


def frequency_bound(q_norm: Quasipolynomial, max_ord: int = 5) -> FreqBoundReport:
    """Raise the Taylor order until the supremum drops to ``pi^2`` or below."""
    if q_norm.tau != 1.0:
        raise InputError("frequency_bound needs a normalized quasipolynomial (delay 1)")
    x_max, rule = choose_x_max(q_norm)
    history = []
    detail = None
    for order in range(max_ord + 1):
        detail = _sup_detail(build_H(q_norm, order), x_max)
        history.append((order, detail.sup))
        if detail.sup is None or detail.sup <= math.pi**2:
            bound = None if detail.sup is None else math.sqrt(max(detail.sup, 0.0))
            return FreqBoundReport(
                order, bound, True, detail.curve, detail.sup, detail.x_at_sup, x_max, rule, history
            )
    return FreqBoundReport(
        max_ord, None, False, detail.curve, detail.sup, detail.x_at_sup, x_max, rule, history
    )
