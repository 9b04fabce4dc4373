"""Polynomials and single-delay quasipolynomials.

A quasipolynomial is ``Delta(lam) = P0(lam) + Ptau(lam) * exp(-lam * tau)`` with
``P0`` monic of degree ``n`` and ``deg Ptau <= m < n`` (retarded type).
Coefficients are stored in ascending order throughout.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _core
from .errors import InputError, NeutralTypeError

__all__ = [
    "RealPolynomial",
    "Quasipolynomial",
    "CompanionPair",
    "SearchBox",
    "eval_derivatives",
    "normalize",
    "denormalize",
    "companion",
    "matrix_norm2",
    "envelope_bound",
    "imag_axis_bound",
    "cauchy_bound",
]


@dataclass(frozen=True)
class RealPolynomial:
    """Real polynomial with ascending coefficients ``c0 + c1 x + ... + cd x^d``.

    Trailing zeros are stripped, so the zero polynomial has ``coeffs == ()``
    and ``degree is None``.
    """

    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        c = [float(v) for v in self.coeffs]
        while c and c[-1] == 0.0:
            c.pop()
        if any(not math.isfinite(v) for v in c):
            raise InputError("polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0.0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self, k: int = 1) -> "RealPolynomial":
        c = list(self.coeffs)
        for _ in range(k):
            c = [i * c[i] for i in range(1, len(c))]
        return RealPolynomial(tuple(c))

    def taylor(self, x0, k_max: int) -> list:
        """Derivatives ``p(x0), p'(x0), ..., p^(k_max)(x0)``."""
        out = []
        p = self
        for _ in range(k_max + 1):
            out.append(p(x0) if p.coeffs else 0.0 * x0)
            p = p.derivative()
        return out

    def compose_affine(self, shift: float, scale: float) -> "RealPolynomial":
        """Coefficients of ``x -> p(shift + scale * x)``."""
        d = len(self.coeffs)
        out = [0.0] * d
        for k in range(d):
            ck = self.coeffs[k]
            if ck == 0.0:
                continue
            # (shift + scale x)^k by the binomial theorem
            for j in range(k + 1):
                out[j] += ck * math.comb(k, j) * shift ** (k - j) * scale**j
        return RealPolynomial(tuple(out))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return RealPolynomial(tuple(other * c for c in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return RealPolynomial(())
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RealPolynomial(tuple(out))

    __rmul__ = __mul__

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0.0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0.0] * (n - len(other.coeffs))
        return RealPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other):
        return self + (-1.0) * other


def cauchy_bound(coeffs: Sequence[float]) -> float:
    """Cauchy bound ``1 + max |c_i / c_d|`` on the moduli of all roots."""
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    if len(c) <= 1:
        return 0.0
    lead = abs(c[-1])
    return 1.0 + max(abs(v) / lead for v in c[:-1])


@dataclass(frozen=True)
class Quasipolynomial:
    """``P0(lam) + Ptau(lam) exp(-lam tau)``, retarded type.

    ``m`` is the nominal delayed order (the length of ``alpha`` minus one in
    the JSON form); it defaults to the actual degree of ``ptau``.
    """

    p0: RealPolynomial
    ptau: RealPolynomial
    tau: float
    m: int | None = None

    def __post_init__(self):
        if not isinstance(self.p0, RealPolynomial):
            object.__setattr__(self, "p0", RealPolynomial(tuple(self.p0)))
        if not isinstance(self.ptau, RealPolynomial):
            object.__setattr__(self, "ptau", RealPolynomial(tuple(self.ptau)))
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise InputError(f"delay must be positive and finite, got {self.tau!r}")
        n = self.p0.degree
        if n is None or n < 1:
            raise InputError("P0 must have degree n >= 1")
        lead = self.p0.coeffs[-1]
        if abs(lead - 1.0) > 1e-12:
            raise InputError(f"P0 must be monic, leading coefficient is {lead!r}")
        c = list(self.p0.coeffs)
        c[-1] = 1.0
        object.__setattr__(self, "p0", RealPolynomial(tuple(c)))
        deg_tau = -1 if self.ptau.degree is None else self.ptau.degree
        m = max(deg_tau, 0) if self.m is None else int(self.m)
        if m < deg_tau or m < 0:
            raise InputError(f"nominal m={m} is incompatible with deg(Ptau)={deg_tau}")
        if m >= n:
            raise NeutralTypeError(
                f"m={m} >= n={n}: neutral-type quasipolynomials are not supported; "
                "root counting is implemented for retarded type only"
            )
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return self.p0.degree

    def degree(self) -> int:
        """Polya-Szego degree ``n + m + 1``."""
        return self.n + self.m + 1

    def __call__(self, lam):
        val, _, _ = _core.qp_eval(self.p0.coeffs, self.ptau.coeffs or (0.0,), self.tau, np.atleast_1d(lam))
        return val[0] if np.isscalar(lam) else val

    def eval_with_derivative(self, lam):
        """Arrays ``(Delta, Delta', term_scale)`` at the points ``lam``."""
        return _core.qp_eval(self.p0.coeffs, self.ptau.coeffs or (0.0,), self.tau, lam)

    def coefficient_scale(self) -> float:
        return max(abs(c) for c in self.p0.coeffs + self.ptau.coeffs)

    # JSON interchange
    def to_dict(self) -> dict:
        n, m = self.n, self.m
        a = list(self.p0.coeffs[:n])
        alpha = list(self.ptau.coeffs) + [0.0] * (m + 1 - len(self.ptau.coeffs))
        return {"n": n, "m": m, "tau": self.tau, "a": a, "alpha": alpha}

    @classmethod
    def from_dict(cls, d: dict) -> "Quasipolynomial":
        for key in ("n", "m", "tau", "a", "alpha"):
            if key not in d:
                raise InputError(f"field {key!r}: missing")
        n, m = d["n"], d["m"]
        if not isinstance(n, int) or not isinstance(m, int):
            raise InputError("fields 'n' and 'm' must be integers")
        a, alpha = d["a"], d["alpha"]
        if not isinstance(a, list) or len(a) != n:
            raise InputError(f"field 'a': expected a list of {n} numbers")
        if not isinstance(alpha, list) or len(alpha) != m + 1:
            raise InputError(f"field 'alpha': expected a list of {m + 1} numbers")
        try:
            tau = float(d["tau"])
            p0 = RealPolynomial(tuple(float(v) for v in a) + (1.0,))
            ptau = RealPolynomial(tuple(float(v) for v in alpha))
        except (TypeError, ValueError) as exc:
            raise InputError(f"non-numeric coefficient: {exc}") from None
        return cls(p0, ptau, tau, m=m)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Quasipolynomial":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CompanionPair:
    """Matrices of ``xi' = A0 xi(t) + Atau xi(t - tau)`` (``btau`` is zero)."""

    a0: np.ndarray
    atau: np.ndarray
    btau: np.ndarray
    tau: float = 1.0


@dataclass(frozen=True)
class SearchBox:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise InputError(f"degenerate search box {self}")

    def widened(self, eps: float) -> "SearchBox":
        return SearchBox(self.re_min - eps, self.re_max + eps, self.im_min - eps, self.im_max + eps)

    @property
    def diameter(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z: complex) -> bool:
        return self.re_min <= z.real <= self.re_max and self.im_min <= z.imag <= self.im_max


def eval_derivatives(q: Quasipolynomial, lam: complex, k_max: int) -> list[complex]:
    """``[Delta(lam), Delta'(lam), ..., Delta^(k_max)(lam)]``.

    The delayed part uses the Leibniz rule on ``Ptau(lam) exp(-tau lam)``.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    lam = complex(lam)
    d0 = q.p0.taylor(lam, k_max)
    dt = q.ptau.taylor(lam, k_max)
    e = np.exp(-q.tau * lam)
    out = []
    for k in range(k_max + 1):
        s = 0j
        for j in range(k + 1):
            s += math.comb(k, j) * dt[j] * (-q.tau) ** (k - j)
        out.append(complex(d0[k] + s * e))
    return out


def normalize(q: Quasipolynomial, lambda0: float) -> Quasipolynomial:
    """``tau^n Delta(lambda0 + z / tau)`` as a unit-delay quasipolynomial in ``z``."""
    n, tau = q.n, q.tau
    p0 = q.p0.compose_affine(lambda0, 1.0 / tau) * tau**n
    ptau = q.ptau.compose_affine(lambda0, 1.0 / tau) * (tau**n * math.exp(-lambda0 * tau))
    return Quasipolynomial(p0, ptau, 1.0, m=q.m)


def denormalize(qn: Quasipolynomial, lambda0: float, tau: float) -> Quasipolynomial:
    """Inverse of :func:`normalize`: ``Delta(lam) = tau^-n Dn(tau (lam - lambda0))``."""
    n = qn.n
    p0 = qn.p0.compose_affine(-tau * lambda0, tau) * tau ** (-n)
    ptau = qn.ptau.compose_affine(-tau * lambda0, tau) * (tau ** (-n) * math.exp(lambda0 * tau))
    return Quasipolynomial(p0, ptau, tau, m=qn.m)


def companion(q: Quasipolynomial) -> CompanionPair:
    n = q.n
    a0 = np.zeros((n, n))
    a0[np.arange(n - 1), np.arange(1, n)] = 1.0
    a0[n - 1, :] = -np.asarray(q.p0.coeffs[:n])
    atau = np.zeros((n, n))
    if q.ptau.coeffs:
        atau[n - 1, : len(q.ptau.coeffs)] = -np.asarray(q.ptau.coeffs)
    return CompanionPair(a0, atau, np.zeros((n, n)), q.tau)


def matrix_norm2(a, max_iter: int = 200, tol: float = 1e-12) -> float:
    """Spectral norm by power iteration on ``A^T A``.

    Every standard basis vector (and the all-ones vector) is tried as a start,
    so at least one start is never orthogonal to the top singular vector.
    """
    a = np.asarray(a, dtype=float)
    if not a.any():
        return 0.0
    ata = a.T @ a
    n = ata.shape[0]
    starts = [np.ones(n)] + [np.eye(n)[i] for i in range(n)]
    best = 0.0
    for v in starts:
        v = v / np.linalg.norm(v)
        est = 0.0
        for _ in range(max_iter):
            w = ata @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                est = 0.0
                break
            v = w / nw
            if abs(nw - est) <= tol * nw:
                est = nw
                break
            est = nw
        best = max(best, est)
    return math.sqrt(best)


def envelope_bound(cp: CompanionPair, x: float) -> float:
    """Modulus bound for characteristic roots with real part ``x``.

    Triangle-inequality relaxation ``|lam| <= ||A0|| + ||Atau|| exp(-tau x)``.
    """
    if np.any(cp.btau):
        raise InputError("envelope bound requires a retarded system (btau = 0)")
    return matrix_norm2(cp.a0) + matrix_norm2(cp.atau) * math.exp(-cp.tau * x)


def _abs2_on_imag_axis(p: RealPolynomial) -> list[float]:
    """Coefficients in ``s = omega^2`` of ``|p(i omega)|^2``."""
    re = [0.0] * (len(p.coeffs) // 2 + 1)
    im = [0.0] * (len(p.coeffs) // 2 + 1)
    for k, c in enumerate(p.coeffs):
        # (i omega)^k = i^k omega^k
        sign = (-1) ** (k // 2)
        if k % 2 == 0:
            re[k // 2] += sign * c
        else:
            im[k // 2] += sign * c
    # |p|^2 = R(s)^2 + s I(s)^2
    out = [0.0] * (2 * len(re))
    for i, u in enumerate(re):
        for j, v in enumerate(re):
            out[i + j] += u * v
    for i, u in enumerate(im):
        for j, v in enumerate(im):
            out[i + j + 1] += u * v
    while out and out[-1] == 0.0:
        out.pop()
    return out


def imag_axis_bound(q: Quasipolynomial) -> float:
    """Bound on ``|omega|`` for roots ``i omega`` of ``Delta``.

    Such roots satisfy ``|P0(i w)|^2 = |Ptau(i w)|^2``; this returns the square
    root of the Cauchy bound of that polynomial in ``w^2``, or ``0.0`` when it
    has no nonnegative real zero (no crossing possible).
    """
    f0 = _abs2_on_imag_axis(q.p0)
    ft = _abs2_on_imag_axis(q.ptau)
    f = [a - (ft[i] if i < len(ft) else 0.0) for i, a in enumerate(f0)]
    while f and f[-1] == 0.0:
        f.pop()
    roots = np.roots(f[::-1]) if len(f) > 1 else np.array([])
    scale = max(1.0, max((abs(r) for r in roots), default=0.0))
    real_nonneg = [
        r for r in roots if abs(r.imag) <= 1e-9 * scale and r.real >= -1e-12 * scale
    ]
    if not real_nonneg and f and f[0] > 0:
        return 0.0
    return math.sqrt(cauchy_bound(f))
