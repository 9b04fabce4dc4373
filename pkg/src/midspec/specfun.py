"""Kummer and Whittaker functions and Kummer-type combinations.

``Phi(a, b, z)`` is the confluent hypergeometric series ``1F1``. The
combination ``F = alpha Phi(a, b, z) + beta Phi(a, b+1, z)`` solves
``F'' + Q F' + R F = 0`` with

    Q = -1 + (b+1)/z - D'/D,      R = -N / (z D),

where ``N`` and ``D`` are affine in ``z``. Removing the first-order term with
``W = exp(Qp) F``, ``Qp' = Q/2``, gives ``W'' + G W = 0`` with
``G = R - Q^2/4 - Q'/2``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from . import _core
from .errors import BranchCutError, ConvergenceError, InputError, SingularityError

__all__ = [
    "KummerParams",
    "CombinationParams",
    "OdeData",
    "RootRegion",
    "pochhammer",
    "gamma",
    "kummer_phi",
    "kummer_phi_deriv",
    "kummer_phi_integral",
    "contiguous_residuals",
    "combo_F",
    "combo_F_deriv",
    "ode_data",
    "r_candidates",
    "whittaker_W",
    "whittaker_W_deriv",
    "whittaker_M",
    "kummer_root_region",
    "green_hille_residual",
]

MAX_TERMS = 10_000
# series is trusted while max|term| / |sum| stays below this
_CANCELLATION_LIMIT = 1e2
_SERIES_RADIUS = 4.0


def _is_nonpositive_int(x: complex, eps: float = 0.0) -> bool:
    x = complex(x)
    return abs(x.imag) <= eps and x.real <= eps and abs(x.real - round(x.real)) <= eps


@dataclass(frozen=True)
class KummerParams:
    a: complex
    b: complex

    def __post_init__(self):
        if _is_nonpositive_int(self.b):
            raise InputError(f"b={self.b!r} is zero or a negative integer")


@dataclass(frozen=True)
class CombinationParams:
    """``p = (a, b, alpha, beta)`` for ``alpha Phi(a,b,.) + beta Phi(a,b+1,.)``."""

    a: complex
    b: complex
    alpha: float
    beta: float

    def __post_init__(self):
        if _is_nonpositive_int(self.b) or _is_nonpositive_int(complex(self.b) + 1):
            raise InputError(f"b={self.b!r}: b and b+1 must not be zero or negative integers")
        if self.alpha == 0 and self.beta == 0:
            raise InputError("alpha and beta cannot both vanish")

    @property
    def d_slope(self) -> complex:
        a, b, al, be = self.a, self.b, self.alpha, self.beta
        return ((a - b) * al**2 - al * b * be)

    @property
    def d_const(self) -> complex:
        b, al, be = self.b, self.alpha, self.beta
        return -al * b**2 * be - b**2 * be**2

    def excluded_point(self) -> complex | None:
        """Zero of ``D`` (an apparent singularity of the ODE), if any."""
        if self.d_slope == 0:
            return None
        return -self.d_const / self.d_slope


@dataclass(frozen=True)
class OdeData:
    q_val: complex
    r_val: complex
    n_val: complex
    d_val: complex
    g_val: complex
    dq_val: complex = 0j


def pochhammer(alpha: complex, k: int):
    """Ascending factorial ``(alpha)_k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = 1
    for j in range(k):
        out = out * (alpha + j)
    return out


# Lanczos approximation, g = 7, 9 coefficients
_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(z: complex) -> complex:
    """Gamma function by the Lanczos approximation with reflection."""
    z = complex(z)
    if _is_nonpositive_int(z):
        raise SingularityError(f"gamma has a pole at {z}")
    if z.real < 0.5:
        return cmath.pi / (cmath.sin(cmath.pi * z) * gamma(1 - z))
    z -= 1
    x = _LANCZOS[0]
    for i in range(1, _LANCZOS_G + 2):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return cmath.sqrt(2 * cmath.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def _series(a, b, z):
    total, nterms, biggest, ok = _core.kummer_series(a, b, z, MAX_TERMS, 1e-16)
    if not ok:
        raise ConvergenceError(
            f"Kummer series for a={a}, b={b}, z={z} did not converge in {MAX_TERMS} terms",
            partial=total,
        )
    return total, biggest


def _continue_ode(a, b, z0, y0, dy0, z1, step=2.0):
    """Carry ``(y, y')`` of the Kummer ODE from ``z0`` to ``z1`` along a line.

    Taylor steps of length at most ``min(step, |center|/2)`` with the
    coefficient recurrence

        c_{k+2} = ((zc - b - k)(k+1) h c_{k+1} + (a+k) h^2 c_k) / (zc (k+1)(k+2)),

    where ``c_k = y^(k)(zc) h^k / k!``.
    """
    zc, y, dy = complex(z0), complex(y0), complex(dy0)
    z1 = complex(z1)
    while abs(z1 - zc) > 0:
        remaining = z1 - zc
        hmax = min(step, 0.5 * abs(zc))
        h = remaining if abs(remaining) <= hmax else remaining / abs(remaining) * hmax
        c_prev, c_cur = y, dy * h
        val, der = c_prev + c_cur, c_cur
        k = 0
        small = 0
        while k < MAX_TERMS:
            c_next = ((zc - b - k) * (k + 1) * h * c_cur + (a + k) * h * h * c_prev) / (
                zc * (k + 1) * (k + 2)
            )
            val += c_next
            der += (k + 2) * c_next
            c_prev, c_cur = c_cur, c_next
            k += 1
            if abs(c_next) * (k + 2) <= 1e-17 * (abs(val) + abs(der)):
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
        y, dy = val, der / h
        zc = zc + h
    return y, dy


def _phi_nonneg(a, b, z):
    """Phi for Re(z) >= 0 (or terminating series)."""
    if z == 0:
        return 1.0 + 0j
    total, biggest = _series(a, b, z)
    if _is_nonpositive_int(a) or abs(z) <= _SERIES_RADIUS:
        return total
    if biggest <= _CANCELLATION_LIMIT * abs(total):
        return total
    # cancellation: sum the series at a safe radius and continue along the ray
    z0 = z / abs(z) * _SERIES_RADIUS
    y0, _ = _series(a, b, z0)
    dy0, _ = _series(a + 1, b + 1, z0)
    y, _ = _continue_ode(a, b, z0, y0, dy0 * a / b, z)
    return y


def kummer_phi(p: KummerParams | tuple, z: complex) -> complex:
    """Confluent hypergeometric function ``Phi(a, b, z)``.

    For ``Re z < 0`` Kummer's transformation ``e^z Phi(b-a, b, -z)`` is used.
    Where the plain series loses more than two digits to cancellation the value
    is carried out along the ray by Taylor steps of the Kummer ODE.
    """
    if not isinstance(p, KummerParams):
        p = KummerParams(*p)
    a, b, z = complex(p.a), complex(p.b), complex(z)
    if a == b:
        return cmath.exp(z)
    if z.real < 0 and not _is_nonpositive_int(a):
        return cmath.exp(z) * _phi_nonneg(b - a, b, -z)
    return _phi_nonneg(a, b, z)


def kummer_phi_deriv(p: KummerParams | tuple, z: complex, order: int = 1) -> complex:
    """``d^order Phi / dz^order`` by term-wise differentiation of the series."""
    if not isinstance(p, KummerParams):
        p = KummerParams(*p)
    a, b, z = complex(p.a), complex(p.b), complex(z)
    # leading term (a)_k/(b)_k, then ratio recursion
    coef = complex(pochhammer(a, order)) / complex(pochhammer(b, order))
    term = coef
    total = term
    small = 0
    for j in range(MAX_TERMS):
        k = j + order
        term = term * (a + k) / (b + k) * z / (j + 1)
        total += term
        if abs(term) <= 1e-16 * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise ConvergenceError("derivative series did not converge", partial=total)


_JACOBI_CACHE: dict = {}


def _jacobi(npts, alpha, beta):
    key = (npts, alpha, beta)
    if key not in _JACOBI_CACHE:
        _JACOBI_CACHE[key] = roots_jacobi(npts, alpha, beta)
    return _JACOBI_CACHE[key]


def _euler_integral(a, b, z, npts):
    if a.imag == 0 and b.imag == 0:
        # Gauss-Jacobi absorbs t^(a-1) (1-t)^(b-a-1) exactly
        x, w = _jacobi(npts, (b - a).real - 1.0, a.real - 1.0)
        t = 0.5 * (1.0 + x)
        scale = 0.5 ** (b.real - 1.0)
        return scale * np.sum(w * np.exp(z * t))
    x, w = np.polynomial.legendre.leggauss(npts)
    t = 0.5 * (1.0 + x)
    f = np.exp(z * t) * t ** (a - 1) * (1 - t) ** (b - a - 1)
    return 0.5 * np.sum(w * f)


def kummer_phi_integral(p: KummerParams | tuple, z: complex) -> complex:
    """Euler integral representation, valid for ``Re b > Re a > 0``.

    Gauss quadrature with 64 nodes, checked against 128 nodes.
    """
    if not isinstance(p, KummerParams):
        p = KummerParams(*p)
    a, b, z = complex(p.a), complex(p.b), complex(z)
    if not (b.real > a.real > 0):
        raise InputError(f"integral form needs Re(b) > Re(a) > 0, got a={a}, b={b}")
    coarse = _euler_integral(a, b, z, 64)
    fine = _euler_integral(a, b, z, 128)
    if abs(coarse - fine) > 1e-9 * max(abs(fine), 1e-300):
        raise ConvergenceError(
            f"quadrature disagreement {abs(coarse - fine):.3e} at z={z}", partial=fine
        )
    return complex(gamma(b) / (gamma(a) * gamma(b - a)) * fine)


def contiguous_residuals(p: KummerParams | tuple, z: complex) -> tuple[complex, complex]:
    """Residuals of the two contiguous relations linking Phi(a,b+1), Phi(a+1,b+1).

    Every Kummer value is evaluated independently.
    """
    if not isinstance(p, KummerParams):
        p = KummerParams(*p)
    a, b, z = complex(p.a), complex(p.b), complex(z)
    if a == b or z == 0:
        raise InputError("contiguous relations need a != b and z != 0")
    f_ab = kummer_phi((a, b), z)
    f_a1b = kummer_phi((a + 1, b), z)
    f_ab1 = kummer_phi((a, b + 1), z)
    f_a1b1 = kummer_phi((a + 1, b + 1), z)
    r1 = f_ab1 - (-b * (a + z) * f_ab + a * b * f_a1b) / (z * (a - b))
    r2 = f_a1b1 + (-b * f_a1b + b * f_ab) / z
    return r1, r2


def _as_combo(p) -> CombinationParams:
    return p if isinstance(p, CombinationParams) else CombinationParams(*p)


def combo_F(p: CombinationParams | tuple, z: complex) -> complex:
    """Kummer-type function ``alpha Phi(a,b,z) + beta Phi(a,b+1,z)``."""
    p = _as_combo(p)
    out = 0j
    if p.alpha != 0:
        out += p.alpha * kummer_phi((p.a, p.b), z)
    if p.beta != 0:
        out += p.beta * kummer_phi((p.a, p.b + 1), z)
    return out


def combo_F_deriv(p: CombinationParams | tuple, z: complex, order: int = 1) -> complex:
    """Derivative of :func:`combo_F` via ``Phi' = (a/b) Phi(a+1, b+1, z)``."""
    p = _as_combo(p)
    a = complex(p.a)
    out = 0j
    for coef, b in ((p.alpha, complex(p.b)), (p.beta, complex(p.b) + 1)):
        if coef == 0:
            continue
        ratio = complex(pochhammer(a, order)) / complex(pochhammer(b, order))
        out += coef * ratio * kummer_phi((a + order, b + order), z)
    return out


def _nd(p: CombinationParams, z: complex) -> tuple[complex, complex]:
    a, b, al, be = complex(p.a), complex(p.b), p.alpha, p.beta
    slope = (a - b) * al**2 - al * b * be
    n = a * (slope * z - be * b * (b + 1) * al) - a * b**2 * be**2
    d = slope * z - al * b**2 * be - b**2 * be**2
    return n, d


def r_candidates(p: CombinationParams | tuple, z: complex) -> dict[str, complex]:
    """Both candidate zeroth-order coefficients: ``-N/D`` and ``-N/(z D)``."""
    p = _as_combo(p)
    n, d = _nd(p, complex(z))
    return {"-N/D": -n / d, "-N/(zD)": -n / (complex(z) * d)}


def ode_data(p: CombinationParams | tuple, z: complex) -> OdeData:
    """Coefficients ``Q, R, N, D, G`` of the ODE satisfied by ``combo_F``."""
    p = _as_combo(p)
    z = complex(z)
    b = complex(p.b)
    slope, const = p.d_slope, p.d_const
    if slope == 0 and const == 0:
        raise InputError("degenerate parameters: D vanishes identically")
    if abs(z) < 1e-150:
        # numerically at the singular point: 1/z^2 overflows
        raise SingularityError("z = 0 is a singular point")
    n, d = _nd(p, z)
    scale = abs(slope * z) + abs(const)
    if abs(d) <= 1e-14 * scale:
        raise SingularityError(f"z={z} is the excluded point D(z) = 0")
    # N and D are quadratic in (alpha, beta); rescale so tiny weights don't underflow
    s = max(abs(p.alpha), abs(p.beta))
    unit = CombinationParams(p.a, p.b, p.alpha / s, p.beta / s)
    nu, du = _nd(unit, z)
    su = unit.d_slope
    q = -1 + (b + 1) / z - su / du
    r = -nu / (z * du)
    dq = -(b + 1) / z**2 + (su / du) ** 2
    g = r - q * q / 4 - dq / 2
    return OdeData(q, r, n, d, g, dq)


def _log_prefactor(p: CombinationParams, z: complex) -> complex:
    """A primitive of ``Q/2`` with cuts on (-inf, 0] and beyond the excluded point."""
    b = complex(p.b)
    slope, const = p.d_slope, p.d_const
    if slope == 0:
        return 0.5 * (-z + (b + 1) * cmath.log(z))
    if const == 0:
        # D = slope * z: the log D term merges with log z
        return 0.5 * (-z + b * cmath.log(z))
    return 0.5 * (-z + (b + 1) * cmath.log(z) - cmath.log(1 + slope * z / const))


def _check_cuts(p: CombinationParams, z: complex, eps: float = 1e-12):
    if abs(z.imag) <= eps * max(1.0, abs(z)) and z.real <= 0:
        raise BranchCutError(f"z={z} lies on the branch cut (-inf, 0]")
    zx = p.excluded_point()
    if zx is not None and p.d_const != 0:
        w = 1 + p.d_slope * z / p.d_const
        if abs(w.imag) <= eps * max(1.0, abs(w)) and w.real <= 0:
            raise BranchCutError(f"z={z} lies on the branch cut beyond the excluded point {zx}")


def whittaker_W(p: CombinationParams | tuple, z: complex) -> complex:
    """Whittaker-type function ``exp(Qp(z)) F(z)`` (principal branches)."""
    p = _as_combo(p)
    z = complex(z)
    _check_cuts(p, z)
    ode_data(p, z)  # raises at singular points
    return cmath.exp(_log_prefactor(p, z)) * combo_F(p, z)


def whittaker_W_deriv(p: CombinationParams | tuple, z: complex) -> complex:
    """``W' = exp(Qp) (F' + Q F / 2)``."""
    p = _as_combo(p)
    z = complex(z)
    _check_cuts(p, z)
    od = ode_data(p, z)
    return cmath.exp(_log_prefactor(p, z)) * (combo_F_deriv(p, z) + 0.5 * od.q_val * combo_F(p, z))


def whittaker_M(k: complex, l: complex, z: complex) -> complex:
    """Classical Whittaker function ``M_{k,l}(z)`` (principal branch)."""
    z = complex(z)
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)) and z.real <= 0:
        raise BranchCutError(f"z={z} lies on the branch cut (-inf, 0]")
    return cmath.exp(-z / 2) * z ** (0.5 + l) * kummer_phi((0.5 + l - k, 1 + 2 * l), z)


@dataclass(frozen=True)
class RootRegion:
    kind: str  # "axis" | "right-half" | "left-half"
    hyperbola: tuple[float, float] | None = None

    def admits(self, z: complex) -> bool:
        """Whether ``z`` is compatible with the region (strict inequalities)."""
        if self.kind == "axis":
            return True
        if self.kind == "right-half" and z.real <= 0:
            return False
        if self.kind == "left-half" and z.real >= 0:
            return False
        ci, cr = self.hyperbola
        return ci * z.imag**2 - cr * z.real**2 > 0


def kummer_root_region(a: float, b: float) -> RootRegion:
    """Location of the nontrivial zeros of ``Phi(a, b, .)`` for real ``b >= 2``.

    ``b == 2a``: imaginary axis; ``b > 2a``: open right half-plane;
    ``b < 2a``: open left half-plane. Off the axis case the zeros also satisfy
    ``(b-2a)^2 Im(z)^2 - (4a(b-a) - 2b) Re(z)^2 > 0``.
    """
    a, b = float(a), float(b)
    if b < 2:
        raise InputError(f"zero-region classification needs b >= 2, got b={b}")
    if b == 2 * a:
        return RootRegion("axis")
    hyp = ((b - 2 * a) ** 2, 4 * a * (b - a) - 2 * b)
    return RootRegion("right-half" if b > 2 * a else "left-half", hyp)


def green_hille_residual(p: CombinationParams | tuple, z_end: complex, samples: int = 64) -> complex:
    """Sum of the three Green-Hille terms for ``W'' + G W = 0`` on ``[0, z_end]``.

    With ``K = 1``, ``phi1 = W``, ``phi2 = W'`` and the straight path
    ``z = s z_end``:

        [conj(W) W']_0^{z_end} - conj(z_end) int |W'|^2 ds + z_end int |W|^2 G ds,

    each integral over ``s in (0, 1)`` by ``samples``-point Gauss-Legendre.
    The lower bracket vanishes because ``W ~ z^((b+1)/2)``.
    """
    p = _as_combo(p)
    z_end = complex(z_end)
    if samples < 16:
        raise InputError("at least 16 samples are required")
    if complex(p.b).real <= 0:
        raise InputError("the lower bracket vanishes only for Re(b) > 0")
    zx = p.excluded_point()
    if zx is not None and z_end != 0:
        s = (zx / z_end)
        if abs(s.imag) <= 1e-12 and -1e-12 <= s.real <= 1 + 1e-12:
            raise SingularityError(f"excluded point {zx} lies on the integration path")
    if abs(z_end) < 1e-300:
        return 0j
    x, w = np.polynomial.legendre.leggauss(samples)
    s = 0.5 * (1.0 + x)
    w = 0.5 * w
    int_dw = 0.0
    int_wg = 0j
    for si, wi in zip(s, w):
        zi = si * z_end
        wv = whittaker_W(p, zi)
        dwv = whittaker_W_deriv(p, zi)
        g = ode_data(p, zi).g_val
        int_dw += wi * abs(dwv) ** 2
        int_wg += wi * abs(wv) ** 2 * g
    bracket = (whittaker_W(p, z_end).conjugate() * whittaker_W_deriv(p, z_end))
    return bracket - z_end.conjugate() * int_dw + z_end * int_wg
