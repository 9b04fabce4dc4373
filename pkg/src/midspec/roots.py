"""Argument-principle root localization for retarded quasipolynomials.

Windings are computed by tracking the phase of ``Delta`` along a contour,
refining the sampling until consecutive phase increments stay below
``pi/4``. Boxes are quadrisected until each cell isolates one root or one
tight cluster, which Newton then polishes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BoundaryRootError, ConvergenceError, InputError
from .quasipoly import Quasipolynomial, SearchBox, companion, envelope_bound, eval_derivatives

__all__ = [
    "Circle",
    "RootRecord",
    "SpectrumReport",
    "DominanceCheck",
    "winding_count",
    "find_roots",
    "find_zeros",
    "verify_dominance_numeric",
]

PHASE_STEP = math.pi / 4
COLLISION_REL = 1e-13
NOISE_REL = 1e-10
MULT_CAP = 12
MAX_SAMPLES = 400_000
_SPLITS = (0.5123, 0.4623, 0.5611, 0.4189, 0.5937, 0.3871)


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InputError("circle radius must be positive")

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) < self.radius


@dataclass
class RootRecord:
    location: complex
    multiplicity: int
    residual: float
    flagged: bool = False

    def to_dict(self) -> dict:
        return {
            "re": self.location.real,
            "im": self.location.imag,
            "multiplicity": self.multiplicity,
            "residual": self.residual,
            "flagged": self.flagged,
        }


@dataclass
class SpectrumReport:
    box: SearchBox
    roots: list
    total_winding: int
    dominant: RootRecord | None
    margin: float
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        assert sum(r.multiplicity for r in self.roots) == self.total_winding

    def to_dict(self) -> dict:
        b = self.box
        return {
            "box": [b.re_min, b.re_max, b.im_min, b.im_max],
            "total_winding": self.total_winding,
            "roots": [r.to_dict() for r in self.roots],
            "dominant": None if self.dominant is None else self.dominant.to_dict(),
            "margin": self.margin,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class _Analytic:
    """Evaluator ``z -> (f, f', noise scale)`` plus a phase-rate hint for sampling."""

    ev: Callable
    density: float = 1.0
    derivs: Callable | None = None


def _wrap(q: Quasipolynomial) -> _Analytic:
    return _Analytic(q.eval_with_derivative, q.tau, lambda z, k: eval_derivatives(q, z, k))


# contour pieces: vectorized maps t in [0, 1] -> z, paired with their length
Piece = tuple[Callable[[np.ndarray], np.ndarray], float]


def _line(a: complex, b: complex) -> Piece:
    return (lambda t: a + (b - a) * t), abs(b - a)


def _arc(c: complex, r: float, th0: float, th1: float) -> Piece:
    return (lambda t: c + r * np.exp(1j * (th0 + (th1 - th0) * t))), r * abs(th1 - th0)


def _rect_pieces(box: SearchBox) -> list[Piece]:
    z = [
        complex(box.re_min, box.im_min),
        complex(box.re_max, box.im_min),
        complex(box.re_max, box.im_max),
        complex(box.re_min, box.im_max),
    ]
    return [_line(z[k], z[(k + 1) % 4]) for k in range(4)]


def _circle_pieces(c: Circle) -> list[Piece]:
    return [_arc(complex(c.center), c.radius, 0.0, 2 * math.pi)]


def _eval(fn: _Analytic, z: np.ndarray):
    v, d, s = fn.ev(np.asarray(z, dtype=complex))
    if np.any(np.abs(v) <= COLLISION_REL * s) or not np.all(np.isfinite(v)):
        raise BoundaryRootError("characteristic function vanishes on the contour")
    return v, np.abs(d / v)


def _piece_phase(fn: _Analytic, piece: Piece) -> float:
    """Phase increment of ``Delta`` along one piece.

    An interval is refined while either the sampled phase jump or the local
    rate ``|Delta'/Delta| |dz|`` at an end exceeds ``pi/4``; the rate test
    prevents wrapped jumps near clustered roots from passing unnoticed.
    """
    f, length = piece
    n0 = 32 + int(8 * length * (1.0 + fn.density))
    t = np.linspace(0.0, 1.0, n0 + 1)
    z = f(t)
    v, rate = _eval(fn, z)
    while True:
        d = np.angle(v[1:] / v[:-1])
        dz = np.abs(np.diff(z))
        bad = (np.abs(d) > PHASE_STEP) | (np.maximum(rate[1:], rate[:-1]) * dz > PHASE_STEP)
        if not bad.any():
            return float(d.sum())
        if len(t) > MAX_SAMPLES or np.min(np.diff(t)[bad]) < 1e-14:
            raise BoundaryRootError("phase refinement did not settle near the contour")
        tm = 0.5 * (t[:-1][bad] + t[1:][bad])
        zm = f(tm)
        vm, rm = _eval(fn, zm)
        idx = np.searchsorted(t, tm)
        t = np.insert(t, idx, tm)
        z = np.insert(z, idx, zm)
        v = np.insert(v, idx, vm)
        rate = np.insert(rate, idx, rm)


def _contour_winding(fn: _Analytic, pieces: list[Piece]) -> int:
    total = sum(_piece_phase(fn, p) for p in pieces) / (2 * math.pi)
    w = round(total)
    if abs(total - w) > 1e-3:
        raise BoundaryRootError(f"non-integer winding {total:.6f}")
    return int(w)


def _raw_winding(fn: _Analytic, region) -> int:
    if isinstance(region, Circle):
        return _contour_winding(fn, _circle_pieces(region))
    return _contour_winding(fn, _rect_pieces(region))


def _perturbed(region, eps: float):
    if isinstance(region, Circle):
        return Circle(region.center, region.radius + eps)
    return region.widened(eps)


def _winding_with_perturbation(fn: _Analytic, region):
    eps = 1e-6
    current = region
    for attempt in range(4):
        try:
            return _raw_winding(fn, current), current
        except BoundaryRootError:
            if attempt == 3:
                break
            current = _perturbed(region, eps)
            eps *= 2
    raise BoundaryRootError(f"root on the boundary of {region} after 3 perturbations")


def winding_count(q: Quasipolynomial, region: SearchBox | Circle) -> int:
    """Number of roots inside ``region``, counted with multiplicity.

    A root on the boundary triggers an outward perturbation of 1e-6,
    doubled up to three times.
    """
    return _winding_with_perturbation(_wrap(q), region)[0]


def _newton(fn: _Analytic, z0: complex, mult: int, max_iter: int = 80) -> complex | None:
    """Damped Newton with the step scaled by ``mult``; stops at the rounding floor."""
    z = complex(z0)
    v, d, s = (a[0] for a in fn.ev(np.array([z])))
    for _ in range(max_iter):
        if abs(v) <= 1e-15 * s:
            return z
        if d == 0 or not np.isfinite(d):
            return None
        step = mult * v / d
        for _ in range(12):
            zn = z - step
            vn, dn, sn = (a[0] for a in fn.ev(np.array([zn])))
            if np.isfinite(vn) and abs(vn) < abs(v):
                break
            step *= 0.5
        else:
            break
        z, v, d, s = zn, vn, dn, sn
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            return z
    return z if abs(v) <= 1e-12 * s else None


def _polish_cluster(fn: _Analytic, z: complex, mult: int, radius: float) -> complex:
    """Newton on ``Delta^(mult-1)``, which has a simple root at a mult-fold root."""
    if mult == 1 or fn.derivs is None:
        return z
    k = mult - 1
    z0 = z
    for _ in range(30):
        d = fn.derivs(z, k + 1)
        if d[k + 1] == 0:
            break
        step = d[k] / d[k + 1]
        z -= step
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    return z if abs(z - z0) < radius else z0


def _clear_radius(fn: _Analytic, z: complex, r0: float, r_max: float) -> float | None:
    """Smallest ``r = r0 * 2^k`` where ``|Delta|`` on the circle clears the noise floor."""
    r = r0
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    while r <= r_max:
        v, _, s = fn.ev(z + r * np.exp(1j * th))
        if np.all(np.abs(v) > NOISE_REL * s):
            return r
        r *= 2
    return None


def _cell_center(cell: SearchBox) -> complex:
    return complex(0.5 * (cell.re_min + cell.re_max), 0.5 * (cell.im_min + cell.im_max))


def _room(cell: SearchBox, z: complex) -> float:
    return min(z.real - cell.re_min, cell.re_max - z.real, z.imag - cell.im_min, cell.im_max - z.imag)


def _isolate(fn: _Analytic, cell: SearchBox, w: int, tol: float):
    """Try to capture all ``w`` roots of ``cell`` in one Newton-centred circle.

    Returns ``(record, hint)``; ``hint = (z, r)`` describes a cluster disc that
    later splits should avoid cutting.
    """
    hint = None
    for guess in dict.fromkeys((w, 1)):
        z = _newton(fn, _cell_center(cell), guess)
        if z is None or not cell.contains(z):
            continue
        r = _clear_radius(fn, z, max(10 * tol, 1e-12), cell.diameter)
        if r is None:
            continue
        if hint is None:
            hint = (z, r)
        try:
            wc = _raw_winding(fn, Circle(z, r))
            if r >= 0.9 * _room(cell, z):
                # the disc pokes out of the cell: accept only if the bounding
                # box of both holds no roots beyond the w counted in each
                outer = SearchBox(
                    min(cell.re_min, z.real - 1.5 * r),
                    max(cell.re_max, z.real + 1.5 * r),
                    min(cell.im_min, z.imag - 1.5 * r),
                    max(cell.im_max, z.imag + 1.5 * r),
                )
                if wc != w or _raw_winding(fn, outer) != w:
                    continue
        except BoundaryRootError:
            continue
        if wc != w:
            hint = (z, r)
            continue
        z = _polish_cluster(fn, z, w, r)
        if abs(z.imag) <= r and abs(z.imag) < 1e-9 * max(1.0, abs(z)):
            z = complex(z.real, 0.0)
        v, _, _ = fn.ev(np.array([z]))
        return RootRecord(z, w, float(abs(v[0]))), None
    return None, hint


def _split_positions(lo: float, hi: float, center: float | None, r: float, flip: bool):
    fracs = [1 - f for f in _SPLITS] if flip else list(_SPLITS)
    cand = [lo + f * (hi - lo) for f in fracs]
    if center is None:
        return cand
    ok = [x for x in cand if abs(x - center) > 1.2 * r]
    extra = [x for x in (center - 1.5 * r, center + 1.5 * r) if lo < x < hi]
    extra.sort(key=lambda x: abs(x - 0.5 * (lo + hi)))
    return ok + extra + [x for x in cand if x not in ok]


def _split(fn: _Analytic, cell: SearchBox, w: int, hint=None):
    zc, r = hint if hint is not None else (None, 0.0)
    xs = _split_positions(cell.re_min, cell.re_max, None if zc is None else zc.real, r, False)
    ys = _split_positions(cell.im_min, cell.im_max, None if zc is None else zc.imag, r, True)
    for xm, ym in zip(xs, ys):
        kids = [
            SearchBox(cell.re_min, xm, cell.im_min, ym),
            SearchBox(xm, cell.re_max, cell.im_min, ym),
            SearchBox(cell.re_min, xm, ym, cell.im_max),
            SearchBox(xm, cell.re_max, ym, cell.im_max),
        ]
        try:
            ws = [_raw_winding(fn, k) for k in kids]
        except BoundaryRootError:
            continue
        if sum(ws) == w:
            return list(zip(kids, ws))
    raise BoundaryRootError(f"could not subdivide {cell} without boundary collisions")


def _sort_key(r: RootRecord):
    return (r.location.real, r.location.imag)


def find_roots(q: Quasipolynomial, box: SearchBox, tol: float = 1e-8) -> SpectrumReport:
    """All roots in ``box`` with multiplicities; sorted by ``(Re, Im)``."""
    return _find(_wrap(q), box, tol)


def find_zeros(f: Callable, df: Callable, box: SearchBox, tol: float = 1e-8, density: float = 1.0) -> SpectrumReport:
    """Zeros of an entire function given scalar callables ``f`` and ``f'``.

    The rounding scale is taken as ``1 + |f|``, suited to functions of
    moderate magnitude inside ``box``.
    """

    def ev(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        v = np.array([complex(f(x)) for x in z])
        d = np.array([complex(df(x)) for x in z])
        return v, d, 1.0 + np.abs(v)

    return _find(_Analytic(ev, density), box, tol)


def _find(fn: _Analytic, box: SearchBox, tol: float) -> SpectrumReport:
    if not tol > 0:
        raise InputError("tol must be positive")
    total, used = _winding_with_perturbation(fn, box)
    found: list[RootRecord] = []
    warnings: list[str] = []
    stack = [(used, total)]
    while stack:
        cell, w = stack.pop()
        if w == 0:
            continue
        if w > MULT_CAP and cell.diameter < tol:
            raise ConvergenceError(f"winding {w} in a cell of diameter {cell.diameter:.3g}")
        rec, hint = _isolate(fn, cell, w, tol)
        if rec is not None:
            found.append(rec)
            continue
        if cell.diameter < tol:
            z = _cell_center(cell)
            v, _, _ = fn.ev(np.array([z]))
            found.append(RootRecord(z, w, float(abs(v[0])), flagged=True))
            warnings.append(f"Newton failed near {z}; reporting the cell center")
            continue
        stack.extend(_split(fn, cell, w, hint))
    found.sort(key=_sort_key)
    dominant = None
    margin = math.inf
    if found:
        top = max(r.location.real for r in found)
        cands = [r for r in found if r.location.real >= top - 1e-9 * max(1.0, abs(top))]
        dominant = min(cands, key=lambda r: (abs(r.location.imag), r.location.imag))
        others = [r.location.real for r in found if r.location.real < top - 1e-9 * max(1.0, abs(top))]
        if others:
            margin = top - max(others)
    return SpectrumReport(used, found, total, dominant, margin, warnings)


@dataclass
class DominanceCheck:
    dominant: bool
    margin: float
    note: str
    right_winding: int
    disc_winding: int
    multiplicity: int
    scan_box: SearchBox
    others: list = field(default_factory=list)

    def __bool__(self):
        return self.dominant

    def to_dict(self) -> dict:
        b = self.scan_box
        return {
            "dominant": self.dominant,
            "margin": self.margin,
            "note": self.note,
            "right_winding": self.right_winding,
            "disc_winding": self.disc_winding,
            "multiplicity": self.multiplicity,
            "scan_box": [b.re_min, b.re_max, b.im_min, b.im_max],
        }


def _keyhole_pieces(lambda0: float, delta: float, rho: float, right: float, half: float) -> list[Piece]:
    xl = lambda0 + delta
    yr = math.sqrt(rho * rho - delta * delta)
    th = math.atan2(yr, delta)
    return [
        _line(complex(xl, -half), complex(right, -half)),
        _line(complex(right, -half), complex(right, half)),
        _line(complex(right, half), complex(xl, half)),
        _line(complex(xl, half), complex(xl, yr)),
        _arc(complex(lambda0), rho, th, -th),
        _line(complex(xl, -yr), complex(xl, -half)),
    ]


def verify_dominance_numeric(
    q: Quasipolynomial,
    lambda0: float,
    im_cap: float,
    re_max: float | None = None,
    left_offset: float = 1e-8,
    widen: float | None = None,
) -> DominanceCheck:
    """Check that no root lies in ``(lambda0 + left_offset, re_max] x [-im_cap, im_cap]``.

    The left edge is indented around ``lambda0`` by a small right half-disc;
    the full disc must then hold exactly the multiplicity of ``lambda0``.
    ``re_max`` defaults to the envelope bound at ``lambda0`` plus one, beyond
    which no root can have real part. ``margin`` is ``lambda0`` minus the
    largest real part of the other roots found in a box widened to the left.
    """
    from .midcore import multiplicity_check

    if im_cap < math.pi / q.tau:
        raise InputError("im_cap must be at least pi / tau")
    fn = _wrap(q)
    mult = multiplicity_check(q, lambda0)
    env = envelope_bound(companion(q), lambda0)
    right = re_max if re_max is not None else max(env, lambda0) + 1.0
    if right <= lambda0 + left_offset:
        raise InputError("re_max must lie to the right of lambda0")
    rho = _clear_radius(fn, complex(lambda0), 1e-4, 0.25 / max(q.tau, 1.0))
    if rho is None:
        raise ConvergenceError("no clean circle around lambda0 (root too degenerate)")
    rho = max(rho, 10 * left_offset)
    disc = _raw_winding(fn, Circle(lambda0, rho))

    half = im_cap
    eps = 1e-6
    for attempt in range(4):
        try:
            w_right = _contour_winding(fn, _keyhole_pieces(lambda0, left_offset, rho, right, half))
            break
        except BoundaryRootError:
            if attempt == 3:
                raise
            right += eps
            half += eps
            eps *= 2
    box = SearchBox(lambda0 + left_offset, right, -half, half)
    dominant = w_right == 0 and disc == mult

    width = widen if widen is not None else max(2.0, 4.0 / q.tau)
    spec = find_roots(q, SearchBox(lambda0 - width, right, -half, half))
    others = [r for r in spec.roots if abs(r.location - lambda0) > rho]
    if others:
        margin = lambda0 - max(r.location.real for r in others)
    else:
        margin = width

    parts = [f"multiplicity {mult} at lambda0", f"winding {w_right} right of lambda0"]
    if disc != mult:
        parts.append(f"disc of radius {rho:.2g} holds {disc} roots, expected {mult}")
    if env >= half:
        parts.append(f"envelope {env:.4g} exceeds the imaginary cap; scan is partial")
    if not others:
        parts.append(f"no other roots within {width:.3g} to the left")
    return DominanceCheck(dominant, margin, "; ".join(parts), w_right, disc, mult, box, others)
