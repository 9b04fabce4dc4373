import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from midspec import specfun
from midspec.errors import BranchCutError, InputError, SingularityError
from midspec.specfun import CombinationParams, KummerParams

MU = -1.0
PEND = CombinationParams(1, 3, 1 + MU, -(1 + 2 * MU) / 3)


def phi12_closed(z):
    return (cmath.exp(z) - 1) / z


@pytest.mark.parametrize("alpha,k,want", [(0.7, 0, 1), (1, 4, 24), (2, 3, 24), (0.5, 2, 0.75)])
def test_pochhammer(alpha, k, want):
    assert specfun.pochhammer(alpha, k) == pytest.approx(want)


def test_gamma_values():
    assert specfun.gamma(0.5).real == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert specfun.gamma(6).real == pytest.approx(120, rel=1e-13)
    mpmath = pytest.importorskip("mpmath")
    for z in (2 + 1j, 0.3 - 4j, -1.5 + 0.5j):
        want = complex(mpmath.gamma(z))
        assert abs(specfun.gamma(z) - want) <= 1e-13 * abs(want)


@pytest.mark.parametrize("z", [0, 1, -1, 2j, -15 + 3j, 20, -20, 14j])
def test_phi_1_2_closed_form(z):
    if z == 0:
        assert specfun.kummer_phi((1, 2), 0) == 1
        return
    want = phi12_closed(z)
    assert abs(specfun.kummer_phi((1, 2), z) - want) <= 1e-12 * abs(want)


@pytest.mark.parametrize("b,z", [(1.5, 0.3 + 2j), (3.0, -7.0), (0.25, 4j)])
def test_phi_equal_parameters_is_exponential(b, z):
    assert specfun.kummer_phi((b, b), z) == pytest.approx(cmath.exp(z), rel=1e-12)


def test_kummer_params_reject_nonpositive_integer_b():
    with pytest.raises(InputError):
        KummerParams(1, -2)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 4), st.floats(0.2, 5), st.floats(-6, 6), st.floats(-6, 6))
def test_derivative_shift_identity(a, b, x, y):
    z = complex(x, y)
    lhs = specfun.kummer_phi_deriv((a, b), z)
    rhs = a / b * specfun.kummer_phi((a + 1, b + 1), z)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 4), st.floats(0.5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_kummer_ode_residual(a, b, x, y):
    z = complex(x, y)
    f = specfun.kummer_phi((a, b), z)
    f1 = specfun.kummer_phi_deriv((a, b), z, 1)
    f2 = specfun.kummer_phi_deriv((a, b), z, 2)
    res = z * f2 + (b - z) * f1 - a * f
    assert abs(res) <= 1e-8 * max(1.0, abs(z * f2), abs(a * f))


@pytest.mark.parametrize("a,b,z", [(1, 3, 0), (1, 2, 1), (1, 4, -2), (0.5, 2.5, 3 + 1j), (2, 7, -10j)])
def test_integral_matches_series(a, b, z):
    want = specfun.kummer_phi((a, b), z)
    assert abs(specfun.kummer_phi_integral((a, b), z) - want) <= 1e-10 * max(1.0, abs(want))


def test_integral_precondition():
    with pytest.raises(InputError):
        specfun.kummer_phi_integral((2, 1.5), 0.3)


@pytest.mark.parametrize("a,b,z", [(1, 3, 1 + 1j), (0.5, 2.5, -3), (1.3, 0.6, 2 - 4j)])
def test_contiguous_relations(a, b, z):
    r1, r2 = specfun.contiguous_residuals((a, b), z)
    assert abs(r1) < 1e-10 and abs(r2) < 1e-10


def test_contiguous_rejects_origin():
    with pytest.raises(InputError):
        specfun.contiguous_residuals((1, 3), 0)


def test_combo_reductions():
    z = 0.7 - 1.1j
    assert specfun.combo_F((1.2, 2.5, 1.7, 0.0), z) == pytest.approx(1.7 * specfun.kummer_phi((1.2, 2.5), z))
    assert specfun.combo_F((1.2, 2.5, 1.7, -0.4), 0) == pytest.approx(1.3)


def test_combo_pendulum_value_at_origin():
    # integral of (1 - t)^2 on [0, 1]
    assert specfun.combo_F(CombinationParams(1, 3, 0.5, 0.0), 0) == pytest.approx(1 / 2)
    assert specfun.combo_F(PEND, 0) == pytest.approx(1 / 3)


def test_ode_data_reduces_to_kummer_when_beta_zero():
    p = CombinationParams(1.5, 2.5, 1.0, 0.0)
    z = 1.3 + 0.4j
    od = specfun.ode_data(p, z)
    assert od.q_val == pytest.approx(p.b / z - 1)
    assert od.r_val == pytest.approx(-p.a / z)


def _combo_residual(p, z, od):
    f = specfun.combo_F(p, z)
    f1 = specfun.combo_F_deriv(p, z, 1)
    f2 = specfun.combo_F_deriv(p, z, 2)
    return abs(f2 + od.q_val * f1 + od.r_val * f) / max(abs(f2), abs(od.q_val * f1), abs(od.r_val * f), 1e-300)


@pytest.mark.parametrize("z", [2.0, -1.5 + 0.5j, 3j, 5 - 2j])
def test_combination_ode_pendulum(z):
    assert _combo_residual(PEND, z, specfun.ode_data(PEND, z)) < 1e-8


@settings(max_examples=60, deadline=None)
@given(st.floats(0.5, 3), st.floats(1.5, 5), st.floats(-2, 2), st.floats(-2, 2), st.floats(-6, 6), st.floats(-6, 6))
def test_combination_ode_random(a, b, alpha, beta, x, y):
    if abs(alpha) < 0.05 and abs(beta) < 0.05:
        return
    p = CombinationParams(a, b, alpha, beta)
    z = complex(x, y)
    if p.d_slope == 0 and p.d_const == 0:
        # F is a multiple of exp(z); no second-order data
        with pytest.raises(InputError):
            specfun.ode_data(p, z)
        return
    try:
        od = specfun.ode_data(p, z)
    except SingularityError:
        return
    if abs(od.d_val) < 1e-3 * (abs(p.d_slope * z) + abs(p.d_const)):
        return
    assert _combo_residual(p, z, od) < 1e-8


def test_r_candidates_pick_one_form():
    p = CombinationParams(1.0, 3.0, 1.0, 0.0)
    z = 1.7 + 0.2j
    cands = specfun.r_candidates(p, z)
    res = {k: abs(specfun.combo_F_deriv(p, z, 2) + specfun.ode_data(p, z).q_val * specfun.combo_F_deriv(p, z, 1) + r * specfun.combo_F(p, z))
           for k, r in cands.items()}
    assert res["-N/(zD)"] < 1e-10
    assert res["-N/D"] > 1e4 * max(res["-N/(zD)"], 1e-16)


def test_ode_data_excluded_point():
    zx = PEND.excluded_point()
    if zx is None:
        p = CombinationParams(1.0, 3.0, 1.0, 0.5)
        zx = p.excluded_point()
    else:
        p = PEND
    with pytest.raises(SingularityError):
        specfun.ode_data(p, zx)
    with pytest.raises(SingularityError):
        specfun.ode_data(p, 0)


def test_whittaker_w_satisfies_normal_form():
    p = CombinationParams(1, 3, 0.5, 0.2)
    z = 1 + 1j
    h = 1e-4
    w = specfun.whittaker_W(p, z)
    w2 = (specfun.whittaker_W(p, z + h) - 2 * w + specfun.whittaker_W(p, z - h)) / h**2
    g = specfun.ode_data(p, z).g_val
    assert abs(w2 + g * w) < 1e-6 * max(1.0, abs(w))


def test_whittaker_branch_cut():
    with pytest.raises(BranchCutError):
        specfun.whittaker_W(PEND, -2.0)


def test_classical_whittaker_equation():
    k, l, z, h = 0.0, 1.0, 1.0, 1e-4
    m = lambda u: specfun.whittaker_M(k, l, u)
    m2 = (m(z + h) - 2 * m(z) + m(z - h)) / h**2
    res = m2 + (-0.25 + k / z + (0.25 - l * l) / z**2) * m(z)
    assert abs(res) < 1e-6


@pytest.mark.parametrize(
    "a,b,kind,hyp",
    [(1, 2, "axis", None), (1, 3, "right-half", (1, 2)), (2, 3, "left-half", (1, 2)), (1.5, 5, "right-half", (4, 11))],
)
def test_root_region(a, b, kind, hyp):
    r = specfun.kummer_root_region(a, b)
    assert r.kind == kind
    assert r.hyperbola == (None if hyp is None else pytest.approx(hyp))


def test_root_region_domain():
    with pytest.raises(InputError):
        specfun.kummer_root_region(1, 1.5)


def test_phi_1_2_zero_on_axis():
    z0 = 2j * math.pi
    assert abs(specfun.kummer_phi((1, 2), z0)) < 1e-12
    assert specfun.kummer_root_region(1, 2).admits(z0)


def test_green_hille_short_path():
    assert abs(specfun.green_hille_residual(PEND, 1e-6 + 0j)) < 1e-10


def test_green_hille_converges():
    p = CombinationParams(1, 3, 0.5, 0.2)
    z_end = 1.5 + 1.0j
    coarse = abs(specfun.green_hille_residual(p, z_end, 16))
    fine = abs(specfun.green_hille_residual(p, z_end, 64))
    assert fine <= coarse + 1e-14
    assert fine < 1e-6


def test_kummer_series_backend_agrees():
    from midspec import _kernels_py

    s, terms, big, ok = _kernels_py.kummer_series(1.0, 2.0, 3.0)
    assert ok and s == pytest.approx(np.expm1(3.0) / 3.0, rel=1e-14)


def test_combination_ode_tiny_weight():
    p = CombinationParams(2.0, 2.0, 1.0, 3e-225)
    od = specfun.ode_data(p, 1j)
    assert np.isfinite(od.q_val) and np.isfinite(od.r_val)
    assert _combo_residual(p, 1j, od) < 1e-8
