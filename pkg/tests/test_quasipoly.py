import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from midspec.errors import InputError, NeutralTypeError
from midspec.quasipoly import (
    Quasipolynomial,
    RealPolynomial,
    SearchBox,
    cauchy_bound,
    companion,
    denormalize,
    envelope_bound,
    eval_derivatives,
    imag_axis_bound,
    matrix_norm2,
    normalize,
)

E1 = math.exp(-1)


def pendulum_quasi(tau=1.0, kp=-2 * E1, kd=0.0):
    return Quasipolynomial((1.0, 0.0, 1.0), (kp, kd), tau, m=1)


coef = st.floats(-3, 3, allow_nan=False)


def test_derivatives_at_triple_root():
    d = eval_derivatives(pendulum_quasi(), -1.0, 3)
    assert np.allclose(d, [0, 0, 0, 2], atol=1e-14)


def test_derivatives_delay_free_reduce_to_polynomial():
    q = Quasipolynomial((2.0, -1.0, 0.5, 1.0), (), 0.7)
    p = np.polynomial.Polynomial([2.0, -1.0, 0.5, 1.0])
    z = 0.3 - 0.8j
    got = eval_derivatives(q, z, 3)
    want = [p.deriv(k)(z) for k in range(4)]
    assert np.allclose(got, want, rtol=1e-14)


def test_derivatives_lambert_case():
    q = Quasipolynomial((0.0, 1.0), (1.0,), 1.0)
    assert np.allclose(eval_derivatives(q, 0.0, 1), [1.0, 0.0])


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=3, max_size=3), st.lists(coef, min_size=2, max_size=2),
       st.floats(0.2, 2.0), st.floats(-0.7, 0.7), st.floats(-0.7, 0.7))
def test_derivatives_match_finite_differences(a, alpha, tau, x, y):
    q = Quasipolynomial(tuple(a) + (1.0,), tuple(alpha), tau)
    lam = complex(x, y)
    h = 1e-5
    d = eval_derivatives(q, lam, 3)
    for k in range(1, 4):
        fd = (eval_derivatives(q, lam + h, k - 1)[-1] - eval_derivatives(q, lam - h, k - 1)[-1]) / (2 * h)
        assert abs(fd - d[k]) <= 1e-6 * max(1.0, abs(d[k]))


def test_normalize_pendulum_mu_minus_one():
    qn = normalize(pendulum_quasi(), -1.0)
    assert qn.tau == 1.0
    assert np.allclose(qn.p0.coeffs, [2.0, -2.0, 1.0], atol=1e-15)
    assert qn.ptau.coeffs == pytest.approx((-2.0,), abs=1e-15)


def test_normalize_identity():
    q = Quasipolynomial((0.3, -1.2, 1.0), (0.5, 0.25), 1.0)
    qn = normalize(q, 0.0)
    assert qn.p0.coeffs == pytest.approx(q.p0.coeffs, abs=1e-15)
    assert qn.ptau.coeffs == pytest.approx(q.ptau.coeffs, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=3, max_size=3), st.lists(coef, min_size=2, max_size=3),
       st.floats(0.2, 2.0), st.floats(-3, 1))
def test_normalize_round_trip(a, alpha, tau, lam0):
    q = Quasipolynomial(tuple(a) + (1.0,), tuple(alpha), tau)
    back = denormalize(normalize(q, lam0), lam0, tau)
    for u, v in zip(q.p0.coeffs + q.ptau.coeffs, back.p0.coeffs + back.ptau.coeffs):
        assert abs(u - v) <= 1e-12 * max(1.0, max(map(abs, q.p0.coeffs + q.ptau.coeffs)))


def test_normalized_values_correspond():
    q = Quasipolynomial((0.4, 0.1, 1.0), (-0.3, 0.2), 0.8)
    lam0 = -0.6
    qn = normalize(q, lam0)
    for lam in (0.1 + 0.2j, -1.0 + 3j, 2.0):
        assert qn(q.tau * (lam - lam0)) == pytest.approx(q.tau**2 * q(lam), rel=1e-12)


def test_degree_bound():
    q = Quasipolynomial((1.0, 2.0, 3.0, 1.0), (1.0, 1.0, 1.0), 1.0)
    assert q.degree() == 3 + 2 + 1


def test_neutral_rejected():
    with pytest.raises(NeutralTypeError):
        Quasipolynomial((1.0, 1.0), (1.0, 1.0), 1.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(p0=(1.0, 2.0), ptau=(), tau=0.0), dict(p0=(1.0, 2.0), ptau=(), tau=1.0), dict(p0=(1.0,), ptau=(), tau=1.0)],
)
def test_invalid_construction(kwargs):
    with pytest.raises(InputError):
        Quasipolynomial(**kwargs)


def test_json_round_trip():
    q = Quasipolynomial((0.25, -1.5, 1.0), (0.125,), 0.9, m=1)
    d = q.to_dict()
    assert d == {"n": 2, "m": 1, "tau": 0.9, "a": [0.25, -1.5], "alpha": [0.125, 0.0]}
    assert Quasipolynomial.from_json(q.to_json()) == q


def test_companion_scalar():
    cp = companion(Quasipolynomial((0.4, 1.0), (0.7,), 1.0))
    assert cp.a0.tolist() == [[-0.4]] and cp.atau.tolist() == [[-0.7]]


def test_companion_pendulum_layout():
    cp = companion(pendulum_quasi(kp=0.3, kd=-0.2))
    assert cp.a0.tolist() == [[0, 1], [-1, 0]]
    assert cp.atau.tolist() == [[0, 0], [-0.3, 0.2]]


@pytest.mark.parametrize("seed", range(5))
def test_companion_determinant_identity(seed):
    rng = np.random.default_rng(seed)
    q = Quasipolynomial(tuple(rng.normal(size=3)) + (1.0,), tuple(rng.normal(size=3)), rng.uniform(0.2, 2))
    cp = companion(q)
    for lam in rng.normal(size=20) + 1j * rng.normal(size=20):
        det = np.linalg.det(lam * np.eye(3) - cp.a0 - cp.atau * np.exp(-lam * q.tau))
        assert abs(det - q(lam)) <= 1e-10 * max(1.0, abs(q(lam)))


def test_matrix_norm_matches_svd():
    a = np.random.default_rng(1).normal(size=(4, 4))
    assert matrix_norm2(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-10)


def test_envelope_bound_values():
    q = Quasipolynomial((0.0, 1.0), (1.0,), 1.0)
    cp = companion(q)
    assert envelope_bound(cp, 0.0) == pytest.approx(1.0)
    big = companion(pendulum_quasi())
    assert envelope_bound(big, 60.0) == pytest.approx(matrix_norm2(big.a0), rel=1e-12)


def test_imag_axis_bound_pendulum():
    bound = imag_axis_bound(pendulum_quasi())
    assert bound >= math.sqrt(1 + 2 * E1)


def test_imag_axis_bound_no_crossing():
    assert imag_axis_bound(Quasipolynomial((1.0, 1.0), (), 1.0)) == 0.0


def test_cauchy_bound_covers_roots():
    c = [6.0, -5.0, 1.0]
    assert cauchy_bound(c) >= 3.0


def test_search_box_rejects_degenerate():
    with pytest.raises(InputError):
        SearchBox(1.0, 1.0, 0.0, 1.0)


def test_polynomial_algebra():
    p = RealPolynomial((1.0, 2.0))
    q = RealPolynomial((0.0, 1.0, 1.0))
    assert (p * q).coeffs == (0.0, 1.0, 3.0, 2.0)
    assert p.compose_affine(1.0, 2.0)(0.5) == pytest.approx(p(2.0))
