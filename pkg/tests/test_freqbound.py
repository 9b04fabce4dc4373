import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from midspec import freqbound, midcore, pendulum, roots
from midspec.acceptance import pendulum_normalized, order1_h_reference
from midspec.errors import InputError
from midspec.quasipoly import Quasipolynomial, SearchBox, normalize


def normalized_pendulum(mu):
    p0, pt = pendulum_normalized(mu)
    return Quasipolynomial(p0, pt, 1.0)


def brute_sup(h, x_max, nx=4001):
    """Dense-grid oracle: largest nonnegative real root in W of H(x, W)."""
    best = None
    for x in np.linspace(0.0, x_max, nx):
        c = h.in_w(x)[::-1]
        while len(c) > 1 and c[0] == 0:
            c = c[1:]
        if len(c) < 2:
            continue
        r = np.roots(c)
        real = r[(abs(r.imag) < 1e-9) & (r.real >= 0)].real
        if real.size:
            v = real.max()
            best = v if best is None else max(best, v)
    return best


def test_h_value_at_sample_point():
    h = freqbound.build_H(normalized_pendulum(-1), 1)
    assert h(1.0, 1.0) == pytest.approx(4.0)


@pytest.mark.parametrize("mu", [Fraction(-1), Fraction(-909, 1000), Fraction(-3, 4), Fraction(-1, 2), Fraction(-2, 3)])
def test_h_matches_closed_form_exactly(mu):
    assert freqbound.build_H(pendulum_normalized(mu), 1).coeffs == order1_h_reference(mu)


def test_h_without_delay_term_is_nonpositive():
    h = freqbound.build_H(([1, -0.5, 1], []), 2)
    for x in np.linspace(0, 4, 9):
        for w in np.linspace(0, 9, 10):
            assert h(x, w) <= 0


def test_taylor_truncation_below_exponential():
    for order in range(6):
        t = freqbound.taylor_exp2(order)
        for x in np.linspace(0, 5, 11):
            val = sum(float(c) * x**i for (i, _), c in t.items())
            assert val <= math.exp(2 * x) * (1 + 1e-15)


@pytest.mark.parametrize(
    "c,lo,hi",
    [([-2.0, 0.0, 1.0], 0.0, 3.0), ([6.0, -11.0, 6.0, -1.0], 0.0, 5.0), ([1.0, 0.0, 1.0], -3.0, 3.0)],
)
def test_real_roots_match_numpy(c, lo, hi):
    got = freqbound.real_roots(np.array(c), lo, hi)
    r = np.roots(c[::-1])
    want = sorted(x.real for x in r if abs(x.imag) < 1e-12 and lo <= x.real <= hi)
    assert got == pytest.approx(want, abs=1e-9)


def test_sup_order_one_matches_dense_oracle():
    qn = normalized_pendulum(-0.909)
    h = freqbound.build_H(qn, 1)
    x_max, _ = freqbound.choose_x_max(qn)
    sup = freqbound.sup_frequency(h, x_max)
    assert sup == pytest.approx(brute_sup(h, x_max), abs=1e-5)
    x_star, env = pendulum.omega_plus_max()
    assert sup <= env + 0.01
    assert x_star == pytest.approx(1.446, abs=0.01)
    assert env == pytest.approx(3.003, abs=0.01)


def test_sup_none_without_delay_term():
    assert freqbound.sup_frequency(freqbound.build_H(([2.0, 1.0, 1.0], []), 1), 10.0) is None


def test_frequency_bound_pendulum_report():
    rep = freqbound.frequency_bound(normalized_pendulum(-0.909), 5)
    assert rep.dominance_flag
    # the order-0 supremum is already below pi^2 for this member of the family
    assert rep.order_used == 0
    assert rep.omega_bound < math.pi
    assert rep.omega_bound == pytest.approx(math.sqrt(rep.sup_value))


def test_frequency_bound_crafted_failure():
    qn = Quasipolynomial((0.0, 0.0, 1.0), (-20.0,), 1.0)
    rep = freqbound.frequency_bound(qn, 0)
    assert not rep.dominance_flag and rep.omega_bound is None
    assert rep.sup_value > math.pi**2


def test_frequency_bound_delay_free():
    rep = freqbound.frequency_bound(Quasipolynomial((2.0, 1.0, 1.0), (), 1.0), 5)
    assert rep.order_used == 0 and rep.omega_bound is None and rep.dominance_flag


def test_frequency_bound_needs_unit_delay():
    with pytest.raises(InputError):
        freqbound.frequency_bound(Quasipolynomial((2.0, 1.0, 1.0), (0.1,), 0.5))


@settings(max_examples=10, deadline=None)
@given(st.floats(-1.0, -2 + math.sqrt(2)), st.floats(0.0, 6.0))
def test_sup_nonincreasing_in_order(mu, x):
    qn = normalized_pendulum(mu)
    tops = [freqbound.max_root(freqbound.build_H(qn, k), x) for k in range(4)]
    prev = math.inf
    for t in tops:
        v = -math.inf if t is None else t
        assert v <= prev + 1e-9
        prev = v


def test_soundness_on_right_half_roots():
    d = midcore.plant_root(2, 1, 1.0, -1.0, 0.3)
    qn = normalize(d.quasi, d.lambda0)
    rep = roots.find_roots(qn, SearchBox(-1e-3, 4.0, -12.0, 12.0))
    right = [r.location for r in rep.roots if r.location.real >= 0]
    assert right
    for order in range(4):
        h = freqbound.build_H(qn, order)
        scale = max(abs(float(c)) for c in h.coeffs.values())
        for z in right:
            assert h(z.real, z.imag**2) >= -1e-9 * scale
