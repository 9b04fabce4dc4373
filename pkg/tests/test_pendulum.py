import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from midspec import midcore, roots
from midspec.errors import InfeasibleError, InputError
from midspec.pendulum import (
    PendulumConfig,
    triple_root_curves,
    triple_root_table,
    gmid_design,
    intermediate_design,
    inverted_design,
    lambda0_of_tau,
    omega_plus,
    omega_plus_max,
    solve_assignment,
    tau_max,
)

CLASSICAL = PendulumConfig()


def test_gmid_unit_pendulum():
    d = gmid_design(CLASSICAL)
    want = (-5 * math.exp(-2), -math.sqrt(2) * math.exp(-2), math.sqrt(2), -math.sqrt(2))
    assert (d.k_p, d.k_d, d.tau, d.lambda0) == pytest.approx(want, rel=1e-15)
    assert (d.k_p, d.k_d) == pytest.approx((-0.676676, -0.191393), abs=1e-6)
    assert midcore.multiplicity_check(d.quasi(), d.lambda0) == 4


def test_gmid_ratio_two():
    assert gmid_design(PendulumConfig(g=2.0, L=1.0)).lambda0 == pytest.approx(-2.0)


def test_gmid_rejects_inverted():
    with pytest.raises(InputError):
        gmid_design(PendulumConfig(variant="inverted"))


def test_intermediate_at_unit_delay():
    d = intermediate_design(CLASSICAL, 1.0)
    assert d.lambda0 == pytest.approx(-1.0) and d.mu == pytest.approx(-1.0)
    assert d.k_d == pytest.approx(0.0, abs=1e-15)
    assert d.k_p == pytest.approx(-2 * math.exp(-1))
    assert d.certificate_eligible


def test_intermediate_at_0_9():
    d = intermediate_design(CLASSICAL, 0.9)
    assert d.lambda0 == pytest.approx(-1.01009, abs=1e-4)
    assert d.mu == pytest.approx(-0.90908, abs=1e-4)
    assert d.certificate_eligible
    assert midcore.multiplicity_check(d.quasi(), d.lambda0) == 3


def test_intermediate_ineligible_beyond_unit_ratio():
    d = intermediate_design(CLASSICAL, 1.3)
    assert not d.certificate_eligible and d.mu < -1


@pytest.mark.parametrize("tau", [0.0, math.sqrt(2), 2.0])
def test_intermediate_domain(tau):
    with pytest.raises(InputError):
        intermediate_design(CLASSICAL, tau)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 5.0), st.floats(0.02, 0.999))
def test_intermediate_gains_give_triple_root(ratio, frac):
    cfg = PendulumConfig(g=ratio, L=1.0)
    tau = frac * tau_max(cfg)
    d = intermediate_design(cfg, tau)
    assert midcore.multiplicity_check(d.quasi(), d.lambda0) >= 3
    syn = d.mid_design().quasi
    ours = d.quasi()
    assert np.allclose(ours.p0.coeffs, syn.p0.coeffs, atol=1e-9 * max(1, ratio))


def test_intermediate_approaches_gmid():
    cfg = PendulumConfig(g=3.0, L=1.0)
    tmax = tau_max(cfg)
    lam = lambda0_of_tau(cfg.ratio, tmax * (1 - 1e-14))
    assert lam == pytest.approx(gmid_design(cfg).lambda0, abs=1e-6)


def test_kd_vanishes_at_mu_minus_one():
    for ratio in (0.5, 1.0, 4.0):
        d = intermediate_design(PendulumConfig(g=ratio), 1 / math.sqrt(ratio))
        assert d.mu == pytest.approx(-1.0)
        assert abs(d.k_d) < 1e-14


@pytest.mark.parametrize("tau", [0.3, 0.6, 0.9, 1.0])
def test_eligible_designs_certified(tau):
    d = intermediate_design(CLASSICAL, tau)
    cert = midcore.certify_dominance(d.mid_design())
    assert cert.verdict == "certified"
    chk = roots.verify_dominance_numeric(d.quasi(), d.lambda0, 4 * math.pi / tau)
    assert chk.dominant


def test_assignment_recovers_classical():
    lam0, A = solve_assignment(1.0, 0.0, 1.0)
    assert lam0 == pytest.approx(-1.0, abs=1e-10)
    assert A == pytest.approx(1.0, abs=1e-9)


def test_assignment_closed_form():
    # lambda0 solves lam^2 + (a1 + 4/tau) lam + a0 + 2 a1/tau + 2/tau^2 = 0
    tau, a1, a0 = 0.7, 0.3, -0.8
    lam0, A = solve_assignment(tau, a1, a0)
    assert lam0**2 + (a1 + 4 / tau) * lam0 + a0 + 2 * a1 / tau + 2 / tau**2 == pytest.approx(0.0, abs=1e-9)
    assert A == pytest.approx(-tau * (a1 + 2 * lam0) - 1, abs=1e-9)


def test_assignment_infeasible():
    # discriminant a1^2 - 4 a0 + 8 / tau^2 < 0
    with pytest.raises(InfeasibleError):
        solve_assignment(2.0, 0.0, 5.0)


def test_inverted_design():
    cfg = PendulumConfig(variant="inverted", eps=0.0)
    d = inverted_design(cfg, 0.5)
    q = d.quasi()
    assert q.p0.coeffs == pytest.approx((-1.0, 0.0, 1.0), abs=1e-10)
    assert midcore.multiplicity_check(q, d.lambda0) == 3
    assert d.lambda0 == pytest.approx(-1.0, abs=1e-9)


def test_inverted_gain_factor():
    cfg = PendulumConfig(variant="inverted", eps=0.4)
    d = inverted_design(cfg, 0.5)
    q = d.quasi()
    c = 1 / (1 - 0.3)
    assert q.p0.coeffs[0] == pytest.approx(-c)
    assert q.ptau.coeffs[0] == pytest.approx(c * d.k_p)


@pytest.mark.parametrize("eps", [4 / 3, -0.1])
def test_config_rejects_eps(eps):
    with pytest.raises(InputError):
        PendulumConfig(variant="inverted", eps=eps)


def test_triple_root_curves():
    rows = triple_root_curves(range(1, 8), 50)
    assert len(rows) == 7 * 50
    for r in range(1, 8):
        curve = [(t, l) for ratio, t, l in rows if ratio == r]
        taus = [t for t, _ in curve]
        assert max(taus) == pytest.approx(math.sqrt(2 / r))
        assert curve[-1][1] == pytest.approx(-math.sqrt(2 * r), abs=1e-6)
        small = [l for t, l in curve if t < math.sqrt(1 / r)]
        assert all(a < b for a, b in zip(small, small[1:]))


def test_curve_unit_ratio_point():
    assert lambda0_of_tau(1.0, 1.0) == pytest.approx(-1.0)


def test_curve_domain_shrinks():
    assert all(tau_max(PendulumConfig(g=r)) > tau_max(PendulumConfig(g=r + 1)) for r in range(1, 7))


def test_triple_root_table_csv():
    text = triple_root_table([1, 2], 4)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["ratio", "tau", "lambda0"]
    assert len(rows) == 9


def test_omega_plus_maximum():
    x, v = omega_plus_max()
    assert x == pytest.approx(1.446, abs=0.01)
    assert v == pytest.approx(3.003, abs=0.01)
    assert v < math.pi**2
    grid = np.linspace(0, 10, 2001)
    assert np.max(omega_plus(grid)) <= v + 1e-9
