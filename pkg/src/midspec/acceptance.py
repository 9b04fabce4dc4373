"""End-to-end acceptance checks, shared by ``midspec selfcheck`` and the tests.

Each ``criterion_k`` returns a :class:`CriterionResult`; nothing here raises
on a failed check.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import freqbound, midcore, pendulum, roots, simulate, specfun
from .quasipoly import Quasipolynomial, SearchBox, eval_derivatives, normalize

__all__ = ["CriterionResult", "CRITERIA", "run_all"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    checks: dict = field(default_factory=dict)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_fmt(v)}" for k, v in self.checks.items())
        return f"[{flag}] {self.number}. {self.title}: {parts}"


def _fmt(v):
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return f"{v:.6g}"
    return str(v)


def _relative_derivatives(q: Quasipolynomial, lam: float, k: int) -> list[float]:
    scale = q.coefficient_scale() * max(1.0, abs(lam)) ** q.n
    return [abs(d) / scale for d in eval_derivatives(q, lam, k)]


def criterion_1() -> CriterionResult:
    """GMID pendulum: quadruple root and an empty scan box to its right."""
    d = pendulum.gmid_design(pendulum.PendulumConfig(1.0, 1.0))
    e2 = math.exp(-2)
    gains_ok = (
        abs(d.k_p + 5 * e2) < 1e-15
        and abs(d.k_d + math.sqrt(2) * e2) < 1e-15
        and abs(d.tau - math.sqrt(2)) < 1e-15
        and abs(d.lambda0 + math.sqrt(2)) < 1e-15
    )
    q = d.quasi()
    mult = midcore.multiplicity_check(q, d.lambda0)
    worst = max(_relative_derivatives(q, d.lambda0, 3))
    check = roots.verify_dominance_numeric(q, d.lambda0, 20.0, re_max=3.0, left_offset=1e-6)
    ok = gains_ok and mult == 4 and worst < 1e-9 and check.right_winding == 0 and check.disc_winding == 4
    return CriterionResult(
        1,
        "GMID pendulum quadruple root is dominant",
        ok,
        {"gains": gains_ok, "multiplicity": mult, "max_rel_derivative": worst, "roots_right": check.right_winding},
    )


def criterion_2() -> CriterionResult:
    """Intermediate design at tau = 0.9: triple root, certified, numerically dominant."""
    d = pendulum.intermediate_design(pendulum.PendulumConfig(1.0, 1.0), 0.9)
    lam_formula = (-2 + math.sqrt(2 - 0.81)) / 0.9
    q = d.quasi()
    mult = midcore.multiplicity_check(q, d.lambda0)
    worst = max(_relative_derivatives(q, d.lambda0, 2))
    design = d.mid_design()
    coef_gap = max(
        abs(x - y) for x, y in zip(q.to_dict()["a"] + q.to_dict()["alpha"], design.quasi.to_dict()["a"] + design.quasi.to_dict()["alpha"])
    )
    cert = midcore.certify_dominance(design)
    check = roots.verify_dominance_numeric(q, d.lambda0, 4 * math.pi / d.tau)
    ok = (
        abs(d.lambda0 - lam_formula) < 1e-12
        and abs(d.lambda0 + 1.01009) < 1e-4
        and mult == 3
        and worst < 1e-8
        and coef_gap < 1e-8
        and cert.verdict == "certified"
        and check.dominant
    )
    return CriterionResult(
        2,
        "intermediate MID at tau=0.9 certified",
        ok,
        {
            "lambda0": d.lambda0,
            "multiplicity": mult,
            "max_rel_derivative": worst,
            "gain_vs_synthesis": coef_gap,
            "verdict": cert.verdict,
            "roots_right": check.right_winding,
            "margin": check.margin,
        },
    )


def order1_h_reference(mu: Fraction) -> dict:
    """Closed-form order-1 ``H`` of the pendulum family as ``{(i, j): coeff}``."""
    m = Fraction(mu)
    terms = {
        (0, 2): -1,
        (1, 2): -2,
        (3, 1): -4,
        (2, 1): -2 * (4 * m + 1),
        (1, 1): -2 * (4 * m * m + 10 * m + 4),
        (5, 0): -2,
        (4, 0): -8 * m - 1,
        (3, 0): -4 * (2 * m + 1) * (m - 2),
        (2, 0): 8 * (2 * m + 1) ** 2,
    }
    return {k: Fraction(v) for k, v in terms.items() if v != 0}


def pendulum_normalized(mu) -> tuple[list, list]:
    return [-4 * mu - 2, 2 * mu, 1], [4 * mu + 2, 2 * mu + 2]


def criterion_3() -> CriterionResult:
    """Order-1 frequency bound: exact H and the 3.003 < pi^2 envelope."""
    mus = [Fraction(-1), Fraction(-909, 1000), Fraction(-3, 4), Fraction(-1, 2), Fraction(-2, 3)]
    exact = all(freqbound.build_H(pendulum_normalized(m), 1).coeffs == order1_h_reference(m) for m in mus)
    mu = -0.909
    p0, pt = pendulum_normalized(mu)
    qn = Quasipolynomial(p0, pt, 1.0)
    h = freqbound.build_H(qn, 1)
    x_max, _ = freqbound.choose_x_max(qn)
    sup = freqbound.sup_frequency(h, x_max)
    x_star, env_max = pendulum.omega_plus_max()
    ok = (
        exact
        and sup is not None
        and sup <= 3.003 + 0.01
        and abs(x_star - 1.446) <= 0.01
        and abs(env_max - 3.003) <= 0.01
        and math.sqrt(sup) < math.pi
    )
    return CriterionResult(
        3,
        "frequency bound reproduction",
        ok,
        {"h_exact": exact, "sup_order1": sup, "x_star": x_star, "envelope_max": env_max, "omega_bound": math.sqrt(sup)},
    )


def random_designs(count: int = 20, seed: int = 20240601):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, n))
        tau = float(rng.uniform(0.2, 2.0))
        lam0 = float(rng.uniform(-3.0, 0.0))
        A = float(rng.uniform(-2.0, 2.0))
        out.append(midcore.force_multiplicity(n, m, tau, lam0, A))
    return out, rng


def criterion_4() -> CriterionResult:
    """Factorization and quadrature identities on random designs."""
    designs, rng = random_designs()
    worst_fact = 0.0
    worst_quad = 0.0
    for d in designs:
        for _ in range(20):
            r = rng.uniform(0.5, 4.0)
            th = rng.uniform(0, 2 * math.pi)
            lam = d.lambda0 + r * complex(math.cos(th), math.sin(th)) / d.tau
            val = complex(d.quasi(lam))
            _, _, s = d.quasi.eval_with_derivative(np.array([lam]))
            scale = max(abs(val), s[0])
            worst_fact = max(worst_fact, abs(midcore.factorization_residual(d, lam)) / scale)
            worst_quad = max(worst_quad, abs(midcore.integral_form(d, lam) - val) / scale)
    ok = worst_fact < 1e-8 and worst_quad < 1e-8
    return CriterionResult(
        4,
        "multiplicity-(n+m) identities on 20 random designs",
        ok,
        {"factorization": worst_fact, "quadrature": worst_quad},
    )


def combo_ode_residual(p: specfun.CombinationParams, z: complex, form: str) -> float:
    """Relative residual of ``F'' + Q F' + R F`` with ``R`` from ``form``."""
    od = specfun.ode_data(p, z)
    r = specfun.r_candidates(p, z)[form]
    f0 = specfun.combo_F(p, z)
    f1 = specfun.combo_F_deriv(p, z, 1)
    f2 = specfun.combo_F_deriv(p, z, 2)
    terms = (f2, od.q_val * f1, r * f0)
    return abs(sum(terms)) / max(sum(abs(t) for t in terms), 1e-300)


def criterion_5() -> CriterionResult:
    """Kummer oracles, contiguous relations, Kummer ODE and the selected R-form."""
    rng = np.random.default_rng(5)
    zs = [complex(r * math.cos(t), r * math.sin(t)) for r in np.linspace(0.05, 20, 40) for t in np.linspace(0, 2 * math.pi, 36, endpoint=False)]
    zs += [complex(x, 0) for x in np.linspace(-20, 20, 81) if x != 0]
    worst_phi = 0.0
    for z in zs:
        exact = (np.exp(z) - 1) / z
        worst_phi = max(worst_phi, abs(specfun.kummer_phi((1, 2), z) - exact) / abs(exact))

    worst_contig = 0.0
    worst_ode = 0.0
    for _ in range(50):
        a = float(rng.uniform(0.2, 3.0))
        b = float(rng.uniform(a + 0.3, 6.0))
        z = complex(*rng.uniform(-8, 8, 2))
        r1, r2 = specfun.contiguous_residuals((a, b), z)
        f = {k: specfun.kummer_phi(k, z) for k in ((a, b), (a + 1, b), (a, b + 1), (a + 1, b + 1))}
        s1 = abs(f[(a, b + 1)]) + abs(b * (a + z) * f[(a, b)] / (z * (a - b))) + abs(a * b * f[(a + 1, b)] / (z * (a - b)))
        s2 = abs(f[(a + 1, b + 1)]) + abs(b * f[(a + 1, b)] / z) + abs(b * f[(a, b)] / z)
        worst_contig = max(worst_contig, abs(r1) / s1, abs(r2) / s2)
        d1 = specfun.kummer_phi_deriv((a, b), z, 1)
        d2 = specfun.kummer_phi_deriv((a, b), z, 2)
        terms = (z * d2, (b - z) * d1, -a * f[(a, b)])
        worst_ode = max(worst_ode, abs(sum(terms)) / sum(abs(t) for t in terms))

    worst_sel = 0.0
    for _ in range(100):
        a = float(rng.uniform(0.5, 3.0))
        b = float(rng.uniform(a + 0.5, 6.0))
        p = specfun.CombinationParams(a, b, float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)))
        z = complex(*rng.uniform(-6, 6, 2))
        worst_sel = max(worst_sel, combo_ode_residual(p, z, "-N/(zD)"))
    ratio = math.inf
    for _ in range(20):
        p = specfun.CombinationParams(float(rng.uniform(0.5, 3.0)), float(rng.uniform(3.5, 6.0)), 1.0, 0.0)
        z = complex(*rng.uniform(-6, 6, 2))
        good = max(combo_ode_residual(p, z, "-N/(zD)"), 1e-17)
        bad = combo_ode_residual(p, z, "-N/D")
        ratio = min(ratio, bad / good)
    ok = worst_phi < 1e-12 and worst_contig < 1e-10 and worst_ode < 1e-8 and worst_sel < 1e-8 and ratio >= 1e4
    return CriterionResult(
        5,
        "special-function oracles",
        ok,
        {"phi12": worst_phi, "contiguous": worst_contig, "kummer_ode": worst_ode, "selected_R": worst_sel, "rejected_ratio": ratio},
    )


def kummer_zeros(a: float, b: float, half: float = 10.0):
    rep = roots.find_zeros(
        lambda z: specfun.kummer_phi((a, b), z),
        lambda z: specfun.kummer_phi_deriv((a, b), z),
        SearchBox(-half, half, -half, half),
    )
    return [r.location for r in rep.roots]


def criterion_6() -> CriterionResult:
    """Zero regions of Phi(1,2,.) and Phi(1,3,.)."""
    z2 = kummer_zeros(1.0, 2.0)
    z3 = kummer_zeros(1.0, 3.0)
    axis = max((abs(z.real) for z in z2), default=math.inf)
    hyper = min((z.imag**2 - 2 * z.real**2 for z in z3), default=-math.inf)
    right = min((z.real for z in z3), default=-math.inf)
    ok = len(z2) > 0 and axis < 1e-8 and len(z3) > 0 and right > 0 and hyper > 0
    return CriterionResult(
        6,
        "Kummer zero regions",
        ok,
        {"zeros_phi12": len(z2), "max_abs_re": axis, "zeros_phi13": len(z3), "min_re": right, "min_hyperbola": hyper},
    )


def criterion_7() -> CriterionResult:
    """Triple-root curves for g/L in 1..7."""
    ratios = list(range(1, 8))
    grid = 400
    rows = pendulum.triple_root_curves(ratios, grid)
    endpoint_gap = 0.0
    near_gap = 0.0
    monotone = True
    blowup = math.inf
    for r in ratios:
        curve = [(t, lam) for (rr, t, lam) in rows if rr == r]
        tmax = math.sqrt(2 / r)
        endpoint_gap = max(endpoint_gap, abs(curve[-1][1] + math.sqrt(2 * r)))
        near_gap = max(near_gap, abs(pendulum.lambda0_of_tau(r, tmax * (1 - 1e-14)) + math.sqrt(2 * r)))
        # approach to tau -> 0: lambda0 strictly increasing in tau up to sqrt(L/g)
        left = [lam for t, lam in curve if t <= 1 / math.sqrt(r)]
        monotone &= all(x < y for x, y in zip(left, left[1:]))
        blowup = min(blowup, -curve[0][1])
    domains = [math.sqrt(2 / r) for r in ratios]
    shrinking = all(x > y for x, y in zip(domains, domains[1:]))
    csv_text = pendulum.triple_root_table(ratios, grid)
    ok = endpoint_gap < 1e-6 and near_gap < 1e-6 and monotone and blowup > 50 and shrinking and csv_text.startswith("ratio,tau,lambda0")
    return CriterionResult(
        7,
        "triple-root curves",
        ok,
        {"endpoint_gap": endpoint_gap, "near_endpoint_gap": near_gap, "monotone_to_zero": monotone, "min_blowup": blowup, "domains_shrink": shrinking},
    )


def criterion_8() -> CriterionResult:
    """Decay rate of the tau = 0.9 closed loop and delay-free sanity cases."""
    d = pendulum.intermediate_design(pendulum.PendulumConfig(1.0, 1.0), 0.9)
    traj = simulate.integrate(simulate.DdeProblem(d.quasi(), 1.0, 20 * d.tau))
    rate = simulate.fit_decay_rate(traj, (5 * d.tau, 20 * d.tau))
    rel = abs(rate - d.lambda0) / abs(d.lambda0)

    q1 = Quasipolynomial([1.0, 1.0], [], 1.0)
    t1 = simulate.integrate(simulate.DdeProblem(q1, 1.0, 5.0))
    err1 = abs(t1.y[int(round(1.0 / t1.dt))] - math.exp(-1))
    q2 = Quasipolynomial([1.0, 0.0, 1.0], [], 1.0)
    t2 = simulate.integrate(simulate.DdeProblem(q2, lambda t: np.array([math.cos(t), -math.sin(t)]), 20.0))
    err2 = float(np.max(np.abs(t2.y - np.cos(t2.t))))
    ok = rel < 0.10 and err1 < 1e-6 and err2 < 1e-6
    return CriterionResult(
        8,
        "simulated decay rate",
        ok,
        {"fitted_rate": rate, "lambda0": d.lambda0, "relative_gap": rel, "exp_decay_err": err1, "harmonic_err": err2},
    )


def criterion_9() -> CriterionResult:
    """Planted right-of-lambda0 root is refuted, and the CLI exits with 3."""
    from .cli import main

    d = midcore.plant_root(2, 1, 1.0, -1.0, 0.3)
    planted = complex(d.quasi(-0.7))
    cert = midcore.certify_dominance(d)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "planted.json")
        with open(path, "w") as fh:
            json.dump(d.to_dict(), fh)
        code = main(["certify", path, "--out", tmp, "--quiet"])
    ok = cert.verdict == "refuted" and code == 3 and abs(planted) < 1e-12
    return CriterionResult(
        9,
        "negative control",
        ok,
        {"A": d.a_param, "residual_at_plant": abs(planted), "verdict": cert.verdict, "cli_exit": code},
    )


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9]


def run_all() -> list[CriterionResult]:
    return [c() for c in CRITERIA]
