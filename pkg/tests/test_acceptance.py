"""Acceptance criteria, one test (and one pass/fail line under -v) each.

Each criterion states its own tolerance and runtime budget; the budgets are
asserted with a wall-clock guard.
"""

import json
import time

import numpy as np
import pytest

from sigmapoly import io
from sigmapoly.bifurcation import (
    circle_crossing_count,
    circle_saddle_node,
    circle_system,
    classify_parameter_point,
    cusp_curves,
    cusp_family,
    foldfold_curves,
    foldfold_family,
    sweep_diagram,
    twofold_curves,
    twofold_family,
)
from sigmapoly.cli import run
from sigmapoly.core import (
    FilippovSystem,
    PolyField,
    SwitchingFunction,
    StableSliding,
    classify_sigma_point,
    lie_derivative,
    sliding_field,
)
from sigmapoly.flow import Section, hit_section
from sigmapoly.maps import mirror_map, place_section, transfer_pair, transition_germ, transition_map, SectionConfig
from sigmapoly.poly2 import Poly2, poly_const, poly_x, poly_y
from sigmapoly.polycycle import find_cycles, first_return, normal_form_model

from conftest import make_system


class Budget:
    def __init__(self, seconds):
        self.limit = seconds
        self.t0 = time.monotonic()

    def check(self):
        elapsed = time.monotonic() - self.t0
        assert elapsed < self.limit, f"runtime {elapsed:.1f}s over budget {self.limit}s"
        return elapsed


def _report(name, detail):
    print(f"{name}: PASS  ({detail})")


def test_ac1_transition_closed_form():
    budget = Budget(1.0)
    F = PolyField(poly_const(1.0), poly_x())
    h = SwitchingFunction(poly_y())
    tau = Section(anchor=(1.0, 0.0), direction=(0.0, 1.0), halfwidth=2.0)
    worst = 0.0
    for x in np.linspace(-0.7, 0.7, 50):
        worst = max(worst, abs(transition_map(F, h, tau, x) - (1 - x * x) / 2))
    assert worst < 1e-8
    g = transition_germ(F, h, tau, 0.0, 2, 0.3)
    assert abs(g.kappa + 0.5) < 1e-6
    # sign law sgn(kappa) = -delta^n sgn(X^n h): X^2 h = 1, delta = +1, n = 2
    x2h = lie_derivative(F, h, (0.0, 0.0), 2)
    assert np.sign(g.kappa) == -np.sign(x2h)
    _report("AC1", f"max|T - oracle| = {worst:.2e}, kappa = {g.kappa:.9f}, "
                   f"{budget.check():.2f}s")


def test_ac2_mirror_cubic_field():
    budget = Budget(1.0)
    F = PolyField(poly_const(1.0), poly_x() * poly_x() * poly_x() - poly_x())
    h = SwitchingFunction(poly_y())
    r1 = mirror_map(F, h, -0.5, side=-1)
    r2 = mirror_map(F, h, 2.0, side=-1)
    assert abs(r1 + np.sqrt(1.75)) < 1e-8
    assert abs(r2 + 2.0) < 1e-8
    _report("AC2", f"rho(-0.5) = {r1:.10f}, rho(2) = {r2:.10f}, "
                   f"{budget.check():.2f}s")


def test_ac3_foldfold_synthetic():
    budget = Budget(30.0)
    fam = foldfold_family(kappa=1.0, dtilde=2.0)
    # exact curve values
    for a in (0.05, 0.1, -0.05, -0.1):
        cur = foldfold_curves(fam, a).values
        assert abs(cur["beta1"] + 8 * a**2) < 1e-10
        if a > 0:
            assert abs(cur["beta2"] + 4 * a**2) < 1e-10
            assert abs(cur["beta4"] + a**2) < 1e-10
        else:
            assert abs(cur["beta3"] - 8 * a**2) < 1e-10
            assert abs(cur["beta5"] - 2 * a**2) < 1e-10
    # region inventory on a 41x41 grid, with the measure-zero curve items
    # sampled on the traced curves themselves
    grid = sweep_diagram(fam, 41, 41)
    items = {c.item for c in grid.cells if c.item is not None}
    alphas = sorted({c.params[0] for c in grid.cells})
    for a in alphas:
        if abs(a) < 1e-12:
            continue
        for beta in foldfold_curves(fam, a).values.values():
            items.add(classify_parameter_point(fam, (a, beta)).item)
    assert {1, 2, 3, 4, 5, 6} <= items
    region3 = [c for c in grid.cells if c.item == 3]
    assert region3, "region 3 missing from the sweep"
    for c in region3:
        assert len(c.crossing_cycles) == 2
        outer, inner = c.crossing_cycles  # sorted by chart coordinate
        assert outer.stability == "attracting" and inner.stability == "repelling"
    # beta4 / beta5 sliding substructure
    structures = {
        s.structure for c in grid.cells for s in c.sliding_cycles
    }
    assert "crosses-once-from-Mminus" in structures
    assert "direct-from-Mplus" in structures
    _report("AC3", f"items {sorted(items)}, {len(region3)} region-3 cells, "
                   f"{budget.check():.1f}s")


def test_ac4_twofold_synthetic():
    budget = Budget(30.0)
    fam = twofold_family()
    for b in np.linspace(-0.2, 0.2, 21):
        cur = twofold_curves(fam, b)
        assert abs(cur["gamma1"] - b * b) < 1e-10
        assert abs(cur["gamma2"] + b * b) < 1e-10
    # the 13 regions/curves with their stated inventories
    table = [
        (0.05, 0.1, 1, 0, 0, 1, False),
        (0.01, 0.1, 2, 0, 1, 0, False),
        (0.005, 0.1, 3, 1, 0, 0, False),
        (0.0, 0.1, 4, 1, 0, 0, True),
        (-0.05, 0.1, 5, 1, 0, 0, False),
        (-0.05, 0.0, 6, 1, 0, 0, True),
        (0.0, 0.0, 7, 0, 1, 0, True),
        (-0.05, -0.001, 8, 1, 0, 0, False),
        (-0.05, -0.0025, 9, 0, 1, 0, False),
        (-0.05, -0.05, 10, 0, 0, 1, False),
        (0.0, -0.05, 11, 0, 0, 1, True),
        (0.05, -0.05, 12, 0, 0, 1, False),
        (0.05, 0.0, 13, 0, 0, 1, True),
    ]
    for b1, b2, item, nc, npoly, nslide, het in table:
        r = classify_parameter_point(fam, (b1, b2))
        assert (r.item, len(r.crossing_cycles), r.polycycles,
                len(r.sliding_cycles), r.heteroclinic) == (item, nc, npoly, nslide, het), \
            f"inventory mismatch at ({b1}, {b2}): {r.label}"
    _report("AC4", f"13 regions verified, {budget.check():.1f}s")


def test_ac5_cusp_synthetic():
    budget = Budget(10.0)
    fam = cusp_family(kappa=-1.0, dtilde=-1.0)
    cur = cusp_curves(fam, 0.03)
    assert abs(cur["Vbar"] + 0.102) < 1e-12
    assert abs(cur["Ibar"] - 0.098) < 1e-12
    assert abs(cur["Abar"] - 0.198) < 1e-12
    # leading coefficients after Richardson extrapolation in lambda1
    lams = np.array([1e-4, 1e-3, 1e-2])
    v = np.array([abs(cusp_curves(fam, l)["Vbar"]) / np.sqrt(l) for l in lams])
    a = np.array([abs(cusp_curves(fam, l)["Abar"]) / np.sqrt(l) for l in lams])
    v0 = np.polynomial.polynomial.polyfit(lams, v, 2)[0]
    a0 = np.polynomial.polynomial.polyfit(lams, a, 2)[0]
    assert abs(v0 - 1 / np.sqrt(3)) < 0.01 / np.sqrt(3)
    assert abs(a0 - 2 / np.sqrt(3)) < 0.01 * 2 / np.sqrt(3)
    _report("AC5", f"V/sqrt(lam) -> {v0:.6f}, A/sqrt(lam) -> {a0:.6f}, "
                   f"{budget.check():.1f}s")


def test_ac6_ode_circle_scenario():
    budget = Budget(60.0)
    # unperturbed polycycle closes
    Z0 = circle_system()
    tau = Section(anchor=(0.0, 2.0), direction=(0.0, 1.0), halfwidth=0.3)
    q, _ = hit_section(Z0.X, (0.0, 2.0), tau, "forward")
    closure = abs(tau.coord(q))
    assert closure < 1e-6
    # saddle-node of the fitted unfolding at alpha_p = 0.05
    sn = circle_saddle_node(0.05)
    kappa, dtilde = sn["kappa"], sn["dtilde"]
    ratio = sn["beta"] / sn["alpha"] ** 2
    formula = 4 * kappa * dtilde / (kappa - dtilde)
    assert abs(ratio - formula) < 0.10 * abs(formula), (ratio, formula)
    # cycle counts: flow-based where the regions are resolvable ...
    assert circle_crossing_count(0.05, -0.002) == 1
    assert circle_crossing_count(0.05, 0.001) == 0
    # ... and from the fitted-germ model for the O(kappa^2/dtilde) region 3,
    # whose parameter width is below flow resolution
    fam_fit = foldfold_family(kappa=kappa, dtilde=dtilde)
    alpha = 0.05
    b1 = 4 * kappa * dtilde / (kappa - dtilde) * alpha**2
    b2 = -4 * kappa * alpha**2
    r = classify_parameter_point(fam_fit, (alpha, (b1 + b2) / 2))
    assert r.item == 3 and len(r.crossing_cycles) == 2
    outer, inner = r.crossing_cycles
    assert outer.stability == "attracting" and inner.stability == "repelling"
    _report("AC6", f"closure {closure:.1e}, beta1/alpha^2 = {ratio:.6e} "
                   f"vs {formula:.6e}, counts 1/0/2, {budget.check():.1f}s")


def test_ac7_first_return_law():
    budget = Budget(10.0)
    for n, kappa, dtilde in ((2, 1.0, 2.0), (3, -1.0, -1.0)):
        model = normal_form_model(kappa, dtilde, n)
        for x in -np.logspace(-3, -1, 9):
            p = first_return(model, x)
            assert abs(p / x**n - kappa / dtilde) < 0.05 * abs(kappa / dtilde)
            assert abs(p) < abs(x)
    _report("AC7", f"P(x)/x^n within 5% over two decades, {budget.check():.1f}s")


def _sliding_tangency_worst():
    rng = np.random.default_rng(0)
    worst = 0.0
    checked = 0
    h_flat = SwitchingFunction(poly_y())
    x2 = poly_x() * poly_x()
    h_curved = SwitchingFunction(poly_y() - poly_const(0.2) * x2)
    for _ in range(5):
        a, b, c, d = rng.uniform(0.2, 2.0, size=4)
        X = PolyField(poly_const(1.0), poly_const(-a) - poly_const(b) * x2)
        Y = PolyField(poly_const(1.0), poly_const(c) + poly_const(d) * x2)
        for h in (h_flat, h_curved):
            Z = FilippovSystem(X=X, Y=Y, h=h)
            grad_x, grad_y = h.h.dx(), h.h.dy()
            for x in rng.uniform(-1.0, 1.0, size=100):
                y = 0.0 if h is h_flat else 0.2 * x * x
                if not isinstance(classify_sigma_point(Z, (x, y)), StableSliding):
                    continue
                F = sliding_field(Z, (x, y))
                worst = max(worst, abs(F[0] * grad_x(x, y) + F[1] * grad_y(x, y)))
                checked += 1
    return worst, checked


def test_ac8_property_suites(tmp_path):
    budget = Budget(60.0)
    # sliding-field tangency, 1000 points
    worst, checked = _sliding_tangency_worst()
    assert checked == 1000
    assert worst < 1e-12
    # involution rho o rho = id, 100 points x 5 fields
    h = SwitchingFunction(poly_y())
    worst_inv = 0.0
    for c in (-0.4, -0.2, 0.0, 0.25, 0.5):
        F = PolyField(poly_const(1.0), poly_x() - poly_const(c))
        for x in np.linspace(c - 1.0, c + 1.0, 100):
            if abs(x - c) < 1e-3:
                continue
            worst_inv = max(worst_inv, abs(mirror_map(F, h, mirror_map(F, h, x, side=-1), side=-1) - x))
    assert worst_inv < 1e-8
    # E-II factorization Tu = T+ o rho within 1e-8
    Z = make_system(poly_x(), poly_x())
    tau_u = place_section(Z.X, (0.0, 0.0), distance=0.1, direction="forward")
    tau_s = place_section(Z.X, (0.0, 0.0), distance=0.1, direction="backward")
    pair = transfer_pair(Z, (0.0, 0.0), SectionConfig(tau_u=tau_u, tau_s=tau_s))
    sgn = -1.0 if pair.Tu.chart.get("flipped") else 1.0
    worst_fact = 0.0
    for x in np.linspace(-0.045, -0.005, 9):
        direct = transition_map(Z.X, Z.h, tau_u, mirror_map(Z.Y, Z.h, x, side=-1))
        worst_fact = max(worst_fact, abs(sgn * pair.Tu(x) - direct))
    assert worst_fact < 1e-8
    # uniqueness by exhaustive root isolation (one-singularity model)
    model = normal_form_model(1.0, 2.0, 2, lam=(-0.01,))
    interior = [r for r in find_cycles(model) if r.locus == "interior"]
    xs = np.linspace(-0.3 + 1e-9, -1e-9, 200001)
    delta = xs**2 - 0.01 - 2.0 * xs
    isolated = int(np.sum(np.sign(delta[:-1]) * np.sign(delta[1:]) < 0))
    assert len(interior) == isolated == 1
    # CLI determinism: byte-identical artifacts on rerun
    for d in ("r1", "r2"):
        assert run(["diagram", "--scenario", "twofold-synthetic", "--grid", "4x4",
                    "--out", str(tmp_path / d)]) == 0
        assert run(["scenario-curves", "--scenario", "cusp-synthetic",
                    "--out", str(tmp_path / d / "cusp-curves.csv")]) == 0
    for name in ("diagram.csv", "curves.csv", "cusp-curves.csv"):
        assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()
    _report("AC8", f"tangency {worst:.1e}, involution {worst_inv:.1e}, "
                   f"factorization {worst_fact:.1e}, {budget.check():.1f}s")
