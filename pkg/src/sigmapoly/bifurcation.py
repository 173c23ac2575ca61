"""Scenario-level bifurcation analysis.

Three packaged scenarios: the regular-cusp polycycle (parameters
(lambda1, beta)), the double regular-fold polycycle (beta1, beta2), and
the visible-invisible fold-fold polycycle (alpha, beta).  Each scenario
offers bifurcation-curve computation, geometric region classification
(root placement versus the admissible windows, never inequality-table
lookup), and a parameter-plane sweep.

An ODE backend realizes the fold-fold scenario on a concrete circle
field so the germ-level predictions can be cross-checked by flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .core import FilippovSystem, PolyField, SwitchingFunction
from .errors import ConfigError, NegativeLambda, NoHit, WrongSign
from .flow import Section, hit_section
from .maps import Germ, cheb_nodes, fit_germ, place_section, sigma_contacts, transition_map
from .poly2 import Poly2, poly_const, poly_x, poly_y
from .polycycle import (
    CycleReport,
    SyntheticLeg,
    SyntheticModel,
    classify_solution,
    find_cycles,
    normal_form_model,
)

CURVE_TOL = 1e-9
DEFAULT_EPS = 0.3


# -- reports ------------------------------------------------------------------


@dataclass(frozen=True)
class SlidingCycle:
    folds: tuple[str, ...]
    segments: int
    structure: str = ""


@dataclass(frozen=True)
class RegionReport:
    params: tuple[float, float]
    item: int | None
    crossing_cycles: tuple[CycleReport, ...]
    polycycles: int
    sliding_cycles: tuple[SlidingCycle, ...]
    heteroclinic: bool = False
    flags: tuple[str, ...] = ()
    error: str = ""

    @property
    def label(self) -> str:
        if self.error:
            return f"error:{self.error}"
        stab = ",".join(c.stability[0] for c in self.crossing_cycles)
        slide = ",".join(
            f"{len(s.folds)}f{s.segments}s" for s in self.sliding_cycles
        )
        parts = [
            f"item{self.item if self.item is not None else 0}",
            f"x{len(self.crossing_cycles)}" + (f"[{stab}]" if stab else ""),
            f"p{self.polycycles}",
            f"s{len(self.sliding_cycles)}" + (f"[{slide}]" if slide else ""),
        ]
        if self.heteroclinic:
            parts.append("het")
        parts.extend(sorted(self.flags))
        return "|".join(parts)


@dataclass(frozen=True)
class CurveValues:
    values: dict
    degenerate: bool = False

    def __getitem__(self, k):
        return self.values[k]


# -- scenario families --------------------------------------------------------


@dataclass(frozen=True)
class ScenarioFamily:
    name: str  # "Cusp" | "TwoFold" | "VIFoldFold"
    backend: str  # "synthetic" | "ode"
    param_names: tuple[str, str]
    coeffs: dict = field(default_factory=dict)
    ranges: tuple[tuple[float, float], tuple[float, float]] = (
        (-0.15, 0.15),
        (-0.25, 0.25),
    )
    eps: float = DEFAULT_EPS


def cusp_family(kappa: float = -1.0, dtilde: float = -1.0) -> ScenarioFamily:
    if kappa >= 0:
        raise ConfigError("regular-cusp scenario requires kappa < 0")
    fam = ScenarioFamily(
        name="Cusp",
        backend="synthetic",
        param_names=("lambda1", "beta"),
        coeffs={"kappa": kappa, "dtilde": dtilde},
        ranges=((-0.05, 0.05), (-0.25, 0.25)),
        eps=0.6,
    )
    base = classify_parameter_point(fam, (0.0, 0.0))
    if base.polycycles < 1:
        raise ConfigError("family does not exhibit the cusp polycycle at (0,0)")
    return fam


def twofold_family(
    kappa1: float = -1.0,
    kappa2: float = 1.0,
    dtilde1: float = 1.0,
    dtilde2: float = 1.0,
) -> ScenarioFamily:
    # DRF-A sign table
    if not (kappa1 < 0 < kappa2 and dtilde1 > 0 and dtilde2 > 0):
        raise ConfigError(
            "double regular-fold (attracting case) requires kappa1<0<kappa2, dtilde_i>0"
        )
    fam = ScenarioFamily(
        name="TwoFold",
        backend="synthetic",
        param_names=("beta1", "beta2"),
        coeffs={"kappa1": kappa1, "kappa2": kappa2, "dtilde1": dtilde1, "dtilde2": dtilde2},
        ranges=((-0.2, 0.2), (-0.2, 0.2)),
        eps=0.6,
    )
    base = classify_parameter_point(fam, (0.0, 0.0))
    if base.polycycles < 1:
        raise ConfigError("family does not exhibit the two-fold polycycle at (0,0)")
    return fam


def foldfold_family(kappa: float = 1.0, dtilde: float = 2.0) -> ScenarioFamily:
    if not (kappa > 0 and dtilde > 0):
        raise ConfigError("VI fold-fold scenario requires kappa > 0 and dtilde > 0")
    if kappa - dtilde >= 0:
        raise ConfigError("attracting VI fold-fold requires kappa - dtilde < 0")
    fam = ScenarioFamily(
        name="VIFoldFold",
        backend="synthetic",
        param_names=("alpha", "beta"),
        coeffs={"kappa": kappa, "dtilde": dtilde},
        ranges=((-0.15, 0.15), (-0.12, 0.12)),
        eps=1.0,
    )
    base = classify_parameter_point(fam, (0.0, 0.0))
    if base.polycycles < 1:
        raise ConfigError("family does not exhibit the fold-fold polycycle at (0,0)")
    return fam


def circle_family(validate: bool = True) -> ScenarioFamily:
    fam = ScenarioFamily(
        name="VIFoldFold",
        backend="ode",
        param_names=("alpha", "beta"),
        coeffs={},
        ranges=((-0.1, 0.1), (-0.05, 0.05)),
    )
    if validate:
        # Gamma0 must be a hyperbolic limit cycle of X0
        dpx = circle_cycle_multiplier()
        if abs(dpx - 1.0) < 0.05:
            raise ConfigError(f"circle cycle is not hyperbolic: dP_X = {dpx}")
    return fam


# -- cusp ---------------------------------------------------------------------


def _cusp_beta_map(x: float, lam1: float, kappa: float, dtilde: float) -> float:
    """beta for which x is a root of the displacement Tu(x) - dtilde*x."""
    return dtilde * x - lam1 * x - kappa * x**3


def cusp_fold_points(lam1: float, kappa: float) -> tuple[float, float, float]:
    """(V, I, A): visible fold, invisible fold, mirror landing of V.

    Folds are the double roots of the tangency cubic x^3 + (lam1/kappa) x;
    A is the third point on V's level: x^3 - |lam1/kappa| x = V^3 - |..| V.
    """
    V = float(np.sqrt(-lam1 / (3.0 * kappa)))
    I = -V
    mu = -lam1 / kappa  # cubic x^3 - mu x, fold at V = sqrt(mu/3)
    level = V**3 - mu * V
    roots = np.roots([1.0, 0.0, -mu, -level])
    real = sorted(float(np.real(r)) for r in roots if abs(np.imag(r)) < 1e-12)
    A = min(real, key=lambda r: -abs(r - V))  # the root farthest from V
    return V, I, A


def cusp_curves(fam: ScenarioFamily, lam1: float) -> CurveValues:
    """(Abar, Vbar, Ibar): beta values of the cusp bifurcation curves."""
    if lam1 < 0:
        raise NegativeLambda(f"cusp curves undefined for lambda1 = {lam1} < 0")
    k, d = fam.coeffs["kappa"], fam.coeffs["dtilde"]
    if lam1 == 0:
        return CurveValues({"Abar": 0.0, "Vbar": 0.0, "Ibar": 0.0}, degenerate=True)
    V, I, A = cusp_fold_points(lam1, k)
    Vbar = _cusp_beta_map(V, lam1, k, d)
    Abar = _cusp_beta_map(A, lam1, k, d)
    # V-I connection: the fold orbit from V lands exactly on I
    Ibar = d * I - lam1 * V - k * V**3
    return CurveValues({"Abar": Abar, "Vbar": Vbar, "Ibar": Ibar})


def _classify_cusp(fam: ScenarioFamily, lam1: float, beta: float) -> RegionReport:
    k, d = fam.coeffs["kappa"], fam.coeffs["dtilde"]
    eps = fam.eps
    tol = CURVE_TOL
    flags: list[str] = []

    if abs(lam1) <= tol and abs(beta) <= tol:
        return RegionReport(
            params=(lam1, beta),
            item=3,
            crossing_cycles=(),
            polycycles=1,
            sliding_cycles=(),
            flags=("codim2", "C-attracting"),
        )

    # displacement roots: kappa x^3 + (lam1 - dtilde) x + beta = 0
    roots = np.roots([k, 0.0, lam1 - d, beta])
    real = [float(np.real(r)) for r in roots if abs(np.imag(r)) < 1e-10]
    in_window = [x for x in real if -eps < x < eps]

    model = normal_form_model(k, d, 3, lam=(beta, lam1), sigma=(-eps, eps))

    if lam1 <= tol:
        cycles = tuple(
            classify_solution(model, np.array([x])) for x in sorted(set(in_window))
        )
        item = 1 if lam1 < -tol else 2
        return RegionReport(
            params=(lam1, beta),
            item=item,
            crossing_cycles=cycles,
            polycycles=0,
            sliding_cycles=(),
            flags=tuple(flags),
        )

    V, I, A = cusp_fold_points(lam1, k)
    cur = cusp_curves(fam, lam1)
    for name in ("Vbar", "Ibar", "Abar"):
        if abs(beta - cur[name]) <= tol:
            flags.append(f"on-curve:{name}")

    cycles: list[CycleReport] = []
    polycycles = 0
    sliding: list[SlidingCycle] = []
    hetero = False
    lo_fold, hi_fold = min(A, V), max(A, V)
    for x in sorted(set(in_window)):
        if min(abs(x - A), abs(x - V)) <= tol:
            polycycles += 1
        elif lo_fold < x < hi_fold:
            # the fixed point of the return map falls on the sliding
            # segment: a sliding cycle, structured by where the fold orbit
            # lands relative to the invisible fold I
            x_land = (beta + lam1 * V + k * V**3) / d
            if abs(x_land - I) <= tol:
                structure = "V-I-connection"
                hetero = True
            elif (x_land - I) * (V - I) > 0:
                structure = "land-in-(I,V)"
            else:
                structure = "land-in-(A,I)"
            sliding.append(SlidingCycle(folds=("V",), segments=1, structure=structure))
        else:
            cycles.append(classify_solution(model, np.array([x])))

    item = _cusp_item(beta, cur, tol)
    return RegionReport(
        params=(lam1, beta),
        item=item,
        crossing_cycles=tuple(cycles),
        polycycles=polycycles,
        sliding_cycles=tuple(sliding),
        heteroclinic=hetero,
        flags=tuple(flags),
    )


def _cusp_item(beta: float, cur: CurveValues, tol: float) -> int:
    vbar, ibar, abar = cur["Vbar"], cur["Ibar"], cur["Abar"]
    if beta < vbar - tol:
        return 4
    if abs(beta - vbar) <= tol:
        return 5
    if beta < ibar - tol:
        return 6
    if abs(beta - ibar) <= tol:
        return 7
    if beta < abar - tol:
        return 8
    if abs(beta - abar) <= tol:
        return 9
    return 10


# -- double regular fold --------------------------------------------------------


def _twofold_model(fam: ScenarioFamily, b1: float, b2: float) -> SyntheticModel:
    c = fam.coeffs
    eps = fam.eps
    Tu1 = Germ(base=0.0, coeffs=(b1, 0.0, c["kappa1"]), window=eps)
    Tu2 = Germ(base=0.0, coeffs=(b2, 0.0, c["kappa2"]), window=eps)
    DTs1 = Germ(base=0.0, coeffs=(0.0, c["dtilde1"]), window=eps)
    DTs2 = Germ(base=0.0, coeffs=(0.0, c["dtilde2"]), window=eps)
    leg1 = SyntheticLeg(Tu=Tu1, DTs=DTs1, sigma=(0.0, eps))
    leg2 = SyntheticLeg(Tu=Tu2, DTs=DTs2, sigma=(-eps, 0.0))
    return SyntheticModel(k=2, legs=(leg1, leg2), unfolding={"beta1": b1, "beta2": b2})


def twofold_curves(fam: ScenarioFamily, b: float) -> CurveValues:
    """gamma1 evaluated at beta2 = b, gamma2 at beta1 = b.

    gamma1(beta2): the beta1 producing the polycycle through p2 (solve the
    crossing system with xi2 pinned to the fold); gamma2 symmetric.
    """
    c = fam.coeffs
    # xi2 = 0: xi1 = beta2/dtilde2 from Delta2, then beta1 from Delta1 = 0
    xi1 = b / c["dtilde2"]
    gamma1 = c["dtilde1"] * 0.0 - c["kappa1"] * xi1**2
    xi2 = b / c["dtilde1"]
    gamma2 = -c["kappa2"] * xi2**2
    return CurveValues({"gamma1": gamma1, "gamma2": gamma2})


def _twofold_sliding_trace(
    fam: ScenarioFamily, b1: float, b2: float, tol: float = CURVE_TOL
) -> tuple[list[SlidingCycle], bool]:
    """Follow fold-exit orbits through the germ maps.

    Exiting fold p_i, the orbit lands at the next corner via the leg's
    transfer pair; an out-of-window landing enters sliding and re-exits at
    that fold.  A repeated fold exit closes a sliding cycle; an interior
    orbit converging under the crossing dynamics yields none.
    """
    c = fam.coeffs
    model = _twofold_model(fam, b1, b2)

    def step(corner: int, x: float) -> float:
        leg = model.legs[corner - 1]
        return leg.Tu(x) / (leg.DTs.coeffs[1])

    found: dict = {}
    hetero = False
    for start in (1, 2):
        exits: list[tuple[int, str]] = []  # (fold, "slide" | "connect")
        fold = start
        closed = None
        for _ in range(50):
            x = step(fold, 0.0)  # landing at the other corner
            corner = 2 if fold == 1 else 1
            # corner 1 window [0, eps): sliding side x < 0
            # corner 2 window (-eps, 0]: sliding side x > 0
            last = {1: None, 2: None}
            kind = "escape"
            for _ in range(200):
                if (corner == 1 and x < -tol) or (corner == 2 and x > tol):
                    kind = "slide"
                    break
                if abs(x) <= tol:
                    kind = "connect"
                    if corner != fold:
                        hetero = True
                    break
                if abs(x) > fam.eps * 10:
                    kind = "escape"
                    break
                # the crossing iteration contracts onto a crossing cycle
                if last[corner] is not None and abs(x - last[corner]) < 1e-12:
                    kind = "converged"
                    break
                last[corner] = x
                x = step(corner, x)
                corner = 2 if corner == 1 else 1
            if kind in ("escape", "converged"):
                break
            next_fold = corner
            exits.append((fold, kind))
            # the loop closes when the next exit repeats an earlier one
            again = [i for i, (f, _) in enumerate(exits) if f == next_fold]
            if again:
                closed = exits[again[-1] :]
                break
            fold = next_fold
        if closed:
            segs = sum(1 for _, k in closed if k == "slide")
            folds = tuple(sorted({f"p{f}" for f, _ in closed}))
            key = (folds, segs)
            if segs > 0 and key not in found:
                found[key] = SlidingCycle(folds=folds, segments=segs)
    return list(found.values()), hetero


def _twofold_item(b1: float, b2: float, fam: ScenarioFamily, tol: float) -> int:
    g1 = twofold_curves(fam, b2)["gamma1"]
    g2 = twofold_curves(fam, b1)["gamma2"]
    if b2 > tol:
        if b1 > g1 + tol:
            return 1
        if abs(b1 - g1) <= tol:
            return 2
        if b1 > tol:
            return 3
        if abs(b1) <= tol:
            return 4
        return 5
    if abs(b2) <= tol:
        if b1 < -tol:
            return 6
        if abs(b1) <= tol:
            return 7
        return 13
    # b2 < 0
    if abs(b1) <= tol:
        return 11
    if b1 > tol:
        return 12
    if b2 > g2 + tol:
        return 8
    if abs(b2 - g2) <= tol:
        return 9
    return 10


def _classify_twofold(fam: ScenarioFamily, b1: float, b2: float) -> RegionReport:
    tol = CURVE_TOL
    model = _twofold_model(fam, b1, b2)
    reports = find_cycles(model)
    cycles = tuple(r for r in reports if r.kind == "crossing-cycle")
    polycycles = sum(1 for r in reports if r.kind == "polycycle")
    sliding, hetero = _twofold_sliding_trace(fam, b1, b2, tol)
    flags: list[str] = []
    g1 = twofold_curves(fam, b2)["gamma1"]
    g2 = twofold_curves(fam, b1)["gamma2"]
    if b2 > tol and abs(b1 - g1) <= tol:
        flags.append("on-curve:gamma1")
    if b1 < -tol and abs(b2 - g2) <= tol:
        flags.append("on-curve:gamma2")
    if abs(b1) <= tol and abs(b2) <= tol:
        flags.append("codim2")
    item = _twofold_item(b1, b2, fam, tol)
    return RegionReport(
        params=(b1, b2),
        item=item,
        crossing_cycles=cycles,
        polycycles=polycycles,
        sliding_cycles=tuple(sliding),
        heteroclinic=hetero,
        flags=tuple(flags),
    )


# -- VI fold-fold (synthetic) -----------------------------------------------


def _foldfold_model(fam: ScenarioFamily, alpha: float, beta: float) -> SyntheticModel:
    c = fam.coeffs
    zeta = min(0.0, 2.0 * alpha)
    lo = -fam.eps
    Tu = Germ(base=0.0, coeffs=(beta, 0.0, c["kappa"]), window=fam.eps)
    DTs = Germ(base=0.0, coeffs=(0.0, 0.0, c["dtilde"]), window=fam.eps)
    leg = SyntheticLeg(Tu=Tu, DTs=DTs, sigma=(lo, zeta), a=alpha)
    return SyntheticModel(
        k=1, legs=(leg,), unfolding={"alpha": alpha, "beta": beta}, eII=True
    )


def foldfold_curves(fam: ScenarioFamily, alpha: float) -> CurveValues:
    """Bifurcation curves of the VI fold-fold unfolding at a given alpha.

    beta1: saddle-node of crossing cycles (both signs of alpha);
    beta2 / beta4: boundary polycycle / sliding connection (alpha > 0);
    beta3 / beta5: their alpha < 0 counterparts.
    """
    k, d = fam.coeffs["kappa"], fam.coeffs["dtilde"]
    vals: dict = {}
    if alpha == 0.0:
        return CurveValues(
            {"beta1": 0.0, "beta2": 0.0, "beta3": 0.0, "beta4": 0.0, "beta5": 0.0},
            degenerate=True,
        )
    # saddle-node: Delta and dDelta/dx vanish together. dDelta/dx is
    # independent of beta, so solve for the critical x, then beta linearly.
    x_sn = 2.0 * k * alpha / (k - d)
    vals["beta1"] = -(k * (x_sn - 2 * alpha) ** 2 - d * x_sn**2)
    if alpha > 0:
        vals["beta2"] = -(k * (0.0 - 2 * alpha) ** 2 - d * 0.0**2)
        vals["beta4"] = -k * alpha**2  # Tu(alpha) = 0: orbit of p_Y hits p_0
    if alpha < 0:
        zeta = 2.0 * alpha
        vals["beta3"] = -(k * (zeta - 2 * alpha) ** 2 - d * zeta**2)
        vals["beta5"] = d * alpha**2  # DTs(alpha) = Tu(2 alpha): p_0 orbit hits p_Y
    return CurveValues(vals)


def foldfold_curve_value(fam: ScenarioFamily, alpha: float, name: str) -> float:
    cur = foldfold_curves(fam, alpha)
    if name not in cur.values:
        raise WrongSign(f"curve {name} undefined at alpha = {alpha}")
    return cur[name]


def _classify_foldfold(fam: ScenarioFamily, alpha: float, beta: float) -> RegionReport:
    k, d = fam.coeffs["kappa"], fam.coeffs["dtilde"]
    tol = CURVE_TOL
    eps = fam.eps
    zeta = min(0.0, 2.0 * alpha)
    model = _foldfold_model(fam, alpha, beta)
    flags: list[str] = []

    cur = foldfold_curves(fam, alpha)
    for name, val in sorted(cur.values.items()):
        if abs(beta - val) <= tol and abs(alpha) > tol:
            flags.append(f"on-curve:{name}")

    if abs(alpha) <= tol and abs(beta) <= tol:
        return RegionReport(
            params=(alpha, beta),
            item=None,
            crossing_cycles=(),
            polycycles=1,
            sliding_cycles=(),
            flags=("codim2", "tangent-polycycle"),
        )

    # displacement roots: (k-d) x^2 - 4 k a x + beta + 4 k a^2 = 0
    a2, a1, a0 = (k - d), -4.0 * k * alpha, beta + 4.0 * k * alpha**2
    disc = a1 * a1 - 4.0 * a2 * a0
    roots: list[float] = []
    if disc >= 0:
        roots = sorted(np.roots([a2, a1, a0]).real.tolist())
    interior = [x for x in roots if -eps < x < zeta - tol]
    boundary = [x for x in roots if abs(x - zeta) <= tol]
    double_root = disc >= 0 and abs(disc) <= 1e2 * tol * max(abs(a1) ** 2, 1e-12)
    if double_root and interior:
        interior = interior[:1]

    cycles = tuple(classify_solution(model, np.array([x])) for x in sorted(set(interior)))
    polycycles = len(set(boundary))

    sliding: list[SlidingCycle] = []
    if alpha > tol and -4.0 * k * alpha**2 + tol < beta < -tol:
        s_plus = beta + k * alpha**2
        if s_plus < -tol:
            structure = "crosses-once-from-Mminus"
        elif s_plus > tol:
            structure = "direct-from-Mplus"
        else:
            structure = "connection-p0-pY"
        sliding.append(SlidingCycle(folds=("p0", "pY"), segments=1, structure=structure))
    if alpha < -tol and tol < beta < 4.0 * d * alpha**2 - tol:
        s_minus = beta - d * alpha**2
        if s_minus < -tol:
            structure = "crosses-once-from-Mminus"
        elif s_minus > tol:
            structure = "direct-from-Mplus"
        else:
            structure = "connection-p0-pY"
        sliding.append(SlidingCycle(folds=("p0", "pY"), segments=1, structure=structure))

    if beta < -tol:
        flags.append("X-cycle-in-Mplus")
    elif abs(beta) <= tol:
        flags.append("tangent-X-cycle")

    if double_root and interior:
        item = 2
    elif len(interior) == 2:
        item = 3
    elif len(interior) == 1 and polycycles:
        item = 4
    elif len(interior) == 1:
        item = 5
    elif polycycles:
        item = 6
    else:
        item = 1
    return RegionReport(
        params=(alpha, beta),
        item=item,
        crossing_cycles=cycles,
        polycycles=polycycles,
        sliding_cycles=tuple(sliding),
        flags=tuple(flags),
    )


# -- VI fold-fold (ODE circle backend) ----------------------------------------


def circle_system(alpha_p: float = 0.0, beta_p: float = 0.0) -> FilippovSystem:
    """Concrete VI fold-fold realization on Sigma = {y = 0}.

    X spirals onto the circle of radius 1 centered (0, 1 + beta_p), which
    for beta_p = 0 is tangent to Sigma at the origin (visible fold);
    Y = (1, x - alpha_p) has an invisible fold at (alpha_p, 0) with the
    exact mirror map x -> 2 alpha_p - x.
    """
    c = 1.0 + beta_p
    x, y = poly_x(), poly_y()
    t = y + poly_const(-c)
    r2 = x * x + t * t + poly_const(-1.0)
    fx = t.scale(-1.0) + (x * r2).scale(-1.0)
    fy = x + (t * r2).scale(-1.0)
    X = PolyField(fx, fy)
    Y = PolyField(poly_const(1.0), x + poly_const(-alpha_p))
    h = SwitchingFunction(y)
    return FilippovSystem(X=X, Y=Y, h=h)


def circle_visible_fold(Z: FilippovSystem, span: float = 0.45) -> float:
    """Abscissa of the visible X-fold of the circle field near the origin."""
    contacts = sigma_contacts(Z.X, Z.h, (-span, span))
    vis = [c for c in contacts if c[1] == 2 and c[2] > 0]
    if not vis:
        raise NoHit("no visible X-fold found near the origin")
    return min((c[0] for c in vis), key=abs)


def _circle_tau_s(Z: FilippovSystem, x_fold: float, beta_p: float) -> Section:
    # section on the stable-side separatrix, a short backward hop from the fold,
    # with the chart oriented away from the circle centre so both germs come
    # out with positive quadratic coefficients
    sec = place_section(Z.X, (x_fold, 0.0), distance=0.3, direction="backward")
    center = np.array([0.0, 1.0 + beta_p])
    outward = np.asarray(sec.anchor) - center
    if float(np.dot(outward, sec.direction)) < 0.0:
        d = sec.direction
        sec = Section(anchor=sec.anchor, direction=(-d[0], -d[1]), halfwidth=sec.halfwidth)
    return sec


def _circle_maps(Z: FilippovSystem, alpha_p: float, x_fold: float, tau_s: Section):
    """Transfer values in the tau_s chart, computed with forward-stable flows.

    The circle contracts radially like exp(-4 pi) per lap, so the global
    connection is only integrable forward; we therefore compose it onto Tu
    (TuD = D o T+ o rho_Y, a full forward lap) and keep Ts as the short
    local backward transfer.
    """

    def tud(x: float) -> float:
        r = 2.0 * alpha_p - x
        q, _ = hit_section(Z.X, np.array([r, 0.0]), tau_s, "forward")
        return tau_s.coord(q)

    def ts(x: float) -> float:
        q, _ = hit_section(Z.X, np.array([x, 0.0]), tau_s, "backward")
        return tau_s.coord(q)

    return tud, ts


def circle_displacement_samples(
    alpha_p: float,
    beta_p: float,
    xs,
    Z: FilippovSystem | None = None,
) -> list[tuple[float, float]]:
    """Flow displacement Delta(x) = D(Tu(x)) - Ts(x) in the tau_s chart.

    Roots are the crossing cycles (chart-independent)."""
    Z = Z or circle_system(alpha_p, beta_p)
    x_fold = circle_visible_fold(Z)
    tau_s = _circle_tau_s(Z, x_fold, beta_p)
    tud, ts = _circle_maps(Z, alpha_p, x_fold, tau_s)
    return [(float(x), tud(x) - ts(x)) for x in xs]


def circle_germs(
    alpha_p: float = 0.0, beta_p: float = 0.0, window: float = 0.12, m: int = 12
) -> tuple[Germ, Germ]:
    """(TuD, Ts) germs of the circle scenario in the tau_s chart, by flow."""
    Z = circle_system(alpha_p, beta_p)
    x_fold = circle_visible_fold(Z)
    tau_s = _circle_tau_s(Z, x_fold, beta_p)
    tud, ts = _circle_maps(Z, alpha_p, x_fold, tau_s)
    zeta = min(x_fold, 2 * alpha_p - x_fold)
    xs = zeta - np.linspace(0.01, window, m)
    Tu = fit_germ([(x, tud(x)) for x in xs], x_fold, 2)
    Ts = fit_germ([(x, ts(x)) for x in xs], x_fold, 2)
    return Tu, Ts


def circle_unfolding_fit(
    alpha_p: float, beta_p: float, window: float = 0.12, narrow: float = 2e-3
) -> dict:
    """Fit the germ-level unfolding (alpha, beta, kappa, dtilde) by flow.

    kappa and dtilde come from degree-4 fits over a wide window; beta and
    alpha from the displacement quadratic over a narrow window near the fold,
    where the saddle-node lives and the 2-jet truncation error stays below
    the size of beta itself (beta scales like the lap contraction, ~3.5e-6,
    in the tau_s chart).
    """
    Z = circle_system(alpha_p, beta_p)
    x_fold = circle_visible_fold(Z)
    tau_s = _circle_tau_s(Z, x_fold, beta_p)
    tud, ts = _circle_maps(Z, alpha_p, x_fold, tau_s)
    zeta = min(x_fold, 2 * alpha_p - x_fold)

    xs_w = zeta - np.linspace(0.012, window, 12)
    Tu = fit_germ([(x, tud(x)) for x in xs_w], x_fold, 4)
    kappa = Tu.coeffs[2]

    # the narrow Ts fit pins down the vertex to ~1e-9; a wide-window vertex
    # error delta shifts C1 by 2*dtilde*delta, which would swamp -4*kappa*alpha
    xs_n = zeta - np.linspace(1e-4, narrow, 12)
    ts_n = [(float(x), ts(x)) for x in xs_n]
    Ts = fit_germ(ts_n, x_fold, 3)
    dtilde = Ts.coeffs[2]
    # Sigma-chart shift putting the Ts vertex at the origin
    x_v = x_fold - Ts.coeffs[1] / (2.0 * dtilde)

    delta = [(x, tud(x) - t) for (x, t) in ts_n]
    D = fit_germ(delta, x_v, 3)
    C0, C1, C2 = D.coeffs[0], D.coeffs[1], D.coeffs[2]
    alpha = -C1 / (4.0 * kappa)
    beta = C0 + C1 * alpha
    return {
        "alpha": float(alpha),
        "beta": float(beta),
        "kappa": float(kappa),
        "dtilde": float(dtilde),
        "fold": float(x_fold),
        "C": (float(C0), float(C1), float(C2)),
    }


def circle_crossing_count(
    alpha_p: float, beta_p: float, window: float = 0.25, n: int = 30
) -> int:
    """Number of crossing cycles: isolated roots of the flow displacement."""
    Z = circle_system(alpha_p, beta_p)
    x_fold = circle_visible_fold(Z)
    zeta = min(x_fold, 2 * alpha_p - x_fold)
    xs = np.linspace(zeta - window, zeta - 0.004, n)
    samples = circle_displacement_samples(alpha_p, beta_p, xs, Z=Z)
    vals = np.array([v for _, v in samples])
    count = 0
    for i in range(len(xs) - 1):
        if np.sign(vals[i]) != np.sign(vals[i + 1]) and vals[i] != 0.0:
            count += 1
    return count


def _circle_disc(alpha_p: float, beta_p: float, narrow: float = 2e-3) -> float:
    """Discriminant of the narrow-window displacement quadratic (fast path)."""
    Z = circle_system(alpha_p, beta_p)
    x_fold = circle_visible_fold(Z)
    tau_s = _circle_tau_s(Z, x_fold, beta_p)
    tud, ts = _circle_maps(Z, alpha_p, x_fold, tau_s)
    zeta = min(x_fold, 2 * alpha_p - x_fold)
    xs_n = zeta - np.linspace(1e-4, narrow, 10)
    ts_n = [(float(x), ts(x)) for x in xs_n]
    Ts = fit_germ(ts_n, x_fold, 3)
    x_v = x_fold - Ts.coeffs[1] / (2.0 * Ts.coeffs[2])
    D = fit_germ([(x, tud(x) - t) for (x, t) in ts_n], x_v, 3)
    C0, C1, C2 = D.coeffs[0], D.coeffs[1], D.coeffs[2]
    return C1 * C1 - 4.0 * C0 * C2


def circle_saddle_node(
    alpha_p: float, bracket: tuple[float, float] = (-1e-6, 1e-6)
) -> dict:
    """Locate the saddle-node in beta_p and report the germ-chart unfolding.

    The saddle-node sits within O(exp(-8 pi)) of the boundary curve beta_2 in
    germ units, i.e. at beta_p of a few 1e-8 for alpha_p ~ 0.05."""
    lo, hi = bracket
    beta_p_star = brentq(lambda b: _circle_disc(alpha_p, b), lo, hi, xtol=1e-13)
    fit = circle_unfolding_fit(alpha_p, beta_p_star)
    fit["beta_p"] = float(beta_p_star)
    return fit


def circle_cycle_multiplier() -> float:
    """Return-map derivative of the unperturbed circle cycle (finite difference)."""
    Z = circle_system(0.0, 0.0)
    sec = Section(anchor=(0.0, 2.0), direction=(0.0, 1.0), halfwidth=0.3)
    out = []
    for s in (0.05, 0.1):
        p = sec.point_at(s)
        q, _ = hit_section(Z.X, p, sec, "forward")
        out.append(sec.coord(q))
    return (out[1] - out[0]) / 0.05


def _classify_circle(fam: ScenarioFamily, alpha_p: float, beta_p: float) -> RegionReport:
    fit = circle_unfolding_fit(alpha_p, beta_p)
    syn = foldfold_family(kappa=fit["kappa"], dtilde=fit["dtilde"])
    report = _classify_foldfold(syn, fit["alpha"], fit["beta"])
    return replace(report, params=(alpha_p, beta_p))


# -- dispatch -----------------------------------------------------------------


def classify_parameter_point(fam: ScenarioFamily, params) -> RegionReport:
    p1, p2 = float(params[0]), float(params[1])
    if fam.backend == "ode":
        if fam.name != "VIFoldFold":
            raise ConfigError(f"no ODE backend for scenario {fam.name}")
        return _classify_circle(fam, p1, p2)
    if fam.name == "Cusp":
        return _classify_cusp(fam, p1, p2)
    if fam.name == "TwoFold":
        return _classify_twofold(fam, p1, p2)
    if fam.name == "VIFoldFold":
        return _classify_foldfold(fam, p1, p2)
    raise ConfigError(f"unknown scenario {fam.name}")


def scenario_curves(fam: ScenarioFamily, p: float) -> CurveValues:
    if fam.name == "Cusp":
        return cusp_curves(fam, p)
    if fam.name == "TwoFold":
        return twofold_curves(fam, p)
    if fam.name == "VIFoldFold":
        return foldfold_curves(fam, p)
    raise ConfigError(f"unknown scenario {fam.name}")


# -- diagrams ------------------------------------------------------------------


@dataclass(frozen=True)
class DiagramGrid:
    axes: tuple[tuple[str, float, float, int], tuple[str, float, float, int]]
    cells: tuple[RegionReport, ...]  # row-major over (p1, p2)
    curves: dict  # name -> list of (param, p1, p2)


def _trace_curves(fam: ScenarioFamily, nsamples: int = 201, ranges=None) -> dict:
    """Sample every bifurcation curve of the scenario on its parameter range."""
    curves: dict = {}
    (lo1, hi1), _ = ranges or fam.ranges

    def add(name, param, p1, p2):
        curves.setdefault(name, []).append((float(param), float(p1), float(p2)))

    if fam.name == "Cusp":
        for lam in np.linspace(1e-6, hi1, nsamples):
            cur = cusp_curves(fam, lam)
            for nm in ("Vbar", "Ibar", "Abar"):
                add(nm, lam, lam, cur[nm])
    elif fam.name == "TwoFold":
        for b in np.linspace(0.0, hi1, nsamples):
            add("gamma1", b, twofold_curves(fam, b)["gamma1"], b)
        for b in np.linspace(lo1, 0.0, nsamples):
            add("gamma2", b, b, twofold_curves(fam, b)["gamma2"])
    elif fam.name == "VIFoldFold":
        coeffs = fam.coeffs or {"kappa": 1.0, "dtilde": 2.0}
        syn = fam if fam.backend == "synthetic" else foldfold_family(**coeffs)
        for a in np.linspace(lo1, hi1, nsamples):
            cur = foldfold_curves(syn, a)
            for nm, val in sorted(cur.values.items()):
                add(nm, a, a, val)
    return curves


def sweep_diagram(
    fam: ScenarioFamily,
    n1: int,
    n2: int,
    ranges=None,
    curve_samples: int = 201,
) -> DiagramGrid:
    (lo1, hi1), (lo2, hi2) = ranges or fam.ranges
    p1s = np.linspace(lo1, hi1, n1) if n1 > 1 else np.array([lo1])
    p2s = np.linspace(lo2, hi2, n2) if n2 > 1 else np.array([lo2])
    cells = []
    for p1 in p1s:
        for p2 in p2s:
            try:
                cells.append(classify_parameter_point(fam, (p1, p2)))
            except Exception as e:  # recorded, never aborts the sweep
                cells.append(
                    RegionReport(
                        params=(float(p1), float(p2)),
                        item=None,
                        crossing_cycles=(),
                        polycycles=0,
                        sliding_cycles=(),
                        error=f"{type(e).__name__}: {e}",
                    )
                )
    curves = _trace_curves(fam, curve_samples, ranges)
    axes = (
        (fam.param_names[0], float(p1s[0]), float(p1s[-1]), len(p1s)),
        (fam.param_names[1], float(p2s[0]), float(p2s[-1]), len(p2s)),
    )
    return DiagramGrid(axes=axes, cells=tuple(cells), curves=curves)


SCENARIOS: dict[str, Callable[[], ScenarioFamily]] = {
    "cusp-synthetic": cusp_family,
    "twofold-synthetic": twofold_family,
    "vi-foldfold-synthetic": foldfold_family,
    "vi-foldfold-circle": circle_family,
}
