"""Transition maps, mirror maps, transfer pairs, and their polynomial germs.

Near an n-order contact the transition map to a transversal section has the
germ lambda_0 + lambda_1 x + ... + kappa x^n; this module extracts such
germs numerically (least squares on Chebyshev abscissae) and builds the
transfer pairs (cases O, E-I, E-II) feeding the crossing systems.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .core import (
    CLASSIFY_TOL,
    CONTACT_ORDER_CAP,
    FilippovSystem,
    FoldFold,
    PolyField,
    SwitchingFunction,
    Tangency,
    classify_sigma_point,
    contact_order,
    lie_poly,
)
from .errors import (
    IllConditioned,
    InExclusionSet,
    NoHit,
    NoReturn,
    OrbitHitsSliding,
    UnsupportedSingularity,
    WindowTooSmall,
)
from .flow import MAX_FLIGHT_TIME, Section, hit_section, next_sigma_hit

GERM_COND_CAP = 1e10
SEPARATRIX_DISTANCE = 0.1
SECTION_HALFWIDTH = 0.05


# -- germs --------------------------------------------------------------------


@dataclass(frozen=True)
class Germ:
    """Truncated polynomial c0 + c1 u + ... + cn u^n in u = x - base."""

    base: float
    coeffs: tuple[float, ...]
    residual: float = 0.0
    window: float = 0.0
    chart: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lam0(self) -> float:
        return self.coeffs[0]

    @property
    def kappa(self) -> float:
        return self.coeffs[-1]

    @property
    def ctilde(self) -> float:
        return self.coeffs[0]

    @property
    def dtilde(self) -> float:
        return self.coeffs[-1]

    def lam(self, i: int) -> float:
        return self.coeffs[i]

    def __call__(self, x: float) -> float:
        u = x - self.base
        return float(np.polynomial.polynomial.polyval(u, self.coeffs))

    def deriv(self, x: float) -> float:
        u = x - self.base
        dcoeffs = np.polynomial.polynomial.polyder(np.asarray(self.coeffs))
        return float(np.polynomial.polynomial.polyval(u, dcoeffs))

    def high_confidence(self) -> bool:
        return self.residual <= 1e-7 * max(self.window, 1e-12) ** self.degree

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "coeffs": list(self.coeffs),
            "residual": self.residual,
            "window": self.window,
            "chart": dict(self.chart),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Germ":
        return cls(
            base=float(d["base"]),
            coeffs=tuple(float(c) for c in d["coeffs"]),
            residual=float(d.get("residual", 0.0)),
            window=float(d.get("window", 0.0)),
            chart=dict(d.get("chart", {})),
        )


def cheb_nodes(base: float, halfwidth: float, m: int) -> np.ndarray:
    """m Chebyshev abscissae on [base - halfwidth, base + halfwidth]."""
    k = np.arange(m)
    return base + halfwidth * np.cos((2 * k + 1) * np.pi / (2 * m))


def fit_germ(samples, base: float, degree: int, chart: dict | None = None) -> Germ:
    """Least-squares polynomial fit about base on a scaled Vandermonde basis."""
    xs = np.array([s[0] for s in samples], dtype=float)
    ys = np.array([s[1] for s in samples], dtype=float)
    if len(xs) < 2 * (degree + 1):
        raise WindowTooSmall(
            f"need >= {2 * (degree + 1)} samples for degree {degree}, got {len(xs)}"
        )
    w = float(np.max(np.abs(xs - base)))
    if w <= 0:
        raise WindowTooSmall("all samples coincide with the base point")
    u = (xs - base) / w
    V = np.vander(u, degree + 1, increasing=True)
    cond = np.linalg.cond(V)
    if cond > GERM_COND_CAP:
        raise IllConditioned(f"Vandermonde condition estimate {cond:.3e}")
    sol, *_ = np.linalg.lstsq(V, ys, rcond=None)
    residual = float(np.max(np.abs(V @ sol - ys)))
    coeffs = tuple(float(c) / w**j for j, c in enumerate(sol))
    return Germ(
        base=base,
        coeffs=coeffs,
        residual=residual,
        window=w,
        chart=chart or {},
    )


# -- Sigma parametrization --------------------------------------------------


def sigma_point(h: SwitchingFunction, x: float, y_guess: float = 0.0) -> np.ndarray:
    """Point of Sigma over abscissa x (Newton on y; exact when h = y)."""
    hy = h.h.dy()
    y = y_guess
    for _ in range(50):
        val = h.h(x, y)
        if abs(val) < 1e-14:
            break
        d = hy(x, y)
        if abs(d) < CLASSIFY_TOL:
            raise NoHit(f"Sigma is not a graph over x = {x}")
        y -= val / d
    return np.array([x, y])


# -- transition maps -------------------------------------------------------


def transition_map(
    F: PolyField,
    h: SwitchingFunction,
    tau: Section,
    x: float,
    direction: str = "forward",
    tmax: float = MAX_FLIGHT_TIME,
) -> float:
    """Chart value on tau of the orbit through the Sigma point over x."""
    p = sigma_point(h, x)
    q, _ = hit_section(F, p, tau, direction=direction, tmax=tmax)
    return tau.coord(q)


def transition_germ(
    F: PolyField,
    h: SwitchingFunction,
    tau: Section,
    base: float,
    degree: int,
    window: float,
    direction: str = "forward",
    nsamples: int | None = None,
    domain=None,
) -> Germ:
    m = nsamples or max(2 * (degree + 1), 12)
    xs = cheb_nodes(base, window, m)
    if domain is not None:
        lo, hi = domain
        xs = xs[(xs >= lo) & (xs <= hi)]
        xs = np.concatenate([xs, np.linspace(lo, hi, m)])
    samples = [(x, transition_map(F, h, tau, x, direction)) for x in xs]
    chart = {
        "anchor": list(tau.anchor),
        "direction": list(tau.direction),
        "flow_direction": direction,
    }
    return fit_germ(samples, base, degree, chart)


def place_section(
    F: PolyField,
    p0,
    distance: float = SEPARATRIX_DISTANCE,
    direction: str = "forward",
    halfwidth: float = SECTION_HALFWIDTH,
    orientation: str = "left",
) -> Section:
    """Transversal section a flow-distance along the separatrix from p0.

    Oriented by the left (or right) normal of the field, so polycycle
    charts keep the enclosed region on a fixed side.
    """
    from .flow import flow_smooth

    sgn = 1.0 if direction == "forward" else -1.0
    # crude arclength parametrization: step until path length reaches distance
    t, step = 0.0, distance / 50.0
    q = np.asarray(p0, dtype=float)
    length = 0.0
    while length < distance:
        speed = float(np.hypot(*F(q)))
        dt = step / max(speed, 1e-9)
        q2 = flow_smooth(F, q, sgn * dt)
        length += float(np.hypot(*(q2 - q)))
        q = q2
        t += dt
    v = F(q)
    v = v / np.hypot(*v)
    nrm = np.array([-v[1], v[0]]) if orientation == "left" else np.array([v[1], -v[0]])
    return Section(anchor=(q[0], q[1]), direction=(nrm[0], nrm[1]), halfwidth=halfwidth)


# -- sigma domains ----------------------------------------------------------


def _arc_stays_in_half_plane(
    F: PolyField, h: SwitchingFunction, tau: Section, x: float, side: int
) -> bool:
    """Does the arc from the Sigma point over x to tau stay in {side*h >= 0}?"""
    from .flow import _solve

    p = sigma_point(h, x)
    fh = lie_poly(F, h.h, 1)(p[0], p[1])
    if side * fh < -CLASSIFY_TOL:
        return False  # the arc leaves Sigma into the wrong half-plane
    try:
        q, tq = hit_section(F, p, tau, direction="forward")
    except NoHit:
        return False
    sol = _solve(F, p, 0.0, tq)
    ts = np.linspace(0.0, tq, 400)
    hv = side * np.array([h.h(*sol.sol(t)) for t in ts])
    depth = float(np.min(hv))
    # shallow dips near an interior tangency can be narrower than the sample
    # spacing; polish every interior local minimum before judging it
    for k in range(1, len(ts) - 1):
        if hv[k] <= hv[k - 1] and hv[k] <= hv[k + 1]:
            res = minimize_scalar(
                lambda t: side * h.h(*sol.sol(t)),
                bounds=(ts[k - 1], ts[k + 1]),
                method="bounded",
                options={"xatol": 1e-12},
            )
            depth = min(depth, float(res.fun))
    return bool(depth >= -1e-9)


def sigma_domain(
    F: PolyField,
    h: SwitchingFunction,
    p0,
    tau: Section,
    window: float,
    side: int = 1,
    nsamples: int = 41,
) -> list[tuple[float, float]]:
    """Subset of (x0-window, x0+window) whose arcs to tau stay in the half-plane.

    Returns a list of closed-ish intervals; boundaries refined by bisection.
    """
    x0 = float(p0[0])
    xs = np.linspace(x0 - window, x0 + window, nsamples)
    ok = np.array(
        [_arc_stays_in_half_plane(F, h, tau, x, side) for x in xs], dtype=bool
    )
    intervals = []
    k = 0
    while k < len(xs):
        if not ok[k]:
            k += 1
            continue
        j = k
        while j + 1 < len(xs) and ok[j + 1]:
            j += 1
        lo, hi = xs[k], xs[j]
        if k > 0 and not ok[k - 1]:
            lo = _bisect_edge(F, h, tau, xs[k - 1], xs[k], side)
        if j + 1 < len(xs) and not ok[j + 1]:
            hi = _bisect_edge(F, h, tau, xs[j + 1], xs[j], side)
        intervals.append((float(lo), float(hi)))
        k = j + 1
    return intervals


def _bisect_edge(F, h, tau, bad, good, side, iters=40):
    for _ in range(iters):
        mid = 0.5 * (bad + good)
        if _arc_stays_in_half_plane(F, h, tau, mid, side):
            good = mid
        else:
            bad = mid
        if abs(good - bad) < 1e-11:
            break
    return good


# -- mirror maps --------------------------------------------------------------


def sigma_contacts(
    F: PolyField, h: SwitchingFunction, window: tuple[float, float], nscan: int = 400
) -> list[tuple[float, int, int]]:
    """Contacts of F with Sigma on the window: (x, order, lead sign).

    Roots of Fh restricted to Sigma found by scan + brentq (exact
    polynomial restriction when h = y).
    """
    fh = lie_poly(F, h.h, 1)

    def g(x):
        p = sigma_point(h, x)
        return fh(p[0], p[1])

    lo, hi = window
    xs = np.linspace(lo, hi, nscan)
    vals = np.array([g(x) for x in xs])
    roots = []
    for k in range(nscan - 1):
        if np.sign(vals[k]) != 0 and np.sign(vals[k]) != np.sign(vals[k + 1]):
            roots.append(brentq(g, xs[k], xs[k + 1], xtol=1e-14))
        elif vals[k] == 0.0:
            roots.append(xs[k])
    out = []
    for r in roots:
        p = sigma_point(h, r)
        n, s = contact_order(F, h, p)
        out.append((float(r), n, s))
    return out


def exclusion_set(
    F: PolyField,
    h: SwitchingFunction,
    window: tuple[float, float],
    side: int = -1,
) -> list[float]:
    """Points where the mirror map is refused.

    Clause (i): visible even contacts and odd contacts (no arc on the
    mirror side).  Clause (ii): Sigma-intersections of the orbits through
    those contacts (their arc terminates at the contact).
    """
    excluded: list[float] = []
    for x, n, s in sigma_contacts(F, h, window):
        arc_side = 1 if s > 0 else -1  # side the tangent arc occupies
        visible_for_mirror = n % 2 == 0 and arc_side != side
        if n % 2 == 1 or visible_for_mirror:
            excluded.append(x)
            p = sigma_point(h, x)
            for direction in ("forward", "backward"):
                try:
                    hit = next_sigma_hit(F, p, h, direction, tmax=20.0, include_touch=True)
                except NoHit:
                    continue
                q = hit.point
                if window[0] <= q[0] <= window[1]:
                    excluded.append(float(q[0]))
    return sorted(set(excluded))


def mirror_map(
    F: PolyField,
    h: SwitchingFunction,
    x: float,
    side: int = -1,
    exclusions: list[float] | None = None,
    tmax: float = MAX_FLIGHT_TIME,
) -> float:
    """Other Sigma-intersection of the orbit arc through x on the given side.

    side = -1: arcs in the closed lower half-plane {h <= 0}; +1: upper.
    Fixed points are the invisible even contacts.  Points at (or orbitally
    connected to) visible even contacts or odd contacts are refused.
    """
    if exclusions:
        for e in exclusions:
            if abs(x - e) < 1e-9:
                raise InExclusionSet(f"x = {x} is excluded (contact at {e})")
    p = sigma_point(h, x)
    fh = lie_poly(F, h.h, 1)(p[0], p[1])
    if abs(fh) <= CLASSIFY_TOL:
        n, s = contact_order(F, h, p)
        arc_side = 1 if s > 0 else -1
        if n % 2 == 0 and arc_side == side:
            return x  # invisible even contact: fixed point of the involution
        raise InExclusionSet(
            f"x = {x} is a contact of order {n} with no arc on side {side}"
        )
    # pick the time direction whose orbit enters {side*h > 0}: hdot = Fh
    direction = "forward" if side * fh > 0 else "backward"
    try:
        hit = next_sigma_hit(F, p, h, direction, tmax=tmax, include_touch=True)
    except NoHit as e:
        raise NoReturn(str(e)) from e
    return float(hit.point[0])


# -- transfer pairs ---------------------------------------------------------


@dataclass(frozen=True)
class TransferPair:
    Tu: Germ
    Ts: Germ
    sigma: tuple[tuple[float, float], ...]
    case_tag: str  # "O" | "EI" | "EII"
    excluded: tuple[float, ...] = ()
    alpha: float = 0.0  # E-II: chart coordinate of the Y-fold


@dataclass(frozen=True)
class SectionConfig:
    tau_u: Section | None = None
    tau_s: Section | None = None
    distance: float = SEPARATRIX_DISTANCE
    halfwidth: float = SECTION_HALFWIDTH
    window: float = 0.05
    degree: int | None = None
    orientation: str = "left"
    same_side: bool = False  # force the R1 / E-I construction


def transfer_pair(
    Z: FilippovSystem, p, cfg: SectionConfig | None = None
) -> TransferPair:
    """Transfer functions at a Sigma-singularity.

    Regular-tangential points with both separatrices on the polycycle use
    case O; the R1 geometry uses E-I; a VI fold-fold uses E-II with
    Tu = T+^X o rho_Y.
    """
    cfg = cfg or SectionConfig()
    cls = classify_sigma_point(Z, p)
    if isinstance(cls, Tangency):
        if cfg.same_side:
            return _transfer_ei(Z, p, cls, cfg)
        return _transfer_o(Z, p, cls, cfg)
    if isinstance(cls, FoldFold):
        if cls.kind != "VI":
            raise UnsupportedSingularity(f"fold-fold of kind {cls.kind}")
        return _transfer_eii(Z, p, cfg)
    raise UnsupportedSingularity(f"{type(cls).__name__} at {tuple(p)}")


def _transfer_o(Z, p, cls: Tangency, cfg: SectionConfig) -> TransferPair:
    F = Z.X if cls.side == "plus" else Z.Y
    G = Z.Y if cls.side == "plus" else Z.X
    tau_u = cfg.tau_u or place_section(F, p, cfg.distance, "forward", cfg.halfwidth, cfg.orientation)
    tau_s = cfg.tau_s or place_section(F, p, cfg.distance, "backward", cfg.halfwidth, cfg.orientation)
    n = cls.order
    deg = cfg.degree or n
    Tu = transition_germ(F, Z.h, tau_u, float(p[0]), deg, cfg.window, "forward")
    Ts = transition_germ(G, Z.h, tau_s, float(p[0]), 1, cfg.window, "backward")
    side = 1 if cls.side == "plus" else -1
    sig = sigma_domain(F, Z.h, p, tau_u, cfg.window, side=side)
    return TransferPair(Tu=Tu, Ts=Ts, sigma=tuple(sig), case_tag="O")


def _transfer_ei(Z, p, cls: Tangency, cfg: SectionConfig) -> TransferPair:
    F = Z.X if cls.side == "plus" else Z.Y
    tau_u = cfg.tau_u or place_section(F, p, cfg.distance, "forward", cfg.halfwidth, cfg.orientation)
    tau_s = cfg.tau_s or place_section(F, p, cfg.distance, "backward", cfg.halfwidth, cfg.orientation)
    # sigma is a transversal segment over p: chart by height above Sigma
    sgn = 1.0 if cls.side == "plus" else -1.0
    sigma_sec = Section(anchor=(float(p[0]), float(p[1])), direction=(0.0, sgn), halfwidth=cfg.window)
    xs = cheb_nodes(cfg.window / 2, cfg.window / 2 * 0.9, 14)
    tu, ts = [], []
    for s in xs:
        q0 = sigma_sec.point_at(s)
        qu, _ = hit_section(F, q0, tau_u, "forward")
        qs, _ = hit_section(F, q0, tau_s, "backward")
        tu.append((s, tau_u.coord(qu)))
        ts.append((s, tau_s.coord(qs)))
    Tu = fit_germ(tu, 0.0, 1)
    Ts = fit_germ(ts, 0.0, 1)
    return TransferPair(
        Tu=Tu, Ts=Ts, sigma=((0.0, cfg.window),), case_tag="EI"
    )


def _flip_if_concave(g: Germ) -> Germ:
    if g.coeffs[-1] >= 0:
        return g
    chart = dict(g.chart)
    chart["flipped"] = True
    return Germ(
        base=g.base,
        coeffs=tuple(-c for c in g.coeffs),
        residual=g.residual,
        window=g.window,
        chart=chart,
    )


def _transfer_eii(Z, p, cfg: SectionConfig) -> TransferPair:
    # X has the visible fold at p, Y the invisible one nearby.
    tau_u = cfg.tau_u or place_section(Z.X, p, cfg.distance, "forward", cfg.halfwidth, cfg.orientation)
    tau_s = cfg.tau_s or place_section(Z.X, p, cfg.distance, "backward", cfg.halfwidth, cfg.orientation)
    x0 = float(p[0])
    contacts = sigma_contacts(Z.Y, Z.h, (x0 - 4 * cfg.window, x0 + 4 * cfg.window))
    if not contacts:
        raise UnsupportedSingularity("no Y-fold near the X-fold")
    alpha = min((c[0] for c in contacts), key=lambda c: abs(c - x0))
    excluded = tuple(
        exclusion_set(Z.Y, Z.h, (x0 - 4 * cfg.window, x0 + 4 * cfg.window), side=-1)
    )

    def tu_value(x: float) -> float:
        r = mirror_map(Z.Y, Z.h, x, side=-1)
        return transition_map(Z.X, Z.h, tau_u, r, "forward")

    zeta = min(0.0, 2 * alpha - x0) + x0  # crossing boundary: min(x0, 2*alpha - x0)
    lo, hi = x0 - cfg.window, zeta
    if hi <= lo:
        raise WindowTooSmall("empty crossing window left of the fold")
    xs = np.linspace(lo, hi - 1e-6 * (hi - lo), 14)
    Tu = fit_germ([(x, tu_value(x)) for x in xs], x0, 2)
    Ts = transition_germ(
        Z.X, Z.h, tau_s, x0, 2, cfg.window, "backward", domain=(lo, hi)
    )
    # VI convention: charts oriented so both quadratic coefficients are
    # positive (flipping a section chart negates its germ values)
    Tu = _flip_if_concave(Tu)
    Ts = _flip_if_concave(Ts)
    return TransferPair(
        Tu=Tu,
        Ts=Ts,
        sigma=((lo, hi),),
        case_tag="EII",
        excluded=excluded,
        alpha=float(alpha),
    )


# -- connection diffeomorphisms ------------------------------------------------


def connection_diffeo(
    Z: FilippovSystem,
    tau_from: Section,
    tau_to: Section,
    y: float,
    tmax: float = MAX_FLIGHT_TIME,
) -> float:
    """Chart value on tau_to of the regular Z-orbit from tau_from at chart y.

    The orbit may cross Sigma (in the crossing region only); hitting a
    sliding point is an error.
    """
    from .core import Crossing, StableSliding, UnstableSliding

    point = tau_from.point_at(y)
    t_used = 0.0
    for _ in range(64):
        hv = Z.h.h(point[0], point[1])
        F = Z.X if hv >= 0 else Z.Y
        try:
            q, tq = hit_section(F, point, tau_to, "forward", tmax=tmax - t_used)
        except NoHit:
            tq = None
        try:
            hit = next_sigma_hit(F, point, Z.h, "forward", tmax=tmax - t_used)
        except NoHit:
            hit = None
        if tq is not None and (hit is None or tq <= hit.time):
            return tau_to.coord(q)
        if hit is None:
            raise NoHit("orbit reaches neither the target section nor Sigma")
        cls = classify_sigma_point(Z, hit.point)
        if isinstance(cls, (StableSliding, UnstableSliding)):
            raise OrbitHitsSliding(f"connection hits sliding at {tuple(hit.point)}")
        if not isinstance(cls, Crossing):
            raise OrbitHitsSliding(f"connection hits {type(cls).__name__}")
        point = hit.point
        t_used += hit.time
        # nudge into the other region
        G = Z.Y if hv >= 0 else Z.X
        from .flow import flow_smooth

        point = flow_smooth(G, point, 1e-9)
    raise NoHit("too many Sigma crossings between sections")
