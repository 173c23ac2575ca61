"""Event-driven integration of the smooth pieces and the Filippov dynamics.

Everything here rides on DOP853 with dense output; Sigma hits, section
hits and grazing touches are localized by bracketing on the dense solution
followed by brentq to ~1e-12 in time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .core import (
    CLASSIFY_TOL,
    Crossing,
    FilippovSystem,
    FoldFold,
    PolyField,
    StableSliding,
    SwitchingFunction,
    Tangency,
    UnstableSliding,
    classify_sigma_point,
    lie_poly,
    sliding_field,
)
from .errors import DomainExit, NoHit, NonDeterministicExit, TangentialHit

INTEGRATOR_TOL = 1e-12
EVENT_TOL = 1e-10
MAX_FLIGHT_TIME = 100.0
_CHUNK = 4.0
_SAMPLES_PER_CHUNK = 600


@dataclass(frozen=True)
class Section:
    """Transversal segment with an arclength chart.

    Points are anchor + s * direction; the chart value of q is
    <q - anchor, direction>.  halfwidth None means the full line.
    """

    anchor: tuple[float, float]
    direction: tuple[float, float]
    halfwidth: float | None = 0.05

    def __post_init__(self) -> None:
        d = np.asarray(self.direction, dtype=float)
        n = float(np.hypot(*d))
        if n == 0:
            raise ValueError("zero section direction")
        object.__setattr__(self, "direction", (d[0] / n, d[1] / n))

    @property
    def normal(self) -> np.ndarray:
        dx, dy = self.direction
        return np.array([-dy, dx])

    def coord(self, q) -> float:
        d = np.asarray(self.direction)
        return float(np.dot(np.asarray(q) - np.asarray(self.anchor), d))

    def point_at(self, s: float) -> np.ndarray:
        return np.asarray(self.anchor) + s * np.asarray(self.direction)

    def offset(self, q) -> float:
        return float(np.dot(np.asarray(q) - np.asarray(self.anchor), self.normal))


def vertical_section(x0: float, y_anchor: float = 0.0, halfwidth=None) -> Section:
    """The line {x = x0} charted by y - y_anchor."""
    return Section(anchor=(x0, y_anchor), direction=(0.0, 1.0), halfwidth=halfwidth)


def _rhs(F: PolyField):
    def f(t, s):
        return (F.fx(s[0], s[1]), F.fy(s[0], s[1]))

    return f


def _solve(F: PolyField, p, t0: float, t1: float):
    sol = solve_ivp(
        _rhs(F),
        (t0, t1),
        np.asarray(p, dtype=float),
        method="DOP853",
        rtol=INTEGRATOR_TOL,
        atol=INTEGRATOR_TOL,
        dense_output=True,
    )
    if not sol.success:
        raise NoHit(f"integration failed: {sol.message}")
    return sol


def flow_smooth(F: PolyField, p, t: float, domain=None) -> np.ndarray:
    """phi_F(t; p) with local tolerance 1e-12."""
    if t == 0:
        return np.asarray(p, dtype=float)
    sol = _solve(F, p, 0.0, t)
    q = sol.y[:, -1]
    if domain is not None:
        xmin, xmax, ymin, ymax = domain
        ts = np.linspace(0.0, t, 200)
        pts = sol.sol(ts)
        inside = (
            (pts[0] >= xmin) & (pts[0] <= xmax) & (pts[1] >= ymin) & (pts[1] <= ymax)
        )
        if not inside.all():
            k = int(np.argmin(inside))
            raise DomainExit("trajectory left domain", point=pts[:, k], time=ts[k])
    return q


def _brentq(g, a, b):
    lo, hi = (a, b) if a < b else (b, a)
    return brentq(g, lo, hi, xtol=1e-14, rtol=8.9e-16)


def _first_root(g, ts):
    """First bracketed sign change of g on the sample times ts, or None."""
    vals = np.array([g(t) for t in ts])
    s = np.sign(vals)
    for k in range(len(ts) - 1):
        if s[k] != 0 and s[k + 1] != 0 and s[k] != s[k + 1]:
            return _brentq(g, ts[k], ts[k + 1])
        if s[k + 1] == 0:
            return ts[k + 1]
    return None


def hit_section(
    F: PolyField,
    p,
    section: Section,
    direction: str = "forward",
    tmax: float = MAX_FLIGHT_TIME,
):
    """First hit (q, tq) of the section in the given time direction."""
    sgn = 1.0 if direction == "forward" else -1.0
    t0 = 0.0
    nrm = section.normal
    chunk = _CHUNK
    while abs(t0) < tmax:
        t1 = t0 + sgn * min(chunk, tmax - abs(t0))
        # restart integration from scratch each chunk to keep dense output simple
        try:
            sol = _solve(F, p, 0.0, t1)
        except NoHit:
            # the orbit may blow up later in the chunk while the section hit
            # happens earlier; retry with a shorter horizon before giving up
            if chunk <= 1e-3:
                raise
            chunk /= 2.0
            continue
        ts = np.linspace(t0, t1, _SAMPLES_PER_CHUNK)

        def g(t):
            return float(np.dot(sol.sol(t) - np.asarray(section.anchor), nrm))

        # skip a root at t = 0 when starting exactly on the section
        if t0 == 0.0 and abs(g(0.0)) < EVENT_TOL:
            ts = ts[ts * sgn > 1e-9]
        troot = _first_root(g, ts)
        if troot is not None:
            q = sol.sol(troot)
            trans = float(np.dot(F(q), nrm))
            if abs(trans) < CLASSIFY_TOL:
                raise TangentialHit(f"grazes section at t = {troot:.6g}")
            if section.halfwidth is not None and abs(section.coord(q)) > section.halfwidth:
                # passed the section line outside the segment; keep looking
                t0 = troot + sgn * 1e-9
                continue
            return q, troot
        t0 = t1
    raise NoHit(f"no section hit within tmax = {tmax}")


@dataclass(frozen=True)
class SigmaHit:
    point: np.ndarray
    time: float
    kind: str  # "cross" | "touch"


def next_sigma_hit(
    F: PolyField,
    p,
    h: SwitchingFunction,
    direction: str = "forward",
    tmax: float = MAX_FLIGHT_TIME,
    include_touch: bool = False,
) -> SigmaHit:
    """Next intersection (or grazing touch) of the orbit with Sigma.

    Works when starting exactly on Sigma: the initial root is skipped by
    waiting for |h| to grow past the event tolerance.
    """
    sgn = 1.0 if direction == "forward" else -1.0
    hpoly = h.h
    fhpoly = lie_poly(F, hpoly, 1)
    t0 = 0.0
    escaped = abs(hpoly(p[0], p[1])) > EVENT_TOL
    ref_sign = np.sign(hpoly(p[0], p[1])) if escaped else 0.0
    if not escaped:
        fh0 = fhpoly(p[0], p[1])
        if abs(fh0) > CLASSIFY_TOL:
            # starting on Sigma transversally: the orbit leaves into the side
            # hdot points to; waiting for |h| to grow would miss a return
            # that happens before the first sample
            escaped = True
            ref_sign = np.sign(sgn * fh0)
    while abs(t0) < tmax:
        t1 = t0 + sgn * min(_CHUNK, tmax - abs(t0))
        sol = _solve(F, p, 0.0, t1)
        ts = np.linspace(t0, t1, _SAMPLES_PER_CHUNK)
        hv = np.array([hpoly(*sol.sol(t)) for t in ts])

        k0 = 0
        if not escaped:
            big = np.nonzero(np.abs(hv) > EVENT_TOL)[0]
            if big.size == 0:
                t0 = t1
                continue
            k0 = int(big[0])
            ref_sign = np.sign(hv[k0])
            escaped = True

        def hfun(t):
            return hpoly(*sol.sol(t))

        def fhfun(t):
            return fhpoly(*sol.sol(t))

        # A crossing (or a grazing dip entirely between two samples) forces
        # hdot = Fh to cross zero somewhere near it, and Fh varies on the
        # flow timescale, so bracketing h AND Fh on the sample grid finds
        # every Sigma interaction even when the dip is much shorter than
        # the sample spacing.
        fhv = np.array([fhpoly(*sol.sol(t)) for t in ts])
        for k in range(k0, len(ts) - 1):
            a, b = hv[k], hv[k + 1]
            if np.sign(a) != 0 and np.sign(b) != 0 and np.sign(a) != np.sign(b):
                troot = _brentq(hfun, ts[k], ts[k + 1])
                return SigmaHit(point=sol.sol(troot), time=troot, kind="cross")
            fa, fb = fhv[k], fhv[k + 1]
            if np.sign(fa) != 0 and np.sign(fa) != np.sign(fb):
                tm = _brentq(fhfun, ts[k], ts[k + 1])
                hm = hfun(tm)
                if np.sign(hm) != 0 and np.sign(hm) != ref_sign:
                    lo = ts[k] if np.sign(hv[k]) == ref_sign else ts[max(k0, k - 1)]
                    troot = _brentq(hfun, lo, tm)
                    return SigmaHit(point=sol.sol(troot), time=troot, kind="cross")
                if (
                    np.sign(hm) != 0
                    and np.sign(hv[k + 1]) != 0
                    and np.sign(hv[k + 1]) != np.sign(hm)
                ):
                    # dip entirely on the departure side ending in a crossing
                    # (start-on-Sigma orbits that return before the first sample)
                    troot = _brentq(hfun, tm, ts[k + 1])
                    return SigmaHit(point=sol.sol(troot), time=troot, kind="cross")
                if include_touch and abs(hm) < CLASSIFY_TOL and abs(tm) > 1e-9:
                    return SigmaHit(point=sol.sol(tm), time=tm, kind="touch")
        t0 = t1
    raise NoHit(f"no Sigma hit within tmax = {tmax}")


# -- full Filippov trajectories ------------------------------------------------


@dataclass
class Arc:
    regime: str  # "Mplus" | "Mminus" | "Sliding"
    ts: np.ndarray
    points: np.ndarray  # shape (N, 2)
    t0: float
    t1: float
    entry_event: str
    exit_event: str


@dataclass
class Trajectory:
    arcs: list[Arc] = field(default_factory=list)

    @property
    def end_point(self) -> np.ndarray:
        return self.arcs[-1].points[-1]

    @property
    def end_time(self) -> float:
        return self.arcs[-1].t1


def _sample_arc(sol, t0, t1, dt_out):
    n = max(2, int(np.ceil(abs(t1 - t0) / dt_out)) + 1)
    ts = np.linspace(t0, t1, n)
    pts = np.array([sol.sol(t) for t in ts])
    return ts, pts


def _starting_regime(Z: FilippovSystem, p) -> str:
    hv = Z.h.h(p[0], p[1])
    if hv > CLASSIFY_TOL:
        return "Mplus"
    if hv < -CLASSIFY_TOL:
        return "Mminus"
    cls = classify_sigma_point(Z, p)
    if isinstance(cls, Crossing):
        return "Mplus" if cls.direction > 0 else "Mminus"
    if isinstance(cls, StableSliding):
        return "Sliding"
    if isinstance(cls, Tangency):
        if cls.visibility == "visible" or cls.visibility == "odd":
            return "Mplus" if cls.side == "plus" else "Mminus"
        return "Mplus" if cls.side == "minus" else "Mminus"
    if isinstance(cls, FoldFold):
        if cls.kind in ("VI", "VV"):
            return "Mplus"
        return "Mminus"
    raise NonDeterministicExit(f"cannot start a forward orbit at {tuple(p)}: {cls}")


def _slide(Z: FilippovSystem, p, t_start, t_budget, dt_out):
    """Integrate the sliding field until a boundary tangency or time out."""
    Xh = lie_poly(Z.X, Z.h.h, 1)
    Yh = lie_poly(Z.Y, Z.h.h, 1)
    hx, hy = Z.h.h.dx(), Z.h.h.dy()

    def rhs(t, s):
        v = sliding_raw(s)
        # mild projection keeps the arc pinned to Sigma
        hval = Z.h.h(s[0], s[1])
        g = np.array([hx(s[0], s[1]), hy(s[0], s[1])])
        return v - 10.0 * hval * g

    def sliding_raw(s):
        xh, yh = Xh(s[0], s[1]), Yh(s[0], s[1])
        X = Z.X(s)
        Y = Z.Y(s)
        return (yh * X - xh * Y) / (yh - xh)

    sol = solve_ivp(
        rhs,
        (0.0, t_budget),
        np.asarray(p, dtype=float),
        method="DOP853",
        rtol=INTEGRATOR_TOL,
        atol=INTEGRATOR_TOL,
        dense_output=True,
    )
    tend = sol.t[-1]
    ts = np.linspace(0.0, tend, _SAMPLES_PER_CHUNK)

    def bnd(f):
        def g(t):
            q = sol.sol(t)
            return f(q[0], q[1])

        return g

    troot = None
    which = None
    for name, f in (("X", Xh), ("Y", Yh)):
        # include t = 0: a slide entering within a hair of the boundary must
        # exit immediately (exact-zero starts are skipped by _first_root)
        r = _first_root(bnd(f), ts)
        if r is not None and (troot is None or r < troot):
            troot, which = r, name
    if troot is None:
        return sol, tend, None
    return sol, troot, which


def filippov_trajectory(
    Z: FilippovSystem,
    p,
    tmax: float,
    dt_out: float = 0.01,
) -> Trajectory:
    """Forward Filippov orbit: smooth arcs alternating with sliding arcs.

    Crossing points switch fields, stable sliding follows the sliding
    field until a visible fold lets the orbit escape, grazing touches are
    recorded as events with integration continuing in the same region.
    """
    traj = Trajectory()
    t = 0.0
    point = np.asarray(p, dtype=float)
    regime = _starting_regime(Z, point)
    entry = "start"

    while t < tmax - 1e-12:
        budget = tmax - t
        if regime in ("Mplus", "Mminus"):
            F = Z.X if regime == "Mplus" else Z.Y
            try:
                hit = next_sigma_hit(
                    F, point, Z.h, "forward", tmax=budget, include_touch=True
                )
            except NoHit:
                sol = _solve(F, point, 0.0, budget)
                ts, pts = _sample_arc(sol, 0.0, budget, dt_out)
                traj.arcs.append(
                    Arc(regime, ts + t, pts, t, t + budget, entry, "time-out")
                )
                return traj
            sol = _solve(F, point, 0.0, hit.time)
            ts, pts = _sample_arc(sol, 0.0, hit.time, dt_out)
            if hit.kind == "touch":
                traj.arcs.append(
                    Arc(regime, ts + t, pts, t, t + hit.time, entry, "tangency-touch")
                )
                t += hit.time
                point = hit.point
                entry = "tangency-touch"
                # nudge along the flow so the touch is not re-found
                point = flow_smooth(F, point, 1e-8)
                t += 1e-8
                continue
            traj.arcs.append(Arc(regime, ts + t, pts, t, t + hit.time, entry, "cross"))
            t += hit.time
            point = hit.point
            cls = classify_sigma_point(Z, point)
            if isinstance(cls, Crossing):
                regime = "Mminus" if regime == "Mplus" else "Mplus"
                entry = "cross"
            elif isinstance(cls, StableSliding):
                regime = "Sliding"
                entry = "sliding-entry"
            elif isinstance(cls, Tangency):
                regime = "Mminus" if cls.side == "minus" else "Mplus"
                entry = "tangency"
            else:
                raise NonDeterministicExit(
                    f"orbit reached {type(cls).__name__} at {tuple(point)}"
                )
        else:  # Sliding
            sol, tslide, which = _slide(Z, point, t, budget, dt_out)
            ts, pts = _sample_arc(sol, 0.0, tslide, dt_out)
            exit_event = "time-out" if which is None else f"fold-exit-{which}"
            traj.arcs.append(
                Arc("Sliding", ts + t, pts, t, t + tslide, entry, exit_event)
            )
            t += tslide
            point = sol.sol(tslide)
            if which is None:
                return traj
            cls = classify_sigma_point(Z, point)
            if isinstance(cls, Tangency) and cls.visibility == "visible":
                regime = "Mplus" if cls.side == "plus" else "Mminus"
                entry = exit_event
                F = Z.X if regime == "Mplus" else Z.Y
                point = flow_smooth(F, point, 1e-8)
                t += 1e-8
            elif isinstance(cls, FoldFold) and cls.kind == "VV":
                raise NonDeterministicExit(
                    f"sliding reached a VV fold-fold at {tuple(point)}"
                )
            elif isinstance(cls, FoldFold) and cls.kind == "VI":
                regime = "Mplus"
                entry = exit_event
                point = flow_smooth(Z.X, point, 1e-8)
                t += 1e-8
            else:
                raise NonDeterministicExit(
                    f"sliding exit at {tuple(point)} is not a visible fold ({cls})"
                )
    return traj
