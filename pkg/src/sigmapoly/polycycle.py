"""Crossing systems for Sigma-polycycles and their solutions.

A k-leg model carries, per corner, the unstable-side transfer germ Tu, the
stable-side germ DTs (connection diffeomorphism already composed in), and
the admissible window sigma.  Crossing cycles are zeros of the cyclic
displacement Delta_i(x) = Tu_i(x_i) - DTs_i(x_{i+1}); a zero on the window
boundary is a polycycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EscapedAnnulus,
    NoConvergence,
    OutsideWindow,
    SingularJacobian,
)
from .maps import Germ

NEWTON_TOL = 1e-12
NEWTON_MAX_ITERS = 50
NEWTON_MAX_HALVINGS = 8
BOUNDARY_TOL = 1e-9
DEDUP_TOL = 1e-8
LATTICE_PER_WINDOW = 9


@dataclass(frozen=True)
class SyntheticLeg:
    """One corner of the model: transfer germs and the admissible window."""

    Tu: Germ
    DTs: Germ
    sigma: tuple[float, float]
    a: float = 0.0  # E-II shift: Tu is evaluated at u = x - 2a

    def delta(self, x: float, x_next: float) -> float:
        u = x - 2 * self.a
        return self.Tu(u) - self.DTs(x_next)

    def d_dx(self, x: float) -> float:
        return self.Tu.deriv(x - 2 * self.a)

    def d_dnext(self, x_next: float) -> float:
        return -self.DTs.deriv(x_next)


@dataclass(frozen=True)
class SyntheticModel:
    k: int
    legs: tuple[SyntheticLeg, ...]
    unfolding: dict = field(default_factory=dict)
    eII: bool = False

    def __post_init__(self):
        if self.k != len(self.legs):
            raise ValueError(f"k = {self.k} but {len(self.legs)} legs given")

    def displacement(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        return np.array(
            [leg.delta(xs[i], xs[(i + 1) % self.k]) for i, leg in enumerate(self.legs)]
        )

    def jacobian(self, xs: np.ndarray) -> np.ndarray:
        J = np.zeros((self.k, self.k))
        for i, leg in enumerate(self.legs):
            J[i, i] += leg.d_dx(xs[i])
            J[i, (i + 1) % self.k] += leg.d_dnext(xs[(i + 1) % self.k])
        return J

    def return_derivative(self, xs: np.ndarray) -> float:
        """dP/dx of the first-return map along the cycle: prod Tu'/DTs'."""
        num, den = 1.0, 1.0
        for i, leg in enumerate(self.legs):
            num *= leg.Tu.deriv(xs[i] - 2 * leg.a)
            den *= leg.DTs.deriv(xs[(i + 1) % self.k])
        if den == 0.0:
            return np.inf
        return num / den


# -- solver -------------------------------------------------------------------


@dataclass(frozen=True)
class CycleReport:
    point: tuple[float, ...]
    residual: float
    locus: str  # "interior" | "boundary" | "outside"
    kind: str  # "crossing-cycle" | "polycycle" | "outside"
    stability: str  # "attracting" | "repelling" | "semistable" | "unknown"
    dP: float
    saddle_node: bool = False
    flags: tuple[str, ...] = ()


def newton_solve(model: SyntheticModel, x0, require_window: bool = True) -> np.ndarray:
    """Damped Newton on the cyclic displacement system."""
    xs = np.array(x0, dtype=float)
    if xs.shape != (model.k,):
        raise ValueError(f"initial guess has shape {xs.shape}, expected ({model.k},)")
    span = max(hi - lo for lo, hi in (leg.sigma for leg in model.legs))
    for _ in range(NEWTON_MAX_ITERS):
        r = model.displacement(xs)
        J = model.jacobian(xs)
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as e:
            raise SingularJacobian(str(e)) from e
        lam = 1.0
        base = float(np.max(np.abs(r)))
        for _ in range(NEWTON_MAX_HALVINGS):
            trial = xs + lam * step
            if float(np.max(np.abs(model.displacement(trial)))) < base:
                break
            lam *= 0.5
        xs = xs + lam * step
        if float(np.max(np.abs(xs))) > 100 * max(span, 1.0):
            raise EscapedAnnulus(f"iterate escaped to {xs}")
        if (
            float(np.max(np.abs(model.displacement(xs)))) < NEWTON_TOL
            and float(np.max(np.abs(lam * step))) < NEWTON_TOL
        ):
            if require_window:
                _check_window(model, xs)
            return xs
    raise NoConvergence(f"no convergence from {x0} after {NEWTON_MAX_ITERS} iterations")


def _check_window(model: SyntheticModel, xs: np.ndarray) -> None:
    for i, leg in enumerate(model.legs):
        lo, hi = leg.sigma
        if not (lo - BOUNDARY_TOL <= xs[i] <= hi + BOUNDARY_TOL):
            raise OutsideWindow(
                f"coordinate {i}: {xs[i]} outside [{lo}, {hi}]"
            )


def _locus(model: SyntheticModel, xs: np.ndarray) -> str:
    on_boundary = False
    for i, leg in enumerate(model.legs):
        lo, hi = leg.sigma
        if xs[i] < lo - BOUNDARY_TOL or xs[i] > hi + BOUNDARY_TOL:
            return "outside"
        if min(abs(xs[i] - lo), abs(xs[i] - hi)) <= BOUNDARY_TOL:
            on_boundary = True
    return "boundary" if on_boundary else "interior"


def classify_solution(model: SyntheticModel, xs) -> CycleReport:
    xs = np.asarray(xs, dtype=float)
    residual = float(np.max(np.abs(model.displacement(xs))))
    locus = _locus(model, xs)
    dP = model.return_derivative(xs)
    J = model.jacobian(xs)
    saddle_node = abs(float(np.linalg.det(J))) < 1e-7
    flags = tuple()
    if locus == "outside":
        kind, stability = "outside", "unknown"
    elif locus == "boundary":
        kind, stability = "polycycle", "unknown"
    else:
        kind = "crossing-cycle"
        if saddle_node or abs(abs(dP) - 1.0) < 1e-7:
            stability = "semistable"
        elif abs(dP) < 1.0:
            stability = "attracting"
        else:
            stability = "repelling"
    return CycleReport(
        point=tuple(float(v) for v in xs),
        residual=residual,
        locus=locus,
        kind=kind,
        stability=stability,
        dP=float(dP),
        saddle_node=saddle_node,
        flags=flags,
    )


def _lattice(model: SyntheticModel) -> list[np.ndarray]:
    axes = []
    for leg in model.legs:
        lo, hi = leg.sigma
        pad = 1e-6 * max(hi - lo, 1e-6)
        axes.append(np.linspace(lo + pad, hi - pad, LATTICE_PER_WINDOW))
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    return [pts[i] for i in range(pts.shape[0])]


def find_cycles(model: SyntheticModel, guesses=None) -> list[CycleReport]:
    """Multistart Newton over a lattice on the windows; deduplicated reports."""
    sols: list[np.ndarray] = []
    for g in guesses if guesses is not None else _lattice(model):
        try:
            xs = newton_solve(model, g, require_window=False)
        except (NoConvergence, SingularJacobian, EscapedAnnulus):
            continue
        if any(np.max(np.abs(xs - s)) < DEDUP_TOL for s in sols):
            continue
        sols.append(xs)
    reports = [classify_solution(model, xs) for xs in sols]
    reports.sort(key=lambda r: r.point)
    return reports


# -- first-return maps --------------------------------------------------------


def first_return(model: SyntheticModel, x: float, max_newton: int = 60) -> float:
    """P(x) = DTs^{-1}(Tu(x)) for a one-leg model."""
    if model.k != 1:
        raise ValueError("first_return is defined for k = 1 models")
    leg = model.legs[0]
    target = leg.Tu(x - 2 * leg.a)
    # invert DTs by Newton seeded at x
    y = x
    for _ in range(max_newton):
        r = leg.DTs(y) - target
        d = leg.DTs.deriv(y)
        if d == 0.0:
            raise SingularJacobian("DTs' vanished while inverting")
        y -= r / d
        if abs(r) < 1e-14:
            break
    else:
        raise NoConvergence(f"could not invert DTs at x = {x}")
    return y


def normal_form_model(
    kappa: float,
    dtilde: float,
    n: int,
    lam: tuple[float, ...] = (),
    sigma: tuple[float, float] = (-0.3, 0.0),
    a: float = 0.0,
    eII: bool = False,
) -> SyntheticModel:
    """One-leg model Tu(x) = lam_0 + ... + kappa x^n, DTs(x) = dtilde x."""
    coeffs = list(lam) + [0.0] * (n + 1 - len(lam))
    coeffs[n] = kappa
    Tu = Germ(base=0.0, coeffs=tuple(coeffs), window=max(abs(sigma[0]), abs(sigma[1])))
    DTs = Germ(base=0.0, coeffs=(0.0, dtilde), window=Tu.window)
    leg = SyntheticLeg(Tu=Tu, DTs=DTs, sigma=sigma, a=a)
    return SyntheticModel(k=1, legs=(leg,), unfolding={}, eII=eII)
