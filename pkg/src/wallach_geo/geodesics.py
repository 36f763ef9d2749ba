"""Closed-form geodesics, the geodesic-defect functional and the
restriction system that singles out the admissible diagonal metrics.

A three-factor curve exp(tX)exp(tY)exp(tZ).o is a geodesic iff the defect

    G_W(t) = <(TX)_m + (TY)_m + Z_m, [W, TX+TY+Z]_m>
           + <W, [TX, TY+Z]_m + [TY, Z]_m>

vanishes for every W in m and every t, where T(t) = Ad(exp(-tZ)exp(-tY)).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .catalog import ReductiveDecomposition, TwoSummandView
from .core import (
    AlgebraElement,
    GenericityError,
    HypothesisViolatedError,
    InvalidMetricError,
    WrongModuleError,
    project,
)
from .curves import ProductExpCurve, twist
from .metrics import DiagonalMetric

_MODULES = ("m1", "m2", "m3")


@dataclass
class GeodesicReport:
    """Grid-sampled defect statistics with a tolerance-based verdict."""

    space: str
    metric: tuple
    curve: str
    t_grid: list
    max_abs_gw: float
    max_defect_norm: float
    max_coset_dist: float
    tolerances: dict
    notes: list = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return (
            self.max_abs_gw <= self.tolerances["gw"]
            and self.max_defect_norm <= self.tolerances["defect"]
            and self.max_coset_dist <= self.tolerances["coset"]
        )


def gw_defect_all(curve: ProductExpCurve, g: DiagonalMetric, t: float) -> np.ndarray:
    """G_W(t) for every m-basis vector W at once (vector over m indices)."""
    fX, fY, fZ = curve.padded3()
    ctx = curve.context
    T = twist(fY, fZ, t)
    Tx, Ty, z = T @ fX.coeffs, T @ fY.coeffs, fZ.coeffs
    s = Tx + Ty + z
    c = ctx.structure_constants
    mi = g.m_indices
    gs = g.gram_full @ s
    # term 1 per basis W: <s_m, [e_w, s]_m>; [e_w, s] coefficients = c[w, j, :] s_j
    term1 = np.einsum("wjk,j,k->w", c[mi], s, gs)
    d = np.einsum("i,ijk,j->k", Tx, c, Ty + z) + np.einsum("i,ijk,j->k", Ty, c, z)
    term2 = (g.gram_full @ d)[mi]
    return term1 + term2


def gw_defect(curve: ProductExpCurve, g: DiagonalMetric, W: AlgebraElement, t: float) -> float:
    """The defect G_W(t) for a single direction W (projected to m if needed)."""
    fX, fY, fZ = curve.padded3()
    ctx = curve.context
    Wm = project(W, "m")
    if np.abs(W.coeffs - Wm.coeffs).max() > 1e-14 * max(1.0, np.abs(W.coeffs).max()):
        warnings.warn("gw_defect: W had a k-component; projected to m", stacklevel=2)
    T = twist(fY, fZ, t)
    Tx, Ty, z = T @ fX.coeffs, T @ fY.coeffs, fZ.coeffs
    s = Tx + Ty + z
    c = ctx.structure_constants
    ws = np.einsum("i,ijk,j->k", Wm.coeffs, c, s)  # [W, s]
    d = np.einsum("i,ijk,j->k", Tx, c, Ty + z) + np.einsum("i,ijk,j->k", Ty, c, z)
    return g.inner_coeffs(s, ws) + g.inner_coeffs(Wm.coeffs, d)


def _require_module(dec: ReductiveDecomposition, X: AlgebraElement, part: str) -> None:
    out = np.abs(X.coeffs * (1.0 - dec.part_masks[part])).max()
    if out > 1e-10 * max(1.0, np.abs(X.coeffs).max()):
        raise WrongModuleError(f"vector is not in {part} (outside component {out:.3e})")


_CASE_LAMBDAS = {1: lambda c: (1.0, 1.0, c), 2: lambda c: (1.0, c, 1.0), 3: lambda c: (c, 1.0, 1.0)}
_CASE_MOVING = {1: "m3", 2: "m2", 3: "m1"}


def closed_form_geodesic(
    dec: ReductiveDecomposition,
    case: int,
    X1: AlgebraElement,
    X2: AlgebraElement,
    X3: AlgebraElement,
    c: float,
):
    """The two-factor geodesic through o with initial velocity X1+X2+X3.

    case 1: metric (1,1,c), factors (X1+X2+cX3, (1-c)X3);
    case 2: metric (1,c,1), factors (X1+cX2+X3, (1-c)X2);
    case 3: metric (c,1,1), factors (cX1+X2+X3, (1-c)X1).
    """
    if c <= 0:
        raise InvalidMetricError(f"c must be positive, got {c}")
    if case not in (1, 2, 3):
        raise ValueError("case must be 1, 2 or 3")
    for X, part in zip((X1, X2, X3), _MODULES):
        _require_module(dec, X, part)
    moving = {1: X3, 2: X2, 3: X1}[case]
    others = sum(
        (X for X in (X1, X2, X3) if X is not moving), dec.context.zero()
    )
    curve = ProductExpCurve(dec, [others + c * moving, (1.0 - c) * moving])
    metric = DiagonalMetric(dec, _CASE_LAMBDAS[case](c))
    return curve, metric


def dohira_geodesic(view: TwoSummandView, c: float, X1: AlgebraElement, X2: AlgebraElement):
    """Two-summand geodesic on the grouped view: metric (1, c) on (M1, M2),
    factors (X1 + cX2, (1-c)X2)."""
    if c <= 0:
        raise InvalidMetricError(f"c must be positive, got {c}")
    if not view.in_M1(X1):
        raise WrongModuleError("X1 is not in M1")
    if not view.in_M2(X2):
        raise WrongModuleError("X2 is not in M2")
    dec = view.parent
    lambdas = [c if f"m{q}" == view.M2_part else 1.0 for q in (1, 2, 3)]
    curve = ProductExpCurve(dec, [X1 + c * X2, (1.0 - c) * X2])
    return curve, DiagonalMetric(dec, lambdas)


def homogeneous_geodesic(
    dec: ReductiveDecomposition, g: DiagonalMetric, X: AlgebraElement
) -> ProductExpCurve:
    """Single-exponential geodesic exp(tX).o, certified by the commuting
    module pair hypothesis (valid for every diagonal metric)."""
    if not dec.commuting_pairs:
        raise HypothesisViolatedError(
            f"{dec.name}: no commuting module pair; exp(tX).o is not certified "
            "as a geodesic for arbitrary diagonal metrics"
        )
    _require_module(dec, X, "m")
    return ProductExpCurve(dec, [X])


@dataclass
class RestrictionSolution:
    """A point of one solution family of the geodesic restriction system."""

    family: str
    a: tuple
    b: tuple
    lambda2: float
    lambda3: float
    free: dict

    @property
    def c(self) -> tuple:
        return tuple(1.0 - ai - bi for ai, bi in zip(self.a, self.b))

    def params(self) -> np.ndarray:
        return np.array(self.a + self.b)


def restriction_residual(sol, lambda2: float, lambda3: float) -> np.ndarray:
    """Signed residuals (LHS - RHS) of the nine restriction equations
    characterizing G_W(0) = 0 and dG_W/dt(0) = 0."""
    if lambda2 <= 0 or lambda3 <= 0:
        raise InvalidMetricError("lambda2 and lambda3 must be positive")
    if isinstance(sol, RestrictionSolution):
        p = sol.params()
    else:
        p = np.asarray(sol, dtype=np.float64)
    a1, a2, a3, b1, b2, b3 = p
    l2, l3 = lambda2, lambda3
    r = np.empty(9)
    r[0] = a3 - a2 + b3 - b2 + b2 * a3 - b3 * a2 - (l2 - l3)
    r[1] = a3 - a1 + b3 - b1 + b1 * a3 - b3 * a1 - (1 - l3) / l2
    r[2] = a2 - a1 + b2 - b1 + b1 * a2 - b2 * a1 - (1 - l2) / l3
    r[3] = (
        (1 - l2) * b2 + 2 * (1 - l2) * a2 + l3 * b2 * a1 - l3 * b2 * a2
        - l3 * a2**2 + l3 * a1 * a2 - (l3 - l2) * (1 - l2)
    )
    r[4] = (
        (1 - l3) * b3 + 2 * (1 - l3) * a3 + l2 * b3 * a1 - l2 * b3 * a3
        - l2 * a3**2 + l2 * a1 * a3 - (l2 - l3) * (1 - l3)
    )
    r[5] = (
        l2 * (1 - l2) * b1 + 2 * l2 * (1 - l2) * a1 + l2 * l3 * b1 * a1
        - l2 * l3 * b1 * a2 + l2 * l3 * a1**2 - l2 * l3 * a1 * a2
        - (l2 - 1) * (1 - l3)
    )
    r[6] = (
        l2 * (l2 - l3) * b3 + 2 * l2 * (l2 - l3) * a3 + l2 * b3 * a2
        - l2 * b3 * a3 - l2 * a3**2 + l2 * a2 * a3 - (1 - l3) * (l2 - l3)
    )
    r[7] = (
        l3 * (1 - l3) * b1 + 2 * l3 * (1 - l3) * a1 + l2 * l3 * b1 * a1
        - l2 * l3 * b1 * a3 + l2 * l3 * a1**2 - l2 * l3 * a1 * a3
        - (l2 - 1) * (1 - l3)
    )
    r[8] = (
        l3 * (l2 - l3) * b2 + 2 * l3 * (l2 - l3) * a2 + l3 * b2 * a2
        - l3 * b2 * a3 + l3 * a2**2 - l3 * a2 * a3 - (l2 - l3) * (1 - l2)
    )
    return r


def solution_families(lambda_free: float, extra_free: float) -> list[RestrictionSolution]:
    """Instantiate all six solution families at the given free parameters.

    ``lambda_free`` is the family's free metric coefficient (must be
    positive); ``extra_free`` is its free linear coefficient.
    """
    lam, f = float(lambda_free), float(extra_free)
    if lam <= 0:
        raise InvalidMetricError("free metric coefficient must be positive")
    sols = [
        RestrictionSolution(
            "s1", (0.0, 0.0, f), (0.0, 0.0, 1 - f - lam), 1.0, lam,
            {"lambda3": lam, "a3": f},
        ),
        RestrictionSolution(
            "s2", (0.0, 0.0, 1 - lam), (f, f, lam * f), 1.0, lam,
            {"lambda3": lam, "b2": f},
        ),
        RestrictionSolution(
            "s3", (0.0, f, 0.0), (0.0, 1 - f - lam, 0.0), lam, 1.0,
            {"lambda2": lam, "a2": f},
        ),
        RestrictionSolution(
            "s4", (0.0, 1 - lam, 0.0), (f / lam, f, f / lam), lam, 1.0,
            {"lambda2": lam, "b2": f},
        ),
        RestrictionSolution(
            "s5", ((lam - 1) / lam, 0.0, 0.0), (f, lam * f, lam * f), lam, lam,
            {"lambda3": lam, "b1": f},
        ),
        RestrictionSolution(
            "s6", (f, 0.0, 0.0), ((lam - f * lam - 1) / lam, 0.0, 0.0), lam, lam,
            {"lambda3": lam, "a1": f},
        ),
    ]
    return sols


_GENERICITY_GAP = 0.05


def nonexistence_probe(
    lambda2: float,
    lambda3: float,
    multistarts: int = 200,
    seed: int = 0,
    max_iter: int = 200,
) -> float:
    """Best residual norm found by damped Gauss-Newton multistart descent
    on the nine restriction equations over [-5, 5]^6.

    A descent floor bounded away from zero supports (but does not prove)
    that no three-exponential geodesic exists for a generic metric.
    """
    if lambda2 <= 0 or lambda3 <= 0:
        raise InvalidMetricError("lambda2 and lambda3 must be positive")
    gaps = (abs(lambda2 - 1), abs(lambda3 - 1), abs(lambda2 - lambda3))
    if min(gaps) < _GENERICITY_GAP:
        raise GenericityError(
            f"metric ({lambda2}, {lambda3}) is not generic (a solution family "
            "applies); use solution_families instead"
        )
    rng = np.random.default_rng(np.random.Philox(seed))
    h = 1e-6
    best = np.inf
    for _ in range(multistarts):
        x = rng.uniform(-5.0, 5.0, 6)
        r = restriction_residual(x, lambda2, lambda3)
        f = r @ r
        mu = 1e-3
        for _ in range(max_iter):
            J = np.empty((9, 6))
            for j in range(6):
                xp = x.copy()
                xp[j] += h
                xm = x.copy()
                xm[j] -= h
                J[:, j] = (
                    restriction_residual(xp, lambda2, lambda3)
                    - restriction_residual(xm, lambda2, lambda3)
                ) / (2 * h)
            try:
                p = np.linalg.solve(J.T @ J + mu * np.eye(6), -J.T @ r)
            except np.linalg.LinAlgError:
                break
            xn = x + p
            rn = restriction_residual(xn, lambda2, lambda3)
            fn = rn @ rn
            if fn < f:
                x, r, f = xn, rn, fn
                mu = max(mu * 0.3, 1e-12)
            else:
                mu *= 3.0
                if mu > 1e8:
                    break
        best = min(best, float(np.sqrt(f)))
    return best
