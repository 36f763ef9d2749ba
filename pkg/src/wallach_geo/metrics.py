"""Diagonal invariant metrics on m and the Levi-Civita machinery they induce.

The metric (l1, l2, l3) weighs -B on the three modules.  Its coefficient
Gram matrix is assembled blockwise from the Killing matrix, so the inner
product of two elements automatically discards k-components.
"""

from __future__ import annotations

import numpy as np

from .catalog import ReductiveDecomposition
from .core import AlgebraElement, ContextMismatchError, InvalidMetricError, project
from .curves import ProductExpCurve


class DiagonalMetric:
    """Invariant metric l1 (-B)|m1 + l2 (-B)|m2 + l3 (-B)|m3."""

    def __init__(self, dec: ReductiveDecomposition, lambdas):
        l1, l2, l3 = (float(x) for x in lambdas)
        if min(l1, l2, l3) <= 0:
            raise InvalidMetricError(f"metric coefficients must be positive, got {lambdas}")
        self.dec = dec
        self.lambdas = (l1, l2, l3)
        self.normalized = (1.0, l2 / l1, l3 / l1)
        ctx = dec.context
        K = ctx.killing
        G = np.zeros((ctx.dim, ctx.dim))
        for lam, part in zip(self.lambdas, ("m1", "m2", "m3")):
            ix = dec.part_indices[part]
            if len(ix):
                G[np.ix_(ix, ix)] = -lam * K[np.ix_(ix, ix)]
        self.gram_full = G
        self.m_indices = dec.part_indices["m"]
        self.gram = G[np.ix_(self.m_indices, self.m_indices)]
        self._gram_cho = np.linalg.cholesky(self.gram)

    @property
    def context(self):
        return self.dec.context

    def inner_coeffs(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(x @ self.gram_full @ y)

    def _solve_gram(self, rhs_m: np.ndarray) -> np.ndarray:
        L = self._gram_cho
        z = np.linalg.solve(L, rhs_m)
        return np.linalg.solve(L.T, z)

    def scaled(self, c: float) -> "DiagonalMetric":
        return DiagonalMetric(self.dec, tuple(c * l for l in self.lambdas))


def inner(g: DiagonalMetric, X: AlgebraElement, Y: AlgebraElement) -> float:
    """The Ad(K)-invariant inner product of the m-parts of X and Y."""
    if X.context is not g.context or Y.context is not g.context:
        raise ContextMismatchError("elements do not belong to the metric's context")
    return g.inner_coeffs(X.coeffs, Y.coeffs)


def u_map(g: DiagonalMetric, X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    """The symmetric bilinear map U with
    2<U(X,Y), Z> = <[Z,X]_m, Y> + <X, [Z,Y]_m> for all Z in m,
    solved against the prefactored metric Gram matrix."""
    if X.context is not g.context or Y.context is not g.context:
        raise ContextMismatchError("elements do not belong to the metric's context")
    ctx = g.context
    c = ctx.structure_constants
    mi = g.m_indices
    x, y = X.coeffs, Y.coeffs
    gx, gy = g.gram_full @ x, g.gram_full @ y
    # rhs_j = <[e_j, X], Y> + <X, [e_j, Y]> over the m-basis e_j
    bx = np.einsum("jik,i->jk", c[mi], x)  # [e_j, X] coefficients
    by = np.einsum("jik,i->jk", c[mi], y)
    rhs = bx @ gy + by @ gx
    u = np.zeros(ctx.dim)
    u[mi] = g._solve_gram(0.5 * rhs)
    return AlgebraElement(ctx, u)


def pullback_velocity(curve: ProductExpCurve, t: float):
    """(w, v): the left-trivialized body velocity of the lift and its m-part.

    v(t) is the pullback of the projected curve's velocity to m at the
    origin; w - v is the k-gauge component of the chosen lift.
    """
    w, _ = curve.body_velocity(t)
    W = AlgebraElement(curve.context, w)
    return W, project(W, "m")
