"""Product-of-exponential curves and their body velocities.

A curve t -> exp(t X_1) ... exp(t X_r) . o is evaluated in the ambient
group, while velocities are computed exactly in coordinates through the
adjoint representation: Ad(exp(-t F)) acts on coefficient vectors as
expm(-t ad F), so the left-trivialized velocity and its derivative are
finite products of dim x dim matrices (no finite differences).
"""

from __future__ import annotations

import numpy as np

from . import accel
from .catalog import ReductiveDecomposition
from .core import AlgebraElement, ContextMismatchError, GroupElement, _same_context


class ProductExpCurve:
    """Curve t -> exp(t X_1) ... exp(t X_r) . o given by its factor list."""

    def __init__(self, dec: ReductiveDecomposition, factors):
        if not factors:
            raise ValueError("factor list must be non-empty")
        self.dec = dec
        self.factors = list(factors)
        ctx = dec.context
        for f in self.factors:
            if f.context is not ctx:
                raise ContextMismatchError(
                    "curve factors must live in the decomposition's context"
                )
        self._factor_mats = [f.matrix for f in self.factors]
        self._ad_mats = [ctx.ad_matrix(f.coeffs) for f in self.factors]
        # per-t caches of factor exponentials, reused across grid sweeps
        self._amb_cache: dict[float, list] = {}
        self._ad_cache: dict[float, list] = {}

    @property
    def context(self):
        return self.dec.context

    def _ambient_exps(self, t: float):
        exps = self._amb_cache.get(t)
        if exps is None:
            exps = [accel.expm(t * M) for M in self._factor_mats]
            self._amb_cache[t] = exps
        return exps

    def _ad_exps(self, t: float):
        """Coefficient-space matrices of Ad(exp(-t X_i)) per factor."""
        exps = self._ad_cache.get(t)
        if exps is None:
            exps = [accel.expm(-t * A) for A in self._ad_mats]
            self._ad_cache[t] = exps
        return exps

    def evaluate(self, t: float) -> GroupElement:
        """Lift a(t) = exp(t X_1) ... exp(t X_r) in the ambient group."""
        exps = self._ambient_exps(t)
        M = exps[0]
        for E in exps[1:]:
            M = M @ E
        return GroupElement(self.context, M)

    def body_velocity(self, t: float):
        """(w, w_dot) coefficient vectors of a^-1 a_dot and its t-derivative.

        w(t) = sum_i Ad(exp(-t X_r) ... exp(-t X_{i+1})) X_i; differentiating
        each Ad factor with d/dt Ad(exp(-t F)) = -ad(F) Ad(exp(-t F)) gives
        w_dot exactly.
        """
        r = len(self.factors)
        dim = self.context.dim
        A = self._ad_exps(t)
        ads = self._ad_mats
        w = np.zeros(dim)
        wdot = np.zeros(dim)
        for i in range(r):
            u = self.factors[i].coeffs
            # tail product A[r-1] ... A[i+1] applied to u
            ti = u.copy()
            for q in range(i + 1, r):
                ti = A[q] @ ti
            w += ti
            for j in range(i + 1, r):
                v = u.copy()
                for q in range(i + 1, j + 1):
                    v = A[q] @ v
                v = -(ads[j] @ v)
                for q in range(j + 1, r):
                    v = A[q] @ v
                wdot += v
        return w, wdot

    def initial_velocity(self) -> AlgebraElement:
        """gamma_dot(0) pulled back to m: the m-part of the factor sum."""
        total = sum((f.coeffs for f in self.factors), np.zeros(self.context.dim))
        return AlgebraElement(self.context, total * self.dec.part_masks["m"])

    def padded3(self):
        """(X, Y, Z) with zero-padding, for the three-factor defect formula."""
        if len(self.factors) > 3:
            raise ValueError("defect formula supports at most three factors")
        zero = self.context.zero()
        fs = list(self.factors) + [zero] * (3 - len(self.factors))
        return fs[0], fs[1], fs[2]

    def describe(self) -> str:
        return f"product of {len(self.factors)} exponential factor(s) on {self.dec.name}"


def twist(Y: AlgebraElement, Z: AlgebraElement, t: float) -> np.ndarray:
    """Operator T(t) = Ad(exp(-t Z) exp(-t Y)) as a matrix on coefficients."""
    _same_context(Y, Z)
    ctx = Y.context
    return accel.expm(-t * ctx.ad_matrix(Z.coeffs)) @ accel.expm(-t * ctx.ad_matrix(Y.coeffs))
