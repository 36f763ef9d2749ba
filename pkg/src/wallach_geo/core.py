"""Matrix Lie algebra kernel: contexts, elements, brackets, Killing form,
exponentials, adjoint actions and B-orthogonal projection.

An :class:`AlgebraContext` is built once from an ordered basis of real
matrices; structure constants, the Killing matrix and the trace-form Gram
factorization are precomputed and the context is immutable afterwards.
"""

from __future__ import annotations

import numpy as np

from . import accel


class WallachGeoError(Exception):
    """Base class for all library errors."""


class ContextMismatchError(WallachGeoError):
    """Elements from distinct algebra contexts were combined."""


class NotInAlgebraError(WallachGeoError):
    """A matrix could not be re-expanded in the basis within tolerance."""


class StructureError(WallachGeoError):
    """The basis does not define a valid Lie algebra within tolerance."""


class SubspaceSelectorError(WallachGeoError):
    """Unknown subspace selector, or the context has no decomposition."""


class DegenerateSpaceError(WallachGeoError):
    """Catalog constructor called with degenerate dimensions."""


class GroupingInvalidError(WallachGeoError):
    """Two-summand grouping hypotheses fail for the requested module."""


class WrongModuleError(WallachGeoError):
    """A vector does not lie in the requested isotropy module."""


class InvalidMetricError(WallachGeoError):
    """Non-positive metric coefficient."""


class HypothesisViolatedError(WallachGeoError):
    """Hypotheses of a geodesic constructor are not met."""


class GenericityError(WallachGeoError):
    """Probe called with metric parameters covered by a solution family."""


class OutOfChartError(WallachGeoError):
    """Principal-logarithm chart does not contain the argument."""


class IntegrationFailureError(WallachGeoError):
    """Numerical integration left its stability budget."""


class SpaceDefinitionError(WallachGeoError):
    """A JSON space definition violates the schema or is degenerate."""


class AlgebraElement:
    """A Lie algebra element stored as coordinates in the context basis."""

    __slots__ = ("context", "coeffs")

    def __init__(self, context: "AlgebraContext", coeffs):
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (context.dim,):
            raise ValueError(
                f"coefficient vector has shape {coeffs.shape}, expected ({context.dim},)"
            )
        self.context = context
        self.coeffs = coeffs

    @property
    def matrix(self) -> np.ndarray:
        return np.tensordot(self.coeffs, self.context.basis, axes=1)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same_context(self, other)
        return AlgebraElement(self.context, self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same_context(self, other)
        return AlgebraElement(self.context, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(self.context, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.context, -self.coeffs)

    def norm_b(self) -> float:
        """Norm in the -B form (real and nonnegative on compact algebras)."""
        q = self.coeffs @ (-self.context.killing) @ self.coeffs
        return float(np.sqrt(max(q, 0.0)))

    def __repr__(self) -> str:
        return f"AlgebraElement({self.context.name}, {self.coeffs})"


class GroupElement:
    """A group element as an ambient matrix tied to an algebra context."""

    __slots__ = ("context", "matrix")

    def __init__(self, context: "AlgebraContext", matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        n = context.ambient_size
        if matrix.shape != (n, n):
            raise ValueError(f"matrix has shape {matrix.shape}, expected ({n}, {n})")
        self.context = context
        self.matrix = matrix

    def inverse(self) -> "GroupElement":
        return GroupElement(self.context, np.linalg.inv(self.matrix))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        _same_context(self, other)
        return GroupElement(self.context, self.matrix @ other.matrix)

    def orthogonality_drift(self) -> float:
        M = self.matrix
        return float(np.abs(M.T @ M - np.eye(M.shape[0])).max())


def _same_context(a, b) -> None:
    if a.context is not b.context:
        raise ContextMismatchError(
            f"elements belong to distinct contexts: {a.context.name!r} vs {b.context.name!r}"
        )


class AlgebraContext:
    """A finite-dimensional real matrix Lie algebra with a fixed basis.

    Construction computes structure constants, the Killing matrix from
    ad-traces and the trace-form Gram factorization, then verifies
    antisymmetry, the Jacobi identity, the commutator/structure-constant
    match and ad-invariance of the Killing form on basis triples.
    """

    def __init__(self, name: str, basis, tol_structural: float = 1e-12):
        self.name = name
        basis = np.asarray(basis, dtype=np.float64)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
            raise ValueError("basis must be a list of square matrices")
        self.basis = basis
        self.dim = basis.shape[0]
        self.ambient_size = basis.shape[1]
        self.tol_structural = float(tol_structural)
        self.decomposition = None  # set by the catalog when an adapted split exists

        # trace-form Gram matrix; singular Gram means a dependent basis
        self.gram = np.einsum("aij,bij->ab", basis, basis)
        try:
            self._gram_inv = np.linalg.inv(self.gram)
        except np.linalg.LinAlgError as exc:
            raise StructureError(f"{name}: basis matrices are linearly dependent") from exc
        if np.linalg.cond(self.gram) > 1e12:
            raise StructureError(f"{name}: basis matrices are (numerically) dependent")

        comms = np.einsum("aij,bjk->abik", basis, basis)
        comms = comms - np.transpose(comms, (1, 0, 2, 3))
        rhs = np.einsum("cij,abij->abc", basis, comms)
        self.structure_constants = rhs @ self._gram_inv.T

        recon = np.einsum("abc,cij->abij", self.structure_constants, basis)
        self._commutator_residual = float(np.abs(recon - comms).max())
        if self._commutator_residual > self.tol_structural * max(1.0, np.abs(comms).max()):
            raise StructureError(
                f"{name}: commutators leave the basis span "
                f"(residual {self._commutator_residual:.3e})"
            )

        c = self.structure_constants
        anti = np.abs(c + np.transpose(c, (1, 0, 2))).max()
        if anti > self.tol_structural * max(1.0, np.abs(c).max()):
            raise StructureError(f"{name}: structure constants not antisymmetric ({anti:.3e})")

        T = np.einsum("ijl,lkm->ijkm", c, c)
        jac = T + np.transpose(T, (1, 2, 0, 3)) + np.transpose(T, (2, 0, 1, 3))
        self._jacobi_residual = float(np.abs(jac).max())
        if self._jacobi_residual > self.tol_structural * max(1.0, np.abs(T).max()):
            raise StructureError(f"{name}: Jacobi identity fails ({self._jacobi_residual:.3e})")

        # ad matrices and the Killing form from ad-traces
        self.ad_basis = np.transpose(c, (0, 2, 1))  # ad_basis[i][k, j] = c[i, j, k]
        self.killing = np.einsum("ikl,jlk->ij", self.ad_basis, self.ad_basis)

        kb = max(1.0, np.abs(self.killing).max())
        sym = np.abs(self.killing - self.killing.T).max()
        if sym > self.tol_structural * kb:
            raise StructureError(f"{name}: Killing matrix not symmetric ({sym:.3e})")
        adinv = np.einsum("ijl,lk->ijk", c, self.killing) + np.einsum(
            "jl,ikl->ijk", self.killing, c
        )
        self._ad_invariance_residual = float(np.abs(adinv).max())
        if self._ad_invariance_residual > 10 * self.tol_structural * kb:
            raise StructureError(
                f"{name}: Killing form not ad-invariant ({self._ad_invariance_residual:.3e})"
            )

    def element(self, coeffs) -> AlgebraElement:
        return AlgebraElement(self, coeffs)

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, np.zeros(self.dim))

    def basis_element(self, i: int) -> AlgebraElement:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return AlgebraElement(self, e)

    def identity(self) -> GroupElement:
        return GroupElement(self, np.eye(self.ambient_size))

    def coefficients_of(self, matrix: np.ndarray, check: bool = True) -> np.ndarray:
        """Expand an ambient matrix in the basis via the Gram factorization."""
        rhs = np.einsum("aij,ij->a", self.basis, matrix)
        coeffs = self._gram_inv @ rhs
        if check:
            residual = np.abs(np.tensordot(coeffs, self.basis, axes=1) - matrix).max()
            scale = max(1.0, np.abs(matrix).max())
            if residual > 100 * self.tol_structural * scale:
                raise NotInAlgebraError(
                    f"{self.name}: matrix is not in the algebra span "
                    f"(re-expansion residual {residual:.3e})"
                )
        return coeffs

    def from_matrix(self, matrix) -> AlgebraElement:
        return AlgebraElement(self, self.coefficients_of(np.asarray(matrix, dtype=np.float64)))

    def ad_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ad(x) acting on coefficient vectors."""
        return accel.ad_matrix(self.structure_constants, x)


def bracket(X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    """Lie bracket [X, Y] via structure-constant contraction."""
    _same_context(X, Y)
    ctx = X.context
    return AlgebraElement(ctx, accel.bracket_coeffs(ctx.structure_constants, X.coeffs, Y.coeffs))


def killing_form(X: AlgebraElement, Y: AlgebraElement) -> float:
    """B(X, Y) from the precomputed ad-trace Killing matrix."""
    _same_context(X, Y)
    return float(X.coeffs @ X.context.killing @ Y.coeffs)


def matrix_exp(X: AlgebraElement, t: float = 1.0) -> GroupElement:
    """exp(t X) in the ambient matrix group."""
    if t == 0.0:
        return X.context.identity()
    return GroupElement(X.context, accel.expm(t * X.matrix))


def adjoint(g: GroupElement, X: AlgebraElement) -> AlgebraElement:
    """Ad(g) X = g X g^-1, re-expanded in the basis."""
    _same_context(g, X)
    M = g.matrix @ X.matrix @ np.linalg.inv(g.matrix)
    return AlgebraElement(X.context, X.context.coefficients_of(M))


def project(X: AlgebraElement, part: str) -> AlgebraElement:
    """B-orthogonal projection onto an adapted part (k, m, m1, m2, m3).

    The adapted bases are part-wise, so in coordinates the projection is a
    truncation; B-orthogonality of the parts is verified at catalog build.
    """
    dec = X.context.decomposition
    if dec is None:
        raise SubspaceSelectorError(f"context {X.context.name!r} carries no decomposition")
    try:
        mask = dec.part_masks[part]
    except KeyError:
        raise SubspaceSelectorError(f"unknown subspace selector {part!r}") from None
    return AlgebraElement(X.context, X.coeffs * mask)
