"""Catalog of generalized Wallach spaces as adapted basis decompositions.

Each builder assembles an ordered basis (k first, then the three modules),
constructs the algebra context and verifies the defining bracket relations
before returning.  The module labeling convention is fixed: for block
constructions the (1,2) off-diagonal block is m1, (1,3) is m2, (2,3) is m3.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import (
    AlgebraContext,
    AlgebraElement,
    DegenerateSpaceError,
    GroupingInvalidError,
    SpaceDefinitionError,
    StructureError,
    bracket,
)

_MODULES = ("m1", "m2", "m3")


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_residual: float


@dataclass
class StructureReport:
    """Per-relation residuals for one decomposition."""

    space: str
    checks: list[CheckResult] = field(default_factory=list)
    commuting_pairs: frozenset = frozenset()
    module_dims: tuple = ()
    fibration: dict = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, residual: float, tol: float) -> None:
        self.checks.append(CheckResult(name, residual <= tol, float(residual)))

    def max_residual(self) -> float:
        return max((c.max_residual for c in self.checks), default=0.0)


class ReductiveDecomposition:
    """Adapted partition g = k + m1 + m2 + m3 with projectors and flags."""

    def __init__(
        self,
        context: AlgebraContext,
        part_indices: dict,
        equivalence_note: str = "",
        verify: bool = True,
    ):
        self.context = context
        self.part_indices = {p: np.asarray(ix, dtype=np.intp) for p, ix in part_indices.items()}
        all_ix = np.concatenate([self.part_indices[p] for p in ("k",) + _MODULES])
        if sorted(all_ix) != list(range(context.dim)):
            raise SpaceDefinitionError(
                f"{context.name}: parts must partition the basis index range"
            )
        self.part_indices["m"] = np.concatenate([self.part_indices[p] for p in _MODULES])
        self.part_masks = {}
        self.projectors = {}
        for p, ix in self.part_indices.items():
            mask = np.zeros(context.dim)
            mask[ix] = 1.0
            self.part_masks[p] = mask
            self.projectors[p] = np.diag(mask)
        self.equivalence_note = equivalence_note
        self.commuting_pairs = frozenset()
        context.decomposition = self
        if verify:
            report = verify_structure(self)
            if not report.verdict:
                failed = [c.name for c in report.checks if not c.passed]
                raise StructureError(
                    f"{context.name}: structure verification failed: {failed}"
                )
        self.commuting_pairs = _find_commuting_pairs(self)

    @property
    def name(self) -> str:
        return self.context.name

    def module_dims(self) -> tuple:
        return tuple(len(self.part_indices[p]) for p in _MODULES)

    def module_vector(self, part: str, values) -> AlgebraElement:
        ix = self.part_indices[part]
        coeffs = np.zeros(self.context.dim)
        coeffs[ix] = np.asarray(values, dtype=np.float64)
        return AlgebraElement(self.context, coeffs)

    def random_module_vector(self, part: str, rng) -> AlgebraElement:
        """Standard-normal coordinates in a module, normalized in -B."""
        v = self.module_vector(part, rng.standard_normal(len(self.part_indices[part])))
        n = v.norm_b()
        return v * (1.0 / n) if n > 0 else v

    def module_of(self, X: AlgebraElement, tol: float = 1e-9) -> str | None:
        """Name of the single part containing X, or None if mixed."""
        scale = max(np.abs(X.coeffs).max(), 1e-300)
        hits = [
            p
            for p in ("k",) + _MODULES
            if np.abs(X.coeffs * self.part_masks[p]).max() > tol * scale
        ]
        return hits[0] if len(hits) == 1 else None


def _part_coeff_residual(dec, coeffs, allowed) -> float:
    """Largest coefficient of `coeffs` outside the allowed parts."""
    mask = np.zeros(dec.context.dim)
    for p in allowed:
        mask = np.maximum(mask, dec.part_masks[p])
    out = coeffs * (1.0 - mask)
    return float(np.abs(out).max()) if out.size else 0.0


def _inclusion_residual(dec, part_a, part_b, allowed) -> float:
    """max residual of [part_a, part_b] outside the allowed parts, over basis pairs."""
    c = dec.context.structure_constants
    ia, ib = dec.part_indices[part_a], dec.part_indices[part_b]
    if len(ia) == 0 or len(ib) == 0:
        return 0.0
    # brackets of all basis pairs: c[ia, ib, :] directly
    coeffs = c[np.ix_(ia, ib)]
    mask = np.zeros(dec.context.dim)
    for p in allowed:
        mask = np.maximum(mask, dec.part_masks[p])
    return float(np.abs(coeffs * (1.0 - mask)).max())


def _bracket_magnitude(dec, part_a, part_b) -> float:
    c = dec.context.structure_constants
    ia, ib = dec.part_indices[part_a], dec.part_indices[part_b]
    if len(ia) == 0 or len(ib) == 0:
        return 0.0
    return float(np.abs(c[np.ix_(ia, ib)]).max())


def _find_commuting_pairs(dec) -> frozenset:
    tol = dec.context.tol_structural
    pairs = set()
    for i, j in ((1, 2), (1, 3), (2, 3)):
        if _bracket_magnitude(dec, f"m{i}", f"m{j}") <= tol:
            pairs.add((i, j))
    return frozenset(pairs)


def verify_structure(dec: ReductiveDecomposition) -> StructureReport:
    """Exhaustive basis-pair check of the generalized Wallach relations."""
    tol = dec.context.tol_structural
    K = dec.context.killing
    report = StructureReport(space=dec.name, module_dims=dec.module_dims())

    parts = ("k",) + _MODULES
    ortho = 0.0
    for a in range(4):
        for b in range(a + 1, 4):
            ia, ib = dec.part_indices[parts[a]], dec.part_indices[parts[b]]
            if len(ia) and len(ib):
                ortho = max(ortho, np.abs(K[np.ix_(ia, ib)]).max())
    report.add("B-orthogonality of parts", ortho, tol * max(1.0, np.abs(K).max()))

    for i in (1, 2, 3):
        report.add(
            f"reductivity [k, m{i}] in m{i}",
            _inclusion_residual(dec, "k", f"m{i}", (f"m{i}",)),
            tol,
        )
    for i in (1, 2, 3):
        report.add(
            f"Wallach [m{i}, m{i}] in k",
            _inclusion_residual(dec, f"m{i}", f"m{i}", ("k",)),
            tol,
        )
    for (i, j, k) in ((1, 2, 3), (1, 3, 2), (2, 3, 1)):
        report.add(
            f"derived [m{i}, m{j}] in m{k}",
            _inclusion_residual(dec, f"m{i}", f"m{j}", (f"m{k}",)),
            tol,
        )
    report.add("k is a subalgebra", _inclusion_residual(dec, "k", "k", ("k",)), tol)
    report.commuting_pairs = _find_commuting_pairs(dec)
    return report


def verify_fibration(dec: ReductiveDecomposition, i: int) -> StructureReport:
    """Symmetric-pair and Lie-triple-system checks for g_i = k + m_i."""
    tol = dec.context.tol_structural
    j, k = [q for q in (1, 2, 3) if q != i]
    gi = ("k", f"m{i}")
    mprime = (f"m{j}", f"m{k}")
    report = StructureReport(space=f"{dec.name} fibration i={i}", module_dims=dec.module_dims())

    res = 0.0
    for a in gi:
        for b in gi:
            res = max(res, _inclusion_residual(dec, a, b, gi))
    report.add(f"g{i} = k+m{i} is a subalgebra", res, tol)

    res = 0.0
    for a in mprime:
        for b in mprime:
            res = max(res, _inclusion_residual(dec, a, b, gi))
    report.add(f"[m', m'] in g{i}", res, tol)

    res = 0.0
    for a in gi:
        for b in mprime:
            res = max(res, _inclusion_residual(dec, a, b, mprime))
    report.add(f"[g{i}, m'] in m'", res, tol)

    # [[m_i, m_i], m_i] subset m_i: Lie triple system
    ctx = dec.context
    c = ctx.structure_constants
    ix = dec.part_indices[f"m{i}"]
    res = 0.0
    if len(ix):
        inner = c[np.ix_(ix, ix)]  # (a, b, dim) coefficients of [e_a, e_b]
        # [[e_a, e_b], e_d] = sum_l inner[a,b,l] c[l, d, :]
        triple = np.einsum("abl,ldm->abdm", inner, c[:, ix, :])
        res = float(np.abs(triple * (1.0 - dec.part_masks[f"m{i}"])).max())
    report.add(f"m{i} is a Lie triple system", res, tol)
    return report


class TwoSummandView:
    """Grouped view M1 = m_j + m_k, M2 = m_i satisfying the two-summand
    geodesic hypotheses, verified on basis pairs at construction."""

    def __init__(self, parent: ReductiveDecomposition, i: int):
        if i not in (1, 2, 3):
            raise ValueError("module index must be 1, 2 or 3")
        self.parent = parent
        self.i = i
        j, k = [q for q in (1, 2, 3) if q != i]
        self.M1_parts = (f"m{j}", f"m{k}")
        self.M2_part = f"m{i}"
        self.M1_indices = np.concatenate([parent.part_indices[p] for p in self.M1_parts])
        self.M2_indices = parent.part_indices[self.M2_part]
        tol = parent.context.tol_structural
        checks = [
            ("[M2, M2] in k", self._incl((self.M2_part,), (self.M2_part,), ("k",))),
            ("[M1, M1] in k+M2", self._incl(self.M1_parts, self.M1_parts, ("k", self.M2_part))),
            ("[M1, M2] in M1", self._incl(self.M1_parts, (self.M2_part,), self.M1_parts)),
            ("[k, M1] in M1", self._incl(("k",), self.M1_parts, self.M1_parts)),
            ("[k, M2] in M2", self._incl(("k",), (self.M2_part,), (self.M2_part,))),
        ]
        for name, res in checks:
            if res > tol:
                raise GroupingInvalidError(
                    f"{parent.name}: grouping M2=m{i} violates {name} (residual {res:.3e})"
                )
        mask1 = np.zeros(parent.context.dim)
        mask1[self.M1_indices] = 1.0
        mask2 = np.zeros(parent.context.dim)
        mask2[self.M2_indices] = 1.0
        self.M1_mask, self.M2_mask = mask1, mask2

    def _incl(self, pa, pb, allowed) -> float:
        res = 0.0
        for a in pa:
            for b in pb:
                res = max(res, _inclusion_residual(self.parent, a, b, allowed))
        return res

    def in_M1(self, X: AlgebraElement, tol: float = 1e-10) -> bool:
        return float(np.abs(X.coeffs * (1.0 - self.M1_mask)).max()) <= tol

    def in_M2(self, X: AlgebraElement, tol: float = 1e-10) -> bool:
        return float(np.abs(X.coeffs * (1.0 - self.M2_mask)).max()) <= tol


def two_summand_view(dec: ReductiveDecomposition, i: int) -> TwoSummandView:
    """Group the decomposition as M1 = m_j + m_k, M2 = m_i."""
    return TwoSummandView(dec, i)


def _skew(n: int, a: int, b: int) -> np.ndarray:
    M = np.zeros((n, n))
    M[a, b] = 1.0
    M[b, a] = -1.0
    return M


def build_so_blocks(l: int, m: int, n: int, tol_structural: float = 1e-12) -> ReductiveDecomposition:
    """so(l+m+n) with k the block-diagonal so(l)+so(m)+so(n); off-diagonal
    blocks (1,2) -> m1, (1,3) -> m2, (2,3) -> m3."""
    if l < 1 or m < 1 or n < 1 or l + m + n < 3:
        raise DegenerateSpaceError("need l, m, n >= 1 and l+m+n >= 3")
    N = l + m + n
    ranges = [range(0, l), range(l, l + m), range(l + m, N)]
    basis = []
    parts = {"k": [], "m1": [], "m2": [], "m3": []}

    def add(part, a, b):
        parts[part].append(len(basis))
        basis.append(_skew(N, a, b))

    for r in ranges:
        for a in r:
            for b in r:
                if a < b:
                    add("k", a, b)
    for part, (ra, rb) in (("m1", (0, 1)), ("m2", (0, 2)), ("m3", (1, 2))):
        for a in ranges[ra]:
            for b in ranges[rb]:
                add(part, a, b)
    ctx = AlgebraContext(f"so-blocks({l},{m},{n})", basis, tol_structural)
    return ReductiveDecomposition(ctx, parts)


def build_stiefel(n: int, tol_structural: float = 1e-12) -> ReductiveDecomposition:
    """so(n+2) with k = so(n) in the lower-right block; m1 and m2 are the
    first two rows against the last n columns, m3 is the (1,2) rotation."""
    if n < 2:
        raise DegenerateSpaceError("need n >= 2; use build_so_blocks(1, 1, 1) for n = 1")
    N = n + 2
    basis = []
    parts = {"k": [], "m1": [], "m2": [], "m3": []}

    def add(part, a, b):
        parts[part].append(len(basis))
        basis.append(_skew(N, a, b))

    for a in range(2, N):
        for b in range(a + 1, N):
            add("k", a, b)
    for b in range(2, N):
        add("m1", 0, b)
    for b in range(2, N):
        add("m2", 1, b)
    add("m3", 1, 0)
    ctx = AlgebraContext(f"stiefel({n})", basis, tol_structural)
    return ReductiveDecomposition(
        ctx, parts, equivalence_note="m1 and m2 are equivalent K-modules"
    )


def _realify(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Real 2n x 2n embedding of the complex matrix A + iB."""
    n = A.shape[0]
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = A
    M[n:, n:] = A
    M[:n, n:] = -B
    M[n:, :n] = B
    return M


def build_su3_flag(tol_structural: float = 1e-12) -> ReductiveDecomposition:
    """Realified su(3) with k the diagonal torus and the three root-pair
    planes (1,2) -> m1, (1,3) -> m2, (2,3) -> m3."""
    basis = []
    parts = {"k": [], "m1": [], "m2": [], "m3": []}

    def add(part, A, B):
        parts[part].append(len(basis))
        basis.append(_realify(A, B))

    Z = np.zeros((3, 3))
    add("k", Z, np.diag([1.0, -1.0, 0.0]))
    add("k", Z, np.diag([0.0, 1.0, -1.0]))
    for part, (j, k) in (("m1", (0, 1)), ("m2", (0, 2)), ("m3", (1, 2))):
        E = np.zeros((3, 3))
        E[j, k] = 1.0
        add(part, E - E.T, Z)
        add(part, Z, E + E.T)
    ctx = AlgebraContext("su3-flag", basis, tol_structural)
    return ReductiveDecomposition(ctx, parts)


def build_product_spheres(tol_structural: float = 1e-12) -> ReductiveDecomposition:
    """so(3)+so(3)+so(3) block-diagonal in 9x9; k takes one rotation
    generator per factor, m_i the remaining two generators of factor i."""
    basis = []
    parts = {"k": [], "m1": [], "m2": [], "m3": []}

    def add(part, factor, a, b):
        parts[part].append(len(basis))
        off = 3 * factor
        basis.append(_skew(9, off + a, off + b))

    for f in range(3):
        add("k", f, 1, 0)
    for f, part in enumerate(_MODULES):
        add(part, f, 2, 1)
        add(part, f, 0, 2)
    ctx = AlgebraContext("product-spheres", basis, tol_structural)
    return ReductiveDecomposition(ctx, parts)


def load_space_json(path) -> ReductiveDecomposition:
    """Load a space definition { name, ambient_size, basis, parts } and
    verify its structure before use."""
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpaceDefinitionError(f"cannot read space definition: {exc}") from exc
    for key in ("name", "ambient_size", "basis", "parts"):
        if key not in data:
            raise SpaceDefinitionError(f"space definition missing field {key!r}")
    n = data["ambient_size"]
    if not isinstance(n, int) or n < 1:
        raise SpaceDefinitionError("ambient_size must be a positive integer")
    try:
        basis = np.asarray(
            [np.asarray(row, dtype=np.float64).reshape(n, n) for row in data["basis"]]
        )
    except (ValueError, TypeError) as exc:
        raise SpaceDefinitionError(f"basis rows must be {n * n} reals (row-major)") from exc
    parts = data["parts"]
    for p in ("k", "m1", "m2", "m3"):
        if p not in parts:
            raise SpaceDefinitionError(f"parts missing {p!r}")
    try:
        ctx = AlgebraContext(str(data["name"]), basis)
        dec = ReductiveDecomposition(ctx, {p: parts[p] for p in ("k", "m1", "m2", "m3")})
    except StructureError as exc:
        raise SpaceDefinitionError(str(exc)) from exc
    return dec


def counterexample_swapped(dec_builder=build_so_blocks, args=(2, 2, 2)):
    """A deliberately corrupted decomposition (one m1 basis vector swapped
    into m2) used as a negative control; verification is skipped so the
    caller can observe the failing report."""
    good = dec_builder(*args)
    parts = {p: list(good.part_indices[p]) for p in ("k", "m1", "m2", "m3")}
    moved = parts["m1"].pop()
    parts["m2"].append(moved)
    ctx = AlgebraContext(good.context.name + " (corrupted)", good.context.basis)
    return ReductiveDecomposition(ctx, parts, verify=False)
