# engine/exactstruct.py
"""
Exact structures on mod-A: the abelian one and the relative structures
F_G whose conflations stay exact under Hom(G, -) for every generator G.
Relative projectives are add(A ⊕ G), so relative covers are minimal right
approximations by those summands.
"""

from dataclasses import dataclass
from itertools import product
from typing import List, Optional, Sequence

import numpy as np

from app_config import settings
from engine import linalg
from engine.algebra import BasedAlgebra
from engine.errors import AlgebraError, BudgetExceeded, ModuleError, PreconditionError
from engine.homology import (Resolution, build_resolution, ext_from_resolution, gldim, indecomposable_projectives_cached,
                             minimal_resolution, pdim, projective_cover, right_approximation)
from engine.modcat import (Module, ModuleMap, cokernel, compose, decompose, hom_dim, induced_hom_rank, is_injective,
                           is_isomorphic, is_surjective, in_additive_closure)
from engine.verdict import Check, DimResult, Verdict
from utils.logger import get_logger

logger = get_logger("exactstruct")

ABELIAN = "abelian"
RELATIVE = "relative"


class ExactStructure:
    """Either the abelian structure on mod-A or the relative one given by a generator list."""

    def __init__(self, algebra: BasedAlgebra, kind: str = ABELIAN, generators: Sequence[Module] = ()):
        if kind not in (ABELIAN, RELATIVE):
            raise ValueError(f"unknown exact structure kind {kind!r}")
        if kind == RELATIVE and not generators:
            raise PreconditionError("a relative structure needs a nonempty generator list")
        for g in generators:
            if g.algebra is not algebra:
                raise AlgebraError(f"generator {g.name} is not a module over {algebra.name}")
        self.algebra = algebra
        self.kind = kind
        self.generators = list(generators)
        self._summands: Optional[List[Module]] = None

    @classmethod
    def abelian(cls, algebra: BasedAlgebra) -> "ExactStructure":
        return cls(algebra, ABELIAN)

    @classmethod
    def relative(cls, algebra: BasedAlgebra, generators: Sequence[Module]) -> "ExactStructure":
        return cls(algebra, RELATIVE, generators)

    def __repr__(self):
        if self.is_abelian:
            return f"ExactStructure(abelian, {self.algebra.name})"
        return f"ExactStructure(relative, {self.algebra.name}, generators={[g.name for g in self.generators]})"

    @property
    def is_abelian(self) -> bool:
        return self.kind == ABELIAN

    @property
    def key(self):
        return ABELIAN if self.is_abelian else (RELATIVE, tuple(id(g) for g in self.generators))

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if not self.is_abelian:
            out["generators"] = [g.name for g in self.generators]
        return out

    @property
    def projective_summands(self) -> List[Module]:
        """Indecomposable (relative) projectives, pairwise non-isomorphic."""
        if self._summands is None:
            summands = list(indecomposable_projectives_cached(self.algebra))
            for g in self.generators:
                for x, _ in decompose(g):
                    if not any(is_isomorphic(x, y) for y in summands):
                        summands.append(x)
            self._summands = summands
        return self._summands

    # covers and resolutions

    def cover(self, m: Module) -> ModuleMap:
        if self.is_abelian:
            return projective_cover(m)
        return right_approximation(m, self.projective_summands)

    def resolution(self, m: Module, cutoff: Optional[int] = None) -> Resolution:
        if self.is_abelian:
            return minimal_resolution(m, cutoff)
        cutoff = settings().cutoff if cutoff is None else cutoff
        cache = m._memo.setdefault("resolutions", {})
        key = (self.key, cutoff)
        if key not in cache:
            cache[key] = build_resolution(m, self.cover, cutoff, relative=True)
        return cache[key]

    def ext(self, m: Module, n: Module, i: int, cutoff: Optional[int] = None) -> int:
        if m.algebra is not self.algebra or n.algebra is not self.algebra:
            raise AlgebraError("ext: modules over a different algebra than the structure")
        return ext_from_resolution(self.resolution(m, cutoff), n, i)

    def pdim(self, m: Module, cutoff: Optional[int] = None) -> DimResult:
        return pdim(m, None if self.is_abelian else self, cutoff)

    # admissible morphisms

    def failing_generator(self, deflation: ModuleMap) -> Optional[Module]:
        """First generator G with Hom(G, B) -> Hom(G, C) not onto, or None."""
        if self.is_abelian:
            return None
        for g in self.generators:
            if induced_hom_rank(g, deflation) != hom_dim(g, deflation.target):
                return g
        return None

    def is_deflation(self, f: ModuleMap) -> bool:
        return is_surjective(f) and self.failing_generator(f) is None

    def is_inflation(self, f: ModuleMap) -> bool:
        if not is_injective(f):
            return False
        if self.is_abelian:
            return True
        _, proj = cokernel(f)
        return self.failing_generator(proj) is None


@dataclass
class Conflation:
    inflation: ModuleMap
    deflation: ModuleMap

    @property
    def modules(self):
        return self.inflation.source, self.inflation.target, self.deflation.target


def is_conflation(s: ExactStructure, c: Conflation) -> Verdict:
    """Short exact in mod-A and, for relative structures, Hom(G, -)-exact for each generator."""
    a, b, cc = c.modules
    label = "conflation"
    if c.inflation.target is not c.deflation.source:
        raise ModuleError("conflation maps are not composable")
    names = {"A": a.name, "B": b.name, "C": cc.name}
    if not is_injective(c.inflation):
        return Verdict.of(label, False, witness={**names, "reason": "inflation is not injective"})
    if not is_surjective(c.deflation):
        return Verdict.of(label, False, witness={**names, "reason": "deflation is not surjective"})
    composite = compose(c.deflation, c.inflation)
    if not composite.is_zero() or a.dim + cc.dim != b.dim:
        return Verdict.of(label, False, witness={**names, "reason": "not exact in the middle"})
    for g in s.generators:
        dims = [hom_dim(g, x) for x in (a, b, cc)]
        if dims[1] != dims[0] + dims[2]:
            check = Check("hom_dims", {"generator": g.name, "modules": [a.name, b.name, cc.name]}, dims)
            return Verdict.of(label, False, witness={**names, "generator": g.name, "hom_dims": dims},
                              checks=[check])
    return Verdict.of(label, True, witness=names)


def relative_projectives(s: ExactStructure, candidates: Sequence[Module]) -> List[Module]:
    if s.is_abelian:
        raise PreconditionError("relative_projectives needs a relative structure; "
                                "use indecomposable_projectives for the abelian one")
    return [m for m in candidates if in_additive_closure(m, s.projective_summands)]


def relative_resolution(s: ExactStructure, m: Module, cutoff: Optional[int] = None) -> Resolution:
    if s.is_abelian:
        raise PreconditionError("relative_resolution needs a relative structure")
    return s.resolution(m, cutoff)


def relative_ext(s: ExactStructure, m: Module, n: Module, i: int, cutoff: Optional[int] = None) -> int:
    if s.is_abelian:
        raise PreconditionError("relative_ext needs a relative structure")
    return s.ext(m, n, i, cutoff)


def relative_pdim(s: ExactStructure, m: Module, cutoff: Optional[int] = None) -> DimResult:
    return s.pdim(m, cutoff)


def relative_gldim(s: ExactStructure, tests: Sequence[Module], cutoff: Optional[int] = None) -> DimResult:
    return gldim(s.algebra, s, cutoff, tests=tests)


# extensions

@dataclass
class Extension:
    """0 -> A -> E -> C -> 0 with E = A ⊕ C acting by [[A(b), δ(b)], [0, C(b)]]."""
    middle: Module
    inflation: ModuleMap
    deflation: ModuleMap
    cocycle: linalg.Mat

    @property
    def conflation(self) -> Conflation:
        return Conflation(self.inflation, self.deflation)


def _derivations(a_mod: Module, c_mod: Module):
    """(Der, Inn) column bases for derivations δ: A -> Hom_k(C, A), vectorised per basis element."""
    alg, gf = a_mod.algebra, a_mod.algebra.gf
    a, c, d = a_mod.dim, c_mod.dim, alg.dim
    size = a * c
    ia, ic = np.eye(a, dtype=np.int64), np.eye(c, dtype=np.int64)
    left = [np.kron(a_mod._stack[i], ic) for i in range(d)]
    right = [np.kron(ia, c_mod._stack[j].T) for j in range(d)]
    rows = np.zeros((d * d * size, d * size), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            r = (i * d + j) * size
            for k in np.nonzero(alg.constants[i, j])[0]:
                rows[r:r + size, k * size:(k + 1) * size] += alg.constants[i, j, k] * np.eye(size, dtype=np.int64)
            rows[r:r + size, j * size:(j + 1) * size] -= left[i]
            rows[r:r + size, i * size:(i + 1) * size] -= right[j]
    der = linalg.kernel_basis(gf(rows % alg.p))
    inner = np.vstack([left[k] - right[k] for k in range(d)]) % alg.p
    inn = linalg.column_basis(gf(inner))
    return der, inn


def extension_basis(a_mod: Module, c_mod: Module) -> List[linalg.Mat]:
    """Cocycles whose classes form a basis of Ext^1(C, A)."""
    if a_mod.algebra is not c_mod.algebra:
        raise AlgebraError("extensions between modules over different algebras")
    if a_mod.dim == 0 or c_mod.dim == 0:
        return []
    gf = a_mod.algebra.gf
    der, span = _derivations(a_mod, c_mod)
    basis = []
    for k in range(der.shape[1]):
        v = der[:, k:k + 1]
        if not linalg.in_column_span(span, v):
            basis.append(v)
            span = linalg.hstack(gf, [span, v], der.shape[0])
    return basis


def extension_from_cocycle(a_mod: Module, c_mod: Module, cocycle: linalg.Mat, name: Optional[str] = None) -> Extension:
    alg, gf = a_mod.algebra, a_mod.algebra.gf
    a, c = a_mod.dim, c_mod.dim
    flat = np.asarray(cocycle.view(np.ndarray), dtype=np.int64).ravel()
    action = []
    for k in range(alg.dim):
        block = np.zeros((a + c, a + c), dtype=np.int64)
        block[:a, :a] = a_mod._stack[k]
        block[a:, a:] = c_mod._stack[k]
        block[:a, a:] = flat[k * a * c:(k + 1) * a * c].reshape((a, c))
        action.append(block)
    middle = Module(alg, action, name=name or f"E({a_mod.name},{c_mod.name})", validate=False)
    eye = np.eye(a + c, dtype=np.int64)
    inflation = ModuleMap(a_mod, middle, gf(eye[:, :a].copy()), validate=False)
    deflation = ModuleMap(middle, c_mod, gf(eye[a:, :].copy()), validate=False)
    return Extension(middle, inflation, deflation, cocycle)


def extensions(a_mod: Module, c_mod: Module) -> List[Extension]:
    """One extension 0 -> A -> E -> C -> 0 per class of Ext^1(C, A), the split class first."""
    gf, p = a_mod.algebra.gf, a_mod.algebra.p
    basis = extension_basis(a_mod, c_mod)
    total = p ** len(basis)
    budget = settings().extension_budget
    if total > budget:
        raise BudgetExceeded(f"Ext^1({c_mod.name}, {a_mod.name}) has {total} classes, over the extension budget "
                             f"{budget}", budget="extension_budget")
    size = a_mod.algebra.dim * a_mod.dim * c_mod.dim
    out = []
    for k, coeffs in enumerate(product(range(p), repeat=len(basis))):
        cocycle = linalg.linear_combination(gf, coeffs, basis, (size, 1)) if basis else linalg.zeros(gf, size, 1)
        out.append(extension_from_cocycle(a_mod, c_mod, cocycle, name=f"E{k}({a_mod.name},{c_mod.name})"))
    return out


def count_extension_classes(a_mod: Module, c_mod: Module) -> int:
    """Brute force: enumerate every cocycle and count classes modulo inner derivations."""
    gf, p = a_mod.algebra.gf, a_mod.algebra.p
    if a_mod.dim == 0 or c_mod.dim == 0:
        return 1
    der, inn = _derivations(a_mod, c_mod)
    count = p ** der.shape[1]
    budget = settings().extension_budget
    if count > budget:
        raise BudgetExceeded(f"{count} cocycles exceed the extension budget {budget}", budget="extension_budget")
    representatives: List[linalg.Mat] = []
    for coeffs in product(range(p), repeat=der.shape[1]):
        delta = linalg.mul(der, linalg.matrix(gf, [[c] for c in coeffs], (der.shape[1], 1)))
        if not any(linalg.in_column_span(inn, delta - r) for r in representatives):
            representatives.append(delta)
    return len(representatives)


# structure summary

def structure_check(s: ExactStructure, universe: Sequence[Module], cutoff: Optional[int] = None) -> Verdict:
    """
    Relative projectives and gldim over the universe, abelian extensions between
    members that the structure rejects, and relative Ext^1 <= Ext^1 entrywise.
    """
    if s.is_abelian:
        projectives = [m for m in universe if in_additive_closure(m, s.projective_summands)]
        dim = gldim(s.algebra, None, cutoff)
    else:
        projectives = relative_projectives(s, universe)
        dim = relative_gldim(s, universe, cutoff)
    rejected, bound_failures = [], []
    checks = []
    for x, z in product(universe, repeat=2):
        abs_ext = len(extension_basis(x, z))
        rel = s.ext(z, x, 1, cutoff)
        checks.append(Check("relative_ext" if not s.is_abelian else "ext",
                            {"M": z.name, "N": x.name, "i": 1}, rel))
        if rel > abs_ext:
            bound_failures.append({"M": z.name, "N": x.name, "relative": rel, "abelian": abs_ext})
        for cocycle in extension_basis(x, z):
            e = extension_from_cocycle(x, z, cocycle)
            verdict = is_conflation(s, e.conflation)
            if verdict.is_false:
                rejected.append({"A": x.name, "C": z.name, "generator": verdict.witness.get("generator")})
    witness = {
        "structure": s.describe(),
        "relative_projectives": [m.name for m in projectives],
        "gldim": dim.to_dict(),
        "rejected_extensions": rejected,
        "ext_bound_failures": bound_failures,
    }
    logger.info(f"📊 {s!r}: {len(projectives)} projectives, gldim {dim}, {len(rejected)} rejected extensions")
    return Verdict.of("structure_check", not bound_failures, witness=witness, checks=checks)
