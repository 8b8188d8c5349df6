# engine/modcat.py
"""
The category mod-A of finite-dimensional left modules over a based algebra.

A module stores one action matrix per algebra basis element. Right modules
are left modules over ``opposite(A)``; duals transpose the action and move
to the opposite algebra.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app_config import settings
from engine import linalg
from engine.algebra import BasedAlgebra, opposite
from engine.errors import AlgebraError, BudgetExceeded, ModuleError
from utils.logger import get_logger
from utils.parallel import parallel_map

logger = get_logger("modcat")


def _ints(m) -> np.ndarray:
    return np.asarray(m.view(np.ndarray), dtype=np.int64)


class Module:
    """Finite-dimensional left module: ``action[i]`` is the matrix of basis element b_i."""

    def __init__(self, algebra: BasedAlgebra, action: Sequence[linalg.Mat], name: str = "M",
                 validate: bool = True):
        if len(action) != algebra.dim:
            raise ModuleError(f"{name}: expected {algebra.dim} action matrices, got {len(action)}")
        self.algebra = algebra
        self.name = name
        self.action = [algebra.gf(np.asarray(a.view(np.ndarray) if isinstance(a, linalg.Mat) else a,
                                             dtype=np.int64) % algebra.p) for a in action]
        self.dim = self.action[0].shape[0]
        for a in self.action:
            if a.shape != (self.dim, self.dim):
                raise ModuleError(f"{name}: action matrices must all be {self.dim}x{self.dim}")
        self._memo: Dict = {}
        if validate:
            self.validate()

    def __repr__(self):
        return f"Module({self.name}, dim_vector={self.dim_vector})"

    @cached_property
    def _stack(self) -> np.ndarray:
        return np.stack([_ints(a) for a in self.action]) if self.dim else \
            np.zeros((self.algebra.dim, 0, 0), dtype=np.int64)

    def validate(self):
        a, p = self.algebra, self.algebra.p
        acts = self._stack
        lhs = np.einsum("iab,jbc->ijac", acts, acts) % p
        rhs = np.einsum("ijk,kac->ijac", a.constants, acts) % p
        if not np.array_equal(lhs, rhs):
            i, j = np.argwhere((lhs != rhs).any(axis=(2, 3)))[0]
            raise ModuleError(f"{self.name}: action of {a.labels[i]}*{a.labels[j]} violates the algebra relations")
        unit = sum(acts[e] for e in a.idempotents) % p if self.dim else acts[0]
        if not np.array_equal(unit, np.eye(self.dim, dtype=np.int64)):
            raise ModuleError(f"{self.name}: the unit does not act as the identity")

    def act(self, i: int) -> linalg.Mat:
        return self.action[i]

    def act_element(self, x: linalg.Mat) -> linalg.Mat:
        coeffs = _ints(x).ravel()
        return linalg.linear_combination(self.algebra.gf, coeffs, self.action, (self.dim, self.dim))

    @cached_property
    def dim_vector(self) -> Tuple[int, ...]:
        return tuple(linalg.rank(self.action[e]) for e in self.algebra.idempotents)

    @cached_property
    def generator_actions(self) -> List[linalg.Mat]:
        """Actions of the idempotents and arrows, which generate the algebra."""
        a = self.algebra
        gens = [self.action[e] for e in a.idempotents]
        arrows = a.presentation.arrow_vectors
        gens += [self.act_element(arrows[:, k:k + 1]) for k in range(arrows.shape[1])]
        return gens

    def renamed(self, name: str) -> "Module":
        clone = Module(self.algebra, self.action, name=name, validate=False)
        clone._memo = self._memo
        return clone

    def matrices(self) -> Dict[str, List[List[int]]]:
        return {label: linalg.to_lists(m) for label, m in zip(self.algebra.labels, self.action)}


class ModuleMap:
    """Intertwiner source -> target given by a (target.dim x source.dim) matrix."""

    def __init__(self, source: Module, target: Module, matrix: linalg.Mat, validate: bool = True):
        if source.algebra is not target.algebra:
            raise AlgebraError(f"map {source.name} -> {target.name} joins modules over different algebras")
        if matrix.shape != (target.dim, source.dim):
            raise ModuleError(f"map {source.name} -> {target.name} needs shape {(target.dim, source.dim)}, "
                              f"got {matrix.shape}")
        self.source = source
        self.target = target
        self.matrix = matrix
        if validate:
            self.validate()

    def __repr__(self):
        return f"ModuleMap({self.source.name} -> {self.target.name}, rank={self.rank})"

    def validate(self):
        p = self.source.algebra.p
        f = _ints(self.matrix)
        lhs = np.einsum("iab,bc->iac", self.target._stack, f) % p
        rhs = np.einsum("ab,ibc->iac", f, self.source._stack) % p
        if not np.array_equal(lhs, rhs):
            raise ModuleError(f"matrix {self.source.name} -> {self.target.name} is not a module map")

    @cached_property
    def rank(self) -> int:
        return linalg.rank(self.matrix)

    def is_zero(self) -> bool:
        return linalg.is_zero(self.matrix)


# constructors

def zero_module(a: BasedAlgebra, name: str = "0") -> Module:
    return Module(a, [linalg.zeros(a.gf, 0, 0) for _ in range(a.dim)], name=name, validate=False)


def regular_module(a: BasedAlgebra, name: Optional[str] = None) -> Module:
    return Module(a, a.left_regular_matrices, name=name or a.name, validate=False)


def module_from_arrows(a: BasedAlgebra, dims: Sequence[int], blocks: Dict[str, linalg.Mat],
                       name: str = "M", validate: bool = True) -> Module:
    """
    Module with vector space ⊕ k^{dims[v]} and arrow i -> j acting by blocks[label]
    (a dims[j] x dims[i] matrix); missing arrows act by zero.
    """
    pres = a.presentation
    gf = a.gf
    n = sum(dims)
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    vertex_proj = []
    for k in range(len(a.idempotents)):
        m = np.zeros((n, n), dtype=np.int64)
        m[offsets[k]:offsets[k + 1], offsets[k]:offsets[k + 1]] = np.eye(dims[k], dtype=np.int64)
        vertex_proj.append(m)
    arrow_mats = []
    for label, src, tgt in pres.arrows:
        m = np.zeros((n, n), dtype=np.int64)
        block = blocks.get(label)
        if block is not None:
            block = _ints(block) if isinstance(block, linalg.Mat) else np.asarray(block, dtype=np.int64)
            if block.shape != (dims[tgt], dims[src]):
                raise ModuleError(f"{name}: arrow {label} needs a {dims[tgt]}x{dims[src]} block, got {block.shape}")
            m[offsets[tgt]:offsets[tgt + 1], offsets[src]:offsets[src + 1]] = block
        arrow_mats.append(m)
    unknown = set(blocks) - {label for label, _, _ in pres.arrows}
    if unknown:
        raise ModuleError(f"{name}: unknown arrows {', '.join(sorted(unknown))}")
    word_mats = []
    for word in pres.words:
        m = np.eye(n, dtype=np.int64)
        for k in word:
            m = (arrow_mats[k] @ m) % a.p
        word_mats.append(m)
    columns = vertex_proj + word_mats
    action = []
    for t in range(a.dim):
        acc = np.zeros((n, n), dtype=np.int64)
        for c, m in zip(pres.expression[t], columns):
            if c:
                acc += int(c) * m
        action.append(gf(acc % a.p))
    return Module(a, action, name=name, validate=validate)


def submodule(m: Module, basis: linalg.Mat, name: str) -> Tuple[Module, "ModuleMap"]:
    """Module on an invariant subspace given by independent columns, with its inclusion."""
    if basis.shape[1] == 0:
        z = zero_module(m.algebra, name)
        return z, ModuleMap(z, m, linalg.zeros(m.algebra.gf, m.dim, 0), validate=False)
    action = [linalg.coordinates(basis, linalg.mul(a, basis)) for a in m.action]
    sub = Module(m.algebra, action, name=name, validate=False)
    return sub, ModuleMap(sub, m, basis, validate=False)


def quotient(m: Module, sub_span: linalg.Mat, name: str) -> Tuple[Module, "ModuleMap"]:
    """Module M / span(sub_span) with the projection."""
    gf = m.algebra.gf
    span = linalg.column_basis(sub_span) if sub_span.shape[1] else sub_span
    comp = linalg.complement_columns(span, m.dim)
    if comp.shape[1] == 0:
        z = zero_module(m.algebra, name)
        return z, ModuleMap(m, z, linalg.zeros(gf, 0, m.dim), validate=False)
    change = linalg.hstack(gf, [span, comp], m.dim)
    proj = linalg.inverse(change)[span.shape[1]:, :]
    action = [linalg.mul_all(proj, a, comp) for a in m.action]
    q = Module(m.algebra, action, name=name, validate=False)
    return q, ModuleMap(m, q, proj, validate=False)


def direct_sum(modules: Sequence[Module], name: Optional[str] = None,
               algebra: Optional[BasedAlgebra] = None) -> Tuple[Module, List[ModuleMap], List[ModuleMap]]:
    """Direct sum with its canonical inclusions and projections."""
    a = algebra or modules[0].algebra
    gf = a.gf
    if any(x.algebra is not a for x in modules):
        raise AlgebraError("direct sum of modules over different algebras")
    name = name or "⊕".join(x.name for x in modules) or "0"
    action = [linalg.block_diag(gf, [x.action[i] for x in modules]) if modules else linalg.zeros(gf, 0, 0)
              for i in range(a.dim)]
    total = Module(a, action, name=name, validate=False)
    incs, projs = [], []
    offset = 0
    for x in modules:
        inc = np.zeros((total.dim, x.dim), dtype=np.int64)
        inc[offset:offset + x.dim, :] = np.eye(x.dim, dtype=np.int64)
        incs.append(ModuleMap(x, total, gf(inc), validate=False))
        projs.append(ModuleMap(total, x, gf(inc.T.copy()), validate=False))
        offset += x.dim
    return total, incs, projs


def power_sum(m: Module, k: int, name: Optional[str] = None):
    return direct_sum([m] * k, name=name or (f"{m.name}^{k}" if k != 1 else m.name), algebra=m.algebra)


def dual_module(m: Module, name: Optional[str] = None) -> Module:
    """D(M) = Hom_k(M, k), a module over the opposite algebra acting by transposes."""
    op = opposite(m.algebra)
    action = [a.T.copy() for a in m.action]
    return Module(op, action, name=name or f"D({m.name})", validate=False)


def dual_map(f: ModuleMap) -> ModuleMap:
    return ModuleMap(dual_module(f.target), dual_module(f.source), f.matrix.T.copy(), validate=False)


# morphisms

def identity_map(m: Module) -> ModuleMap:
    return ModuleMap(m, m, linalg.identity(m.algebra.gf, m.dim), validate=False)


def zero_map(source: Module, target: Module) -> ModuleMap:
    return ModuleMap(source, target, linalg.zeros(source.algebra.gf, target.dim, source.dim), validate=False)


def compose(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    """f ∘ g."""
    if g.target is not f.source and (g.target.dim != f.source.dim):
        raise ModuleError(f"cannot compose {f} after {g}")
    return ModuleMap(g.source, f.target, linalg.mul(f.matrix, g.matrix), validate=False)


def combine(coeffs: Iterable[int], maps: Sequence[ModuleMap], source: Module, target: Module) -> ModuleMap:
    matrix = linalg.linear_combination(source.algebra.gf, coeffs, [f.matrix for f in maps],
                                       (target.dim, source.dim))
    return ModuleMap(source, target, matrix, validate=False)


def kernel(f: ModuleMap, name: Optional[str] = None) -> Tuple[Module, ModuleMap]:
    return submodule(f.source, linalg.kernel_basis(f.matrix), name or f"ker({f.source.name}→{f.target.name})")


def cokernel(f: ModuleMap, name: Optional[str] = None) -> Tuple[Module, ModuleMap]:
    return quotient(f.target, f.matrix, name or f"coker({f.source.name}→{f.target.name})")


def image(f: ModuleMap, name: Optional[str] = None) -> Tuple[Module, ModuleMap]:
    return submodule(f.target, linalg.column_basis(f.matrix), name or f"im({f.source.name}→{f.target.name})")


def is_injective(f: ModuleMap) -> bool:
    return f.rank == f.source.dim


def is_surjective(f: ModuleMap) -> bool:
    return f.rank == f.target.dim


def is_iso_map(f: ModuleMap) -> bool:
    return f.source.dim == f.target.dim and is_injective(f)


def pushout(f: ModuleMap, g: ModuleMap, name: Optional[str] = None) -> Tuple[Module, ModuleMap, ModuleMap]:
    """
    Pushout of B <-f- A -g-> C, realised as the cokernel of A -> B ⊕ C, a -> (f a, -g a).
    Returns (P, B -> P, C -> P).
    """
    if f.source is not g.source:
        raise ModuleError("pushout legs must share their source")
    gf = f.source.algebra.gf
    total, incs, _ = direct_sum([f.target, g.target])
    diff = ModuleMap(f.source, total, linalg.vstack(gf, [f.matrix, -g.matrix], f.source.dim), validate=False)
    po, proj = cokernel(diff, name or f"po({f.target.name},{g.target.name})")
    return po, compose(proj, incs[0]), compose(proj, incs[1])


def pullback(f: ModuleMap, g: ModuleMap, name: Optional[str] = None) -> Tuple[Module, ModuleMap, ModuleMap]:
    """Pullback of B -f-> D <-g- C as the kernel of B ⊕ C -> D; returns (P, P -> B, P -> C)."""
    if f.target is not g.target:
        raise ModuleError("pullback legs must share their target")
    gf = f.target.algebra.gf
    total, _, projs = direct_sum([f.source, g.source])
    diff = ModuleMap(total, f.target, linalg.hstack(gf, [f.matrix, -g.matrix], f.target.dim), validate=False)
    pb, inc = kernel(diff, name or f"pb({f.source.name},{g.source.name})")
    return pb, compose(projs[0], inc), compose(projs[1], inc)


# Hom

def hom_space(m: Module, n: Module) -> List[ModuleMap]:
    """Basis of Hom_A(M, N), solved as the linear system act_N(g) X = X act_M(g) over generators g."""
    if m.algebra is not n.algebra:
        raise AlgebraError(f"hom_space({m.name}, {n.name}): modules over different algebras")
    cache = m._memo.setdefault("hom", {})
    hit = cache.get(id(n))
    if hit is not None and hit[0] is n:
        return hit[1]
    basis = _solve_hom(m, n)
    cache[id(n)] = (n, basis)
    return basis


def _solve_hom(m: Module, n: Module) -> List[ModuleMap]:
    a, gf = m.algebra, m.algebra.gf
    if m.dim == 0 or n.dim == 0:
        return []
    if not any(x and y for x, y in zip(m.dim_vector, n.dim_vector)):
        return []
    rows = m.dim * n.dim
    blocks = []
    for gm, gn in zip(m.generator_actions, n.generator_actions):
        blocks.append(linalg.kron(gn, linalg.identity(gf, m.dim)) - linalg.kron(linalg.identity(gf, n.dim), gm.T.copy()))
    system = linalg.vstack(gf, blocks, rows)
    kern = linalg.kernel_basis(system)
    return [ModuleMap(m, n, linalg.unflatten(kern[:, k].copy(), n.dim, m.dim), validate=False)
            for k in range(kern.shape[1])]


def hom_dim(m: Module, n: Module) -> int:
    return len(hom_space(m, n))


def hom_matrix(basis: Sequence[ModuleMap], gf, rows: int, cols: int) -> linalg.Mat:
    """Columns are the flattened basis maps."""
    return linalg.hstack(gf, [linalg.flatten(f.matrix) for f in basis], rows * cols)


def induced_hom_rank(g: Module, f: ModuleMap) -> int:
    """Rank of Hom(G, f): Hom(G, X) -> Hom(G, Y)."""
    gf = g.algebra.gf
    images = [linalg.flatten(linalg.mul(f.matrix, h.matrix)) for h in hom_space(g, f.source)]
    return linalg.rank(linalg.hstack(gf, images, f.target.dim * g.dim))


def induced_cohom_rank(f: ModuleMap, g: Module) -> int:
    """Rank of Hom(f, G): Hom(Y, G) -> Hom(X, G)."""
    gf = g.algebra.gf
    images = [linalg.flatten(linalg.mul(h.matrix, f.matrix)) for h in hom_space(f.target, g)]
    return linalg.rank(linalg.hstack(gf, images, g.dim * f.source.dim))


# simples, projectives, injectives

def simples(a: BasedAlgebra) -> List[Module]:
    gf = a.gf
    out = []
    for k, v in enumerate(a.vertex_labels):
        action = [linalg.matrix(gf, [[a.characters[k][t]]]) for t in range(a.dim)]
        out.append(Module(a, action, name=f"S{v}", validate=False))
    return out


def indecomposable_projectives(a: BasedAlgebra) -> List[Module]:
    """P_k = A e_k, spanned by the basis elements right-multiplied by e_k."""
    regular = regular_module(a)
    out = []
    for k, v in enumerate(a.vertex_labels):
        basis = linalg.column_basis(a.right_regular_matrices[a.idempotents[k]])
        out.append(submodule(regular, basis, f"P{v}")[0])
    return out


def indecomposable_injectives(a: BasedAlgebra) -> List[Module]:
    """I_k = D(e_k A), where e_k A is the k-th projective of the opposite algebra."""
    return [dual_module(q, name=f"I{v}")
            for q, v in zip(indecomposable_projectives(opposite(a)), a.vertex_labels)]


def radical_inclusion(m: Module) -> Tuple[Module, ModuleMap]:
    a = m.algebra
    rad = a.radical
    images = [m.act_element(rad[:, k:k + 1]) for k in range(rad.shape[1])]
    span = linalg.column_basis(linalg.hstack(a.gf, images, m.dim)) if images else linalg.zeros(a.gf, m.dim, 0)
    return submodule(m, span, f"rad({m.name})")


def top(m: Module) -> Tuple[Module, ModuleMap]:
    rad, inc = radical_inclusion(m)
    return quotient(m, inc.matrix, f"top({m.name})")


# decomposition

@dataclass
class Summand:
    module: Module
    inclusion: ModuleMap
    projection: ModuleMap


def _nilpotent(x: linalg.Mat) -> bool:
    return linalg.is_zero(linalg.power(x, x.shape[0]))


def _fitting_split(m: Module, phi: linalg.Mat) -> Optional[Tuple[linalg.Mat, linalg.Mat]]:
    """(ker phi^n, im phi^n) bases when phi is neither invertible nor nilpotent."""
    high = linalg.power(phi, m.dim)
    r = linalg.rank(high)
    if r == 0 or r == m.dim:
        return None
    return linalg.kernel_basis(high), linalg.column_basis(high)


def _nilpotent_parts(m: Module, endo: List[linalg.Mat]) -> Optional[List[linalg.Mat]]:
    """phi - lambda*id for each basis element, or None when some phi has no single eigenvalue."""
    gf = m.algebra.gf
    ident = linalg.identity(gf, m.dim)
    shifted = []
    for phi in endo:
        for lam in range(m.algebra.p):
            candidate = phi - linalg.scalar(gf, lam) * ident
            if _nilpotent(candidate):
                shifted.append(candidate)
                break
        else:
            return None
    return shifted


def endomorphism_radical(m: Module) -> List[linalg.Mat]:
    """Spanning set of rad End(M) for an indecomposable M."""
    cached = m._memo.get("endo_radical")
    if cached is None:
        shifted = _nilpotent_parts(m, [f.matrix for f in hom_space(m, m)])
        if shifted is None:
            raise ModuleError(f"{m.name} is not indecomposable; End({m.name}) is not local")
        cached = [x for x in shifted if not linalg.is_zero(x)]
        m._memo["endo_radical"] = cached
    return cached


def _local_endomorphisms(m: Module, endo: List[linalg.Mat]) -> bool:
    """End(M) is local: each basis element is lambda*id + nilpotent and the nilpotent parts close under products."""
    gf = m.algebra.gf
    shifted = _nilpotent_parts(m, endo)
    if shifted is None:
        return False
    if not shifted:
        return True
    cols = hom_matrix([ModuleMap(m, m, s, validate=False) for s in shifted], gf, m.dim, m.dim)
    span = linalg.column_basis(cols)
    for x in shifted:
        for y in shifted:
            if not linalg.in_column_span(span, linalg.flatten(linalg.mul(x, y))):
                return False
    return True


def _splitting_candidates(m: Module, endo: List[linalg.Mat]):
    gf, p = m.algebra.gf, m.algebra.p
    ident = linalg.identity(gf, m.dim)
    for phi in endo:
        for lam in range(p):
            yield phi - linalg.scalar(gf, lam) * ident
    for x, y in product(endo, repeat=2):
        yield x + y
        yield linalg.mul(x, y)
    budget = settings().decomposition_budget
    total = p ** len(endo)
    if total > budget:
        raise BudgetExceeded(f"decomposition of {m.name}: {total} endomorphism combinations exceed the budget "
                             f"{budget}", budget="decomposition_budget")
    for coeffs in product(range(p), repeat=len(endo)):
        yield linalg.linear_combination(gf, coeffs, endo, (m.dim, m.dim))


def _split(m: Module) -> List[Summand]:
    if m.dim == 0:
        return []
    endo = [f.matrix for f in hom_space(m, m)]
    if _local_endomorphisms(m, endo):
        return [Summand(m, identity_map(m), identity_map(m))]
    for phi in _splitting_candidates(m, endo):
        halves = _fitting_split(m, phi)
        if halves is None:
            continue
        gf = m.algebra.gf
        ker_basis, im_basis = halves
        change = linalg.hstack(gf, [ker_basis, im_basis], m.dim)
        inv = linalg.inverse(change)
        parts = []
        offset = 0
        for basis in (ker_basis, im_basis):
            piece, inc = submodule(m, basis, m.name)
            proj = ModuleMap(m, piece, inv[offset:offset + basis.shape[1], :], validate=False)
            offset += basis.shape[1]
            for s in _split(piece):
                parts.append(Summand(s.module, compose(inc, s.inclusion), compose(s.projection, proj)))
        return parts
    # every swept endomorphism was invertible or nilpotent
    return [Summand(m, identity_map(m), identity_map(m))]


def decompose_with_maps(m: Module) -> List[Summand]:
    """Indecomposable summands (with repetition) plus split inclusions/projections."""
    cached = m._memo.get("summands")
    if cached is None:
        cached = _split(m)
        for k, s in enumerate(cached):
            s.module.name = f"{m.name}[{k}]" if len(cached) > 1 else m.name
        m._memo["summands"] = cached
    return cached


def decompose(m: Module) -> List[Tuple[Module, int]]:
    """Indecomposable summands up to isomorphism with multiplicities, in order of first appearance."""
    groups: List[List[Module]] = []
    for s in decompose_with_maps(m):
        for g in groups:
            if g[0].dim_vector == s.module.dim_vector and is_isomorphic(g[0], s.module):
                g.append(s.module)
                break
        else:
            groups.append([s.module])
    return [(g[0], len(g)) for g in groups]


def is_indecomposable(m: Module) -> bool:
    return m.dim > 0 and len(decompose_with_maps(m)) == 1


# isomorphism

def _invertible_in_span(basis: List[ModuleMap]) -> Optional[ModuleMap]:
    for f in basis:
        if linalg.is_invertible(f.matrix):
            return f
    for f, g in product(basis, repeat=2):
        c = combine([1, 1], [f, g], f.source, f.target)
        if linalg.is_invertible(c.matrix):
            return c
    return None


def find_isomorphism(m: Module, n: Module) -> Optional[ModuleMap]:
    """An invertible intertwiner M -> N, or None when M and N are not isomorphic."""
    if m.algebra is not n.algebra:
        raise AlgebraError(f"is_isomorphic({m.name}, {n.name}): modules over different algebras")
    if m.dim != n.dim or m.dim_vector != n.dim_vector:
        return None
    if m.dim == 0:
        return ModuleMap(m, n, linalg.zeros(m.algebra.gf, 0, 0), validate=False)
    basis = hom_space(m, n)
    if not basis:
        return None
    found = _invertible_in_span(basis)
    if found is not None:
        return found
    if is_indecomposable(m):
        # Hom(M, N) ≅ End(M) is local, so some basis element would be invertible
        return None
    return _match_summands(m, n)


def _match_summands(m: Module, n: Module) -> Optional[ModuleMap]:
    ms, ns = decompose_with_maps(m), decompose_with_maps(n)
    if len(ms) != len(ns):
        return None
    gf = m.algebra.gf
    unused = list(range(len(ns)))
    total = linalg.zeros(gf, n.dim, m.dim)
    for s in ms:
        for idx in unused:
            iso = find_isomorphism(s.module, ns[idx].module)
            if iso is not None:
                total = total + linalg.mul_all(ns[idx].inclusion.matrix, iso.matrix, s.projection.matrix)
                unused.remove(idx)
                break
        else:
            return None
    return ModuleMap(m, n, total, validate=False)


def is_isomorphic(m: Module, n: Module) -> bool:
    return find_isomorphism(m, n) is not None


def in_additive_closure(m: Module, summands: Sequence[Module]) -> bool:
    """M ∈ add(⊕ summands)."""
    return all(any(is_isomorphic(s.module, t) for t in summands) for s in decompose_with_maps(m))


def multiplicities(m: Module, summands: Sequence[Module]) -> Optional[List[int]]:
    """Multiplicity of each listed indecomposable in M, or None when M has other summands."""
    counts = [0] * len(summands)
    for s in decompose_with_maps(m):
        for k, t in enumerate(summands):
            if is_isomorphic(s.module, t):
                counts[k] += 1
                break
        else:
            return None
    return counts


# enumeration

def _dim_vectors(bound: Sequence[int]) -> List[Tuple[int, ...]]:
    vecs = [v for v in product(*(range(b + 1) for b in bound)) if any(v)]
    return sorted(vecs, key=lambda v: (sum(v), v))


def _candidates(a: BasedAlgebra, d: Tuple[int, ...]):
    arrows = a.presentation.arrows
    sizes = [d[tgt] * d[src] for _, src, tgt in arrows]
    for entries in product(range(a.p), repeat=sum(sizes)):
        blocks, offset = {}, 0
        for (label, src, tgt), size in zip(arrows, sizes):
            blocks[label] = np.asarray(entries[offset:offset + size], dtype=np.int64).reshape((d[tgt], d[src]))
            offset += size
        yield blocks


def _indecomposable_candidate(args) -> Optional[Module]:
    a, d, blocks, name = args
    try:
        m = module_from_arrows(a, d, blocks, name=name)
    except ModuleError:
        return None
    return m if is_indecomposable(m) else None


def enumerate_indecomposables(a: BasedAlgebra, bound: Sequence[int], jobs: Optional[int] = None) -> List[Module]:
    """
    Complete duplicate-free list of indecomposables with dimension vector <= bound,
    by exhaustive scan over arrow matrices satisfying the relations.
    """
    if len(bound) != len(a.idempotents):
        raise ModuleError(f"bound {tuple(bound)} needs {len(a.idempotents)} components")
    cfg = settings()
    jobs = jobs or cfg.jobs
    arrows = a.presentation.arrows
    found: List[Module] = []
    for d in _dim_vectors(bound):
        entries = sum(d[tgt] * d[src] for _, src, tgt in arrows)
        count = a.p ** entries
        if count > cfg.enumeration_budget:
            raise BudgetExceeded(f"dimension vector {d}: {count} action tuples exceed the enumeration budget "
                                 f"{cfg.enumeration_budget}", budget="enumeration_budget")
        label = "X" + "".join(str(x) for x in d)
        work = ((a, d, blocks, label) for blocks in _candidates(a, d))
        same_d: List[Module] = []
        for m in parallel_map(_indecomposable_candidate, work, jobs, desc=f"{a.name} {d}", total=count):
            if m is None:
                continue
            if any(is_isomorphic(m, x) for x in same_d):
                continue
            same_d.append(m)
        for k, m in enumerate(same_d):
            m.name = label if len(same_d) == 1 else f"{label}_{k + 1}"
        found.extend(same_d)
        logger.info(f"🔎 {a.name} dim vector {d}: {len(same_d)} indecomposables from {count} tuples")
    return found
