# engine/homology.py
"""
Projective covers, minimal resolutions, Ext, Tor, projective dimensions and
minimal add(T)-approximations.

A resolution keeps its syzygies Ω^0 = M, Ω^1, ... with inclusions
ι_k: Ω^k -> P_{k-1}, so Ext^k(M, N) = dim Hom(Ω^k, N) - rank Hom(ι_k, N)
and Tor_k(Y, M) = dim ker(Ω^k Y ⊗ M -> Q_{k-1} ⊗ M).
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from app_config import settings
from engine import linalg
from engine.algebra import BasedAlgebra, opposite
from engine.errors import AlgebraError, ModuleError, UndecidedError
from engine.modcat import (Module, ModuleMap, compose, direct_sum, dual_module, endomorphism_radical,
                           hom_dim, hom_space, identity_map, indecomposable_projectives, induced_cohom_rank,
                           is_isomorphic, is_surjective, kernel, simples, top, zero_map, zero_module)
from engine.verdict import DimResult
from utils.logger import get_logger

logger = get_logger("homology")


@dataclass(frozen=True)
class LengthFlag:
    kind: str                      # finite | truncated | periodic
    n: Optional[int] = None        # length for finite, cutoff for truncated
    period: Optional[int] = None
    entry: Optional[int] = None    # syzygy index that repeats an earlier one

    @classmethod
    def finite(cls, n: int) -> "LengthFlag":
        return cls("finite", n=n)

    @classmethod
    def truncated(cls, cutoff: int) -> "LengthFlag":
        return cls("truncated", n=cutoff)

    @classmethod
    def periodic(cls, period: int, entry: int) -> "LengthFlag":
        return cls("periodic", period=period, entry=entry)

    def __str__(self):
        if self.kind == "periodic":
            return f"periodic({self.period}, {self.entry})"
        return f"{'finite' if self.kind == 'finite' else 'truncated_at'}({self.n})"

    def to_dict(self):
        return {k: v for k, v in (("kind", self.kind), ("n", self.n), ("period", self.period),
                                  ("entry", self.entry)) if v is not None}


@dataclass
class Resolution:
    """
    target M; terms P_0, P_1, ...; differentials d_0: P_0 -> M, d_k: P_k -> P_{k-1};
    syzygies Ω^0 = M, Ω^1, ...; inclusions[k-1] = ι_k: Ω^k -> P_{k-1}.
    """
    target: Module
    terms: List[Module]
    differentials: List[ModuleMap]
    syzygies: List[Module]
    inclusions: List[ModuleMap]
    covers: List[ModuleMap]
    flag: LengthFlag
    relative: bool = False

    @property
    def length(self) -> Optional[int]:
        return self.flag.n if self.flag.kind == "finite" else None

    def reduce_degree(self, k: int) -> Optional[int]:
        """Degree <= last computed syzygy with the same Ext/Tor, None when it vanishes."""
        last = len(self.syzygies) - 1
        if k <= last:
            return k
        if self.flag.kind == "finite":
            return None
        if self.flag.kind == "periodic":
            while k > last:
                k -= self.flag.period
            return k
        raise UndecidedError(f"resolution of {self.target.name} truncated at {self.flag.n}; "
                             f"degree {k} is undecided at cutoff")

    def syzygy(self, k: int) -> Module:
        reduced = self.reduce_degree(k)
        if reduced is None:
            return zero_module(self.target.algebra)
        return self.syzygies[reduced]


@dataclass
class ExtTable:
    source: Module
    target: Module
    dims: List[int] = field(default_factory=list)


# covers and approximations

def projective_cover(m: Module) -> ModuleMap:
    """Surjection ⊕ P_k^{m_k} -> M with m_k the multiplicity of S_k in top(M)."""
    a, gf = m.algebra, m.algebra.gf
    if m.dim == 0:
        return zero_map(zero_module(a), m)
    _, to_top = top(m)
    projectives = indecomposable_projectives_cached(a)
    summands, columns = [], []
    for k, e in enumerate(a.idempotents):
        ek = m.action[e]
        picked = linalg.independent_columns(linalg.mul(to_top.matrix, ek))
        for c in picked:
            x = ek[:, c:c + 1]
            pk = projectives[k]
            embed = pk._memo["embedding"]
            cols = [linalg.mul(m.act_element(embed[:, j:j + 1]), x) for j in range(pk.dim)]
            summands.append(pk)
            columns.append(linalg.hstack(gf, cols, m.dim))
    cover_module, _, _ = direct_sum(summands, name=_sum_name(summands), algebra=a)
    cover = ModuleMap(cover_module, m, linalg.hstack(gf, columns, m.dim), validate=False)
    if not is_surjective(cover):
        raise ModuleError(f"projective cover of {m.name} is not surjective")
    return cover


def indecomposable_projectives_cached(a: BasedAlgebra) -> List[Module]:
    """Projectives built once per algebra, each remembering its embedding into A."""
    cached = a._memo.get("projectives")
    if cached is None:
        cached = indecomposable_projectives(a)
        for k, pk in enumerate(cached):
            pk._memo["embedding"] = linalg.column_basis(a.right_regular_matrices[a.idempotents[k]])
        a._memo["projectives"] = cached
    return cached


def _sum_name(summands: Sequence[Module]) -> str:
    if not summands:
        return "0"
    parts, counts = [], {}
    for s in summands:
        if s.name not in counts:
            parts.append(s.name)
        counts[s.name] = counts.get(s.name, 0) + 1
    return "⊕".join(p if counts[p] == 1 else f"{p}^{counts[p]}" for p in parts)


def _radical_maps(source: Module, target: Module, same: bool) -> List[linalg.Mat]:
    if same:
        return endomorphism_radical(source)
    return [f.matrix for f in hom_space(source, target)]


def right_approximation(m: Module, summands: Sequence[Module]) -> ModuleMap:
    """
    Minimal right add(T)-approximation T_0 -> M: for each T_i keep a complement
    in Hom(T_i, M) of the maps factoring through radical maps T_i -> T_j.
    """
    a, gf = m.algebra, m.algebra.gf
    if any(m is t for t in summands):
        return identity_map(m)
    chosen_modules, chosen_maps = [], []
    for i, ti in enumerate(summands):
        basis = hom_space(ti, m)
        if not basis:
            continue
        rad_images = []
        for j, tj in enumerate(summands):
            radical = _radical_maps(ti, tj, i == j)
            if not radical:
                continue
            for g in hom_space(tj, m):
                rad_images.extend(linalg.flatten(linalg.mul(g.matrix, h)) for h in radical)
        span = linalg.column_basis(linalg.hstack(gf, rad_images, m.dim * ti.dim))
        for f in basis:
            v = linalg.flatten(f.matrix)
            if not linalg.in_column_span(span, v):
                chosen_modules.append(ti)
                chosen_maps.append(f.matrix)
                span = linalg.hstack(gf, [span, v], m.dim * ti.dim)
    source, _, _ = direct_sum(chosen_modules, name=_sum_name(chosen_modules), algebra=a)
    return ModuleMap(source, m, linalg.hstack(gf, chosen_maps, m.dim), validate=False)


def left_approximation(m: Module, summands: Sequence[Module]) -> ModuleMap:
    """Minimal left add(T)-approximation M -> T^0, dual to ``right_approximation``."""
    a, gf = m.algebra, m.algebra.gf
    if any(m is t for t in summands):
        return identity_map(m)
    chosen_modules, chosen_maps = [], []
    for i, ti in enumerate(summands):
        basis = hom_space(m, ti)
        if not basis:
            continue
        rad_images = []
        for j, tj in enumerate(summands):
            radical = _radical_maps(tj, ti, i == j)
            if not radical:
                continue
            for g in hom_space(m, tj):
                rad_images.extend(linalg.flatten(linalg.mul(h, g.matrix)) for h in radical)
        span = linalg.column_basis(linalg.hstack(gf, rad_images, ti.dim * m.dim))
        for f in basis:
            v = linalg.flatten(f.matrix)
            if not linalg.in_column_span(span, v):
                chosen_modules.append(ti)
                chosen_maps.append(f.matrix)
                span = linalg.hstack(gf, [span, v], ti.dim * m.dim)
    target, _, _ = direct_sum(chosen_modules, name=_sum_name(chosen_modules), algebra=a)
    return ModuleMap(m, target, linalg.vstack(gf, chosen_maps, m.dim), validate=False)


# resolutions

def build_resolution(m: Module, cover: Callable[[Module], ModuleMap], cutoff: int,
                     relative: bool = False) -> Resolution:
    """Iterate covers on syzygies until one vanishes, repeats an earlier one, or the cutoff is hit."""
    if m.dim == 0:
        return Resolution(m, [], [], [m], [], [], LengthFlag.finite(0), relative)
    terms, diffs, syzygies, incs, covers = [], [], [m], [], []
    k = 0
    while True:
        pi = cover(syzygies[k])
        if not is_surjective(pi):
            raise ModuleError(f"cover of {syzygies[k].name} is not surjective")
        terms.append(pi.source)
        covers.append(pi)
        diffs.append(pi if k == 0 else compose(incs[k - 1], pi))
        omega, iota = kernel(pi, name=f"Ω{k + 1}({m.name})")
        syzygies.append(omega)
        incs.append(iota)
        if omega.dim == 0:
            flag = LengthFlag.finite(k)
            break
        repeat = next((j for j in range(k + 1) if is_isomorphic(omega, syzygies[j])), None)
        if repeat is not None:
            flag = LengthFlag.periodic(k + 1 - repeat, k + 1)
            break
        if k >= cutoff:
            flag = LengthFlag.truncated(cutoff)
            break
        k += 1
    logger.debug(f"resolution of {m.name}: {flag}")
    return Resolution(m, terms, diffs, syzygies, incs, covers, flag, relative)


def minimal_resolution(m: Module, cutoff: Optional[int] = None) -> Resolution:
    cutoff = settings().cutoff if cutoff is None else cutoff
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    cache = m._memo.setdefault("resolutions", {})
    key = ("abelian", cutoff)
    if key not in cache:
        cache[key] = build_resolution(m, projective_cover, cutoff)
    return cache[key]


def syzygy(m: Module, k: int, cutoff: Optional[int] = None) -> Module:
    return minimal_resolution(m, max(k, settings().cutoff if cutoff is None else cutoff)).syzygy(k)


def ext_from_resolution(res: Resolution, n: Module, k: int) -> int:
    if k < 0:
        raise ValueError("Ext degree must be non-negative")
    if k == 0:
        return hom_dim(res.target, n)
    reduced = res.reduce_degree(k)
    if reduced is None:
        return 0
    omega, iota = res.syzygies[reduced], res.inclusions[reduced - 1]
    return hom_dim(omega, n) - induced_cohom_rank(iota, n)


def ext(m: Module, n: Module, i: int, cutoff: Optional[int] = None) -> int:
    """dim Ext^i(M, N) from the minimal projective resolution of M."""
    if m.algebra is not n.algebra:
        raise AlgebraError(f"ext({m.name}, {n.name}): modules over different algebras")
    return ext_from_resolution(minimal_resolution(m, cutoff), n, i)


def ext_table(m: Module, n: Module, upto: int, cutoff: Optional[int] = None) -> ExtTable:
    return ExtTable(m, n, [ext(m, n, i, cutoff) for i in range(upto + 1)])


# Tor

def _tensor_relations(y: Module, m: Module) -> linalg.Mat:
    """Columns span {y·g ⊗ x - y ⊗ g·x} inside Y ⊗_k M, over generators g of the algebra."""
    a, gf = m.algebra, m.algebra.gf
    if y.algebra is not opposite(a):
        raise AlgebraError(f"tor: {y.name} must be a module over the opposite of {a.name}")
    gens = [a.basis_vector(e) for e in a.idempotents]
    arrows = a.presentation.arrow_vectors
    gens += [arrows[:, k:k + 1] for k in range(arrows.shape[1])]
    iy, im = linalg.identity(gf, y.dim), linalg.identity(gf, m.dim)
    blocks = [linalg.kron(y.act_element(g), im) - linalg.kron(iy, m.act_element(g)) for g in gens]
    return linalg.hstack(gf, blocks, y.dim * m.dim)


def tensor_dim(y: Module, m: Module) -> int:
    if y.dim == 0 or m.dim == 0:
        return 0
    return y.dim * m.dim - linalg.rank(_tensor_relations(y, m))


def _tensor_kernel_dim(f: ModuleMap, m: Module) -> int:
    """dim ker(f ⊗ M) for f: Y1 -> Y2 between right modules."""
    gf = m.algebra.gf
    y1, y2 = f.source, f.target
    if y1.dim == 0 or m.dim == 0:
        return 0
    source_dim = tensor_dim(y1, m)
    rel2 = _tensor_relations(y2, m) if y2.dim else linalg.zeros(gf, 0, 0)
    image = linalg.kron(f.matrix, linalg.identity(gf, m.dim))
    rank_rel2 = linalg.rank(rel2)
    induced = linalg.rank(linalg.hstack(gf, [image, rel2], y2.dim * m.dim)) - rank_rel2
    return source_dim - induced


def tor(y: Module, m: Module, i: int, cutoff: Optional[int] = None) -> int:
    """dim Tor_i(Y, M) for a right module Y (a module over the opposite algebra)."""
    if i < 0:
        raise ValueError("Tor degree must be non-negative")
    if i == 0:
        return tensor_dim(y, m)
    res = minimal_resolution(y, cutoff)
    reduced = res.reduce_degree(i)
    if reduced is None:
        return 0
    return _tensor_kernel_dim(res.inclusions[reduced - 1], m)


# dimensions

def pdim_from_resolution(res: Resolution) -> DimResult:
    if res.flag.kind == "finite":
        return DimResult.finite(res.flag.n, str(res.flag))
    if res.flag.kind == "periodic":
        return DimResult.infinite(str(res.flag))
    return DimResult.undecided(str(res.flag))


def pdim(m: Module, structure=None, cutoff: Optional[int] = None) -> DimResult:
    """Projective dimension in the given exact structure (abelian when None)."""
    if structure is not None:
        return pdim_from_resolution(structure.resolution(m, cutoff))
    return pdim_from_resolution(minimal_resolution(m, cutoff))


def idim(m: Module, cutoff: Optional[int] = None) -> DimResult:
    """Injective dimension, as the projective dimension of D(M) over the opposite algebra."""
    return pdim(dual_module(m), cutoff=cutoff)


def gldim(a: BasedAlgebra, structure=None, cutoff: Optional[int] = None,
          tests: Optional[Sequence[Module]] = None) -> DimResult:
    """Max pdim over simples (abelian) or max relative pdim over the supplied test modules."""
    if structure is None or structure.is_abelian:
        return DimResult.maximum(pdim(s, cutoff=cutoff) for s in simples_cached(a))
    if tests is None:
        raise ValueError("relative gldim needs a finite list of test modules")
    return DimResult.maximum(pdim(t, structure, cutoff) for t in tests)


def simples_cached(a: BasedAlgebra) -> List[Module]:
    cached = a._memo.get("simples")
    if cached is None:
        cached = simples(a)
        a._memo["simples"] = cached
    return cached


def euler_form(m: Module, n: Module) -> int:
    """<dim M, dim N> = Σ_v d_v e_v - Σ_{a: i -> j} d_i e_j, for path algebras without relations."""
    q = m.algebra.quiver
    if q is None or q.relations:
        raise AlgebraError("the Euler form oracle needs a path algebra without relations")
    d, e = m.dim_vector, n.dim_vector
    index = {v: k for k, v in enumerate(q.vertices)}
    return sum(x * y for x, y in zip(d, e)) - sum(d[index[s]] * e[index[t]] for _, s, t in q.arrows)
