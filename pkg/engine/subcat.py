# engine/subcat.py
"""
Subcategory operators as decision procedures over an exact structure:
perpendicular classes, gen_n / pres_n / Reso_n chains built from minimal
right approximations, Cores_n cochains built from minimal left
approximations, and resolving / coresolving tests on a finite universe.
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement, product
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from app_config import settings
from engine.errors import BudgetExceeded, ModuleError, UndecidedError
from engine.exactstruct import ExactStructure, extensions, is_conflation
from engine.homology import left_approximation, right_approximation
from engine.modcat import (Module, ModuleMap, cokernel, combine, compose, decompose, direct_sum, hom_dim, hom_space,
                           in_additive_closure, indecomposable_injectives, is_injective, is_isomorphic, is_surjective,
                           kernel)
from engine.verdict import Check, Verdict
from utils.logger import get_logger
from utils.parallel import parallel_map

logger = get_logger("subcat")

MINIMAL = "minimal-chain"
FALLBACK = "exhaustive-fallback"


@dataclass
class SubcatSpec:
    """add(⊕ summands) for pairwise non-isomorphic indecomposable summands."""
    name: str
    summands: List[Module]

    def __post_init__(self):
        for i, x in enumerate(self.summands):
            if x.dim == 0:
                raise ModuleError(f"{self.name}: zero summand")
            for y in self.summands[:i]:
                if is_isomorphic(x, y):
                    raise ModuleError(f"{self.name}: summands {y.name} and {x.name} are isomorphic")

    @classmethod
    def of(cls, modules: Iterable[Module], name: Optional[str] = None) -> "SubcatSpec":
        """Basic spec from arbitrary modules; indecomposable inputs are kept as given."""
        summands: List[Module] = []
        for m in modules:
            dec = decompose(m)
            parts = [m] if len(dec) == 1 and dec[0][1] == 1 else [x for x, _ in dec]
            for x in parts:
                if x.dim and not any(is_isomorphic(x, y) for y in summands):
                    summands.append(x)
        return cls(name or "add(" + "⊕".join(x.name for x in summands) + ")", summands)

    def __len__(self):
        return len(self.summands)

    def __iter__(self):
        return iter(self.summands)

    @property
    def names(self) -> List[str]:
        return [x.name for x in self.summands]

    @cached_property
    def sum_module(self) -> Module:
        return direct_sum(self.summands, name="⊕".join(self.names) or "0",
                          algebra=self.summands[0].algebra if self.summands else None)[0]

    def contains(self, m: Module) -> bool:
        return in_additive_closure(m, self.summands)

    def index_of(self, m: Module) -> Optional[int]:
        for k, x in enumerate(self.summands):
            if x is m or is_isomorphic(x, m):
                return k
        return None

    def same_as(self, other: "SubcatSpec") -> bool:
        return len(self) == len(other) and all(other.index_of(x) is not None for x in self.summands)

    def is_subset_of(self, other: "SubcatSpec") -> bool:
        return all(other.index_of(x) is not None for x in self.summands)


@dataclass
class Universe:
    """Finite duplicate-free stand-in for the ambient category."""
    modules: List[Module]
    structure: ExactStructure

    def __post_init__(self):
        for i, x in enumerate(self.modules):
            for y in self.modules[:i]:
                if is_isomorphic(x, y):
                    raise ModuleError(f"universe lists {y.name} and {x.name}, which are isomorphic")

    def __len__(self):
        return len(self.modules)

    def __iter__(self):
        return iter(self.modules)

    def lookup(self, m: Module) -> Optional[Module]:
        return next((x for x in self.modules if x is m or is_isomorphic(x, m)), None)


@dataclass
class Chain:
    """
    Approximation chain. Right chains: maps[i]: X_i -> K_i, links[i]: K_{i+1} -> X_i.
    Left chains: maps[i]: C_i -> T^i, links[i]: T^i -> C_{i+1}. K_0 = C_0 = start.
    """
    direction: str
    start: Module
    maps: List[ModuleMap] = field(default_factory=list)
    links: List[ModuleMap] = field(default_factory=list)

    @property
    def end(self) -> Module:
        return self.links[-1].source if self.direction == "right" and self.links else \
            self.links[-1].target if self.links else self.start

    @property
    def terms(self) -> List[Module]:
        return [f.source if self.direction == "right" else f.target for f in self.maps]

    def describe(self) -> List[str]:
        arrow = "↠" if self.direction == "right" else "↪"
        out = []
        for f in self.maps:
            out.append(f"{f.source.name} {arrow} {f.target.name}")
        return out


def chain_is_exact(chain: Chain) -> bool:
    """Each stage is a short exact sequence glued along the links."""
    for f, link in zip(chain.maps, chain.links):
        if chain.direction == "right":
            ok = is_surjective(f) and is_injective(link) and compose(f, link).is_zero() \
                and link.source.dim + f.target.dim == f.source.dim
        else:
            ok = is_injective(f) and is_surjective(link) and compose(link, f).is_zero() \
                and link.target.dim + f.source.dim == f.target.dim
        if not ok:
            return False
    return True


# perpendicular classes

def _degrees(s: ExactStructure, t: Module, cutoff: Optional[int]) -> Tuple[List[int], bool]:
    """Degrees that decide Ext^{>=1}(T, -), and whether that list is certified complete."""
    res = s.resolution(t, cutoff)
    last = len(res.syzygies) - 1
    if res.flag.kind == "finite":
        return list(range(1, res.flag.n + 1)), True
    return list(range(1, last + 1)), res.flag.kind == "periodic"


def in_perp(t: SubcatSpec, m: Module, s: ExactStructure, degrees: Optional[Sequence[int]] = None,
            cutoff: Optional[int] = None) -> Verdict:
    """
    Ext^i(T_j, M) = 0 for all summands and all listed degrees; without a list,
    for all i >= 1 up to each summand's certified resolution length.
    """
    label = f"{m.name} ∈ {t.name}^⊥"
    checks = []
    undecided = []
    for x in t.summands:
        if degrees is None:
            span, certified = _degrees(s, x, cutoff)
            if not certified:
                undecided.append(x.name)
        else:
            span = list(degrees)
        for i in span:
            value = s.ext(x, m, i, cutoff)
            checks.append(Check("ext" if s.is_abelian else "relative_ext", {"M": x.name, "N": m.name, "i": i}, value))
            if value:
                return Verdict.of(label, False, witness={"ext": {"M": x.name, "N": m.name, "i": i, "dim": value}},
                                  checks=checks)
    if undecided:
        return Verdict.undecided(label, f"pdim of {', '.join(undecided)} undecided at cutoff", checks=checks)
    return Verdict.of(label, True, checks=checks)


def perp_members(t: SubcatSpec, universe: Universe, cutoff: Optional[int] = None) -> List[Module]:
    verdicts = parallel_map(lambda x: in_perp(t, x, universe.structure, cutoff=cutoff), universe.modules,
                            settings().jobs)
    members = [x for x, v in zip(universe.modules, verdicts) if v]
    logger.debug(f"{t.name}^⊥ over the universe: {[x.name for x in members]}")
    return members


# chains

def _right_chain(t: SubcatSpec, m: Module, stages: int, s: ExactStructure,
                 hom_exact: bool = False) -> Tuple[Chain, Optional[str]]:
    chain = Chain("right", m)
    current = m
    for i in range(stages):
        if current.dim == 0:
            break
        f = right_approximation(current, t.summands)
        if not s.is_deflation(f):
            return chain, f"stage {i}: approximation {f.source.name} → {current.name} is not a deflation"
        k, inc = kernel(f, name=f"K{i + 1}({m.name})")
        if hom_exact:
            for x in t.summands:
                if hom_dim(x, f.source) != hom_dim(x, k) + hom_dim(x, current):
                    return chain, f"stage {i}: Hom({x.name}, -) is not exact on {k.name} → {f.source.name} → {current.name}"
        chain.maps.append(f)
        chain.links.append(inc)
        current = k
    return chain, None


def _left_chain(t: SubcatSpec, m: Module, stages: int, s: ExactStructure) -> Tuple[Chain, Optional[str]]:
    chain = Chain("left", m)
    current = m
    for i in range(stages):
        if current.dim == 0 or t.contains(current):
            break
        f = left_approximation(current, t.summands)
        if not s.is_inflation(f):
            return chain, f"stage {i}: approximation {current.name} → {f.target.name} is not an inflation"
        c, proj = cokernel(f, name=f"C{i + 1}({m.name})")
        chain.maps.append(f)
        chain.links.append(proj)
        current = c
    return chain, None


def _fallback(t: SubcatSpec, current: Module, stages: int, s: ExactStructure, right: bool,
              accept: Callable[[Module], bool], spent: List[int]) -> bool:
    """Depth-first search over maps between current and sums of at most fallback_depth summands."""
    if stages == 0 or current.dim == 0:
        return accept(current)
    cfg = settings()
    p = current.algebra.p
    for size in range(1, cfg.fallback_depth + 1):
        for combo in combinations_with_replacement(range(len(t)), size):
            x, _, _ = direct_sum([t.summands[k] for k in combo])
            basis = hom_space(x, current) if right else hom_space(current, x)
            spent[0] += p ** len(basis)
            if spent[0] > cfg.enumeration_budget:
                raise BudgetExceeded("exhaustive chain search exceeded the enumeration budget",
                                     budget="enumeration_budget")
            source, target = (x, current) if right else (current, x)
            for coeffs in product(range(p), repeat=len(basis)):
                g = combine(coeffs, basis, source, target)
                if right and s.is_deflation(g):
                    nxt, _ = kernel(g)
                elif not right and s.is_inflation(g):
                    nxt, _ = cokernel(g)
                else:
                    continue
                if _fallback(t, nxt, stages - 1, s, right, accept, spent):
                    return True
    return False


def _chain_verdict(label: str, chain: Chain, failure: Optional[str], ok_end: bool,
                   fallback: Optional[Callable[[], bool]] = None) -> Verdict:
    witness = {"chain": chain.describe(), "method": MINIMAL}
    if failure is None and ok_end:
        return Verdict.of(label, True, witness={**witness, "end": chain.end.name}, data=chain)
    witness["failure"] = failure or f"last term {chain.end.name} is not in the subcategory"
    if fallback is not None and settings().exhaustive_fallback:
        found = fallback()
        witness["method"] = FALLBACK
        return Verdict.of(label, found, witness=witness, data=chain)
    return Verdict.of(label, False, witness=witness, data=chain)


def in_pres_n(t: SubcatSpec, m: Module, n: int, s: ExactStructure) -> Verdict:
    """Right exact X_n -> ... -> X_0 -> M -> 0 with X_i ∈ add(T)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    chain, failure = _right_chain(t, m, n + 1, s)
    fb = lambda: _fallback(t, m, n + 1, s, True, lambda _: True, [0])
    return _chain_verdict(f"{m.name} ∈ pres_{n}({t.name})", chain, failure, True, fb)


def in_gen_n(t: SubcatSpec, m: Module, n: int, s: ExactStructure) -> Verdict:
    """The pres_n chain with Hom(T', -) exact on every stage."""
    if n < 0:
        raise ValueError("n must be non-negative")
    chain, failure = _right_chain(t, m, n + 1, s, hom_exact=True)
    return _chain_verdict(f"{m.name} ∈ gen_{n}({t.name})", chain, failure, True)


def in_reso_n(t: SubcatSpec, m: Module, n: int, s: ExactStructure) -> Verdict:
    """0 -> X_n -> ... -> X_0 -> M -> 0 exact with X_i ∈ add(T)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    chain, failure = _right_chain(t, m, n, s)
    ok_end = failure is None and t.contains(chain.end)
    fb = lambda: _fallback(t, m, n, s, True, t.contains, [0])
    return _chain_verdict(f"{m.name} ∈ Reso_{n}({t.name})", chain, failure, ok_end, fb)


def in_cores_n(t: SubcatSpec, m: Module, n: int, s: ExactStructure) -> Verdict:
    """0 -> M -> T^0 -> ... -> T^n -> 0 exact with T^i ∈ add(T)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    chain, failure = _left_chain(t, m, n, s)
    ok_end = failure is None and t.contains(chain.end)
    fb = lambda: _fallback(t, m, n, s, False, t.contains, [0])
    return _chain_verdict(f"{m.name} ∈ Cores_{n}({t.name})", chain, failure, ok_end, fb)


# closure predicates

def _closed_under_extensions(t: SubcatSpec, s: ExactStructure) -> Optional[dict]:
    for a, c in product(t.summands, repeat=2):
        for e in extensions(a, c)[1:]:
            if is_conflation(s, e.conflation) and not t.contains(e.middle):
                return {"extension": [a.name, c.name], "middle": e.middle.dim_vector}
    return None


def _morphisms(x: Module, y: Module) -> Iterable[ModuleMap]:
    basis = hom_space(x, y)
    p = x.algebra.p
    budget = settings().extension_budget
    if p ** len(basis) > budget:
        raise BudgetExceeded(f"Hom({x.name}, {y.name}) has {p ** len(basis)} elements, over the budget {budget}",
                             budget="extension_budget")
    for coeffs in product(range(p), repeat=len(basis)):
        yield combine(coeffs, basis, x, y)


def is_resolving(t: SubcatSpec, universe: Universe) -> Verdict:
    """
    Contains the projectives, closed under kernels of deflations and under
    extensions between summands, and every universe member is a quotient of add(T).
    """
    s = universe.structure
    label = f"{t.name} resolving"
    for p in s.projective_summands:
        if t.index_of(p) is None:
            return Verdict.of(label, False, witness={"missing_projective": p.name})
    for x, y in product(t.summands, repeat=2):
        for f in _morphisms(x, y):
            if s.is_deflation(f):
                k, _ = kernel(f)
                if not t.contains(k):
                    return Verdict.of(label, False, witness={"kernel_of": [x.name, y.name],
                                                             "kernel": k.dim_vector})
    bad = _closed_under_extensions(t, s)
    if bad is not None:
        return Verdict.of(label, False, witness=bad)
    for m in universe.modules:
        if not in_pres_n(t, m, 0, s):
            return Verdict.of(label, False, witness={"not_generated": m.name})
    return Verdict.of(label, True)


def is_coresolving(t: SubcatSpec, universe: Universe) -> Verdict:
    """Dual of ``is_resolving`` for the abelian structure: injectives, cokernels of inflations, extensions."""
    s = universe.structure
    label = f"{t.name} coresolving"
    if not s.is_abelian:
        raise ModuleError("coresolving test is implemented for the abelian structure only")
    for i in indecomposable_injectives(s.algebra):
        if t.index_of(i) is None:
            return Verdict.of(label, False, witness={"missing_injective": i.name})
    for x, y in product(t.summands, repeat=2):
        for f in _morphisms(x, y):
            if s.is_inflation(f):
                c, _ = cokernel(f)
                if not t.contains(c):
                    return Verdict.of(label, False, witness={"cokernel_of": [x.name, y.name],
                                                             "cokernel": c.dim_vector})
    bad = _closed_under_extensions(t, s)
    if bad is not None:
        return Verdict.of(label, False, witness=bad)
    return Verdict.of(label, True)


# perp-class helpers

def ext_projectives(members: Sequence[Module], s: ExactStructure, cutoff: Optional[int] = None) -> List[Module]:
    """Members X with Ext^{>=1}(X, Y) = 0 for every member Y."""
    out = []
    for x in members:
        spec = SubcatSpec(x.name, [x])
        verdicts = [in_perp(spec, y, s, cutoff=cutoff) for y in members]
        if any(v.is_undecided for v in verdicts):
            raise UndecidedError(f"Ext-projectivity of {x.name} undecided at cutoff")
        if all(verdicts):
            out.append(x)
    return out


@dataclass
class BazzoniSets:
    perp: List[str]
    pres_lower: List[str]
    pres_n: List[str]
    gen_lower: List[str]

    @property
    def agree(self) -> bool:
        return self.perp == self.pres_lower == self.pres_n


def bazzoni_sets(t: SubcatSpec, n: int, universe: Universe, cutoff: Optional[int] = None) -> BazzoniSets:
    """T^⊥ computed by Ext-vanishing, by pres_{n-1}, by pres_n, and gen_{n-1}."""
    s = universe.structure
    lower = max(n - 1, 0)
    members = universe.modules
    return BazzoniSets(
        perp=[x.name for x in perp_members(t, universe, cutoff)],
        pres_lower=[x.name for x in members if in_pres_n(t, x, lower, s)],
        pres_n=[x.name for x in members if in_pres_n(t, x, n, s)],
        gen_lower=[x.name for x in members if in_gen_n(t, x, lower, s)],
    )
