# tilting/tilting.py

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple, Union

from app_config import settings
from engine import linalg
from engine.errors import BudgetExceeded, PreconditionError
from engine.exactstruct import ExactStructure
from engine.homology import left_approximation, pdim, right_approximation
from engine.modcat import Module, ModuleMap, cokernel, compose, decompose, identity_map, is_isomorphic, kernel, pushout
from engine.subcat import (SubcatSpec, Universe, ext_projectives, in_cores_n, in_gen_n, in_perp, perp_members)
from engine.verdict import Check, DimResult, Verdict
from utils.logger import get_logger
from utils.parallel import parallel_map

logger = get_logger("tilting")


@dataclass
class TiltingReport:
    """(t1) self-orthogonality, (t2) pdim bound, (t3) projectives coresolved in n steps."""
    candidate: SubcatSpec
    n: int
    structure: ExactStructure
    t1: Verdict
    t2: Verdict
    t3: Verdict
    pdims: Dict[str, DimResult] = field(default_factory=dict)
    cross_check: Optional[bool] = None
    agreement: Optional[Verdict] = None

    @property
    def verdict(self) -> Verdict:
        parts = [self.t1, self.t2, self.t3] + ([self.agreement] if self.agreement is not None else [])
        return Verdict.all_of(f"{self.candidate.name} is {self.n}-tilting", parts,
                              witness={"candidate": self.candidate.names, "n": self.n,
                                       "structure": self.structure.describe()})

    @property
    def overall(self) -> bool:
        return bool(self.verdict)

    @property
    def level(self) -> Optional[int]:
        """Largest summand pdim, when all are finite."""
        dims = list(self.pdims.values())
        if not dims or not all(d.is_finite for d in dims):
            return None
        return max(d.value for d in dims)


# ==============================
# 🔍 Deciding tilting
# ==============================

def _t1(t: SubcatSpec, s: ExactStructure, cutoff: Optional[int]) -> Verdict:
    parts = [in_perp(t, y, s, cutoff=cutoff) for y in t.summands]
    return Verdict.all_of("t1", parts)


def _t2(t: SubcatSpec, n: int, s: ExactStructure, cutoff: Optional[int]) -> Tuple[Verdict, Dict[str, DimResult]]:
    dims = {x.name: pdim(x, None if s.is_abelian else s, cutoff) for x in t.summands}
    checks = [Check("pdim", {"M": name}, str(d)) for name, d in dims.items()]
    values = {d.at_most(n) for d in dims.values()}
    witness = {"pdims": {name: str(d) for name, d in dims.items()}}
    if "false" in values:
        witness["exceeds"] = [name for name, d in dims.items() if d.at_most(n) == "false"]
        return Verdict("t2", "false", witness=witness, checks=checks), dims
    if "undecided" in values:
        return Verdict.undecided("t2", "pdim undecided at cutoff", witness=witness, checks=checks), dims
    return Verdict("t2", "true", witness=witness, checks=checks), dims


def _t3(t: SubcatSpec, n: int, s: ExactStructure) -> Verdict:
    return Verdict.all_of("t3", [in_cores_n(t, p, n, s) for p in s.projective_summands])


def check_tilting(t: SubcatSpec, n: int, s: ExactStructure, cutoff: Optional[int] = None) -> TiltingReport:
    """
    Decide whether add(T) is n-tilting in the exact structure s.

    Parameters:
    -----------
    t : SubcatSpec
        Candidate given by its indecomposable summands
    n : int
        Level to test
    s : ExactStructure
        Abelian or relative structure on mod-A
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    t2, dims = _t2(t, n, s, cutoff)
    report = TiltingReport(t, n, s, _t1(t, s, cutoff), t2, _t3(t, n, s), dims)
    logger.debug(f"{t.name} at level {n}: {report.verdict.value}")
    return report


@dataclass
class PerpMember:
    module: Module
    gen_witness: Verdict


def perp_category(t: SubcatSpec, n: int, universe: Universe, cutoff: Optional[int] = None) -> List[PerpMember]:
    """Universe members in T^⊥, each with its gen_{n-1} chain."""
    s = universe.structure
    return [PerpMember(x, in_gen_n(t, x, max(n - 1, 0), s)) for x in perp_members(t, universe, cutoff)]


def check_tilting_T1T2(t: SubcatSpec, n: int, universe: Universe, cutoff: Optional[int] = None) -> TiltingReport:
    """
    Direct check over the universe: T self-orthogonal, T the Ext-projectives of
    T^⊥, T^⊥ with enough projectives from add(T), and every member coresolved
    by T^⊥ in n steps. ``cross_check`` records agreement with ``check_tilting``.
    """
    s = universe.structure
    perp = perp_members(t, universe, cutoff)
    missing = [x.name for x in t.summands if not any(is_isomorphic(x, y) for y in perp)]
    t1 = Verdict.of("T1", not missing, witness={"perp": [x.name for x in perp], "not_in_perp": missing})

    projectives = SubcatSpec.of(ext_projectives(perp, s, cutoff), name="Ext-projectives") if perp else None
    enough = Verdict.of("ext_projectives", projectives is not None and projectives.same_as(t),
                        witness={"ext_projectives": projectives.names if projectives else []})
    for x in perp:
        f = right_approximation(x, t.summands)
        ok = s.is_deflation(f) and bool(in_perp(t, kernel(f)[0], s, cutoff=cutoff))
        if not ok:
            enough = Verdict.of("enough_projectives", False, witness={"member": x.name})
            break

    perp_spec = SubcatSpec.of(perp, name=f"{t.name}^⊥") if perp else None
    cores = [in_cores_n(perp_spec, x, n, s) if perp_spec else Verdict.of(x.name, False)
             for x in universe.modules]
    coresolving = Verdict.all_of("T2", cores)

    dims = {x.name: pdim(x, None if s.is_abelian else s, cutoff) for x in t.summands}
    report = TiltingReport(t, n, s, t1, enough, coresolving, dims)
    direct, other = report.verdict.value, check_tilting(t, n, s, cutoff).verdict.value
    report.cross_check = direct == other
    witness = {"perp_criterion": direct, "t1_t3": other}
    if report.cross_check:
        report.agreement = Verdict.of("cross_check", True, witness=witness)
    else:
        logger.warning(f"⚠️ {t.name}: the two tilting criteria disagree at level {n}")
        report.agreement = Verdict.undecided("cross_check", "the two tilting criteria disagree", witness=witness)
    return report


def in_thick_of_tilting(t: SubcatSpec, m: Module, s: ExactStructure, cutoff: Optional[int] = None) -> Verdict:
    """M ∈ Thick(T) for a tilting T reduces to pdim M < ∞."""
    n = max((d.value for d in (pdim(x, None if s.is_abelian else s, cutoff) for x in t.summands)
             if d.is_finite), default=0)
    if not check_tilting(t, n, s, cutoff).overall:
        raise PreconditionError(f"{t.name} is not a verified tilting subcategory")
    d = pdim(m, None if s.is_abelian else s, cutoff)
    label = f"{m.name} ∈ Thick({t.name})"
    checks = [Check("pdim", {"M": m.name}, str(d))]
    if d.kind == "undecided":
        return Verdict.undecided(label, "pdim undecided at cutoff", checks=checks)
    return Verdict.of(label, d.is_finite, witness={"pdim": str(d)}, checks=checks)


def finitistic_pdim(universe: Universe, cutoff: Optional[int] = None) -> int:
    """Largest finite pdim over the universe."""
    s = universe.structure
    dims = [pdim(x, None if s.is_abelian else s, cutoff) for x in universe.modules]
    return max((d.value for d in dims if d.is_finite), default=0)


# ==============================
# 🛠️ Constructions
# ==============================

@dataclass
class SpecialTilting:
    spec: SubcatSpec
    coresolutions: Dict[str, List[str]]
    report: TiltingReport


def special_tilting(m: SubcatSpec, n: int, s: ExactStructure, cutoff: Optional[int] = None) -> SpecialTilting:
    """
    T_n = M ∨ add(Ω^{-n}_M P): coresolve each projective n times by minimal
    left M-approximations and add the decomposed last cokernels.
    """
    failing = [x.name for x in m.summands if not in_perp(m, x, s, cutoff=cutoff)]
    if failing:
        raise PreconditionError(f"{m.name} is not self-orthogonal: {', '.join(failing)}")
    too_big = [x.name for x in m.summands if pdim(x, None if s.is_abelian else s, cutoff).at_most(1) != "true"]
    if too_big:
        raise PreconditionError(f"{m.name} has summands of projective dimension above 1: {', '.join(too_big)}")

    extra: List[Module] = []
    coresolutions: Dict[str, List[str]] = {}
    bad: List[str] = []
    for p in s.projective_summands:
        current, steps = p, []
        for i in range(n):
            f = left_approximation(current, m.summands)
            if not s.is_inflation(f):
                bad.append(p.name)
                break
            steps.append(f"{current.name} ↪ {f.target.name}")
            current, _ = cokernel(f, name=f"Ω^-{i + 1}({p.name})")
        else:
            coresolutions[p.name] = steps
            if current.dim:
                extra.extend(x for x, _ in decompose(current))
    if bad:
        raise PreconditionError(f"projectives {', '.join(bad)} have no inflation into {m.name}")

    spec = SubcatSpec.of(list(m.summands) + extra)
    report = check_tilting(spec, n, s, cutoff)
    logger.info(f"🛠️ special {n}-tilting from {m.name}: {spec.name} ({report.verdict.value})")
    return SpecialTilting(spec, coresolutions, report)


@dataclass
class NotMutable:
    reason: str
    witness: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Mutation:
    """T̃ = M ∨ add(Y) with the checks it passed; ``verdict.witness`` carries the cogen / Ω_M conditions."""
    spec: SubcatSpec
    verdict: Verdict

    @property
    def names(self) -> List[str]:
        return self.spec.names

    @property
    def summands(self) -> List[Module]:
        return self.spec.summands


def _remark_conditions(pairs: List[Tuple[Module, Module]], m: SubcatSpec, s: ExactStructure) -> Dict[str, Any]:
    """Y ⊂ cogen(M) and X ≅ Ω_M Y for every replaced summand."""
    cogen, omega = {}, {}
    for x, y in pairs:
        cogen[y.name] = bool(y.dim == 0 or s.is_inflation(left_approximation(y, m.summands)))
        g = right_approximation(y, m.summands)
        omega[x.name] = bool(s.is_deflation(g) and is_isomorphic(kernel(g)[0], x))
    return {"cogen": cogen, "omega": omega}


def mutate(t: SubcatSpec, m: SubcatSpec, s: ExactStructure, universe: Optional[Universe] = None,
           cutoff: Optional[int] = None) -> Union[Mutation, NotMutable]:
    """T̃ = M ∨ add(Y) where Y = cokernels of minimal left M-approximations of the complement X."""
    dims = [pdim(x, None if s.is_abelian else s, cutoff) for x in t.summands]
    if not all(d.is_finite for d in dims):
        return NotMutable(f"{t.name} has a summand of infinite or undecided projective dimension")
    level = max(d.value for d in dims)
    if not check_tilting(t, level, s, cutoff).overall:
        return NotMutable(f"{t.name} is not tilting")
    outside = [x.name for x in m.summands if t.index_of(x) is None]
    if outside:
        return NotMutable(f"{', '.join(outside)} not summands of {t.name}")

    complement = [x for x in t.summands if m.index_of(x) is None]
    if not complement:
        return Mutation(t, Verdict.of(f"{t.name} unchanged", True, witness={"replaced": []}))
    for x in complement:
        if not in_gen_n(m, x, 0, s):
            return NotMutable(f"{x.name} is not in gen({m.name})", {"summand": x.name})

    ys: List[Module] = []
    pairs: List[Tuple[Module, Module]] = []
    for x in complement:
        f = left_approximation(x, m.summands)
        if not s.is_inflation(f):
            return NotMutable(f"left approximation {x.name} → {f.target.name} is not an inflation",
                              {"summand": x.name, "approximation": f.target.name})
        y, _ = cokernel(f, name=f"Ω^-({x.name})")
        pairs.append((x, y))
        ys.extend(z for z, _ in decompose(y))
    mutated = SubcatSpec.of(list(m.summands) + ys)

    bad = [y.name for y in mutated.summands if not in_perp(mutated, y, s, cutoff=cutoff)]
    if bad:
        return NotMutable(f"{mutated.name} is not self-orthogonal", {"summands": bad})
    new_dims = [pdim(y, None if s.is_abelian else s, cutoff) for y in mutated.summands]
    if not all(d.is_finite for d in new_dims):
        return NotMutable(f"{mutated.name} has a summand of infinite or undecided projective dimension")
    new_level = max(d.value for d in new_dims)
    tilting = check_tilting(mutated, new_level, s, cutoff).verdict
    if not tilting:
        return NotMutable(f"{mutated.name} is not {new_level}-tilting", {"failure": tilting.first_failure().label})
    below = leq(mutated, t, s, universe, cutoff)
    if not below:
        return NotMutable(f"{mutated.name} is not below {t.name}", {"leq": below.value, **below.witness})

    verdict = Verdict.all_of(f"{t.name} mutated at {m.name}", [tilting, below],
                             witness={"replaced": [x.name for x in complement], "level": new_level,
                                      **_remark_conditions(pairs, m, s)})
    logger.info(f"🔁 mutated {t.name} at {m.name}: {mutated.name}")
    return Mutation(mutated, verdict)


def leq(lower: SubcatSpec, upper: SubcatSpec, s: ExactStructure, universe: Optional[Universe] = None,
        cutoff: Optional[int] = None) -> Verdict:
    """lower ≤ upper iff every summand of lower lies in upper^⊥; cross-checked by perp inclusion over the universe."""
    label = f"{lower.name} ≤ {upper.name}"
    parts = [in_perp(upper, x, s, cutoff=cutoff) for x in lower.summands]
    verdict = Verdict.all_of(label, parts)
    if universe is not None and not verdict.is_undecided:
        lower_perp = {x.name for x in perp_members(lower, universe, cutoff)}
        upper_perp = {x.name for x in perp_members(upper, universe, cutoff)}
        inclusion = lower_perp <= upper_perp
        verdict.witness["perp_inclusion"] = inclusion
        if inclusion != bool(verdict):
            logger.warning(f"⚠️ {label}: summand test and perp inclusion disagree")
            verdict = Verdict.undecided(label, "summand test and perp inclusion disagree",
                                        witness={"summand_test": verdict.value, "perp_inclusion": inclusion,
                                                 "only_in_lower_perp": sorted(lower_perp - upper_perp)},
                                        parts=verdict.parts)
    return verdict


# ==============================
# 📊 Poset of tilting subcategories
# ==============================

@dataclass
class TiltingPoset:
    elements: List[SubcatSpec]
    levels: List[int]
    order: List[List[bool]]
    structure: ExactStructure
    undecided: List[str] = field(default_factory=list)
    candidates: int = 0

    def __len__(self):
        return len(self.elements)

    @property
    def hasse_edges(self) -> List[Tuple[int, int]]:
        """(i, j) with i < j covering: no k strictly between."""
        n = len(self.elements)
        edges = []
        for i in range(n):
            for j in range(n):
                if i == j or not self.order[i][j]:
                    continue
                if not any(k not in (i, j) and self.order[i][k] and self.order[k][j] for k in range(n)):
                    edges.append((i, j))
        return edges

    @property
    def is_connected(self) -> bool:
        n = len(self.elements)
        if n <= 1:
            return True
        seen, stack = {0}, [0]
        adjacent = {i: set() for i in range(n)}
        for i, j in self.hasse_edges:
            adjacent[i].add(j)
            adjacent[j].add(i)
        while stack:
            for j in adjacent[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == n

    @property
    def maximum(self) -> Optional[int]:
        n = len(self.elements)
        tops = [j for j in range(n) if all(self.order[i][j] for i in range(n))]
        return tops[0] if len(tops) == 1 else None

    def axioms(self) -> Verdict:
        n = len(self.elements)
        reflexive = all(self.order[i][i] for i in range(n))
        antisymmetric = all(not (self.order[i][j] and self.order[j][i]) for i in range(n) for j in range(n) if i != j)
        transitive = all(not (self.order[i][j] and self.order[j][k]) or self.order[i][k]
                         for i in range(n) for j in range(n) for k in range(n))
        top = self.maximum
        projectives = SubcatSpec("projectives", list(self.structure.projective_summands))
        unique_max = top is not None and self.elements[top].same_as(projectives)
        rigid = all(not self.elements[i].is_subset_of(self.elements[j])
                    for i in range(n) for j in range(n) if i != j)
        parts = [Verdict.of("reflexive", reflexive), Verdict.of("antisymmetric", antisymmetric),
                 Verdict.of("transitive", transitive), Verdict.of("projectives_maximum", unique_max),
                 Verdict.of("maximal_rigidity", rigid)]
        return Verdict.all_of("poset_axioms", parts)


def enumerate_tilting(universe: Universe, n_max: Optional[int] = None, widen: Optional[bool] = None,
                      cutoff: Optional[int] = None, jobs: Optional[int] = None) -> TiltingPoset:
    """
    Basic tilting subcategories with |P| summands drawn from the universe
    (all sizes when widened), each checked at level n_max and ordered by ≤.
    """
    cfg = settings()
    n_max = cfg.n_max if n_max is None else n_max
    widen = cfg.widen_search if widen is None else widen
    s = universe.structure
    k = len(s.projective_summands)
    sizes = range(1, len(universe) + 1) if widen else [k]
    candidates = [c for size in sizes for c in combinations(universe.modules, size)]
    if len(candidates) > cfg.enumeration_budget:
        raise BudgetExceeded(f"{len(candidates)} tilting candidates exceed the enumeration budget",
                             budget="enumeration_budget")

    def check(c):
        return check_tilting(SubcatSpec("add(" + "⊕".join(x.name for x in c) + ")", list(c)), n_max, s, cutoff)

    reports = parallel_map(check, candidates, jobs or cfg.jobs, desc="tilting candidates", total=len(candidates))
    elements = [r.candidate for r in reports if r.overall]
    levels = [r.level for r in reports if r.overall]
    undecided = [r.candidate.name for r in reports if r.verdict.is_undecided]
    order = [[bool(leq(a, b, s, cutoff=cutoff)) for b in elements] for a in elements]
    logger.info(f"📊 {len(elements)} tilting subcategories from {len(candidates)} candidates")
    return TiltingPoset(elements, levels, order, s, undecided, len(candidates))


# ==============================
# 🧱 Pushout coresolution
# ==============================

@dataclass
class PushoutResult:
    terms: List[Module]          # T_m, ..., T_0
    maps: List[ModuleMap]        # T_i -> T_{i-1}, then T_0 -> L
    result: Module               # L
    comparison: ModuleMap        # X -> L


def _induced(proj_b: ModuleMap, proj_c: ModuleMap, h: ModuleMap, pushed: Module) -> ModuleMap:
    """Map out of the pushout B ⊔ C agreeing with h on B and with 0 on C."""
    gf = pushed.algebra.gf
    proj = linalg.hstack(gf, [proj_b.matrix, proj_c.matrix], pushed.dim)
    rhs = linalg.hstack(gf, [h.matrix, linalg.zeros(gf, h.target.dim, proj_c.source.dim)], h.target.dim)
    solution = linalg.solve(proj.T.copy(), rhs.T.copy())
    if solution is None:
        raise PreconditionError("chain differentials do not compose to zero")
    return ModuleMap(pushed, h.target, solution.T.copy(), validate=False)


def pushout_coresolve(t: SubcatSpec, chain, s: ExactStructure) -> PushoutResult:
    """
    Replace the terms of a right exact chain X_m -> ... -> X_0 -> X -> 0 by
    add(T) terms, top first: push each differential out along the minimal
    left approximation of its (modified) source.
    """
    target, terms, diffs = chain.target, list(chain.terms), list(chain.differentials)
    if not terms:
        return PushoutResult([], [], target, identity_map(target))
    if all(t.contains(x) for x in terms):
        return PushoutResult(terms[::-1], [diffs[i] for i in range(len(diffs) - 1, -1, -1)], target,
                             identity_map(target))
    for x in terms:
        if not in_cores_n(t, x, settings().n_max, s):
            raise PreconditionError(f"{x.name} has no Cores({t.name}) cochain")

    out_terms: List[Module] = []
    out_maps: List[ModuleMap] = []
    current, d = terms[-1], diffs[-1]
    incoming: Optional[ModuleMap] = None
    comparison = None
    for i in range(len(terms) - 1, -1, -1):
        iota = left_approximation(current, t.summands)
        if not s.is_inflation(iota):
            raise PreconditionError(f"approximation {current.name} → {iota.target.name} is not an inflation")
        if incoming is not None:
            out_maps.append(compose(iota, incoming))
        out_terms.append(iota.target)
        pushed, along_d, along_iota = pushout(d, iota, name=f"L{i}" if i else "L")
        if i == 0:
            out_maps.append(along_iota)
            comparison = along_d
            current = pushed
            break
        d_next = _induced(along_d, along_iota, diffs[i - 1], pushed)
        incoming = along_iota
        current, d = pushed, d_next
    logger.info(f"🧱 pushout coresolution of {target.name} by {t.name}: {[x.name for x in out_terms]}")
    return PushoutResult(out_terms, out_maps, current, comparison)
