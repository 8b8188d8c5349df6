# tilting/miyashita.py
"""
Endomorphism algebras of basic modules and the transport functors between
mod-A and mod-Γ, Γ = End(T)^op:

    phi(X)       = ⊕_i Hom(T_i, X)        left Γ-module by precomposition
    phi_prime(Y) = T ⊗_Γ Y                 left A-module
    psi(X)       = ⊕_i Hom(X, T_i)         left Γ^op-module by postcomposition

plus the checks that these restrict to inverse equivalences between T^⊥
and the Tor-perpendicular class of T̃ = psi(A).
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from engine import linalg
from engine.algebra import BasedAlgebra, cartan_determinant, opposite
from engine.errors import PreconditionError
from engine.exactstruct import ExactStructure
from engine.homology import gldim, indecomposable_projectives_cached, minimal_resolution, right_approximation, tor
from engine.modcat import (Module, ModuleMap, cokernel, decompose, direct_sum, endomorphism_radical,
                           enumerate_indecomposables, find_isomorphism, hom_dim, hom_space, in_additive_closure,
                           is_surjective, quotient)
from engine.subcat import SubcatSpec, Universe, in_pres_n, perp_members
from engine.verdict import Check, DimResult, Verdict
from tilting.tilting import TiltingReport, check_tilting
from utils.logger import get_logger

logger = get_logger("miyashita")


def _endo_basis(summands: Sequence[Module]) -> List[Tuple[int, int, linalg.Mat]]:
    """Basis of ⊕ Hom(T_i, T_j) as (i, j, matrix); each End(T_i) block starts with the identity."""
    gf = summands[0].algebra.gf
    basis = []
    for i, ti in enumerate(summands):
        for j, tj in enumerate(summands):
            if i == j:
                ident = linalg.identity(gf, ti.dim)
                span = linalg.flatten(ident)
                basis.append((i, i, ident))
                for r in endomorphism_radical(ti):
                    v = linalg.flatten(r)
                    if not linalg.in_column_span(span, v):
                        basis.append((i, i, r))
                        span = linalg.hstack(gf, [span, v], ti.dim * ti.dim)
            else:
                basis.extend((i, j, f.matrix) for f in hom_space(ti, tj))
    return basis


def _block_matrices(summands, basis) -> Dict[Tuple[int, int], Tuple[List[int], linalg.Mat]]:
    gf = summands[0].algebra.gf
    blocks: Dict[Tuple[int, int], List[int]] = {}
    for pos, (i, j, _) in enumerate(basis):
        blocks.setdefault((i, j), []).append(pos)
    return {key: (positions, linalg.hstack(gf, [linalg.flatten(basis[p][2]) for p in positions],
                                             summands[key[1]].dim * summands[key[0]].dim))
            for key, positions in blocks.items()}


def endo_algebra(t: SubcatSpec, name: Optional[str] = None) -> BasedAlgebra:
    """Γ = End(⊕ T_i)^op on the basis of ⊕ Hom(T_i, T_j); f * g = g ∘ f."""
    return _endo_data(t, name)[0]


def _endo_data(t: SubcatSpec, name: Optional[str] = None):
    summands = t.summands
    if not summands:
        raise PreconditionError("endomorphism algebra of the zero module")
    a = summands[0].algebra
    basis = _endo_basis(summands)
    blocks = _block_matrices(summands, basis)
    d = len(basis)
    constants = np.zeros((d, d, d), dtype=np.int64)
    for x, (i, j, f) in enumerate(basis):
        for y, (j2, k, g) in enumerate(basis):
            if j2 != j or (i, k) not in blocks:
                continue
            positions, cols = blocks[(i, k)]
            coords = linalg.coordinates(cols, linalg.flatten(linalg.mul(g, f)))
            for pos, c in zip(positions, np.asarray(coords.view(np.ndarray), dtype=np.int64).ravel()):
                constants[x, y, pos] = c
    labels, counters = [], {}
    for i, j, _ in basis:
        counters[(i, j)] = counters.get((i, j), 0) + 1
        if i == j and counters[(i, j)] == 1:
            labels.append(f"1_{summands[i].name}")
        else:
            labels.append(f"{summands[i].name}>{summands[j].name}#{counters[(i, j)]}")
    idempotents = [pos for pos, (i, j, _) in enumerate(basis) if labels[pos].startswith("1_")]
    gamma = BasedAlgebra(a.p, labels, constants, idempotents, name=name or f"End({'⊕'.join(t.names)})^op",
                         vertex_labels=t.names)
    logger.info(f"🧮 {gamma.name}: dim {gamma.dim}, {len(idempotents)} vertices")
    return gamma, basis, blocks


@dataclass
class TransportContext:
    algebra: BasedAlgebra
    spec: SubcatSpec
    n: int
    structure: ExactStructure
    gamma: BasedAlgebra
    basis: List[Tuple[int, int, linalg.Mat]]
    total: Module
    inclusions: List[ModuleMap]
    projections: List[ModuleMap]
    report: Optional[TiltingReport] = None
    _memo: Dict = field(default_factory=dict)

    @classmethod
    def build(cls, t: SubcatSpec, structure: ExactStructure, n: Optional[int] = None,
              verify: bool = True) -> "TransportContext":
        report = None
        if verify:
            dims = [structure.pdim(x) for x in t.summands]
            if not all(d.is_finite for d in dims):
                raise PreconditionError(f"{t.name} has summands of infinite or undecided projective dimension")
            n = max(d.value for d in dims) if n is None else n
            report = check_tilting(t, n, structure)
            if not report.overall:
                raise PreconditionError(f"{t.name} is not {n}-tilting")
        gamma, basis, _ = _endo_data(t)
        total, incs, projs = direct_sum(t.summands, name="⊕".join(t.names))
        return cls(structure.algebra, t, n or 0, structure, gamma, basis, total, incs, projs, report)

    @property
    def summands(self) -> List[Module]:
        return self.spec.summands

    # functors

    def phi(self, x: Module) -> Module:
        """⊕ Hom(T_i, X) with f: T_i -> T_j acting Hom(T_j, X) -> Hom(T_i, X) by φ ↦ φ ∘ f."""
        gf = self.gamma.gf
        homs = [hom_space(ti, x) for ti in self.summands]
        sizes = [len(h) for h in homs]
        offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        total = int(offsets[-1])
        cols = [linalg.hstack(gf, [linalg.flatten(f.matrix) for f in h], x.dim * ti.dim)
                for h, ti in zip(homs, self.summands)]
        action = []
        for i, j, f in self.basis:
            m = np.zeros((total, total), dtype=np.int64)
            if sizes[i] and sizes[j]:
                images = [linalg.flatten(linalg.mul(phi.matrix, f)) for phi in homs[j]]
                coords = linalg.coordinates(cols[i], linalg.hstack(gf, images, x.dim * self.summands[i].dim))
                m[offsets[i]:offsets[i + 1], offsets[j]:offsets[j + 1]] = np.asarray(coords.view(np.ndarray))
            action.append(gf(m % self.gamma.p))
        return Module(self.gamma, action, name=f"Φ({x.name})", validate=False)

    def hom_total(self, x: Module) -> Module:
        """Hom(T, X) from a basis of maps out of the whole sum; γ acts by φ ↦ φ ∘ (ι_j f π_i)."""
        gf = self.gamma.gf
        homs = hom_space(self.total, x)
        size, width = len(homs), x.dim * self.total.dim
        action = []
        for i, j, f in self.basis:
            if not size:
                action.append(linalg.zeros(gf, 0, 0))
                continue
            endo = linalg.mul_all(self.inclusions[j].matrix, f, self.projections[i].matrix)
            cols = linalg.hstack(gf, [linalg.flatten(phi.matrix) for phi in homs], width)
            images = linalg.hstack(gf, [linalg.flatten(linalg.mul(phi.matrix, endo)) for phi in homs], width)
            action.append(linalg.coordinates(cols, images))
        return Module(self.gamma, action, name=f"Hom({self.total.name}, {x.name})", validate=False)

    def psi_any(self, x: Module) -> Module:
        """⊕ Hom(X, T_i) over Γ^op, with f: T_i -> T_j acting by ψ ↦ f ∘ ψ."""
        op = opposite(self.gamma)
        gf = self.gamma.gf
        homs = [hom_space(x, ti) for ti in self.summands]
        sizes = [len(h) for h in homs]
        offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        total = int(offsets[-1])
        cols = [linalg.hstack(gf, [linalg.flatten(f.matrix) for f in h], ti.dim * x.dim)
                for h, ti in zip(homs, self.summands)]
        action = []
        for i, j, f in self.basis:
            m = np.zeros((total, total), dtype=np.int64)
            if sizes[i] and sizes[j]:
                images = [linalg.flatten(linalg.mul(f, psi.matrix)) for psi in homs[i]]
                coords = linalg.coordinates(cols[j], linalg.hstack(gf, images, self.summands[j].dim * x.dim))
                m[offsets[j]:offsets[j + 1], offsets[i]:offsets[i + 1]] = np.asarray(coords.view(np.ndarray))
            action.append(gf(m % self.gamma.p))
        return Module(op, action, name=f"Ψ({x.name})", validate=False)

    def psi(self, p: Module) -> Module:
        if not in_additive_closure(p, indecomposable_projectives_cached(self.algebra)):
            raise PreconditionError(f"psi is defined on projectives; {p.name} is not projective")
        return self.psi_any(p)

    def psi_map(self, f: ModuleMap) -> ModuleMap:
        """Hom(f, T): Hom(Y, T) -> Hom(X, T) for f: X -> Y, ψ ↦ ψ ∘ f."""
        gf = self.gamma.gf
        source, target = self.psi_any(f.target), self.psi_any(f.source)
        columns = []
        for ti in self.summands:
            for psi in hom_space(f.target, ti):
                pieces = []
                for tj in self.summands:
                    basis = hom_space(f.source, tj)
                    if not basis:
                        continue
                    if tj is ti:
                        cols = linalg.hstack(gf, [linalg.flatten(b.matrix) for b in basis], tj.dim * f.source.dim)
                        pieces.append(linalg.coordinates(cols, linalg.flatten(linalg.mul(psi.matrix, f.matrix))))
                    else:
                        pieces.append(linalg.zeros(gf, len(basis), 1))
                columns.append(linalg.vstack(gf, pieces, 1))
        matrix = linalg.hstack(gf, columns, target.dim)
        return ModuleMap(source, target, matrix, validate=False)

    def phi_prime(self, y: Module) -> Module:
        """T ⊗_Γ Y as the quotient of T ⊗_k Y by (t·γ) ⊗ y - t ⊗ (γ·y)."""
        a, gf = self.algebra, self.algebra.gf
        if y.dim == 0:
            return Module(a, [linalg.zeros(gf, 0, 0) for _ in range(a.dim)], name=f"Φ'({y.name})", validate=False)
        t = self.total
        ambient = Module(a, [linalg.kron(t.action[b], linalg.identity(gf, y.dim)) for b in range(a.dim)],
                         name=f"{t.name}⊗{y.name}", validate=False)
        relations = []
        for pos, (i, j, f) in enumerate(self.basis):
            right = linalg.mul_all(self.inclusions[j].matrix, f, self.projections[i].matrix)
            relations.append(linalg.kron(right, linalg.identity(gf, y.dim))
                             - linalg.kron(linalg.identity(gf, t.dim), y.action[pos]))
        span = linalg.hstack(gf, relations, t.dim * y.dim)
        return quotient(ambient, span, name=f"Φ'({y.name})")[0]

    @property
    def t_tilde(self) -> List[Module]:
        cached = self._memo.get("t_tilde")
        if cached is None:
            cached = []
            for p in indecomposable_projectives_cached(self.algebra):
                cached.extend(x for x, _ in decompose(self.psi(p).renamed(f"Ψ({p.name})")))
            self._memo["t_tilde"] = cached
        return cached

    def in_tor_perp(self, y: Module, cutoff: Optional[int] = None) -> Verdict:
        """Tor_i^Γ(T̃, Y) = 0 for i >= 1, degrees bounded by the resolutions of T̃."""
        label = f"{y.name} ∈ ⊥T̃"
        checks = []
        for x in self.t_tilde:
            res = minimal_resolution(x, cutoff)
            if res.flag.kind == "truncated":
                return Verdict.undecided(label, f"resolution of {x.name} truncated", checks=checks)
            last = res.flag.n if res.flag.kind == "finite" else len(res.syzygies) - 1
            for i in range(1, last + 1):
                value = tor(x, y, i, cutoff)
                checks.append(Check("tor", {"Y": x.name, "M": y.name, "i": i}, value))
                if value:
                    return Verdict.of(label, False, witness={"tor": [x.name, y.name, i, value]}, checks=checks)
        return Verdict.of(label, True, checks=checks)


# ==============================
# ✅ Verification
# ==============================

def _iso_verdict(label: str, a: Module, b: Module) -> Verdict:
    iso = find_isomorphism(a, b)
    witness = {"source": a.name, "target": b.name}
    if iso is not None:
        witness["intertwiner"] = linalg.to_lists(iso.matrix)
    return Verdict.of(label, iso is not None, witness=witness)


def verify_miyashita(ctx: TransportContext, universe: Universe, gamma_universe: Sequence[Module],
                     cutoff: Optional[int] = None) -> Verdict:
    """Tilting of T̃, n-resolving Tor-perp class, restricted equivalence, agreement with Hom(T, -), counts."""
    n = ctx.n
    op_structure = ExactStructure.abelian(opposite(ctx.gamma))
    t_tilde = SubcatSpec.of(ctx.t_tilde, name="T̃")
    part1 = check_tilting(t_tilde, n, op_structure, cutoff).verdict
    part1.label = "t_tilde_tilting"

    tor_perp = [y for y in gamma_universe if ctx.in_tor_perp(y, cutoff)]
    resolving = []
    for y in gamma_universe:
        omega = minimal_resolution(y, cutoff).syzygy(n)
        summands = [x for x, _ in decompose(omega)] if omega.dim else []
        ok = all(ctx.in_tor_perp(x, cutoff) for x in summands)
        resolving.append(Verdict.of(f"Ω^{n}({y.name}) ∈ ⊥T̃", ok))
    part3 = Verdict.all_of("tor_perp_resolving", resolving)

    perp = perp_members(ctx.spec, universe, cutoff)
    equivalence = []
    for x in perp:
        image = ctx.phi(x)
        equivalence.append(Verdict.of(f"Φ({x.name}) ∈ ⊥T̃", bool(ctx.in_tor_perp(image, cutoff))))
        equivalence.append(_iso_verdict(f"Φ'Φ({x.name}) ≅ {x.name}", ctx.phi_prime(image), x))
    for y in tor_perp:
        equivalence.append(_iso_verdict(f"ΦΦ'({y.name}) ≅ {y.name}", ctx.phi(ctx.phi_prime(y)), y))
    part4 = Verdict.all_of("restricted_equivalence", equivalence)

    agreement = []
    for x in perp:
        agreement.append(_iso_verdict(f"Φ({x.name}) ≅ Hom(T, {x.name})", ctx.phi(x), ctx.hom_total(x)))
    agreement.append(Verdict.of("perp_counts", len(perp) == len(tor_perp),
                                witness={"perp": [x.name for x in perp], "tor_perp": [y.name for y in tor_perp]}))
    part5 = Verdict.all_of("functor_agreement", agreement)

    verdict = Verdict.all_of(f"Miyashita transport for {ctx.spec.name}", [part1, part3, part4, part5],
                             witness={"n": n, "gamma_dim": ctx.gamma.dim, "universe": len(universe),
                                      "gamma_universe": len(gamma_universe),
                                      "tor_perp_class": "specialized to mod-Γ"})
    logger.info(f"✅ Miyashita checks for {ctx.spec.name}: {verdict.value}")
    return verdict


def verify_adjunction(ctx: TransportContext, universe: Universe, gamma_universe: Sequence[Module]) -> Verdict:
    """dim Hom_Γ(Y, ΦX) = dim Hom_A(Φ'Y, X) for all pairs."""
    images = {x.name: ctx.phi(x) for x in universe.modules}
    primes = {y.name: ctx.phi_prime(y) for y in gamma_universe}
    parts = []
    for x, y in product(universe.modules, gamma_universe):
        left, right = hom_dim(y, images[x.name]), hom_dim(primes[y.name], x)
        parts.append(Verdict.of(f"adjunction({y.name}, {x.name})", left == right,
                                witness={"hom_gamma": left, "hom_lambda": right}))
    return Verdict.all_of("adjunction", parts)


def resolving_depth(ctx: TransportContext, gamma_universe: Sequence[Module], cutoff: Optional[int] = None) -> int:
    """Largest k over the Γ-universe such that Ω^k Y is the first syzygy in ⊥T̃."""
    depth = 0
    for y in gamma_universe:
        res = minimal_resolution(y, cutoff)
        for k in range(len(res.syzygies)):
            omega = res.syzygies[k]
            if omega.dim == 0 or all(ctx.in_tor_perp(x, cutoff) for x, _ in decompose(omega)):
                depth = max(depth, k)
                break
    return depth


def _le(a: DimResult, b: DimResult, shift: int) -> Optional[bool]:
    """a <= b + shift with infinite as ∞; None when undecided."""
    if a.kind == "undecided" or b.kind == "undecided":
        return None
    if b.kind == "infinite":
        return True
    if a.kind == "infinite":
        return False
    return a.value <= b.value + shift


def gldim_transfer_check(ctx: TransportContext, n: int, m: int, cutoff: Optional[int] = None) -> Verdict:
    """gldim A <= gldim Γ + n and gldim Γ <= gldim A + m."""
    lam, gam = gldim(ctx.algebra, cutoff=cutoff), gldim(ctx.gamma, cutoff=cutoff)
    first, second = _le(lam, gam, n), _le(gam, lam, m)
    witness = {"gldim_algebra": str(lam), "gldim_gamma": str(gam), "n": n, "m": m}
    if first is None or second is None:
        return Verdict.undecided("gldim_transfer", "gldim undecided at cutoff", witness=witness)
    return Verdict.of("gldim_transfer", first and second, witness=witness)


def cartan_check(ctx: TransportContext, cutoff: Optional[int] = None) -> Verdict:
    lam, gam = cartan_determinant(ctx.algebra), cartan_determinant(ctx.gamma)
    witness = {"det_algebra": lam, "det_gamma": gam}
    if not (gldim(ctx.algebra, cutoff=cutoff).is_finite and gldim(ctx.gamma, cutoff=cutoff).is_finite):
        witness["skipped"] = "gldim not finite"
        return Verdict.of("cartan", True, witness=witness)
    return Verdict.of("cartan", abs(lam) == abs(gam), witness=witness)


def relative_projective_transport(s: ExactStructure, universe: Universe,
                                  bound: Optional[Sequence[int]] = None, cutoff: Optional[int] = None) -> Verdict:
    """
    For Q = A ⊕ G and Γ_Q = End(Q)^op: Hom(Q, -) is fully faithful on the
    universe with Q ⊗ Hom(Q, X) ≅ X, and every Γ_Q-module has its second
    syzygy in the image of Hom(Q, -).
    """
    q = SubcatSpec("Q", list(s.projective_summands))
    ctx = TransportContext.build(q, s, verify=False)
    faithful = []
    images = {x.name: ctx.phi(x) for x in universe.modules}
    for x, z in product(universe.modules, repeat=2):
        faithful.append(Verdict.of(f"Hom({x.name}, {z.name})", hom_dim(x, z) == hom_dim(images[x.name], images[z.name])))
    counit = [_iso_verdict(f"Q⊗Hom(Q, {x.name}) ≅ {x.name}", ctx.phi_prime(images[x.name]), x)
              for x in universe.modules]
    bound = bound or [1] * len(ctx.gamma.idempotents)
    gamma_universe = enumerate_indecomposables(ctx.gamma, bound)
    two_resolving = []
    for y in gamma_universe:
        omega = minimal_resolution(y, cutoff).syzygy(2)
        two_resolving.append(_iso_verdict(f"Ω²({y.name}) in the image", ctx.phi(ctx.phi_prime(omega)), omega))
    return Verdict.all_of("relative_projective_transport",
                          [Verdict.all_of("fully_faithful", faithful), Verdict.all_of("counit", counit),
                           Verdict.all_of("two_resolving", two_resolving)],
                          witness={"gamma_dim": ctx.gamma.dim, "gamma_universe": len(gamma_universe)})


# ==============================
# 🛠️ Special 1-tilting module over an endomorphism ring
# ==============================

@dataclass
class EndoSpecialTilt:
    algebra: BasedAlgebra          # End(E), the algebra the Hom(-, E) modules live over
    spec: SubcatSpec
    projective: SubcatSpec
    report: TiltingReport
    gen_agreement: Verdict


def endo_special_one_tilt(m: Module, q: Module, bound: Optional[Sequence[int]] = None,
                          cutoff: Optional[int] = None) -> EndoSpecialTilt:
    """
    With E = M ⊕ Q and an epimorphism Q^k ↠ E, apply Hom(-, E) to
    0 -> K -> Q^k -> E -> 0: the cokernel T_1 of End(E) -> Hom(Q^k, E)
    together with P = Hom(Q, E) gives a 1-tilting module over End(E).
    """
    q_spec = SubcatSpec.of([q], name="add(Q)")
    if m.dim and not is_surjective(right_approximation(m, q_spec.summands)):
        raise PreconditionError(f"no epimorphism from add({q.name}) onto {m.name}")
    e = SubcatSpec.of([x for x in (m, q) if x.dim], name="E")
    ctx = TransportContext.build(e, ExactStructure.abelian(m.algebra), verify=False)
    cover = right_approximation(ctx.total, q_spec.summands)
    if not is_surjective(cover):
        raise PreconditionError(f"no epimorphism from add({q.name}) onto {ctx.total.name}")

    induced = ctx.psi_map(cover)            # Hom(E, E) -> Hom(Q^k, E)
    t1, _ = cokernel(induced, name="T1")
    p_mod = ctx.psi_any(q).renamed("P")
    algebra = opposite(ctx.gamma)
    projective = SubcatSpec.of([p_mod], name="add(P)")
    spec = SubcatSpec.of([p_mod] + ([t1] if t1.dim else []), name="add(P⊕T1)")
    structure = ExactStructure.abelian(algebra)
    report = check_tilting(spec, 1, structure, cutoff)

    bound = bound or [1] * len(algebra.idempotents)
    universe = enumerate_indecomposables(algebra, bound)
    gen_t = [y.name for y in universe if in_pres_n(spec, y, 0, structure)]
    gen_p = [y.name for y in universe if in_pres_n(projective, y, 0, structure)]
    agreement = Verdict.of("gen(T) = gen(P)", gen_t == gen_p, witness={"gen_T": gen_t, "gen_P": gen_p})
    logger.info(f"🛠️ special 1-tilt over {algebra.name}: {spec.name} ({report.verdict.value})")
    return EndoSpecialTilt(algebra, spec, projective, report, agreement)
