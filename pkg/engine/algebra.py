# engine/algebra.py
"""
Finite-dimensional algebras over F_p given by a basis and structure constants.

Product convention: for paths, ``p * q`` means "first q, then p", so an
element living between vertices i -> j satisfies x = e_j x e_i and the
indecomposable projective A e_k is spanned by the paths starting at k.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from app_config import settings
from engine import linalg
from engine.errors import AlgebraError
from utils.logger import get_logger

logger = get_logger("algebra")

Path = Tuple[str, ...]
Term = Tuple[int, Path]


@dataclass(frozen=True)
class Quiver:
    """Vertices, arrows (label, source, target) and relations as lists of (coefficient, path)."""
    vertices: Tuple[str, ...]
    arrows: Tuple[Tuple[str, str, str], ...]
    relations: Tuple[Tuple[Term, ...], ...] = ()

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise AlgebraError("duplicate vertex labels")
        labels = [a[0] for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise AlgebraError("duplicate arrow labels")
        for label, src, tgt in self.arrows:
            if src not in self.vertices or tgt not in self.vertices:
                raise AlgebraError(f"arrow {label} joins undeclared vertices {src} -> {tgt}")
        for rel in self.relations:
            ends = {self.endpoints(path) for _, path in rel}
            if len(ends) != 1:
                raise AlgebraError(f"relation {self.format_relation(rel)} mixes paths with different endpoints")
            if any(len(path) < 2 for _, path in rel):
                raise AlgebraError(f"relation {self.format_relation(rel)} is not admissible (path of length < 2)")

    @cached_property
    def _arrow_map(self) -> Dict[str, Tuple[str, str]]:
        return {label: (src, tgt) for label, src, tgt in self.arrows}

    def endpoints(self, path: Path) -> Tuple[str, str]:
        if not path:
            raise AlgebraError("empty path has no endpoints")
        for label in path:
            if label not in self._arrow_map:
                raise AlgebraError(f"unknown arrow {label}")
        for first, second in zip(path, path[1:]):
            if self._arrow_map[first][1] != self._arrow_map[second][0]:
                raise AlgebraError(f"path {'.'.join(path)} is not composable")
        return self._arrow_map[path[0]][0], self._arrow_map[path[-1]][1]

    def paths_of_length(self, length: int) -> List[Tuple[str, str, Path]]:
        """Paths as (source, target, arrows) in lexicographic order of arrow labels."""
        if length == 0:
            return [(v, v, ()) for v in self.vertices]
        paths = [(src, tgt, (label,)) for label, src, tgt in sorted(self.arrows)]
        for _ in range(length - 1):
            paths = [(src, self._arrow_map[label][1], arrows + (label,))
                     for src, tgt, arrows in paths
                     for label in sorted(self._arrow_map) if self._arrow_map[label][0] == tgt]
        return paths

    @staticmethod
    def format_relation(rel: Sequence[Term]) -> str:
        return " + ".join(f"{c}*{'.'.join(path)}" for c, path in rel)


@dataclass
class ArrowPresentation:
    """
    Arrows of a based algebra and every basis element written over arrow words.

    ``arrows`` are (label, source, target) with source/target idempotent
    positions; ``arrow_vectors`` their coordinates. ``words`` lists arrow
    index sequences in "first-then" order; ``expression`` has one row per
    basis element and one column per idempotent followed by one per word.
    """
    arrows: List[Tuple[str, int, int]]
    arrow_vectors: linalg.Mat
    words: List[Tuple[int, ...]]
    expression: np.ndarray


class BasedAlgebra:
    """
    Algebra with basis b_0..b_{d-1} and constants c[i, j, :] = coordinates of b_i * b_j.

    Construction checks associativity on all basis triples, that the listed
    idempotents are orthogonal and sum to the unit, and that each corner
    e_k A e_k is local.
    """

    quiver: Optional[Quiver] = None

    def __init__(self, p: int, labels: Sequence[str], constants: np.ndarray,
                 idempotents: Sequence[int], name: str = "A",
                 vertex_labels: Optional[Sequence[str]] = None,
                 presentation: Optional[ArrowPresentation] = None,
                 validate: bool = True):
        self.gf = linalg.field(p)
        self.p = int(p)
        self.labels = list(labels)
        self.dim = len(self.labels)
        self.constants = np.asarray(constants, dtype=np.int64) % self.p
        self.idempotents = list(idempotents)
        self.name = name
        self.vertex_labels = list(vertex_labels) if vertex_labels else [self.labels[i] for i in self.idempotents]
        self._presentation = presentation
        self._opposite: Optional["BasedAlgebra"] = None
        self._corner_radicals: Dict[int, linalg.Mat] = {}
        self._memo: Dict = {}
        if self.constants.shape != (self.dim,) * 3:
            raise AlgebraError(f"structure constants must have shape {(self.dim,) * 3}")
        if validate:
            self._check_associative()
            self._check_idempotents()
            self._check_local_corners()

    def __repr__(self):
        return f"BasedAlgebra({self.name}, dim={self.dim}, p={self.p}, vertices={len(self.idempotents)})"

    # structure

    @cached_property
    def left_regular_matrices(self) -> List[linalg.Mat]:
        """L_i with column j = coordinates of b_i * b_j."""
        return [self.gf(self.constants[i].T.copy()) for i in range(self.dim)]

    @cached_property
    def right_regular_matrices(self) -> List[linalg.Mat]:
        """R_j with column i = coordinates of b_i * b_j."""
        return [self.gf(self.constants[:, j, :].T.copy()) for j in range(self.dim)]

    def basis_vector(self, i: int) -> linalg.Mat:
        v = np.zeros((self.dim, 1), dtype=np.int64)
        v[i, 0] = 1
        return self.gf(v)

    def unit(self) -> linalg.Mat:
        v = np.zeros((self.dim, 1), dtype=np.int64)
        v[self.idempotents, 0] = 1
        return self.gf(v)

    def multiply(self, x: linalg.Mat, y: linalg.Mat) -> linalg.Mat:
        xs = np.asarray(x.view(np.ndarray), dtype=np.int64).ravel()
        ys = np.asarray(y.view(np.ndarray), dtype=np.int64).ravel()
        out = np.einsum("i,j,ijk->k", xs, ys, self.constants) % self.p
        return self.gf(out.reshape((self.dim, 1)))

    def left_regular(self, x: linalg.Mat) -> linalg.Mat:
        coeffs = np.asarray(x.view(np.ndarray), dtype=np.int64).ravel()
        return linalg.linear_combination(self.gf, coeffs, self.left_regular_matrices, (self.dim, self.dim))

    def corner_map(self, i: int, j: int) -> linalg.Mat:
        """Matrix of x -> e_i x e_j (positions into the idempotent list)."""
        return linalg.mul(self.left_regular_matrices[self.idempotents[i]],
                          self.right_regular_matrices[self.idempotents[j]])

    def corner_basis(self, i: int, j: int) -> linalg.Mat:
        return linalg.column_basis(self.corner_map(i, j))

    def _check_associative(self):
        c = self.constants
        lhs = np.tensordot(c, c, axes=([2], [0])) % self.p                    # (b_i b_j) b_k
        rhs = np.einsum("jkl,ilm->ijkm", c, c) % self.p                       # b_i (b_j b_k)
        if not np.array_equal(lhs, rhs):
            bad = np.argwhere(lhs != rhs)[0]
            i, j, k = (self.labels[t] for t in bad[:3])
            raise AlgebraError(f"{self.name}: associativity fails on ({i}, {j}, {k})")

    def _check_idempotents(self):
        identity = linalg.identity(self.gf, self.dim)
        unit = self.unit()
        if not linalg.equal(self.left_regular(unit), identity):
            raise AlgebraError(f"{self.name}: idempotents do not sum to the unit")
        for a, i in enumerate(self.idempotents):
            for b, j in enumerate(self.idempotents):
                expected = self.basis_vector(i) if a == b else linalg.zeros(self.gf, self.dim, 1)
                if not linalg.equal(self.multiply(self.basis_vector(i), self.basis_vector(j)), expected):
                    raise AlgebraError(f"{self.name}: idempotents {self.labels[i]}, {self.labels[j]} are not orthogonal")

    def _check_local_corners(self):
        for k in range(len(self.idempotents)):
            self.corner_radical(k)

    # radical and simples

    def _is_nilpotent(self, m: linalg.Mat) -> bool:
        current = m
        steps = 1
        while steps < self.dim:
            current = linalg.mul(current, current)
            steps *= 2
        return linalg.is_zero(current)

    def corner_eigenvalue(self, k: int, y: linalg.Mat) -> int:
        """The unique lambda with y - lambda e_k nilpotent, for y in e_k A e_k."""
        ly = self.left_regular(y)
        le = self.left_regular_matrices[self.idempotents[k]]
        for lam in range(self.p):
            shifted = ly - linalg.scalar(self.gf, lam) * le
            if self._is_nilpotent(shifted):
                return lam
        raise AlgebraError(f"{self.name}: corner at {self.vertex_labels[k]} is not local "
                           f"(idempotent {self.labels[self.idempotents[k]]} is not primitive over F_{self.p})")

    def corner_radical(self, k: int) -> linalg.Mat:
        cached = self._corner_radicals.get(k)
        if cached is not None:
            return cached
        corner = self.corner_basis(k, k)
        e_k = self.basis_vector(self.idempotents[k])
        shifted = []
        for col in range(corner.shape[1]):
            y = corner[:, col:col + 1]
            lam = self.corner_eigenvalue(k, y)
            shifted.append(y - linalg.scalar(self.gf, lam) * e_k)
        span = linalg.column_basis(linalg.hstack(self.gf, shifted, self.dim))
        for a in range(span.shape[1]):
            for b in range(span.shape[1]):
                prod = self.multiply(span[:, a:a + 1], span[:, b:b + 1])
                if not linalg.in_column_span(span, prod):
                    raise AlgebraError(f"{self.name}: corner at {self.vertex_labels[k]} is not local")
        self._corner_radicals[k] = span
        return span

    @cached_property
    def radical(self) -> linalg.Mat:
        """Columns span the Jacobson radical: off-diagonal corners plus corner radicals."""
        n = len(self.idempotents)
        blocks = []
        for i in range(n):
            for j in range(n):
                blocks.append(self.corner_radical(i) if i == j else self.corner_basis(i, j))
        rad = linalg.column_basis(linalg.hstack(self.gf, blocks, self.dim))
        self._check_basic(rad)
        return rad

    def _check_basic(self, rad: linalg.Mat):
        n = len(self.idempotents)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                a, b = self.corner_basis(i, j), self.corner_basis(j, i)
                for s in range(a.shape[1]):
                    for t in range(b.shape[1]):
                        prod = self.multiply(a[:, s:s + 1], b[:, t:t + 1])
                        if not linalg.in_column_span(rad, prod):
                            raise AlgebraError(f"{self.name}: idempotents {self.vertex_labels[i]} and "
                                               f"{self.vertex_labels[j]} are isomorphic; algebra is not basic")

    @cached_property
    def radical_square(self) -> linalg.Mat:
        rad = self.radical
        prods = [self.multiply(rad[:, a:a + 1], rad[:, b:b + 1])
                 for a in range(rad.shape[1]) for b in range(rad.shape[1])]
        return linalg.column_basis(linalg.hstack(self.gf, prods, self.dim))

    @cached_property
    def characters(self) -> List[List[int]]:
        """characters[k][t]: scalar by which basis element t acts on the simple at vertex k."""
        table = []
        for k in range(len(self.idempotents)):
            corner = self.corner_map(k, k)
            table.append([self.corner_eigenvalue(k, corner[:, t:t + 1]) for t in range(self.dim)])
        return table

    # presentation

    @property
    def presentation(self) -> ArrowPresentation:
        if self._presentation is None:
            self._presentation = arrow_presentation(self)
        return self._presentation

    def vertex_of(self, label: str) -> int:
        return self.vertex_labels.index(label)

    def same_structure(self, other: "BasedAlgebra") -> bool:
        return (self.p == other.p and self.dim == other.dim
                and self.idempotents == other.idempotents
                and np.array_equal(self.constants, other.constants))


def _normal_forms(q: Quiver, p: int, bound: int):
    """
    Reduce all paths modulo the relation ideal.

    Returns (basis paths, reducer) where reducer maps a path to a dict
    {basis path: coefficient}; paths of length >= the nilpotency bound reduce to 0.
    """
    gf = linalg.field(p)
    for length in range(1, bound + 1):
        universe = [path for n in range(length + 1) for path in q.paths_of_length(n)]
        index = {path: i for i, path in enumerate(universe)}
        rows = []
        for rel in q.relations:
            src, tgt = q.endpoints(rel[0][1])
            longest = max(len(path) for _, path in rel)
            for pre_len in range(length - longest + 1):
                prefixes = [x for x in q.paths_of_length(pre_len) if x[1] == src]
                for post_len in range(length - longest - pre_len + 1):
                    suffixes = [x for x in q.paths_of_length(post_len) if x[0] == tgt]
                    for pre, post in product(prefixes, suffixes):
                        row = np.zeros(len(universe), dtype=np.int64)
                        for c, path in rel:
                            arrows = pre[2] + path + post[2]
                            row[index[(pre[0], post[1], arrows)]] += c
                        rows.append(row % p)
        longest_paths = [path for path in universe if len(path[2]) == length]
        order = sorted(range(len(universe)), key=lambda i: (-len(universe[i][2]), universe[i][2], universe[i][0]))
        ideal = gf(np.array([[r[i] for i in order] for r in rows], dtype=np.int64)) if rows else \
            linalg.zeros(gf, 0, len(universe))
        reduced, pivots = linalg.rref(ideal)
        pivot_paths = {universe[order[c]] for c in pivots}
        if all(path in pivot_paths for path in longest_paths):
            basis = [universe[order[c]] for c in range(len(order)) if universe[order[c]] not in pivot_paths]
            basis.sort(key=lambda x: (len(x[2]), x[2], q.vertices.index(x[0])))
            ints = np.asarray(reduced.view(np.ndarray), dtype=np.int64)
            reducer = {}
            for r, c in enumerate(pivots):
                reducer[universe[order[c]]] = {universe[order[j]]: int((-ints[r, j]) % p)
                                               for j in range(len(order)) if j not in pivots and ints[r, j]}
            return basis, reducer, length
    raise AlgebraError(f"infinite-dimensional quotient: paths of length {bound} survive the relations")


def path_algebra(q: Quiver, p: int, name: str = "kQ/I") -> BasedAlgebra:
    """Based algebra of reduced path monomials; idempotents are the trivial paths."""
    bound = settings().max_path_length
    basis, reducer, nil_length = _normal_forms(q, p, bound)
    position = {path: i for i, path in enumerate(basis)}
    dim = len(basis)

    def reduce(path) -> Dict[int, int]:
        if len(path[2]) >= nil_length:
            return {}
        if path in position:
            return {position[path]: 1}
        return {position[b]: c for b, c in reducer[path].items()}

    constants = np.zeros((dim, dim, dim), dtype=np.int64)
    for i, left in enumerate(basis):
        for j, right in enumerate(basis):
            # b_i * b_j: first b_j, then b_i
            if right[1] != left[0]:
                continue
            for k, c in reduce((right[0], left[1], right[2] + left[2])).items():
                constants[i, j, k] = (constants[i, j, k] + c) % p

    labels = [f"e{x[0]}" if not x[2] else ".".join(x[2]) for x in basis]
    idempotents = list(range(len(q.vertices)))
    vertex_index = {v: k for k, v in enumerate(q.vertices)}
    arrow_positions = [position[(src, tgt, (label,))] for label, src, tgt in q.arrows]
    gf = linalg.field(p)
    arrow_vectors = linalg.hstack(gf, [gf.Identity(dim)[:, i:i + 1] for i in arrow_positions], dim)
    arrow_index = {label: k for k, (label, _, _) in enumerate(q.arrows)}
    words = [tuple(arrow_index[a] for a in x[2]) for x in basis if x[2]]
    expression = np.zeros((dim, len(idempotents) + len(words)), dtype=np.int64)
    for i in range(dim):
        expression[i, i] = 1
    presentation = ArrowPresentation(
        arrows=[(label, vertex_index[src], vertex_index[tgt]) for label, src, tgt in q.arrows],
        arrow_vectors=arrow_vectors, words=words, expression=expression)

    algebra = BasedAlgebra(p, labels, constants, idempotents, name=name,
                           vertex_labels=list(q.vertices), presentation=presentation)
    algebra.quiver = q
    logger.info(f"🧮 Built {name}: dim {dim} over F_{p}, {len(q.vertices)} vertices")
    return algebra


def opposite(a: BasedAlgebra) -> BasedAlgebra:
    """Same basis with c'[i][j] = c[j][i]; opposite(opposite(a)) returns a itself."""
    if a._opposite is None:
        op = BasedAlgebra(a.p, a.labels, a.constants.transpose(1, 0, 2), a.idempotents,
                          name=_op_name(a.name), vertex_labels=a.vertex_labels, validate=False)
        op._opposite = a
        a._opposite = op
    return a._opposite


def _op_name(name: str) -> str:
    return name[:-3] if name.endswith("^op") else f"{name}^op"


def semisimple_algebra(k: int, p: int, name: str = "k^n") -> BasedAlgebra:
    constants = np.zeros((k, k, k), dtype=np.int64)
    for i in range(k):
        constants[i, i, i] = 1
    return BasedAlgebra(p, [f"e{i + 1}" for i in range(k)], constants, list(range(k)),
                        name=name, vertex_labels=[str(i + 1) for i in range(k)])


def arrow_presentation(a: BasedAlgebra) -> ArrowPresentation:
    """
    Arrows = basis of e_j J e_i modulo e_j J^2 e_i, preferring algebra basis
    elements; then every basis element is written over idempotents and arrow words.
    """
    gf, n = a.gf, len(a.idempotents)
    rad_sq = a.radical_square
    arrows, vectors = [], []
    for i in range(n):
        for j in range(n):
            corner = a.corner_map(j, i)
            span = rad_sq
            count = 0
            for t in range(a.dim):
                cand = corner[:, t:t + 1]
                if i == j:
                    cand = cand - linalg.scalar(gf, a.characters[i][t]) * a.basis_vector(a.idempotents[i])
                if linalg.is_zero(cand) or linalg.in_column_span(span, cand):
                    continue
                count += 1
                label = a.labels[t] if linalg.equal(cand, a.basis_vector(t)) else \
                    f"{a.vertex_labels[i]}>{a.vertex_labels[j]}#{count}"
                arrows.append((label, i, j))
                vectors.append(cand)
                span = linalg.hstack(gf, [span, cand], a.dim)
    arrow_vectors = linalg.hstack(gf, vectors, a.dim)

    # words, shortest first; a word (w_1, ..., w_k) is the element w_k * ... * w_1
    spanning = [a.basis_vector(e) for e in a.idempotents]
    words: List[Tuple[int, ...]] = []
    frontier = [((k,), vectors[k]) for k in range(len(arrows))]
    while frontier:
        next_frontier = []
        for word, vec in frontier:
            if linalg.is_zero(vec):
                continue
            words.append(word)
            spanning.append(vec)
            tgt = arrows[word[-1]][2]
            for k, (_, src, _) in enumerate(arrows):
                if src == tgt:
                    next_frontier.append((word + (k,), a.multiply(vectors[k], vec)))
        frontier = next_frontier
        if len(words) > a.dim ** 3:
            raise AlgebraError(f"{a.name}: radical does not look nilpotent")
    span = linalg.hstack(gf, spanning, a.dim)
    keep = linalg.independent_columns(span)
    if len(keep) != a.dim:
        raise AlgebraError(f"{a.name}: arrows and idempotents do not generate the algebra")
    chosen = span[:, keep]
    coords = linalg.coordinates(chosen, linalg.identity(gf, a.dim))
    expression = np.zeros((a.dim, n + len(words)), dtype=np.int64)
    ints = np.asarray(coords.view(np.ndarray), dtype=np.int64)
    for r, col in enumerate(keep):
        expression[:, col] = ints[r, :]
    return ArrowPresentation(arrows=arrows, arrow_vectors=arrow_vectors, words=words, expression=expression)


def cartan_matrix(a: BasedAlgebra) -> List[List[int]]:
    """Entry (i, j) = dim e_i A e_j, the multiplicity of S_i in P_j."""
    n = len(a.idempotents)
    return [[linalg.rank(a.corner_map(i, j)) for j in range(n)] for i in range(n)]


def cartan_determinant(a: BasedAlgebra) -> int:
    return int(sympy.Matrix(cartan_matrix(a)).det())
