# data/quiver_reader.py
"""
Reader for workbench input files: a quiver with relations followed by
module blocks.

    # comment
    algebra A2
    field 2
    vertex 1
    vertex 2
    arrow a 1 2
    relation 1*a.b + 1*c.d          # paths read "first a, then b"
    module P1 dim 1 1
    act a = [[1]]

``act`` takes either the arrow block (dims[target] x dims[source]) or the
full action matrix of any basis label; full matrices of non-arrow labels
are checked against the action forced by the arrows.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import yaml

from engine import linalg
from engine.algebra import BasedAlgebra, Quiver, path_algebra
from engine.errors import WorkbenchError
from engine.modcat import Module, module_from_arrows
from utils.logger import get_logger

logger = get_logger("reader")


class ParseError(WorkbenchError, ValueError):
    """Malformed input; ``line`` is 1-based, 0 when the whole file is at fault."""

    def __init__(self, message: str, line: int = 0, source: str = "<input>"):
        super().__init__(f"{source}:{line}: {message}" if line else f"{source}: {message}")
        self.line = line
        self.source = source


class UnknownNameError(WorkbenchError, KeyError):
    def __init__(self, name: str, known: List[str]):
        super().__init__(f"unknown module {name!r}; the file defines {', '.join(known) or 'no modules'}")
        self.name = name

    def __str__(self):
        return self.args[0]


@dataclass
class ModuleBlock:
    name: str
    dims: Tuple[int, ...]
    line: int
    acts: Dict[str, Tuple[List[List[int]], int]] = field(default_factory=dict)


@dataclass
class WorkbenchFile:
    source: str
    name: str = "A"
    p: Optional[int] = None
    vertices: List[str] = field(default_factory=list)
    arrows: List[Tuple[str, str, str]] = field(default_factory=list)
    relations: List[Tuple[Tuple[int, Tuple[str, ...]], ...]] = field(default_factory=list)
    modules: List[ModuleBlock] = field(default_factory=list)


def _parse_int(token: str, what: str, line: int, source: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", line, source) from None


def _parse_relation(text: str, line: int, source: str):
    terms = []
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            raise ParseError("empty term in relation", line, source)
        coeff, star, path = chunk.partition("*")
        if not star:
            coeff, path = "1", chunk
        coeff = coeff.strip().replace(" ", "")
        c = _parse_int(coeff, "relation coefficient", line, source)
        arrows = tuple(x.strip() for x in path.strip().split("."))
        if not all(arrows):
            raise ParseError(f"malformed path {path.strip()!r}", line, source)
        terms.append((c, arrows))
    return tuple(terms)


def _parse_matrix(text: str, line: int, source: str) -> List[List[int]]:
    try:
        rows = yaml.safe_load(text)
    except yaml.YAMLError:
        raise ParseError(f"unreadable matrix {text!r}", line, source) from None
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"matrix must be a list of rows, got {text!r}", line, source)
    if rows and len({len(r) for r in rows}) != 1:
        raise ParseError("matrix rows have different lengths", line, source)
    if not all(isinstance(x, int) for r in rows for x in r):
        raise ParseError("matrix entries must be integers", line, source)
    return rows


def parse_text(text: str, source: str = "<input>") -> WorkbenchFile:
    wb = WorkbenchFile(source=source)
    current: Optional[ModuleBlock] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        keyword, _, rest = content.partition(" ")
        rest = rest.strip()
        tokens = rest.split()

        if keyword == "algebra":
            wb.name = rest or wb.name
        elif keyword == "field":
            if len(tokens) != 1:
                raise ParseError("usage: field <p>", number, source)
            if wb.p is not None:
                raise ParseError("field declared twice", number, source)
            wb.p = _parse_int(tokens[0], "field", number, source)
        elif keyword == "vertex":
            if len(tokens) != 1:
                raise ParseError("usage: vertex <label>", number, source)
            if tokens[0] in wb.vertices:
                raise ParseError(f"vertex {tokens[0]} declared twice", number, source)
            wb.vertices.append(tokens[0])
        elif keyword == "arrow":
            if len(tokens) != 3:
                raise ParseError("usage: arrow <label> <source> <target>", number, source)
            label, src, tgt = tokens
            for v in (src, tgt):
                if v not in wb.vertices:
                    raise ParseError(f"arrow {label} uses undeclared vertex {v}", number, source)
            wb.arrows.append((label, src, tgt))
        elif keyword == "relation":
            if not rest:
                raise ParseError("usage: relation <c1>*<p1> + ...", number, source)
            wb.relations.append(_parse_relation(rest, number, source))
        elif keyword == "module":
            if len(tokens) < 3 or tokens[1] != "dim":
                raise ParseError("usage: module <name> dim <d_1> <d_2> ...", number, source)
            if any(m.name == tokens[0] for m in wb.modules):
                raise ParseError(f"module {tokens[0]} declared twice", number, source)
            dims = tuple(_parse_int(t, "dimension", number, source) for t in tokens[2:])
            if len(dims) != len(wb.vertices):
                raise ParseError(f"module {tokens[0]} needs {len(wb.vertices)} dimensions, got {len(dims)}",
                                 number, source)
            current = ModuleBlock(tokens[0], dims, number)
            wb.modules.append(current)
        elif keyword == "act":
            if current is None:
                raise ParseError("act outside a module block", number, source)
            label, eq, matrix = rest.partition("=")
            label = label.strip()
            if not eq or not label:
                raise ParseError("usage: act <basis-label> = [[...], ...]", number, source)
            if label in current.acts:
                raise ParseError(f"{current.name}: {label} given twice", number, source)
            current.acts[label] = (_parse_matrix(matrix.strip(), number, source), number)
        else:
            raise ParseError(f"unknown declaration {keyword!r}", number, source)

    if wb.p is None:
        raise ParseError("missing 'field <p>' declaration", 0, source)
    if not wb.vertices:
        raise ParseError("no vertices declared", 0, source)
    return wb


def read_file(path: str) -> WorkbenchFile:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_text(handle.read(), source=str(path))


def build_algebra(wb: WorkbenchFile) -> BasedAlgebra:
    try:
        quiver = Quiver(tuple(wb.vertices), tuple(wb.arrows), tuple(wb.relations))
        return path_algebra(quiver, wb.p, name=wb.name)
    except WorkbenchError as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(str(e), 0, wb.source) from e


def build_module(a: BasedAlgebra, block: ModuleBlock, source: str = "<input>") -> Module:
    gf = a.gf
    arrows = {label: (src, tgt) for label, src, tgt in a.presentation.arrows}
    offsets = [sum(block.dims[:k]) for k in range(len(block.dims) + 1)]
    n = offsets[-1]
    blocks, full = {}, {}
    for label, (rows, line) in block.acts.items():
        if label not in a.labels:
            raise ParseError(f"{block.name}: unknown basis label {label!r}", line, source)
        shape = (len(rows), len(rows[0]) if rows else 0)
        if label in arrows:
            src, tgt = arrows[label]
            if shape == (n, n) and (block.dims[tgt], block.dims[src]) != (n, n):
                blocks[label] = [r[offsets[src]:offsets[src + 1]] for r in rows[offsets[tgt]:offsets[tgt + 1]]]
                full[label] = (rows, line)
            elif shape == (block.dims[tgt], block.dims[src]) or (not rows and block.dims[tgt] == 0):
                blocks[label] = rows if rows else [[0] * block.dims[src] for _ in range(block.dims[tgt])]
            else:
                raise ParseError(f"{block.name}: {label} needs a {block.dims[tgt]}x{block.dims[src]} block "
                                 f"or a {n}x{n} action, got {shape[0]}x{shape[1]}", line, source)
        else:
            if shape != (n, n):
                raise ParseError(f"{block.name}: {label} needs a {n}x{n} action, got {shape[0]}x{shape[1]}",
                                 line, source)
            full[label] = (rows, line)
    try:
        m = module_from_arrows(a, block.dims, {k: linalg.matrix(gf, v, (len(v), block.dims[arrows[k][0]]))
                                               for k, v in blocks.items()}, name=block.name)
    except WorkbenchError as e:
        raise ParseError(str(e), block.line, source) from e
    for label, (rows, line) in full.items():
        given = linalg.matrix(gf, [[x % a.p for x in r] for r in rows], (n, n))
        if not linalg.equal(given, m.action[a.labels.index(label)]):
            raise ParseError(f"{block.name}: action of {label} disagrees with the action forced by the arrows",
                             line, source)
    logger.debug(f"📥 module {block.name} dim vector {m.dim_vector}")
    return m
