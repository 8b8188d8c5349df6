# data/data_loader.py

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from engine.algebra import BasedAlgebra
from engine.exactstruct import ABELIAN, RELATIVE, ExactStructure
from engine.modcat import (Module, enumerate_indecomposables, indecomposable_injectives, is_indecomposable,
                           is_isomorphic)
from engine.homology import indecomposable_projectives_cached, simples_cached
from engine.subcat import Universe
from utils.logger import get_logger

from .quiver_reader import ParseError, UnknownNameError, WorkbenchFile, build_algebra, build_module, parse_text, read_file

logger = get_logger("loader")


@dataclass
class Workbench:
    """A loaded input file: the algebra, its named modules and the universes built so far."""
    source: str
    algebra: BasedAlgebra
    modules: Dict[str, Module]
    universes: Dict[tuple, Universe] = field(default_factory=dict)
    _builtin: Optional[Dict[str, Module]] = field(default=None, repr=False)

    def builtin(self) -> Dict[str, Module]:
        """P<v>, S<v>, I<v> for every vertex, for names the file does not define."""
        if self._builtin is None:
            self._builtin = {}
            for family in (indecomposable_projectives_cached(self.algebra), simples_cached(self.algebra),
                           indecomposable_injectives(self.algebra)):
                for m in family:
                    self._builtin.setdefault(m.name, m)
        return self._builtin

    def module(self, name: str) -> Module:
        if name in self.modules:
            return self.modules[name]
        for universe in self.universes.values():
            for m in universe.modules:
                if m.name == name:
                    return m
        builtin = self.builtin()
        if name in builtin:
            return builtin[name]
        raise UnknownNameError(name, list(self.modules))

    def modules_named(self, names: Sequence[str]) -> List[Module]:
        return [self.module(n) for n in names]

    def structure(self, kind: str = ABELIAN, generators: Sequence[str] = ()) -> ExactStructure:
        if kind == ABELIAN:
            return ExactStructure.abelian(self.algebra)
        if kind == RELATIVE:
            return ExactStructure.relative(self.algebra, self.modules_named(generators))
        raise ValueError(f"unknown structure {kind!r}")

    def universe(self, bound: Optional[Sequence[int]] = None, structure: Optional[ExactStructure] = None,
                 jobs: Optional[int] = None) -> Universe:
        """
        Complete list of indecomposables up to ``bound`` (default: dim vectors of
        the indecomposable projectives and injectives, componentwise max). Members
        isomorphic to a named indecomposable module are replaced by that module.
        """
        structure = structure or ExactStructure.abelian(self.algebra)
        bound = tuple(bound) if bound is not None else self.default_bound()
        key = (bound, structure.key)
        if key in self.universes:
            return self.universes[key]
        named = [m for m in list(self.modules.values()) + list(self.builtin().values())
                 if m.dim and is_indecomposable(m)]
        members = []
        for x in enumerate_indecomposables(self.algebra, bound, jobs=jobs):
            match = next((m for m in named if m.dim_vector == x.dim_vector and is_isomorphic(m, x)), None)
            members.append(match if match is not None else x)
        universe = Universe(members, structure)
        self.universes[key] = universe
        logger.info(f"🌐 universe for bound {bound}: {', '.join(m.name for m in members)}")
        return universe

    def default_bound(self) -> tuple:
        dims = [m.dim_vector for m in indecomposable_projectives_cached(self.algebra)]
        dims += [m.dim_vector for m in indecomposable_injectives(self.algebra)]
        return tuple(max(d[k] for d in dims) for k in range(len(self.algebra.idempotents)))


class DataLoader:
    """Reads an input file (or text) into a Workbench session."""

    def __init__(self, path: Optional[str] = None, text: Optional[str] = None):
        if (path is None) == (text is None):
            raise ValueError("give exactly one of path or text")
        self.path = path
        self.text = text

    def parse(self) -> WorkbenchFile:
        if self.path is not None:
            return read_file(self.path)
        return parse_text(self.text)

    def load(self) -> Workbench:
        wb = self.parse()
        algebra = build_algebra(wb)
        modules: Dict[str, Module] = {}
        for block in wb.modules:
            modules[block.name] = build_module(algebra, block, wb.source)
        logger.info(f"📥 Loaded {algebra.name} from {wb.source}: dim {algebra.dim}, "
                    f"{len(modules)} named modules")
        return Workbench(wb.source, algebra, modules)


def load_workbench(path: str) -> Workbench:
    return DataLoader(path=path).load()


__all__ = ["DataLoader", "ParseError", "UnknownNameError", "Workbench", "load_workbench"]
