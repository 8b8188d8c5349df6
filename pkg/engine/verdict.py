# engine/verdict.py

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional

TRUE = "true"
FALSE = "false"
UNDECIDED = "undecided"


@dataclass
class Check:
    """A re-runnable fact cited by a witness: ``op`` applied to ``args`` gave ``value``."""
    op: str
    args: Dict[str, Any]
    value: Any


@dataclass
class Verdict:
    """Tri-state answer with a JSON-ready witness and the checks that back it."""
    label: str
    value: str
    witness: Dict[str, Any] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    parts: Dict[str, "Verdict"] = field(default_factory=dict)
    data: Any = None

    @classmethod
    def of(cls, label: str, ok: bool, **kw) -> "Verdict":
        return cls(label, TRUE if ok else FALSE, **kw)

    @classmethod
    def undecided(cls, label: str, reason: str, **kw) -> "Verdict":
        v = cls(label, UNDECIDED, **kw)
        v.witness.setdefault("reason", reason)
        return v

    @classmethod
    def all_of(cls, label: str, parts: Iterable["Verdict"], witness: Optional[Dict[str, Any]] = None) -> "Verdict":
        """False dominates undecided, which dominates true."""
        parts = list(parts)
        values = {p.value for p in parts}
        value = FALSE if FALSE in values else UNDECIDED if UNDECIDED in values else TRUE
        return cls(label, value, witness=witness or {}, parts={p.label: p for p in parts})

    def __bool__(self) -> bool:
        return self.value == TRUE

    @property
    def is_false(self) -> bool:
        return self.value == FALSE

    @property
    def is_undecided(self) -> bool:
        return self.value == UNDECIDED

    def first_failure(self) -> Optional["Verdict"]:
        if self.value == TRUE:
            return None
        for part in self.parts.values():
            if part.value == self.value:
                return part.first_failure() or part
        return self

    def all_checks(self) -> List[Check]:
        out = list(self.checks)
        for part in self.parts.values():
            out.extend(part.all_checks())
        return out


@dataclass(frozen=True)
class DimResult:
    """finite(n) | infinite | undecided, for pdim and gldim."""
    kind: str
    value: Optional[int] = None
    certificate: Optional[str] = None

    @classmethod
    def finite(cls, n: int, certificate: str = None) -> "DimResult":
        return cls("finite", n, certificate)

    @classmethod
    def infinite(cls, certificate: str = None) -> "DimResult":
        return cls("infinite", None, certificate)

    @classmethod
    def undecided(cls, certificate: str = None) -> "DimResult":
        return cls("undecided", None, certificate)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def at_most(self, n: int) -> str:
        if self.kind == "finite":
            return TRUE if self.value <= n else FALSE
        return FALSE if self.kind == "infinite" else UNDECIDED

    @staticmethod
    def maximum(results: Iterable["DimResult"]) -> "DimResult":
        results = list(results)
        if any(r.kind == "infinite" for r in results):
            return next(r for r in results if r.kind == "infinite")
        if any(r.kind == "undecided" for r in results):
            return next(r for r in results if r.kind == "undecided")
        return DimResult.finite(max((r.value for r in results), default=0))

    def __str__(self):
        return f"finite({self.value})" if self.kind == "finite" else self.kind

    def to_dict(self) -> Dict[str, Any]:
        out = {"kind": self.kind}
        if self.value is not None:
            out["value"] = self.value
        if self.certificate:
            out["certificate"] = self.certificate
        return out
