"""
Check Reports

Structured pass/fail results for the verification operations.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class Violation:
    """One failed identity together with the data that exhibits it"""
    identity: str
    witness: Any = None

    def to_dict(self) -> Dict[str, Any]:
        return {"identity": self.identity, "witness": self.witness}


@dataclass
class CheckReport:
    """Outcome of a verification: verdict, violations and free-form details"""
    name: str
    passed: bool = True
    violations: List[Violation] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def fail(self, identity: str, witness: Any = None) -> None:
        """Record a violation and flip the verdict."""
        self.passed = False
        self.violations.append(Violation(identity, witness))

    def merge(self, other: "CheckReport", prefix: Optional[str] = None) -> None:
        """Fold another report's violations into this one."""
        tag = prefix or other.name
        for v in other.violations:
            self.fail(f"{tag}: {v.identity}", v.witness)
        self.details[tag] = other.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "violations": [v.to_dict() for v in self.violations],
            "details": self.details,
        }

    def __bool__(self) -> bool:
        return self.passed
