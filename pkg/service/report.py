from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Check:
    """名前付きの残差チェック"""

    name: str
    residual: float
    tol: float
    detail: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        # NaN は不合格
        return bool(self.residual < self.tol)


@dataclass
class VerificationReport:
    """検証結果の一覧。notes は合否に影響しない診断値"""

    title: str
    checks: list[Check] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, residual: float, tol: float, **detail: Any) -> Check:
        check = Check(name, float(residual), float(tol), dict(detail))
        self.checks.append(check)
        return check

    def note(self, name: str, value: Any) -> None:
        self.notes[name] = value

    def extend(self, other: 'VerificationReport', prefix: str = '') -> None:
        for check in other.checks:
            self.checks.append(Check(prefix + check.name, check.residual, check.tol, check.detail))
        for name, value in other.notes.items():
            self.notes[prefix + name] = value

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        if not self.checks:
            return 0.0
        return max(c.residual for c in self.checks)
