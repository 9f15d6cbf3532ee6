"""Machine-readable outcome of one property check."""
import math
from dataclasses import dataclass, field


@dataclass
class VerificationReport:
    property_name: str
    max_defect: float
    tolerance: float
    samples: int
    worst_case: dict = field(default_factory=dict)
    status: str = ""

    def __post_init__(self):
        self.max_defect = float(self.max_defect)
        if not self.status:
            self.status = "pass" if self.passed else "fail"

    @property
    def passed(self):
        # NaN (check not run) compares False
        return self.max_defect <= self.tolerance

    def to_dict(self):
        defect = self.max_defect if math.isfinite(self.max_defect) else None
        return {
            "property_name": self.property_name,
            "passed": self.passed,
            "status": self.status,
            "max_defect": defect,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "worst_case": _jsonable(self.worst_case),
        }

    def line(self):
        flag = self.status.upper() if self.status in ("skipped", "not-run", "error") \
            else ("PASS" if self.passed else "FAIL")
        return (f"[{flag}] {self.property_name}: max_defect={self.max_defect:.3e} "
                f"tol={self.tolerance:.1e} samples={self.samples}")


def not_run(name, reason):
    return VerificationReport(name, math.nan, 0.0, 0, {"reason": reason}, status="not-run")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "item"):  # numpy scalar
        return _jsonable(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj
