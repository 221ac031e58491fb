"""Verdicts, the threshold policy and per-criterion results."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import numpy as np

__all__ = [
    "BOUNDED_BELOW",
    "NOT_BOUNDED_BELOW",
    "INCONCLUSIVE",
    "VERDICTS",
    "CRITERIA",
    "ThresholdPolicy",
    "CriterionResult",
    "trend_slope",
]

BOUNDED_BELOW = "bounded-below"
NOT_BOUNDED_BELOW = "not-bounded-below"
INCONCLUSIVE = "inconclusive"
VERDICTS = (BOUNDED_BELOW, NOT_BOUNDED_BELOW, INCONCLUSIVE)

CRITERIA = (
    "ess-inf-density",
    "kernel-scan",
    "test-function-scan",
    "berezin-scan",
    "luecking",
    "toeplitz-sigma",
    "halfplane-kernel-scan",
    "section-sigma",
)


@dataclass(frozen=True)
class ThresholdPolicy:
    """One immutable object holding every verdict threshold.

    Mass-relative thresholds are multiplied by the total mass of the pullback
    measure (``||h||_p^p``) before use. The gap between ``delta_fail`` and
    ``delta_pass`` is reported as inconclusive.
    """

    delta_pass: float = 1e-3
    delta_fail: float = 1e-4
    ess_inf_percentile: float = 1.0
    confidence_z: float = 2.0
    r_boundary: float = 1 - 2.0**-20
    # scans: log-log slope of the per-level minimum against the distance to the boundary
    decay_slope_pass: float = 0.05
    decay_slope_fail: float = 0.25
    trend_max_distance: float = 0.1
    luecking_c_pass: float = 0.1
    luecking_c_fail: float = 0.02
    witness_ratio: float = 0.2
    witness_density: float = 0.05
    sigma_pass: float = 1e-3
    sigma_fail: float = 1e-4

    def __post_init__(self):
        if not 0 < self.delta_fail < self.delta_pass:
            raise ValueError("policy needs 0 < delta_fail < delta_pass")
        if not 0 <= self.decay_slope_pass < self.decay_slope_fail:
            raise ValueError("policy needs decay_slope_pass < decay_slope_fail")
        if not 0 < self.luecking_c_fail < self.luecking_c_pass <= 1:
            raise ValueError("policy needs 0 < luecking_c_fail < luecking_c_pass <= 1")
        if not 0 < self.r_boundary < 1:
            raise ValueError("r_boundary must lie in (0, 1)")

    @classmethod
    def from_dict(cls, d):
        d = dict(d or {})
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown policy keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self):
        return asdict(self)


@dataclass
class CriterionResult:
    id: str
    constant_estimate: float
    verdict: str
    grid: dict = field(default_factory=dict)
    seconds: float = 0.0
    notes: list = field(default_factory=list)
    # evidence-only results are reported but excluded from verdict agreement
    evidence_only: bool = False
    scope: str = "proven"
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.id not in CRITERIA:
            raise ValueError(f"unknown criterion id {self.id!r}")
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        c = float(self.constant_estimate)
        if not c >= 0:
            raise ValueError(f"constant_estimate must be >= 0, got {c}")
        self.constant_estimate = c

    @property
    def decisive(self):
        return self.verdict != INCONCLUSIVE and not self.evidence_only and self.scope == "proven"

    def to_dict(self):
        return _jsonable(
            {
                "id": self.id,
                "constant_estimate": self.constant_estimate,
                "verdict": self.verdict,
                "grid": self.grid,
                "seconds": self.seconds,
                "notes": self.notes,
                "evidence_only": self.evidence_only,
                "scope": self.scope,
                "details": self.details,
            }
        )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def trend_slope(distances, values, max_distance=0.1):
    """Least-squares slope of ``log value`` against ``log distance`` over the
    levels with ``distance <= max_distance``.

    A positive slope means the values shrink as the boundary is approached;
    a slope of 1/2 is the ``(1 - r)^(1/2)`` decay of a compact symbol.
    Returns ``(slope, n_levels_used)``; the slope is ``inf`` when a value is
    exactly zero, and ``nan`` with fewer than two levels.
    """
    d = np.asarray(distances, dtype=float)
    v = np.asarray(values, dtype=float)
    sel = (d <= max_distance) & (d > 0)
    d, v = d[sel], v[sel]
    if len(d) < 2:
        return float("nan"), int(len(d))
    if np.any(v <= 0):
        return float("inf"), int(len(d))
    x, y = np.log(d), np.log(v)
    slope = np.polyfit(x, y, 1)[0]
    return float(slope), int(len(d))
