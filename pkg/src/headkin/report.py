"""Per-impact comparison rows and the aggregate statistics built from them."""

from __future__ import annotations

from dataclasses import dataclass, field

from .filtering import FilterDecision
from .metrics import CoraRating, summarize

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ImpactComparison:
    impact_id: str
    location: str
    prv_headband: float
    prv_reference: float
    pra_headband: float
    pra_reference: float
    decision: FilterDecision | None = None
    cora: CoraRating | None = None

    def as_dict(self) -> dict:
        return {
            "impact_id": self.impact_id,
            "location": self.location,
            "decision": self.decision.as_dict() if self.decision else None,
            "prv": {"headband": self.prv_headband, "reference": self.prv_reference},
            "pra": {"headband": self.pra_headband, "reference": self.pra_reference},
            "cora": self.cora.as_dict() if self.cora else None,
        }


def aggregate(rows: list[dict]) -> dict | None:
    """Statistics for PRV and PRA, overall and per location label.

    Works on serialized rows so a loaded report can be checked against itself.
    Returns None for an empty list.
    """
    if not rows:
        return None

    def group(subset):
        return {
            q: summarize([r[q]["reference"] for r in subset], [r[q]["headband"] for r in subset])
            for q in ("prv", "pra")
        }

    locations = sorted({r["location"] for r in rows})
    return {
        "overall": group(rows),
        "by_location": {loc: group([r for r in rows if r["location"] == loc]) for loc in locations},
    }


@dataclass
class ComparisonReport:
    impacts: list[ImpactComparison] = field(default_factory=list)

    def as_dict(self) -> dict:
        rows = [c.as_dict() for c in self.impacts]
        out = {"schema_version": SCHEMA_VERSION, "impacts": rows}
        agg = aggregate(rows)
        if agg is not None:
            out["aggregates"] = agg
        return out
