"""Ratio reports shared by the rule and Holmstedt verifiers."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RatioRecord:
    """One ``lhs / rhs`` comparison."""

    f_id: str
    lhs: float
    rhs: float
    t: float | None = None

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


@dataclass
class RatioReport:
    """Ratio statistics of a two-sided equivalence check.

    Attributes
    ----------
    records : list of RatioRecord
        Compared pairs with both sides positive and finite.
    skipped : list of (str, str)
        ``(f_id, reason)`` for excluded members (zero functions, infinite
        norms).
    refined_spread : float or None
        Spread recomputed on a twice finer grid.
    meta : dict
        Free-form description of the run.
    """

    records: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    refined_spread: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r.ratio for r in self.records], dtype=float)

    @property
    def min(self) -> float:
        return float(np.min(self.ratios)) if self.records else math.nan

    @property
    def max(self) -> float:
        return float(np.max(self.ratios)) if self.records else math.nan

    @property
    def spread(self) -> float:
        return self.max / self.min if self.records else math.nan

    @property
    def drift(self) -> float | None:
        if self.refined_spread is None:
            return None
        return abs(self.refined_spread / self.spread - 1.0)

    def passed(self, spread_bound: float = 100.0, drift_bound: float | None = 0.1) -> bool:
        if not self.records or not self.spread <= spread_bound:
            return False
        if drift_bound is not None and self.drift is not None and not self.drift <= drift_bound:
            return False
        return True

    def summary(self) -> dict:
        """JSON-ready statistics; undefined values are ``None``."""
        return {"count": len(self.records), "min": _finite(self.min), "max": _finite(self.max),
                "spread": _finite(self.spread),
                "refined_spread": self.refined_spread, "drift": self.drift,
                "skipped": [list(s) for s in self.skipped], "meta": self.meta}

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2, default=_json_default)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "f_id", "lhs", "rhs", "ratio"])
        for r in self.records:
            w.writerow(["" if r.t is None else repr(float(r.t)), r.f_id, repr(float(r.lhs)),
                        repr(float(r.rhs)), repr(float(r.ratio))])
        return buf.getvalue()

    def to_svg(self, path) -> None:
        """Static plot of ratio against ``t`` (or member index when ``t`` is absent)."""
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        if self.records and all(r.t is not None for r in self.records):
            ids = sorted({r.f_id for r in self.records})
            for fid in ids:
                rows = sorted((r.t, r.ratio) for r in self.records if r.f_id == fid)
                ax.plot([p[0] for p in rows], [p[1] for p in rows], lw=0.8)
            ax.set_xscale("log")
            ax.set_xlabel("t")
        else:
            ax.plot(range(len(self.records)), self.ratios, "o", ms=3)
            ax.set_xlabel("member")
        ax.set_yscale("log")
        ax.set_ylabel("lhs / rhs")
        ax.set_title(str(self.meta.get("title", "ratio report")))
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def _finite(v):
    return v if v is not None and math.isfinite(v) else None


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
