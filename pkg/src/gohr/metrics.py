"""Convergence metrics over run logs.

Three per-run metrics: the first episode from which a window's mean (or
max) error rate stays under threshold, and the first move from which a
window of consecutive moves are all accepted. Episode and move indices are
1-based; the move window may span episode boundaries. Cross-run aggregates
take the median (lower median for even counts) plus the min/max range.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class MetricParams:
    w_mean: int = 20
    t_mean: float = 0.1
    w_max: int = 10
    t_max: float = 0.2
    w_mstar: int = 15

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RunMetrics:
    e_star_mean: int | None
    e_star_max: int | None
    m_star: int | None
    params: MetricParams

    @property
    def all_attained(self) -> bool:
        return None not in (self.e_star_mean, self.e_star_max, self.m_star)

    def to_dict(self) -> dict:
        # Absent metrics serialize as null, never a sentinel number.
        return {
            "e_star_mean": self.e_star_mean,
            "e_star_max": self.e_star_max,
            "m_star": self.m_star,
            "params": self.params.to_dict(),
        }


def e_star_mean(errors, w: int, t: float) -> int | None:
    """Smallest 1-based episode t with mean(E_t..E_{t+w-1}) <= threshold."""
    if w < 1:
        raise ValueError("window must be >= 1")
    n = len(errors)
    if n < w:
        return None
    total = sum(errors[:w])
    if total <= t * w + 1e-12:
        return 1
    for start in range(1, n - w + 1):
        total += errors[start + w - 1] - errors[start - 1]
        if total <= t * w + 1e-12:
            return start + 1
    return None


def e_star_max(errors, w: int, t: float) -> int | None:
    """Smallest 1-based episode t with max(E_t..E_{t+w-1}) <= threshold."""
    if w < 1:
        raise ValueError("window must be >= 1")
    n = len(errors)
    for start in range(n - w + 1):
        if max(errors[start : start + w]) <= t + 1e-12:
            return start + 1
    return None


def m_star(codes, w: int) -> int | None:
    """Smallest 1-based move m followed by w consecutive accepts ('A')."""
    if w < 1:
        raise ValueError("window must be >= 1")
    run = 0
    for i, code in enumerate(codes):
        run = run + 1 if code == "A" else 0
        if run >= w:
            return i - w + 2
    return None


def m_star_conditional(flags, w: int) -> int | None:
    """m_star over moves where a property applies; 'na' moves are skipped.

    ``flags`` is a sequence of (applies, ok) per move (global order). The
    returned index is the original 1-based move index of the window start.
    Used for properties that are only judgeable on some moves, e.g. bucket
    ordering before the first placement.
    """
    if w < 1:
        raise ValueError("window must be >= 1")
    window: list[int] = []  # original indices of the last w applicable ok-moves
    for i, (applies, ok) in enumerate(flags):
        if not applies:
            continue
        if not ok:
            window.clear()
            continue
        window.append(i + 1)
        if len(window) == w:
            return window[0]
    return None


def run_metrics(errors, codes, params: MetricParams) -> RunMetrics:
    return RunMetrics(
        e_star_mean=e_star_mean(errors, params.w_mean, params.t_mean),
        e_star_max=e_star_max(errors, params.w_max, params.t_max),
        m_star=m_star(codes, params.w_mstar),
        params=params,
    )


def lower_median(values):
    """Median; the lower of the two central values for even counts."""
    s = sorted(values)
    if not s:
        return None
    return s[(len(s) - 1) // 2]


@dataclass(frozen=True)
class AggregateMetrics:
    """Medians of per-run metrics over seeds, with ranges and absent counts."""

    e_star_mean: int | None
    e_star_max: int | None
    m_star: int | None
    ranges: dict = field(default_factory=dict)
    absent: dict = field(default_factory=dict)
    n_runs: int = 0

    def to_dict(self) -> dict:
        return {
            "E_star_mean": self.e_star_mean,
            "E_star_max": self.e_star_max,
            "M_star": self.m_star,
            "ranges": self.ranges,
            "absent": self.absent,
            "n_runs": self.n_runs,
        }


def aggregate(runs) -> AggregateMetrics:
    fields = ("e_star_mean", "e_star_max", "m_star")
    medians, ranges, absent = {}, {}, {}
    for name in fields:
        present = [getattr(r, name) for r in runs if getattr(r, name) is not None]
        absent[name] = len(runs) - len(present)
        medians[name] = lower_median(present)
        ranges[name] = [min(present), max(present)] if present else None
    return AggregateMetrics(
        e_star_mean=medians["e_star_mean"],
        e_star_max=medians["e_star_max"],
        m_star=medians["m_star"],
        ranges=ranges,
        absent=absent,
        n_runs=len(runs),
    )
