"""Run traces and the benchmark quantities derived from them.

A RunTrace is the per-tick record of an evaluation run plus metadata
identifying what produced it. Traces serialize to CSV with a fixed
column order and `# key: value` header lines, and round-trip exactly.

The benchmark compares a policy-controlled run against a static-gNB
baseline of the same world: total NLoS time, how much later blockage
first sets in, and the percentage reduction in blocked time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .chamber import NLOS, ChamberState

TRACE_COLUMNS = ("tick", "gnb_x", "ue_x", "ue_y", "obs_x", "obs_y", "los", "path_loss", "action", "reward")
_META_ORDER = ("use_case", "policy_id", "seed", "config_hash", "dt")

Row = tuple[int, float, float, float, float, float, int, float, int, float]


class BenchmarkInvalidError(ValueError):
    """Raised when the static baseline never loses LoS."""


@dataclass
class RunTrace:
    meta: dict[str, str]
    rows: list[Row] = field(default_factory=list)

    @property
    def dt(self) -> float:
        return float(self.meta["dt"])

    def append_state(self, cs: ChamberState, action: int, reward: float) -> None:
        self.rows.append(
            (
                cs.tick_index,
                cs.gnb.x,
                cs.ue.x,
                cs.ue.y,
                cs.obstacle.x,
                cs.obstacle.y,
                cs.los,
                cs.path_loss,
                action,
                reward,
            )
        )

    def validate(self) -> None:
        for i, row in enumerate(self.rows):
            if row[0] != i:
                raise ValueError(f"trace ticks not contiguous from 0 at index {i}")

    # -- serialization ------------------------------------------------------

    def to_csv(self) -> str:
        lines = [f"# {key}: {self.meta[key]}" for key in _META_ORDER if key in self.meta]
        for key in sorted(self.meta):
            if key not in _META_ORDER:
                lines.append(f"# {key}: {self.meta[key]}")
        lines.append(",".join(TRACE_COLUMNS))
        for row in self.rows:
            lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "RunTrace":
        meta: dict[str, str] = {}
        rows: list[Row] = []
        header_seen = False
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
                continue
            if not header_seen:
                if tuple(line.split(",")) != TRACE_COLUMNS:
                    raise ValueError(f"unexpected trace header: {line!r}")
                header_seen = True
                continue
            f = line.split(",")
            rows.append(
                (
                    int(f[0]), float(f[1]), float(f[2]), float(f[3]), float(f[4]),
                    float(f[5]), int(f[6]), float(f[7]), int(f[8]), float(f[9]),
                )
            )
        trace = cls(meta=meta, rows=rows)
        trace.validate()
        return trace

    @classmethod
    def read_csv(cls, path: str | Path) -> "RunTrace":
        return cls.from_csv(Path(path).read_text())


# --------------------------------------------------------------------------
# Benchmark quantities


def nlos_ticks(trace: RunTrace) -> int:
    return sum(1 for row in trace.rows if row[6] == NLOS)


def nlos_total_time(trace: RunTrace) -> float:
    """Total obstructed time in seconds (NLoS tick count times dt)."""
    if not trace.rows:
        raise ValueError("empty trace")
    return nlos_ticks(trace) * trace.dt


def first_nlos_tick(trace: RunTrace) -> Optional[int]:
    for row in trace.rows:
        if row[6] == NLOS:
            return row[0]
    return None


def first_los_tick(trace: RunTrace) -> Optional[int]:
    for row in trace.rows:
        if row[6] != NLOS:
            return row[0]
    return None


def recovery_time(trace: RunTrace) -> Optional[float]:
    """Seconds until LoS is first reached, for runs that start obstructed."""
    if not trace.rows or trace.rows[0][6] != NLOS:
        return None
    t = first_los_tick(trace)
    return None if t is None else t * trace.dt


def onset_delay(trace_rl: RunTrace, trace_static: RunTrace) -> tuple[float, bool]:
    """Seconds by which the RL run postpones the first blockage.

    Returns (delay_s, never_obstructed). When the RL run never loses
    LoS, the delay is measured to the end of the run and flagged.
    """
    static_onset = first_nlos_tick(trace_static)
    if static_onset is None:
        raise BenchmarkInvalidError("static baseline has no NLoS interval")
    rl_onset = first_nlos_tick(trace_rl)
    if rl_onset is None:
        return (len(trace_rl.rows) - static_onset) * trace_rl.dt, True
    return (rl_onset - static_onset) * trace_rl.dt, False


@dataclass(frozen=True)
class ComparisonReport:
    onset_delay_s: float
    never_obstructed: bool
    nlos_time_static_s: float
    nlos_time_rl_s: float
    reduction_pct: float
    recovery_s: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "delay_s": self.onset_delay_s,
            "never_obstructed": self.never_obstructed,
            "nlos_time_static_s": self.nlos_time_static_s,
            "nlos_time_rl_s": self.nlos_time_rl_s,
            "reduction_pct": self.reduction_pct,
            "recovery_s": self.recovery_s,
        }


def compare(trace_rl: RunTrace, trace_static: RunTrace) -> ComparisonReport:
    """Assemble the RL-vs-static report; values stay unrounded here."""
    t_static = nlos_total_time(trace_static)
    t_rl = nlos_total_time(trace_rl)
    if t_static <= 0:
        raise BenchmarkInvalidError("static baseline has no NLoS time")
    delay, never = onset_delay(trace_rl, trace_static)
    return ComparisonReport(
        onset_delay_s=delay,
        never_obstructed=never,
        nlos_time_static_s=t_static,
        nlos_time_rl_s=t_rl,
        reduction_pct=100.0 * (t_static - t_rl) / t_static,
        recovery_s=recovery_time(trace_rl),
    )


def format_pct(value: float) -> str:
    """One decimal, truncated toward zero (100*(2.4-1.4)/2.4 prints 41.6).

    A tiny epsilon keeps values that are exact decimals up to float
    noise (12.499999999999998) from truncating to the digit below.
    """
    truncated = math.copysign(math.trunc((abs(value) + 1e-9) * 10.0) / 10.0, value)
    return f"{truncated:.1f}"


def format_report_table(reports: dict[str, ComparisonReport]) -> str:
    lines = [
        f"{'Test':<6} {'Delay (s)':>10} {'Reduction (%)':>14} {'Static NLoS (s)':>16} {'RL NLoS (s)':>12}",
    ]
    for name, rep in reports.items():
        delay = f"{rep.onset_delay_s:.1f}" + ("*" if rep.never_obstructed else "")
        lines.append(
            f"{name:<6} {delay:>10} {format_pct(rep.reduction_pct):>14} "
            f"{rep.nlos_time_static_s:>16.1f} {rep.nlos_time_rl_s:>12.1f}"
        )
    if any(rep.never_obstructed for rep in reports.values()):
        lines.append("* policy run never lost LoS; delay measured to end of run")
    return "\n".join(lines)


def write_report(reports: dict[str, ComparisonReport], path: str | Path) -> None:
    doc = {"tests": [{"test": name, **rep.as_dict()} for name, rep in reports.items()]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
