"""Constant-stress ADT datasets and their CSV representation.

CSV schema (one observation per row, ``#`` lines are comments)::

    stress,unit,time,value
    80,L0U0,100,0.0123

``stress`` is in native units (degC for Arrhenius), ``time`` in hours and
``value`` in degradation units.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import DataParseError, InvalidGridError
from .model import AccelerationKind, StressSpec, normalize_stress

CSV_COLUMNS = ("stress", "unit", "time", "value")
CSV_HEADER_COMMENT = "# stress: native units (degC for Arrhenius); time: hours; value: degradation units"


@dataclass
class Unit:
    unit_id: str
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1 or self.times.size == 0:
            raise InvalidGridError(f"unit {self.unit_id}: times and values must be equal-length, non-empty")
        if self.times[0] <= 0 or np.any(np.diff(self.times) <= 0):
            raise InvalidGridError(f"unit {self.unit_id}: times must be positive and strictly increasing")


@dataclass
class StressLevel:
    stress: float
    units: list[Unit] = field(default_factory=list)

    @property
    def common_grid(self) -> np.ndarray | None:
        """The shared measurement grid, or None if units differ."""
        first = self.units[0].times
        for u in self.units[1:]:
            if u.times.shape != first.shape or not np.array_equal(u.times, first):
                return None
        return first


@dataclass
class AdtDataset:
    levels: list[StressLevel]
    stress_spec: StressSpec

    def __post_init__(self):
        if not self.levels:
            raise InvalidGridError("dataset needs at least one stress level")
        for lvl in self.levels:
            if not lvl.units:
                raise InvalidGridError(f"stress level {lvl.stress} has no units")

    def s_star(self, level: int) -> float:
        return normalize_stress(self.levels[level].stress, self.stress_spec)

    @property
    def n_units(self) -> int:
        return sum(len(lvl.units) for lvl in self.levels)

    @property
    def n_obs(self) -> int:
        return sum(u.times.size for lvl in self.levels for u in lvl.units)

    def iter_units(self):
        """Yield ``(level_index, s_star, unit)`` in fixed (level, unit) order."""
        for l, lvl in enumerate(self.levels):
            s = self.s_star(l)
            for unit in lvl.units:
                yield l, s, unit

    def subset(self, level_indices) -> "AdtDataset":
        """Dataset restricted to some levels; the stress spec is kept unchanged."""
        return AdtDataset([self.levels[i] for i in level_indices], self.stress_spec)

    def equals(self, other: "AdtDataset") -> bool:
        if self.stress_spec != other.stress_spec or len(self.levels) != len(other.levels):
            return False
        for a, b in zip(self.levels, other.levels):
            if a.stress != b.stress or len(a.units) != len(b.units):
                return False
            for ua, ub in zip(a.units, b.units):
                if ua.unit_id != ub.unit_id:
                    return False
                if not (np.array_equal(ua.times, ub.times) and np.array_equal(ua.values, ub.values)):
                    return False
        return True


def default_stress_spec(stresses, kind=AccelerationKind.ARRHENIUS, s0: float | None = None,
                        sH: float | None = None) -> StressSpec:
    """Stress spec whose highest level defaults to the largest stress present."""
    if s0 is None:
        raise DataParseError("normal stress level s0 is required")
    return StressSpec(AccelerationKind(kind), float(s0), float(max(stresses) if sH is None else sH))


def _parse_float(text: str, column: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataParseError(f"line {lineno}: column '{column}' is not a number: {text!r}") from None
    if not np.isfinite(value):
        raise DataParseError(f"line {lineno}: column '{column}' is not finite")
    return value


def read_csv_text(text: str, stress_spec: StressSpec | None = None, *, kind=AccelerationKind.ARRHENIUS,
                  s0: float | None = None, sH: float | None = None) -> AdtDataset:
    lines = [(n, line) for n, line in enumerate(text.splitlines(), start=1)
             if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise DataParseError("file is empty: header row 'stress,unit,time,value' expected")
    header_no, header = lines[0]
    columns = [c.strip() for c in next(csv.reader([header]))]
    missing = [c for c in CSV_COLUMNS if c not in columns]
    if missing:
        raise DataParseError(f"line {header_no}: missing column(s) {', '.join(missing)}")
    idx = {c: columns.index(c) for c in CSV_COLUMNS}

    # (stress, unit) -> list of (time, value); insertion order kept for units
    groups: dict[float, dict[str, list[tuple[float, float]]]] = {}
    last_line: dict[tuple[float, str], int] = {}
    for lineno, row in zip((n for n, _ in lines[1:]), csv.reader([l for _, l in lines[1:]])):
        if len(row) < len(columns):
            raise DataParseError(f"line {lineno}: expected {len(columns)} fields, got {len(row)}")
        stress = _parse_float(row[idx["stress"]], "stress", lineno)
        unit = row[idx["unit"]].strip()
        if not unit:
            raise DataParseError(f"line {lineno}: empty unit id")
        time = _parse_float(row[idx["time"]], "time", lineno)
        value = _parse_float(row[idx["value"]], "value", lineno)
        if time <= 0:
            raise DataParseError(f"line {lineno}: unit {unit!r} has non-positive time {time}")
        obs = groups.setdefault(stress, {}).setdefault(unit, [])
        if obs:
            prev = obs[-1][0]
            if time == prev or any(t == time for t, _ in obs):
                raise DataParseError(f"line {lineno}: duplicate observation for stress {stress:g}, "
                                     f"unit {unit!r}, time {time:g}")
            if time < prev:
                raise DataParseError(f"line {lineno}: times decrease within unit {unit!r} at stress "
                                     f"{stress:g} ({time:g} after {prev:g} on line {last_line[(stress, unit)]})")
        obs.append((time, value))
        last_line[(stress, unit)] = lineno
    if not groups:
        raise DataParseError("file contains a header but no observations")

    levels = []
    for stress in sorted(groups):
        units = [Unit(uid, [t for t, _ in obs], [v for _, v in obs]) for uid, obs in groups[stress].items()]
        levels.append(StressLevel(stress, units))
    if stress_spec is None:
        stress_spec = default_stress_spec(groups.keys(), kind, s0, sH)
    return AdtDataset(levels, stress_spec)


def ingest_csv(path, stress_spec: StressSpec | None = None, **kwargs) -> AdtDataset:
    """Read a ``stress,unit,time,value`` file into an :class:`AdtDataset`.

    Raises:
        DataParseError: missing columns, bad numbers, decreasing or duplicate
            times; messages carry the offending line number.
    """
    path = Path(path)
    if not path.exists():
        raise DataParseError(f"data file not found: {path}")
    return read_csv_text(path.read_text(encoding="utf-8"), stress_spec, **kwargs)


def dataset_to_csv_text(data: AdtDataset) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER_COMMENT + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for lvl in data.levels:
        for unit in lvl.units:
            for t, x in zip(unit.times, unit.values):
                writer.writerow([repr(float(lvl.stress)), unit.unit_id, repr(float(t)), repr(float(x))])
    return buf.getvalue()


def write_csv(data: AdtDataset, path) -> None:
    Path(path).write_text(dataset_to_csv_text(data), encoding="utf-8")
