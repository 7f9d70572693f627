"""Finite windows onto one-sided and two-sided real sequences.

A one-sided sequence ``x(t), t <= 0`` is stored as the finite record
``x(-(L-1)), ..., x(0)``; every index outside the record reads as exactly
zero.  Windows are immutable.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, ParameterError

__all__ = [
    "NormOrder",
    "SequenceWindow",
    "TwoSidedWindow",
    "norm",
    "shift",
    "read_sequence",
    "write_sequence",
    "sequence_to_csv",
    "sequence_from_csv",
    "sequence_to_json",
    "sequence_from_json",
]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


class NormOrder(enum.Enum):
    ONE = 1
    TWO = 2
    INF = math.inf

    @classmethod
    def of(cls, r) -> "NormOrder":
        if isinstance(r, NormOrder):
            return r
        if isinstance(r, str):
            r = r.strip().lower()
            r = math.inf if r in ("inf", "infinity", "max") else float(r)
        for member in cls:
            if float(r) == member.value:
                return member
        raise ParameterError(f"norm order must be 1, 2 or inf, got {r!r}", param="r")


@dataclass(frozen=True, eq=False)
class SequenceWindow:
    """Samples ``x(end-L+1), ..., x(end)`` of a one-sided sequence.

    ``end`` is 0 for observation records.  The only other value produced by
    this package is ``end=-1``, the shifted prediction target.
    """

    values: np.ndarray
    end: int = 0

    def __post_init__(self):
        arr = _frozen(self.values)
        if not np.all(np.isfinite(arr)):
            raise FormatError("window values must be finite", param="values")
        if self.end not in (0, -1):
            raise ParameterError(f"window must end at t=0 or t=-1, got {self.end}", param="end")
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_function(cls, func, length: int) -> "SequenceWindow":
        """Sample ``func(t)`` for ``t = -(length-1), ..., 0``."""
        if length < 1:
            raise ParameterError("length must be positive", param="length")
        t = np.arange(-(length - 1), 1)
        return cls(np.array([func(int(s)) for s in t], dtype=np.float64))

    @classmethod
    def impulse(cls, at: int, length: int, value: float = 1.0) -> "SequenceWindow":
        if not -(length - 1) <= at <= 0:
            raise ParameterError(f"impulse position {at} outside window", param="at")
        v = np.zeros(length)
        v[at + length - 1] = value
        return cls(v)

    @property
    def length(self) -> int:
        return int(self.values.size)

    @property
    def start(self) -> int:
        return self.end - self.length + 1

    @property
    def empty(self) -> bool:
        return self.length == 0

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.start, self.end + 1)

    def at(self, t: int) -> float:
        """Value at time ``t``; zero outside the stored range."""
        if self.start <= t <= self.end:
            return float(self.values[t - self.start])
        return 0.0

    def backward(self) -> np.ndarray:
        """Values ordered by lag: ``[x(end), x(end-1), ..., x(start)]``."""
        return self.values[::-1]

    def __len__(self):
        return self.length

    def __eq__(self, other):
        if not isinstance(other, SequenceWindow):
            return NotImplemented
        return self.end == other.end and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.end, self.values.tobytes()))


@dataclass(frozen=True, eq=False)
class TwoSidedWindow:
    """Samples ``x(t)`` for ``t = -(L-1), ..., L-1``; zero outside."""

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.size % 2 != 1:
            raise FormatError("two-sided window needs an odd number of samples", param="values")
        if not np.all(np.isfinite(arr)):
            raise FormatError("window values must be finite", param="values")
        object.__setattr__(self, "values", arr)

    @property
    def half_length(self) -> int:
        return (self.values.size + 1) // 2

    @property
    def times(self) -> np.ndarray:
        L = self.half_length
        return np.arange(-(L - 1), L)

    def at(self, t: int) -> float:
        L = self.half_length
        if -(L - 1) <= t <= L - 1:
            return float(self.values[t + L - 1])
        return 0.0

    def causal_part(self) -> SequenceWindow:
        """The restriction to ``t <= 0``."""
        return SequenceWindow(self.values[: self.half_length])

    def __eq__(self, other):
        if not isinstance(other, TwoSidedWindow):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


def norm(w: SequenceWindow | TwoSidedWindow, r=2) -> float:
    """l_r norm over the stored range; r is 1, 2 or inf."""
    order = NormOrder.of(r)
    a = np.abs(w.values)
    if a.size == 0:
        return 0.0
    if order is NormOrder.INF:
        return float(a.max())
    if order is NormOrder.ONE:
        return float(math.fsum(a))
    scale = a.max()
    if scale == 0.0:
        return 0.0
    return float(scale * math.sqrt(math.fsum((a / scale) ** 2)))


def shift(w: SequenceWindow) -> SequenceWindow:
    """``(s x)(t) = x(t+1)`` restricted to ``t <= -1``.

    The result covers ``t = -(L-1), ..., -1``.  A length-1 window shifts to
    the empty window.
    """
    if w.end != 0:
        raise ParameterError("shift applies to windows ending at t=0", param="w")
    return SequenceWindow(w.values[1:], end=-1)


# -- file formats -----------------------------------------------------------

def _check_times(times: list[int], two_sided: bool) -> None:
    if not times:
        raise FormatError("no samples")
    if len(set(times)) != len(times):
        raise FormatError("duplicate time index")
    for a, b in zip(times, times[1:]):
        if b <= a:
            raise FormatError("time indices must be increasing")
        if b != a + 1:
            raise FormatError(f"gap in time indices between {a} and {b}")
    if two_sided:
        if times[0] != -times[-1]:
            raise FormatError("two-sided window must be symmetric about t=0")
    elif times[-1] != 0:
        raise FormatError("one-sided window must end at t=0")


def sequence_from_csv(text: str, two_sided: bool = False):
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["t", "value"]:
        raise FormatError("sequence CSV must start with header 't,value'")
    times, values = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise FormatError(f"line {lineno}: expected 2 columns")
        try:
            t = int(row[0])
            v = float(row[1])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        if not math.isfinite(v):
            raise FormatError(f"line {lineno}: non-finite value")
        times.append(t)
        values.append(v)
    _check_times(times, two_sided)
    return TwoSidedWindow(values) if two_sided else SequenceWindow(values)


def sequence_to_csv(w: SequenceWindow | TwoSidedWindow) -> str:
    lines = ["t,value"]
    lines += [f"{int(t)},{float(v)!r}" for t, v in zip(w.times, w.values)]
    return "\n".join(lines) + "\n"


def sequence_from_json(text: str) -> SequenceWindow:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "values" not in obj:
        raise FormatError("sequence JSON needs a 'values' array")
    if obj.get("origin", 0) != 0:
        raise FormatError("sequence JSON origin must be 0")
    values = obj["values"]
    if not isinstance(values, list) or not values:
        raise FormatError("'values' must be a non-empty array")
    if "length" in obj and obj["length"] != len(values):
        raise FormatError("'length' does not match number of values")
    try:
        arr = np.array([float(v) for v in values])
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad value: {exc}") from None
    if not np.all(np.isfinite(arr)):
        raise FormatError("non-finite value")
    return SequenceWindow(arr)


def sequence_to_json(w: SequenceWindow) -> str:
    return json.dumps({"origin": 0, "length": w.length, "values": [float(v) for v in w.values]})


def read_sequence(path, two_sided: bool = False):
    """Read a sequence window from CSV, or JSON when the suffix is ``.json``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}", param="in") from None
    if path.suffix.lower() == ".json":
        if two_sided:
            raise FormatError("JSON form holds one-sided windows only")
        return sequence_from_json(text)
    return sequence_from_csv(text, two_sided=two_sided)


def write_sequence(path, w) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(sequence_to_json(w) + "\n")
    else:
        path.write_text(sequence_to_csv(w))
