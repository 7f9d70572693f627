"""Cosine and sine transforms of one-sided sequences.

For a window ``x(t), t = -(L-1), ..., 0`` and ``omega`` in ``[0, pi]``::

    xi1(omega)  = x(0) + 2 * sum_{t<=-1} cos(omega t) x(t)
    xi2'(omega) = 2 * sum_{t<=-1} sin(-omega t) x(t),     xi2'' = x(0)

The inverses integrate against ``cos(omega t)`` / ``sin(-omega t)`` over
``[0, pi]``.  Both directions are sampled on the uniform grid
``omega_j = j pi / M``; the inverse uses the composite trapezoid rule, which
is exact for the trigonometric polynomials produced by windows of length
``L <= M/2``.

The reference path is direct summation.  ``method="dct"`` routes through
scipy's type-I DCT/DST instead.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import FormatError, ParameterError, ResolutionError
from .sequences import SequenceWindow, TwoSidedWindow

__all__ = [
    "FrequencyGrid",
    "SpectrumGrid",
    "Xi2Value",
    "CircleSpectrum",
    "xi1",
    "xi2",
    "inv_xi1",
    "inv_xi2",
    "extend",
    "circle_spectrum",
]

# Number of gathered table entries per block in the direct sums.
_BLOCK = 1 << 21


@dataclass(frozen=True)
class FrequencyGrid:
    """Nodes ``omega_j = j pi / M`` for ``j = 0..M``."""

    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ParameterError(f"grid size M must be an integer >= 2, got {self.M}", param="M")
        object.__setattr__(self, "M", int(self.M))

    @property
    def step(self) -> float:
        return math.pi / self.M

    @property
    def nodes(self) -> np.ndarray:
        om = np.arange(self.M + 1) * (math.pi / self.M)
        om[-1] = math.pi
        return om

    def __len__(self):
        return self.M + 1


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SpectrumGrid:
    """Real samples of xi1 or xi2' on a :class:`FrequencyGrid`."""

    grid: FrequencyGrid
    samples: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.samples)
        if arr.size != self.grid.M + 1:
            raise ParameterError(
                f"expected {self.grid.M + 1} samples, got {arr.size}", param="samples")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("spectrum samples must be finite", param="samples")
        object.__setattr__(self, "samples", arr)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def to_csv(self) -> str:
        rows = ["omega,value"]
        rows += [f"{w!r},{v!r}" for w, v in zip(self.nodes.tolist(), self.samples.tolist())]
        return "\n".join(rows) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "SpectrumGrid":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].replace(" ", "") != "omega,value":
            raise FormatError("spectrum CSV must start with header 'omega,value'")
        try:
            rows = [tuple(float(c) for c in ln.split(",")) for ln in lines[1:]]
        except ValueError as exc:
            raise FormatError(str(exc)) from None
        if len(rows) < 3 or any(len(r) != 2 for r in rows):
            raise FormatError("spectrum CSV needs at least 3 rows of 2 columns")
        grid = FrequencyGrid(len(rows) - 1)
        omega = np.array([r[0] for r in rows])
        if not np.allclose(omega, grid.nodes, rtol=0, atol=1e-12):
            raise FormatError("spectrum CSV omega column is not the uniform grid on [0, pi]")
        values = np.array([r[1] for r in rows])
        if not np.all(np.isfinite(values)):
            raise FormatError("non-finite spectrum value")
        return cls(grid, values)


@dataclass(frozen=True)
class Xi2Value:
    """The pair ``(xi2', xi2'')``: sine-transform samples plus the scalar x(0)."""

    tail: SpectrumGrid
    scalar: float

    def __post_init__(self):
        if not math.isfinite(self.scalar):
            raise ParameterError("xi2 scalar must be finite", param="scalar")
        object.__setattr__(self, "scalar", float(self.scalar))


@dataclass(frozen=True, eq=False)
class CircleSpectrum:
    """Samples ``X(e^{i omega_j})`` at ``omega_j = 2 pi j / N``."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.complex128, copy=True).reshape(-1)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def N(self) -> int:
        return int(self.values.size)

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.N) / self.N

    def signed_angles(self) -> np.ndarray:
        """Angles mapped into ``(-pi, pi]``."""
        j = np.arange(self.N)
        return 2.0 * math.pi * np.where(2 * j > self.N, j - self.N, j) / self.N

    def upper_half(self) -> tuple[np.ndarray, np.ndarray]:
        """Samples on the closed upper half circle, ``omega`` in ``[0, pi]``."""
        n = self.N // 2 + 1
        return self.angles[:n], self.values[:n]

    def to_csv(self) -> str:
        rows = ["omega,re,im"]
        rows += [f"{w!r},{z.real!r},{z.imag!r}"
                 for w, z in zip(self.angles.tolist(), self.values.tolist())]
        return "\n".join(rows) + "\n"


@functools.lru_cache(maxsize=16)
def _trig_tables(M: int) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of ``m pi / M`` for ``m = 0..2M-1``, with exact zeros at 0 and pi."""
    m = np.arange(M + 1)
    c = np.cos(m * (math.pi / M))
    s = np.sin(m * (math.pi / M))
    s[0] = s[M] = 0.0
    c[0], c[M] = 1.0, -1.0
    if M % 2 == 0:
        c[M // 2] = 0.0
        s[M // 2] = 1.0
    cos_t = np.concatenate([c, c[M - 1:0:-1]])
    sin_t = np.concatenate([s, -s[M - 1:0:-1]])
    cos_t.flags.writeable = False
    sin_t.flags.writeable = False
    return cos_t, sin_t


def _table_matvec(table: np.ndarray, M: int, rows: np.ndarray, cols: np.ndarray,
                  vec: np.ndarray) -> np.ndarray:
    """``out[i] = sum_k table[(rows[i] * cols[k]) mod 2M] * vec[k]``."""
    out = np.empty(rows.size)
    if cols.size == 0:
        out[:] = 0.0
        return out
    per = max(1, _BLOCK // cols.size)
    period = 2 * M
    for lo in range(0, rows.size, per):
        r = rows[lo:lo + per]
        idx = np.outer(r, cols) % period
        out[lo:lo + per] = table[idx] @ vec
    return out


def _check_method(method: str) -> None:
    if method not in ("direct", "dct"):
        raise ParameterError(f"method must be 'direct' or 'dct', got {method!r}", param="method")


def _lagged(w: SequenceWindow, M: int, method: str) -> np.ndarray:
    """Window values by lag, ``a[s] = x(-s)``."""
    if w.end != 0:
        raise ParameterError("transforms apply to windows ending at t=0", param="w")
    if w.empty:
        raise ParameterError("cannot transform an empty window", param="w")
    if method == "dct" and w.length - 1 > M:
        raise ResolutionError(
            f"dct path needs M >= {w.length - 1} for a window of length {w.length}", param="M")
    return w.backward().astype(np.float64)


def xi1(w: SequenceWindow, g: FrequencyGrid, method: str = "direct") -> SpectrumGrid:
    """Cosine transform of ``w`` sampled on ``g``."""
    _check_method(method)
    a = _lagged(w, g.M, method)
    if method == "dct":
        buf = np.zeros(g.M + 1)
        buf[:a.size] = a
        buf[g.M] *= 2.0  # DCT-I weights the last lag by 1, the transform by 2
        return SpectrumGrid(g, scipy.fft.dct(buf, type=1))
    cos_t, _ = _trig_tables(g.M)
    lags = np.arange(1, a.size)
    vals = a[0] + 2.0 * _table_matvec(cos_t, g.M, np.arange(g.M + 1), lags, a[1:])
    return SpectrumGrid(g, vals)


def xi2(w: SequenceWindow, g: FrequencyGrid, method: str = "direct") -> Xi2Value:
    """Sine transform of ``w``: samples of xi2' plus the scalar ``x(0)``."""
    _check_method(method)
    a = _lagged(w, g.M, method)
    if method == "dct":
        vals = np.zeros(g.M + 1)
        if g.M > 1:
            buf = np.zeros(g.M - 1)
            n = min(a.size - 1, g.M - 1)
            buf[:n] = a[1:1 + n]
            vals[1:g.M] = scipy.fft.dst(buf, type=1)
        return Xi2Value(SpectrumGrid(g, vals), float(a[0]))
    _, sin_t = _trig_tables(g.M)
    lags = np.arange(1, a.size)
    vals = 2.0 * _table_matvec(sin_t, g.M, np.arange(g.M + 1), lags, a[1:])
    return Xi2Value(SpectrumGrid(g, vals), float(a[0]))


def _check_inverse(g: FrequencyGrid, L: int) -> None:
    if int(L) != L or L < 1:
        raise ParameterError(f"window length must be a positive integer, got {L}", param="L")
    if g.M < 2 * L:
        raise ResolutionError(
            f"grid M={g.M} too coarse for a window of length {L}; need M >= {2 * L}",
            param="M")


def _trapezoid_weights(M: int) -> np.ndarray:
    wts = np.ones(M + 1)
    wts[0] = wts[-1] = 0.5
    return wts


def inv_xi1(s: SpectrumGrid, L: int, method: str = "direct") -> SequenceWindow:
    """``x(t) = (1/pi) int_0^pi xi1(omega) cos(omega t) d omega`` by trapezoid rule."""
    _check_method(method)
    g = s.grid
    _check_inverse(g, L)
    if method == "dct":
        # dct type 1 of the samples equals 2 M times the trapezoid sum
        a = scipy.fft.dct(s.samples, type=1)[:L] / (2.0 * g.M)
    else:
        cos_t, _ = _trig_tables(g.M)
        weighted = s.samples * _trapezoid_weights(g.M)
        a = _table_matvec(cos_t, g.M, np.arange(L), np.arange(g.M + 1), weighted) / g.M
    return SequenceWindow(a[::-1])


def inv_xi2(v: Xi2Value, L: int, method: str = "direct") -> SequenceWindow:
    """Inverse sine transform; ``x(0)`` is taken from the scalar component."""
    _check_method(method)
    g = v.tail.grid
    _check_inverse(g, L)
    a = np.empty(L)
    if method == "dct":
        inner = v.tail.samples[1:g.M]
        a[1:] = scipy.fft.dst(inner, type=1)[:L - 1] / (2.0 * g.M)
    else:
        _, sin_t = _trig_tables(g.M)
        weighted = v.tail.samples * _trapezoid_weights(g.M)
        a[1:] = _table_matvec(sin_t, g.M, np.arange(1, L), np.arange(g.M + 1), weighted) / g.M
    a[0] = v.scalar
    return SequenceWindow(a[::-1])


def extend(w: SequenceWindow, mode: str) -> TwoSidedWindow:
    """Mirror ``w`` onto ``t > 0``.

    ``symmetric``: ``x(t) = x(-t)``; ``antisymmetric``: ``x(t) = -x(-t)``.
    """
    if w.end != 0 or w.empty:
        raise ParameterError("extension needs a non-empty window ending at t=0", param="w")
    if mode == "symmetric":
        right = w.values[-2::-1]
    elif mode == "antisymmetric":
        right = -w.values[-2::-1]
    else:
        raise ParameterError(f"mode must be 'symmetric' or 'antisymmetric', got {mode!r}",
                             param="mode")
    return TwoSidedWindow(np.concatenate([w.values, right]))


def circle_spectrum(w: TwoSidedWindow, N: int) -> CircleSpectrum:
    """Z-transform of ``w`` on ``N`` equispaced points of the unit circle (via FFT)."""
    L = w.half_length
    if int(N) != N or N < 1:
        raise ParameterError(f"N must be a positive integer, got {N}", param="N")
    need = 2 * (2 * L - 1)
    if N < need:
        raise ResolutionError(
            f"N={N} aliases a support of {2 * L - 1} samples; need N >= {need}", param="N")
    buf = np.zeros(int(N))
    t = w.times
    buf[t % N] = w.values
    return CircleSpectrum(np.fft.fft(buf))
