"""Causal band-limitedness detection and spectral-tail decay classes.

A one-sided sequence is causally band-limited with bandwidth ``Omega`` when
either its cosine transform is constant on ``(Omega, pi]`` (condition i) or
its sine transform vanishes there (condition ii).  :func:`detect` tests both
conditions on a frequency grid with a tolerance.

:func:`class_score` measures how fast the tails approach their limit at
``pi`` against the weight::

    h(omega, c) = exp(c / [(cos omega + 1)^2 + sin^2 omega]^(q/2))

which is infinite at ``omega = pi``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError, ResolutionError
from .sequences import SequenceWindow
from .transforms import FrequencyGrid, xi1, xi2

__all__ = [
    "COSINE_FLAT",
    "SINE_VANISHING",
    "BOTH_DEGENERATE",
    "NONE",
    "WeightProfile",
    "DetectionReport",
    "ClassMembership",
    "weight_h",
    "log_weight_h",
    "detect",
    "class_score",
]

COSINE_FLAT = "cosine_flat"
SINE_VANISHING = "sine_vanishing"
BOTH_DEGENERATE = "both_degenerate"
NONE = "none"

# exp() overflows just above this
_LOG_MAX = math.log(np.finfo(np.float64).max)


def _json_number(v):
    if v is None:
        return None
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


@dataclass(frozen=True)
class WeightProfile:
    c: float
    q: float

    def __post_init__(self):
        if not self.c > 0 or not math.isfinite(self.c):
            raise ParameterError(f"c must be positive, got {self.c}", param="c")
        if not self.q > 1 or not math.isfinite(self.q):
            raise ParameterError(f"q must exceed 1, got {self.q}", param="q")


def log_weight_h(omega, p: WeightProfile):
    """``log h(omega, c)``; ``+inf`` at ``omega = pi``."""
    om = np.asarray(omega, dtype=np.float64)
    # (cos w + 1)^2 + sin^2 w == 4 cos^2(w/2), which keeps precision near pi
    denom = 4.0 * np.cos(om / 2.0) ** 2
    with np.errstate(divide="ignore", over="ignore"):
        out = p.c / denom ** (p.q / 2.0)
    out = np.where(om >= math.pi, np.inf, out)
    return out if out.ndim else float(out)


def weight_h(omega: float, p: WeightProfile) -> float:
    """Evaluate the tail weight; returns ``inf`` at ``pi`` and on overflow."""
    if not 0.0 <= omega <= math.pi:
        raise ParameterError(f"omega must lie in [0, pi], got {omega}", param="omega")
    lh = log_weight_h(omega, p)
    return math.inf if lh > _LOG_MAX else math.exp(lh)


@dataclass(frozen=True)
class DetectionReport:
    """Outcome of :func:`detect`.

    ``omega_i`` / ``omega_ii`` are the bandwidths at which each condition
    alone fired (``None`` if it did not); ``omega_hat`` is the reported one.
    ``a_hat`` is the offset of the cosine transform on the reported tail.
    """

    condition: str
    omega_hat: Optional[float]
    a_hat: float
    residual_i: float
    residual_ii: float
    tol: float
    omega_i: Optional[float] = None
    omega_ii: Optional[float] = None
    grid_M: int = 0

    @property
    def band_limited(self) -> bool:
        return self.condition != NONE

    def to_dict(self) -> dict:
        return {k: _json_number(v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class ClassMembership:
    """Weighted tail scores of one window; ``inf`` when a score diverges."""

    c: float
    q: float
    score_i: float
    score_ii: float
    d_hat: float
    a_star: float
    zero_tol: float = 0.0

    def member(self, d: float) -> bool:
        """Whether the window satisfies the class bound ``d``."""
        return self.d_hat <= d

    def to_dict(self) -> dict:
        return {k: _json_number(v) for k, v in asdict(self).items()}


def _first_passing(ok: np.ndarray) -> Optional[int]:
    hits = np.flatnonzero(ok)
    return int(hits[0]) if hits.size else None


def detect(w: SequenceWindow, g: FrequencyGrid, tol: float) -> DetectionReport:
    """Test the two sufficient conditions for causal band-limitedness.

    For condition (ii) the tail start ``j*`` is the smallest node index with
    ``max_{j >= j*} |xi2'(omega_j)| <= tol``.  For condition (i) it is the
    smallest ``j*`` with ``max_{j >= j*} |xi1(omega_j) - mean| <= tol``, the
    mean taken over the same tail.  A tail must hold at least two nodes, since
    every transform trivially passes on the single node ``pi``.  The estimate
    of the bandwidth is the node just before the tail, ``omega_{j*-1}``.
    """
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}", param="tol")
    if g.M < 2 * w.length:
        raise ResolutionError(
            f"grid M={g.M} too coarse for a window of length {w.length}; need M >= {2 * w.length}",
            param="M")
    M = g.M
    nodes = g.nodes
    s1 = xi1(w, g).samples
    s2 = xi2(w, g).tail.samples

    # condition (ii): suffix max of |xi2'|
    suf_abs2 = np.maximum.accumulate(np.abs(s2)[::-1])[::-1]
    j2 = _first_passing(suf_abs2 <= tol)

    # condition (i): suffix mean, max, min of xi1
    counts = np.arange(M + 1, 0, -1, dtype=np.float64)
    suf_mean = np.cumsum(s1[::-1])[::-1] / counts
    suf_max = np.maximum.accumulate(s1[::-1])[::-1]
    suf_min = np.minimum.accumulate(s1[::-1])[::-1]
    dev = np.maximum(suf_max - suf_mean, suf_mean - suf_min)
    j1 = _first_passing(dev <= tol)

    # single-node tails do not count
    if j1 is not None and j1 > M - 1:
        j1 = None
    if j2 is not None and j2 > M - 1:
        j2 = None

    def omega_of(j):
        return None if j is None else float(nodes[max(j - 1, 0)])

    if j1 == 0 and j2 == 0:
        condition, j_star = BOTH_DEGENERATE, 0
    elif j1 is None and j2 is None:
        condition, j_star = NONE, M - 1
    elif j2 is None or (j1 is not None and j1 <= j2):
        condition, j_star = COSINE_FLAT, j1
    else:
        condition, j_star = SINE_VANISHING, j2

    tail1 = s1[j_star:]
    # minimax offset over the tail; the search over a converges to the midrange
    a_hat = 0.5 * (float(tail1.max()) + float(tail1.min()))
    residual_i = float(np.abs(tail1 - a_hat).max())
    residual_ii = float(np.abs(s2[j_star:]).max())
    omega_hat = None if condition == NONE else omega_of(j_star)
    if condition == BOTH_DEGENERATE:
        omega_hat = 0.0
    return DetectionReport(
        condition=condition,
        omega_hat=omega_hat,
        a_hat=a_hat,
        residual_i=residual_i,
        residual_ii=residual_ii,
        tol=float(tol),
        omega_i=omega_of(j1),
        omega_ii=omega_of(j2),
        grid_M=M,
    )


def _log_excess(values: np.ndarray, log_h: np.ndarray, zero_tol: float) -> np.ndarray:
    """``log(h * max(|v| - zero_tol, 0))`` with ``log 0 = -inf`` and ``inf * 0 = 0``."""
    excess = np.abs(values) - zero_tol
    out = np.full(values.shape, -np.inf)
    pos = excess > 0
    with np.errstate(divide="ignore"):
        out[pos] = np.log(excess[pos]) + log_h[pos]
    return out


def _to_score(log_value: float) -> float:
    if log_value == -np.inf:
        return 0.0
    if log_value > _LOG_MAX:
        return math.inf
    return math.exp(log_value)


def _ternary_min(f, lo: float, hi: float, iters: int = 200) -> float:
    for _ in range(iters):
        if hi - lo <= 4 * np.finfo(float).eps * max(abs(lo), abs(hi), 1e-300):
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def class_score(w: SequenceWindow, g: FrequencyGrid, p: WeightProfile,
                zero_tol: float = 1e-10) -> ClassMembership:
    """Grid estimate of the weighted tail suprema defining the decay classes.

    ``score_i = min_a max_j |xi1(omega_j) - a| h(omega_j, c)`` and
    ``score_ii = max_j |xi2'(omega_j)| h(omega_j, c)``.  Residuals are first
    reduced by ``zero_tol`` (clipped at zero), so residuals at rounding level
    count as exact zeros; with ``zero_tol=0`` a nonzero residual anywhere the
    weight overflows makes the score infinite.
    """
    if g.M < 2 * w.length:
        raise ResolutionError(
            f"grid M={g.M} too coarse for a window of length {w.length}; need M >= {2 * w.length}",
            param="M")
    if zero_tol < 0:
        raise ParameterError("zero_tol must be non-negative", param="zero_tol")
    s1 = xi1(w, g).samples
    s2 = xi2(w, g).tail.samples
    log_h = log_weight_h(g.nodes, p)

    score_ii = _to_score(float(_log_excess(s2, log_h, zero_tol).max()))

    # Nodes whose weight overflows pin a to within zero_tol of their values.
    pinned = log_h > _LOG_MAX
    free = ~pinned
    lo, hi = float(s1.min()), float(s1.max())
    if pinned.any():
        lo = max(lo, float((s1[pinned] - zero_tol).max()))
        hi = min(hi, float((s1[pinned] + zero_tol).min()))
    if lo > hi:
        a_star = float(s1[-1])
        score_i = math.inf
    else:
        def objective(a):
            return float(_log_excess(s1[free] - a, log_h[free], zero_tol).max(initial=-np.inf))

        a_star = _ternary_min(objective, lo, hi) if hi > lo else lo
        score_i = _to_score(objective(a_star))
    return ClassMembership(
        c=float(p.c), q=float(p.q), score_i=score_i, score_ii=score_ii,
        d_hat=min(score_i, score_ii), a_star=float(a_star), zero_tol=float(zero_tol),
    )
