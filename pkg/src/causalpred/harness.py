"""Test-signal generation and evaluation of prediction runs.

Band-limited windows are designed in the transform domain.  A window of
length ``L`` has a cosine (or sine) transform that is a trigonometric
polynomial of degree ``L - 1``, which cannot vanish identically on an
interval.  So the generator solves a weighted least-squares problem on the
grid: match the target shape on ``[0, Omega)`` and push the transform to zero
(weight ``1e8``) on every node ``>= Omega``.  The fitted spectrum is then
inverted with :func:`~causalpred.transforms.inv_xi1` /
:func:`~causalpred.transforms.inv_xi2` and normalised to unit l2 norm.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .bandlimit import WeightProfile, log_weight_h
from .errors import DegenerateSupportError, FormatError, ParameterError, ResolutionError, SizeError
from .predictor import PredictionRun
from .sequences import NormOrder, SequenceWindow
from .transforms import FrequencyGrid, SpectrumGrid, Xi2Value, inv_xi1, inv_xi2

__all__ = [
    "MODES",
    "SHAPES",
    "GeneratorSpec",
    "generate",
    "white_noise",
    "evaluate",
]

MODES = ("symmetric", "antisymmetric")
SHAPES = ("raised-cosine", "indicator", "decay")

_STOP_WEIGHT = 1e8
_PASS_FLOOR = 1e-2
_N_MODULATION = 4
_MOD_AMPLITUDE = 0.15
# largest stopband magnitude of a unit-norm band-limited window; matches the default detect tol
STOPBAND_LEVEL = 1e-8


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of one generated window.

    ``c`` and ``q`` are used by the ``decay`` shape only, which ignores
    ``Omega``.  ``d`` scales the spectrum before normalisation and is recorded
    for provenance.
    """

    mode: str = "symmetric"
    Omega: float = math.pi / 2
    L: int = 1024
    shape: str = "raised-cosine"
    seed: int = 0
    d: float = 1.0
    c: float = 1.0
    q: float = 2.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}", param="mode")
        if self.shape not in SHAPES:
            raise ParameterError(f"shape must be one of {SHAPES}, got {self.shape!r}", param="shape")
        if not 0.0 <= self.Omega < math.pi:
            raise ParameterError(f"Omega must lie in [0, pi), got {self.Omega}", param="Omega")
        if int(self.L) != self.L or self.L < 2:
            raise ParameterError(f"L must be an integer >= 2, got {self.L}", param="L")
        if not self.d > 0:
            raise ParameterError("d must be positive", param="d")
        if self.shape == "decay":
            WeightProfile(self.c, self.q)
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "seed", int(self.seed))

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "GeneratorSpec":
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known
        if extra:
            raise FormatError(f"unknown generator fields: {sorted(extra)}", param="spec")
        try:
            return cls(**obj)
        except TypeError as exc:
            raise FormatError(f"bad generator spec: {exc}", param="spec") from None


def _modulation_coefficients(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-_MOD_AMPLITUDE, _MOD_AMPLITUDE, _N_MODULATION)


def _shape(nodes: np.ndarray, Omega: float, shape: str, mode: str) -> np.ndarray:
    inside = nodes < Omega
    x = np.where(inside, nodes / Omega, 0.0)
    if shape == "raised-cosine":
        base = 0.5 * (1.0 + np.cos(np.pi * x))
    else:
        base = np.ones_like(nodes)
    if mode == "antisymmetric":
        # the sine transform vanishes at omega = 0 whatever the window
        base = base * np.sin(0.5 * np.pi * x)
    return np.where(inside, base, 0.0)


def _design(nodes: np.ndarray, L: int, mode: str) -> np.ndarray:
    lags = np.arange(L, dtype=np.float64)
    if mode == "symmetric":
        A = np.cos(np.outer(nodes, lags))
        A[:, 1:] *= 2.0
    else:
        A = 2.0 * np.sin(np.outer(nodes, lags[1:]))
    return A


@lru_cache(maxsize=32)
def _band_basis(mode: str, shape: str, Omega: float, L: int, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares spectra for the unmodulated target and each modulation term.

    Returns ``(A, coeffs)``; column 0 of ``coeffs`` fits the bare shape and
    column ``k`` fits the shape times ``sin(k pi omega / Omega)``.
    """
    g = FrequencyGrid(M)
    nodes = g.nodes
    A = _design(nodes, L, mode)
    base = _shape(nodes, Omega, shape, mode)
    inside = nodes < Omega
    rhs = [base]
    for k in range(1, _N_MODULATION + 1):
        rhs.append(base * np.where(inside, np.sin(k * np.pi * nodes / Omega), 0.0))
    B = np.stack(rhs, axis=1)
    wts = np.where(inside, 1.0 / np.maximum(base, _PASS_FLOOR), _STOP_WEIGHT)
    coeffs = scipy.linalg.lstsq(A * wts[:, None], B * wts[:, None], lapack_driver="gelsy")[0]
    A.flags.writeable = False
    coeffs.flags.writeable = False
    return A, coeffs


def _invert(samples: np.ndarray, g: FrequencyGrid, L: int, mode: str) -> SequenceWindow:
    s = SpectrumGrid(g, samples)
    if mode == "symmetric":
        return inv_xi1(s, L)
    return inv_xi2(Xi2Value(s, 0.0), L)


def generate(spec: GeneratorSpec, g: FrequencyGrid) -> SequenceWindow:
    """Generate a unit-norm window with prescribed spectral structure.

    ``raised-cosine`` and ``indicator`` give windows whose cosine transform
    (symmetric mode) or sine transform (antisymmetric mode) vanishes on every
    grid node ``>= Omega`` to within :data:`STOPBAND_LEVEL`.  ``decay`` inverts
    ``d sin^m(omega/2) mod(omega) / h(omega, c)`` directly, with ``m = 1`` in
    antisymmetric mode and ``m = 0`` otherwise.

    Raises
    ------
    DegenerateSupportError
        ``Omega`` below the grid step, or an all-zero result.
    ResolutionError
        ``M < 2L``, or the fitted stopband of a unit-norm window exceeds
        :data:`STOPBAND_LEVEL` (``L`` too short for the requested band).
    """
    L, M = spec.L, g.M
    if M < 2 * L:
        raise ResolutionError(f"grid M={M} too coarse for L={L}; need M >= {2 * L}", param="M")
    a = _modulation_coefficients(spec.seed)
    nodes = g.nodes

    if spec.shape == "decay":
        p = WeightProfile(spec.c, spec.q)
        with np.errstate(over="ignore"):
            env = np.exp(-log_weight_h(nodes, p))
        mod = 1.0 + sum(a[k - 1] * np.sin(k * nodes) for k in range(1, _N_MODULATION + 1))
        spectrum = spec.d * env * mod
        if spec.mode == "antisymmetric":
            spectrum = spectrum * np.sin(0.5 * nodes)
    else:
        if spec.Omega < g.step:
            raise DegenerateSupportError(
                f"Omega={spec.Omega:.6g} is below the grid step {g.step:.6g}; the band holds no node",
                param="Omega")
        A, coeffs = _band_basis(spec.mode, spec.shape, float(spec.Omega), L, M)
        x = coeffs @ np.concatenate(([1.0], a))
        spectrum = spec.d * (A @ x)
        stop = np.abs(spectrum[nodes >= spec.Omega]).max()
        level = stop / (spec.d * np.linalg.norm(x))
        if not level <= STOPBAND_LEVEL:
            raise ResolutionError(
                f"L={L} is too short to hold the transform below {STOPBAND_LEVEL:g} beyond "
                f"Omega={spec.Omega:.6g} (reached {level:.2g}); increase L",
                param="L")

    w = _invert(spectrum, g, L, spec.mode)
    scale = float(np.linalg.norm(w.values))
    if scale == 0.0 or not math.isfinite(scale):
        raise DegenerateSupportError("generated window is zero", param="Omega")
    return SequenceWindow(w.values / scale)


def white_noise(L: int, seed: int) -> SequenceWindow:
    """Unit-norm Gaussian white noise; a non-band-limited control."""
    if L < 1:
        raise ParameterError("L must be positive", param="L")
    v = np.random.default_rng(seed).standard_normal(L)
    return SequenceWindow(v / np.linalg.norm(v))


def evaluate(run: PredictionRun, r=2, relative: bool = False) -> float:
    """Norm of the residual ``xhat - s x`` over the compared range.

    With ``relative=True`` the result is divided by the same norm of the
    target (``0/0`` reads as 0).
    """
    order = NormOrder.of(r)
    resid = run.residuals
    if resid.size == 0:
        raise SizeError("empty compared range", param="run")

    def _n(v):
        return float(np.linalg.norm(v, ord=order.value))

    num = _n(resid)
    if not relative:
        return num
    den = _n(run.targets)
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den
