"""The explicit predicting kernel, its causal taps, and one-step prediction.

The transfer function is::

    K(z) = z (1 - exp[-gamma / (z + 1 - eps)]),   eps = gamma^(2 mu / (1 - q))

``K`` is holomorphic for ``|z| > 1 - eps`` and bounded at infinity, so its
Laurent coefficients ``k(t)`` vanish for ``t < 0``.  With ``b = 1 - eps`` the
expansion ``exp(-gamma / (z + b)) = sum_n c_n z^-n`` has the three-term
recurrence::

    c_0 = 1,  c_1 = -gamma,
    (n + 1) c_{n+1} = -[(2 b n + gamma) c_n + b^2 (n - 1) c_{n-1}]

(differentiate ``E(w) = exp(-gamma w / (1 + b w))`` in ``w = 1/z``), which
gives ``k(t) = -c_{t+1}`` directly.  This is the default tap route.  Sampling
``K`` on the unit circle and inverting the DFT is kept as ``method="fft"``;
it only works for small ``gamma`` because ``|K|`` on the circle peaks at
``exp(gamma / eps)`` near ``omega = pi``.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CausalPredError,
    DomainError,
    FormatError,
    ParameterError,
    ReconstructionError,
    SizeError,
    StabilityError,
)
from .sequences import SequenceWindow, shift

__all__ = [
    "STABILITY_LIMIT",
    "KernelSpec",
    "PredictorKernel",
    "PredictionRun",
    "SweepEntry",
    "SweepReport",
    "transfer_at",
    "build_kernel",
    "predict_one_step",
    "error_transfer_magnitude",
    "sweep_gamma",
    "iterate_forecast",
]

STABILITY_LIMIT = 690.0
# points on this circle check the truncated taps after every build
_VALIDATION_RADIUS = 3.0
_VALIDATION_TOL = 1e-6
_FLUSH = 1e-280
_CIRCLE_SLACK = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Kernel parameters; construction enforces the stability bound.

    The bound ``gamma^(1 + 2 mu / (q - 1)) <= 690`` equals ``gamma / eps``,
    the exponent of ``|K|`` at ``omega = pi``.
    """

    gamma: float
    mu: float = 1.5
    q: float = 4.0

    def __post_init__(self):
        for name in ("gamma", "mu", "q"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParameterError(f"{name} must be a finite real, got {v!r}", param=name)
            object.__setattr__(self, name, float(v))
        if not self.gamma > 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}", param="gamma")
        if not self.mu > 1:
            raise ParameterError(f"mu must exceed 1, got {self.mu}", param="mu")
        if not self.q > 1:
            raise ParameterError(f"q must exceed 1, got {self.q}", param="q")
        if not self.epsilon < 2.0:
            # the singularity at z = eps - 1 must stay inside the unit disk
            raise ParameterError(
                f"eps = gamma^(2mu/(1-q)) = {self.epsilon:.6g} must be below 2 for causal taps; "
                f"need gamma > {self.min_gamma(self.mu, self.q):.6g}",
                param="gamma")
        if self.stability_exponent > STABILITY_LIMIT:
            raise StabilityError(
                f"gamma^(1+2mu/(q-1)) = {self.stability_exponent:.6g} exceeds {STABILITY_LIMIT:g}; "
                "use a smaller gamma or a larger q / smaller mu",
                param="gamma")

    @staticmethod
    def min_gamma(mu: float, q: float) -> float:
        """Exclusive lower bound on ``gamma``, where ``eps`` reaches 2."""
        return 2.0 ** ((1.0 - q) / (2.0 * mu))

    @property
    def epsilon(self) -> float:
        return self.gamma ** (2.0 * self.mu / (1.0 - self.q))

    @property
    def b(self) -> float:
        return 1.0 - self.epsilon

    @property
    def stability_exponent(self) -> float:
        with np.errstate(over="ignore"):
            try:
                return self.gamma ** (1.0 + 2.0 * self.mu / (self.q - 1.0))
            except OverflowError:
                return math.inf


@dataclass(frozen=True, eq=False)
class PredictorKernel:
    spec: KernelSpec
    taps: np.ndarray
    tail_mass: float
    trunc_tol: float
    method: str = "series"
    validation_residual: float = 0.0

    @property
    def T(self) -> int:
        return int(self.taps.size - 1)

    def transfer(self, z) -> complex:
        """``sum_t k(t) z^-t`` of the stored taps (Horner in ``1/z``)."""
        return complex(np.polyval(self.taps[::-1], 1.0 / complex(z)))

    def to_dict(self) -> dict:
        return {
            "gamma": self.spec.gamma,
            "mu": self.spec.mu,
            "q": self.spec.q,
            "epsilon": self.spec.epsilon,
            "trunc_tol": self.trunc_tol,
            "T": self.T,
            "tail_mass": self.tail_mass,
            "taps": [float(v) for v in self.taps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PredictorKernel":
        try:
            obj = json.loads(text)
            spec = KernelSpec(obj["gamma"], obj["mu"], obj["q"])
            taps = np.asarray(obj["taps"], dtype=np.float64)
            T = int(obj["T"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad kernel artifact: {exc}", param="kernel") from None
        if taps.size != T + 1 or not np.all(np.isfinite(taps)):
            raise FormatError("kernel taps inconsistent with T or non-finite", param="kernel")
        taps.flags.writeable = False
        return cls(spec, taps, float(obj.get("tail_mass", 0.0)), float(obj.get("trunc_tol", 0.0)))


def transfer_at(z, s: KernelSpec) -> complex:
    """Evaluate ``K(z)`` for ``|z| >= 1``.

    Returns ``complex(inf, 0)`` when the real part of the exponent exceeds
    the stability limit.
    """
    z = complex(z)
    # unit-circle points built in floating point may sit an ulp inside
    if abs(z) < 1.0 - _CIRCLE_SLACK:
        raise DomainError(f"|z| must be >= 1, got {abs(z):.6g}", param="z")
    u = -s.gamma / (z + s.b)
    if u.real > STABILITY_LIMIT:
        return complex(math.inf, 0.0)
    if u.real < -0.7:
        # K is close to z; a single final rounding keeps z - K accurate
        return z - z * cmath.exp(u)
    return complex(-z * np.expm1(u))


def error_transfer_magnitude(omega: float, s: KernelSpec) -> float:
    """``|e^{i omega} - K(e^{i omega})| = exp(-gamma Re[1/(e^{i omega} + b)])``."""
    if not 0.0 <= omega <= math.pi:
        raise ParameterError(f"omega must lie in [0, pi], got {omega}", param="omega")
    c = math.cos(omega) + s.b
    sn = math.sin(omega)
    expo = -s.gamma * c / (c * c + sn * sn)
    if expo > STABILITY_LIMIT:
        return math.inf
    return math.exp(expo)


def _series_taps(s: KernelSpec, n: int) -> np.ndarray:
    g, b = s.gamma, s.b
    c = np.empty(n + 1)
    c[0] = 1.0
    if n >= 1:
        c[1] = -g
    bb = b * b
    for k in range(1, n):
        c[k + 1] = -((2.0 * b * k + g) * c[k] + bb * (k - 1) * c[k - 1]) / (k + 1)
    # the recurrence stalls on subnormals instead of reaching zero
    c[np.abs(c) < _FLUSH] = 0.0
    return -c[1:]


def _fft_taps(s: KernelSpec, N: int) -> np.ndarray:
    z = np.exp(2j * np.pi * np.arange(N) / N)
    u = -s.gamma / (z + s.b)
    if np.any(u.real > STABILITY_LIMIT):
        raise StabilityError(
            f"K overflows on the unit circle for gamma={s.gamma:g}; use method='series'",
            param="gamma")
    samples = -z * np.expm1(u)
    # K(e^{iw}) = sum_t k(t) e^{-iwt}, so taps are the inverse DFT
    return np.fft.ifft(samples).real[: N // 2 + 1]


def build_kernel(s: KernelSpec, n_grid: int = 65536, trunc_tol: float = 1e-10,
                 method: str = "series") -> PredictorKernel:
    """Compute and truncate the causal taps of ``K``.

    At most ``n_grid // 2 + 1`` taps are considered.  ``T`` is the smallest
    index whose trailing absolute tap sum, plus a geometric bound on the
    taps never computed, is at most ``trunc_tol``.  The truncated taps are then
    checked against :func:`transfer_at` on ``|z| = 3``.

    Raises
    ------
    StabilityError
        Non-finite taps.
    ReconstructionError
        Taps not decayed within the cap, or the reconstruction check fails.
    """
    if n_grid < 4096 or n_grid & (n_grid - 1):
        raise ParameterError(f"N must be a power of two >= 4096, got {n_grid}", param="N")
    if not trunc_tol > 0:
        raise ParameterError("trunc_tol must be positive", param="trunc_tol")
    if method == "series":
        raw = _series_taps(s, n_grid // 2 + 1)
    elif method == "fft":
        raw = _fft_taps(s, n_grid)
    else:
        raise ParameterError(f"unknown method {method!r}", param="method")
    if not np.all(np.isfinite(raw)):
        raise StabilityError(f"non-finite taps for gamma={s.gamma:g}", param="gamma")

    a = np.abs(raw)
    # geometric bound on the uncomputed remainder from the last tap ratio
    rho = a[-1] / a[-2] if a[-2] > 0 else 0.0
    if rho >= 1.0:
        remainder = math.inf
    else:
        remainder = a[-1] * rho / (1.0 - rho)
    suffix = np.cumsum(a[::-1])[::-1]
    trailing = np.append(suffix[1:], 0.0) + remainder
    ok = np.flatnonzero(trailing <= trunc_tol)
    if ok.size == 0:
        raise ReconstructionError(
            f"taps for gamma={s.gamma:g} have not decayed to {trunc_tol:g} within "
            f"{raw.size} terms; increase N",
            param="N")
    T = int(ok[0])
    taps = raw[: T + 1].copy()
    taps.flags.writeable = False
    kernel = PredictorKernel(s, taps, float(trailing[T]), float(trunc_tol), method)

    zs = _VALIDATION_RADIUS * np.exp(2j * np.pi * (np.arange(8) + 0.5) / 8)
    resid = 0.0
    for z in zs:
        ref = transfer_at(z, s)
        resid = max(resid, abs(kernel.transfer(z) - ref) / max(1.0, abs(ref)))
    if not resid <= _VALIDATION_TOL:
        raise ReconstructionError(
            f"truncated taps miss K on |z|={_VALIDATION_RADIUS:g} by {resid:.3g}; increase N",
            param="N")
    return PredictorKernel(s, taps, kernel.tail_mass, kernel.trunc_tol, method, resid)


@dataclass(frozen=True, eq=False)
class PredictionRun:
    """One-step predictions ``xhat(t)`` for ``t = -(L-1)+B, ..., 0``.

    ``targets`` and ``residuals`` cover the compared range, which stops at
    ``t = -1``; ``xhat(0)`` estimates the unobserved ``x(1)``.
    """

    times: np.ndarray
    predictions: np.ndarray
    targets: np.ndarray
    burn_in: int
    forecast_next: float
    error_l2: float
    error_linf: float
    relative_error_l2: float
    relative_error_linf: float

    @property
    def compared_times(self) -> np.ndarray:
        return self.times[:-1]

    @property
    def residuals(self) -> np.ndarray:
        return self.predictions[:-1] - self.targets

    def summary(self) -> dict:
        return {
            "burn_in": self.burn_in,
            "forecast_next": self.forecast_next,
            "error_l2": self.error_l2,
            "error_linf": self.error_linf,
            "relative_error_l2": self.relative_error_l2,
            "relative_error_linf": self.relative_error_linf,
        }

    def to_csv(self) -> str:
        lines = ["t,predicted,target,abs_error"]
        for t, p, y in zip(self.compared_times, self.predictions[:-1], self.targets):
            lines.append(f"{int(t)},{float(p)!r},{float(y)!r},{abs(float(p) - float(y))!r}")
        return "\n".join(lines) + "\n"


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


def predict_one_step(w: SequenceWindow, k: PredictorKernel) -> PredictionRun:
    """Causal convolution ``xhat(t) = sum_{j=0}^T k(j) x(t-j)`` after burn-in ``B = T``."""
    L, T = w.length, k.T
    if w.end != 0:
        raise ParameterError("prediction input must end at t=0", param="w")
    if L < T + 2:
        raise SizeError(
            f"window length {L} leaves no compared samples after burn-in {T}; need L >= {T + 2}",
            param="L")
    v = w.values
    full = np.convolve(v, k.taps)[:L]
    preds = full[T:]
    target = shift(w).values[T:]
    resid = preds[:-1] - target
    l2 = float(np.linalg.norm(resid))
    linf = float(np.abs(resid).max())
    preds = preds.copy()
    preds.flags.writeable = False
    target = target.copy()
    target.flags.writeable = False
    return PredictionRun(
        times=np.arange(-(L - 1) + T, 1),
        predictions=preds,
        targets=target,
        burn_in=T,
        forecast_next=float(preds[-1]),
        error_l2=l2,
        error_linf=linf,
        relative_error_l2=_ratio(l2, float(np.linalg.norm(target))),
        relative_error_linf=_ratio(linf, float(np.abs(target).max())),
    )


@dataclass(frozen=True)
class SweepEntry:
    gamma: float
    T: int
    tail_mass: float
    error_l2: float
    error_linf: float
    relative_error_l2: float
    relative_error_linf: float
    forecast_next: float


@dataclass(frozen=True)
class SweepReport:
    mu: float
    q: float
    entries: tuple = field(default_factory=tuple)

    @property
    def gammas(self) -> list[float]:
        return [e.gamma for e in self.entries]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(e, name) for e in self.entries])

    def to_dict(self) -> dict:
        return {"mu": self.mu, "q": self.q, "entries": [vars(e) for e in self.entries]}

    def to_plot_csv(self) -> str:
        lines = ["gamma,relative_error"]
        lines += [f"{e.gamma!r},{e.relative_error_l2!r}" for e in self.entries]
        return "\n".join(lines) + "\n"


def sweep_gamma(w: SequenceWindow, gammas: Sequence[float], mu: float = 1.5, q: float = 4.0,
                n_grid: int = 65536, trunc_tol: float = 1e-10) -> SweepReport:
    """Build a kernel and predict once per ``gamma``; entries sorted by ``gamma``.

    Errors keep their type and gain the offending ``gamma`` in the message.
    """
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise ParameterError("need at least one gamma", param="gammas")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise ParameterError("gammas must be strictly ascending", param="gammas")
    entries = []
    for g in gammas:
        try:
            kern = build_kernel(KernelSpec(g, mu, q), n_grid, trunc_tol)
            run = predict_one_step(w, kern)
        except CausalPredError as exc:
            raise type(exc)(f"gamma={g:g}: {exc}", param=exc.param) from exc
        entries.append(SweepEntry(
            gamma=g, T=kern.T, tail_mass=kern.tail_mass,
            error_l2=run.error_l2, error_linf=run.error_linf,
            relative_error_l2=run.relative_error_l2,
            relative_error_linf=run.relative_error_linf,
            forecast_next=run.forecast_next,
        ))
    return SweepReport(float(mu), float(q), tuple(entries))


def iterate_forecast(w: SequenceWindow, k: PredictorKernel, steps: int,
                     experimental: bool = False) -> np.ndarray:
    """Multi-step forecasts by feeding one-step forecasts back in.

    Experimental: no accuracy guarantee is attached.  ``experimental=True``
    must be passed explicitly.
    """
    if not experimental:
        raise ParameterError("iterated forecasting is experimental; pass experimental=True",
                             param="experimental")
    if steps < 1:
        raise ParameterError("steps must be positive", param="steps")
    hist = list(w.values)
    taps = k.taps
    out = []
    for _ in range(steps):
        recent = np.asarray(hist[-(k.T + 1):])[::-1]
        nxt = float(np.dot(taps[: recent.size], recent))
        out.append(nxt)
        hist.append(nxt)
    return np.array(out)
