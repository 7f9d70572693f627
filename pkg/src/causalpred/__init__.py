"""Causal band-limitedness and prediction of one-sided sequences.

Transforms of the observed past, detection of band-limited structure, and
an explicit causal convolution predictor whose error vanishes as its
parameter ``gamma`` grows on band-limited inputs.
"""
from .bandlimit import ClassMembership, DetectionReport, WeightProfile, class_score, detect, weight_h
from .errors import (
    CausalPredError,
    DegenerateSupportError,
    DomainError,
    FormatError,
    NumericalError,
    ParameterError,
    ReconstructionError,
    ResolutionError,
    SizeError,
    StabilityError,
    ValidationError,
)
from .harness import GeneratorSpec, evaluate, generate, white_noise
from .predictor import (
    KernelSpec,
    PredictionRun,
    PredictorKernel,
    SweepReport,
    build_kernel,
    error_transfer_magnitude,
    iterate_forecast,
    predict_one_step,
    sweep_gamma,
    transfer_at,
)
from .sequences import NormOrder, SequenceWindow, TwoSidedWindow, norm, read_sequence, shift, write_sequence
from .transforms import (
    CircleSpectrum,
    FrequencyGrid,
    SpectrumGrid,
    Xi2Value,
    circle_spectrum,
    extend,
    inv_xi1,
    inv_xi2,
    xi1,
    xi2,
)

__version__ = "0.1.0"
