"""``causalpred`` command line.

Exit status 0 on success, 2 on validation errors (bad input, bad options,
violated preconditions) and 3 on numerical failures (kernel overflow,
reconstruction failure).  Failures print a single line to stderr::

    reason=<code> param=<name> message=<text>

Writing an artifact to ``PATH`` also writes ``PATH.meta.json`` with the verb
and every resolved option.  Nothing in either file depends on the clock.
"""
from __future__ import annotations

import json
import math
import re
import sys
from pathlib import Path

import click

from .bandlimit import WeightProfile, class_score, detect
from .errors import CausalPredError, FormatError, NumericalError, ParameterError
from .harness import MODES, SHAPES, GeneratorSpec, generate
from .predictor import KernelSpec, PredictorKernel, build_kernel, predict_one_step, sweep_gamma
from .sequences import read_sequence, sequence_to_csv, write_sequence
from .transforms import (
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

DEFAULT_M = 2048
DEFAULT_N = 65536
DEFAULT_TOL = 1e-8
DEFAULT_TRUNC_TOL = 1e-10
DEFAULT_MU = 1.5
DEFAULT_Q = 4.0

_PI_EXPR = re.compile(r"^\s*([0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$")


def parse_angle(text: str) -> float:
    """A float, or a multiple of pi such as ``pi/2`` or ``3pi/4``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_EXPR.match(text.lower())
    if not m:
        raise ParameterError(f"cannot parse angle {text!r}", param="Omega")
    num = float(m.group(1)) if m.group(1) else 1.0
    den = float(m.group(2)) if m.group(2) else 1.0
    return num * math.pi / den


def _gamma_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParameterError(f"cannot parse gamma list {text!r}", param="gammas") from None


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(out: str, text: str, verb: str, options: dict) -> None:
    if out == "-":
        click.echo(text, nl=False)
        return
    path = Path(out)
    path.write_text(text)
    _write_meta(path, verb, options)


def _write_meta(path: Path, verb: str, options: dict, extra: dict | None = None) -> None:
    meta = {"verb": verb, "options": options}
    if extra:
        meta.update(extra)
    Path(str(path) + ".meta.json").write_text(_json_text(meta))


def _resolved(ctx: click.Context) -> dict:
    return {k: v for k, v in sorted(ctx.params.items())}


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """One-sided spectral transforms, band-limitedness detection and causal prediction."""


@cli.command()
@click.option("--kind", type=click.Choice(["xi1", "xi2", "circle"]), required=True,
              help="Cosine transform, sine transform, or unit-circle Z-transform.")
@click.option("--in", "in_path", required=True, help="Sequence CSV or JSON.")
@click.option("--grid", "M", type=int, default=DEFAULT_M, show_default=True,
              help="Frequency grid size M (nodes j*pi/M).")
@click.option("--N", "N", type=int, default=None,
              help="Circle grid size for --kind circle; default 2(2L-1) rounded up to a power of two.")
@click.option("--extend", "extension", type=click.Choice(["symmetric", "antisymmetric", "none"]),
              default="symmetric", show_default=True,
              help="Extension of a one-sided input for --kind circle; 'none' reads a two-sided CSV.")
@click.option("--method", type=click.Choice(["direct", "dct"]), default="direct", show_default=True)
@click.option("--out", required=True, help="Spectrum CSV ('-' for stdout).")
@click.option("--scalar-out", default=None,
              help="For xi2: JSON file for the t=0 scalar; default OUT.scalar.json.")
@click.pass_context
def transform(ctx, kind, in_path, M, N, extension, method, out, scalar_out):
    """Compute xi1, xi2 or a circle spectrum of a sequence."""
    opts = _resolved(ctx)
    if kind == "circle":
        if extension == "none":
            w2 = read_sequence(in_path, two_sided=True)
        else:
            w2 = extend(read_sequence(in_path), extension)
        if N is None:
            need = 2 * (2 * w2.half_length - 1)
            N = 1 << (need - 1).bit_length()
            opts["N"] = N
        _emit(out, circle_spectrum(w2, N).to_csv(), "transform", opts)
        return
    w = read_sequence(in_path)
    g = FrequencyGrid(M)
    if kind == "xi1":
        _emit(out, xi1(w, g, method=method).to_csv(), "transform", opts)
        return
    v = xi2(w, g, method=method)
    if scalar_out is None:
        if out == "-":
            raise ParameterError("--scalar-out is required when writing xi2 to stdout",
                                 param="scalar-out")
        scalar_out = out + ".scalar.json"
        opts["scalar_out"] = scalar_out
    _emit(out, v.tail.to_csv(), "transform", opts)
    Path(scalar_out).write_text(json.dumps({"xi2_scalar": v.scalar}) + "\n")


def _read_scalar(path: str) -> float:
    try:
        obj = json.loads(Path(path).read_text())
        return float(obj["xi2_scalar"])
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}", param="scalar-in") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"bad scalar file {path}: {exc}", param="scalar-in") from None


@cli.command()
@click.option("--kind", type=click.Choice(["xi1", "xi2"]), required=True)
@click.option("--in", "in_path", required=True, help="Spectrum CSV with header omega,value.")
@click.option("--L", "L", type=int, required=True, help="Output window length.")
@click.option("--scalar", type=float, default=None, help="xi2 scalar (the value at t=0).")
@click.option("--scalar-in", default=None, help="xi2 scalar JSON; default IN.scalar.json if present.")
@click.option("--method", type=click.Choice(["direct", "dct"]), default="direct", show_default=True)
@click.option("--out", required=True, help="Sequence CSV or JSON ('-' for stdout CSV).")
@click.pass_context
def invert(ctx, kind, in_path, L, scalar, scalar_in, method, out):
    """Invert xi1 or xi2 samples back to a window of length L."""
    opts = _resolved(ctx)
    try:
        text = Path(in_path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {in_path}: {exc.strerror}", param="in") from None
    s = SpectrumGrid.from_csv(text)
    if L < 1:
        raise ParameterError("L must be positive", param="L")
    if kind == "xi1":
        w = inv_xi1(s, L, method=method)
    else:
        if scalar is None:
            path = scalar_in or (in_path + ".scalar.json")
            if scalar_in is None and not Path(path).exists():
                raise ParameterError("xi2 inversion needs --scalar or --scalar-in", param="scalar")
            scalar = _read_scalar(path)
            opts["scalar"] = scalar
        w = inv_xi2(Xi2Value(s, scalar), L, method=method)
    if out == "-":
        click.echo(sequence_to_csv(w), nl=False)
        return
    write_sequence(out, w)
    _write_meta(Path(out), "invert", opts)


@cli.command("detect")
@click.option("--in", "in_path", required=True)
@click.option("--grid", "M", type=int, default=DEFAULT_M, show_default=True)
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True)
@click.option("--out", default="-", show_default=True, help="Report JSON.")
@click.pass_context
def detect_cmd(ctx, in_path, M, tol, out):
    """Test a window for causal band-limitedness."""
    rep = detect(read_sequence(in_path), FrequencyGrid(M), tol)
    _emit(out, _json_text(rep.to_dict()), "detect", _resolved(ctx))


@cli.command()
@click.option("--in", "in_path", required=True)
@click.option("--grid", "M", type=int, default=DEFAULT_M, show_default=True)
@click.option("--c", "c", type=float, required=True, help="Decay-rate parameter of the weight.")
@click.option("--q", "q", type=float, default=2.0, show_default=True, help="Weight exponent, > 1.")
@click.option("--zero-tol", type=float, default=1e-10, show_default=True,
              help="Residuals below this count as zero.")
@click.option("--out", default="-", show_default=True, help="Report JSON.")
@click.pass_context
def classify(ctx, in_path, M, c, q, zero_tol, out):
    """Score a window against the weighted spectral-tail classes."""
    res = class_score(read_sequence(in_path), FrequencyGrid(M), WeightProfile(c, q), zero_tol)
    _emit(out, _json_text(res.to_dict()), "classify", _resolved(ctx))


def _kernel_options(f):
    f = click.option("--method", type=click.Choice(["series", "fft"]), default="series",
                     show_default=True, help="Tap route.")(f)
    f = click.option("--trunc-tol", type=float, default=DEFAULT_TRUNC_TOL, show_default=True)(f)
    f = click.option("--N", "N", type=int, default=DEFAULT_N, show_default=True,
                     help="Grid size; at most N/2+1 taps.")(f)
    f = click.option("--q", "q", type=float, default=DEFAULT_Q, show_default=True)(f)
    f = click.option("--mu", type=float, default=DEFAULT_MU, show_default=True)(f)
    return f


@cli.command()
@click.option("--gamma", type=float, required=True)
@_kernel_options
@click.option("--out", default="-", show_default=True, help="Kernel JSON.")
@click.pass_context
def kernel(ctx, gamma, mu, q, N, trunc_tol, method, out):
    """Build the causal predictor taps."""
    k = build_kernel(KernelSpec(gamma, mu, q), N, trunc_tol, method)
    _emit(out, k.to_json() + "\n", "kernel", _resolved(ctx))


@cli.command()
@click.option("--in", "in_path", required=True)
@click.option("--kernel", "kernel_path", default=None, help="Kernel JSON from the kernel verb.")
@click.option("--gamma", type=float, default=None, help="Build the kernel instead of reading one.")
@_kernel_options
@click.option("--out", required=True, help="Per-time CSV t,predicted,target,abs_error.")
@click.option("--summary", default=None, help="Summary JSON; default OUT.summary.json.")
@click.pass_context
def predict(ctx, in_path, kernel_path, gamma, mu, q, N, trunc_tol, method, out, summary):
    """One-step prediction of a window with a causal kernel."""
    opts = _resolved(ctx)
    if (kernel_path is None) == (gamma is None):
        raise ParameterError("give exactly one of --kernel and --gamma", param="kernel")
    if kernel_path is not None:
        try:
            k = PredictorKernel.from_json(Path(kernel_path).read_text())
        except OSError as exc:
            raise FormatError(f"cannot read {kernel_path}: {exc.strerror}", param="kernel") from None
    else:
        k = build_kernel(KernelSpec(gamma, mu, q), N, trunc_tol, method)
    run = predict_one_step(read_sequence(in_path), k)
    _emit(out, run.to_csv(), "predict", opts)
    if summary is None:
        if out == "-":
            return
        summary = out + ".summary.json"
    Path(summary).write_text(_json_text(run.summary()))


@cli.command()
@click.option("--in", "in_path", required=True)
@click.option("--gammas", default="1,2,4,8", show_default=True, help="Comma-separated, ascending.")
@click.option("--mu", type=float, default=DEFAULT_MU, show_default=True)
@click.option("--q", "q", type=float, default=DEFAULT_Q, show_default=True)
@click.option("--N", "N", type=int, default=DEFAULT_N, show_default=True)
@click.option("--trunc-tol", type=float, default=DEFAULT_TRUNC_TOL, show_default=True)
@click.option("--out", default="-", show_default=True, help="Sweep report JSON.")
@click.option("--emit-plot-data", default=None, help="CSV gamma,relative_error for plotting.")
@click.pass_context
def sweep(ctx, in_path, gammas, mu, q, N, trunc_tol, out, emit_plot_data):
    """Prediction error across a list of gamma values."""
    rep = sweep_gamma(read_sequence(in_path), _gamma_list(gammas), mu, q, N, trunc_tol)
    _emit(out, _json_text(rep.to_dict()), "sweep", _resolved(ctx))
    if emit_plot_data:
        Path(emit_plot_data).write_text(rep.to_plot_csv())


@cli.command("generate")
@click.option("--spec", "spec_path", default=None,
              help="GeneratorSpec JSON; overrides the individual options.")
@click.option("--mode", type=click.Choice(MODES), default="symmetric", show_default=True)
@click.option("--Omega", "Omega", default="pi/2", show_default=True,
              help="Bandwidth; accepts forms like 'pi/2' or '3pi/4'.")
@click.option("--L", "L", type=int, default=1024, show_default=True)
@click.option("--shape", type=click.Choice(SHAPES), default="raised-cosine", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--d", "d", type=float, default=1.0, show_default=True)
@click.option("--c", "c", type=float, default=1.0, show_default=True, help="decay shape only")
@click.option("--q", "q", type=float, default=2.0, show_default=True, help="decay shape only")
@click.option("--grid", "M", type=int, default=DEFAULT_M, show_default=True)
@click.option("--out", required=True, help="Sequence CSV or JSON.")
@click.pass_context
def generate_cmd(ctx, spec_path, mode, Omega, L, shape, seed, d, c, q, M, out):
    """Generate a test signal with known spectral structure."""
    opts = _resolved(ctx)
    if spec_path is not None:
        try:
            raw = json.loads(Path(spec_path).read_text())
        except OSError as exc:
            raise FormatError(f"cannot read {spec_path}: {exc.strerror}", param="spec") from None
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid spec JSON: {exc}", param="spec") from None
        if not isinstance(raw, dict):
            raise FormatError("spec JSON must be an object", param="spec")
        if isinstance(raw.get("Omega"), str):
            raw["Omega"] = parse_angle(raw["Omega"])
        spec = GeneratorSpec.from_dict(raw)
    else:
        spec = GeneratorSpec(mode=mode, Omega=parse_angle(Omega), L=L, shape=shape,
                             seed=seed, d=d, c=c, q=q)
    w = generate(spec, FrequencyGrid(M))
    write_sequence(out, w)
    _write_meta(Path(out), "generate", opts, {"generator_spec": spec.to_dict()})


def _fail(code: str, param, message: str, status: int) -> int:
    msg = " ".join(str(message).split())
    click.echo(f"reason={code} param={param or '-'} message={msg}", err=True)
    return status


def main(argv=None) -> int:
    """Entry point; returns the exit status instead of raising ``SystemExit``."""
    try:
        cli.main(args=argv, prog_name="causalpred", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return _fail("aborted", None, "aborted", 1)
    except click.UsageError as exc:
        param = None
        if isinstance(exc, click.BadParameter) and exc.param is not None:
            param = exc.param.name
        return _fail("usage", param, exc.format_message(), 2)
    except CausalPredError as exc:
        status = 3 if isinstance(exc, NumericalError) else 2
        return _fail(exc.code, exc.param, str(exc), status)
    return 0


if __name__ == "__main__":
    sys.exit(main())
