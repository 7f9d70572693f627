import math
from collections import OrderedDict

import numpy as np
import pytest

from causalpred.harness import GeneratorSpec, generate
from causalpred.sequences import SequenceWindow
from causalpred.transforms import FrequencyGrid

# criterion number -> list of (label, passed, detail)
_ACCEPTANCE = OrderedDict()


@pytest.fixture
def record():
    """Record one measured acceptance check; the summary prints one line per criterion."""

    def _record(number: int, label: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE.setdefault(number, []).append((label, bool(passed), detail))
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        checks = _ACCEPTANCE[number]
        ok = all(p for _, p, _ in checks)
        failed = [f"{lab}: {det}" for lab, p, det in checks if not p]
        head = checks[0][0].rsplit(" [", 1)[0] if checks[0][0].endswith("]") else checks[0][0]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {head}  ({len(checks)} checks)"
        if failed:
            line += "  failing -> " + "; ".join(failed)
        tr.write_line(line)


@pytest.fixture(scope="session")
def grid2048():
    return FrequencyGrid(2048)


@pytest.fixture(scope="session")
def band_limited(grid2048):
    """Symmetric raised-cosine window with Omega = pi/2, L = 1024."""
    return generate(GeneratorSpec(mode="symmetric", Omega=math.pi / 2, L=1024), grid2048)


def decaying_window(rng: np.random.Generator, L: int) -> SequenceWindow:
    """Random values under an exponential envelope, down to about 1e-14 at the far end."""
    rate = -math.log(1e-14) / L
    env = np.exp(-rate * np.arange(L))[::-1]
    return SequenceWindow(rng.standard_normal(L) * env)


def geometric(r: float, L: int) -> SequenceWindow:
    return SequenceWindow.from_function(lambda t: r ** abs(t), L)
