"""Regenerate sweep_fixtures.json with an independent oracle.

Taps come from the explicit binomial form of the Laurent coefficients in
60-digit arithmetic and the convolution is a plain loop, so neither the tap
recurrence nor np.convolve is exercised.  Only the generated input windows
come from the package.  Run from the repository root:

    python tests/fixtures/freeze_sweep.py
"""
import json
import math
from pathlib import Path

import mpmath as mp

from causalpred.harness import GeneratorSpec, generate
from causalpred.sequences import SequenceWindow
from causalpred.transforms import FrequencyGrid

mp.mp.dps = 60
GAMMAS = [1.0, 2.0, 4.0, 8.0]
MU, Q = 1.5, 10.0
TRUNC_TOL = 1e-10


def oracle_taps(gamma, mu, q, n_max=4000):
    g = mp.mpf(gamma)
    b = 1 - g ** (mp.mpf(2 * mu) / (1 - q))
    taps = []
    for t in range(n_max):
        n = t + 1
        c = mp.fsum(mp.binomial(n - 1, m - 1) * b ** (n - m) * g ** m / mp.factorial(m)
                    for m in range(1, n + 1))
        taps.append(-((-1) ** n) * c)
        if t > 50 and abs(taps[-1]) < mp.mpf(10) ** -30:
            break
    a = [abs(v) for v in taps]
    for T in range(len(taps)):
        if mp.fsum(a[T + 1:]) <= TRUNC_TOL:
            return [float(v) for v in taps[: T + 1]]
    raise RuntimeError("oracle taps did not converge")


def oracle_errors(values, taps):
    L, T = len(values), len(taps) - 1
    num2 = den2 = 0.0
    num_inf = den_inf = 0.0
    for i in range(T, L - 1):
        pred = math.fsum(taps[j] * values[i - j] for j in range(T + 1))
        r = pred - values[i + 1]
        num2 += r * r
        den2 += values[i + 1] ** 2
        num_inf = max(num_inf, abs(r))
        den_inf = max(den_inf, abs(values[i + 1]))
    return math.sqrt(num2 / den2), num_inf / den_inf


def main():
    g = FrequencyGrid(2048)
    bl = generate(GeneratorSpec(mode="symmetric", Omega=math.pi / 2, L=1024), g)
    delta = SequenceWindow.impulse(-1, 1024)
    out = {"mu": MU, "q": Q, "gammas": GAMMAS, "trunc_tol": TRUNC_TOL,
           "band_limited": {"l2": [], "linf": [], "T": []},
           "delta_minus_one": {"l2": [], "linf": [], "T": []}}
    for gamma in GAMMAS:
        taps = oracle_taps(gamma, MU, Q)
        for key, w in (("band_limited", bl), ("delta_minus_one", delta)):
            l2, linf = oracle_errors(list(map(float, w.values)), taps)
            out[key]["l2"].append(l2)
            out[key]["linf"].append(linf)
            out[key]["T"].append(len(taps) - 1)
    path = Path(__file__).with_name("sweep_fixtures.json")
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
