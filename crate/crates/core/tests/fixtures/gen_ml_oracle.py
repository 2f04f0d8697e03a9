"""Regenerate ml_oracle.json: extended-precision Mittag-Leffler reference values.

The series is summed in mpmath with working precision scaled to the cancellation
magnitude exp(|z|^(1/beta)); for rational beta = p/q the reciprocal Gamma values
follow the exact recurrence 1/G(y+p) = 1/G(y) / prod_{i<p}(y+i).

    python3 gen_ml_oracle.py > ml_oracle.json
"""
import cmath
import json
import math
import random
from fractions import Fraction

import mpmath as mp

SIGMA = 0.46 * math.pi
BAND = 0.2
SEED = 20261016
PARAMS = [(0.5, 1.0), (0.5, 2.0), (1.0, 1.0), (1.0, 2.0), (1.5, 1.0), (1.5, 2.0)]


def ml_oracle(b, g, z, extra=40):
    fb = Fraction(b).limit_denominator(1000)
    p, q = fb.numerator, fb.denominator
    x = abs(z) ** (1 / b)
    dps = int(x / 2.3) + extra + 20
    with mp.workdps(dps):
        z = mp.mpc(z)
        bb = mp.mpf(p) / q
        gg = mp.mpf(g)
        rg = [mp.rgamma(bb * k + gg) for k in range(q)]
        s = mp.mpc(0)
        zk = mp.mpc(1)
        k = 0
        kmin = int(2 * x / b) + 20
        while True:
            if k >= q:
                y = bb * (k - q) + gg
                prod = mp.mpf(1)
                for i in range(p):
                    prod *= y + i
                rg.append(rg[k - q] / prod if prod != 0 else mp.rgamma(bb * k + gg))
            t = zk * rg[k]
            s += t
            if k > kmin and abs(t) < mp.mpf(10) ** (-extra) * abs(s):
                break
            zk *= z
            k += 1
        return complex(s)


def near_stokes(th, stokes, band):
    return any(
        abs(th - (sgn * stokes + 2 * math.pi * k)) < band for k in range(-4, 5) for sgn in (1, -1)
    )


def overflows(b, r, th):
    x = r ** (1 / b)
    for s in range(-4, 5):
        ph = th + 2 * math.pi * s
        if abs(ph) <= b * math.pi and x * math.cos(ph / b) > 690:
            return True
    return False


def main():
    rng = random.Random(SEED)
    samples = []
    for b, g in PARAMS:
        stokes = b * (math.pi / 2 + SIGMA)
        got = 0
        while got < 40:
            r = rng.uniform(30.0, 60.0)
            th = rng.uniform(-math.pi, math.pi)
            if near_stokes(th, stokes, BAND) or overflows(b, r, th):
                continue
            z = cmath.rect(r, th)
            v = ml_oracle(b, g, z)
            samples.append({"beta": b, "gamma": g, "re": z.real, "im": z.imag, "value_re": v.real, "value_im": v.imag})
            got += 1
    points = [
        (0.5, 1.0, complex(-1, 0)),
        (0.5, 1.0, complex(-40, 0)),
        (1.5, 1.0, cmath.rect(40, math.pi / 4)),
        (0.7, 1.0, complex(-5, 0)),
        (1.5, 2.0, complex(-1, 0)),
        (0.6, 1.0, complex(-1, 0)),
        (1.2, 1.0, complex(-1, 0)),
    ]
    examples = []
    for b, g, z in points:
        v = ml_oracle(b, g, z)
        examples.append({"beta": b, "gamma": g, "re": z.real, "im": z.imag, "value_re": v.real, "value_im": v.imag})
    json.dump({"sigma": SIGMA, "band": BAND, "seed": SEED, "samples": samples, "examples": examples}, __import__("sys").stdout, indent=1)


if __name__ == "__main__":
    main()
