"""Closed-form OLS on two-column designs, with Student-t p-values.

Writes a JSON list of {X (rows of 2), y, beta, se, t, p, dof}. The 2x2 normal
equations are solved in exact rational arithmetic; p-values come from scipy.
"""
import json
import random
import sys
from fractions import Fraction

from mpmath import mp, mpf, sqrt
from scipy import stats

mp.dps = 50


def fit(X, y):
    Xf = [[Fraction(v) for v in row] for row in X]
    yf = [Fraction(v) for v in y]
    a = sum(r[0] * r[0] for r in Xf)
    b = sum(r[0] * r[1] for r in Xf)
    d = sum(r[1] * r[1] for r in Xf)
    u = sum(r[0] * v for r, v in zip(Xf, yf))
    w = sum(r[1] * v for r, v in zip(Xf, yf))
    det = a * d - b * b
    inv = [[d / det, -b / det], [-b / det, a / det]]
    beta = [inv[0][0] * u + inv[0][1] * w, inv[1][0] * u + inv[1][1] * w]
    rss = sum((v - beta[0] * r[0] - beta[1] * r[1]) ** 2 for r, v in zip(Xf, yf))
    n = len(y)
    dof = n - 2
    s2 = rss / dof
    se = [sqrt(mpf(s2.numerator) / s2.denominator * mpf(inv[k][k].numerator) / inv[k][k].denominator) for k in range(2)]
    bt = [mpf(bk.numerator) / bk.denominator for bk in beta]
    t = [bt[k] / se[k] for k in range(2)]
    p = [float(2 * stats.t.sf(abs(float(tk)), dof)) for tk in t]
    return {"X": X, "y": y, "beta": [float(v) for v in bt], "se": [float(v) for v in se],
            "t": [float(v) for v in t], "p": p, "dof": dof}


def main():
    rng = random.Random(99)
    cases = []
    for n in (5, 12, 40):
        X = [[1.0, round(rng.uniform(-3, 3), 3)] for _ in range(n)]
        y = [round(0.7 - 1.3 * r[1] + rng.gauss(0, 0.8), 3) for r in X]
        cases.append(fit(X, y))
    X = [[round(rng.uniform(0, 2), 3), round(rng.uniform(-1, 1), 3)] for _ in range(15)]
    y = [round(2.0 * r[0] + 0.1 * r[1] + rng.gauss(0, 0.5), 3) for r in X]
    cases.append(fit(X, y))
    X = [[1.0, float(i % 2)] for i in range(20)]
    y = [round(1.0 + 0.4 * r[1] + rng.gauss(0, 0.3), 3) for r in X]
    cases.append(fit(X, y))
    json.dump(cases, sys.stdout, indent=1)
    print()


if __name__ == "__main__":
    main()
