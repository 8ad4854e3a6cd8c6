#!/usr/bin/env python3
"""Regenerates tests/data/frozen.json from first principles with numpy/mpmath.

Nothing here calls into the C++ library. Pressures and perturbed eigenvalues
come from dense matrices on admissible words, Gibbs masses from the Markov
chain of the order-1 (or order-2) Perron data, survival from brute-force
enumeration and Bowen roots from a scalar root finder.

    python3 tests/oracles/freeze.py > tests/data/frozen.json
"""

import json
import math
import sys

import mpmath
import numpy as np


def perron(m):
    vals, vecs = np.linalg.eig(m)
    i = int(np.argmax(vals.real))
    return float(vals[i].real), np.abs(vecs[:, i].real)


class Chain:
    """Subshift with a potential of depth 2 given as phi[a][b] on [ab]."""

    def __init__(self, allowed, phi):
        self.allowed = np.array(allowed)
        self.l = len(allowed)
        self.phi = phi
        b = np.array([[allowed[a][c] * math.exp(phi[a][c]) if allowed[a][c] else 0.0
                       for c in range(self.l)] for a in range(self.l)])
        self.lam, right = perron(b)
        _, left = perron(b.T)
        self.pi = left * right / float(left @ right)
        self.p = b * right[None, :] / (self.lam * right[:, None])

    def words(self, n):
        out = [(a,) for a in range(self.l)]
        for _ in range(n - 1):
            out = [w + (c,) for w in out for c in range(self.l) if self.allowed[w[-1]][c]]
        return out

    def mass(self, w):
        m = self.pi[w[0]]
        for a, c in zip(w, w[1:]):
            m *= self.p[a][c]
        return float(m)

    def holed_lambda(self, hole):
        length = max(2, max(len(h) for h in hole))
        states = self.words(length)
        index = {w: i for i, w in enumerate(states)}
        bad = {w for w in states if any(w[:len(h)] == tuple(h) for h in hole)}
        m = np.zeros((len(states), len(states)))
        for u in states:
            if u in bad:
                continue
            for c in range(self.l):
                v = u[1:] + (c,)
                if v in index and v not in bad and self.allowed[u[-1]][c]:
                    m[index[u], index[v]] = math.exp(self.phi[u[0]][u[1]])
        return perron(m)[0] if m.any() else 0.0

    def survival(self, hole, k_max):
        length = max(len(h) for h in hole)
        out = [1.0]
        for k in range(1, k_max + 1):
            total = 0.0
            for w in self.words(k + length - 1):
                if not any(w[i:i + len(h)] == tuple(h) for i in range(k) for h in hole):
                    total += self.mass(w)
            out.append(total)
        return out


def periodic_prefix(block, n):
    return [block[i % len(block)] for i in range(n)]


def sweep(chain, block, n_values):
    rows = []
    for n in n_values:
        hole = [periodic_prefix(block, n)]
        lam_n = chain.holed_lambda(hole)
        mu = chain.mass(tuple(hole[0]))
        rows.append({"n": n, "lambda_n": lam_n, "mu_hole": mu,
                     "ratio": (math.log(chain.lam) - math.log(lam_n)) / mu})
    return rows


def main():
    full = [[1, 1], [1, 1]]
    half = -math.log(2.0)
    three = [[1, 1, 0], [0, 1, 1], [1, 1, 1]]
    three_phi = [[-0.2 - 0.1 * a - 0.07 * c * (a + 1) for c in range(3)] for a in range(3)]
    golden = [[1, 1], [1, 0]]

    uniform = Chain(full, [[half, half], [half, half]])
    bernoulli = Chain(full, [[-0.3, -1.4], [-0.3, -1.4]])
    markov3 = Chain(three, three_phi)
    parry = Chain(golden, [[0.0, 0.0], [0.0, 0.0]])

    cases = [
        {"name": "uniform_02", "subshift": "full2", "potential": {"per_symbol": [half, half]},
         "block": [0, 1], "lambda": uniform.lam, "rows": sweep(uniform, [0, 1], range(2, 11))},
        {"name": "bernoulli_011", "subshift": "full2", "potential": {"per_symbol": [-0.3, -1.4]},
         "block": [0, 1, 1], "lambda": bernoulli.lam, "rows": sweep(bernoulli, [0, 1, 1], range(1, 11))},
        {"name": "golden_0", "subshift": "golden", "potential": {"per_symbol": [0.0, 0.0]},
         "block": [0], "lambda": parry.lam, "rows": sweep(parry, [0], range(2, 11))},
        {"name": "markov3_12", "subshift": "three",
         "potential": {"depth2": three_phi},
         "block": [1, 2], "lambda": markov3.lam, "rows": sweep(markov3, [1, 2], range(2, 9))},
    ]

    survival = [
        {"name": "bernoulli_011", "subshift": "full2", "potential": {"per_symbol": [-0.3, -1.4]},
         "hole": [[0, 1, 1]], "survival": bernoulli.survival([[0, 1, 1]], 10)},
        {"name": "markov3_12_11", "subshift": "three", "potential": {"depth2": three_phi},
         "hole": [[1, 2], [1, 1]], "survival": markov3.survival([[1, 2], [1, 1]], 9)},
    ]

    # Linear two-branch Cantor sets: a^s + b^s = 1.
    mpmath.mp.dps = 40
    bowen = []
    for a, b in [(1 / 3, 1 / 3), (0.25, 0.5), (0.2, 0.45), (0.4, 0.1)]:
        s = mpmath.findroot(lambda t: mpmath.mpf(a) ** t + mpmath.mpf(b) ** t - 1, 0.5)
        bowen.append({"left_length": a, "right_length": b, "s": float(s)})

    json.dump({"escape": cases, "survival": survival, "bowen": bowen}, fp=sys.stdout, indent=1)
    print()


if __name__ == "__main__":
    main()
