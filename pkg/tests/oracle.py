"""Independent brute-force oracles used to cross-check the main code paths.

Kept deliberately separate from the library: the union-find sublevel
oracle and the dense enumeration helpers share no code with the cubical
reduction engine.
"""

import math

import numpy as np


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def circle_sublevel_bars(values):
    """Bars of the sublevel filtration of vertex values on a circle graph.

    Union-find with the elder rule for degree 0; the single degree-1 class
    appears when the last edge closes the cycle.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    simplices = [(values[i], 0, i) for i in range(n)]
    simplices += [
        (max(values[i], values[(i + 1) % n]), 1, i) for i in range(n)
    ]
    simplices.sort(key=lambda s: (s[0], s[1], s[2]))

    uf = UnionFind(n)
    comp_birth = {}
    alive = [False] * n
    bars = []
    for val, dim, i in simplices:
        if dim == 0:
            comp_birth[i] = val
            alive[i] = True
        else:
            a, b = i, (i + 1) % n
            ra, rb = uf.find(a), uf.find(b)
            if ra == rb:
                bars.append((1, val, math.inf))
                continue
            # elder rule: the younger component dies
            if comp_birth[ra] > comp_birth[rb]:
                ra, rb = rb, ra
            if val > comp_birth[rb]:
                bars.append((0, comp_birth[rb], val))
            uf.parent[uf.find(rb)] = uf.find(ra)
            comp_birth[uf.find(ra)] = comp_birth[ra]
    bars.append((0, float(values.min()), math.inf))
    return sorted(bars)


def random_trig_polynomial(rng, max_harmonics=5, scale=1.0):
    """Random trigonometric polynomial on the circle as a closure."""
    k = rng.integers(1, max_harmonics + 1)
    a = rng.normal(size=k) * scale / np.arange(1, k + 1)
    b = rng.normal(size=k) * scale / np.arange(1, k + 1)
    c0 = rng.normal() * scale

    def f(q):
        out = np.full_like(np.asarray(q, dtype=float), c0)
        for j in range(k):
            out += a[j] * np.cos((j + 1) * q) + b[j] * np.sin((j + 1) * q)
        return out

    def fprime(q):
        q = np.asarray(q, dtype=float)
        out = np.zeros_like(q)
        for j in range(k):
            out += (j + 1) * (-a[j] * np.sin((j + 1) * q)
                              + b[j] * np.cos((j + 1) * q))
        return out

    return f, fprime
