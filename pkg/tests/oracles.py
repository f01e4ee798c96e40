"""Independent reference computations in exact rational arithmetic.

Nothing here imports the package; these are brute-force definitions that
the fast paths are checked against.
"""
from fractions import Fraction
from itertools import permutations, product
from math import comb


def pascal(n, k):
    row = [1]
    for _ in range(n):
        row = [a + b for a, b in zip([0] + row, row + [0])]
    return row[k]


def distinct_arrangements(counts):
    word = [i for i, c in enumerate(counts) for _ in range(c)]
    return len(set(permutations(word)))


def enumerated_class_weights(weights, n):
    """Sum Π p_{r_j} over all M**n records, grouped by occupation counts."""
    m = len(weights)
    out = {}
    for rec in product(range(m), repeat=n):
        w = Fraction(1)
        for r in rec:
            w *= weights[r]
        key = tuple(rec.count(i) for i in range(m))
        out[key] = out.get(key, Fraction(0)) + w
    return out


def multinomial_weight(weights, counts):
    """Exact (N!/Π n_i!) Π p_i^{n_i} with Fraction weights."""
    n = sum(counts)
    coef = 1
    rest = n
    for c in counts:
        coef *= comb(rest, c)
        rest -= c
    w = Fraction(coef)
    for p, c in zip(weights, counts):
        w *= Fraction(p) ** c
    return w


def all_classes(n, m):
    if m == 1:
        yield (n,)
        return
    for k in range(n + 1):
        for tail in all_classes(n - k, m - 1):
            yield (k,) + tail


def exhaustive_mode(weights, n):
    """Lexicographically first class of maximal exact weight, plus all maximisers."""
    scored = [(multinomial_weight(weights, c), c) for c in all_classes(n, len(weights))]
    top = max(w for w, _ in scored)
    winners = sorted(c for w, c in scored if w == top)
    return winners[0], winners


def typical_weight(weights, n, eps):
    eps = Fraction(eps)
    total = Fraction(0)
    for c in all_classes(n, len(weights)):
        if all(abs(Fraction(ci, n) - Fraction(p)) <= eps for ci, p in zip(c, weights)):
            total += multinomial_weight(weights, c)
    return total
