"""Independent reference implementations used as test oracles."""

from __future__ import annotations

import itertools
import random
from decimal import ROUND_HALF_UP, Decimal, getcontext

DIRECTED = ("switch", "diode")


def brute_force_embeds(pattern_vertices, pattern_edges, host_edges, candidates, directed=DIRECTED):
    """True iff some injective map sends every pattern edge (with multiplicity)
    onto host edges of the same type. Plain enumeration, no pruning."""
    host_vertices = sorted({x for u, v, _ in host_edges for x in (u, v)}
                           | {h for c in candidates.values() for h in c})
    k = len(pattern_vertices)
    for image in itertools.permutations(host_vertices, k):
        phi = dict(zip(pattern_vertices, image))
        if any(phi[p] not in candidates[p] for p in pattern_vertices):
            continue
        ok = True
        for a, b, t in set(pattern_edges):
            need = sum(1 for e in pattern_edges if e == (a, b, t)
                       or (t not in directed and e == (b, a, t)))
            have = 0
            for u, v, s in host_edges:
                if s != t:
                    continue
                if t in directed:
                    have += (u, v) == (phi[a], phi[b])
                else:
                    have += {u, v} == {phi[a], phi[b]}
            if have < need:
                ok = False
                break
        if ok:
            return True
    return False


EDGE_TYPES = ("capacitor", "resistor", "inductor", "diode", "switch", "winding", "direct")


def random_instance(rng: random.Random, max_pattern=5, max_host=8, types=EDGE_TYPES[:4] + ("switch",)):
    """A random (pattern, host) pair over a small edge alphabet so that both
    outcomes are common."""
    nh = rng.randint(2, max_host)
    host_v = [f"n{i}" for i in range(nh)]
    host_e = []
    for _ in range(rng.randint(1, nh * 2)):
        u, v = rng.sample(host_v, 2)
        host_e.append((u, v, rng.choice(types)))
    npv = rng.randint(1, min(max_pattern, nh))
    pat_v = [f"p{i}" for i in range(npv)]
    pat_e = []
    if npv >= 2:
        for _ in range(rng.randint(0, npv + 1)):
            a, b = rng.sample(pat_v, 2)
            pat_e.append((a, b, rng.choice(types)))
    # candidate sets: mostly everything, sometimes a restriction
    cands = {}
    for p in pat_v:
        if rng.random() < 0.3:
            cands[p] = sorted(rng.sample(host_v, rng.randint(1, nh)))
        else:
            cands[p] = list(host_v)
    return pat_v, pat_e, host_v, host_e, cands


def wilson_reference(p_hat: float, n: int, z: float, digits: int = 40) -> tuple[Decimal, Decimal]:
    """Center and half-width of the Wilson score interval in high-precision decimals."""
    getcontext().prec = digits
    p, n_, z_ = Decimal(str(p_hat)), Decimal(n), Decimal(str(z))
    denom = 1 + z_ * z_ / n_
    center = (p + z_ * z_ / (2 * n_)) / denom
    half = z_ / denom * (p * (1 - p) / n_ + z_ * z_ / (4 * n_ * n_)).sqrt()
    return center, half


def pass_at_k_reference(n: int, c: int, k: int) -> float:
    """Product form 1 - prod_{i=n-c+1..n} (1 - k/i), evaluated in floats."""
    if n - c < k:
        return 1.0
    prod = 1.0
    for i in range(n - c + 1, n + 1):
        prod *= 1 - k / i
    return 1 - prod


def kappa_reference(tp, fp, fn, tn):
    """Cohen's kappa from the 2x2 table written as rater-by-rater counts."""
    table = [[tp, fp], [fn, tn]]
    total = sum(map(sum, table))
    po = (table[0][0] + table[1][1]) / total
    rows = [sum(r) / total for r in table]
    cols = [sum(table[i][j] for i in range(2)) / total for j in range(2)]
    pe = sum(r * c for r, c in zip(rows, cols))
    return (po - pe) / (1 - pe)


def half_up_1dp(x: float) -> float:
    """Percent with one decimal, ties away from zero, via the shortest repr."""
    return float(Decimal(repr(x * 100)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))
