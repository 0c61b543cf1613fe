"""Exact small-scale counting oracles: self-avoiding walks, overlap
statistics of random-walk pairs, pattern-count bounds, and lattice-path
count bounds.

These exist to cross-check the closed-form inequalities used by the
certifier against brute-force enumeration at small (p, n), so budgets are
explicit and enforced rather than discovered by an out-of-memory kill.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import EnumerationTooLarge

SAW_BUDGET = 10 ** 9
OVERLAP_BUDGET = 10 ** 9
RETURN_BUDGET = 10 ** 8


# ------------------------------------------------------------ SAW counts

def saw_count(n: int, d: int) -> int:
    """Number of n-step self-avoiding walks in Z^d, by depth-first search."""
    if n < 0 or d < 1:
        raise ValueError("need n >= 0, d >= 1")
    if n >= 1 and 2 * d * (2 * d - 1) ** (n - 1) >= SAW_BUDGET:
        raise EnumerationTooLarge(f"~(2d)(2d-1)^(n-1) walks at n={n}, d={d}")
    origin = (0,) * d
    visited = {origin}
    total = [0]

    def go(v: Tuple[int, ...], depth: int):
        if depth == n:
            total[0] += 1
            return
        for i in range(d):
            for step in (1, -1):
                u = v[:i] + (v[i] + step,) + v[i + 1:]
                if u not in visited:
                    visited.add(u)
                    go(u, depth + 1)
                    visited.remove(u)

    go(origin, 0)
    return total[0]


def xi_bounds(d: int, n: int) -> Tuple[float, float, float]:
    """(lower_const, root_count, expansion) for the connective constant:
    2d-1-log(2d-1)  <=  C_{n,d}^{1/n}, with the 1/(2d)-expansion alongside."""
    lower_const = 2 * d - 1 - math.log(2 * d - 1)
    root_count = saw_count(n, d) ** (1.0 / n)
    expansion = 2 * d - 1 - 1.0 / (2 * d) - 3.0 / (2 * d) ** 2
    assert root_count >= lower_const, (root_count, lower_const)
    return lower_const, root_count, expansion


# ------------------------------------------------- random-walk overlaps

@dataclass(frozen=True)
class OverlapStats:
    """Overlap structure of independent n-step simple-random-walk pairs
    from the origin in Z^p, conditioned on both walks being self-avoiding.

    table[(l, K)]: probability that both walks are self-avoiding, share
    exactly l vertices besides the origin, and those shared vertices form
    K maximal consecutive blocks along the first walk.  eq_end_table adds
    the further event {same endpoint}.  Probabilities are under the
    uniform measure on (2p)^{2n} walk pairs (MC: empirical frequencies).
    """

    p: int
    n: int
    mode: str                                   # exact_enumeration | monte_carlo
    table: Dict[Tuple[int, int], float]
    sa_pair_prob: float
    eq_end_table: Dict[Tuple[int, int], float]
    samples: int = 0
    seed: int = 0

    def overlap_prob(self, l: int) -> float:
        """P(self-avoiding pair with exactly l shared non-origin vertices)."""
        return sum(v for (li, _), v in self.table.items() if li == l)

    def eq_end_prob(self, l: int) -> float:
        return sum(v for (li, _), v in self.eq_end_table.items() if li == l)

    def csv_rows(self, bound=None):
        """Rows (p, n, l, K, prob, bound, ratio); bound(l, K) optional and
        may return None where no closed-form bound applies."""
        rows = []
        for (l, K), prob in sorted(self.table.items()):
            b = bound(l, K) if bound is not None else None
            if b:
                rows.append(f"{self.p},{self.n},{l},{K},{prob!r},{b!r},{prob / b!r}")
            else:
                rows.append(f"{self.p},{self.n},{l},{K},{prob!r},,")
        return rows


def _walk_info(steps: Tuple[int, ...], p: int):
    """(positions after each step, self-avoiding flag, endpoint)."""
    pos = [0] * p
    seen = {tuple(pos)}
    path = []
    sa = True
    for s in steps:
        i, sign = divmod(s, 2)
        pos[i] += 1 if sign else -1
        t = tuple(pos)
        path.append(t)
        if t in seen:
            sa = False
        seen.add(t)
    return tuple(path), sa, path[-1] if path else (0,) * p


def _overlap_of_pair(path_a, set_b):
    """(l, K): shared non-origin vertex count and block count along path_a."""
    l = 0
    K = 0
    prev_in = False
    for v in path_a:
        inside = v in set_b
        if inside:
            l += 1
            if not prev_in:
                K += 1
        prev_in = inside
    return l, K


def rw_overlap_stats(p: int, n: int, mode: str = "exact_enumeration",
                     samples: int = 10 ** 5, seed: int = 0) -> OverlapStats:
    if p < 1 or n < 1:
        raise ValueError("need p >= 1, n >= 1")
    if mode == "exact_enumeration":
        if (2 * p) ** (2 * n) >= OVERLAP_BUDGET:
            raise EnumerationTooLarge(f"(2p)^(2n) pairs at p={p}, n={n}")
        walks = [_walk_info(s, p) for s in product(range(2 * p), repeat=n)]
        total = len(walks) ** 2
        table: Dict[Tuple[int, int], int] = {}
        eq_end: Dict[Tuple[int, int], int] = {}
        sa_pairs = 0
        sa_walks = [(path, end, frozenset(path)) for path, sa, end in walks if sa]
        for path_a, end_a, _ in sa_walks:
            for _, end_b, set_b in sa_walks:
                sa_pairs += 1
                lk = _overlap_of_pair(path_a, set_b)
                table[lk] = table.get(lk, 0) + 1
                if end_a == end_b:
                    eq_end[lk] = eq_end.get(lk, 0) + 1
        return OverlapStats(
            p, n, mode,
            {k: v / total for k, v in table.items()},
            sa_pairs / total,
            {k: v / total for k, v in eq_end.items()},
        )
    if mode == "monte_carlo":
        rng = np.random.Generator(np.random.PCG64(seed))
        steps = rng.integers(0, 2 * p, size=(samples, 2, n))
        table: Dict[Tuple[int, int], int] = {}
        eq_end: Dict[Tuple[int, int], int] = {}
        sa_pairs = 0
        for k in range(samples):
            path_a, sa_a, end_a = _walk_info(tuple(int(x) for x in steps[k, 0]), p)
            if not sa_a:
                continue
            path_b, sa_b, end_b = _walk_info(tuple(int(x) for x in steps[k, 1]), p)
            if not sa_b:
                continue
            sa_pairs += 1
            lk = _overlap_of_pair(path_a, frozenset(path_b))
            table[lk] = table.get(lk, 0) + 1
            if end_a == end_b:
                eq_end[lk] = eq_end.get(lk, 0) + 1
        return OverlapStats(
            p, n, mode,
            {k: v / samples for k, v in table.items()},
            sa_pairs / samples,
            {k: v / samples for k, v in eq_end.items()},
            samples=samples, seed=seed,
        )
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------- closed-form bounds

def pattern_count_bound(l: int, K: int, n: int) -> Tuple[float, float]:
    """Both sides of  l^(K-1) [C(n,K) K!]^2 2^K  <=  (2 l n^2)^K / l."""
    if not 1 <= K <= l <= n:
        raise ValueError("need 1 <= K <= l <= n")
    lhs = l ** (K - 1) * (math.comb(n, K) * math.factorial(K)) ** 2 * 2 ** K
    rhs = (2 * l * n * n) ** K / l
    assert lhs <= rhs, (lhs, rhs)
    return float(lhs), float(rhs)


def rw_return_facts(p: int, m: int) -> Tuple[float, float]:
    """(max_t P(S_m = t),  P(S_2 != 0, S_m = 0))  for the simple random
    walk in Z^p, by exact enumeration; checked against the closed bounds
    1/(2p) and (m-2)^2/(2p)^2."""
    if p < 1 or m < 1:
        raise ValueError("need p >= 1, m >= 1")
    if (2 * p) ** m >= RETURN_BUDGET:
        raise EnumerationTooLarge(f"(2p)^m walks at p={p}, m={m}")
    total = (2 * p) ** m
    endpoint_counts: Dict[Tuple[int, ...], int] = {}
    two_step_return = 0
    for s in product(range(2 * p), repeat=m):
        path, _, end = _walk_info(s, p)
        endpoint_counts[end] = endpoint_counts.get(end, 0) + 1
        if m >= 2 and path[1] != (0,) * p and end == (0,) * p:
            two_step_return += 1
    max_point_prob = max(endpoint_counts.values()) / total
    two_step_return_prob = two_step_return / total
    assert max_point_prob <= 1.0 / (2 * p) + 1e-15
    if m >= 2:
        assert two_step_return_prob <= (m - 2) ** 2 / (2 * p) ** 2 + 1e-15
    return max_point_prob, two_step_return_prob


def log_path_count_bound(k: int, n: int, d: int, rho: float) -> float:
    """log of  (2d)^k min(1, exp(-n rho + (k/d)(cosh rho - 1)))  — an upper
    bound on the number of k-step lattice paths from 0 to {x_1 = n}."""
    if rho < 0:
        raise ValueError("rho >= 0 required")
    if not k >= n >= 1:
        raise ValueError("need k >= n >= 1")
    expo = -n * rho + (k / d) * (math.cosh(rho) - 1.0)
    return k * math.log(2 * d) + min(0.0, expo)


def path_count_bound(k: int, n: int, d: int, rho: float) -> float:
    lg = log_path_count_bound(k, n, d, rho)
    return math.exp(lg) if lg < 700 else math.inf


def optimal_rho(k: int, n: int, d: int) -> float:
    """Minimizer of the exponent -n rho + (k/d)(cosh rho - 1): the
    stationary point sinh(rho) = nd/k."""
    return math.asinh(n * d / k)


def log_diagonal_count_bound(k: int, n: int, d: int) -> float:
    """log of  (2d)^k (n sd / k) C(k, (k + n sd)/2) 2^(-k)  bounding the
    number of k-step self-avoiding walks from 0 to the diagonal plane
    {sum x_i = n sd}, sd the smallest integer >= sqrt(d); -inf when the
    parity of k forbids any such path."""
    sd = math.isqrt(d - 1) + 1 if d > 1 else 1
    span = n * sd
    if k < span:
        raise ValueError("k >= n*sd required")
    if (k + span) % 2 == 1:
        return -math.inf
    h = (k + span) // 2
    return (k * math.log(2 * d) + math.log(span / k)
            + math.lgamma(k + 1) - math.lgamma(h + 1) - math.lgamma(k - h + 1)
            - k * math.log(2.0))
