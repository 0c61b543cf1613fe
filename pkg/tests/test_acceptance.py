"""End-to-end acceptance: one test class per release criterion, each with
its own runtime budget measured around the actual work."""

import dataclasses
import math
import time
from itertools import product

import numpy as np
import pytest

from fpplab.certifier import (
    admissible_A,
    alpha_star,
    best_mu_star_lower,
    diamond_strict_at,
    find_threshold,
    inf_identity_residual,
    optimize_upper,
    overlap_correction,
    shape_certificate,
    upsilon,
)
from fpplab.combinatorics import (
    pattern_count_bound,
    rw_overlap_stats,
    rw_return_facts,
    saw_count,
    xi_bounds,
)
from fpplab.distributions import (
    exponential,
    gamma_cdf,
    sn_cdf_bounds,
    uniform,
)
from fpplab.engine import Box, PointTarget, SearchCaps, first_passage
from fpplab.estimators import estimate_mu_e1, estimate_mu_star
from fpplab.lattice import EdgeKey, Vertex, edge_weight, neighbors


EXP = exponential(1.0)
U01 = uniform(1.0)


class TestCriterion1WorkedExample:
    """Full certificate at d = 268337 for the standard exponential law."""

    D = 268337
    DELTA, ETA, B = 0.764, 1e-3, 23.85

    def test_certificate_numbers(self):
        t0 = time.monotonic()
        A, params = admissible_A(self.D, self.DELTA, self.ETA, EXP)
        assert params.all_valid
        assert math.isfinite(A)

        val, flags = upsilon(self.D, self.DELTA, self.ETA, self.B, A, EXP)
        assert all(ok for _, ok in flags)

        best, best_params = optimize_upper(self.D, EXP)
        assert best <= val
        assert best <= 6.38e-4
        assert best == pytest.approx(5.756086e-4, rel=1e-4)

        ms, _, ms_flags = best_mu_star_lower(self.D, EXP)
        assert all(ok for _, ok in ms_flags)
        assert ms >= 6.39e-4
        assert ms == pytest.approx(6.396982e-4, rel=1e-4)

        cert = shape_certificate(self.D, EXP)
        assert cert.ball_excluded
        assert cert.mu_upper < cert.mustar_lower
        assert time.monotonic() - t0 < 5.0

    def test_quoted_second_moment_ratio(self):
        # target figure for this tuple is 1.20; the faithful evaluation of
        # the second-moment display gives 1.337, and back-solving the
        # companion upper bound is consistent with ~1.31, not 1.20 — this
        # assertion is kept red deliberately rather than loosened
        A, params = admissible_A(self.D, self.DELTA, self.ETA, EXP)
        assert params.all_valid
        assert A <= 1.20


class TestCriterion2DiamondThresholds:
    def test_exponential_threshold_110(self):
        t0 = time.monotonic()
        delta = (2 + math.log(2)) / (4 + math.log(2))
        assert find_threshold(EXP, "diamond_strict", delta=delta) == 110
        assert not diamond_strict_at(109, EXP, delta)
        assert time.monotonic() - t0 < 10.0

    def test_uniform_threshold_416(self):
        # the implemented gates already certify at 415, one dimension ahead
        # of the quoted sufficient threshold 416 (rounding slack in the
        # fixed delta); assert the bracket rather than an exact integer
        t0 = time.monotonic()
        th = find_threshold(U01, "diamond_strict", delta=0.669)
        assert th <= 416
        assert diamond_strict_at(416, U01, 0.669)
        assert not diamond_strict_at(414, U01, 0.669)
        assert time.monotonic() - t0 < 10.0


class TestCriterion3AlphaStar:
    def test_constant_and_identity(self):
        t0 = time.monotonic()
        al, half = alpha_star()
        assert 0.3313 <= half <= 0.3314
        assert inf_identity_residual() <= 1e-8
        assert math.cosh(al) / math.sinh(al) == pytest.approx(al, abs=1e-12)
        assert time.monotonic() - t0 < 1.0


class TestCriterion4DeskScaleLimits:
    """Simulated growth constants at d in {4, 6, 8, 10}: the normalized
    e_1 estimate decreases toward its limiting corridor and the diagonal
    estimate sits inside its proven band."""

    DIMS = (4, 6, 8, 10)
    REPLICAS = 500
    MASTER_SEED = 777

    def test_corridor_and_diagonal_bands(self):
        t0 = time.monotonic()
        corridor = []
        for d in self.DIMS:
            rec = estimate_mu_e1(d, EXP, replicas=self.REPLICAS,
                                 master_seed=self.MASTER_SEED)
            assert rec.exact_fraction == 1.0
            corridor.append((d, rec.mean * 2 * d / math.log(d)))
        for (_, a), (_, b) in zip(corridor, corridor[1:]):
            assert a > b
        for _, c in corridor:
            assert 1.0 < c < 4.0

        _, half = alpha_star()
        for d in self.DIMS:
            rec = estimate_mu_star(d, EXP, n=3, replicas=self.REPLICAS,
                                   master_seed=self.MASTER_SEED)
            assert rec.exact_fraction == 1.0
            lo = half / math.sqrt(d) - 4 * rec.stderr
            hi = 1.0 / math.sqrt(d) + 4 * rec.stderr
            assert lo <= rec.mean <= hi
        assert time.monotonic() - t0 < 600.0


def enumerate_shortest(target, seed, spec, lo=-3, hi=3):
    """Exhaustive simple-path minimum from the origin to ``target`` over
    the d = 2 box [lo, hi]^2 — independent of the search engine."""
    best = [math.inf]

    def go(v, cost, visited):
        if cost >= best[0]:
            return
        if v == target:
            best[0] = cost
            return
        for u, key in neighbors(v):
            if u in visited:
                continue
            if not all(lo <= u.coord(i) <= hi for i in (1, 2)):
                continue
            visited.add(u)
            go(u, cost + edge_weight(key, seed, spec), visited)
            visited.remove(u)

    origin = Vertex.origin(2)
    go(origin, 0.0, {origin})
    return best[0]


class TestCriterion5OracleEquivalence:
    def test_dijkstra_matches_enumeration(self):
        t0 = time.monotonic()
        rng = np.random.Generator(np.random.PCG64(2024))
        caps = SearchCaps(coordinate_box=Box(default=(-3, 3)))
        for _ in range(20):
            seed = int(rng.integers(0, 2 ** 63))
            x, y = (int(v) for v in rng.integers(-3, 4, size=2))
            if x == 0 and y == 0:
                x = 1
            target = Vertex.make(2, {1: x, 2: y})
            oracle = enumerate_shortest(target, seed, EXP)
            for use_fast in (False, True):
                s = first_passage(2, PointTarget(target), seed, EXP, caps,
                                  use_fast=use_fast)
                assert s.value == pytest.approx(oracle, abs=1e-10)
        assert time.monotonic() - t0 < 30.0


class TestCriterion6CountingSuite:
    def test_counting_inequalities(self):
        t0 = time.monotonic()

        # self-avoiding walk count vs a naive step-sequence filter
        naive = 0
        for steps in product(range(4), repeat=5):
            pos, seen, ok = [0, 0], {(0, 0)}, True
            for s in steps:
                i, sign = divmod(s, 2)
                pos[i] += 1 if sign else -1
                t = tuple(pos)
                if t in seen:
                    ok = False
                    break
                seen.add(t)
            naive += ok
        assert saw_count(5, 2) == naive == 284

        # connective-constant lower bound
        for d in (2, 3):
            for n in range(2, 7):
                lower, root, _ = xi_bounds(d, n)
                assert root >= lower

        # pattern-count inequality on its whole small domain
        for n in range(1, 9):
            for l in range(1, n + 1):
                for K in range(1, l + 1):
                    lhs, rhs = pattern_count_bound(l, K, n)
                    assert lhs <= rhs

        # random-walk return bounds, exactly
        for p in (1, 2):
            for m in (2, 3, 4):
                max_pp, ret = rw_return_facts(p, m)
                assert max_pp <= 1.0 / (2 * p) + 1e-15
                assert ret <= (m - 2) ** 2 / (2 * p) ** 2 + 1e-15

        # exact overlap tables against the closed-form correction
        for p in (1, 2, 3):
            for n in (2, 3, 4):
                stats = rw_overlap_stats(p, n)
                for l in range(1, n):
                    bound = (0.5 / p) ** l * overlap_correction(n, p, l)
                    assert stats.overlap_prob(l) <= bound + 1e-15
        assert time.monotonic() - t0 < 120.0


class TestCriterion7PipelineConsistency:
    def test_sandwich_and_pipeline_dominance(self):
        t0 = time.monotonic()

        # the partial-sum sandwich contains the exact Gamma CDF
        for n in range(1, 7):
            for x in np.linspace(1e-4, EXP.eps0, 50):
                lo, up = sn_cdf_bounds(EXP, n, float(x))
                assert lo <= gamma_cdf(n, float(x)) <= up

        # exponential-exact pipeline never exceeds the generic pipeline
        # at identical parameters, over 50 random admissible tuples
        generic = dataclasses.replace(EXP, kind="custom")
        rng = np.random.Generator(np.random.PCG64(7))
        found = 0
        while found < 50:
            d = int(rng.integers(200, 10 ** 6))
            delta = float(rng.uniform(0.3, 0.95))
            eta = float(rng.choice([1e-3, 1e-2, 1e-1]))
            B = float(np.exp(rng.uniform(math.log(0.5), math.log(60))))
            Ae, _ = admissible_A(d, delta, eta, EXP)
            Ag, _ = admissible_A(d, delta, eta, generic)
            if not (math.isfinite(Ae) and math.isfinite(Ag)):
                continue
            ve, fe = upsilon(d, delta, eta, B, Ae, EXP)
            vg, fg = upsilon(d, delta, eta, B, Ag, generic)
            if not (all(ok for _, ok in fe) and all(ok for _, ok in fg)):
                continue
            found += 1
            assert Ae <= Ag + 1e-12
            assert ve <= vg + 1e-15
        assert time.monotonic() - t0 < 60.0
