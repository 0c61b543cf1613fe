import math
from itertools import product

import pytest

from fpplab.combinatorics import (
    log_diagonal_count_bound,
    log_path_count_bound,
    optimal_rho,
    path_count_bound,
    pattern_count_bound,
    rw_overlap_stats,
    rw_return_facts,
    saw_count,
    xi_bounds,
)
from fpplab.errors import EnumerationTooLarge


def naive_saw_count(n, d):
    """Filter all (2d)^n step sequences for self-avoidance."""
    count = 0
    for steps in product(range(2 * d), repeat=n):
        pos = [0] * d
        seen = {tuple(pos)}
        ok = True
        for s in steps:
            i, sign = divmod(s, 2)
            pos[i] += 1 if sign else -1
            t = tuple(pos)
            if t in seen:
                ok = False
                break
            seen.add(t)
        if ok:
            count += 1
    return count


class TestSawCount:
    def test_base_cases(self):
        assert saw_count(0, 2) == 1
        assert saw_count(1, 2) == 4
        assert saw_count(1, 3) == 6
        assert saw_count(2, 2) == 12           # 2d(2d-1)
        assert saw_count(2, 5) == 90

    def test_known_square_lattice_values(self):
        # known square-lattice series (OEIS A001411)
        assert saw_count(3, 2) == 36
        assert saw_count(4, 2) == 100
        assert saw_count(5, 2) == 284

    def test_matches_naive_filter(self):
        for n, d in [(3, 2), (5, 2), (3, 3)]:
            assert saw_count(n, d) == naive_saw_count(n, d)

    def test_budget(self):
        with pytest.raises(EnumerationTooLarge):
            saw_count(50, 10)

    def test_domain(self):
        with pytest.raises(ValueError):
            saw_count(-1, 2)
        with pytest.raises(ValueError):
            saw_count(3, 0)


class TestXiBounds:
    @pytest.mark.parametrize("d", [2, 3])
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_lower_const_below_root_count(self, d, n):
        lower, root, expansion = xi_bounds(d, n)
        assert lower <= root
        assert lower == pytest.approx(2 * d - 1 - math.log(2 * d - 1))
        assert expansion < 2 * d - 1


class TestOverlapStats:
    def test_p1_n1(self):
        # Z^1, one step each: both walks are SA; same step with prob 1/2
        st = rw_overlap_stats(1, 1)
        assert st.sa_pair_prob == 1.0
        assert st.table == {(1, 1): 0.5, (0, 0): 0.5}

    def test_p2_n3_mass_balance(self):
        st = rw_overlap_stats(2, 3)
        assert sum(st.table.values()) == pytest.approx(st.sa_pair_prob)
        assert st.sa_pair_prob == pytest.approx(0.31640625)
        # eq-end events are a subset of overlap events, class by class
        for lk, v in st.eq_end_table.items():
            assert v <= st.table[lk] + 1e-15

    def test_eq_end_strictly_smaller_for_partial_overlap(self):
        st = rw_overlap_stats(2, 3)
        # sharing one interior vertex does not force a shared endpoint
        assert st.eq_end_prob(1) < st.overlap_prob(1)

    def test_full_overlap_has_eq_end_mass(self):
        st = rw_overlap_stats(2, 3)
        # identical paths contribute to l = n with shared endpoints
        assert 0 < st.eq_end_prob(3) <= st.overlap_prob(3)

    def test_monte_carlo_tracks_exact(self):
        exact = rw_overlap_stats(2, 3)
        mc = rw_overlap_stats(2, 3, "monte_carlo", samples=40_000, seed=1)
        assert mc.sa_pair_prob == pytest.approx(exact.sa_pair_prob, abs=0.01)
        for l in range(4):
            assert mc.overlap_prob(l) == pytest.approx(exact.overlap_prob(l), abs=0.01)

    def test_budget_and_domain(self):
        with pytest.raises(EnumerationTooLarge):
            rw_overlap_stats(10, 10)
        with pytest.raises(ValueError):
            rw_overlap_stats(0, 1)
        with pytest.raises(ValueError):
            rw_overlap_stats(2, 3, "guess")


class TestPatternBound:
    def test_holds_everywhere_small(self):
        for n in range(1, 9):
            for l in range(1, n + 1):
                for K in range(1, l + 1):
                    lhs, rhs = pattern_count_bound(l, K, n)
                    assert lhs <= rhs

    def test_k1_values(self):
        lhs, rhs = pattern_count_bound(1, 1, 4)
        assert lhs == pytest.approx(2 * 16)       # l^0 * C(4,1)^2 * 1 * 2
        assert rhs == pytest.approx(32.0)

    def test_domain(self):
        with pytest.raises(ValueError):
            pattern_count_bound(3, 4, 5)   # K > l
        with pytest.raises(ValueError):
            pattern_count_bound(5, 1, 4)   # l > n


class TestReturnFacts:
    def test_p2_m4(self):
        max_pp, ret = rw_return_facts(2, 4)
        assert max_pp == pytest.approx(0.140625)
        assert ret == pytest.approx(0.078125)
        assert max_pp <= 1.0 / 4
        assert ret <= 4.0 / 16

    @pytest.mark.parametrize("p,m", [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4)])
    def test_bounds_hold(self, p, m):
        max_pp, ret = rw_return_facts(p, m)
        assert max_pp <= 1.0 / (2 * p) + 1e-15
        assert ret <= (m - 2) ** 2 / (2 * p) ** 2 + 1e-15

    def test_budget(self):
        with pytest.raises(EnumerationTooLarge):
            rw_return_facts(4, 20)


class TestPathCountBound:
    def test_rho_zero_is_total_count(self):
        assert path_count_bound(3, 1, 2, 0.0) == pytest.approx(4 ** 3)

    def test_dominates_enumeration(self):
        # exact count of 3-step paths from 0 hitting {x_1 = 1} at step 3
        d, k, n = 2, 3, 1
        exact = 0
        for steps in product(range(2 * d), repeat=k):
            pos = [0] * d
            for s in steps:
                i, sign = divmod(s, 2)
                pos[i] += 1 if sign else -1
            if pos[0] == n:
                exact += 1
        rho = optimal_rho(k, n, d)
        assert path_count_bound(k, n, d, rho) >= exact

    def test_optimal_rho_matches_grid(self):
        for k, n, d in [(5, 2, 3), (10, 4, 7), (12, 12, 2)]:
            rho = optimal_rho(k, n, d)
            grid = [i * 5.0 / 10_000 for i in range(1, 10_001)]
            best = min(log_path_count_bound(k, n, d, r) for r in grid)
            assert log_path_count_bound(k, n, d, rho) <= best + 1e-9

    def test_monotone_below_trivial(self):
        for rho in (0.0, 0.5, 1.0):
            assert log_path_count_bound(8, 3, 4, rho) <= 8 * math.log(8) + 1e-12

    def test_domain(self):
        with pytest.raises(ValueError):
            log_path_count_bound(2, 3, 4, 0.1)   # k < n
        with pytest.raises(ValueError):
            log_path_count_bound(3, 1, 2, -0.1)


class TestDiagonalCountBound:
    def test_parity(self):
        # k and n*sd of different parity: no path, bound is log 0
        assert log_diagonal_count_bound(3, 1, 4) == -math.inf

    def test_dominates_enumeration(self):
        # Z^2: SA walks of k steps ending on {x + y = 2}
        d, n = 2, 1
        sd = 2
        for k in (2, 4, 6):
            exact = 0
            for steps in product(range(2 * d), repeat=k):
                pos = [0] * d
                seen = {(0, 0)}
                ok = True
                for s in steps:
                    i, sign = divmod(s, 2)
                    pos[i] += 1 if sign else -1
                    t = tuple(pos)
                    if t in seen:
                        ok = False
                        break
                    seen.add(t)
                if ok and sum(pos) == n * sd:
                    exact += 1
            assert log_diagonal_count_bound(k, n, d) >= math.log(exact)

    def test_domain(self):
        with pytest.raises(ValueError):
            log_diagonal_count_bound(1, 1, 4)   # k < n*sd
