"""Configuration-model sampling and the random-regular comparison."""

from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from whmoves import randreg
from whmoves.randreg import (
    RandRegConfig,
    RegularGraph,
    RetriesExhaustedError,
    generate,
    lambda2_experiment,
    lambda2_window,
    theorem12_comparison,
    trial_seed,
)

K4_EDGES = tuple((i, j) for i in range(4) for j in range(i + 1, 4))


def exhaustive_pairing_class_ratio():
    """Exact pairing-model probabilities of the two 3-regular simple graphs
    on 6 vertices, by dynamic programming over all 15!! matchings with
    per-multigraph pairing counts."""

    n, d = 6, 3

    @lru_cache(maxsize=None)
    def complete(res):
        u = next((v for v in range(n) if res[v]), None)
        if u is None:
            return {(): 1}
        out: dict[tuple, int] = {}
        for w in range(u, n):
            if w == u:
                if res[u] < 2:
                    continue
                ways = res[u] - 1
            else:
                if res[w] == 0:
                    continue
                ways = res[w]
            nxt = list(res)
            nxt[u] -= 1
            nxt[w] -= 1
            for sub, count in complete(tuple(nxt)).items():
                key = tuple(sorted(sub + ((u, w),)))
                out[key] = out.get(key, 0) + ways * count
        return out

    table = complete(tuple([d] * n))
    total = sum(table.values())
    assert total == 17 * 15 * 13 * 11 * 9 * 7 * 5 * 3 * 1  # (n*d - 1)!!
    simple_counts: dict[bool, int] = {True: 0, False: 0}
    for edges, count in table.items():
        if any(u == v for u, v in edges) or len(set(edges)) != len(edges):
            continue
        has_triangle = any(
            (a, b) in edges and (b, c) in edges and (a, c) in edges
            for a in range(n)
            for b in range(a + 1, n)
            for c in range(b + 1, n)
        )
        simple_counts[has_triangle] += count
    prism, k33 = simple_counts[True], simple_counts[False]
    return Fraction(k33, k33 + prism), Fraction(prism, k33 + prism)


class TestConfig:
    def test_odd_product_rejected(self):
        with pytest.raises(ValueError):
            RandRegConfig(5, 3)

    def test_degree_bounds(self):
        with pytest.raises(ValueError):
            RandRegConfig(4, 0)
        with pytest.raises(ValueError):
            RandRegConfig(4, 4)


class TestGenerate:
    def test_k4_is_the_only_cubic_graph_on_4_vertices(self):
        for seed in range(20):
            assert generate(RandRegConfig(4, 3, seed)).edges == K4_EDGES

    def test_seed_determinism(self):
        a = generate(RandRegConfig(20, 3, seed=123))
        b = generate(RandRegConfig(20, 3, seed=123))
        assert a == b
        c = generate(RandRegConfig(20, 3, seed=124))
        assert c != a

    @pytest.mark.parametrize("n,d", [(10, 3), (50, 6), (30, 4), (9, 2)])
    def test_samples_validate(self, n, d):
        g = generate(RandRegConfig(n, d, seed=5))
        assert g.validate() is None

    def test_retries_exhausted(self):
        with pytest.raises(RetriesExhaustedError):
            # d = N-2 at N=8 makes simple pairings astronomically rare for
            # this tiny retry budget
            generate(RandRegConfig(8, 6, seed=0, max_retries=1))

    def test_validate_reports_defects(self):
        g = RegularGraph(4, 3, ((0, 0), (0, 1), (1, 2), (2, 3), (1, 3), (2, 3)), 0, 1)
        assert "loop" in g.validate()


class TestPairingUniformity:
    def test_empirical_ratio_within_five_points_of_exact(self):
        k33_exact, prism_exact = exhaustive_pairing_class_ratio()
        assert k33_exact == Fraction(1, 7)  # 10 labelled K33s vs 60 prisms
        trials = 600
        k33 = 0
        for t in range(trials):
            g = generate(RandRegConfig(6, 3, trial_seed(5, t)))
            es = set(g.edges)
            has_triangle = any(
                (a, b) in es and (b, c) in es and (a, c) in es
                for a in range(6)
                for b in range(a + 1, 6)
                for c in range(b + 1, 6)
            )
            if not has_triangle:
                k33 += 1
        assert abs(k33 / trials - float(k33_exact)) <= 0.05


class TestLambda2:
    def test_stats_match_values(self):
        st = lambda2_experiment(20, 3, trials=10, seed=3)
        arr = np.array(st.values)
        assert st.mean == pytest.approx(arr.mean())
        assert st.minimum == min(st.values) and st.maximum == max(st.values)

    def test_k4_edge_case_lambda2_is_d_plus_1(self):
        st = lambda2_experiment(4, 3, trials=3, seed=0)
        assert all(v == pytest.approx(4.0, abs=1e-9) for v in st.values)

    def test_concentration_as_n_grows(self):
        small = lambda2_experiment(16, 3, trials=20, seed=11)
        large = lambda2_experiment(64, 3, trials=20, seed=11)
        assert large.stddev < small.stddev

    def test_window(self):
        lo, hi = lambda2_window(6)
        assert lo == pytest.approx(6 - 3 * np.sqrt(6)) and hi == 6.0


class TestComparison:
    def test_n2_skipped_with_explanation(self):
        rep = theorem12_comparison(2, k=2, trials=2, seed=0)
        assert rep.skipped is not None and "small" in rep.skipped

    def test_n4_report(self):
        rep = theorem12_comparison(4, k=2, trials=5, seed=1)
        assert rep.skipped is None
        assert rep.meta_vertices == 35
        assert rep.degree == round(rep.meta_mean_degree)
        assert len(rep.meta_eigenvalues) == 2
        assert rep.random_lambda2.trials == 5
        assert len(rep.flags) == 2
        # lambda1 = 0 of the move graph always sits below every lambda2 trial
        assert rep.flags[0]
