"""Conductance, bottleneck vectors, covariance, and the eigenvalue bounds."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whmoves import bottleneck as bn
from whmoves.bottleneck import (
    DegenerateBottleneckError,
    EpsilonTooLargeError,
    HypothesisViolationError,
    ImproperSubsetError,
    NormTooSmallError,
    bottleneck_vector,
    boundary_size,
    cheeger_certificate,
    claim_check,
    conductance,
    covariance,
    graph_conductance,
    jcycle_bottleneck,
    lemma22_check,
    theorem11_pipeline,
    theorem23_bound,
    theorem23_verify,
)
from whmoves.spectral import jacobi_spectrum, laplacian

K2 = (2, [(0, 1)])
K4 = (4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
C10 = (10, [(i, (i + 1) % 10) for i in range(10)])


def planted_construction(rng, k):
    """Random PSD matrix with k planted low-quotient nearly orthogonal vectors.

    Returns (M, vectors, measured_eps, measured_lam)."""
    dim = k + int(rng.integers(2, 8))
    small = np.sort(rng.uniform(0.0, 1.0, size=k))
    large = rng.uniform(10.0, 50.0, size=dim - k)
    eigs = np.concatenate([small, large])
    B = rng.standard_normal((dim, dim))
    Qb, _ = np.linalg.qr(B)
    M = Qb @ np.diag(eigs) @ Qb.T
    M = (M + M.T) / 2
    vectors = []
    for i in range(k):
        v = Qb[:, i] + 0.02 * (Qb[:, :k] @ rng.standard_normal(k))
        vectors.append(v)
    lam = max(float(v @ M @ v / (v @ v)) for v in vectors)
    eps = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            vi, vj = vectors[i], vectors[j]
            eps = max(
                eps,
                abs(float(vi @ vj))
                / (np.linalg.norm(vi) * np.linalg.norm(vj)),
            )
    return M, vectors, eps, lam


class TestConductance:
    def test_k4_half(self):
        assert conductance(K4, {0, 1}) == 2

    def test_k2_single(self):
        assert conductance(K2, {0}) == 1

    def test_meta2_theta_side(self, g2u):
        theta_idx = next(
            i for i in range(2) if g2u.member_graph(i).num_loops() == 0
        )
        assert conductance(g2u, {theta_idx}) == 1

    def test_exact_rational(self):
        assert conductance(C10, {0, 1, 2}) == Fraction(2, 3)

    def test_improper_subsets_rejected(self):
        for bad in (set(), set(range(4)), {9}):
            with pytest.raises(ImproperSubsetError):
                conductance(K4, bad)

    def test_graph_conductance_k2(self):
        assert graph_conductance(K2).phi == 1

    def test_graph_conductance_k4(self):
        res = graph_conductance(K4)
        assert res.phi == 2 and res.exact
        assert res.candidate_family == "all proper subsets"

    def test_graph_conductance_matches_brute_force(self, g4u):
        res = graph_conductance(g4u)
        nv = g4u.num_vertices
        brute = min(
            conductance(g4u, {v for v in range(nv) if (m >> v) & 1})
            for m in range(1, 2**nv - 1)
        )
        assert res.phi == brute

    def test_beyond_cap_needs_candidates(self, g6l):
        with pytest.raises(ValueError, match="candidate"):
            graph_conductance(g6l, exact_cap=20)
        res = graph_conductance(g6l, candidates=[g6l.jcycle_members(1)])
        assert not res.exact and res.phi > 0

    def test_minimizer_achieves_value(self, g6u):
        res = graph_conductance(g6u)
        assert conductance(g6u, res.minimizer) == res.phi
        # restatement of the certificate at the argmin
        lam2 = float(jacobi_spectrum(g6u.laplacian()).eigenvalues[1])
        assert res.phi >= lam2 / 2 - 1e-9


class TestBottleneckVector:
    def test_two_point_formula(self):
        f = bottleneck_vector(K2, {0}).floats()
        assert np.allclose(f, [-1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_exact_identities_all_subsets_k4(self):
        for m in range(1, 15):
            X = {v for v in range(4) if (m >> v) & 1}
            vec = bottleneck_vector(K4, X)
            assert vec.sum_exact() == 0
            assert vec.norm_sq_exact() == 1
            J = vec.rayleigh_exact(K4)
            assert J == Fraction(boundary_size(K4, X) * 4, len(X) * (4 - len(X)))
            assert J <= 2 * conductance(K4, X)
            if len(X) == 2:
                assert J == 2 * conductance(K4, X)  # balanced case is tight

    def test_quotient_matches_float_rayleigh(self, g6u):
        from whmoves.spectral import rayleigh

        rng = random.Random(5)
        Q = g6u.laplacian()
        for _ in range(50):
            X = frozenset(rng.sample(range(g6u.num_vertices), rng.randint(1, 16)))
            vec = bottleneck_vector(g6u, X)
            assert abs(float(vec.rayleigh_exact(g6u)) - rayleigh(Q, vec.floats())) <= 1e-9

    @settings(deadline=None, max_examples=100)
    @given(data=st.data())
    def test_identities_random_subsets(self, g6u, data):
        nv = g6u.num_vertices
        size = data.draw(st.integers(1, nv - 1))
        X = data.draw(st.sets(st.integers(0, nv - 1), min_size=size, max_size=size))
        if not 0 < len(X) < nv:
            return
        vec = bottleneck_vector(g6u, X)
        assert vec.sum_exact() == 0
        assert vec.norm_sq_exact() == 1
        assert vec.rayleigh_exact(g6u) == Fraction(
            boundary_size(g6u, X) * nv, len(X) * (nv - len(X))
        )


class TestCheeger:
    def test_k4_tight(self):
        cert = cheeger_certificate(K4, {0, 1})
        assert cert.holds and abs(cert.lambda2 - 4) <= 1e-9 and cert.bound == 4

    def test_meta2(self, g2u):
        cert = cheeger_certificate(g2u, {0})
        assert cert.holds and abs(cert.lambda2 - 2) <= 1e-9

    def test_exhaustive_all_subsets_g4u(self, g4u):
        spec = jacobi_spectrum(g4u.laplacian())
        for m in range(1, 2**g4u.num_vertices - 1):
            X = {v for v in range(g4u.num_vertices) if (m >> v) & 1}
            assert cheeger_certificate(g4u, X, spectrum=spec).holds


class TestCovariance:
    def test_self(self):
        p = Fraction(3, 10)
        assert covariance(C10, {0, 1, 2}, {0, 1, 2}) == p - p * p

    def test_complement(self):
        X = {0, 1, 2}
        Y = set(range(10)) - X
        p = Fraction(3, 10)
        assert covariance(C10, X, Y) == -p * (1 - p)

    def test_independence_zero(self):
        # |X1 n X2| / V == (|X1|/V)(|X2|/V): 2/10 == (5/10)(4/10)
        assert covariance(C10, {0, 1, 2, 3, 4}, {0, 1, 5, 6}) == 0

    @settings(deadline=None, max_examples=200)
    @given(data=st.data())
    def test_symmetric_and_bounded(self, data):
        nv = 12
        G = (nv, [(i, (i + 1) % nv) for i in range(nv)])
        X1 = data.draw(st.sets(st.integers(0, nv - 1), min_size=1, max_size=nv - 1))
        X2 = data.draw(st.sets(st.integers(0, nv - 1), min_size=1, max_size=nv - 1))
        c12 = covariance(G, X1, X2)
        assert c12 == covariance(G, X2, X1)
        assert abs(c12) <= Fraction(1, 4)


class TestLemma22:
    def test_equal_subsets_give_one(self):
        rep = lemma22_check(C10, {0, 1, 2}, {0, 1, 2})
        assert abs(rep.lhs - 1) <= 1e-12 and abs(rep.rhs - 1) <= 1e-12
        assert rep.agree and rep.exact_identity

    def test_complement_gives_minus_one(self):
        rep = lemma22_check(C10, {0, 1, 2}, set(range(10)) - {0, 1, 2})
        assert abs(rep.lhs + 1) <= 1e-12 and rep.agree and rep.exact_identity

    def test_thousand_random_pairs_on_meta(self, g4u):
        rng = random.Random(0)
        nv = g4u.num_vertices
        for _ in range(1000):
            X1 = frozenset(rng.sample(range(nv), rng.randint(1, nv - 1)))
            X2 = frozenset(rng.sample(range(nv), rng.randint(1, nv - 1)))
            rep = lemma22_check(g4u, X1, X2)
            assert rep.agree and rep.exact_identity


class TestTheorem23:
    def test_bound_values(self):
        assert theorem23_bound(1, 0.0, 7.0) == 7.0
        assert theorem23_bound(2, 0.0, 7.0) == 14.0
        assert theorem23_bound(2, 0.5, 1.0) == 4.0

    def test_epsilon_too_large(self):
        with pytest.raises(EpsilonTooLargeError):
            theorem23_bound(3, 0.5, 1.0)
        with pytest.raises(EpsilonTooLargeError):
            theorem23_bound(2, 1.0, 1.0)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            theorem23_bound(0, 0.0, 1.0)
        with pytest.raises(ValueError):
            theorem23_bound(2, -0.1, 1.0)

    def test_diagonal_construction(self):
        M = np.diag([0.0, 3.0, 30.0])
        rep = theorem23_verify(M, [np.eye(3)[0], np.eye(3)[1]], eps=0.0, lam=3.0)
        assert rep.holds and rep.lambda_k == pytest.approx(3.0) and rep.bound == 6.0

    def test_eigenvector_family(self, g6u):
        Q = g6u.laplacian()
        spec = jacobi_spectrum(Q)
        k = 3
        W = [spec.eigenvectors[:, i] for i in range(k)]
        lam = float(spec.eigenvalues[k - 1]) + 1e-12
        rep = theorem23_verify(Q, W, eps=1e-8, lam=lam)
        assert rep.holds and rep.lambda_k <= k * lam + 1e-9

    def test_hypothesis_violations_named(self):
        M = np.diag([0.0, 1.0, 50.0])
        e = np.eye(3)
        with pytest.raises(HypothesisViolationError, match="rayleigh"):
            theorem23_verify(M, [e[2]], eps=0.0, lam=1.0)
        with pytest.raises(HypothesisViolationError, match="inner-product"):
            theorem23_verify(M, [e[0], e[0]], eps=0.0, lam=1.0)
        with pytest.raises(HypothesisViolationError, match="psd"):
            theorem23_verify(np.diag([-1.0, 1.0]), [np.eye(2)[0]], eps=0.0, lam=2.0)

    def test_randomized_planted_families(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            k = int(rng.integers(1, 6))
            M, W, eps, lam = planted_construction(rng, k)
            if (k - 1) * eps >= 1.0:
                continue
            rep = theorem23_verify(M, W, eps=eps, lam=lam)
            assert rep.holds


class TestClaim:
    def test_k2_opposite(self):
        w = claim_check([[1.0], [-1.0]])
        assert w.value >= 1.0

    def test_equiangular_tight_k3(self):
        vectors = [
            [math.cos(a), math.sin(a)]
            for a in (0.0, 2 * math.pi / 3, 4 * math.pi / 3)
        ]
        w = claim_check(vectors)
        assert abs(w.value - 0.5) <= 1e-12

    def test_norm_too_small(self):
        with pytest.raises(NormTooSmallError):
            claim_check([[0.5], [1.0]])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            claim_check([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]])

    @settings(deadline=None, max_examples=150)
    @given(seed=st.integers(0, 10**9), k=st.integers(2, 8))
    def test_witness_always_found(self, seed, k):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((k, k - 1))
        norms = np.linalg.norm(A, axis=1, keepdims=True)
        A = A / norms * rng.uniform(1.0, 2.0, size=(k, 1))
        w = claim_check(A)
        assert w.value >= 1.0 / (k - 1) - 1e-9


class TestJCycleBottleneck:
    def test_meta2_loop_subset(self, g2u):
        rep = jcycle_bottleneck(g2u, 1)
        assert rep.size_x == 1 and rep.boundary == 1 and rep.phi == 1
        dumb_idx = next(
            i for i in range(2) if g2u.member_graph(i).num_loops() > 0
        )
        assert rep.vector.members == frozenset({dumb_idx})

    def test_j_out_of_range_rejected(self, g2u):
        with pytest.raises(ValueError):
            jcycle_bottleneck(g2u, 5)
        with pytest.raises(ValueError):
            jcycle_bottleneck(g2u, 0)

    @staticmethod
    def _loopless_pair_meta():
        # artificial two-member meta-graph whose members are both loop-free
        # (and both contain 4-cycles), so j=1 is empty and j=4 is full
        from whmoves.cubic import enumerate_unlabelled, has_j_cycle
        from whmoves.metagraph import MetaGraph

        loopless = [
            g
            for g in enumerate_unlabelled(4)
            if g.num_loops() == 0 and has_j_cycle(g, 4)
        ]
        assert len(loopless) >= 2
        codes = tuple(sorted(g.key() for g in loopless[:2]))
        return MetaGraph("unlabelled", 4, codes, np.array([[0, 1]]))

    def test_degenerate_empty_subset(self):
        with pytest.raises(DegenerateBottleneckError, match="empty or full"):
            jcycle_bottleneck(self._loopless_pair_meta(), 1)

    def test_degenerate_full_subset(self):
        with pytest.raises(DegenerateBottleneckError, match="empty or full"):
            jcycle_bottleneck(self._loopless_pair_meta(), 4)

    def test_labelled_boundary_bound_small_n(self, g2l, g4l, g6l):
        for G in (g2l, g4l, g6l):
            for j in range(1, G.n + 1):
                try:
                    rep = jcycle_bottleneck(G, j)
                except DegenerateBottleneckError:
                    continue
                assert rep.boundary_bound == 8 * j
                assert rep.bound_holds
                assert rep.boundary <= 8 * j * rep.size_x

    def test_unlabelled_reports_measured_constant(self, g6u):
        rep = jcycle_bottleneck(g6u, 1)
        assert rep.boundary_bound is None and rep.bound_holds is None
        assert rep.per_vertex_max_boundary >= 0

    def test_density_columns(self, g6l):
        rep = jcycle_bottleneck(g6l, 1)
        assert rep.density == Fraction(rep.size_x, g6l.num_vertices)
        assert abs(rep.poisson_density - (1 - math.exp(-1))) <= 1e-12


class TestPipeline:
    def test_k1_reduces_to_cheeger(self, g2u):
        rep = theorem11_pipeline(g2u, 1)
        assert rep.bound == pytest.approx(rep.lam)
        assert rep.cheeger_lambda2_bound == pytest.approx(2.0)
        lam2 = float(jacobi_spectrum(g2u.laplacian()).eigenvalues[1])
        assert lam2 <= rep.cheeger_lambda2_bound + 1e-9

    def test_g6u_k2_full_report(self, g6u):
        rep = theorem11_pipeline(g6u, 2)
        assert rep.holds
        assert rep.lambda_k <= rep.bound + 1e-9
        assert len(rep.inner_products) == 1 and len(rep.covariances) == 1
        assert 0 <= rep.eps < 1

    def test_epsilon_too_large_noted_not_raised(self, g2u):
        rep = theorem11_pipeline(g2u, 2)
        assert rep.bound is None and rep.holds is None
        assert "eps" in rep.bound_note

    def test_degenerate_propagates(self):
        G = TestJCycleBottleneck._loopless_pair_meta()
        with pytest.raises(DegenerateBottleneckError):
            theorem11_pipeline(G, 1)
