import json
import math

import numpy as np
import pytest

from oracles import exhaustive_decision
from tracecrit.classical import Distribution, statistical_distance
from tracecrit.errors import ConvergenceError, DimensionError, ValidationError
from tracecrit.jacobi import jacobi_eigh
from tracecrit.quantum import (
    DensityOperator,
    HermitianOperator,
    composition_bound,
    density_from_dict,
    embed_classical,
    embedding,
    equal_prior_conditionals,
    helstrom_correct_probability,
    hermitian_eigenvalues,
    ml_decision_conditionals,
    random_density_operator,
    trace_distance,
    trace_norm,
)

KET0 = DensityOperator.pure([1, 0])
KET_PLUS = DensityOperator.pure([1, 1])


def random_hermitian(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianOperator(0.5 * (g + g.conj().T))


class TestJacobi:
    def test_matches_numpy(self, rng):
        for m in (1, 2, 3, 7, 16, 33):
            a = rng.standard_normal((m, m))
            a = a + a.T
            w, v = jacobi_eigh(a)
            np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-12)
            np.testing.assert_allclose(v.T @ v, np.eye(m), atol=1e-12)

    def test_sweep_cap(self, rng):
        a = rng.standard_normal((8, 8))
        with pytest.raises(ConvergenceError) as info:
            jacobi_eigh(a + a.T, max_sweeps=1)
        assert info.value.residual > 0

    def test_already_diagonal(self):
        w, v = jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
        np.testing.assert_array_equal(w, [-1.0, 2.0, 3.0])


class TestHermitian:
    def test_identity(self):
        np.testing.assert_allclose(hermitian_eigenvalues(HermitianOperator(np.eye(2))), [1, 1])

    def test_diagonal(self):
        np.testing.assert_allclose(hermitian_eigenvalues(HermitianOperator(np.diag([0.25, 0.75]))), [0.25, 0.75])

    def test_pauli_y(self):
        # det(Y - x I) = x^2 - 1.
        eig = hermitian_eigenvalues(HermitianOperator([[0, -1j], [1j, 0]]))
        np.testing.assert_allclose(eig, [-1.0, 1.0], atol=1e-15)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            HermitianOperator([[0, 1], [0, 0]])

    def test_dimension_cap(self):
        with pytest.raises(ValidationError):
            HermitianOperator(np.eye(65))

    def test_reconstruction_from_embedding(self, rng):
        for _ in range(40):
            dim = int(rng.integers(1, 33))
            h = random_hermitian(rng, dim)
            w, v = jacobi_eigh(embedding(h))
            rebuilt = v @ np.diag(w) @ v.T
            h_rebuilt = rebuilt[:dim, :dim] + 1j * rebuilt[dim:, :dim]
            assert np.linalg.norm(h_rebuilt - h.entries) < 1e-9

    def test_eigenvalues_against_numpy(self, rng):
        for _ in range(30):
            h = random_hermitian(rng, int(rng.integers(1, 20)))
            np.testing.assert_allclose(hermitian_eigenvalues(h), np.linalg.eigvalsh(h.entries), atol=1e-11)

    def test_trace_norm(self):
        assert trace_norm(HermitianOperator(np.zeros((3, 3)))) == 0.0
        assert trace_norm(HermitianOperator(np.diag([0.5, -0.5]))) == 1.0
        # |0><0| - |+><+| has eigenvalues +-1/sqrt(2).
        assert trace_norm(KET0 - KET_PLUS) == pytest.approx(math.sqrt(2), abs=1e-14)

    def test_json_round_trip(self, rng):
        rho = random_density_operator(rng, 3)
        again = density_from_dict(json.loads(json.dumps(rho.to_dict())))
        np.testing.assert_array_equal(again.entries, rho.entries)


class TestDensity:
    def test_rejects_bad_trace(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.diag([0.5, 0.6]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.diag([1.5, -0.5]))

    def test_random_is_valid(self, rng):
        rho = random_density_operator(rng, 6)
        assert np.trace(rho.entries).real == pytest.approx(1.0)
        assert hermitian_eigenvalues(rho)[0] > 0


class TestTraceDistance:
    def test_identical(self, rng):
        rho = random_density_operator(rng, 4)
        assert trace_distance(rho, rho) == 0.0

    def test_classical_pair(self):
        d = trace_distance(embed_classical(Distribution.dense([1, 0])), embed_classical(Distribution.uniform(2)))
        assert d == 0.5

    def test_zero_vs_plus(self):
        assert trace_distance(KET0, KET_PLUS) == pytest.approx(1 / math.sqrt(2), abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            trace_distance(KET0, DensityOperator(np.eye(3) / 3))

    def test_symmetric(self, rng):
        a, b = random_density_operator(rng, 5), random_density_operator(rng, 5)
        assert trace_distance(a, b) == pytest.approx(trace_distance(b, a), abs=1e-13)

    def test_matches_statistical_distance_on_diagonals(self, rng):
        for _ in range(1000):
            n = int(rng.integers(1, 33))
            p = Distribution.dense(rng.dirichlet(np.ones(n)))
            q = Distribution.dense(rng.dirichlet(np.ones(n)))
            assert abs(trace_distance(embed_classical(p), embed_classical(q)) - statistical_distance(p, q)) <= 1e-10

    def test_triangle_inequality(self, rng):
        for _ in range(150):
            dim = int(rng.integers(1, 9))
            a, b, c = (random_density_operator(rng, dim) for _ in range(3))
            assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-12
            assert trace_distance(a, c) <= composition_bound(trace_distance(a, b), trace_distance(b, c)) + 1e-12


class TestEmbedding:
    def test_uniform(self):
        np.testing.assert_array_equal(embed_classical(Distribution.uniform(2)).entries, np.diag([0.5, 0.5]))

    def test_point(self):
        np.testing.assert_array_equal(embed_classical(Distribution.dense([1, 0])).entries, np.diag([1.0, 0.0]))

    def test_extremal(self):
        w = [0.35, 0.65 / 3, 0.65 / 3, 0.65 / 3]
        rho = embed_classical(Distribution.dense(w))
        assert rho.dim == 4
        np.testing.assert_array_equal(np.diag(rho.entries).real, w)

    def test_size_cap(self):
        with pytest.raises(ValidationError):
            embed_classical(Distribution.uniform(65))


class TestHelstrom:
    def test_certain_prior(self, rng):
        a, b = random_density_operator(rng, 3), random_density_operator(rng, 3)
        assert helstrom_correct_probability(a, b, 1.0, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_equal_states(self, rng):
        a = random_density_operator(rng, 3)
        assert helstrom_correct_probability(a, a, 0.5, 0.5) == 0.5
        assert helstrom_correct_probability(a, a, 0.9, 0.1) == pytest.approx(0.9, abs=1e-12)

    def test_classical_pair(self):
        p0 = np.array([1.0, 0.0])
        p1 = np.array([0.5, 0.5])
        expected = exhaustive_decision(p0, p1, 0.5)
        assert expected == 0.75
        value = helstrom_correct_probability(
            embed_classical(Distribution.dense(p0)), embed_classical(Distribution.dense(p1)), 0.5, 0.5
        )
        assert value == pytest.approx(expected, abs=1e-15)

    def test_priors_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            helstrom_correct_probability(KET0, KET_PLUS, 0.5, 0.6)

    def test_equal_prior_is_half_plus_half_distance(self, rng):
        for _ in range(20):
            a, b = random_density_operator(rng, 4), random_density_operator(rng, 4)
            assert helstrom_correct_probability(a, b, 0.5) == pytest.approx(0.5 + trace_distance(a, b) / 2, abs=1e-12)

    def test_at_least_best_prior(self, rng):
        for p0 in np.linspace(0, 1, 11):
            a, b = random_density_operator(rng, 3), random_density_operator(rng, 3)
            assert helstrom_correct_probability(a, b, p0) >= max(p0, 1 - p0) - 1e-12

    def test_exhaustive_search_small(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 9))
            p = rng.dirichlet(np.ones(n))
            q = rng.dirichlet(np.ones(n))
            prior = round(float(rng.integers(0, 11)) / 10, 1)
            got = helstrom_correct_probability(
                embed_classical(Distribution.dense(p)), embed_classical(Distribution.dense(q)), prior
            )
            assert got == pytest.approx(exhaustive_decision(p, q, prior), abs=1e-10)

    def test_advantage_shrinks_as_one_prior_dominates(self, rng):
        grid = np.round(np.linspace(0.5, 1.0, 6), 1)
        for _ in range(50):
            n = int(rng.integers(1, 8))
            a = embed_classical(Distribution.dense(rng.dirichlet(np.ones(n))))
            b = embed_classical(Distribution.dense(rng.dirichlet(np.ones(n))))
            for rho0, rho1 in ((a, b), (b, a)):
                adv = [helstrom_correct_probability(rho0, rho1, m) - m for m in grid]
                assert all(y <= x + 1e-12 for x, y in zip(adv, adv[1:]))
                assert adv[-1] == pytest.approx(0.0, abs=1e-12)

    def test_convex_in_prior(self, rng):
        a, b = random_density_operator(rng, 3), random_density_operator(rng, 3)
        vals = np.array([helstrom_correct_probability(a, b, p0) for p0 in np.linspace(0, 1, 21)])
        assert np.all(vals[:-2] + vals[2:] - 2 * vals[1:-1] >= -1e-12)
        assert vals[0] == pytest.approx(1.0, abs=1e-12) and vals[-1] == pytest.approx(1.0, abs=1e-12)

    def test_not_monotone_in_dominant_prior(self):
        # Shifting prior toward the mixed state lowers the success probability.
        p0, p1 = np.array([0.5, 0.5]), np.array([1.0, 0.0])
        assert exhaustive_decision(p0, p1, 0.5) == pytest.approx(0.75)
        assert exhaustive_decision(p0, p1, 0.6) == pytest.approx(0.70)
        rho0, rho1 = embed_classical(Distribution.dense(p0)), embed_classical(Distribution.dense(p1))
        assert helstrom_correct_probability(rho0, rho1, 0.6) == pytest.approx(0.70, abs=1e-12)
        assert helstrom_correct_probability(rho0, rho1, 0.6) < helstrom_correct_probability(rho0, rho1, 0.5)


class TestConditionals:
    @pytest.mark.parametrize("d, expected", [(0.0, (0.5, 0.5)), (0.1, (0.55, 0.45)), (1.0, (1.0, 0.0))])
    def test_equal_prior(self, d, expected):
        assert equal_prior_conditionals(d) == pytest.approx(expected, abs=1e-15)

    def test_equal_prior_range(self):
        with pytest.raises(ValidationError):
            equal_prior_conditionals(1.5)

    def test_ml_same(self):
        p = Distribution.dense([0.3, 0.7])
        assert ml_decision_conditionals(p, p).correct_probability == 0.5

    def test_ml_point_vs_uniform(self):
        r = ml_decision_conditionals(Distribution.dense([1, 0]), Distribution.uniform(2))
        assert (r.accept_q_given_q, r.accept_q_given_p, r.correct_probability) == (0.5, 0.0, 0.75)

    def test_ml_hand_example(self):
        r = ml_decision_conditionals(Distribution.dense([0.6, 0.4]), Distribution.uniform(2))
        assert r.accept_q_given_q == 0.5
        assert r.accept_q_given_p == 0.4
        assert r.correct_probability == pytest.approx(0.55, abs=1e-15)

    def test_ml_correct_probability_random(self, rng):
        for _ in range(500):
            n = int(rng.integers(1, 30))
            p = Distribution.dense(rng.dirichlet(np.ones(n)))
            q = Distribution.dense(rng.dirichlet(np.ones(n)))
            r = ml_decision_conditionals(p, q)
            assert abs(r.correct_probability - (0.5 + statistical_distance(p, q) / 2)) <= 1e-12

    def test_individual_conditionals_are_rule_dependent(self):
        p, q = Distribution.dense([1, 0]), Distribution.uniform(2)
        r = ml_decision_conditionals(p, q)
        d = statistical_distance(p, q)
        assert r.correct_probability == pytest.approx(0.5 + d / 2, abs=1e-12)
        assert abs(r.accept_q_given_q - (0.5 + d / 2)) >= 0.25


class TestComposition:
    @pytest.mark.parametrize("a, b, expected", [(0, 0, 0), (0.3, 0.4, 0.7), (0.8, 0.9, 1.0)])
    def test_values(self, a, b, expected):
        assert composition_bound(a, b) == pytest.approx(expected, abs=1e-15)

    def test_range(self):
        with pytest.raises(ValidationError):
            composition_bound(-0.1, 0.2)
