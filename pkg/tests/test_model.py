import numpy as np
import pytest

from biasnet.graphs import Graph, generate_complete, generate_er, generate_lfr
from biasnet.model import (
    InitSpec,
    ModelParams,
    OpinionState,
    init_opinions,
    interact,
    partner_probabilities,
    run,
    select_partner,
    step,
)


def star_fixture(opinions):
    """Node 0 linked to nodes 1..len(opinions)-1."""
    n = len(opinions)
    g = Graph.from_edges(n, [(0, i) for i in range(1, n)])
    return g, OpinionState(np.asarray(opinions, dtype=np.float64))


class TestParams:
    def test_epsilon_range(self):
        with pytest.raises(ValueError):
            ModelParams(epsilon=1.2, gamma=0.0)

    def test_gamma_nonnegative(self):
        with pytest.raises(ValueError):
            ModelParams(epsilon=0.5, gamma=-0.1)

    def test_mu_range(self):
        with pytest.raises(ValueError):
            ModelParams(epsilon=0.5, gamma=0.0, mu=0.6)
        with pytest.raises(ValueError):
            ModelParams(epsilon=0.5, gamma=0.0, mu=0.0)

    def test_d_eps_positive(self):
        with pytest.raises(ValueError):
            ModelParams(epsilon=0.5, gamma=0.0, d_eps=0.0)

    def test_init_variant_checked(self):
        with pytest.raises(ValueError):
            InitSpec(variant="gaussian")
        with pytest.raises(ValueError):
            InitSpec(sigma=0.0)
        with pytest.raises(ValueError):
            InitSpec(fixed_means=(0.5, 1.7))


class TestInitOpinions:
    def test_uniform_mean(self):
        g = generate_complete(250)
        means = [init_opinions(g, InitSpec(), seed).opinions.mean() for seed in range(10)]
        assert abs(np.mean(means) - 0.5) < 0.05
        for seed in range(3):
            x = init_opinions(g, InitSpec(), seed).opinions
            assert x.min() >= 0.0 and x.max() <= 1.0

    def test_fixed_means_per_community(self):
        g = generate_lfr(250, 3.0, 1.5, 0.1, 10.0, 50, 3)
        spec = InitSpec(variant="community_fixed_means", sigma=0.01)
        x = init_opinions(g, spec, 11).opinions
        for c, target in enumerate((0.25, 0.5, 0.75, 1.0)):
            got = x[g.community == c].mean()
            assert abs(got - target) < 0.02

    def test_fixed_means_cycle(self):
        g = generate_lfr(250, 3.0, 1.5, 0.1, 10.0, 50, 3)
        spec = InitSpec(variant="community_fixed_means", sigma=0.01, fixed_means=(0.3, 0.7))
        x = init_opinions(g, spec, 11).opinions
        assert abs(x[g.community == 2].mean() - 0.3) < 0.02

    def test_tiny_sigma_collapses_to_mean(self):
        g = generate_lfr(250, 3.0, 1.5, 0.1, 10.0, 50, 3)
        spec = InitSpec(variant="community_fixed_means", sigma=1e-12)
        x = init_opinions(g, spec, 5).opinions
        for c, target in enumerate((0.25, 0.5, 0.75, 1.0)):
            assert np.allclose(x[g.community == c], target, atol=1e-9)

    def test_random_means_deterministic(self):
        g = generate_lfr(250, 3.0, 1.5, 0.5, 10.0, 50, 3)
        spec = InitSpec(variant="community_random_means")
        a = init_opinions(g, spec, 4).opinions
        b = init_opinions(g, spec, 4).opinions
        assert np.array_equal(a, b)

    def test_community_variant_needs_labels(self):
        g = generate_complete(20)
        with pytest.raises(ValueError):
            init_opinions(g, InitSpec(variant="community_random_means"), 0)


class TestPartnerSelection:
    def test_hand_computed_probabilities(self):
        # neighbors at distances 0.1, 0.2, 0.4 with gamma=1: weights 10:5:2.5
        g, state = star_fixture([0.5, 0.6, 0.7, 0.9])
        nbrs, probs = partner_probabilities(state, g, 0, gamma=1.0)
        assert probs == pytest.approx([4 / 7, 2 / 7, 1 / 7], abs=1e-3)

    def test_gamma_zero_uniform(self):
        g, state = star_fixture([0.5, 0.1, 0.2, 0.9, 0.95, 0.4])
        _, probs = partner_probabilities(state, g, 0, gamma=0.0)
        assert np.allclose(probs, 0.2)

    def test_clamped_distances_uniform(self):
        g, state = star_fixture([0.5, 0.5, 0.5, 0.5])
        _, probs = partner_probabilities(state, g, 0, gamma=2.0)
        assert np.allclose(probs, 1 / 3)

    def test_normalization(self):
        rng = np.random.default_rng(8)
        g = generate_er(60, 0.2, 2)
        for _ in range(50):
            state = OpinionState(rng.random(60))
            i = int(rng.integers(0, 60))
            nbrs, probs = partner_probabilities(state, g, i, gamma=1.6)
            if len(nbrs):
                assert abs(probs.sum() - 1.0) < 1e-12

    def test_gamma_monotonicity_nearest(self):
        g, state = star_fixture([0.5, 0.55, 0.7, 0.9])
        last = -1.0
        for gamma in (0.0, 0.5, 1.0, 2.0):
            _, probs = partner_probabilities(state, g, 0, gamma=gamma)
            assert probs[0] >= last - 1e-12
            last = probs[0]

    def test_isolated_returns_none(self):
        g = Graph.from_edges(3, [(1, 2)])
        state = OpinionState(np.array([0.1, 0.5, 0.6]))
        rng = np.random.default_rng(0)
        assert select_partner(state, g, 0, 1.0, rng) is None

    def test_gamma_zero_never_self(self):
        g, state = star_fixture([0.5, 0.2, 0.8])
        rng = np.random.default_rng(1)
        draws = [select_partner(state, g, 0, 0.0, rng) for _ in range(500)]
        assert None not in draws
        assert set(draws) == {1, 2}

    def test_self_draw_frequency(self):
        # far-away neighbors: the initiator's clamped weight dominates
        g, state = star_fixture([0.5, 0.1, 0.9])
        rng = np.random.default_rng(2)
        draws = [select_partner(state, g, 0, 2.0, rng) for _ in range(2000)]
        # w_self = 1e8, neighbor weights 1/0.16 each: none-rate ~ 1 - 1.25e-7
        assert draws.count(None) == 2000

    def test_conditional_frequencies_match_probabilities(self):
        # gamma=0.5 keeps the self weight small enough for a usable sample
        g, state = star_fixture([0.5, 0.6, 0.7, 0.9])
        _, expected = partner_probabilities(state, g, 0, gamma=0.5)
        rng = np.random.default_rng(3)
        draws = [select_partner(state, g, 0, 0.5, rng) for _ in range(200_000)]
        got = [j for j in draws if j is not None]
        assert len(got) > 5000
        counts = np.array([got.count(1), got.count(2), got.count(3)]) / len(got)
        assert counts == pytest.approx(expected, abs=0.02)


class TestInteract:
    def test_average_at_half_mu(self):
        state = OpinionState(np.array([0.2, 0.6]))
        assert interact(state, 0, 1, 0.5, 0.5)
        assert state.opinions.tolist() == [0.4, 0.4]

    def test_beyond_bound_unchanged(self):
        state = OpinionState(np.array([0.2, 0.6]))
        assert not interact(state, 0, 1, 0.3, 0.5)
        assert state.opinions.tolist() == [0.2, 0.6]

    def test_partial_step(self):
        state = OpinionState(np.array([0.2, 0.6]))
        assert interact(state, 0, 1, 0.5, 0.1)
        assert state.opinions == pytest.approx([0.24, 0.56])

    def test_boundary_distance_interacts(self):
        state = OpinionState(np.array([0.2, 0.7]))
        assert interact(state, 0, 1, 0.5, 0.5)

    def test_conservation_and_bounds(self):
        rng = np.random.default_rng(4)
        for _ in range(2000):
            x = rng.random(2)
            state = OpinionState(x.copy())
            interact(state, 0, 1, rng.random(), 0.5 * rng.random() + 1e-9)
            assert abs(state.opinions.sum() - x.sum()) < 1e-12
            assert np.all(state.opinions >= 0.0) and np.all(state.opinions <= 1.0)

    def test_contraction_factor(self):
        rng = np.random.default_rng(5)
        for _ in range(500):
            x = rng.random(2)
            mu = 0.5 * rng.random() + 1e-9
            state = OpinionState(x.copy())
            if interact(state, 0, 1, 1.0, mu):
                got = abs(state.opinions[1] - state.opinions[0])
                expected = abs(x[1] - x[0]) * (1 - 2 * mu)
                assert got == pytest.approx(expected, abs=1e-12)


class TestStep:
    def test_two_agents_average_in_one_step(self):
        g = generate_complete(2)
        state = OpinionState(np.array([0.3, 0.5]))
        rng = np.random.default_rng(0)
        changes = step(state, g, ModelParams(epsilon=1.0, gamma=0.0, mu=0.5), rng)
        assert state.opinions.tolist() == [0.4, 0.4]
        assert changes >= 1
        assert state.iteration == 1

    def test_zero_edges_changes_nothing(self):
        g = Graph.from_edges(5, [])
        x0 = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
        state = OpinionState(x0.copy())
        rng = np.random.default_rng(1)
        assert step(state, g, ModelParams(epsilon=1.0, gamma=0.0), rng) == 0
        assert np.array_equal(state.opinions, x0)

    def test_length_mismatch_rejected(self):
        g = generate_complete(4)
        state = OpinionState(np.zeros(3))
        with pytest.raises(ValueError):
            step(state, g, ModelParams(epsilon=0.5, gamma=0.0), np.random.default_rng(0))


class TestRun:
    def test_epsilon_zero_converges_immediately(self):
        g = generate_complete(50)
        params = ModelParams(epsilon=0.0, gamma=0.0)
        res = run(g, InitSpec(), params, 3)
        assert res.converged
        assert res.iterations_used == 0
        fresh = init_opinions(g, InitSpec(), np.random.default_rng(3))
        assert np.array_equal(res.final_opinions, fresh.opinions)

    def test_consensus_on_complete_graph(self):
        g = generate_complete(250)
        res = run(g, InitSpec(), ModelParams(epsilon=1.0, gamma=0.0), 17)
        assert res.converged
        assert np.ptp(res.final_opinions) < 1e-6

    def test_bit_reproducible(self):
        g = generate_er(80, 0.15, 5)
        params = ModelParams(epsilon=0.3, gamma=1.0, max_iterations=2000)
        a = run(g, InitSpec(), params, 42)
        b = run(g, InitSpec(), params, 42)
        assert np.array_equal(a.final_opinions, b.final_opinions)
        assert a.trace == b.trace

    def test_run_equals_manual_steps(self):
        g = generate_er(40, 0.3, 1)
        params = ModelParams(epsilon=0.2, gamma=1.5, max_iterations=300)
        res = run(g, InitSpec(), params, 99)
        rng = np.random.default_rng(99)
        state = init_opinions(g, InitSpec(), rng)
        for _ in range(res.iterations_used):
            step(state, g, params, rng)
        assert np.array_equal(state.opinions, res.final_opinions)

    def test_trace_cadence(self):
        g = generate_er(60, 0.2, 2)
        params = ModelParams(epsilon=0.25, gamma=0.8, max_iterations=1500, check_interval=100)
        res = run(g, InitSpec(), params, 7)
        iterations = [row[0] for row in res.trace]
        assert iterations[0] == 0
        assert all(it % 100 == 0 for it in iterations)
        assert iterations[-1] == res.iterations_used
        assert res.iterations_used <= params.max_iterations

    def test_population_mean_drift_bounded(self):
        g = generate_er(100, 0.2, 9)
        params = ModelParams(epsilon=0.4, gamma=1.0, max_iterations=2000)
        rng = np.random.default_rng(31)
        x0 = init_opinions(g, InitSpec(), rng).opinions.mean()
        res = run(g, InitSpec(), params, 31)
        assert abs(res.final_opinions.mean() - x0) < 1e-3

    def test_opinions_stay_bounded(self):
        g = generate_er(80, 0.2, 4)
        res = run(g, InitSpec(), ModelParams(epsilon=0.5, gamma=2.0, max_iterations=1000), 13)
        assert res.final_opinions.min() >= 0.0
        assert res.final_opinions.max() <= 1.0
