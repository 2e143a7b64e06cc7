import math

import pytest

from bagsim.model import (
    Game,
    ProfileState,
    infer_delta,
    player_utility,
    potential,
    resource_potential,
    social_welfare,
    total_demands,
    utility_per_resource,
    validate,
    validate_profile,
)
from bagsim.constructions import build_b0, random_game


def simple_game(capacities, players, delta=1.0):
    return Game.create(capacities, players, delta)


class TestUtilityPerResource:
    def test_under_capacity_equals_demand(self):
        g = simple_game([1.0], [[{0: 0.4}]])
        assert utility_per_resource(g, (0,), 0, 0) == 0.4

    def test_symmetric_split(self):
        g = simple_game([1.0], [[{0: 0.8}], [{0: 0.8}]])
        assert utility_per_resource(g, (0, 0), 0, 0) == pytest.approx(0.5)
        assert utility_per_resource(g, (0, 0), 1, 0) == pytest.approx(0.5)

    def test_proportional_share(self):
        # demands 0.25, 0.5 and 0.5 on capacity 1: total 1.25
        g = simple_game([1.0], [[{0: 0.25}], [{0: 0.5}], [{0: 0.5}]], delta=0.5)
        u0 = utility_per_resource(g, (0, 0, 0), 0, 0)
        assert u0 == pytest.approx(0.25 * 1.0 / 1.25)
        # shares of the congested resource add up to its capacity
        total = sum(utility_per_resource(g, (0, 0, 0), i, 0) for i in range(3))
        assert total == pytest.approx(1.0)

    def test_unused_resource_gives_zero(self):
        g = simple_game([1.0, 1.0], [[{0: 0.4}]])
        assert utility_per_resource(g, (0,), 0, 1) == 0.0

    def test_index_errors(self):
        g = simple_game([1.0], [[{0: 0.4}]])
        with pytest.raises(IndexError):
            utility_per_resource(g, (0,), 1, 0)
        with pytest.raises(IndexError):
            utility_per_resource(g, (0,), 0, 5)
        with pytest.raises(ValueError):
            utility_per_resource(g, (0, 0), 0, 0)


class TestPlayerUtility:
    def test_swap_family_pair(self):
        # delta=0.5, gamma=0.25, one filler with sigma=0.5
        g = build_b0(0.5, 0.25, 0.5, 1)
        assert player_utility(g, (0, 0, 0), 0) == pytest.approx(0.7)
        assert player_utility(g, (0, 0, 0), 1) == pytest.approx(0.65)

    def test_player_without_resources(self):
        g = simple_game([1.0], [[{}], [{0: 0.5}]])
        assert player_utility(g, (0, 0), 0) == 0.0


class TestSocialWelfare:
    def test_equals_served_demand(self):
        for seed in range(30):
            g = random_game(seed, 4, 3, 2, 0.8, 0.7)
            profile = (0,) * 4
            totals = total_demands(g, profile)
            served = sum(
                min(t, r.capacity)
                for t, r in zip(totals, g.resources)
                if t > 0
            )
            assert social_welfare(g, profile) == pytest.approx(served)

    def test_welfare_is_sum_of_utilities(self):
        g = build_b0(0.5, 0.25, 0.5, 1)
        w = social_welfare(g, (0, 1, 0))
        assert w == pytest.approx(
            sum(player_utility(g, (0, 1, 0), i) for i in range(3))
        )


class TestPotential:
    def test_under_capacity_branch(self):
        assert resource_potential(0.9, 1.0) == 0.9

    def test_logarithmic_branch_matches_quadrature(self):
        # integrate capacity/x over [capacity, total] with Simpson's rule
        b, total = 1.0, 2.0
        n = 2000
        h = (total - b) / n
        integral = b / b + b / total
        for k in range(1, n):
            x = b + k * h
            integral += (4.0 if k % 2 else 2.0) * b / x
        integral *= h / 3.0
        expected = b + integral
        assert resource_potential(total, b) == pytest.approx(expected, abs=1e-9)
        assert resource_potential(2.0, 1.0) == pytest.approx(1.0 + math.log(2.0))

    def test_sole_player_marginal_is_full_potential(self):
        g = simple_game([1.0], [[{0: 0.7}]])
        pb = potential(g, (0,))
        assert pb.marginal[(0, 0)] == pytest.approx(pb.per_resource[0])

    def test_total_is_sum_of_per_resource(self):
        g = random_game(3, 4, 4, 2, 0.9, 0.8)
        pb = potential(g, (0, 1, 0, 1))
        assert pb.total == pytest.approx(sum(pb.per_resource.values()))

    def test_marginal_dominates_utility(self):
        for seed in range(50):
            g = random_game(seed, 3, 3, 2, 1.0, 0.8)
            profile = tuple(seed % len(ss) for ss in g.players)
            pb = potential(g, profile)
            for (i, r), marg in pb.marginal.items():
                u = utility_per_resource(g, profile, i, r)
                assert marg >= u - 1e-12

    def test_marginals_telescope(self):
        # adding players one at a time, the per-step increments sum to the total
        g = random_game(11, 5, 3, 2, 0.7, 0.9)
        profile = (0, 1, 0, 1, 0)
        totals = [0.0] * g.n_resources
        increment_sum = [0.0] * g.n_resources
        for i, c in enumerate(profile):
            for r, d in g.players[i][c].demands.items():
                before = resource_potential(totals[r], g.resources[r].capacity)
                totals[r] += d
                after = resource_potential(totals[r], g.resources[r].capacity)
                increment_sum[r] += after - before
        pb = potential(g, profile)
        for r in range(g.n_resources):
            assert increment_sum[r] == pytest.approx(pb.per_resource[r], abs=1e-9)


class TestInvariantSweep:
    def test_share_conservation_and_sandwich(self):
        # 1000 seeded games: per-resource shares sum to min(total, capacity),
        # utilities are capped, and the potential sits between u and
        # (1 + ln(n*delta)) * u whenever n*delta >= 1
        for seed in range(1000):
            delta = (seed % 10 + 1) / 10.0
            n = 2 + seed % 4
            g = random_game(seed, n, 2 + seed % 3, 2, delta, 0.7)
            profile = tuple(seed % len(ss) for ss in g.players)
            totals = total_demands(g, profile)
            for r in range(g.n_resources):
                if totals[r] <= 0:
                    continue
                shares = sum(
                    utility_per_resource(g, profile, i, r) for i in range(n)
                )
                assert shares == pytest.approx(
                    min(totals[r], g.resources[r].capacity), rel=1e-9
                )
            for i in range(n):
                for r, d in g.players[i][profile[i]].demands.items():
                    u = utility_per_resource(g, profile, i, r)
                    assert 0.0 <= u <= min(d, g.resources[r].capacity) + 1e-12
            nd = n * delta
            if nd >= 1.0:
                u = social_welfare(g, profile)
                phi = potential(g, profile).total
                assert u <= phi + 1e-9
                assert phi <= (1.0 + math.log(nd)) * u + 1e-9


class TestValidate:
    def test_generated_game_is_clean(self):
        assert validate(build_b0(0.5, 0.25, 0.5, 1)) == []

    def test_share_bound_violation(self):
        g = simple_game([1.0], [[{0: 1.2}]], delta=1.0)
        violations = validate(g)
        assert len(violations) == 1
        assert violations[0].kind == "share-bound"
        assert violations[0].player == 0 and violations[0].resource == 0

    def test_unknown_resource(self):
        g = simple_game([1.0], [[{3: 0.5}]])
        kinds = [v.kind for v in validate(g)]
        assert kinds == ["unknown-resource"]

    def test_zero_demand_rejected(self):
        g = simple_game([1.0], [[{0: 0.0}]])
        assert [v.kind for v in validate(g)] == ["nonpositive-demand"]

    def test_empty_strategy_set(self):
        g = Game(
            (simple_game([1.0], [[{0: 0.1}]]).resources), ((),), 1.0
        )
        assert [v.kind for v in validate(g)] == ["empty-strategy-set"]


class TestHelpers:
    def test_infer_delta(self):
        g = simple_game([2.0, 1.0], [[{0: 1.0}], [{1: 0.25}]], delta=1.0)
        assert infer_delta(g) == pytest.approx(0.5)

    def test_validate_profile(self):
        g = simple_game([1.0], [[{0: 0.1}, {0: 0.2}]])
        assert validate_profile(g, [1]) == (1,)
        with pytest.raises(ValueError):
            validate_profile(g, [2])
        with pytest.raises(ValueError):
            validate_profile(g, [0, 0])

    def test_profile_count(self):
        g = random_game(1, 3, 2, 4, 0.5, 0.5)
        assert g.profile_count() == 64


class TestProfileState:
    def test_matches_pure_functions_after_moves(self):
        g = random_game(21, 4, 4, 3, 0.8, 0.7)
        state = ProfileState(g, (0, 0, 0, 0))
        moves = [(0, 2), (3, 1), (1, 2), (0, 1), (2, 2), (3, 0)]
        for player, strategy in moves:
            state.move(player, strategy)
            profile = state.profile()
            for i in range(4):
                assert state.utility(i) == pytest.approx(
                    player_utility(g, profile, i), rel=1e-12
                )
            assert state.welfare() == pytest.approx(social_welfare(g, profile))
            assert state.potential_total() == pytest.approx(
                potential(g, profile).total
            )

    def test_deviation_utility(self):
        g = random_game(5, 3, 3, 3, 0.6, 0.8)
        state = ProfileState(g, (1, 0, 2))
        for player in range(3):
            for s in range(3):
                deviated = list((1, 0, 2))
                deviated[player] = s
                assert state.strategy_utility(player, s) == pytest.approx(
                    player_utility(g, tuple(deviated), player), rel=1e-12
                )
