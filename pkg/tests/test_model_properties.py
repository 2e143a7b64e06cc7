"""Property tests for the core invariants on arbitrary small games."""

import math

from hypothesis import given, settings, strategies as st

from bagsim.model import (
    Game,
    potential,
    social_welfare,
    total_demands,
    utility_per_resource,
    validate,
)


@st.composite
def games_with_profile(draw):
    n_resources = draw(st.integers(1, 4))
    n_players = draw(st.integers(1, 4))
    delta = draw(st.floats(0.1, 2.0, allow_nan=False, allow_infinity=False))
    capacities = [
        draw(st.floats(0.1, 10.0, allow_nan=False, allow_infinity=False))
        for _ in range(n_resources)
    ]
    players = []
    for _ in range(n_players):
        strategies = []
        for _ in range(draw(st.integers(1, 3))):
            demands = {}
            for r in range(n_resources):
                if draw(st.booleans()):
                    frac = draw(st.floats(1e-6, 1.0, allow_nan=False))
                    demands[r] = frac * delta * capacities[r]
            strategies.append(demands)
        players.append(strategies)
    game = Game.create(capacities, players, delta)
    profile = tuple(
        draw(st.integers(0, len(ss) - 1)) for ss in game.players
    )
    return game, profile


@settings(max_examples=60, deadline=None)
@given(games_with_profile())
def test_generated_games_validate(gp):
    game, _ = gp
    assert validate(game) == []


@settings(max_examples=60, deadline=None)
@given(games_with_profile())
def test_share_conservation(gp):
    game, profile = gp
    totals = total_demands(game, profile)
    for r in range(game.n_resources):
        if totals[r] <= 0:
            continue
        shares = sum(
            utility_per_resource(game, profile, i, r)
            for i in range(game.n_players)
        )
        expected = min(totals[r], game.resources[r].capacity)
        assert math.isclose(shares, expected, rel_tol=1e-9, abs_tol=1e-12)


@settings(max_examples=60, deadline=None)
@given(games_with_profile())
def test_utility_cap(gp):
    game, profile = gp
    for i in range(game.n_players):
        for r, d in game.players[i][profile[i]].demands.items():
            u = utility_per_resource(game, profile, i, r)
            assert 0.0 <= u <= min(d, game.resources[r].capacity) + 1e-12


@settings(max_examples=60, deadline=None)
@given(games_with_profile())
def test_potential_dominates_per_player_utility(gp):
    game, profile = gp
    pb = potential(game, profile)
    for (i, r), marg in pb.marginal.items():
        assert marg + 1e-12 >= utility_per_resource(game, profile, i, r)


@settings(max_examples=60, deadline=None)
@given(games_with_profile())
def test_potential_at_least_welfare(gp):
    game, profile = gp
    u = social_welfare(game, profile)
    phi = potential(game, profile).total
    assert phi + 1e-9 >= u
