"""Deterministic generators for the instance families used across the package.

Families:

* :func:`build_b0` -- the four-resource swap family: two main players whose
  utilities differ in every profile, so the disadvantaged one always gains
  by swapping and no exact equilibrium exists.
* :func:`build_x3c_game` -- embeds an exact-cover-by-3-sets instance into a
  game that has an approximate equilibrium (below the swap family's
  tolerance) exactly when the instance has an exact cover.
* :func:`build_poa_game` -- a two-resource family whose worst stable state
  wastes almost the full improvement factor of welfare.
* :func:`random_game` -- seeded random games for property sweeps.

All constructors are pure and deterministic; every output passes
:func:`bagsim.model.validate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .bounds import gamma_star
from .model import Game, Resource, Strategy, within_tol
from .rng import Xoshiro256StarStar


class ConstructionError(ValueError):
    """Raised when generator parameters violate a family's constraints."""


def default_b0_params(delta: float) -> tuple[float, float, int]:
    """Default (gamma, sigma, n_aux) for the swap family at a share bound.

    gamma maximises the swap ratio; for delta < 1 the auxiliary players
    split the filler demand 1 - delta into the fewest chunks not exceeding
    delta each.  For delta >= 1 no auxiliaries are needed, and above 1 the
    side demand must itself exceed 1.
    """
    if delta <= 0:
        raise ConstructionError(f"delta must be positive, got {delta}")
    if delta > 1.0:
        return (1.0 + delta) / 2.0, delta, 0
    gamma = gamma_star(delta)
    if delta == 1.0:
        return gamma, delta, 0
    n_aux = math.ceil((1.0 - delta) / delta - 1e-12)
    sigma = (1.0 - delta) / n_aux
    return gamma, sigma, n_aux


def b0_main_utilities(
    delta: float, gamma: float, sigma: float, n_aux: int
) -> tuple[float, float]:
    """Closed-form utility pair (u, u_prime) of the swap family's main players.

    In every profile one main player earns u = gamma/denom + min(delta, 1)
    and the other u_prime = delta/denom + min(gamma, 1), with
    denom = delta + gamma + n_aux*sigma.
    """
    denom = delta + gamma + n_aux * sigma
    u = gamma / denom + min(delta, 1.0)
    u_prime = delta / denom + min(gamma, 1.0)
    return u, u_prime


def build_b0(
    delta: float,
    gamma: float,
    sigma: float | None = None,
    n_aux: int | None = None,
) -> Game:
    """Swap family: two main players on four unit resources, plus fillers.

    Main strategies pair a large demand ``delta`` with a small one ``gamma``
    so that each resource is used by exactly one strategy of each main
    player; ``n_aux`` filler players demand ``sigma`` everywhere.  For
    delta <= 1 the fillers must satisfy n_aux*sigma + delta = 1, which pins
    each resource at capacity when one main demand lands on it.  For
    delta > 1 there are no fillers and gamma must exceed 1.

    Parameter constraints: 0 < gamma < delta and sigma <= delta.  Omitted
    sigma/n_aux are derived (see :func:`default_b0_params`).
    """
    if delta <= 0:
        raise ConstructionError(f"delta must be positive, got {delta}")
    if not 0 < gamma < delta:
        raise ConstructionError(
            f"gamma must lie strictly between 0 and delta, got gamma={gamma} delta={delta}"
        )
    if delta > 1.0:
        if n_aux not in (None, 0):
            raise ConstructionError("no auxiliary players are allowed for delta > 1")
        if gamma <= 1.0:
            raise ConstructionError(f"delta > 1 requires gamma > 1, got {gamma}")
        sigma = delta if sigma is None else sigma
        n_aux = 0
    else:
        if n_aux is None and sigma is None:
            _, sigma, n_aux = default_b0_params(delta)
        elif n_aux is None:
            n_aux = 0 if delta == 1.0 else round((1.0 - delta) / sigma)
        elif sigma is None:
            sigma = delta if n_aux == 0 else (1.0 - delta) / n_aux
        if sigma <= 0 or n_aux < 0:
            raise ConstructionError("sigma must be positive and n_aux nonnegative")
        if not within_tol(n_aux * sigma + delta, 1.0):
            raise ConstructionError(
                f"filler demands must satisfy n_aux*sigma + delta = 1, "
                f"got {n_aux}*{sigma} + {delta} = {n_aux * sigma + delta}"
            )
    if sigma > delta * (1.0 + 1e-12):
        raise ConstructionError(f"sigma must not exceed delta, got {sigma} > {delta}")

    resources = tuple(Resource(i, 1.0) for i in range(4))
    player1 = (Strategy({0: gamma, 1: delta}), Strategy({2: delta, 3: gamma}))
    player2 = (Strategy({0: delta, 2: gamma}), Strategy({1: gamma, 3: delta}))
    aux = tuple(
        (Strategy({0: sigma, 1: sigma, 2: sigma, 3: sigma}),) for _ in range(n_aux)
    )
    return Game(resources, (player1, player2) + aux, delta)


@dataclass(frozen=True)
class X3CInstance:
    """An exact-cover-by-3-sets instance: universe {1..3m} and 3-element subsets."""

    universe_size: int
    subsets: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.universe_size <= 0 or self.universe_size % 3 != 0:
            raise ConstructionError(
                f"universe size must be a positive multiple of 3, got {self.universe_size}"
            )
        for k, sub in enumerate(self.subsets):
            if len(set(sub)) != 3:
                raise ConstructionError(f"subset {k} must have 3 distinct elements: {sub}")
            for e in sub:
                if not 1 <= e <= self.universe_size:
                    raise ConstructionError(
                        f"subset {k} references element {e} outside 1..{self.universe_size}"
                    )

    @staticmethod
    def create(m: int, subsets: Iterable[Sequence[int]]) -> "X3CInstance":
        return X3CInstance(
            3 * m, tuple(tuple(sorted(int(e) for e in sub)) for sub in subsets)
        )

    @property
    def m(self) -> int:
        return self.universe_size // 3

    @property
    def q(self) -> int:
        return len(self.subsets)


def find_exact_cover(instance: X3CInstance) -> tuple[int, ...] | None:
    """Brute-force search for an exact cover; returns subset indices or None.

    Exhaustive over all m-combinations, fine at desk scale only.
    """
    universe = frozenset(range(1, instance.universe_size + 1))
    for combo in combinations(range(instance.q), instance.m):
        seen: set[int] = set()
        ok = True
        for k in combo:
            sub = instance.subsets[k]
            if seen.intersection(sub):
                ok = False
                break
            seen.update(sub)
        if ok and seen == universe:
            return combo
    return None


def build_x3c_game(
    instance: X3CInstance,
    delta: float,
    alpha: float,
    gamma: float | None = None,
) -> Game:
    """Game encoding an exact-cover instance at improvement factor ``alpha``.

    Layout: the four swap-family resources come first (the embedded
    :func:`build_b0` game with default parameters, ids 0..3), then one unit
    resource per universe element (ids 4..3m+3), then the opt-out resource
    (last id).  Players: the two main swap players, one player per subset,
    then the swap family's fillers, then per-element fillers when a single
    pair of subset demands would not congest an element (2*delta <= 1).

    Each subset player either covers her three elements (demand delta each)
    or retreats to the opt-out resource with demand 3*alpha*delta.  The
    second main player gets a third strategy demanding 1/alpha of her best
    in-family utility on the opt-out resource, whose capacity fits exactly
    q - m retreated subset players next to her.  Holding that strategy is
    then exactly alpha-stable, but only while at most q - m subset players
    have retreated, which forces at least m of them to cover -- possible
    without losses exactly when an exact cover exists.

    Requires q - m >= 1/delta so the opt-out demands respect the share
    bound.
    """
    if alpha < 1.0:
        raise ConstructionError(f"alpha must be at least 1, got {alpha}")
    if delta <= 0:
        raise ConstructionError(f"delta must be positive, got {delta}")
    m, q = instance.m, instance.q
    if (q - m) * delta < 1.0 - 1e-12:
        raise ConstructionError(
            f"need q - m >= 1/delta, got q={q} m={m} delta={delta}"
        )
    g_default, sigma, n_aux = default_b0_params(delta)
    if gamma is None:
        gamma = g_default
    gadget = build_b0(delta, gamma, sigma, n_aux)
    u, u_prime = b0_main_utilities(delta, gamma, sigma, n_aux)
    escape = max(u, u_prime) / alpha

    n_elem = instance.universe_size
    retreat_demand = 3.0 * alpha * delta
    r_prime_cap = (q - m) * retreat_demand + escape
    r_prime = 4 + n_elem

    resources = gadget.resources + tuple(
        Resource(4 + j, 1.0) for j in range(n_elem)
    ) + (Resource(r_prime, r_prime_cap),)

    main1 = gadget.players[0]
    main2 = gadget.players[1] + (Strategy({r_prime: escape}),)
    subset_players = tuple(
        (
            Strategy({4 + e - 1: delta for e in sub}),
            Strategy({r_prime: retreat_demand}),
        )
        for sub in instance.subsets
    )
    aux_players = gadget.players[2:]

    fill_players: tuple[tuple[Strategy, ...], ...] = ()
    if 2.0 * delta <= 1.0:
        # One demand alone must fit, two must congest: fill each element
        # resource up to 1 - delta, in chunks no larger than delta.
        chunks = math.ceil((1.0 - delta) / delta - 1e-12)
        fill = (1.0 - delta) / chunks
        fill_players = tuple(
            (Strategy({4 + j: fill}),)
            for j in range(n_elem)
            for _ in range(chunks)
        )

    players = (main1, main2) + subset_players + aux_players + fill_players
    return Game(resources, players, delta)


def build_poa_game(delta: float, alpha: float, n1: int, n2: int) -> Game:
    """Two-resource family with a stable state of near-worst welfare.

    ``n1`` fixed players can only crowd the unit resource; ``n2`` flexible
    players choose between a private slice alpha/N of the wide resource and
    joining the crowd.  All-crowd is alpha-stable with welfare 1, while
    moving every flexible player to the wide resource yields
    1 + n2*alpha/N, approaching alpha + 1 as n2 grows.

    Requires delta*n1 >= 1 (the fixed players alone congest the unit
    resource) and n1, n2 >= 1.
    """
    if alpha < 1.0:
        raise ConstructionError(f"alpha must be at least 1, got {alpha}")
    if n1 < 1 or n2 < 1:
        raise ConstructionError(f"n1 and n2 must be at least 1, got {n1}, {n2}")
    if delta <= 0 or delta * n1 < 1.0 - 1e-12:
        raise ConstructionError(
            f"need delta*n1 >= 1, got delta={delta} n1={n1}"
        )
    n = n1 + n2
    wide_cap = alpha * n2 / (delta * n)
    resources = (Resource(0, wide_cap), Resource(1, 1.0))
    fixed = tuple((Strategy({1: delta}),) for _ in range(n1))
    flexible = tuple(
        (Strategy({0: alpha / n}), Strategy({1: delta})) for _ in range(n2)
    )
    return Game(resources, fixed + flexible, delta)


def random_game(
    seed: int,
    n_players: int,
    n_resources: int,
    strategies_per_player: int,
    delta: float,
    density: float,
) -> Game:
    """Seeded random game; identical seeds give identical games.

    Capacities are log-uniform in [0.1, 10] (the floor keeps the
    logarithmic potential well conditioned).  Each strategy uses each
    resource independently with probability ``density``, drawing the demand
    uniformly from (0, delta*capacity], so the share bound holds by
    construction.
    """
    if n_players < 1 or n_resources < 1 or strategies_per_player < 1:
        raise ConstructionError("all counts must be at least 1")
    if not 0.0 < density <= 1.0:
        raise ConstructionError(f"density must lie in (0, 1], got {density}")
    if delta <= 0:
        raise ConstructionError(f"delta must be positive, got {delta}")
    rng = Xoshiro256StarStar(seed)
    capacities = [0.1 * 10.0 ** (2.0 * rng.uniform()) for _ in range(n_resources)]
    players = []
    for _ in range(n_players):
        strategies = []
        for _ in range(strategies_per_player):
            demands: dict[int, float] = {}
            for r in range(n_resources):
                if rng.uniform() < density:
                    demands[r] = delta * capacities[r] * rng.uniform_open_closed()
            strategies.append(Strategy(demands))
        players.append(tuple(strategies))
    resources = tuple(Resource(i, b) for i, b in enumerate(capacities))
    return Game(resources, tuple(players), delta)
