"""Core model for bandwidth allocation games.

A game consists of capacity-limited resources and players whose strategies
place demands on those resources.  A strategy is satisfied in full while the
total demand on a resource stays within its capacity; once the capacity is
exceeded, it is split between the users in proportion to their demands.  The
game carries a share bound ``delta``: no single demand may exceed ``delta``
times the capacity of the resource it is placed on.

The module also implements the piecewise resource potential (linear below
capacity, logarithmic above) whose growth under improving moves underpins
the termination and convergence results used by :mod:`bagsim.dynamics` and
:mod:`bagsim.analysis`.

Games and profiles are immutable after construction and all functions here
are pure, so values can be shared freely across parallel workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

# Relative/absolute tolerances for every inequality on computed reals.
# The potential involves a logarithm, so exact arithmetic is off the table.
REL_TOL = 1e-9
ABS_TOL = 1e-12

#: A profile assigns one strategy index to each player, in player order.
Profile = tuple[int, ...]


def within_tol(a: float, b: float) -> bool:
    """True when a and b agree within the package-wide tolerance."""
    return abs(a - b) <= max(REL_TOL * max(abs(a), abs(b)), ABS_TOL)


def leq_tol(a: float, b: float) -> bool:
    """True when a <= b up to the package-wide tolerance."""
    return a <= b + max(REL_TOL * max(abs(a), abs(b)), ABS_TOL)


@dataclass(frozen=True)
class Resource:
    """A resource with a dense integer id and a positive capacity."""

    id: int
    capacity: float

    def __post_init__(self) -> None:
        if self.capacity <= 0:
            raise ValueError(f"resource {self.id}: capacity must be positive")


@dataclass(frozen=True)
class Strategy:
    """Sparse demand vector: resource id -> positive demand.

    Resources the strategy does not use are simply absent; storing a zero
    demand is a validation error.
    """

    demands: dict[int, float] = field(default_factory=dict)

    def uses(self, resource: int) -> bool:
        return resource in self.demands

    def demand(self, resource: int) -> float:
        return self.demands.get(resource, 0.0)

    def clipped_total(self, capacities: Sequence[float]) -> float:
        """Sum of min(demand, capacity) over the used resources."""
        return sum(min(d, capacities[r]) for r, d in self.demands.items())


@dataclass(frozen=True)
class Game:
    """A bandwidth allocation game with a declared share bound.

    ``players[i]`` is the strategy set of player ``i``.  ``delta`` is the
    declared share bound; :func:`validate` checks it against every demand.
    Use :func:`infer_delta` for imported data that lacks a declared bound.
    """

    resources: tuple[Resource, ...]
    players: tuple[tuple[Strategy, ...], ...]
    delta: float

    @staticmethod
    def create(
        capacities: Iterable[float],
        players: Iterable[Iterable[Mapping[int, float]]],
        delta: float,
    ) -> "Game":
        """Build a game from plain capacities and demand mappings."""
        res = tuple(Resource(i, float(b)) for i, b in enumerate(capacities))
        strats = tuple(
            tuple(Strategy({int(r): float(d) for r, d in s.items()}) for s in ss)
            for ss in players
        )
        return Game(res, strats, float(delta))

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def n_resources(self) -> int:
        return len(self.resources)

    @property
    def capacities(self) -> tuple[float, ...]:
        return tuple(r.capacity for r in self.resources)

    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(len(ss) for ss in self.players)

    def profile_count(self) -> int:
        return math.prod(self.strategy_counts())


@dataclass(frozen=True)
class PotentialBreakdown:
    """Potential of a profile, split per resource and per (player, resource).

    ``marginal[(i, r)]`` is the potential on ``r`` attributed to player ``i``
    when she is accounted last: potential with her demand minus potential
    without it.  Pairs where the player places no demand are omitted.
    """

    per_resource: dict[int, float]
    total: float
    marginal: dict[tuple[int, int], float]


@dataclass(frozen=True)
class Violation:
    """One failed game invariant; indices are None where not applicable."""

    kind: str
    player: int | None
    strategy: int | None
    resource: int | None
    message: str

    def __str__(self) -> str:
        return self.message


def validate_profile(game: Game, profile: Sequence[int]) -> Profile:
    """Check a profile against the game and return it as a tuple."""
    prof = tuple(int(c) for c in profile)
    if len(prof) != game.n_players:
        raise ValueError(
            f"profile has {len(prof)} choices for {game.n_players} players"
        )
    for i, c in enumerate(prof):
        if not 0 <= c < len(game.players[i]):
            raise ValueError(f"player {i}: strategy index {c} out of range")
    return prof


def total_demands(game: Game, profile: Sequence[int]) -> list[float]:
    """Total demand placed on each resource under the profile."""
    totals = [0.0] * game.n_resources
    for i, c in enumerate(profile):
        for r, d in game.players[i][c].demands.items():
            totals[r] += d
    return totals


def _resource_utility(demand: float, capacity: float, total: float) -> float:
    """Utility a demand earns on one resource given the resource's total."""
    if demand <= 0.0:
        return 0.0
    if total <= capacity:
        return demand
    return capacity * demand / total


def utility_per_resource(
    game: Game, profile: Sequence[int], player: int, resource: int
) -> float:
    """Utility of one player from one resource: the demand if the resource
    is under capacity, otherwise the proportional share of the capacity."""
    if not 0 <= player < game.n_players:
        raise IndexError(f"player index {player} out of range")
    if not 0 <= resource < game.n_resources:
        raise IndexError(f"resource index {resource} out of range")
    prof = validate_profile(game, profile)
    d = game.players[player][prof[player]].demand(resource)
    if d == 0.0:
        return 0.0
    total = sum(
        game.players[j][prof[j]].demand(resource) for j in range(game.n_players)
    )
    return _resource_utility(d, game.resources[resource].capacity, total)


def player_utility(game: Game, profile: Sequence[int], player: int) -> float:
    """Total utility of a player: sum over the resources her strategy uses."""
    if not 0 <= player < game.n_players:
        raise IndexError(f"player index {player} out of range")
    prof = validate_profile(game, profile)
    totals = total_demands(game, prof)
    caps = game.capacities
    return sum(
        _resource_utility(d, caps[r], totals[r])
        for r, d in game.players[player][prof[player]].demands.items()
    )


def social_welfare(game: Game, profile: Sequence[int]) -> float:
    """Sum of all player utilities under the profile."""
    prof = validate_profile(game, profile)
    totals = total_demands(game, prof)
    caps = game.capacities
    out = 0.0
    for i, c in enumerate(prof):
        for r, d in game.players[i][c].demands.items():
            out += _resource_utility(d, caps[r], totals[r])
    return out


def resource_potential(total: float, capacity: float) -> float:
    """Piecewise potential of one resource: the total demand while under
    capacity, then capacity * (1 + ln(total / capacity)) above it."""
    if total <= capacity:
        return total
    return capacity + capacity * math.log(total / capacity)


def potential(game: Game, profile: Sequence[int]) -> PotentialBreakdown:
    """Potential of the profile with per-resource and per-player marginals."""
    prof = validate_profile(game, profile)
    totals = total_demands(game, prof)
    caps = game.capacities
    per_resource = {
        r: resource_potential(totals[r], caps[r]) for r in range(game.n_resources)
    }
    marginal: dict[tuple[int, int], float] = {}
    for i, c in enumerate(prof):
        for r, d in game.players[i][c].demands.items():
            marginal[(i, r)] = per_resource[r] - resource_potential(
                totals[r] - d, caps[r]
            )
    return PotentialBreakdown(per_resource, sum(per_resource.values()), marginal)


def validate(game: Game) -> list[Violation]:
    """Check every game invariant; an empty list means the game is valid.

    Violations are data, not exceptions: importers and generators report
    them all at once instead of stopping at the first problem.
    """
    out: list[Violation] = []
    if game.delta <= 0:
        out.append(
            Violation("delta", None, None, None, f"delta must be positive, got {game.delta}")
        )
    for r in game.resources:
        if r.capacity <= 0:
            out.append(
                Violation(
                    "capacity", None, None, r.id,
                    f"resource {r.id}: capacity {r.capacity} is not positive",
                )
            )
    n_res = game.n_resources
    for idx, r in enumerate(game.resources):
        if r.id != idx:
            out.append(
                Violation(
                    "resource-id", None, None, r.id,
                    f"resource ids must be dense 0..{n_res - 1}, found {r.id} at position {idx}",
                )
            )
    for i, strategies in enumerate(game.players):
        if not strategies:
            out.append(
                Violation("empty-strategy-set", i, None, None, f"player {i} has no strategies")
            )
        for s_idx, strat in enumerate(strategies):
            for r, d in strat.demands.items():
                if not 0 <= r < n_res:
                    out.append(
                        Violation(
                            "unknown-resource", i, s_idx, r,
                            f"player {i} strategy {s_idx} references unknown resource {r}",
                        )
                    )
                    continue
                if d <= 0:
                    out.append(
                        Violation(
                            "nonpositive-demand", i, s_idx, r,
                            f"player {i} strategy {s_idx} stores demand {d} on resource {r}; "
                            "zero demands must be omitted",
                        )
                    )
                    continue
                cap = game.resources[r].capacity
                if game.delta > 0 and not leq_tol(d, game.delta * cap):
                    out.append(
                        Violation(
                            "share-bound", i, s_idx, r,
                            f"player {i} strategy {s_idx}: demand {d} on resource {r} "
                            f"exceeds delta*capacity = {game.delta * cap}",
                        )
                    )
    return out


def infer_delta(game: Game) -> float:
    """Smallest share bound the game's demands satisfy: max of demand over
    capacity.  Helper for imported files that lack a declared bound."""
    best = 0.0
    for strategies in game.players:
        for strat in strategies:
            for r, d in strat.demands.items():
                best = max(best, d / game.resources[r].capacity)
    return best


class ProfileState:
    """Mutable cursor over profiles of one game, for hot loops.

    Keeps per-resource demand totals up to date so that the utility of any
    unilateral deviation costs O(nnz of the strategy) instead of a full
    recomputation.  Dynamics and brute-force enumeration both run on top of
    this; the pure functions above remain the reference semantics.
    """

    __slots__ = ("game", "choices", "totals", "_caps", "_demands")

    def __init__(self, game: Game, profile: Sequence[int]):
        self.game = game
        self.choices = list(validate_profile(game, profile))
        self.totals = total_demands(game, self.choices)
        self._caps = list(game.capacities)
        # demand dicts indexed [player][strategy] to skip attribute hops
        self._demands = [[s.demands for s in ss] for ss in game.players]

    def profile(self) -> Profile:
        return tuple(self.choices)

    def move(self, player: int, new_strategy: int) -> None:
        """Switch one player's strategy, updating the totals in place."""
        old = self._demands[player][self.choices[player]]
        new = self._demands[player][new_strategy]
        totals = self.totals
        for r, d in old.items():
            totals[r] -= d
        for r, d in new.items():
            totals[r] += d
        self.choices[player] = new_strategy

    def strategy_utility(self, player: int, strategy: int) -> float:
        """Utility the player would get from `strategy`, others unchanged."""
        cur = self._demands[player][self.choices[player]]
        totals = self.totals
        caps = self._caps
        u = 0.0
        for r, d in self._demands[player][strategy].items():
            t = totals[r] - cur.get(r, 0.0) + d
            b = caps[r]
            u += d if t <= b else b * d / t
        return u

    def utility(self, player: int) -> float:
        return self.strategy_utility(player, self.choices[player])

    def welfare(self) -> float:
        return sum(self.utility(i) for i in range(self.game.n_players))

    def potential_total(self) -> float:
        totals = self.totals
        caps = self._caps
        out = 0.0
        for r in range(len(totals)):
            t = totals[r]
            b = caps[r]
            out += t if t <= b else b + b * math.log(t / b)
        return out
