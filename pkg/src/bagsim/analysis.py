"""Brute-force oracles: equilibrium checks, exhaustive enumeration, price of
anarchy, and the welfare/potential inequalities.

Enumeration walks profiles in lexicographic order over the choice vectors,
so tie-breaking is deterministic and the space splits into contiguous
ranges that could be scanned independently.  The profile count is capped by
a budget (default 10^8, override with the ``BAG_ENUM_BUDGET`` environment
variable); exceeding it raises :class:`EnumerationBudgetError`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple, Optional, Sequence

from .model import Game, Profile, ProfileState, REL_TOL, validate_profile

DEFAULT_ENUM_BUDGET = 10**8
_GUARD = 1e-9


class EnumerationBudgetError(RuntimeError):
    """Profile space larger than the enumeration budget."""

    def __init__(self, required: int, budget: int):
        super().__init__(
            f"profile space has {required} profiles, budget is {budget} "
            "(set BAG_ENUM_BUDGET to raise it)"
        )
        self.required = required
        self.budget = budget


class NoEquilibriumError(RuntimeError):
    """The game has no equilibrium at the requested factor."""

    def __init__(self, alpha: float, min_alpha: float):
        super().__init__(
            f"no equilibrium at factor {alpha}; the smallest sustainable "
            f"factor is {min_alpha}"
        )
        self.alpha = alpha
        self.min_alpha = min_alpha


class MoveWitness(NamedTuple):
    """A strictly improving deviation certifying a non-equilibrium."""

    player: int
    strategy: int
    ratio: float


@dataclass(frozen=True)
class AnalysisReport:
    """Brute-force summary of one game."""

    opt_profile: Profile
    opt_welfare: float
    min_alpha: float
    min_alpha_profile: Profile
    worst_ne_welfare: dict[float, float | None]
    poa: dict[float, float | None]
    profile_count: int


def enumeration_budget() -> int:
    raw = os.environ.get("BAG_ENUM_BUDGET")
    return int(raw) if raw else DEFAULT_ENUM_BUDGET


def _check_budget(game: Game, budget: int | None) -> int:
    count = game.profile_count()
    cap = enumeration_budget() if budget is None else budget
    if count > cap:
        raise EnumerationBudgetError(count, cap)
    return count


def _player_move_ratio(state: ProfileState, player: int) -> tuple[float, int]:
    """Best improvement ratio of one player and the strategy achieving it."""
    cur_u = state.utility(player)
    best_idx, best_u = state.choices[player], cur_u
    for s in range(len(state.game.players[player])):
        if s == state.choices[player]:
            continue
        u = state.strategy_utility(player, s)
        if u > best_u:
            best_idx, best_u = s, u
    if best_idx == state.choices[player]:
        return 1.0, best_idx
    if cur_u <= 0.0:
        return (math.inf, best_idx) if best_u > 0.0 else (1.0, state.choices[player])
    return max(1.0, best_u / cur_u), best_idx


def profile_min_alpha(game: Game, profile: Sequence[int]) -> float:
    """Smallest factor at which the profile is an equilibrium.

    The maximum over players of best-response utility over current utility,
    floored at 1; +inf when some player earns 0 but has a positive option.
    """
    state = ProfileState(game, validate_profile(game, profile))
    worst = 1.0
    for i in range(game.n_players):
        ratio, _ = _player_move_ratio(state, i)
        if ratio > worst:
            worst = ratio
    return worst


def is_alpha_ne(
    game: Game,
    profile: Sequence[int],
    alpha: float,
    epsilon_guard: float = _GUARD,
) -> tuple[bool, Optional[MoveWitness]]:
    """Whether no player can improve by strictly more than factor alpha.

    On failure returns a witness: the lowest violating player, her best
    response and its improvement ratio.
    """
    state = ProfileState(game, validate_profile(game, profile))
    for i in range(game.n_players):
        cur_u = state.utility(i)
        ratio, best_idx = _player_move_ratio(state, i)
        if cur_u <= 0.0:
            violated = math.isinf(ratio) and not math.isinf(alpha)
        else:
            violated = ratio > alpha * (1.0 + epsilon_guard)
        if violated:
            return False, MoveWitness(i, best_idx, ratio)
    return True, None


def iter_profiles(game: Game) -> Iterator[Profile]:
    """All profiles in lexicographic order over the choice vectors."""
    counts = game.strategy_counts()
    choices = [0] * game.n_players
    while True:
        yield tuple(choices)
        i = game.n_players - 1
        while i >= 0:
            choices[i] += 1
            if choices[i] < counts[i]:
                break
            choices[i] = 0
            i -= 1
        if i < 0:
            return


def _scan(game: Game, visit: Callable[[Profile, ProfileState], None]) -> None:
    """Visit every profile lexicographically, keeping totals incremental."""
    counts = game.strategy_counts()
    n = game.n_players
    state = ProfileState(game, (0,) * n)
    while True:
        visit(tuple(state.choices), state)
        i = n - 1
        while i >= 0:
            nxt = state.choices[i] + 1
            if nxt < counts[i]:
                state.move(i, nxt)
                break
            state.move(i, 0)
            i -= 1
        if i < 0:
            return


def brute_force_opt(game: Game, budget: int | None = None) -> tuple[Profile, float]:
    """Welfare-maximising profile; ties break to the lexicographically first."""
    _check_budget(game, budget)
    best: list = [None, -math.inf]

    def visit(profile: Profile, state: ProfileState) -> None:
        w = state.welfare()
        if w > best[1]:
            best[0], best[1] = profile, w

    _scan(game, visit)
    return best[0], best[1]


def brute_force_min_alpha(game: Game, budget: int | None = None) -> tuple[float, Profile]:
    """Smallest factor at which some profile is an equilibrium, with the
    lexicographically first profile achieving it.

    Below the returned value the game provably has no equilibrium; at or
    above it, the returned profile is one.
    """
    _check_budget(game, budget)
    best: list = [math.inf, None]

    def visit(profile: Profile, state: ProfileState) -> None:
        worst = 1.0
        for i in range(game.n_players):
            ratio, _ = _player_move_ratio(state, i)
            if ratio > worst:
                worst = ratio
                if worst >= best[0]:
                    return
        if worst < best[0]:
            best[0], best[1] = worst, profile

    _scan(game, visit)
    return best[0], best[1]


def full_report(
    game: Game, alphas: Sequence[float], budget: int | None = None
) -> AnalysisReport:
    """Optimum, smallest sustainable factor, and per-factor worst stable
    welfare / price of anarchy, all from a single enumeration pass."""
    count = _check_budget(game, budget)
    alphas = list(alphas)
    opt: list = [None, -math.inf]
    min_alpha: list = [math.inf, None]
    worst: dict[float, float] = {}

    def visit(profile: Profile, state: ProfileState) -> None:
        w = state.welfare()
        if w > opt[1]:
            opt[0], opt[1] = profile, w
        pma = 1.0
        for i in range(game.n_players):
            ratio, _ = _player_move_ratio(state, i)
            if ratio > pma:
                pma = ratio
        if pma < min_alpha[0]:
            min_alpha[0], min_alpha[1] = pma, profile
        for a in alphas:
            if pma <= a * (1.0 + _GUARD) and w < worst.get(a, math.inf):
                worst[a] = w

    _scan(game, visit)
    worst_out: dict[float, float | None] = {a: worst.get(a) for a in alphas}
    poa: dict[float, float | None] = {
        a: (opt[1] / w if w is not None and w > 0 else None)
        for a, w in worst_out.items()
    }
    return AnalysisReport(
        opt_profile=opt[0],
        opt_welfare=opt[1],
        min_alpha=min_alpha[0],
        min_alpha_profile=min_alpha[1],
        worst_ne_welfare=worst_out,
        poa=poa,
        profile_count=count,
    )


def price_of_anarchy(game: Game, alpha: float, budget: int | None = None) -> float:
    """Optimal welfare over the worst equilibrium welfare at factor alpha.

    Raises :class:`NoEquilibriumError` (carrying the certifying smallest
    sustainable factor) when no equilibrium exists at alpha.
    """
    report = full_report(game, [alpha], budget)
    worst = report.worst_ne_welfare[alpha]
    if worst is None:
        raise NoEquilibriumError(alpha, report.min_alpha)
    return report.opt_welfare / worst


def niceness_check(
    game: Game,
    profile: Sequence[int],
    lam: float,
    mu: float,
    opt_welfare: float | None = None,
    budget: int | None = None,
) -> tuple[bool, float]:
    """Check sum_i u_i(best response) >= lam*u(opt) - mu*u(s); returns
    (holds, slack).  Pass opt_welfare to reuse a known optimum."""
    state = ProfileState(game, validate_profile(game, profile))
    if opt_welfare is None:
        _, opt_welfare = brute_force_opt(game, budget)
    br_sum = 0.0
    for i in range(game.n_players):
        best = state.utility(i)
        for s in range(len(game.players[i])):
            u = state.strategy_utility(i, s)
            if u > best:
                best = u
        br_sum += best
    slack = br_sum - (lam * opt_welfare - mu * state.welfare())
    return slack >= -REL_TOL * max(1.0, abs(br_sum)), slack


def u_opt_per_player(game: Game) -> list[float]:
    """Per player, the best capacity-clipped demand sum over her strategies."""
    caps = game.capacities
    return [
        max(s.clipped_total(caps) for s in strategies)
        for strategies in game.players
    ]


def prune_weak_strategies(game: Game) -> tuple[Game, list[list[int]]]:
    """Drop strategies whose clipped demand sum is below a player's best
    achievable utility divided by n*delta.

    Such strategies are never worth playing (the best strategy beats them
    at every profile), and the per-player utility floor only holds without
    them.  Returns the pruned game and, per player, the kept original
    indices.
    """
    n_delta = game.n_players * game.delta
    u_opt = u_opt_per_player(game)
    caps = game.capacities
    kept: list[list[int]] = []
    players = []
    for i, strategies in enumerate(game.players):
        threshold = u_opt[i] / n_delta
        keep = [
            s_idx
            for s_idx, s in enumerate(strategies)
            if s.clipped_total(caps) >= threshold * (1.0 - REL_TOL)
        ]
        kept.append(keep)
        players.append(tuple(strategies[s_idx] for s_idx in keep))
    return Game(game.resources, tuple(players), game.delta), kept


@dataclass(frozen=True)
class LemmaBoundsReport:
    """Margins of the per-player utility floor and the potential sandwich.

    All margins are nonnegative when the inequalities hold:

    * ``floor_margins[i]``: u_i(s) - u_i_opt / (n*delta)^2
    * ``sandwich_lower``: phi(s) - u(s)
    * ``sandwich_upper``: (1 + ln(n*delta)) * u(s) - phi(s)
    """

    status: str
    reason: str | None
    u_opt: tuple[float, ...]
    floor_margins: tuple[float, ...]
    sandwich_lower: float
    sandwich_upper: float

    @property
    def ok(self) -> bool:
        if self.status != "ok":
            return False
        tol = REL_TOL * max(1.0, abs(self.sandwich_upper))
        return (
            all(m >= -REL_TOL for m in self.floor_margins)
            and self.sandwich_lower >= -tol
            and self.sandwich_upper >= -tol
        )


def lemma_bounds_check(game: Game, profile: Sequence[int]) -> LemmaBoundsReport:
    """Check the utility floor u_i >= u_i_opt/(n*delta)^2 and the potential
    sandwich u <= phi <= (1 + ln(n*delta)) * u at one profile.

    Requires n*delta >= 1 and that no player is sitting on a strategy the
    pruning rule would drop; otherwise the report is skipped with a reason.
    """
    prof = validate_profile(game, profile)
    n_delta = game.n_players * game.delta
    if n_delta < 1.0:
        return LemmaBoundsReport(
            "skipped", f"requires n*delta >= 1, got {n_delta}", (), (), 0.0, 0.0
        )
    u_opt = u_opt_per_player(game)
    caps = game.capacities
    for i, c in enumerate(prof):
        clipped = game.players[i][c].clipped_total(caps)
        if clipped < (u_opt[i] / n_delta) * (1.0 - REL_TOL):
            return LemmaBoundsReport(
                "skipped",
                f"player {i} plays a strategy below her pruning threshold",
                tuple(u_opt), (), 0.0, 0.0,
            )
    state = ProfileState(game, prof)
    floor = tuple(
        state.utility(i) - u_opt[i] / (n_delta * n_delta)
        for i in range(game.n_players)
    )
    welfare = state.welfare()
    phi = state.potential_total()
    return LemmaBoundsReport(
        "ok",
        None,
        tuple(u_opt),
        floor,
        phi - welfare,
        (1.0 + math.log(n_delta)) * welfare - phi,
    )
