"""Improvement dynamics: players move while a move beats alpha times their
current utility.

A move always targets the mover's best response.  The scheduler decides who
moves next: ``round-robin`` cycles through the players, ``max-gain`` picks
the player whose best response exceeds alpha times her current utility by
the largest margin, ``random`` draws uniformly among the players currently
holding a move (seeded, reproducible).  A run records a :class:`Trace` and
ends either in an equilibrium (nobody holds a move) or when the step budget
is exhausted.

Runs are strictly sequential; parallelism belongs one level up, across
seeds or games sharing the immutable :class:`~bagsim.model.Game`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence

from .model import Game, Profile, ProfileState, validate_profile
from .rng import Xoshiro256StarStar

SCHEDULERS = ("round-robin", "max-gain", "random")

#: Full per-step records are kept up to this many steps; afterwards the
#: trace spills to sparse summary records to bound memory.
FULL_TRACE_LIMIT = 1_000_000
SUMMARY_EVERY = 1_000

TERMINAL_EQUILIBRIUM = "equilibrium"
TERMINAL_BUDGET = "step-budget-exhausted"


@dataclass(frozen=True)
class DynamicsConfig:
    """Parameters of one dynamics run.

    ``epsilon_guard`` is relative slack on the strict improvement test: a
    move requires new > alpha * old * (1 + epsilon_guard), which keeps
    float noise at the threshold from producing phantom moves.
    """

    alpha: float
    scheduler: str = "round-robin"
    seed: int = 0
    max_steps: int = 10_000
    epsilon_guard: float = 1e-9

    def __post_init__(self) -> None:
        if self.alpha < 1.0:
            raise ValueError(f"alpha must be at least 1, got {self.alpha}")
        if self.scheduler not in SCHEDULERS:
            raise ValueError(
                f"scheduler must be one of {SCHEDULERS}, got {self.scheduler!r}"
            )
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be positive, got {self.max_steps}")
        if self.epsilon_guard < 0:
            raise ValueError("epsilon_guard must be nonnegative")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class TraceStep:
    step: int
    player: int
    old_strategy: int
    new_strategy: int
    old_utility: float
    new_utility: float
    ratio: float
    potential_before: float
    potential_after: float
    welfare: float


@dataclass(frozen=True)
class SummaryRecord:
    step: int
    potential: float
    welfare: float


@dataclass
class Trace:
    """Ordered record of the moves of one run."""

    steps: list[TraceStep] = field(default_factory=list)
    summary: list[SummaryRecord] = field(default_factory=list)
    truncated: bool = False
    terminal: str = TERMINAL_BUDGET
    final_profile: Profile = ()
    step_count: int = 0


def _improves(new: float, old: float, alpha: float, guard: float) -> bool:
    if old <= 0.0:
        return new > 0.0
    return new > alpha * old * (1.0 + guard)


def _ratio(new: float, old: float) -> float:
    if old <= 0.0:
        return math.inf if new > 0.0 else 1.0
    return new / old


def _best_response(state: ProfileState, player: int) -> tuple[int, float]:
    best_idx = 0
    best_u = state.strategy_utility(player, 0)
    for s in range(1, len(state.game.players[player])):
        u = state.strategy_utility(player, s)
        if u > best_u:
            best_idx, best_u = s, u
    return best_idx, best_u


def _alpha_move(
    state: ProfileState, player: int, alpha: float, guard: float
) -> Optional[tuple[int, float, float, float]]:
    """(strategy, ratio, old_utility, new_utility) of the player's move, if any."""
    old_u = state.utility(player)
    best_idx, best_u = _best_response(state, player)
    if best_idx == state.choices[player]:
        return None
    if not _improves(best_u, old_u, alpha, guard):
        return None
    return best_idx, _ratio(best_u, old_u), old_u, best_u


def best_response(game: Game, profile: Sequence[int], player: int) -> tuple[int, float]:
    """Best strategy of the player against the others, with its utility.

    Ties break toward the lowest strategy index.
    """
    state = ProfileState(game, profile)
    if not 0 <= player < game.n_players:
        raise IndexError(f"player index {player} out of range")
    return _best_response(state, player)


def find_alpha_move(
    game: Game,
    profile: Sequence[int],
    player: int,
    alpha: float,
    epsilon_guard: float = 1e-9,
) -> Optional[tuple[int, float]]:
    """The player's improving move at factor alpha, if she has one.

    Returns (strategy index, improvement ratio) for the best response when
    its utility strictly exceeds alpha times the current one (beyond the
    relative guard); the ratio is +inf when the current utility is 0 and
    the best response is positive.  Returns None otherwise.
    """
    state = ProfileState(game, profile)
    if not 0 <= player < game.n_players:
        raise IndexError(f"player index {player} out of range")
    move = _alpha_move(state, player, alpha, epsilon_guard)
    if move is None:
        return None
    return move[0], move[1]


def _max_gain_player(
    state: ProfileState, alpha: float, guard: float
) -> Optional[tuple[int, tuple[int, float, float, float]]]:
    best: Optional[tuple[int, tuple[int, float, float, float]]] = None
    best_gain = -math.inf
    for i in range(state.game.n_players):
        move = _alpha_move(state, i, alpha, guard)
        if move is None:
            continue
        gain = move[3] - alpha * move[2]
        if gain > best_gain:
            best, best_gain = (i, move), gain
    return best


def max_gain_scheduler(
    game: Game, profile: Sequence[int], config: DynamicsConfig
) -> Optional[int]:
    """Player with the largest best-response gain beyond factor alpha.

    The gain term is u_i(best response) - alpha * u_i(current); only players
    actually holding a move at factor alpha are considered, ties break
    toward the lowest player index.  None when nobody holds a move.
    """
    state = ProfileState(game, validate_profile(game, profile))
    found = _max_gain_player(state, config.alpha, config.epsilon_guard)
    return None if found is None else found[0]


def run_dynamics(game: Game, initial: Sequence[int], config: DynamicsConfig) -> Trace:
    """Run improvement dynamics from a profile until equilibrium or budget.

    Deterministic in (game, initial, config): the random scheduler draws
    from a generator seeded with config.seed only.
    """
    state = ProfileState(game, validate_profile(game, initial))
    n = game.n_players
    guard = config.epsilon_guard
    rng = Xoshiro256StarStar(config.seed) if config.scheduler == "random" else None
    trace = Trace()
    rr_next = 0
    potential = state.potential_total()

    for step in range(config.max_steps):
        picked: Optional[tuple[int, tuple[int, float, float, float]]] = None
        if config.scheduler == "round-robin":
            for off in range(n):
                i = (rr_next + off) % n
                move = _alpha_move(state, i, config.alpha, guard)
                if move is not None:
                    picked = (i, move)
                    break
        elif config.scheduler == "max-gain":
            picked = _max_gain_player(state, config.alpha, guard)
        else:
            movers = []
            for i in range(n):
                move = _alpha_move(state, i, config.alpha, guard)
                if move is not None:
                    movers.append((i, move))
            if movers:
                picked = movers[rng.randrange(len(movers))]

        if picked is None:
            trace.terminal = TERMINAL_EQUILIBRIUM
            trace.final_profile = state.profile()
            return trace

        player, (new_strategy, ratio, old_u, new_u) = picked
        old_strategy = state.choices[player]
        state.move(player, new_strategy)
        new_potential = state.potential_total()
        if config.scheduler == "round-robin":
            rr_next = (player + 1) % n

        trace.step_count += 1
        if len(trace.steps) < FULL_TRACE_LIMIT:
            trace.steps.append(
                TraceStep(
                    step, player, old_strategy, new_strategy,
                    old_u, new_u, ratio, potential, new_potential,
                    state.welfare(),
                )
            )
        else:
            trace.truncated = True
            if step % SUMMARY_EVERY == 0:
                trace.summary.append(
                    SummaryRecord(step, new_potential, state.welfare())
                )
        potential = new_potential

    trace.terminal = TERMINAL_BUDGET
    trace.final_profile = state.profile()
    return trace


TRACE_COLUMNS = (
    "step", "player", "old_strategy", "new_strategy", "old_utility",
    "new_utility", "ratio", "potential_before", "potential_after", "welfare",
)


def write_trace_csv(trace: Trace, fp: IO[str]) -> None:
    """Write the full per-step records as CSV (floats as shortest repr)."""
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for s in trace.steps:
        writer.writerow(
            [
                s.step, s.player, s.old_strategy, s.new_strategy,
                repr(s.old_utility), repr(s.new_utility), repr(s.ratio),
                repr(s.potential_before), repr(s.potential_after),
                repr(s.welfare),
            ]
        )
