"""Game file serialization (JSON) and report emission.

The game file schema is versioned and sparse: demands are keyed by resource
id strings.  Floats round-trip bit-identically because Python emits the
shortest decimal that reparses to the same double.
"""

from __future__ import annotations

import json
from typing import Any

from .analysis import AnalysisReport
from .constructions import X3CInstance
from .model import Game, Resource, Strategy, validate

SCHEMA_VERSION = 1


class GameFileError(ValueError):
    """Malformed or invalid game file; carries the violation messages."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []


def game_to_dict(game: Game) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "delta": game.delta,
        "resources": [
            {"id": r.id, "capacity": r.capacity} for r in game.resources
        ],
        "players": [
            {
                "strategies": [
                    {"demands": {str(r): d for r, d in s.demands.items()}}
                    for s in strategies
                ]
            }
            for strategies in game.players
        ],
    }


def game_from_dict(data: dict[str, Any], check: bool = True) -> Game:
    try:
        version = data["schema_version"]
        if version != SCHEMA_VERSION:
            raise GameFileError(f"unsupported schema_version {version}")
        delta = float(data["delta"])
        resources = tuple(
            Resource(int(r["id"]), float(r["capacity"])) for r in data["resources"]
        )
        players = tuple(
            tuple(
                Strategy({int(r): float(d) for r, d in s["demands"].items()})
                for s in p["strategies"]
            )
            for p in data["players"]
        )
    except GameFileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise GameFileError(f"malformed game file: {exc}") from exc
    game = Game(resources, players, delta)
    if check:
        violations = validate(game)
        if violations:
            raise GameFileError(
                f"game file fails validation with {len(violations)} violation(s)",
                [str(v) for v in violations],
            )
    return game


def save_game(game: Game, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(game_to_dict(game), fp, indent=2)
        fp.write("\n")


def load_game(path: str, check: bool = True) -> Game:
    with open(path, "r", encoding="utf-8") as fp:
        try:
            data = json.load(fp)
        except json.JSONDecodeError as exc:
            raise GameFileError(f"not valid JSON: {exc}") from exc
    return game_from_dict(data, check=check)


def x3c_to_dict(instance: X3CInstance) -> dict[str, Any]:
    return {"m": instance.m, "subsets": [list(s) for s in instance.subsets]}


def x3c_from_dict(data: dict[str, Any]) -> X3CInstance:
    try:
        return X3CInstance.create(int(data["m"]), data["subsets"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GameFileError(f"malformed cover-instance file: {exc}") from exc


def load_x3c(path: str) -> X3CInstance:
    with open(path, "r", encoding="utf-8") as fp:
        try:
            data = json.load(fp)
        except json.JSONDecodeError as exc:
            raise GameFileError(f"not valid JSON: {exc}") from exc
    return x3c_from_dict(data)


def report_to_dict(report: AnalysisReport) -> dict[str, Any]:
    """JSON-ready analysis report; per-factor maps are keyed by the factor's
    shortest decimal representation."""
    return {
        "profile_count": report.profile_count,
        "opt_profile": list(report.opt_profile),
        "opt_welfare": report.opt_welfare,
        "min_alpha": report.min_alpha if report.min_alpha != float("inf") else "inf",
        "min_alpha_profile": list(report.min_alpha_profile),
        "worst_ne_welfare": {repr(a): w for a, w in report.worst_ne_welfare.items()},
        "poa": {repr(a): v for a, v in report.poa.items()},
    }
