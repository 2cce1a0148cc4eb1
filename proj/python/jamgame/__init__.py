"""Repeated jammer/eNodeB game with one-sided information."""

from ._core import (
    DataError,
    Game,
    SolverError,
    approx_security_level,
    belief_update,
    bundled_game,
    default_cell_config,
    expected_policy,
    gen_payoffs,
    load_game,
    load_game_file,
    play_match,
    regret_update,
    solve_informed,
    solve_matrix_game,
    solve_uninformed,
    sweep_prior,
)

__all__ = [
    "DataError",
    "Game",
    "SolverError",
    "approx_security_level",
    "belief_update",
    "bundled_game",
    "default_cell_config",
    "expected_policy",
    "gen_payoffs",
    "load_game",
    "load_game_file",
    "play_match",
    "regret_update",
    "solve_informed",
    "solve_matrix_game",
    "solve_uninformed",
    "sweep_prior",
]
