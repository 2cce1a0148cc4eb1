import json
import math

import pytest

import jamgame


def test_bundled_single_shot_values():
    g = jamgame.bundled_game()
    assert g.states[0].lower() == "cheater"
    cheater = jamgame.solve_matrix_game(g.payoff[0])
    assert cheater["value"] == pytest.approx(-2.0553, abs=1e-4)
    assert cheater["row_mix"][2] == pytest.approx(1.0)
    saboteur = jamgame.solve_matrix_game(g.payoff[1])
    assert saboteur["value"] == pytest.approx(-0.9887, abs=1e-4)


def test_game_json_round_trip():
    g = jamgame.bundled_game()
    h = jamgame.load_game(g.to_json())
    assert h.payoff == g.payoff
    assert h.prior == g.prior
    with pytest.raises(jamgame.DataError):
        jamgame.load_game("{")


def test_informed_one_stage_is_discounted_one_shot():
    g = jamgame.bundled_game()
    one = jamgame.solve_informed(g, [1.0, 0.0], horizon=1)
    assert one["value"] == pytest.approx(0.9 * -2.0553, abs=1e-6)
    assert len(one["policy"]) == 2


def test_belief_update_and_regret():
    belief, off = jamgame.belief_update([0.5, 0.5], [[1.0, 0.0], [0.5, 0.5]], 0)
    assert not off
    assert belief[0] == pytest.approx(2 / 3)
    g = jamgame.bundled_game()
    w = jamgame.regret_update(g, [0.0, 0.0], 2, [0.0, 0.0, 1.0, 0.0, 0.0], 0.9)
    assert w[0] == pytest.approx(0.9 * g.payoff[0][2][2] / 0.1)


def test_expected_policy_is_convex_combination():
    g = jamgame.bundled_game()
    y = jamgame.expected_policy(g, [0.3, 0.7])
    y1 = jamgame.solve_matrix_game(g.payoff[0])["col_mix"]
    y2 = jamgame.solve_matrix_game(g.payoff[1])["col_mix"]
    for b in range(5):
        assert y[b] == pytest.approx(0.3 * y1[b] + 0.7 * y2[b], abs=1e-12)


def test_play_match_is_deterministic():
    g = jamgame.bundled_game()
    a = jamgame.play_match(g, state=1, seed=4, stages=5)
    b = jamgame.play_match(g, state=1, seed=4, stages=5)
    assert a["csv"] == b["csv"]
    assert len(a["stages"]) == 5
    assert a["csv"].splitlines()[0].startswith("t,a_j,a_0")
    assert math.isclose(sum(a["stages"][0]["enb_policy"]), 1.0, abs_tol=1e-9)
    with pytest.raises(jamgame.DataError):
        jamgame.play_match(g, state=5, seed=1)


def test_sweep_rows_follow_grid():
    g = jamgame.bundled_game()
    rows = jamgame.sweep_prior(g, state=0, seed=1, grid=[0.2, 0.8], stages=4, window=2)
    assert [r["prior"][0] for r in rows] == pytest.approx([0.2, 0.8])


def test_gen_payoffs_small_run():
    game, se = jamgame.gen_payoffs(drops=20, seed=3)
    assert game.payoff[0][0][0] == -1.0
    assert game.payoff[1][0][0] == -1.0
    assert len(se) == 2
    cfg = json.loads(jamgame.default_cell_config())
    assert cfg["drops"] == 1000
