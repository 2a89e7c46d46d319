import random

import pytest

from gohr import engine
from gohr.board import AddressingError, ConfigError, EpisodeFinishedError, WHITE_CELLS
from gohr.rules import clause_legal_moves, registry_names, resolve_rule

from helpers import random_playout


def test_new_episode_counts_and_determinism():
    spec = resolve_rule("quadNearby")
    ep = engine.new_episode(spec, n=9, seed=7)
    cells = {(p.col, p.row) for p in ep.board.pieces}
    assert len(ep.board.pieces) == len(cells) == 9
    assert sorted(p.id for p in ep.board.pieces) == list(range(1, 10))
    twin = engine.new_episode(spec, n=9, seed=7)
    assert [(p.id, p.color, p.shape, p.col, p.row) for p in twin.board.pieces] == [
        (p.id, p.color, p.shape, p.col, p.row) for p in ep.board.pieces
    ]


def test_train_mode_places_on_white_cells_only():
    spec = resolve_rule("ordL1")
    for seed in range(25):
        ep = engine.new_episode(spec, n=9, seed=seed, position_set="train")
        assert all(p.position in WHITE_CELLS for p in ep.board.pieces)


def test_test_mode_leaves_the_training_set():
    spec = resolve_rule("ordL1")
    for seed in range(25):
        ep = engine.new_episode(spec, n=9, seed=seed, position_set="test")
        assert any(p.position not in WHITE_CELLS for p in ep.board.pieces)


def test_new_episode_rejects_oversized_boards():
    with pytest.raises(ConfigError):
        engine.new_episode(resolve_rule("ordL1"), n=19, position_set="train")


def test_attempt_move_codes_and_rewards():
    spec = resolve_rule("quadNearby")
    ep = engine.new_episode(spec, n=9, seed=1)
    piece = ep.board.pieces[0]
    wrong = (piece.quadrant + 2) % 4
    deny = engine.attempt_move(ep, piece.id, wrong)
    assert (deny.response_code, deny.reward) == (4, -1)
    ok = engine.attempt_move(ep, piece.id, piece.quadrant)
    assert (ok.response_code, ok.reward) == (0, 0)
    assert ok.move_count == 2


def test_immovable_vs_deny():
    # Under ordL1 only the reading-first piece can move; the rest are immovable.
    spec = resolve_rule("ordL1")
    ep = engine.new_episode(spec, n=9, seed=2)
    first_id = next(iter(engine.legal_moves(ep)))[0]
    stuck = next(p for p in ep.board.pieces if p.id != first_id)
    out = engine.attempt_move(ep, stuck.id, 0)
    assert out.response_code == 7 and out.reward == -1


def test_addressing_error_distinct_from_codes():
    spec = resolve_rule("quadNearby")
    ep = engine.new_episode(spec, n=3, seed=3)
    with pytest.raises(AddressingError):
        engine.attempt_move(ep, 99, 0)
    pid = ep.board.pieces[0].id
    engine.attempt_move(ep, pid, ep.board.pieces[0].quadrant)
    with pytest.raises(AddressingError):
        engine.attempt_move(ep, pid, 0)  # already removed


def test_episode_completion_and_reward_sum():
    spec = resolve_rule("cm_RBKY")
    rewards = []
    codes = []
    ep = None
    for ep, legal in random_playout(spec, seed=5, mistake_rate=0.3):
        pass
    # replay capturing outcomes
    rng = random.Random(5)
    ep = engine.new_episode(spec, n=9, seed=5)
    while ep.ongoing:
        legal = engine.legal_moves(ep)
        if rng.random() < 0.3:
            pid = rng.choice(ep.board.pieces).id
            bucket = rng.randrange(4)
        else:
            pid, bucket = rng.choice(sorted(legal))
        out = engine.attempt_move(ep, pid, bucket)
        rewards.append(out.reward)
        codes.append(out.letter)
    assert ep.finish_code == engine.FINISH_COMPLETED
    assert ep.board.is_empty
    assert sum(rewards) == -sum(1 for c in codes if c in "DI")


def test_move_cap_sets_failed():
    spec = resolve_rule("quadNearby")
    ep = engine.new_episode(spec, n=9, seed=8, move_cap=4)
    piece = ep.board.pieces[0]
    wrong = (piece.quadrant + 2) % 4
    for _ in range(4):
        out = engine.attempt_move(ep, piece.id, wrong)
    assert out.finish_code == engine.FINISH_FAILED
    assert not ep.ongoing
    with pytest.raises(EpisodeFinishedError):
        engine.attempt_move(ep, piece.id, wrong)


def test_completion_beats_cap_on_final_move():
    spec = resolve_rule("quadNearby")
    ep = engine.new_episode(spec, n=1, seed=9, move_cap=1)
    piece = ep.board.pieces[0]
    out = engine.attempt_move(ep, piece.id, piece.quadrant)
    assert out.finish_code == engine.FINISH_COMPLETED


def test_legal_moves_empty_after_completion():
    spec = resolve_rule("quadNearby")
    ep = engine.new_episode(spec, n=1, seed=10)
    piece = ep.board.pieces[0]
    engine.attempt_move(ep, piece.id, piece.quadrant)
    assert engine.legal_moves(ep) == set()


def test_legal_moves_examples():
    # ordL1: exactly 4 pairs sharing one piece
    ep = engine.new_episode(resolve_rule("ordL1"), n=9, seed=11)
    legal = engine.legal_moves(ep)
    assert len(legal) == 4 and len({pid for pid, _ in legal}) == 1
    # cm_RBKY fresh board: one pair per piece
    ep2 = engine.new_episode(resolve_rule("cm_RBKY"), n=9, seed=12)
    legal2 = engine.legal_moves(ep2)
    assert len(legal2) == 9 and len({pid for pid, _ in legal2}) == 9


def test_dual_path_agreement_fuzz():
    """attempt_move's evaluation and legal_moves agree at every fuzzed state."""
    rng = random.Random(0)
    states_checked = 0
    for name in registry_names():
        spec = resolve_rule(name)
        for seed in range(6):
            for ep, legal in random_playout(spec, seed=seed * 31 + 7, mistake_rate=0.25):
                assert legal == clause_legal_moves(spec, ep.rule_state, ep.board), name
                states_checked += 1
    assert states_checked > 500


def test_no_deadlock_smoke():
    for name in registry_names():
        spec = resolve_rule(name)
        for seed in range(10):
            for ep, legal in random_playout(spec, seed=seed):
                assert legal, f"{name} deadlocked with {len(ep.board.pieces)} pieces"


def test_board_integrity_through_playouts():
    # |pieces| + |removed| stays n; no two on-board pieces share a cell
    spec = resolve_rule("col1OrdBuck_BRKY0213")
    for ep, legal in random_playout(spec, seed=13, mistake_rate=0.3):
        assert len(ep.board.pieces) + len(ep.board.removed) == 9
        cells = {(p.col, p.row) for p in ep.board.pieces}
        assert len(cells) == len(ep.board.pieces)


def test_collect_log_records_verdicts():
    spec = resolve_rule("cw_qn2")
    ep = engine.new_episode(spec, n=9, seed=4, collect_log=True)
    legal = engine.legal_moves(ep)
    pid, bucket = sorted(legal)[0]
    engine.attempt_move(ep, pid, bucket)
    rec = ep.move_log[0]
    assert rec["code"] == "A"
    assert rec["verdicts"]["Quadrant_to_bucket_mapping"] == "ok"
    assert rec["verdicts"]["Bucket_ordering"] == "ok"
