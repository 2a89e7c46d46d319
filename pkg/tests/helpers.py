"""Shared test utilities: random boards, playouts, tiny training configs."""

from __future__ import annotations

import random

from gohr import engine
from gohr.board import COLORS, SHAPES, BoardState, Piece
from gohr.learner.a2c import Hyperparams
from gohr.metrics import MetricParams
from gohr.rules.clauses import RuleState


def random_board(rng: random.Random, n: int | None = None) -> BoardState:
    n = n if n is not None else rng.randint(1, 9)
    cells = rng.sample(range(1, 37), n)
    pieces = [
        Piece(i + 1, rng.choice(COLORS), rng.choice(SHAPES), (c - 1) % 6 + 1, (c - 1) // 6 + 1)
        for i, c in enumerate(cells)
    ]
    return BoardState(pieces)


def random_state(rng: random.Random) -> RuleState:
    return RuleState(
        last_bucket=rng.choice([None, 0, 1, 2, 3]),
        feature_cursor=rng.randrange(4),
        block_feature=None,
    )


def random_playout(spec, seed: int, move_cap: int = 300, mistake_rate: float = 0.0):
    """Play an episode with random legal moves (optionally salted with mistakes).

    Yields (episode, legal_set) before every attempt so callers can assert
    per-state properties.
    """
    rng = random.Random(seed)
    ep = engine.new_episode(spec, n=9, seed=seed, move_cap=move_cap)
    while ep.ongoing:
        legal = engine.legal_moves(ep)
        yield ep, legal
        if not legal:
            return
        if mistake_rate and rng.random() < mistake_rate:
            pid = rng.choice(ep.board.pieces).id
            bucket = rng.randrange(4)
        else:
            pid, bucket = rng.choice(sorted(legal))
        engine.attempt_move(ep, pid, bucket)


def tiny_hp(**kw) -> Hyperparams:
    base = dict(optimizer="adam", lr=1e-3, max_episodes=6)
    base.update(kw)
    return Hyperparams(**base)


def tiny_mp(**kw) -> MetricParams:
    base = dict(w_mean=3, t_mean=0.9, w_max=2, t_max=0.95, w_mstar=3)
    base.update(kw)
    return MetricParams(**base)
