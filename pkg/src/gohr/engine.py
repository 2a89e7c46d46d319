"""Episode lifecycle: board setup, move adjudication, status codes, rewards.

Response codes follow the game convention: 0 accepts a move, 4 denies a
move on a piece that could legally go elsewhere, 7 flags a piece that
currently cannot go anywhere. Accepted moves earn reward 0, rejected ones
reward -1. finish_code is 0 while the episode runs, 1 once the board is
cleared, 2 when the move cap is hit with pieces remaining.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .board import (
    ALL_CELLS,
    COLORS,
    SHAPES,
    WHITE_CELLS,
    AddressingError,
    BoardState,
    ConfigError,
    EpisodeFinishedError,
    Piece,
    board_wire,
    position_coords,
)
from .rules import clauses as _cl
from .rules import oracle as _oracle
from .rules.clauses import RuleSpec, RuleState

RESPONSE_ACCEPT = 0
RESPONSE_DENY = 4
RESPONSE_IMMOVABLE = 7
CODE_LETTER = {RESPONSE_ACCEPT: "A", RESPONSE_DENY: "D", RESPONSE_IMMOVABLE: "I"}

FINISH_ONGOING = 0
FINISH_COMPLETED = 1
FINISH_FAILED = 2

DEFAULT_MOVE_CAP = 300


@dataclass(frozen=True)
class PositionSet:
    """Cells where pieces may be placed at episode start."""

    mode: str = "all"  # "train" | "test" | "all"

    def __post_init__(self):
        if self.mode not in ("train", "test", "all"):
            raise ConfigError(f"unknown position mode: {self.mode}")

    @property
    def cells(self) -> frozenset:
        return WHITE_CELLS if self.mode == "train" else ALL_CELLS


@dataclass(frozen=True)
class MoveOutcome:
    response_code: int
    reward: int
    finish_code: int
    move_count: int

    @property
    def letter(self) -> str:
        return CODE_LETTER[self.response_code]


@dataclass
class Episode:
    rule: RuleSpec
    rule_state: RuleState
    board: BoardState
    move_count: int
    move_cap: int
    rng_seed: int
    position_set: PositionSet
    finish_code: int = FINISH_ONGOING
    collect_log: bool = False
    move_log: list = field(default_factory=list)

    @property
    def ongoing(self) -> bool:
        return self.finish_code == FINISH_ONGOING


def new_episode(
    rule: RuleSpec,
    n: int = 9,
    seed: int = 0,
    position_set: PositionSet | str = "all",
    move_cap: int = DEFAULT_MOVE_CAP,
    collect_log: bool = False,
) -> Episode:
    """Place n pieces with i.i.d. random color/shape on distinct allowed cells."""
    if isinstance(position_set, str):
        position_set = PositionSet(position_set)
    cells = sorted(position_set.cells)
    if n > len(cells):
        raise ConfigError(f"cannot place {n} pieces on {len(cells)} allowed cells")
    rng = random.Random(seed)
    while True:
        chosen = rng.sample(cells, n)
        # Test mode must show at least one position outside the training set.
        if position_set.mode != "test" or any(c not in WHITE_CELLS for c in chosen):
            break
    pieces = []
    for i, cell in enumerate(chosen):
        col, row = position_coords(cell)
        pieces.append(Piece(i + 1, rng.choice(COLORS), rng.choice(SHAPES), col, row))
    return Episode(
        rule=rule,
        rule_state=_cl.initial_state(rule),
        board=BoardState(pieces),
        move_count=0,
        move_cap=move_cap,
        rng_seed=seed,
        position_set=position_set,
        collect_log=collect_log,
    )


def attempt_move(episode: Episode, piece_id: int, bucket: int) -> MoveOutcome:
    """Adjudicate one move against the active rule and advance the episode."""
    if not episode.ongoing:
        raise EpisodeFinishedError(f"episode already finished (code {episode.finish_code})")
    if bucket not in (0, 1, 2, 3):
        raise ConfigError(f"bucket out of range: {bucket}")
    piece = episode.board.piece(piece_id)
    if piece is None:
        raise AddressingError(f"piece {piece_id} is not on the board")

    verdicts = (
        _cl.clause_verdicts(episode.rule, episode.rule_state, episode.board, piece, bucket)
        if episode.collect_log
        else None
    )
    ok, new_state = _cl.accepts(episode.rule, episode.rule_state, episode.board, piece, bucket)
    episode.move_count += 1
    if ok:
        episode.board.remove(piece_id, bucket, episode.move_count)
        episode.rule_state = new_state
        code, reward = RESPONSE_ACCEPT, 0
    elif _cl.movable(episode.rule, episode.rule_state, episode.board, piece):
        code, reward = RESPONSE_DENY, -1
    else:
        code, reward = RESPONSE_IMMOVABLE, -1

    if episode.board.is_empty:
        episode.finish_code = FINISH_COMPLETED
    elif episode.move_count >= episode.move_cap:
        episode.finish_code = FINISH_FAILED
    outcome = MoveOutcome(code, reward, episode.finish_code, episode.move_count)
    if episode.collect_log:
        episode.move_log.append(
            {
                "move": episode.move_count,
                "piece": piece_id,
                "bucket": bucket,
                "code": outcome.letter,
                "verdicts": verdicts,
            }
        )
    return outcome


def legal_moves(episode: Episode) -> set:
    """All (piece_id, bucket) pairs the rule would accept right now.

    Evaluated by the hand-written per-rule oracle, independently of the
    clause machinery behind attempt_move; ad-hoc composed rules without an
    oracle entry fall back to clause enumeration. Does not mutate state.
    """
    if not episode.ongoing and episode.board.is_empty:
        return set()
    if _oracle.covers(episode.rule.name):
        return _oracle.oracle_legal_moves(episode.rule, episode.rule_state, episode.board)
    return _cl.clause_legal_moves(episode.rule, episode.rule_state, episode.board)


def board_snapshot(episode: Episode) -> dict:
    return board_wire(episode.board, episode.move_count, episode.finish_code)
