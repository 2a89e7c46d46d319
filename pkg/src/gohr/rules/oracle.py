"""Independent legal-move oracle: one hand-written evaluator per rule.

This is the second of the two adjudication paths. ``engine.attempt_move``
judges moves through the clause machinery in ``clauses.py``; this module
re-derives the full legal set for each named rule directly from its
description, with its own geometry helpers, so the two paths can be checked
against each other. Keep it free of imports from ``clauses`` evaluation
logic (RuleState is shared as a plain data carrier only).
"""

from __future__ import annotations

from ..board import BoardState
from .clauses import RuleState, RuleSpec

_ANCHOR = ((0.0, 7.0), (7.0, 7.0), (7.0, 0.0), (0.0, 0.0))

_CM = {"red": 0, "blue": 1, "black": 2, "yellow": 3}
_SM = {"circle": 0, "star": 1, "square": 2, "triangle": 3}
_BRKY = ("blue", "red", "black", "yellow")
_KRBY = ("black", "red", "blue", "yellow")
_QCTS = ("square", "circle", "triangle", "star")


def _dist2(piece, bucket):
    ax, ay = _ANCHOR[bucket]
    return (piece.col - ax) ** 2 + (piece.row - ay) ** 2


def _quadrant(piece):
    if piece.row >= 4:
        return 0 if piece.col <= 3 else 1
    return 3 if piece.col <= 3 else 2


def _reading_first(pieces, reverse=False):
    best = None
    for p in pieces:
        key = (p.row, -p.col) if reverse else (-p.row, p.col)
        if best is None or key < best[0]:
            best = (key, p)
    return best[1]


def _cycle_current(order, cursor, board, kind):
    """First entry at or after the cursor whose feature is on the board."""
    n = len(order)
    for k in range(n):
        feat = order[(cursor + k) % n]
        if any(getattr(p, kind) == feat for p in board.pieces):
            return feat
    return None


def _all_buckets(pieces):
    return {(p.id, b) for p in pieces for b in range(4)}


def _feature_map(board, kind, mapping):
    return {(p.id, mapping[getattr(p, kind)]) for p in board.pieces}


def _all_of(board, kind, order):
    for feat in order:
        due = [p for p in board.pieces if getattr(p, kind) == feat]
        if due:
            return _all_buckets(due)
    return set()


def _one_per_feature(board, kind, order, cursor, buckets=None, within_reading=False):
    feat = _cycle_current(order, cursor, board, kind)
    if feat is None:
        return set()
    due = [p for p in board.pieces if getattr(p, kind) == feat]
    if within_reading:
        due = [_reading_first(due)]
    if buckets is None:
        return _all_buckets(due)
    target = buckets[order.index(feat)]
    return {(p.id, target) for p in due}


def _seq_expected(state, direction, start):
    step = 1 if direction == "cw" else -1
    if state.last_bucket is None:
        return list(range(4)) if start is None else [(start + k * step) % 4 for k in range(4)]
    return [(state.last_bucket + (k + 1) * step) % 4 for k in range(4)]


def _bucket_seq(board, state, direction, start=None):
    if state.last_bucket is None and start is None:
        return _all_buckets(board.pieces)
    b = _seq_expected(state, direction, start)[0]
    return {(p.id, b) for p in board.pieces}


def _seq_with_colors(board, state, mapping):
    """Clockwise bucket walk where each bucket only takes its mapped color."""
    by_bucket = {v: k for k, v in mapping.items()}
    for b in _seq_expected(state, "cw", 0):
        due = [p for p in board.pieces if p.color == by_bucket[b]]
        if due:
            return {(p.id, b) for p in due}
    return set()


def _seq_with_quadrants(board, state):
    for b in _seq_expected(state, "cw", 0):
        due = [p for p in board.pieces if _quadrant(p) == b]
        if due:
            return {(p.id, b) for p in due}
    return set()


def _proximity_set(piece, farthest=False):
    d = [_dist2(piece, b) for b in range(4)]
    lim = max(d) if farthest else min(d)
    return [b for b in range(4) if d[b] == lim]


_FNS = {
    "cm_RBKY": lambda s, b: _feature_map(b, "color", _CM),
    "sm_csqt": lambda s, b: _feature_map(b, "shape", _SM),
    "allOfColOrd_BRKY": lambda s, b: _all_of(b, "color", _BRKY),
    "allOfShaOrd_qcts": lambda s, b: _all_of(b, "shape", _QCTS),
    "col1Ord_BRKY": lambda s, b: _one_per_feature(b, "color", _BRKY, s.feature_cursor),
    "col1Ord_KRBY": lambda s, b: _one_per_feature(b, "color", _KRBY, s.feature_cursor),
    "sha1Ord_qcts": lambda s, b: _one_per_feature(b, "shape", _QCTS, s.feature_cursor),
    "col1OrdBuck_BRKY0213": lambda s, b: _one_per_feature(b, "color", _BRKY, s.feature_cursor, buckets=(0, 2, 1, 3)),
    "sha1OrdBuck_qcts0213": lambda s, b: _one_per_feature(b, "shape", _QCTS, s.feature_cursor, buckets=(0, 2, 1, 3)),
    "colOrdL1_BRKY": lambda s, b: _one_per_feature(b, "color", _BRKY, s.feature_cursor, within_reading=True),
    "shaOrdL1_qcts": lambda s, b: _one_per_feature(b, "shape", _QCTS, s.feature_cursor, within_reading=True),
    "ordL1": lambda s, b: _all_buckets([_reading_first(b.pieces)]) if b.pieces else set(),
    "ordRevOfL1": lambda s, b: _all_buckets([_reading_first(b.pieces, reverse=True)]) if b.pieces else set(),
    "ordL1_Nearby": lambda s, b: (
        {(_reading_first(b.pieces).id, k) for k in _proximity_set(_reading_first(b.pieces))}
        if b.pieces else set()
    ),
    "ordRevOfL1_Remotest": lambda s, b: (
        {(_reading_first(b.pieces, reverse=True).id, k)
         for k in _proximity_set(_reading_first(b.pieces, reverse=True), farthest=True)}
        if b.pieces else set()
    ),
    "quadNearby": lambda s, b: {(p.id, _quadrant(p)) for p in b.pieces},
    "quadMixed1": lambda s, b: {(p.id, {0: 1, 1: 3, 2: 2, 3: 0}[_quadrant(p)]) for p in b.pieces},
    "cw": lambda s, b: _bucket_seq(b, s, "cw"),
    "ccw": lambda s, b: _bucket_seq(b, s, "ccw"),
    "cw_0123": lambda s, b: _bucket_seq(b, s, "cw", start=0),
    "cm_RBKY_cw_0123": lambda s, b: _seq_with_colors(b, s, _CM),
    "cw_qn2": lambda s, b: _seq_with_quadrants(b, s),
    "cm_ordL1": lambda s, b: (
        {(_reading_first(b.pieces).id, _CM[_reading_first(b.pieces).color])} if b.pieces else set()
    ),
}


def covers(name: str) -> bool:
    return name in _FNS


def oracle_legal_moves(spec: RuleSpec, state: RuleState, board: BoardState) -> set:
    """Full legal (piece_id, bucket) set per the hand-written rule semantics."""
    fn = _FNS.get(spec.name)
    if fn is None:
        raise KeyError(f"no oracle evaluator for rule {spec.name!r}")
    return fn(state, board)
