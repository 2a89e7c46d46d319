"""Feature-centric (FC) and object-centric (OC) state/action encodings.

FC flattens the board into 8 one-hot feature maps of 36 cells (288 bits)
and addresses actions by cell: action = (position-1)*4 + bucket, 144 total.
OC gives each object a 24-bit row (color 4, shape 4, x 6, y 6, action 4)
and addresses actions by object: action = (object_id-1)*4 + bucket.

A network input is the current board plus the ``n_hist`` most recent
accepted steps (newest first), zero-padded when the history is shorter.
Denied/immovable attempts never enter the history. The feature orderings
are configuration; the defaults reproduce the documented bit layouts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .board import BoardState, ConfigError, Piece, position_coords, position_index


@dataclass(frozen=True)
class EncoderConfig:
    # FC map order f1..f8.
    fc_feature_order: tuple = ("square", "star", "circle", "triangle", "red", "black", "blue", "yellow")
    # OC group orderings (red -> 1000, square -> 0100 under these defaults).
    oc_color_order: tuple = ("red", "blue", "black", "yellow")
    oc_shape_order: tuple = ("circle", "square", "triangle", "star")
    n_hist: int = 6

    @property
    def fc_input_dim(self) -> int:
        return 288 + self.n_hist * 432


DEFAULT_ENCODER = EncoderConfig()

FC_BOARD_DIM = 288
FC_ACTION_DIM = 144
OC_ROW_DIM = 24


@dataclass(frozen=True)
class HistoryStep:
    """One accepted move: the board it was played on plus the action taken."""

    pieces: tuple  # on-board pieces before the move
    piece_id: int
    bucket: int

    @property
    def moved_piece(self) -> Piece:
        for p in self.pieces:
            if p.id == self.piece_id:
                return p
        raise ConfigError(f"history step moved piece {self.piece_id} not in its board")


def fc_action_index(position: int, bucket: int) -> int:
    if not (1 <= position <= 36 and 0 <= bucket <= 3):
        raise ConfigError(f"bad FC action ({position},{bucket})")
    return (position - 1) * 4 + bucket


def fc_action_decode(action: int) -> tuple[int, int]:
    if not (0 <= action < FC_ACTION_DIM):
        raise ConfigError(f"FC action out of range: {action}")
    return action // 4 + 1, action % 4


def oc_action_index(object_id: int, bucket: int, m: int = 9) -> int:
    if not (1 <= object_id <= m and 0 <= bucket <= 3):
        raise ConfigError(f"bad OC action ({object_id},{bucket})")
    return (object_id - 1) * 4 + bucket


def oc_action_decode(action: int, m: int = 9) -> tuple[int, int]:
    if not (0 <= action < 4 * m):
        raise ConfigError(f"OC action out of range: {action}")
    return action // 4 + 1, action % 4


def encode_fc_board(pieces, cfg: EncoderConfig = DEFAULT_ENCODER) -> np.ndarray:
    """Stacked one-hot feature maps; shape (288,)."""
    maps = np.zeros((8, 36), dtype=np.float64)
    order = cfg.fc_feature_order
    for p in pieces:
        idx = position_index(p.col, p.row) - 1
        maps[order.index(p.shape), idx] = 1.0
        maps[order.index(p.color), idx] = 1.0
    return maps.reshape(-1)


def decode_fc_board(vec: np.ndarray, cfg: EncoderConfig = DEFAULT_ENCODER) -> set:
    """Recover {(position, shape, color)} from an FC board vector."""
    maps = np.asarray(vec).reshape(8, 36)
    order = cfg.fc_feature_order
    out = set()
    for idx in range(36):
        shapes = [f for f in order if f in ("square", "star", "circle", "triangle") and maps[order.index(f), idx]]
        colors = [f for f in order if f in ("red", "black", "blue", "yellow") and maps[order.index(f), idx]]
        if shapes or colors:
            if len(shapes) != 1 or len(colors) != 1:
                raise ConfigError(f"cell {idx + 1} does not hold exactly one shape/color bit")
            out.add((idx + 1, shapes[0], colors[0]))
    return out


def encode_oc_row(piece: Piece | None, action_bucket: int | None = None,
                  cfg: EncoderConfig = DEFAULT_ENCODER) -> np.ndarray:
    """24-bit object row; removed/padding rows are all zero."""
    row = np.zeros(OC_ROW_DIM, dtype=np.float64)
    if piece is None:
        return row
    row[cfg.oc_color_order.index(piece.color)] = 1.0
    row[4 + cfg.oc_shape_order.index(piece.shape)] = 1.0
    row[8 + piece.col - 1] = 1.0
    row[14 + piece.row - 1] = 1.0
    if action_bucket is not None:
        row[20 + action_bucket] = 1.0
    return row


def encode_oc_slab(pieces, m: int, moved: tuple[int, int] | None = None,
                   cfg: EncoderConfig = DEFAULT_ENCODER) -> np.ndarray:
    """(m, 24) rows indexed by object id; only the moved object carries an action."""
    by_id = {p.id: p for p in pieces}
    slab = np.zeros((m, OC_ROW_DIM), dtype=np.float64)
    for oid in range(1, m + 1):
        p = by_id.get(oid)
        if p is None:
            continue
        action = moved[1] if moved is not None and moved[0] == oid else None
        slab[oid - 1] = encode_oc_row(p, action, cfg)
    return slab


def decode_oc_slab(slab: np.ndarray, cfg: EncoderConfig = DEFAULT_ENCODER) -> list:
    """Recover [(object_id, color, shape, col, row, action_bucket|None)] from live rows."""
    out = []
    for i, row in enumerate(np.asarray(slab)):
        if not row.any():
            continue
        color = cfg.oc_color_order[int(np.argmax(row[0:4]))]
        shape = cfg.oc_shape_order[int(np.argmax(row[4:8]))]
        col = int(np.argmax(row[8:14])) + 1
        r = int(np.argmax(row[14:20])) + 1
        action = int(np.argmax(row[20:24])) if row[20:24].any() else None
        out.append((i + 1, color, shape, col, r, action))
    return out


def assemble_fc_input(board: BoardState, history, cfg: EncoderConfig = DEFAULT_ENCODER) -> np.ndarray:
    """Current board (288) then n_hist slots of past board + action (432 each)."""
    if len(history) > cfg.n_hist:
        raise ConfigError(f"history longer than n_hist={cfg.n_hist}")
    parts = [encode_fc_board(board.pieces, cfg)]
    for step in history:
        action = np.zeros(FC_ACTION_DIM, dtype=np.float64)
        moved = step.moved_piece
        action[fc_action_index(position_index(moved.col, moved.row), step.bucket)] = 1.0
        parts.append(encode_fc_board(step.pieces, cfg))
        parts.append(action)
    out = np.concatenate(parts) if parts else np.zeros(0)
    full = np.zeros(cfg.fc_input_dim, dtype=np.float64)
    full[: out.shape[0]] = out
    return full


def assemble_oc_input(board: BoardState, history, m: int,
                      cfg: EncoderConfig = DEFAULT_ENCODER) -> np.ndarray:
    """Tensor (n_hist+1, m, 24): slab 0 is the current board, then newest-first steps."""
    if len(history) > cfg.n_hist:
        raise ConfigError(f"history longer than n_hist={cfg.n_hist}")
    slabs = np.zeros((cfg.n_hist + 1, m, OC_ROW_DIM), dtype=np.float64)
    slabs[0] = encode_oc_slab(board.pieces, m, None, cfg)
    for i, step in enumerate(history):
        slabs[i + 1] = encode_oc_slab(step.pieces, m, (step.piece_id, step.bucket), cfg)
    return slabs


def valid_action_mask(board: BoardState, representation: str, m: int = 9) -> np.ndarray:
    """True where the action references an on-board piece; rule legality is NOT masked."""
    if representation == "FC":
        mask = np.zeros(FC_ACTION_DIM, dtype=bool)
        for p in board.pieces:
            base = (position_index(p.col, p.row) - 1) * 4
            mask[base : base + 4] = True
        return mask
    if representation == "OC":
        mask = np.zeros(4 * m, dtype=bool)
        for p in board.pieces:
            mask[(p.id - 1) * 4 : (p.id - 1) * 4 + 4] = True
        return mask
    raise ConfigError(f"unknown representation: {representation}")


def action_to_move(action: int, board: BoardState, representation: str, m: int = 9) -> tuple[int, int]:
    """Translate a network action index into (piece_id, bucket)."""
    if representation == "FC":
        position, bucket = fc_action_decode(action)
        col, row = position_coords(position)
        piece = board.piece_at(col, row)
        if piece is None:
            raise ConfigError(f"FC action {action} addresses empty cell {position}")
        return piece.id, bucket
    object_id, bucket = oc_action_decode(action, m)
    return object_id, bucket
