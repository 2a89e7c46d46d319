"""Board model for the 6x6 hidden-rule game: cells, pieces, buckets, quadrants.

Coordinates are 1-based (col, row) with row 1 at the bottom. Buckets sit at
the four corners and are indexed 0..3 clockwise from top-left. Quadrants are
the four 3x3 blocks of the board, indexed like the buckets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

COLORS = ("red", "black", "blue", "yellow")
SHAPES = ("square", "star", "circle", "triangle")

BUCKETS = (0, 1, 2, 3)  # 0=top-left, 1=top-right, 2=bottom-right, 3=bottom-left

# Bucket anchor points in (x=col, y=row) space, just outside the grid corners.
BUCKET_ANCHORS = {0: (0.0, 7.0), 1: (7.0, 7.0), 2: (7.0, 0.0), 3: (0.0, 0.0)}

N_CELLS = 36
ALL_CELLS = frozenset(range(1, N_CELLS + 1))

# Checkerboard cells open in "train" mode of the generalization experiments.
WHITE_CELLS = frozenset(
    {1, 3, 5, 8, 10, 12, 13, 15, 17, 20, 22, 24, 25, 27, 29, 32, 34, 36}
)


class GohrError(Exception):
    """Base class for game errors."""


class ConfigError(GohrError):
    """Invalid episode or experiment configuration."""


class AddressingError(GohrError):
    """A move referenced a piece that is not on the board (client bug)."""


class EpisodeFinishedError(GohrError):
    """A move was attempted on a finished episode."""


def position_index(col: int, row: int) -> int:
    """Linear cell index 1..36; cell (1,1) -> 1, (6,6) -> 36."""
    if not (1 <= col <= 6 and 1 <= row <= 6):
        raise ConfigError(f"cell out of range: ({col},{row})")
    return (row - 1) * 6 + col


def position_coords(index: int) -> tuple[int, int]:
    """Inverse of position_index: index 1..36 -> (col, row)."""
    if not (1 <= index <= N_CELLS):
        raise ConfigError(f"position index out of range: {index}")
    return (index - 1) % 6 + 1, (index - 1) // 6 + 1


def quadrant_of(col: int, row: int) -> int:
    """3x3 block containing the cell, indexed 0..3 clockwise from top-left."""
    if not (1 <= col <= 6 and 1 <= row <= 6):
        raise ConfigError(f"cell out of range: ({col},{row})")
    if row >= 4:
        return 0 if col <= 3 else 1
    return 3 if col <= 3 else 2


def bucket_distance(col: float, row: float, bucket: int) -> float:
    """Euclidean distance from a cell to a bucket anchor."""
    ax, ay = BUCKET_ANCHORS[bucket]
    return math.hypot(col - ax, row - ay)


def nearest_buckets(col: int, row: int) -> tuple[int, ...]:
    """Buckets minimizing distance to the cell; ties keep all minimizers."""
    dists = [bucket_distance(col, row, b) for b in BUCKETS]
    lo = min(dists)
    return tuple(b for b in BUCKETS if dists[b] <= lo + 1e-9)

def farthest_buckets(col: int, row: int) -> tuple[int, ...]:
    """Buckets maximizing distance to the cell; ties keep all maximizers."""
    dists = [bucket_distance(col, row, b) for b in BUCKETS]
    hi = max(dists)
    return tuple(b for b in BUCKETS if dists[b] >= hi - 1e-9)


@dataclass(frozen=True)
class Piece:
    """One game piece; id is stable for the episode (1..n)."""

    id: int
    color: str
    shape: str
    col: int
    row: int

    def __post_init__(self):
        if self.color not in COLORS:
            raise ConfigError(f"unknown color: {self.color}")
        if self.shape not in SHAPES:
            raise ConfigError(f"unknown shape: {self.shape}")
        if not (1 <= self.col <= 6 and 1 <= self.row <= 6):
            raise ConfigError(f"cell out of range: ({self.col},{self.row})")

    @property
    def position(self) -> int:
        return position_index(self.col, self.row)

    @property
    def quadrant(self) -> int:
        return quadrant_of(self.col, self.row)


@dataclass
class BoardState:
    """Pieces still on the board plus the removal history."""

    pieces: list[Piece] = field(default_factory=list)
    removed: list[tuple[Piece, int, int]] = field(default_factory=list)  # (piece, bucket, move#)

    def piece(self, piece_id: int) -> Piece | None:
        for p in self.pieces:
            if p.id == piece_id:
                return p
        return None

    def piece_at(self, col: int, row: int) -> Piece | None:
        for p in self.pieces:
            if p.col == col and p.row == row:
                return p
        return None

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def total_pieces(self) -> int:
        return len(self.pieces) + len(self.removed)

    def remove(self, piece_id: int, bucket: int, move_number: int) -> Piece:
        p = self.piece(piece_id)
        if p is None:
            raise AddressingError(f"piece {piece_id} is not on the board")
        self.pieces = [q for q in self.pieces if q.id != piece_id]
        self.removed.append((p, bucket, move_number))
        return p

    def copy(self) -> "BoardState":
        return BoardState(list(self.pieces), list(self.removed))


def board_wire(board: BoardState, move_count: int, finish_code: int) -> dict:
    """Canonical JSON snapshot shared by server, logs, and the UI."""
    return {
        "pieces": [
            {"id": p.id, "color": p.color, "shape": p.shape, "col": p.col, "row": p.row}
            for p in sorted(board.pieces, key=lambda p: p.id)
        ],
        "move_count": move_count,
        "finish_code": finish_code,
    }


def board_from_wire(data: dict) -> BoardState:
    pieces = [
        Piece(d["id"], d["color"], d["shape"], d["col"], d["row"]) for d in data["pieces"]
    ]
    return BoardState(pieces)
