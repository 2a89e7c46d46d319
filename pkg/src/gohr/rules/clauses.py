"""Composable rule clauses and their evaluation against a board.

A rule is a conjunction of clauses. Evaluation is pure: ``accepts`` never
mutates the board or the incoming state; on an accepted move it returns the
advanced state. Stateful clauses keep their cursors in ``RuleState``:

* ``last_bucket`` — set to the bucket of the last accepted move (bucket
  sequences derive the next expected bucket from it);
* ``feature_cursor`` — index of the next-due entry of a feature cycle;
* ``block_feature`` — the feature currently being cleared by an
  all-of-feature rule (bookkeeping only; the active feature is recomputed
  from the board).

Cycles skip entries whose feature is absent from the board. For rules that
pair a bucket sequence with piece filters (e.g. a color map), the expected
bucket likewise skips forward when no on-board piece can legally go there;
without this the conjunction could deadlock on boards missing a feature.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..board import BoardState, Piece, nearest_buckets, farthest_buckets, quadrant_of


@dataclass(frozen=True)
class RuleState:
    """Per-episode hidden state of a rule."""

    last_bucket: int | None = None
    feature_cursor: int = 0
    block_feature: str | None = None


def reading_sort(pieces: list[Piece], reverse: bool = False) -> list[Piece]:
    """Reading order scans rows top to bottom, columns left to right."""
    key = (lambda p: (p.row, -p.col)) if reverse else (lambda p: (-p.row, p.col))
    return sorted(pieces, key=key)


@dataclass(frozen=True)
class FeatureMap:
    """Each color/shape goes to a fixed bucket, in any order."""

    kind: str  # "color" | "shape"
    mapping: dict

    tag = "Feature_to_bucket_mapping"

    def admits(self, state, board, piece, bucket):
        target = self.mapping.get(getattr(piece, self.kind))
        return target is not None and bucket == target

    def applies(self, state, board):
        return True


@dataclass(frozen=True)
class FeatureCycle:
    """One piece per color/shape in cyclic order, skipping absent features.

    With ``buckets`` each entry also fixes the target bucket. With
    ``within="reading"`` only the reading-order-first piece of the due
    feature is movable.
    """

    kind: str
    order: tuple
    buckets: tuple | None = None
    within: str = "any"  # "any" | "reading"

    tag = "Feature_ordering"

    def current_entry(self, state, board) -> int | None:
        n = len(self.order)
        for k in range(n):
            i = (state.feature_cursor + k) % n
            if any(getattr(p, self.kind) == self.order[i] for p in board.pieces):
                return i
        return None

    def admits(self, state, board, piece, bucket):
        i = self.current_entry(state, board)
        if i is None or getattr(piece, self.kind) != self.order[i]:
            return False
        if self.buckets is not None and bucket != self.buckets[i]:
            return False
        if self.within == "reading":
            due = [p for p in board.pieces if getattr(p, self.kind) == self.order[i]]
            if piece.id != reading_sort(due)[0].id:
                return False
        return True

    def applies(self, state, board):
        return True


@dataclass(frozen=True)
class AllOfFeature:
    """All pieces of one color/shape are cleared before the next in order."""

    kind: str
    order: tuple

    tag = "All_pieces_of_feature"

    def active_feature(self, board) -> str | None:
        for f in self.order:
            if any(getattr(p, self.kind) == f for p in board.pieces):
                return f
        return None

    def admits(self, state, board, piece, bucket):
        return getattr(piece, self.kind) == self.active_feature(board)

    def applies(self, state, board):
        return True


@dataclass(frozen=True)
class ReadingOrder:
    """Only the first piece in (reverse) reading order is movable."""

    reverse: bool = False

    tag = "Reading_order"

    def admits(self, state, board, piece, bucket):
        return piece.id == reading_sort(board.pieces, self.reverse)[0].id

    def applies(self, state, board):
        return True


@dataclass(frozen=True)
class Proximity:
    """The bucket must be the nearest (or farthest) one for the piece."""

    mode: str  # "nearest" | "farthest"

    tag = "Proximity"

    def admits(self, state, board, piece, bucket):
        ok = nearest_buckets if self.mode == "nearest" else farthest_buckets
        return bucket in ok(piece.col, piece.row)

    def applies(self, state, board):
        return True


@dataclass(frozen=True)
class QuadrantMap:
    """Pieces of each quadrant go to a fixed bucket."""

    mapping: dict  # quadrant -> bucket

    tag = "Quadrant_to_bucket_mapping"

    def admits(self, state, board, piece, bucket):
        target = self.mapping.get(quadrant_of(piece.col, piece.row))
        return target is not None and bucket == target

    def applies(self, state, board):
        return True


@dataclass(frozen=True)
class BucketSequence:
    """Buckets are filled in clockwise/counterclockwise order.

    With ``start=None`` the first accepted move fixes the sequence; before
    that every bucket satisfies the clause.
    """

    direction: str  # "cw" | "ccw"
    start: int | None = None

    tag = "Bucket_ordering"

    @property
    def step(self) -> int:
        return 1 if self.direction == "cw" else -1

    def expected(self, state) -> tuple:
        if state.last_bucket is None:
            if self.start is None:
                return (0, 1, 2, 3)
            return (self.start,)
        return ((state.last_bucket + self.step) % 4,)

    def admits(self, state, board, piece, bucket):
        return bucket in self.expected(state)

    def applies(self, state, board):
        # Before any accepted move a free-start sequence constrains nothing.
        return not (state.last_bucket is None and self.start is None)

    def shift(self, state: RuleState, k: int) -> RuleState:
        """State whose expected bucket is advanced k steps along the sequence."""
        if k == 0:
            return state
        exp0 = self.expected(state)[0] if state.last_bucket is not None or self.start is not None else 0
        target = (exp0 + k * self.step) % 4
        return replace(state, last_bucket=(target - self.step) % 4)


CLAUSE_TYPES = (
    FeatureMap,
    FeatureCycle,
    AllOfFeature,
    ReadingOrder,
    Proximity,
    QuadrantMap,
    BucketSequence,
)


@dataclass(frozen=True)
class RuleSpec:
    """A named conjunction of clauses."""

    name: str
    clauses: tuple
    tags: frozenset = frozenset()
    description: str = ""
    components: tuple = ()

    @property
    def has_bucket_sequence(self) -> bool:
        return any(isinstance(c, BucketSequence) for c in self.clauses)

    @property
    def has_piece_filter(self) -> bool:
        return any(not isinstance(c, BucketSequence) for c in self.clauses)


def initial_state(spec: RuleSpec) -> RuleState:
    return RuleState()


def _admits_all(spec, state, board, piece, bucket) -> bool:
    return all(c.admits(state, board, piece, bucket) for c in spec.clauses)


def _any_move(spec, state, board) -> bool:
    for piece in board.pieces:
        for bucket in range(4):
            if _admits_all(spec, state, board, piece, bucket):
                return True
    return False


def resolve_state(spec: RuleSpec, state: RuleState, board: BoardState) -> RuleState:
    """Advance the bucket-sequence expectation past buckets no piece can fill.

    Only kicks in when a bucket sequence is conjoined with piece filters;
    a lone sequence always admits some move on a non-empty board.
    """
    if board.is_empty or not (spec.has_bucket_sequence and spec.has_piece_filter):
        return state
    seqs = [c for c in spec.clauses if isinstance(c, BucketSequence)]
    # All free-start sequences before the first accept admit every bucket.
    if state.last_bucket is None and all(s.start is None for s in seqs):
        return state
    for k in range(4):
        trial = seqs[0].shift(state, k)
        if _any_move(spec, trial, board):
            return trial
    return state


def advance_state(spec: RuleSpec, state: RuleState, board: BoardState,
                  piece: Piece, bucket: int) -> RuleState:
    """State after an accepted move (``state`` must already be resolved)."""
    last, cursor, block = state.last_bucket, state.feature_cursor, state.block_feature
    for c in spec.clauses:
        if isinstance(c, BucketSequence):
            last = bucket
        elif isinstance(c, FeatureCycle):
            entry = c.current_entry(state, board)
            cursor = (entry + 1) % len(c.order)
        elif isinstance(c, AllOfFeature):
            block = c.active_feature(board)
    return RuleState(last, cursor, block)


def accepts(spec: RuleSpec, state: RuleState, board: BoardState,
            piece: Piece, bucket: int) -> tuple[bool, RuleState]:
    """Whether the rule accepts (piece, bucket); on True returns the advanced state."""
    eff = resolve_state(spec, state, board)
    if not _admits_all(spec, eff, board, piece, bucket):
        return False, state
    return True, advance_state(spec, eff, board, piece, bucket)


def movable(spec: RuleSpec, state: RuleState, board: BoardState, piece: Piece) -> bool:
    """True iff some bucket accepts the piece in the current state."""
    eff = resolve_state(spec, state, board)
    return any(_admits_all(spec, eff, board, piece, b) for b in range(4))


def clause_legal_moves(spec: RuleSpec, state: RuleState, board: BoardState) -> set:
    """All accepted (piece_id, bucket) pairs under the clause evaluation path."""
    eff = resolve_state(spec, state, board)
    return {
        (p.id, b)
        for p in board.pieces
        for b in range(4)
        if _admits_all(spec, eff, board, p, b)
    }


def clause_verdicts(spec: RuleSpec, state: RuleState, board: BoardState,
                    piece: Piece, bucket: int) -> dict:
    """Per-property verdict for one attempted move: 'ok', 'bad', or 'na'.

    Feeds the property-conditional convergence metrics: a property that is
    not judgeable at this move (e.g. bucket ordering before the first
    placement) reports 'na' and is skipped, not counted.
    """
    eff = resolve_state(spec, state, board)
    out: dict[str, str] = {}

    def put(tag: str, verdict: str):
        prev = out.get(tag)
        if prev == "bad" or (prev == "ok" and verdict == "na"):
            return
        if prev == "ok" and verdict == "ok":
            return
        out[tag] = verdict

    for c in spec.clauses:
        if isinstance(c, BucketSequence):
            if not c.applies(state, board):
                put(c.tag, "na")
            else:
                put(c.tag, "ok" if bucket in c.expected(eff) else "bad")
        elif isinstance(c, FeatureCycle):
            i = c.current_entry(eff, board)
            due = i is not None and getattr(piece, c.kind) == c.order[i]
            put(c.tag, "ok" if due else "bad")
            if c.buckets is not None:
                feat = getattr(piece, c.kind)
                if feat in c.order:
                    want = c.buckets[c.order.index(feat)]
                    put(FeatureMap.tag, "ok" if bucket == want else "bad")
                else:
                    put(FeatureMap.tag, "na")
            if c.within == "reading":
                if due:
                    firsts = [p for p in board.pieces if getattr(p, c.kind) == c.order[i]]
                    first = reading_sort(firsts)[0]
                    put("Conditional", "ok" if piece.id == first.id else "bad")
                else:
                    put("Conditional", "na")
        else:
            put(c.tag, "ok" if c.admits(eff, board, piece, bucket) else "bad")
    return out
