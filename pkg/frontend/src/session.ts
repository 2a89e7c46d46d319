// Client-side session state: selection, single in-flight move, history.
// The board always mirrors the server's last response; error counts and the
// episode error rate are derived from server-reported codes and move_count.

import { GameApi } from "./api.js";
import { HistoryEntry, LETTER, MoveWire, SessionWire } from "./types.js";

export type Phase = "idle" | "awaiting-server" | "playing" | "finished";

export interface Listener {
  (): void;
}

export class UiSession {
  state: Phase = "idle";
  session: SessionWire | null = null;
  selectedPiece: number | null = null;
  lastOutcome: MoveWire | null = null;
  history: HistoryEntry[] = [];
  errors = 0;
  revealedRule: string | null = null;
  private listeners: Listener[] = [];

  constructor(private api: GameApi) {}

  onChange(fn: Listener): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  get moveCount(): number {
    return this.session?.board.move_count ?? 0;
  }

  /** Episode error rate E_t = (#D + #I) / moves, all server-derived. */
  get errorRate(): number {
    return this.moveCount === 0 ? 0 : this.errors / this.moveCount;
  }

  get finished(): boolean {
    return (this.session?.board.finish_code ?? 0) !== 0;
  }

  get busy(): boolean {
    return this.state === "awaiting-server";
  }

  async start(rule: string, opts: { n?: number; seed?: number; mode?: string } = {}): Promise<void> {
    this.state = "awaiting-server";
    this.emit();
    try {
      this.session = await this.api.createSession(rule, opts);
      this.history = [];
      this.errors = 0;
      this.selectedPiece = null;
      this.lastOutcome = null;
      this.revealedRule = null;
      this.state = "playing";
    } catch (err) {
      this.state = "idle";
      throw err;
    } finally {
      this.emit();
    }
  }

  selectPiece(pieceId: number): void {
    if (this.state !== "playing" || this.finished) return;
    const onBoard = this.session?.board.pieces.some((p) => p.id === pieceId);
    this.selectedPiece = onBoard ? pieceId : null;
    this.emit();
  }

  /** Click a bucket with a piece selected: submit the move, apply the verdict. */
  async clickBucket(bucket: number): Promise<MoveWire | null> {
    if (this.state !== "playing" || this.selectedPiece === null || !this.session) {
      return null;
    }
    const pieceId = this.selectedPiece;
    this.state = "awaiting-server"; // single in-flight move; input disabled
    this.emit();
    try {
      const outcome = await this.api.move(this.session.session_id, pieceId, bucket);
      this.lastOutcome = outcome;
      this.session.board = outcome.board;
      if (outcome.response_code !== 0) {
        this.errors += 1;
      } else {
        this.selectedPiece = null;
      }
      this.history.push({
        move: outcome.move_count,
        pieceId,
        bucket,
        code: LETTER[outcome.response_code],
      });
      this.state = this.finished ? "finished" : "playing";
      if (this.finished) {
        await this.maybeReveal();
      }
      return outcome;
    } finally {
      this.emit();
    }
  }

  /** After completion the server may reveal the rule (debug servers only). */
  private async maybeReveal(): Promise<void> {
    if (!this.session) return;
    const view = await this.api.getSession(this.session.session_id);
    this.revealedRule = view.rule_description ?? view.rule ?? null;
  }

  async restart(): Promise<void> {
    if (!this.session) return;
    this.state = "awaiting-server";
    this.emit();
    this.session = await this.api.restart(this.session.session_id);
    this.history = [];
    this.errors = 0;
    this.selectedPiece = null;
    this.lastOutcome = null;
    this.state = "playing";
    this.emit();
  }
}
