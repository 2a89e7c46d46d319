// Wire types mirroring the game service's JSON bodies.

export interface PieceWire {
  id: number;
  color: "red" | "black" | "blue" | "yellow";
  shape: "square" | "star" | "circle" | "triangle";
  col: number; // 1..6
  row: number; // 1..6, row 1 at the bottom
}

export interface BoardWire {
  pieces: PieceWire[];
  move_count: number;
  finish_code: number; // 0 ongoing, 1 completed, 2 failed
}

export interface SessionWire {
  session_id: string;
  client: string;
  mode: string;
  n: number;
  seed: number;
  board: BoardWire;
  episode_index: number;
  phase?: number;
  phases_total?: number;
  rule?: string;
  rule_description?: string;
}

export interface MoveWire {
  response_code: 0 | 4 | 7;
  reward: number;
  finish_code: number;
  move_count: number;
  board: BoardWire;
}

export interface RuleInfo {
  name: string;
  tags: string[];
}

export type ResponseLetter = "A" | "D" | "I";

export const LETTER: Record<number, ResponseLetter> = { 0: "A", 4: "D", 7: "I" };

export interface HistoryEntry {
  move: number;
  pieceId: number;
  bucket: number;
  code: ResponseLetter;
}
