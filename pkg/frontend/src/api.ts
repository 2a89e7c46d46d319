// Thin typed client for the game service. The UI never adjudicates moves
// itself; every displayed number comes from these responses.

import type { BoardWire, MoveWire, RuleInfo, SessionWire } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class GameApi {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const body = await res.json().catch(() => ({}));
    if (!res.ok) {
      throw new ApiError(res.status, (body as { detail?: string }).detail ?? res.statusText);
    }
    return body as T;
  }

  createSession(rule: string, opts: { n?: number; seed?: number; mode?: string } = {}): Promise<SessionWire> {
    return this.request<SessionWire>("/episodes", {
      method: "POST",
      body: JSON.stringify({ rule, client: "human", ...opts }),
    });
  }

  move(sessionId: string, pieceId: number, bucket: number): Promise<MoveWire> {
    return this.request<MoveWire>(`/episodes/${sessionId}/moves`, {
      method: "POST",
      body: JSON.stringify({ piece_id: pieceId, bucket }),
    });
  }

  getSession(sessionId: string): Promise<SessionWire> {
    return this.request<SessionWire>(`/episodes/${sessionId}`);
  }

  restart(sessionId: string): Promise<SessionWire> {
    return this.request<SessionWire>(`/episodes/${sessionId}/restart`, { method: "POST" });
  }

  async listRules(): Promise<RuleInfo[]> {
    const body = await this.request<{ rules: RuleInfo[] }>("/rules");
    return body.rules;
  }
}

export function boardsEqual(a: BoardWire, b: BoardWire): boolean {
  return JSON.stringify(a) === JSON.stringify(b);
}
