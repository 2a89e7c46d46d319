// DOM rendering: 6x6 grid, four corner buckets, status badges, history panel.

import { UiSession } from "./session.js";
import { PieceWire } from "./types.js";

const SHAPE_GLYPH: Record<string, string> = {
  square: "■",
  star: "★",
  circle: "●",
  triangle: "▲",
};

const CODE_BADGE: Record<string, string> = {
  A: "accepted",
  D: "denied",
  I: "immovable",
};

export interface Elements {
  board: HTMLElement;
  buckets: HTMLElement[];
  status: HTMLElement;
  moveCounter: HTMLElement;
  errorCounter: HTMLElement;
  history: HTMLElement;
  completion: HTMLElement;
}

export function grabElements(doc: Document): Elements {
  const byId = (id: string) => {
    const el = doc.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  return {
    board: byId("board"),
    buckets: [0, 1, 2, 3].map((b) => byId(`bucket-${b}`)),
    status: byId("status"),
    moveCounter: byId("move-counter"),
    errorCounter: byId("error-counter"),
    history: byId("history"),
    completion: byId("completion"),
  };
}

function pieceCell(doc: Document, piece: PieceWire, session: UiSession): HTMLElement {
  const el = doc.createElement("div");
  el.className = `piece ${piece.color}`;
  el.textContent = SHAPE_GLYPH[piece.shape];
  el.dataset.pieceId = String(piece.id);
  if (session.selectedPiece === piece.id) el.classList.add("selected");
  const last = session.lastOutcome;
  if (last && last.response_code !== 0 && session.history.length) {
    const entry = session.history[session.history.length - 1];
    if (entry.pieceId === piece.id) el.classList.add("shake");
  }
  el.addEventListener("click", () => {
    if (!session.busy) session.selectPiece(piece.id);
  });
  return el;
}

export function render(doc: Document, els: Elements, session: UiSession): void {
  els.board.textContent = "";
  const pieces = new Map<string, PieceWire>();
  for (const p of session.session?.board.pieces ?? []) {
    pieces.set(`${p.col},${p.row}`, p);
  }
  // rows render top (row 6) to bottom (row 1)
  for (let row = 6; row >= 1; row--) {
    for (let col = 1; col <= 6; col++) {
      const cell = doc.createElement("div");
      cell.className = "cell";
      const piece = pieces.get(`${col},${row}`);
      if (piece) cell.appendChild(pieceCell(doc, piece, session));
      els.board.appendChild(cell);
    }
  }

  els.buckets.forEach((bucketEl, b) => {
    bucketEl.classList.toggle("armed", session.selectedPiece !== null && !session.busy);
    bucketEl.onclick = () => {
      if (!session.busy && session.selectedPiece !== null) {
        void session.clickBucket(b);
      }
    };
  });

  els.moveCounter.textContent = `moves: ${session.moveCount}`;
  els.errorCounter.textContent = `errors: ${session.errors}`;

  const last = session.lastOutcome;
  if (last) {
    const letter = last.response_code === 0 ? "A" : last.response_code === 4 ? "D" : "I";
    els.status.textContent = CODE_BADGE[letter];
    els.status.className = `status ${CODE_BADGE[letter]}`;
  } else {
    els.status.textContent = session.busy ? "…" : "pick a piece, then a bucket";
    els.status.className = "status";
  }

  els.history.textContent = "";
  for (const entry of session.history.slice().reverse()) {
    const li = doc.createElement("li");
    li.textContent = `#${entry.move} piece ${entry.pieceId} → bucket ${entry.bucket}: ${CODE_BADGE[entry.code]}`;
    li.className = `code-${entry.code}`;
    els.history.appendChild(li);
  }
  if (els.history.firstChild) {
    (els.history.firstChild as HTMLElement).classList.add("latest");
  }

  if (session.finished) {
    const rate = session.errorRate;
    const outcome = session.session?.board.finish_code === 1 ? "Board cleared!" : "Episode failed.";
    const reveal = session.revealedRule ? `<p>The rule was: ${session.revealedRule}</p>` : "";
    els.completion.innerHTML =
      `<h2>${outcome}</h2>` +
      `<p>${session.moveCount} moves, ${session.errors} errors ` +
      `(error rate ${rate.toFixed(2)})</p>` + reveal;
    els.completion.classList.add("visible");
  } else {
    els.completion.classList.remove("visible");
    els.completion.textContent = "";
  }
}
