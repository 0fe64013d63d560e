// Thin client over the documented /v1 endpoints. Errors surface as
// ApiRequestError carrying the server's machine-readable reason code.

import type {
  ClueView,
  Decision,
  PuzzleView,
  RatingInfo,
  SessionView,
  StyleInfo,
  StyleValue,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let code = `HTTP${resp.status}`;
  let message = resp.statusText;
  try {
    const body = await resp.json();
    if (body?.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiRequestError(code, message, resp.status);
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return fetch(this.url(path), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    }).then((resp) => unwrap<T>(resp));
  }

  private get<T>(path: string): Promise<T> {
    return fetch(this.url(path)).then((resp) => unwrap<T>(resp));
  }

  createSessionFromText(text: string): Promise<SessionView> {
    return this.post("/v1/sessions", { text });
  }

  createSessionFromTitle(title: string): Promise<SessionView> {
    return this.post("/v1/sessions", { title });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.get(`/v1/sessions/${sessionId}`);
  }

  generateClues(
    sessionId: string,
    keyword: string,
    styles: StyleValue[],
    n: number,
  ): Promise<{ session_id: string; clues: ClueView[] }> {
    return this.post(`/v1/sessions/${sessionId}/clues`, { keyword, styles, n });
  }

  decide(
    clueId: string,
    decision: "accept" | "reject" | "edit",
    text?: string,
  ): Promise<{ clue: ClueView; decision: Decision }> {
    return this.post(`/v1/clues/${clueId}/decision`, { decision, text });
  }

  rate(clueId: string, rating: string): Promise<{ clue: ClueView }> {
    return this.post(`/v1/clues/${clueId}/rating`, { rating });
  }

  buildPuzzle(sessionId: string): Promise<PuzzleView> {
    return this.post(`/v1/sessions/${sessionId}/puzzle`, {});
  }

  getPuzzle(puzzleId: string): Promise<PuzzleView> {
    return this.get(`/v1/puzzles/${puzzleId}?format=meta`);
  }

  printableUrl(puzzleId: string): string {
    return this.url(`/v1/puzzles/${puzzleId}?format=html`);
  }

  exportUrl(puzzleId: string, format: "text" | "json"): string {
    return this.url(`/v1/puzzles/${puzzleId}?format=${format}`);
  }

  listStyles(): Promise<StyleInfo[]> {
    return this.get("/v1/styles");
  }

  listRatings(): Promise<RatingInfo[]> {
    return this.get("/v1/ratings");
  }
}
