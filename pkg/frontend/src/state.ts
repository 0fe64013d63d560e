// Session state machine behind the three screens. The only durable client
// state is the session id (kept in the URL hash); everything else is
// reconstructed from GET endpoints, so a refresh never loses work.

import { ApiClient, ApiRequestError } from "./api.js";
import type {
  PuzzleView,
  RatingInfo,
  SessionView,
  StyleInfo,
  StyleValue,
} from "./types.js";

export type Screen = "source" | "triage" | "puzzle";

export interface AppState {
  screen: Screen;
  session: SessionView | null;
  puzzle: PuzzleView | null;
  styles: StyleInfo[];
  ratings: RatingInfo[];
  busy: boolean;
  error: string | null;
}

export function initialState(): AppState {
  return {
    screen: "source",
    session: null,
    puzzle: null,
    styles: [],
    ratings: [],
    busy: false,
    error: null,
  };
}

export class Store {
  state: AppState = initialState();
  private listeners: (() => void)[] = [];

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  private async run<T>(action: () => Promise<T>): Promise<T | null> {
    this.state.busy = true;
    this.state.error = null;
    this.emit();
    try {
      return await action();
    } catch (err) {
      this.state.error =
        err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
      return null;
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  async loadReferenceData(): Promise<void> {
    await this.run(async () => {
      this.state.styles = await this.api.listStyles();
      this.state.ratings = await this.api.listRatings();
    });
  }

  async startSession(source: { text?: string; title?: string }): Promise<void> {
    await this.run(async () => {
      const session = source.text !== undefined
        ? await this.api.createSessionFromText(source.text)
        : await this.api.createSessionFromTitle(source.title ?? "");
      this.state.session = session;
      this.state.puzzle = null;
      this.state.screen = "triage";
    });
  }

  /** Rebuild the whole view from GET endpoints given only a session id. */
  async restore(sessionId: string): Promise<void> {
    await this.run(async () => {
      const session = await this.api.getSession(sessionId);
      this.state.session = session;
      if (session.puzzle_id) {
        this.state.puzzle = await this.api.getPuzzle(session.puzzle_id);
        this.state.screen = "puzzle";
      } else {
        this.state.screen = session.clues.length > 0 ? "triage" : "source";
      }
    });
  }

  async generate(keyword: string, styles: StyleValue[], n: number): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    await this.run(async () => {
      await this.api.generateClues(session.id, keyword, styles, n);
      this.state.session = await this.api.getSession(session.id);
    });
  }

  /** Re-request a single style for the same keyword. */
  async regenerate(keyword: string, style: StyleValue): Promise<void> {
    await this.generate(keyword, [style], 1);
  }

  async decide(clueId: string, decision: "accept" | "reject"): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    await this.run(async () => {
      await this.api.decide(clueId, decision);
      this.state.session = await this.api.getSession(session.id);
    });
  }

  async edit(clueId: string, text: string): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    await this.run(async () => {
      await this.api.decide(clueId, "edit", text);
      this.state.session = await this.api.getSession(session.id);
    });
  }

  async rate(clueId: string, rating: string): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    await this.run(async () => {
      await this.api.rate(clueId, rating);
      this.state.session = await this.api.getSession(session.id);
    });
  }

  async buildPuzzle(): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    await this.run(async () => {
      this.state.puzzle = await this.api.buildPuzzle(session.id);
      this.state.session = await this.api.getSession(session.id);
      this.state.screen = "puzzle";
    });
  }

  backToTriage(): void {
    if (this.state.session) {
      this.state.screen = "triage";
      this.emit();
    }
  }
}

/** Keyboard shortcut mapping on the triage screen: A-E rate the focused card. */
export function ratingForKey(key: string): string | null {
  const upper = key.toUpperCase();
  return ["A", "B", "C", "D", "E"].includes(upper) ? upper : null;
}
