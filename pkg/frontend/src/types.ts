// Wire types mirroring the /v1 API documents. The client never recomputes
// validation or scores; it renders exactly what the server sent.

export type StyleValue =
  | "unrestricted"
  | "bare_noun_phrase"
  | "definite_determiner_phrase"
  | "copular_sentence";

export interface ValidationReport {
  detected_style: string;
  style_matches_request: boolean;
  answer_leak: boolean;
  length_ok: boolean;
  issues: string[];
  passed: boolean;
}

export interface ClueView {
  id: string;
  title: string;
  url: string;
  category: string;
  context: string;
  keyword: string;
  style: StyleValue;
  clue: string;
  model_id: string;
  rating: string | null;
  validation: ValidationReport | null;
  rouge1: number | null;
  rouge2: number | null;
  rougeL: number | null;
  created_at: string;
}

export interface Decision {
  decision: "accepted" | "rejected" | "edited";
  text?: string;
}

export interface SessionView {
  id: string;
  source_kind: "text" | "title";
  title: string | null;
  context: string;
  keywords: string[];
  clue_ids: string[];
  decisions: Record<string, Decision>;
  puzzle_id: string | null;
  clues: ClueView[];
}

export interface LayoutCell {
  row: number;
  col: number;
  letter: string;
  number?: number;
}

export interface LayoutClue {
  number: number;
  entry_id: string;
  clue: string;
  answer_length: number;
  row: number;
  col: number;
}

export interface LayoutDoc {
  version: number;
  width: number;
  height: number;
  cells: LayoutCell[];
  across: LayoutClue[];
  down: LayoutClue[];
  intersections: { a: string; b: string; row: number; col: number }[];
}

export interface PuzzleView {
  puzzle_id: string;
  session_id?: string;
  layout: LayoutDoc;
  unplaced: string[];
  budget_exhausted?: boolean;
}

export interface StyleInfo {
  style: StyleValue;
  descriptor: string;
}

export interface RatingInfo {
  code: string;
  description: string;
}

export interface ApiError {
  code: string;
  message: string;
}
