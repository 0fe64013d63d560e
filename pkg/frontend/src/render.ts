// Pure HTML renderers for the three screens. No DOM access here: everything
// returns strings, so the same code is exercised headless by the test suite
// and mounted by main.ts in the browser.

import type { AppState } from "./state.js";
import type { ClueView, LayoutDoc, SessionView } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const STYLE_LABELS: Record<string, string> = {
  unrestricted: "libera",
  bare_noun_phrase: "sintagma nominale",
  definite_determiner_phrase: "con articolo determinativo",
  copular_sentence: "frase copulare",
  unknown: "non classificata",
};

export function styleLabel(style: string): string {
  return STYLE_LABELS[style] ?? style;
}

function errorBanner(state: AppState): string {
  if (!state.error) return "";
  return `<div class="error" role="alert">${escapeHtml(state.error)}</div>`;
}

// -- source screen --

export function renderSourceScreen(state: AppState): string {
  const styleOptions = state.styles
    .map(
      (s) => `<label class="style-option" title="${escapeHtml(s.descriptor)}">
        <input type="checkbox" name="styles" value="${s.style}" checked>
        ${escapeHtml(styleLabel(s.style))}
      </label>`,
    )
    .join("\n");
  return `
  ${errorBanner(state)}
  <section class="screen screen-source">
    <h1>Nuovo cruciverba</h1>
    <form id="source-form">
      <fieldset>
        <legend>Testo di partenza</legend>
        <textarea name="text" rows="8"
          placeholder="Incolla qui il testo didattico…"></textarea>
        <p class="or">oppure</p>
        <input type="text" name="title" placeholder="Titolo di una voce di Wikipedia">
      </fieldset>
      <fieldset>
        <legend>Generazione</legend>
        <input type="text" name="keyword" placeholder="Parola da definire" required>
        <div class="styles">${styleOptions}</div>
        <label>Definizioni per stile
          <input type="number" name="n" value="1" min="1" max="10">
        </label>
      </fieldset>
      <button type="submit" ${state.busy ? "disabled" : ""}>Genera definizioni</button>
    </form>
  </section>`;
}

// -- triage screen --

function badge(kind: string, text: string): string {
  return `<span class="badge badge-${kind}">${escapeHtml(text)}</span>`;
}

export function renderClueCard(clue: ClueView, session: SessionView): string {
  const decision = session.decisions[clue.id]?.decision ?? "pending";
  const v = clue.validation;
  const badges: string[] = [];
  if (v) {
    badges.push(
      v.style_matches_request
        ? badge("ok", `stile: ${styleLabel(v.detected_style)}`)
        : badge("warn",
            `stile richiesto ${styleLabel(clue.style)}, rilevato ${styleLabel(v.detected_style)}`),
    );
    if (v.answer_leak) {
      badges.push(badge("leak", "contiene la risposta"));
    }
    if (!v.length_ok) {
      badges.push(badge("warn", "lunghezza fuori norma"));
    }
  }
  if (clue.rougeL !== null) {
    badges.push(badge("info", `ROUGE-L ${clue.rougeL.toFixed(3)}`));
  }
  const ratingButtons = ["A", "B", "C", "D", "E"]
    .map(
      (code) => `<button type="button" class="rate ${clue.rating === code ? "active" : ""}"
        data-action="rate" data-clue="${clue.id}" data-rating="${code}">${code}</button>`,
    )
    .join("");
  return `
  <article class="clue-card decision-${decision}" data-clue-card="${clue.id}" tabindex="0">
    <header>
      <strong>${escapeHtml(clue.keyword)}</strong>
      ${badge("style", styleLabel(clue.style))}
      <span class="decision-state">${decision}</span>
    </header>
    <p class="clue-text">${escapeHtml(clue.clue)}</p>
    <div class="badges">${badges.join("\n")}</div>
    <div class="actions">
      <button type="button" data-action="accept" data-clue="${clue.id}">Accetta</button>
      <button type="button" data-action="reject" data-clue="${clue.id}">Scarta</button>
      <button type="button" data-action="edit" data-clue="${clue.id}">Modifica</button>
      <button type="button" data-action="regenerate" data-clue="${clue.id}"
        data-style="${clue.style}" data-keyword="${escapeHtml(clue.keyword)}">
        Rigenera stile</button>
    </div>
    <div class="rating" aria-label="valutazione A-E">${ratingButtons}</div>
  </article>`;
}

export function renderTriageScreen(state: AppState): string {
  const session = state.session;
  if (!session) return errorBanner(state);
  const cards = session.clues.map((c) => renderClueCard(c, session)).join("\n");
  const accepted = session.clues.filter((c) => {
    const d = session.decisions[c.id]?.decision;
    return d === "accepted" || d === "edited";
  }).length;
  return `
  ${errorBanner(state)}
  <section class="screen screen-triage">
    <h1>Definizioni generate</h1>
    <p class="context-preview">${escapeHtml(session.context.slice(0, 280))}…</p>
    <div class="cards">${cards || "<p>Nessuna definizione ancora.</p>"}</div>
    <form id="more-form">
      <input type="text" name="keyword" placeholder="Altra parola da definire">
      <button type="submit" ${state.busy ? "disabled" : ""}>Genera altre</button>
    </form>
    <footer>
      <button type="button" data-action="build" ${accepted === 0 || state.busy ? "disabled" : ""}>
        Costruisci cruciverba (${accepted} accettate)</button>
    </footer>
  </section>`;
}

// -- puzzle screen --

export const CELL = 32; // svg cell size in user units; the grid itself scales

export function renderGridSvg(layout: LayoutDoc, showLetters = true): string {
  const w = layout.width * CELL;
  const h = layout.height * CELL;
  const parts: string[] = [];
  for (const cell of layout.cells) {
    const x = cell.col * CELL;
    const y = cell.row * CELL;
    parts.push(
      `<rect class="cell" x="${x}" y="${y}" width="${CELL}" height="${CELL}"></rect>`,
    );
    if (cell.number !== undefined) {
      parts.push(
        `<text class="num" x="${x + 2}" y="${y + 9}">${cell.number}</text>`,
      );
    }
    if (showLetters) {
      parts.push(
        `<text class="letter" x="${x + CELL / 2}" y="${y + CELL / 2 + 6}"
          text-anchor="middle">${escapeHtml(cell.letter)}</text>`,
      );
    }
  }
  return `<svg class="grid" viewBox="0 0 ${w} ${h}" role="img"
    aria-label="griglia ${layout.width}x${layout.height}">${parts.join("")}</svg>`;
}

function clueList(title: string, clues: LayoutDoc["across"]): string {
  if (clues.length === 0) return "";
  const items = clues
    .map(
      (c) =>
        `<li value="${c.number}">${escapeHtml(c.clue)} (${c.answer_length})</li>`,
    )
    .join("");
  return `<div class="clue-list"><h2>${title}</h2><ol>${items}</ol></div>`;
}

export function renderPuzzleScreen(state: AppState): string {
  const puzzle = state.puzzle;
  if (!puzzle) return errorBanner(state);
  const unplaced =
    puzzle.unplaced.length > 0
      ? `<div class="warn" role="alert">Non collocate: ${puzzle.unplaced
          .map(escapeHtml)
          .join(", ")} — sostituiscile nella schermata precedente.</div>`
      : "";
  return `
  ${errorBanner(state)}
  <section class="screen screen-puzzle">
    <h1>Anteprima del cruciverba</h1>
    ${unplaced}
    ${renderGridSvg(puzzle.layout)}
    <div class="clues">
      ${clueList("Orizzontali", puzzle.layout.across)}
      ${clueList("Verticali", puzzle.layout.down)}
    </div>
    <footer>
      <button type="button" data-action="back">Torna alle definizioni</button>
      <a class="button" data-action="print" target="_blank"
        href="/v1/puzzles/${puzzle.puzzle_id}?format=html">Versione stampabile</a>
      <a class="button" download="cruciverba.json"
        href="/v1/puzzles/${puzzle.puzzle_id}?format=json">Esporta JSON</a>
    </footer>
  </section>`;
}

export function renderApp(state: AppState): string {
  switch (state.screen) {
    case "source":
      return renderSourceScreen(state);
    case "triage":
      return renderTriageScreen(state);
    case "puzzle":
      return renderPuzzleScreen(state);
  }
}
