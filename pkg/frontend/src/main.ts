// DOM glue: mounts the rendered screens, wires events, and keeps the session
// id in the URL hash so a refresh restores the full view from GET endpoints.

import { ApiClient } from "./api.js";
import { ratingForKey, Store } from "./state.js";
import { renderApp } from "./render.js";
import type { StyleValue } from "./types.js";

const api = new ApiClient("");
const store = new Store(api);
const root = document.getElementById("app")!;

let lastKeyword = "";

function mount(): void {
  root.innerHTML = renderApp(store.state);
  const session = store.state.session;
  window.location.hash = session ? `#s=${session.id}` : "";
}

store.subscribe(mount);

function selectedStyles(form: HTMLFormElement): StyleValue[] {
  return Array.from(
    form.querySelectorAll<HTMLInputElement>('input[name="styles"]:checked'),
  ).map((el) => el.value as StyleValue);
}

root.addEventListener("submit", async (event) => {
  const form = event.target as HTMLFormElement;
  event.preventDefault();
  if (form.id === "source-form") {
    const data = new FormData(form);
    const text = String(data.get("text") ?? "").trim();
    const title = String(data.get("title") ?? "").trim();
    const keyword = String(data.get("keyword") ?? "").trim();
    const n = Number(data.get("n") ?? 1);
    const styles = selectedStyles(form);
    lastKeyword = keyword;
    await store.startSession(text ? { text } : { title });
    if (store.state.session && keyword) {
      await store.generate(keyword, styles, n);
    }
  } else if (form.id === "more-form") {
    const data = new FormData(form);
    const keyword = String(data.get("keyword") ?? "").trim() || lastKeyword;
    if (keyword) {
      lastKeyword = keyword;
      await store.generate(keyword, ["unrestricted"], 1);
    }
  }
});

root.addEventListener("click", async (event) => {
  const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!target) return;
  const action = target.dataset.action;
  const clueId = target.dataset.clue;
  if (action === "accept" && clueId) {
    await store.decide(clueId, "accept");
  } else if (action === "reject" && clueId) {
    await store.decide(clueId, "reject");
  } else if (action === "edit" && clueId) {
    const current = store.state.session?.clues.find((c) => c.id === clueId);
    const text = window.prompt("Nuovo testo della definizione:", current?.clue ?? "");
    if (text && text.trim()) {
      await store.edit(clueId, text.trim());
    }
  } else if (action === "rate" && clueId && target.dataset.rating) {
    await store.rate(clueId, target.dataset.rating);
  } else if (action === "regenerate" && target.dataset.keyword) {
    await store.regenerate(
      target.dataset.keyword,
      (target.dataset.style ?? "unrestricted") as StyleValue,
    );
  } else if (action === "build") {
    await store.buildPuzzle();
  } else if (action === "back") {
    store.backToTriage();
  }
});

// A-E on a focused clue card stores that rating (one key per card).
document.addEventListener("keydown", async (event) => {
  if (store.state.screen !== "triage") return;
  if ((event.target as HTMLElement).tagName in { INPUT: 1, TEXTAREA: 1 }) return;
  const rating = ratingForKey(event.key);
  const card = (event.target as HTMLElement).closest<HTMLElement>("[data-clue-card]");
  if (rating && card?.dataset.clueCard) {
    await store.rate(card.dataset.clueCard, rating);
  }
});

async function boot(): Promise<void> {
  await store.loadReferenceData();
  const match = window.location.hash.match(/#s=(s\d+)/);
  if (match) {
    await store.restore(match[1]);
  }
  mount();
}

void boot();
