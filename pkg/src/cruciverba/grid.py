"""Criss-cross crossword construction by deterministic backtracking search.

Words connect only through shared-letter crossings (no black-square schema
grids). The search branches over every (entry, placement) pair that legally
crosses the current partial layout, keeps the best placement count found,
and prunes with a remaining-entries bound, so small instances are solved to
optimality while large ones degrade gracefully under the node budget.
"""
from __future__ import annotations

import html as html_mod
import json
import random
import unicodedata
from dataclasses import dataclass, field, replace

from .errors import EmptyAfterNormalization, InvalidLayout, NoPlacement

ACROSS = "across"
DOWN = "down"

# Latin letters that NFKD alone does not reduce to A-Z
_EXTRA_FOLD = {"Æ": "AE", "Œ": "OE", "ß": "SS", "Ø": "O", "Đ": "D", "Ð": "D", "Ł": "L", "Þ": "TH"}


def normalize_answer(raw: str) -> str:
    """Grid form of an answer: uppercase, accents folded, spaces removed."""
    decomposed = unicodedata.normalize("NFKD", raw.upper())
    out = []
    for ch in decomposed:
        if unicodedata.combining(ch) or ch.isspace():
            continue
        if ch in _EXTRA_FOLD:
            out.append(_EXTRA_FOLD[ch])
        elif "A" <= ch <= "Z":
            out.append(ch)
        else:
            raise EmptyAfterNormalization(
                f"answer {raw!r} contains character {ch!r} with no grid letter form")
    result = "".join(out)
    if not result:
        raise EmptyAfterNormalization(f"answer {raw!r} normalizes to nothing")
    return result


@dataclass(frozen=True)
class Entry:
    id: str
    answer_display: str
    answer_grid: str
    clue: str

    def __post_init__(self):
        if len(self.answer_grid) < 2 or not all("A" <= c <= "Z" for c in self.answer_grid):
            raise ValueError(f"answer_grid must match [A-Z]{{2,}}, got {self.answer_grid!r}")

    @classmethod
    def from_answer(cls, id: str, answer: str, clue: str) -> "Entry":
        return cls(id=id, answer_display=answer, answer_grid=normalize_answer(answer),
                   clue=clue)


@dataclass(frozen=True)
class Placement:
    entry_id: str
    row: int
    col: int
    direction: str  # ACROSS | DOWN

    def cells(self, length: int) -> list[tuple[int, int]]:
        if self.direction == ACROSS:
            return [(self.row, self.col + k) for k in range(length)]
        return [(self.row + k, self.col) for k in range(length)]


@dataclass(frozen=True)
class CrosswordLayout:
    width: int
    height: int
    placements: list[Placement]
    intersections: list[tuple[str, str, tuple[int, int]]]


@dataclass(frozen=True)
class GridConfig:
    max_width: int = 25
    max_height: int = 25
    node_budget: int = 100_000
    seed: int = 0


@dataclass(frozen=True)
class BuildResult:
    layout: CrosswordLayout
    unplaced: list[str]  # entry ids, input order
    budget_exhausted: bool
    nodes_used: int


class _BudgetExhausted(Exception):
    pass


class _Searcher:
    def __init__(self, entries: list[Entry], config: GridConfig):
        self.entries = entries
        self.config = config
        self.rng = random.Random(config.seed)
        self.cells: dict[tuple[int, int], str] = {}
        self.slots: dict[tuple[int, int], dict[str, int]] = {}
        self.placed: list[tuple[int, Placement]] = []
        self.best: list[tuple[int, Placement]] = []
        self.nodes = 0
        self.exhausted = False

    # -- geometry --

    def _bbox_with(self, coords: list[tuple[int, int]]) -> tuple[int, int]:
        rows = [r for r, _ in coords] + [r for r, _ in self.cells]
        cols = [c for _, c in coords] + [c for _, c in self.cells]
        return max(rows) - min(rows) + 1, max(cols) - min(cols) + 1

    def _fits(self, entry: Entry, row: int, col: int, direction: str) -> int | None:
        """Crossing count when the placement is legal, else None."""
        word = entry.answer_grid
        n = len(word)
        coords = (Placement("", row, col, direction)).cells(n)
        height, width = self._bbox_with(coords)
        if width > self.config.max_width or height > self.config.max_height:
            return None
        dr, dc = (0, 1) if direction == ACROSS else (1, 0)
        before = (row - dr, col - dc)
        after = (row + dr * n, col + dc * n)
        if before in self.cells or after in self.cells:
            return None
        crossings = 0
        for k, coord in enumerate(coords):
            existing = self.cells.get(coord)
            if existing is not None:
                if existing != word[k]:
                    return None
                if self.slots[coord].get(direction) is not None:
                    return None  # a same-direction word already covers this cell
                crossings += 1
            else:
                side_a = (coord[0] - dc, coord[1] - dr)
                side_b = (coord[0] + dc, coord[1] + dr)
                if side_a in self.cells or side_b in self.cells:
                    return None
        return crossings

    def _apply(self, entry_idx: int, row: int, col: int, direction: str) -> Placement:
        entry = self.entries[entry_idx]
        placement = Placement(entry.id, row, col, direction)
        for k, coord in enumerate(placement.cells(len(entry.answer_grid))):
            self.cells.setdefault(coord, entry.answer_grid[k])
            self.slots.setdefault(coord, {})[direction] = entry_idx
        self.placed.append((entry_idx, placement))
        return placement

    def _undo(self, placement: Placement, entry_idx: int) -> None:
        entry = self.entries[entry_idx]
        self.placed.pop()
        for coord in placement.cells(len(entry.answer_grid)):
            slot = self.slots[coord]
            if slot.get(placement.direction) == entry_idx:
                del slot[placement.direction]
            if not slot:
                del self.slots[coord]
                del self.cells[coord]

    # -- search --

    def _candidates(self, entry: Entry) -> list[tuple[tuple, int, int, str]]:
        """Legal crossing placements, scored; deterministic enumeration order."""
        word = entry.answer_grid
        found: dict[tuple[int, int, str], int] = {}
        for (r, c) in sorted(self.cells):
            letter = self.cells[(r, c)]
            for i, ch in enumerate(word):
                if ch != letter:
                    continue
                for direction in (ACROSS, DOWN):
                    row, col = (r, c - i) if direction == ACROSS else (r - i, c)
                    key = (row, col, direction)
                    if key in found:
                        continue
                    crossings = self._fits(entry, row, col, direction)
                    if crossings:
                        found[key] = crossings
        scored = []
        for (row, col, direction), crossings in found.items():
            coords = Placement("", row, col, direction).cells(len(word))
            h, w = self._bbox_with(coords)
            score = (-crossings, h * w, self.rng.random())
            scored.append((score, row, col, direction))
        return scored

    def _search(self, remaining: list[int]) -> None:
        if len(self.placed) > len(self.best):
            self.best = list(self.placed)
        if not remaining or len(self.placed) + len(remaining) <= len(self.best):
            return
        moves: list[tuple[tuple, int, int, int, str]] = []
        if not self.placed:
            directions = [ACROSS]
            if self.config.max_width != self.config.max_height:
                directions.append(DOWN)
            seen_answers = set()
            for idx in remaining:
                word = self.entries[idx].answer_grid
                if word in seen_answers:
                    continue
                seen_answers.add(word)
                for direction in directions:
                    n = len(word)
                    w, h = (n, 1) if direction == ACROSS else (1, n)
                    if w <= self.config.max_width and h <= self.config.max_height:
                        moves.append(((0, 0, 0.0), idx, 0, 0, direction))
        else:
            seen_answers = set()
            for idx in remaining:
                entry = self.entries[idx]
                if entry.answer_grid in seen_answers:
                    continue
                seen_answers.add(entry.answer_grid)
                for score, row, col, direction in self._candidates(entry):
                    moves.append((score, idx, row, col, direction))
        moves.sort(key=lambda m: (m[0], m[1], m[2], m[3], m[4]))
        for _, idx, row, col, direction in moves:
            self.nodes += 1
            if self.nodes > self.config.node_budget:
                raise _BudgetExhausted()
            placement = self._apply(idx, row, col, direction)
            self._search([i for i in remaining if i != idx])
            self._undo(placement, idx)

    def run(self) -> None:
        order = sorted(range(len(self.entries)),
                       key=lambda i: (-len(self.entries[i].answer_grid), i))
        try:
            self._search(order)
        except _BudgetExhausted:
            self.exhausted = True


def build(entries: list[Entry], config: GridConfig | None = None) -> BuildResult:
    """Place a maximal-found subset of entries; deterministic for a fixed
    (entries order, seed)."""
    config = config or GridConfig()
    if not 1 <= len(entries) <= 50:
        raise ValueError("build accepts between 1 and 50 entries")
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise ValueError("entry ids must be unique")
    searcher = _Searcher(entries, config)
    searcher.run()
    if not searcher.best:
        raise NoPlacement(
            f"no entry fits within {config.max_width}x{config.max_height}")
    layout = _materialize(entries, searcher.best)
    placed_ids = {p.entry_id for p in layout.placements}
    unplaced = [e.id for e in entries if e.id not in placed_ids]
    return BuildResult(layout=layout, unplaced=unplaced,
                       budget_exhausted=searcher.exhausted, nodes_used=searcher.nodes)


def _materialize(entries: list[Entry], placed: list[tuple[int, Placement]]) -> CrosswordLayout:
    """Shift placements to a (0,0) origin and record the crossing structure."""
    by_id = {e.id: e for e in entries}
    all_cells: list[tuple[int, int]] = []
    for idx, p in placed:
        all_cells.extend(p.cells(len(entries[idx].answer_grid)))
    min_r = min(r for r, _ in all_cells)
    min_c = min(c for _, c in all_cells)
    placements = [replace(p, row=p.row - min_r, col=p.col - min_c) for _, p in placed]
    height = max(r for r, _ in all_cells) - min_r + 1
    width = max(c for _, c in all_cells) - min_c + 1
    coverage: dict[tuple[int, int], list[str]] = {}
    for p in placements:
        for coord in p.cells(len(by_id[p.entry_id].answer_grid)):
            coverage.setdefault(coord, []).append(p.entry_id)
    intersections = []
    for coord in sorted(coverage):
        owners = coverage[coord]
        if len(owners) == 2:
            a, b = sorted(owners)
            intersections.append((a, b, coord))
    return CrosswordLayout(width=width, height=height, placements=placements,
                           intersections=intersections)


def validate_layout(layout: CrosswordLayout,
                    entries: list[Entry]) -> tuple[bool, list[str]]:
    """Checks every structural invariant; the test oracle and render guard."""
    issues: list[str] = []
    by_id = {e.id: e for e in entries}
    cell_letters: dict[tuple[int, int], str] = {}
    cell_owners: dict[tuple[int, int], list[Placement]] = {}
    for p in layout.placements:
        entry = by_id.get(p.entry_id)
        if entry is None:
            issues.append(f"placement references unknown entry {p.entry_id}")
            continue
        coords = p.cells(len(entry.answer_grid))
        for (r, c), letter in zip(coords, entry.answer_grid):
            if not (0 <= r < layout.height and 0 <= c < layout.width):
                issues.append(f"{p.entry_id} leaves the grid at ({r},{c})")
            prev = cell_letters.get((r, c))
            if prev is not None and prev != letter:
                issues.append(f"letter clash at ({r},{c}): {prev} vs {letter}")
            cell_letters[(r, c)] = prev or letter
            cell_owners.setdefault((r, c), []).append(p)
    # same-direction exclusivity
    for coord, owners in sorted(cell_owners.items()):
        directions = [p.direction for p in owners]
        if len(directions) != len(set(directions)):
            issues.append(f"same-direction words share cell {coord}")
        if len(owners) > 2:
            issues.append(f"more than two words cover cell {coord}")
    # adjacency: two filled neighbors along an axis must share a word in that axis
    for (r, c) in sorted(cell_letters):
        for (nr, nc), direction in (((r, c + 1), ACROSS), ((r + 1, c), DOWN)):
            if (nr, nc) not in cell_letters:
                continue
            here = {p.entry_id for p in cell_owners[(r, c)] if p.direction == direction}
            there = {p.entry_id for p in cell_owners[(nr, nc)] if p.direction == direction}
            if not (here & there):
                issues.append(
                    f"cells ({r},{c}) and ({nr},{nc}) touch without a shared "
                    f"{direction} word")
    # intersections must mirror the actual crossing cells
    actual = set()
    for coord, owners in cell_owners.items():
        if len(owners) == 2:
            a, b = sorted(p.entry_id for p in owners)
            actual.add((a, b, coord))
    declared = {(a, b, tuple(cell)) for a, b, cell in layout.intersections}
    if actual != declared:
        issues.append("intersection list does not match the placements")
    # connectivity over the crossing graph
    if len(layout.placements) >= 2:
        parent = {p.entry_id: p.entry_id for p in layout.placements}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b, _ in actual:
            if a in parent and b in parent:
                parent[find(a)] = find(b)
        roots = {find(p.entry_id) for p in layout.placements}
        if len(roots) != 1:
            issues.append("layout is not connected")
    return (not issues, issues)


# -- rendering --

def _numbering(layout: CrosswordLayout, entries: list[Entry]
               ) -> tuple[dict[tuple[int, int], int], list[tuple[int, Placement]]]:
    """Classic scan-order numbering; a cell starting both directions gets one number."""
    starts: dict[tuple[int, int], list[Placement]] = {}
    for p in layout.placements:
        starts.setdefault((p.row, p.col), []).append(p)
    numbers: dict[tuple[int, int], int] = {}
    numbered: list[tuple[int, Placement]] = []
    n = 0
    for coord in sorted(starts):
        n += 1
        numbers[coord] = n
        for p in sorted(starts[coord], key=lambda q: q.direction):
            numbered.append((n, p))
    return numbers, numbered


def _letter_grid(layout: CrosswordLayout, entries: list[Entry]) -> list[list[str]]:
    by_id = {e.id: e for e in entries}
    grid = [["#"] * layout.width for _ in range(layout.height)]
    for p in layout.placements:
        for (r, c), letter in zip(p.cells(len(by_id[p.entry_id].answer_grid)),
                                  by_id[p.entry_id].answer_grid):
            grid[r][c] = letter
    return grid


def render(layout: CrosswordLayout, entries: list[Entry], format: str = "text") -> bytes:
    """Rendered puzzle. ``text`` is a monospace grid plus clue lists, ``json``
    the schema the review client consumes, ``html`` a printable page."""
    ok, issues = validate_layout(layout, entries)
    if not ok:
        raise InvalidLayout("; ".join(issues))
    if format == "text":
        return _render_text(layout, entries).encode("utf-8")
    if format == "json":
        return (json.dumps(_layout_document(layout, entries), ensure_ascii=False,
                           indent=2) + "\n").encode("utf-8")
    if format == "html":
        return _render_html(layout, entries).encode("utf-8")
    raise ValueError(f"unknown render format: {format!r}")


def _clue_lists(layout: CrosswordLayout, entries: list[Entry]):
    by_id = {e.id: e for e in entries}
    _, numbered = _numbering(layout, entries)
    across = [(n, by_id[p.entry_id], p) for n, p in numbered if p.direction == ACROSS]
    down = [(n, by_id[p.entry_id], p) for n, p in numbered if p.direction == DOWN]
    return across, down


def _render_text(layout: CrosswordLayout, entries: list[Entry]) -> str:
    grid = _letter_grid(layout, entries)
    lines = [" ".join(row) for row in grid]
    across, down = _clue_lists(layout, entries)
    parts = ["\n".join(lines), ""]
    if across:
        parts.append("Across")
        parts.extend(f"{n}. {e.clue} ({len(e.answer_grid)})" for n, e, _ in across)
        parts.append("")
    if down:
        parts.append("Down")
        parts.extend(f"{n}. {e.clue} ({len(e.answer_grid)})" for n, e, _ in down)
        parts.append("")
    return "\n".join(parts)


def _layout_document(layout: CrosswordLayout, entries: list[Entry]) -> dict:
    by_id = {e.id: e for e in entries}
    numbers, _ = _numbering(layout, entries)
    grid = _letter_grid(layout, entries)
    cells = []
    for r in range(layout.height):
        for c in range(layout.width):
            if grid[r][c] != "#":
                cell = {"row": r, "col": c, "letter": grid[r][c]}
                if (r, c) in numbers:
                    cell["number"] = numbers[(r, c)]
                cells.append(cell)
    across, down = _clue_lists(layout, entries)

    def clue_doc(n: int, e: Entry, p: Placement) -> dict:
        return {"number": n, "entry_id": e.id, "clue": e.clue,
                "answer_length": len(e.answer_grid), "row": p.row, "col": p.col}

    return {
        "version": 1,
        "width": layout.width,
        "height": layout.height,
        "cells": cells,
        "across": [clue_doc(n, e, p) for n, e, p in across],
        "down": [clue_doc(n, e, p) for n, e, p in down],
        "intersections": [
            {"a": a, "b": b, "row": cell[0], "col": cell[1]}
            for a, b, cell in layout.intersections
        ],
    }


_HTML_PAGE = """<!DOCTYPE html>
<html lang="it">
<head>
<meta charset="utf-8">
<title>Cruciverba</title>
<style>
body {{ font-family: Georgia, serif; margin: 2em; }}
table.grid {{ border-collapse: collapse; }}
table.grid td {{ width: 2em; height: 2em; text-align: center; vertical-align: middle;
  border: 1px solid #999; position: relative; font-size: 1.1em; }}
table.grid td.block {{ border: none; background: transparent; }}
table.grid td span.num {{ position: absolute; top: 1px; left: 2px; font-size: 0.5em; }}
div.clues {{ margin-top: 1.5em; }}
h2 {{ font-size: 1.1em; margin-bottom: 0.3em; }}
ol {{ margin: 0; padding-left: 1.5em; }}
@media print {{ body {{ margin: 0.5em; }} }}
</style>
</head>
<body>
<table class="grid">
{rows}
</table>
<div class="clues">
{clues}
</div>
</body>
</html>
"""


def _render_html(layout: CrosswordLayout, entries: list[Entry]) -> str:
    numbers, _ = _numbering(layout, entries)
    grid = _letter_grid(layout, entries)
    rows = []
    for r in range(layout.height):
        tds = []
        for c in range(layout.width):
            if grid[r][c] == "#":
                tds.append('<td class="block"></td>')
            elif (r, c) in numbers:
                tds.append(f'<td><span class="num">{numbers[(r, c)]}</span></td>')
            else:
                tds.append("<td></td>")
        rows.append("<tr>" + "".join(tds) + "</tr>")
    across, down = _clue_lists(layout, entries)
    sections = []
    for title, clues in (("Orizzontali", across), ("Verticali", down)):
        if clues:
            items = "".join(
                f'<li value="{n}">{html_mod.escape(e.clue)} ({len(e.answer_grid)})</li>'
                for n, e, _ in clues)
            sections.append(f"<h2>{title}</h2><ol>{items}</ol>")
    return _HTML_PAGE.format(rows="\n".join(rows), clues="\n".join(sections))
