/** Pure HTML-string rendering of the session state (no DOM dependency). */

import { segmentize } from "./spans.js";
import { SessionState } from "./session.js";
import { DIFFICULTIES, options } from "./types.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderText(text: string, span: [number, number] | null): string {
  return segmentize(text, span)
    .map((seg) =>
      seg.highlighted
        ? `<mark>${escapeHtml(seg.text)}</mark>`
        : escapeHtml(seg.text),
    )
    .join("");
}

export function render(state: SessionState): string {
  if (state.phase === "loading") return `<p class="status">loading…</p>`;
  if (state.phase === "done")
    return `<p class="status">all questions annotated (${state.submitted} submitted)</p>`;
  if (state.phase === "error")
    return `<p class="status error">${escapeHtml(state.message ?? "error")}</p>`;
  const q = state.question;
  if (q === null) return `<p class="status">no question</p>`;
  const opts = options(q)
    .map(
      (opt, i) =>
        `<li><label><input type="radio" name="option" value="${i}"` +
        `${state.chosenOption === i ? " checked" : ""}> ${escapeHtml(opt)}</label></li>`,
    )
    .join("");
  const diffs = DIFFICULTIES.map(
    (d) =>
      `<label><input type="radio" name="difficulty" value="${d}"` +
      `${state.difficulty === d ? " checked" : ""}> ${d}</label>`,
  ).join(" ");
  const message = state.message
    ? `<p class="message">${escapeHtml(state.message)}</p>`
    : "";
  return [
    `<p class="remaining">${state.remaining} remaining</p>`,
    `<section id="passage" data-qid="${escapeHtml(q.id)}">` +
      renderText(q.article, state.passageSpan) +
      `</section>`,
    `<section id="question">` +
      renderText(q.question, state.questionSpan) +
      `</section>`,
    `<ol class="options">${opts}</ol>`,
    `<div class="difficulty">${diffs}</div>`,
    message,
    `<button id="submit"${state.phase === "submitting" ? " disabled" : ""}>submit</button>`,
  ].join("\n");
}
