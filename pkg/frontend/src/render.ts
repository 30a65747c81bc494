/** HTML rendering for the ranking view, kept as pure string functions so the
 * markup is testable without a DOM. */

import { TaskView } from "./api.js";
import { BoardState } from "./ranking.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const KEY_HELP =
  "↑/↓ or k/j: move · 1-9: assign rank · " +
  "Backspace: clear · Enter: submit";

export function renderTask(view: TaskView, board: BoardState): string {
  const progress = `${view.progress.done} / ${view.progress.total}`;
  const rows = board.candidates
    .map((text, i) => {
      const cursor = i === board.cursor ? " cursor" : "";
      const rank = board.ranks[i];
      const badge = rank === null ? "–" : String(rank);
      return (
        `<li class="candidate${cursor}" data-slot="${i}">` +
        `<span class="rank">${badge}</span>` +
        `<span class="text">${escapeHtml(text)}</span></li>`
      );
    })
    .join("\n");
  return [
    `<p class="progress">Task ${escapeHtml(view.task_id ?? "")} · ${progress}</p>`,
    `<p class="rubric">${escapeHtml(view.rubric ?? "")}</p>`,
    `<img class="task-image" src="${escapeHtml(view.image_url ?? "")}" alt="scene to caption">`,
    `<ol class="candidates">\n${rows}\n</ol>`,
    `<p class="help">${KEY_HELP}</p>`,
  ].join("\n");
}

export function renderDone(progress: { done: number; total: number }): string {
  return (
    `<p class="done">All ${progress.total} tasks completed. ` +
    "Thank you — you can close this window.</p>"
  );
}
