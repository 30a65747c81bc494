/** Browser entry point: wires the pure ranking board and session controller
 * to the DOM. Served by `reconscore annotate serve --ui frontend/public`
 * after `npm run build`. */

import { ApiClient, ApiError, TaskView } from "./api.js";
import { BoardState, createBoard, handleKey, isComplete, ranking } from "./ranking.js";
import { renderDone, renderTask } from "./render.js";
import { SessionController } from "./session.js";

const api = new ApiClient("");
const controller = new SessionController(api);

let view: TaskView | null = null;
let board: BoardState | null = null;

function draw(): void {
  const root = document.getElementById("app");
  const status = document.getElementById("status");
  if (!root || !status) return;
  if (view === null) return;
  if (view.done || board === null) {
    root.innerHTML = renderDone(view.progress);
  } else {
    root.innerHTML = renderTask(view, board);
  }
  status.textContent =
    controller.pending.length > 0
      ? `offline: ${controller.pending.length} submission(s) queued`
      : "";
}

async function loadNext(): Promise<void> {
  view = await controller.next();
  board =
    !view.done && view.candidates ? createBoard(view.candidates) : null;
  draw();
}

async function submitCurrent(): Promise<void> {
  if (view === null || board === null || !view.task_id) return;
  if (!isComplete(board)) return;
  const outcome = await controller.submit(
    view.task_id,
    ranking(board),
    board.candidates.length,
  );
  if (outcome === "submitted") {
    await loadNext();
  } else {
    draw(); // queued offline; keep the task on screen
  }
}

document.addEventListener("keydown", (event) => {
  if (board === null) return;
  if (event.key === "Enter") {
    void submitCurrent().catch((err) => {
      const status = document.getElementById("status");
      if (status && err instanceof ApiError) {
        status.textContent = `${err.code}: ${err.message}`;
      }
    });
    return;
  }
  const next = handleKey(board, event.key);
  if (next !== board) {
    board = next;
    draw();
    event.preventDefault();
  }
});

async function boot(): Promise<void> {
  const name =
    window.prompt("Annotator id:", "annotator") ?? "annotator";
  await controller.start(name);
  await loadNext();
}

void boot().catch((err) => {
  const status = document.getElementById("status");
  if (status) status.textContent = String(err);
});
