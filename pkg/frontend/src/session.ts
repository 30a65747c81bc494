/** Session controller: one annotator working through their task queue.
 *
 * Submissions that fail at the transport level (server unreachable) are held
 * in an offline retry buffer and flushed before the next server interaction.
 * Validation failures (not a permutation, already completed) are surfaced
 * immediately and never buffered.
 */

import { ApiClient, ApiError, TaskView } from "./api.js";
import { isPermutation } from "./ranking.js";

export interface PendingSubmission {
  taskId: string;
  ranking: number[];
}

export type SubmitOutcome = "submitted" | "queued";

export class SessionController {
  private sessionId: string | null = null;
  private taskCount = 0;
  readonly pending: PendingSubmission[] = [];

  constructor(private readonly api: ApiClient) {}

  get id(): string {
    if (this.sessionId === null) throw new Error("session not started");
    return this.sessionId;
  }

  get totalTasks(): number {
    return this.taskCount;
  }

  async start(annotatorId: string, shuffleSeed = 0): Promise<string> {
    const info = await this.api.createSession(annotatorId, shuffleSeed);
    this.sessionId = info.session_id;
    this.taskCount = info.task_count;
    return info.session_id;
  }

  /** Retry buffered submissions in order. A server-side "already-completed"
   * means an earlier attempt landed before the connection dropped, so it
   * counts as success. Stops at the first still-failing submission. */
  async flush(): Promise<number> {
    let flushed = 0;
    while (this.pending.length > 0) {
      const next = this.pending[0]!;
      try {
        await this.api.submitRanking(this.id, next.taskId, next.ranking);
      } catch (err) {
        if (err instanceof ApiError && err.code === "already-completed") {
          // fall through: the submission is on the server
        } else if (err instanceof ApiError) {
          this.pending.shift();
          throw err;
        } else {
          return flushed; // still offline; keep the buffer intact
        }
      }
      this.pending.shift();
      flushed += 1;
    }
    return flushed;
  }

  async next(): Promise<TaskView> {
    await this.flush();
    if (this.pending.length > 0) {
      throw new Error("offline: buffered submissions not yet delivered");
    }
    return this.api.nextTask(this.id);
  }

  async submit(taskId: string, ranking: number[], k: number): Promise<SubmitOutcome> {
    if (!isPermutation(ranking, k)) {
      throw new ApiError(
        "not-a-permutation",
        `ranking must be a permutation of 1..${k}`,
        0,
      );
    }
    await this.flush();
    if (this.pending.length > 0) {
      this.pending.push({ taskId, ranking });
      return "queued";
    }
    try {
      await this.api.submitRanking(this.id, taskId, ranking);
      return "submitted";
    } catch (err) {
      if (err instanceof ApiError) throw err;
      this.pending.push({ taskId, ranking });
      return "queued";
    }
  }
}
