/** Typed client for the annotation service HTTP API.
 *
 * The client depends only on the documented endpoints; the fetch function is
 * injectable so tests can stub the transport.
 */

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface SessionInfo {
  session_id: string;
  task_count: number;
}

export interface Progress {
  done: number;
  total: number;
}

/** Client view of a task. `done: true` means the session is finished and the
 * task fields are absent. Candidates arrive in blinded display order; the
 * payload never identifies which model produced which caption. */
export interface TaskView {
  done: boolean;
  task_id?: string;
  image_url?: string;
  candidates?: string[];
  rubric?: string;
  progress: Progress;
}

export interface SubmitResult {
  ok: boolean;
  task_id: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, init);
    const text = await res.text();
    if (!res.ok) {
      let code = `http-${res.status}`;
      let message = text;
      try {
        const obj = JSON.parse(text);
        if (obj?.error?.code) {
          code = obj.error.code;
          message = obj.error.message ?? text;
        }
      } catch {
        // non-JSON error body; keep the raw text as the message
      }
      throw new ApiError(code, message, res.status);
    }
    return JSON.parse(text) as T;
  }

  createSession(annotatorId: string, shuffleSeed = 0): Promise<SessionInfo> {
    return this.request<SessionInfo>("/api/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        annotator_id: annotatorId,
        shuffle_seed: shuffleSeed,
      }),
    });
  }

  nextTask(sessionId: string): Promise<TaskView> {
    return this.request<TaskView>(`/api/sessions/${sessionId}/next`);
  }

  submitRanking(
    sessionId: string,
    taskId: string,
    ranking: number[],
  ): Promise<SubmitResult> {
    return this.request<SubmitResult>(
      `/api/sessions/${sessionId}/tasks/${taskId}/ranking`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ ranking }),
      },
    );
  }

  adjudicate(
    sessionId: string,
    taskId: string,
    ranking: number[],
  ): Promise<SubmitResult & { adjudicated: boolean }> {
    return this.request(
      `/api/sessions/${sessionId}/tasks/${taskId}/adjudicate`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ ranking }),
      },
    );
  }

  /** Raw JSONL export of completed preference records. */
  async exportPreferences(): Promise<string> {
    const res = await this.fetchFn(this.baseUrl + "/api/export");
    const text = await res.text();
    if (!res.ok) {
      let code = `http-${res.status}`;
      try {
        code = JSON.parse(text)?.error?.code ?? code;
      } catch {
        // keep fallback code
      }
      throw new ApiError(code, text, res.status);
    }
    return text;
  }
}
