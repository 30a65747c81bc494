import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, FetchLike } from "../src/api.js";
import { SessionController } from "../src/session.js";

interface Call {
  path: string;
  body?: unknown;
}

/** In-memory stand-in for the service: records calls, can simulate being
 * offline, and enforces the already-completed rule. */
function stubServer() {
  const calls: Call[] = [];
  const completed = new Set<string>();
  const state = { offline: false };

  const fetchFn: FetchLike = async (input, init) => {
    const path = input.replace(/^https?:\/\/[^/]+/, "");
    if (state.offline) throw new TypeError("fetch failed");
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push({ path, body });

    const json = (status: number, payload: unknown) =>
      new Response(JSON.stringify(payload), {
        status,
        headers: { "content-type": "application/json" },
      });

    if (path === "/api/sessions") {
      return json(200, { session_id: "s1", task_count: 2 });
    }
    const ranking = path.match(/\/tasks\/([^/]+)\/ranking$/);
    if (ranking) {
      const taskId = ranking[1]!;
      if (completed.has(taskId)) {
        return json(400, {
          error: { code: "already-completed", message: taskId },
        });
      }
      const k = 3;
      const sorted = [...(body.ranking as number[])].sort((a, b) => a - b);
      if (!sorted.every((v, i) => v === i + 1) || sorted.length !== k) {
        return json(400, {
          error: { code: "not-a-permutation", message: "bad ranking" },
        });
      }
      completed.add(taskId);
      return json(200, { ok: true, task_id: taskId });
    }
    if (path.endsWith("/next")) {
      return json(200, {
        done: false,
        task_id: "t1",
        image_url: "/images/x",
        candidates: ["a", "b", "c"],
        rubric: "rank",
        progress: { done: completed.size, total: 2 },
      });
    }
    return json(404, { error: { code: "unknown", message: path } });
  };

  return { fetchFn, calls, completed, state };
}

function makeController() {
  const server = stubServer();
  const controller = new SessionController(
    new ApiClient("http://svc", server.fetchFn),
  );
  return { server, controller };
}

describe("session controller", () => {
  it("requires start() before use", async () => {
    const { controller } = makeController();
    await expect(controller.next()).rejects.toThrow(/not started/);
  });

  it("submits a valid ranking straight through", async () => {
    const { server, controller } = makeController();
    await controller.start("alice", 7);
    expect(await controller.submit("t1", [2, 1, 3], 3)).toBe("submitted");
    expect(server.completed.has("t1")).toBe(true);
    expect(controller.pending).toHaveLength(0);
  });

  it("rejects non-permutations client-side without calling the server", async () => {
    const { server, controller } = makeController();
    await controller.start("alice");
    const before = server.calls.length;
    await expect(controller.submit("t1", [1, 1, 2], 3)).rejects.toMatchObject({
      code: "not-a-permutation",
    });
    expect(server.calls.length).toBe(before);
  });

  it("buffers submissions while offline and flushes in order", async () => {
    const { server, controller } = makeController();
    await controller.start("alice");
    server.state.offline = true;
    expect(await controller.submit("t1", [1, 2, 3], 3)).toBe("queued");
    expect(await controller.submit("t2", [3, 2, 1], 3)).toBe("queued");
    expect(controller.pending.map((p) => p.taskId)).toEqual(["t1", "t2"]);

    await expect(controller.next()).rejects.toThrow(/offline/);

    server.state.offline = false;
    const view = await controller.next(); // flushes, then fetches
    expect(controller.pending).toHaveLength(0);
    expect(server.completed.has("t1")).toBe(true);
    expect(server.completed.has("t2")).toBe(true);
    expect(view.done).toBe(false);
    expect(view.progress.done).toBe(2);
  });

  it("treats already-completed during flush as success", async () => {
    const { server, controller } = makeController();
    await controller.start("alice");
    server.state.offline = true;
    await controller.submit("t1", [1, 2, 3], 3);
    // The request actually landed before the connection dropped:
    server.completed.add("t1");
    server.state.offline = false;
    expect(await controller.flush()).toBe(1);
    expect(controller.pending).toHaveLength(0);
  });

  it("surfaces server validation errors from the buffer", async () => {
    const { server, controller } = makeController();
    await controller.start("alice");
    server.state.offline = true;
    // bypass client validation to simulate a stale client
    controller.pending.push({ taskId: "t1", ranking: [9, 9, 9] });
    server.state.offline = false;
    await expect(controller.flush()).rejects.toMatchObject({
      code: "not-a-permutation",
    });
    expect(controller.pending).toHaveLength(0);
  });
});

describe("api client errors", () => {
  it("wraps error payloads into ApiError with the service code", async () => {
    const fetchFn: FetchLike = async () =>
      new Response(
        JSON.stringify({ error: { code: "unknown-session", message: "nope" } }),
        { status: 400 },
      );
    const api = new ApiClient("http://svc", fetchFn);
    await expect(api.nextTask("bad")).rejects.toMatchObject({
      code: "unknown-session",
      status: 400,
    });
    await expect(api.nextTask("bad")).rejects.toBeInstanceOf(ApiError);
  });

  it("falls back to an http-status code for non-JSON bodies", async () => {
    const fetchFn: FetchLike = async () =>
      new Response("gateway exploded", { status: 502 });
    const api = new ApiClient("http://svc", fetchFn);
    await expect(api.exportPreferences()).rejects.toMatchObject({
      code: "http-502",
    });
  });
});
