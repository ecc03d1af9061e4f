/** In-memory API stub for tests: routes requests to canned JSON handlers. */

import type { FetchLike } from "./api.js";

export type StubHandler = (init?: RequestInit) => {
  status?: number;
  body?: unknown;
};

export class StubServer {
  readonly calls: { method: string; path: string; body?: unknown }[] = [];
  private routes = new Map<string, StubHandler>();
  failNetwork = false;

  on(method: string, path: string, handler: StubHandler): this {
    this.routes.set(`${method} ${path}`, handler);
    return this;
  }

  fetch: FetchLike = async (input, init) => {
    if (this.failNetwork) {
      throw new TypeError("fetch failed");
    }
    const method = init?.method ?? "GET";
    const path = input.replace(/^https?:\/\/[^/]+/, "");
    let parsedBody: unknown;
    if (typeof init?.body === "string") {
      parsedBody = JSON.parse(init.body);
    }
    this.calls.push({ method, path, body: parsedBody });
    const handler = this.routes.get(`${method} ${path.split("?")[0]}`);
    if (!handler) {
      return new Response(
        JSON.stringify({ code: "not_found", message: `no route ${path}` }),
        { status: 404, headers: { "content-type": "application/json" } },
      );
    }
    const result = handler(init);
    return new Response(JSON.stringify(result.body ?? {}), {
      status: result.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  };

  callsTo(method: string, path: string) {
    return this.calls.filter(
      (c) => c.method === method && c.path.split("?")[0] === path,
    );
  }
}
