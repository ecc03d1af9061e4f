import { describe, expect, it } from "vitest";

import { ApiError, GatewayClient, OfflineError } from "./api.js";
import { StubServer } from "./stubServer.js";

function makeClient(stub: StubServer): GatewayClient {
  return new GatewayClient("http://test", stub.fetch);
}

describe("gateway client", () => {
  it("fetches the gate config from the server", async () => {
    const stub = new StubServer().on("GET", "/config/gate", () => ({
      body: { depth_min_mm: 175, depth_max_mm: 400 },
    }));
    const cfg = await makeClient(stub).getGateConfig();
    expect(cfg.depth_min_mm).toBe(175);
    expect(stub.callsTo("GET", "/config/gate")).toHaveLength(1);
  });

  it("surfaces server error codes as ApiError", async () => {
    const stub = new StubServer().on("GET", "/cases/x", () => ({
      status: 404,
      body: { code: "not_found", message: "case x not found" },
    }));
    await expect(makeClient(stub).getCase("x")).rejects.toThrowError(ApiError);
    try {
      await makeClient(stub).getCase("x");
    } catch (err) {
      expect((err as ApiError).code).toBe("not_found");
      expect((err as ApiError).status).toBe(404);
    }
  });

  it("maps network failure to OfflineError", async () => {
    const stub = new StubServer();
    stub.failNetwork = true;
    await expect(makeClient(stub).getGateConfig()).rejects.toThrowError(
      OfflineError,
    );
  });

  it("posts the decision body verbatim", async () => {
    const stub = new StubServer().on(
      "POST",
      "/cases/c1/captures/k1/decision",
      () => ({ body: { case_id: "c1", captures: [] } }),
    );
    await makeClient(stub).decideCapture("c1", "k1", "retake");
    expect(stub.callsTo("POST", "/cases/c1/captures/k1/decision")[0]?.body).toEqual(
      { decision: "retake" },
    );
  });

  it("encodes the reminder query timestamp", async () => {
    const stub = new StubServer().on("GET", "/reminders/due", () => ({
      body: { reminders: [] },
    }));
    await makeClient(stub).dueReminders("2026-08-03T10:00:00+00:00");
    const call = stub.callsTo("GET", "/reminders/due")[0];
    expect(call?.path).toContain("now=2026-08-03T10%3A00%3A00%2B00%3A00");
  });
});
