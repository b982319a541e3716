import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import turnSql from "./fixtures/turn-fig-sql.json";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("postChat sends the documented body and parses the turn", async () => {
    const requests: { url: string; init?: RequestInit }[] = [];
    const client = new ApiClient("http://farm", async (url, init) => {
      requests.push({ url, init });
      return jsonResponse(turnSql);
    });
    const turn = await client.postChat("show me yields", "barn", "sql_subagent");
    expect(turn.turn_id).toBe("turn-fig-sql");
    expect(requests[0].url).toBe("http://farm/chat");
    expect(JSON.parse(String(requests[0].init?.body))).toEqual({
      question: "show me yields",
      session: "barn",
      route: "sql_subagent",
    });
  });

  it("a problem-detail response raises a typed ApiError", async () => {
    const client = new ApiClient("", async () =>
      jsonResponse({ error: "bad_request", stage: "validate", detail: "bad route" }, 400),
    );
    let error: ApiError | undefined;
    await client.postChat("q").catch((e: ApiError) => (error = e));
    expect(error).toBeInstanceOf(ApiError);
    expect(error!.status).toBe(400);
    expect(error!.problem?.stage).toBe("validate");
    expect(error!.message).toContain("validate: bad route");
  });

  it("a 404 trace raises without a crash even on a non-JSON body", async () => {
    const client = new ApiClient("", async () => new Response("gone", { status: 404 }));
    let error: ApiError | undefined;
    await client.getTrace("nope").catch((e: ApiError) => (error = e));
    expect(error).toBeInstanceOf(ApiError);
    expect(error!.problem).toBeNull();
  });

  it("getTurns validates the envelope", async () => {
    const client = new ApiClient("", async () =>
      jsonResponse({ session: "default", turns: [turnSql] }),
    );
    const list = await client.getTurns();
    expect(list.turns).toHaveLength(1);
  });

  it("plotUrl escapes path segments", () => {
    const client = new ApiClient("http://farm");
    expect(client.plotUrl("a/b", "c d")).toBe("http://farm/plot/a%2Fb/c%20d");
  });
});
