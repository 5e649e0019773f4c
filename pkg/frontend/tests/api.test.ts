/** Client behavior against a stubbed fetch: auth headers, query
 * building, body encoding, and the structured error envelope.
 */

import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, Client } from "../src/api.js";
import type { ApiErrorBody } from "../src/types.js";
import { loadFixture } from "./helpers.js";

interface Captured {
  url: string;
  method: string;
  headers: Record<string, string>;
  body: BodyInit | undefined;
}

function stubFetch(status: number, body: unknown): Captured[] {
  const calls: Captured[] = [];
  vi.stubGlobal(
    "fetch",
    async (url: string, init: RequestInit): Promise<Response> => {
      calls.push({
        url,
        method: init.method ?? "GET",
        headers: (init.headers ?? {}) as Record<string, string>,
        body: init.body ?? undefined,
      });
      return new Response(JSON.stringify(body), {
        status,
        headers: { "Content-Type": "application/json" },
      });
    },
  );
  return calls;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("auth", () => {
  it("sends the bearer token on every call once set", async () => {
    const calls = stubFetch(200, { user_id: "u", role: "designer" });
    const client = new Client("");
    client.setToken("tok-123");
    await client.me();
    expect(calls[0]!.headers["Authorization"]).toBe("Bearer tok-123");
  });

  it("sends no Authorization header before login", async () => {
    const calls = stubFetch(200, { status: "ok", version: "x", scanner: "c" });
    await new Client("").health();
    expect(calls[0]!.headers["Authorization"]).toBeUndefined();
  });
});

describe("error envelope", () => {
  it("raises ApiError from the recorded 401 response", async () => {
    const recorded = loadFixture<{ error: ApiErrorBody }>("error_unauthorized");
    stubFetch(recorded.status, recorded.body);
    const err = await new Client("")
      .listArticles()
      .then(() => null, (e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    const apiErr = err as ApiError;
    expect(apiErr.status).toBe(401);
    expect(apiErr.body.type).toBe("UnauthorizedError");
    expect(apiErr.message).toContain("missing Authorization header");
  });

  it("degrades gracefully on a non-JSON error body", async () => {
    vi.stubGlobal("fetch", async () => new Response("boom", { status: 500 }));
    const err = await new Client("")
      .health()
      .then(() => null, (e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).body.type).toBe("HttpError");
    expect((err as ApiError).body.message).toBe("boom");
  });
});

describe("requests", () => {
  it("uploads variants as raw bytes with query parameters", async () => {
    const calls = stubFetch(201, { variant: {}, created: true });
    const bytes = new TextEncoder().encode("ISO-10303-21;");
    await new Client("").uploadVariant("a1", bytes, "rev-b", 3.5);
    const call = calls[0]!;
    expect(call.url).toBe(
      "/api/v1/articles/a1/variants?label=rev-b&thickness_override=3.5",
    );
    expect(call.method).toBe("POST");
    expect(call.headers["Content-Type"]).toBe("application/octet-stream");
    expect(call.body).toBe(bytes);
  });

  it("omits unset optional query parameters", async () => {
    const calls = stubFetch(201, { variant: {}, created: true });
    await new Client("").uploadVariant("a1", new Uint8Array([1]));
    expect(calls[0]!.url).toBe("/api/v1/articles/a1/variants");
  });

  it("sends predict features as JSON with the emission factor", async () => {
    const calls = stubFetch(200, { prediction: {}, features: {}, model_id: "m" });
    const features = loadFixture<{ variant: { effective_features: object } }>(
      "upload_plain",
    ).body.variant.effective_features;
    await new Client("").predictFeatures(features as never, 0.25);
    const call = calls[0]!;
    expect(call.url).toBe("/api/v1/predict?emission_factor=0.25");
    expect(call.headers["Content-Type"]).toBe("application/json");
    expect(JSON.parse(call.body as string)).toEqual({ features });
  });

  it("escapes article ids in paths", async () => {
    const calls = stubFetch(200, {
      article: {}, variants: [], events: [], statuses: [], feedback: [],
      outcomes: [], outcomes_summary: {},
    });
    await new Client("").getArticle("weird id");
    expect(calls[0]!.url).toBe("/api/v1/articles/weird%20id");
  });
});
