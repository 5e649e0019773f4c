/** Thin typed client for the fablink v1 HTTP API.
 *
 * Every call goes through request(); non-2xx responses raise ApiError
 * carrying the server's structured error envelope.
 */

import type {
  ApiErrorBody,
  ArticleDetailJson,
  ArticleJson,
  FeatureVectorJson,
  FeedbackJson,
  HealthJson,
  MeJson,
  PredictResponseJson,
  TrainJobJson,
  UploadResponseJson,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiErrorBody,
  ) {
    super(`${body.type}: ${body.message}`);
    this.name = "ApiError";
  }
}

interface RequestOptions {
  json?: unknown;
  bytes?: Uint8Array;
  query?: Record<string, string | number | undefined>;
}

export class Client {
  private token: string | null = null;

  constructor(private readonly baseUrl: string = "") {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request<T>(
    method: string,
    path: string,
    opts: RequestOptions = {},
  ): Promise<T> {
    let url = this.baseUrl + path;
    if (opts.query) {
      const params = new URLSearchParams();
      for (const [key, value] of Object.entries(opts.query)) {
        if (value !== undefined) params.set(key, String(value));
      }
      const qs = params.toString();
      if (qs) url += `?${qs}`;
    }

    const headers: Record<string, string> = {};
    if (this.token !== null) headers["Authorization"] = `Bearer ${this.token}`;
    let body: BodyInit | undefined;
    if (opts.json !== undefined) {
      headers["Content-Type"] = "application/json";
      body = JSON.stringify(opts.json);
    } else if (opts.bytes !== undefined) {
      headers["Content-Type"] = "application/octet-stream";
      body = opts.bytes as unknown as BodyInit;
    }

    const res = await fetch(url, { method, headers, body });
    const text = await res.text();
    let parsed: unknown = null;
    if (text) {
      try {
        parsed = JSON.parse(text);
      } catch {
        parsed = null;
      }
    }
    if (!res.ok) {
      const envelope = (parsed as { error?: ApiErrorBody } | null)?.error;
      throw new ApiError(
        res.status,
        envelope ?? { type: "HttpError", message: text || res.statusText },
      );
    }
    return parsed as T;
  }

  health(): Promise<HealthJson> {
    return this.request("GET", "/api/v1/health");
  }

  me(): Promise<MeJson> {
    return this.request("GET", "/api/v1/me");
  }

  listArticles(): Promise<{ articles: ArticleJson[] }> {
    return this.request("GET", "/api/v1/articles");
  }

  createArticle(body: {
    article_id: string;
    name?: string;
    material?: string;
  }): Promise<{ article: ArticleJson; created: boolean }> {
    return this.request("POST", "/api/v1/articles", { json: body });
  }

  getArticle(articleId: string): Promise<ArticleDetailJson> {
    return this.request("GET", `/api/v1/articles/${encodeURIComponent(articleId)}`);
  }

  uploadVariant(
    articleId: string,
    step: Uint8Array,
    label?: string,
    thicknessOverride?: number,
  ): Promise<UploadResponseJson> {
    return this.request(
      "POST",
      `/api/v1/articles/${encodeURIComponent(articleId)}/variants`,
      { bytes: step, query: { label, thickness_override: thicknessOverride } },
    );
  }

  postFeedback(body: {
    article_id: string;
    category: string;
    severity: string;
    text?: string;
  }): Promise<{ feedback: FeedbackJson }> {
    return this.request("POST", "/api/v1/feedback", { json: body });
  }

  predictFeatures(
    features: FeatureVectorJson,
    emissionFactor?: number,
  ): Promise<PredictResponseJson> {
    return this.request("POST", "/api/v1/predict", {
      json: { features },
      query: { emission_factor: emissionFactor },
    });
  }

  startTrain(
    overrides?: Record<string, number>,
  ): Promise<{ job: TrainJobJson }> {
    return this.request("POST", "/api/v1/train", {
      json: overrides ?? {},
    });
  }

  getTrainJob(jobId: string): Promise<{ job: TrainJobJson }> {
    return this.request("GET", `/api/v1/train/${encodeURIComponent(jobId)}`);
  }

  listModels(): Promise<{
    models: { model_id: string; active: boolean }[];
    active: string | null;
  }> {
    return this.request("GET", "/api/v1/models");
  }
}
