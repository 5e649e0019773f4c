/** Page markup built from recorded responses: what the user actually sees. */

import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { renderArticle } from "../src/pages/article.js";
import { renderDashboard } from "../src/pages/dashboard.js";
import { renderUploadError } from "../src/pages/upload.js";
import { escapeHtml, table } from "../src/render.js";
import type {
  ArticleDetailJson,
  ArticleJson,
  HealthJson,
  MeJson,
} from "../src/types.js";
import { loadFixture } from "./helpers.js";

const health = loadFixture<HealthJson>("health").body;
const me = loadFixture<MeJson>("me").body;
const articles = loadFixture<{ articles: ArticleJson[] }>("articles").body;
const detail = loadFixture<ArticleDetailJson>("article_detail").body;

describe("html helpers", () => {
  it("escapes markup-significant characters", () => {
    expect(escapeHtml(`<b a="1">&'x'</b>`)).toBe(
      "&lt;b a=&quot;1&quot;&gt;&amp;&#39;x&#39;&lt;/b&gt;",
    );
  });

  it("builds a table with one tr per row", () => {
    const html = table(["A"], [["1"], ["2"]]);
    expect(html.match(/<tr>/g)).toHaveLength(3); // header + 2 rows
  });
});

describe("dashboard", () => {
  it("lists every article with a detail link", () => {
    const html = renderDashboard(health, me, articles.articles, "model-1");
    for (const a of articles.articles) {
      expect(html).toContain(`#/articles/${encodeURIComponent(a.article_id)}`);
    }
    expect(html).toContain("model-1");
    expect(html).toContain(me.user_id);
  });

  it("shows the train control to admins only", () => {
    const admin: MeJson = { user_id: "root", role: "admin" };
    expect(renderDashboard(health, admin, [], null)).toContain("train-button");
    expect(renderDashboard(health, me, [], null)).not.toContain("train-button");
  });
});

describe("article detail", () => {
  it("renders variants, outcome summary, and feedback from the recording", () => {
    const html = renderArticle(detail, me);
    expect(html).toContain(detail.article.article_id);
    expect(html).toContain("four-hole");
    expect(html).toContain("base");
    expect(html).toContain(
      `${detail.outcomes_summary.complete_count} complete / ${detail.outcomes_summary.job_count} total`,
    );
    expect(html).toContain("light burr on hole edges");
  });

  it("offers the feedback form to manufacturers but not designers", () => {
    const manufacturer: MeJson = { user_id: "mfg", role: "manufacturer" };
    expect(renderArticle(detail, manufacturer)).toContain("feedback-form");
    expect(renderArticle(detail, me)).not.toContain("feedback-form");
  });
});

describe("upload errors", () => {
  it("shows parse position when the server reports one", () => {
    const err = new ApiError(422, {
      type: "StepSyntaxError",
      message: "expected ';'",
      line: 3,
      column: 14,
    });
    const html = renderUploadError(err);
    expect(html).toContain("line 3, column 14");
    expect(html).toContain("StepSyntaxError");
  });

  it("falls back to the plain message otherwise", () => {
    expect(renderUploadError(new Error("nope"))).toContain("nope");
  });
});
