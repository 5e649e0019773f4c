/** Article detail: variants, aggregated outcomes, and shop-floor feedback. */

import type { Client } from "../api.js";
import type { ArticleDetailJson, MeJson } from "../types.js";
import { card, errorBox, escapeHtml, table } from "../render.js";
import { fmt, summaryView, variantView } from "../viewmodel.js";

const FEEDBACK_CATEGORIES = ["dimensional", "surface", "material", "process", "other"];
const FEEDBACK_SEVERITIES = ["minor", "major", "scrap"];

export function renderArticle(detail: ArticleDetailJson, me: MeJson): string {
  const a = detail.article;
  const head = `<p class="hint"><a href="#/">← dashboard</a> —
    <a href="#/compare?article=${encodeURIComponent(a.article_id)}">compare variants</a></p>
    <h1>${escapeHtml(a.article_id)}</h1>
    <p>${escapeHtml(a.name)} — ${escapeHtml(a.material)}</p>`;

  const variantRows = detail.variants.map((v) => {
    const view = variantView(v);
    return [
      escapeHtml(view.label),
      `${view.holeCount}`,
      `${fmt(view.thicknessMm, 1)}${view.thicknessOverridden ? " *" : ""}`,
      view.bboxMm,
      fmt(view.edgeLengthMm, 1),
      escapeHtml(view.uploadedBy),
    ];
  });
  const variantsCard = card(
    "Design variants",
    detail.variants.length
      ? table(
          ["Label", "Holes", "Thickness (mm)", "Bounding box (mm)", "Edge length (mm)", "By"],
          variantRows,
        )
      : "<p>No variants uploaded.</p>",
  );

  const s = summaryView(detail.outcomes_summary);
  const outcomeRows = detail.outcomes.map((o) => [
    `${o.job_index}`,
    escapeHtml(o.machine_id),
    o.complete ? fmt(o.production_time_s, 1) : "–",
    o.complete ? fmt(o.energy_wh, 1) : "–",
    `${o.error_count}`,
    o.complete ? "yes" : "no",
  ]);
  const outcomesCard = card(
    "Process outcomes",
    `<p>${escapeHtml(s.jobs)}; mean energy ${escapeHtml(s.meanEnergy)}, mean time ${escapeHtml(s.meanTime)}</p>` +
      (detail.outcomes.length
        ? table(["Job", "Machine", "Time (s)", "Energy (Wh)", "Errors", "Complete"], outcomeRows)
        : ""),
  );

  const feedbackRows = detail.feedback.map((f) => [
    escapeHtml(f.severity),
    escapeHtml(f.category),
    escapeHtml(f.text),
    escapeHtml(f.reporter),
  ]);
  const canPost = me.role === "manufacturer" || me.role === "admin";
  const form = canPost
    ? `<form id="feedback-form">
        <label>Category <select id="fb-category">${FEEDBACK_CATEGORIES.map((c) => `<option>${c}</option>`).join("")}</select></label>
        <label>Severity <select id="fb-severity">${FEEDBACK_SEVERITIES.map((c) => `<option>${c}</option>`).join("")}</select></label>
        <label>Text <input id="fb-text" placeholder="what happened" /></label>
        <button type="submit">Report</button>
      </form><div id="feedback-result"></div>`
    : "";
  const feedbackCard = card(
    "Feedback",
    (detail.feedback.length
      ? table(["Severity", "Category", "Text", "Reporter"], feedbackRows)
      : "<p>No feedback recorded.</p>") + form,
  );

  return head + variantsCard + outcomesCard + feedbackCard;
}

export async function mountArticle(
  root: HTMLElement,
  client: Client,
  articleId: string,
): Promise<void> {
  const [detail, me] = await Promise.all([client.getArticle(articleId), client.me()]);
  root.innerHTML = renderArticle(detail, me);

  const form = root.querySelector<HTMLFormElement>("#feedback-form");
  if (!form) return;
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void (async () => {
      const result = root.querySelector<HTMLElement>("#feedback-result")!;
      try {
        await client.postFeedback({
          article_id: articleId,
          category: root.querySelector<HTMLSelectElement>("#fb-category")!.value,
          severity: root.querySelector<HTMLSelectElement>("#fb-severity")!.value,
          text: root.querySelector<HTMLInputElement>("#fb-text")!.value,
        });
        await mountArticle(root, client, articleId);
      } catch (err) {
        result.innerHTML = errorBox(
          err instanceof Error ? err.message : String(err),
        );
      }
    })();
  });
}
