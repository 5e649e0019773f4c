/** Article dashboard: platform health, article list, admin train control. */

import type { Client } from "../api.js";
import type { ArticleJson, HealthJson, MeJson } from "../types.js";
import { card, errorBox, escapeHtml, table } from "../render.js";

export function renderDashboard(
  health: HealthJson,
  me: MeJson,
  articles: ArticleJson[],
  activeModel: string | null,
): string {
  const healthLine = `<p class="hint">Server ${escapeHtml(health.version)} (${escapeHtml(health.status)}, scanner: ${escapeHtml(health.scanner)}) —
    signed in as <strong>${escapeHtml(me.user_id)}</strong> (${escapeHtml(me.role)}) —
    model: ${activeModel ? escapeHtml(activeModel) : "none trained yet"}</p>`;

  const rows = articles.map((a) => [
    `<a href="#/articles/${encodeURIComponent(a.article_id)}">${escapeHtml(a.article_id)}</a>`,
    escapeHtml(a.name),
    escapeHtml(a.material),
    `${a.variant_count ?? 0}`,
  ]);
  const list = articles.length
    ? table(["Article", "Name", "Material", "Variants"], rows)
    : "<p>No articles yet — upload a STEP file to create one.</p>";

  const trainControls =
    me.role === "admin"
      ? `<p><button id="train-button">Train model on stored outcomes</button>
         <span id="train-status"></span></p>`
      : "";
  return healthLine + card("Articles", list) + trainControls;
}

export async function mountDashboard(root: HTMLElement, client: Client): Promise<void> {
  const [health, me, { articles }, models] = await Promise.all([
    client.health(),
    client.me(),
    client.listArticles(),
    client.listModels(),
  ]);
  root.innerHTML = renderDashboard(health, me, articles, models.active);

  const button = root.querySelector<HTMLButtonElement>("#train-button");
  if (!button) return;
  const status = root.querySelector<HTMLElement>("#train-status")!;
  button.addEventListener("click", () => {
    void (async () => {
      button.disabled = true;
      try {
        const { job } = await client.startTrain();
        status.textContent = `job ${job.job_id}: ${job.state}…`;
        const poll = setInterval(() => {
          void (async () => {
            const { job: current } = await client.getTrainJob(job.job_id);
            status.textContent = `job ${current.job_id}: ${current.state}${
              current.model_id ? ` → ${current.model_id}` : ""
            }${current.error ? ` (${current.error})` : ""}`;
            if (current.state !== "running") {
              clearInterval(poll);
              button.disabled = false;
            }
          })();
        }, 1000);
      } catch (err) {
        status.innerHTML = errorBox(
          err instanceof Error ? err.message : String(err),
        );
        button.disabled = false;
      }
    })();
  });
}
