/** What-if comparison: predictions for two design variants side by side,
 * with the CO2 row driven entirely by the client-side emission-factor
 * slider (no round trip on slider moves).
 */

import type { Client } from "../api.js";
import type { PredictResponseJson, VariantJson } from "../types.js";
import { card, errorBox, escapeHtml, table } from "../render.js";
import { compareRows, fmt, fmtDelta, variantLabel } from "../viewmodel.js";

export const DEFAULT_EMISSION_FACTOR = 0.4;

export function renderComparePicker(
  articleIds: string[],
  variants: VariantJson[],
  selectedArticle: string | null,
): string {
  const articleOptions = articleIds
    .map(
      (id) =>
        `<option value="${escapeHtml(id)}"${id === selectedArticle ? " selected" : ""}>${escapeHtml(id)}</option>`,
    )
    .join("");
  const variantOptions = variants
    .map(
      (v) =>
        `<option value="${escapeHtml(v.variant_id)}">${escapeHtml(variantLabel(v))}</option>`,
    )
    .join("");
  return card(
    "What-if comparison",
    `<form id="compare-form">
      <label>Article
        <select id="compare-article">${articleOptions}</select>
      </label>
      <label>Variant A
        <select id="compare-a">${variantOptions}</select>
      </label>
      <label>Variant B
        <select id="compare-b">${variantOptions}</select>
      </label>
      <button type="submit">Compare</button>
    </form>
    <div id="compare-result"></div>`,
  );
}

/** Comparison table markup; tested directly against recorded predictions. */
export function renderCompareResult(
  labelA: string,
  labelB: string,
  a: PredictResponseJson,
  b: PredictResponseJson,
  emissionFactor: number,
): string {
  const rows = compareRows(a, b, emissionFactor).map((row) => [
    escapeHtml(`${row.metric} (${row.unit})`),
    fmt(row.a, 2),
    fmt(row.b, 2),
    `<span class="${row.delta > 0 ? "delta-up" : row.delta < 0 ? "delta-down" : "delta-zero"}">${fmtDelta(row.delta, 2)}</span>`,
  ]);
  const slider = `
    <label class="slider-row">Emission factor:
      <input id="co2-slider" type="range" min="0" max="1" step="0.05"
             value="${emissionFactor}" />
      <span id="co2-factor">${fmt(emissionFactor, 2)}</span> kg CO₂ / kWh
    </label>`;
  return card(
    "Prediction",
    table(
      ["Metric", escapeHtml(labelA), escapeHtml(labelB), "Δ (B − A)"],
      rows,
    ) +
      slider +
      `<p class="hint">Model ${escapeHtml(a.model_id)}; CO₂ = energy / 1000 × factor.</p>`,
  );
}

export async function mountCompare(root: HTMLElement, client: Client): Promise<void> {
  const { articles } = await client.listArticles();
  const ids = articles.map((a) => a.article_id);
  const params = new URLSearchParams(location.hash.split("?")[1] ?? "");
  let selected = params.get("article") ?? ids[0] ?? null;

  const loadVariants = async (): Promise<VariantJson[]> =>
    selected ? (await client.getArticle(selected)).variants : [];

  let variants = await loadVariants();
  root.innerHTML = renderComparePicker(ids, variants, selected);

  const form = root.querySelector<HTMLFormElement>("#compare-form")!;
  const result = root.querySelector<HTMLElement>("#compare-result")!;

  root.querySelector<HTMLSelectElement>("#compare-article")!.addEventListener(
    "change",
    (ev) => {
      selected = (ev.target as HTMLSelectElement).value;
      void (async () => {
        variants = await loadVariants();
        root.innerHTML = renderComparePicker(ids, variants, selected);
        await mountCompare(root, client);
      })();
    },
  );

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void (async () => {
      const idA = root.querySelector<HTMLSelectElement>("#compare-a")!.value;
      const idB = root.querySelector<HTMLSelectElement>("#compare-b")!.value;
      const va = variants.find((v) => v.variant_id === idA);
      const vb = variants.find((v) => v.variant_id === idB);
      if (!va || !vb) return;
      try {
        const [pa, pb] = await Promise.all([
          client.predictFeatures(va.effective_features),
          client.predictFeatures(vb.effective_features),
        ]);
        let factor = DEFAULT_EMISSION_FACTOR;
        const redraw = () => {
          result.innerHTML = renderCompareResult(
            variantLabel(va),
            variantLabel(vb),
            pa,
            pb,
            factor,
          );
          result
            .querySelector<HTMLInputElement>("#co2-slider")!
            .addEventListener("input", (e) => {
              factor = Number((e.target as HTMLInputElement).value);
              redraw();
            });
        };
        redraw();
      } catch (err) {
        result.innerHTML = errorBox(
          err instanceof Error ? err.message : String(err),
        );
      }
    })();
  });
}
