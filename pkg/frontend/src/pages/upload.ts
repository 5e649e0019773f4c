/** Upload page: pick an article, drop a STEP file, see what the platform
 * extracted from it.
 */

import type { Client } from "../api.js";
import { ApiError } from "../api.js";
import type { ArticleJson, UploadResponseJson } from "../types.js";
import { card, errorBox, escapeHtml, table } from "../render.js";
import { fmt, variantView } from "../viewmodel.js";

export function renderUpload(articles: ArticleJson[]): string {
  const options = articles
    .map(
      (a) =>
        `<option value="${escapeHtml(a.article_id)}">${escapeHtml(a.article_id)} — ${escapeHtml(a.name)}</option>`,
    )
    .join("");
  return card(
    "Upload design variant",
    `<form id="upload-form">
      <label>Article
        <select id="upload-article" required>${options}</select>
      </label>
      <label>New article id (optional)
        <input id="upload-new-article" placeholder="leave empty to use selection" />
      </label>
      <label>STEP file
        <input id="upload-file" type="file" accept=".step,.stp" required />
      </label>
      <label>Label (optional)
        <input id="upload-label" placeholder="defaults to content hash" />
      </label>
      <label>Thickness override, mm (optional)
        <input id="upload-thickness" type="number" step="0.1" min="0.1" />
      </label>
      <button type="submit">Upload</button>
    </form>
    <div id="upload-result"></div>`,
  );
}

/** Result panel markup; the contract tests assert the displayed numbers. */
export function renderUploadResult(response: UploadResponseJson): string {
  const view = variantView(response.variant);
  const rows: string[][] = [
    ["Variant", escapeHtml(view.variantId)],
    ["Created", response.created ? "yes" : "already stored (identical)"],
    ["Holes", `${view.holeCount}`],
    [
      "Thickness",
      `${fmt(view.thicknessMm, 1)} mm${view.thicknessOverridden ? " (override)" : ""}`,
    ],
    ["Bounding box", `${view.bboxMm} mm`],
    ["Total edge length", `${fmt(view.edgeLengthMm, 1)} mm`],
    ["Uploaded by", escapeHtml(view.uploadedBy)],
  ];
  return card("Extracted features", table(["Field", "Value"], rows));
}

export function renderUploadError(err: unknown): string {
  if (err instanceof ApiError && err.body.line !== undefined) {
    return errorBox(
      `${err.body.type} at line ${err.body.line}, column ${err.body.column}: ${err.body.message}`,
    );
  }
  return errorBox(err instanceof Error ? err.message : String(err));
}

export async function mountUpload(root: HTMLElement, client: Client): Promise<void> {
  const { articles } = await client.listArticles();
  root.innerHTML = renderUpload(articles);

  const form = root.querySelector<HTMLFormElement>("#upload-form")!;
  const result = root.querySelector<HTMLElement>("#upload-result")!;
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void (async () => {
      const select = root.querySelector<HTMLSelectElement>("#upload-article")!;
      const newId = root
        .querySelector<HTMLInputElement>("#upload-new-article")!
        .value.trim();
      const file = root.querySelector<HTMLInputElement>("#upload-file")!.files?.[0];
      if (!file) return;
      const label =
        root.querySelector<HTMLInputElement>("#upload-label")!.value.trim() ||
        undefined;
      const thicknessRaw = root
        .querySelector<HTMLInputElement>("#upload-thickness")!
        .value.trim();
      const thickness = thicknessRaw ? Number(thicknessRaw) : undefined;

      try {
        let articleId = select.value;
        if (newId) {
          await client.createArticle({ article_id: newId });
          articleId = newId;
        }
        const bytes = new Uint8Array(await file.arrayBuffer());
        const response = await client.uploadVariant(articleId, bytes, label, thickness);
        result.innerHTML = renderUploadResult(response);
      } catch (err) {
        result.innerHTML = renderUploadError(err);
      }
    })();
  });
}
