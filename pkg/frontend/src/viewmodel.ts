/** Pure view-model functions: everything the pages display is computed
 * here, so the contract tests can pin the numbers without a DOM.
 */

import type {
  OutcomesSummaryJson,
  PredictResponseJson,
  VariantJson,
} from "./types.js";

export interface VariantView {
  variantId: string;
  label: string;
  holeCount: number;
  thicknessMm: number;
  bboxMm: string;
  edgeLengthMm: number;
  uploadedBy: string;
  createdIso: string;
  thicknessOverridden: boolean;
}

/** Label is the variant_id suffix after "<article>__". */
export function variantLabel(variant: VariantJson): string {
  const sep = variant.variant_id.indexOf("__");
  return sep >= 0 ? variant.variant_id.slice(sep + 2) : variant.variant_id;
}

export function variantView(variant: VariantJson): VariantView {
  const f = variant.effective_features;
  return {
    variantId: variant.variant_id,
    label: variantLabel(variant),
    holeCount: f.hole_count,
    thicknessMm: f.material_thickness,
    bboxMm: `${fmt(f.bbox_a, 1)} × ${fmt(f.bbox_b, 1)} × ${fmt(f.bbox_c, 1)}`,
    edgeLengthMm: f.total_edge_length,
    uploadedBy: variant.uploaded_by,
    createdIso: new Date(variant.created_ts_ms).toISOString(),
    thicknessOverridden: variant.thickness_override != null,
  };
}

/** kg CO2 for a predicted energy at a given emission factor (kg/kWh). */
export function co2Kg(energyWh: number, factorKgPerKwh: number): number {
  return (energyWh / 1000) * factorKgPerKwh;
}

export interface CompareRow {
  metric: string;
  unit: string;
  a: number;
  b: number;
  delta: number;
}

/** Side-by-side rows for the what-if page; deltas are B minus A, and the
 * CO2 row is derived client-side from the slider's emission factor. */
export function compareRows(
  a: PredictResponseJson,
  b: PredictResponseJson,
  emissionFactor: number,
): CompareRow[] {
  const rows: CompareRow[] = [
    {
      metric: "Energy",
      unit: "Wh",
      a: a.prediction.energy_wh,
      b: b.prediction.energy_wh,
      delta: b.prediction.energy_wh - a.prediction.energy_wh,
    },
    {
      metric: "Production time",
      unit: "s",
      a: a.prediction.production_time_s,
      b: b.prediction.production_time_s,
      delta: b.prediction.production_time_s - a.prediction.production_time_s,
    },
  ];
  const co2A = co2Kg(a.prediction.energy_wh, emissionFactor);
  const co2B = co2Kg(b.prediction.energy_wh, emissionFactor);
  rows.push({
    metric: "CO₂ footprint",
    unit: "kg",
    a: co2A,
    b: co2B,
    delta: co2B - co2A,
  });
  return rows;
}

export function summaryView(s: OutcomesSummaryJson): {
  jobs: string;
  meanEnergy: string;
  meanTime: string;
} {
  return {
    jobs: `${s.complete_count} complete / ${s.job_count} total`,
    meanEnergy: s.mean_energy_wh === null ? "–" : `${fmt(s.mean_energy_wh, 1)} Wh`,
    meanTime:
      s.mean_production_time_s === null
        ? "–"
        : `${fmt(s.mean_production_time_s, 1)} s`,
  };
}

/** Fixed-decimal formatting with a stable "-0" guard. */
export function fmt(value: number, digits = 2): string {
  const out = value.toFixed(digits);
  return out === `-${(0).toFixed(digits)}` ? (0).toFixed(digits) : out;
}

/** Signed delta string, e.g. "+12.40" / "−3.10" / "0.00". */
export function fmtDelta(value: number, digits = 2): string {
  if (value > 0) return `+${fmt(value, digits)}`;
  if (value < 0) return `−${fmt(Math.abs(value), digits)}`;
  return fmt(0, digits);
}
