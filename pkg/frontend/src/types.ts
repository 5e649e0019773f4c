/** JSON shapes of the v1 HTTP API, as documented in the repo README. */

export interface FeatureVectorJson {
  schema: string; // "f1"
  face_count_total: number;
  face_count_planar: number;
  face_count_cylindrical: number;
  face_count_other: number;
  edge_count: number;
  vertex_count: number;
  shell_count: number;
  hole_count: number;
  mean_hole_diameter: number;
  material_thickness: number;
  bbox_a: number;
  bbox_b: number;
  bbox_c: number;
  total_edge_length: number;
}

export interface ArticleJson {
  article_id: string;
  name: string;
  material: string;
  created_ts_ms: number;
  variant_count?: number;
}

export interface VariantJson {
  variant_id: string;
  article_id: string;
  step_blob_hash: string;
  features: FeatureVectorJson;
  created_ts_ms: number;
  uploaded_by: string;
  /** Absent when no override is set. */
  thickness_override?: number;
  effective_features: FeatureVectorJson;
}

export interface OutcomeJson {
  article_id: string;
  job_index: number;
  machine_id: string;
  production_time_s: number;
  energy_wh: number;
  tool_wear_delta: number;
  error_count: number;
  complete: boolean;
  start_ts_ms: number;
  end_ts_ms: number | null;
}

export interface OutcomesSummaryJson {
  job_count: number;
  complete_count: number;
  mean_energy_wh: number | null;
  mean_production_time_s: number | null;
}

export interface FeedbackJson {
  feedback_id: string;
  article_id: string;
  reporter: string;
  category: string;
  severity: string;
  text: string;
  created_ts_ms: number;
}

export interface ArticleDetailJson {
  article: ArticleJson;
  variants: VariantJson[];
  events: unknown[];
  statuses: unknown[];
  feedback: FeedbackJson[];
  outcomes: OutcomeJson[];
  outcomes_summary: OutcomesSummaryJson;
}

export interface PredictionJson {
  energy_wh: number;
  production_time_s: number;
  co2_kg?: number;
}

export interface PredictResponseJson {
  prediction: PredictionJson;
  features: FeatureVectorJson;
  model_id: string;
}

export interface UploadResponseJson {
  variant: VariantJson;
  created: boolean;
}

export interface HealthJson {
  status: string;
  version: string;
  scanner: string;
}

export interface MeJson {
  user_id: string;
  role: "designer" | "manufacturer" | "admin";
}

export interface TrainJobJson {
  job_id: string;
  state: string;
  started_ts_ms: number;
  finished_ts_ms?: number | null;
  model_id?: string | null;
  error?: string | null;
}

export interface ApiErrorBody {
  type: string;
  message: string;
  line?: number;
  column?: number;
}
