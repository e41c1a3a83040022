// Wire types mirroring the service's documented formats.

export interface SchemaFeature {
  name: string;
  kind: 'numeric' | 'categorical';
  categories?: string[];
  bounds?: [number, number];
  granularity?: number;
}

export interface FeatureCostDoc {
  feature: string;
  type: 'linear' | 'quadratic' | 'immutable' | 'piecewise';
  weight_up?: number | 'inf';
  weight_down?: number | 'inf';
  weight?: number | 'inf';
  points?: [number, number][];
  immutable?: boolean;
}

export interface GroupCostDoc {
  group: string;
  transitions?: (number | 'inf')[][];
  uniform?: number | 'inf';
  immutable?: boolean;
}

export interface CostDoc {
  features: FeatureCostDoc[];
  groups: GroupCostDoc[];
}

export interface SchemaResponse {
  features: SchemaFeature[];
  default_costs: CostDoc;
  forest_k: number;
  clique_size: number;
}

export type RecordValue = number | string;
export type RecordDoc = Record<string, RecordValue>;

export interface PredictResponse {
  predicted_class: number;
  votes: [number, number];
}

export interface PlanChange {
  attribute: string;
  kind: 'numeric' | 'categorical';
  from: RecordValue;
  to: RecordValue;
  cost: number;
}

export interface Plan {
  record: RecordDoc;
  changes: PlanChange[];
  total_cost: number;
  verified: boolean;
  witness: { clique: [number, number][] };
}

export interface RecourseResponse {
  plans: Plan[];
  exhausted: boolean;
  status: string;
  stats: Record<string, number>;
}

export interface RecourseRequest {
  record: RecordDoc;
  target_class: number;
  cost_overrides?: CostDoc;
  max_results?: number;
  budget_ms?: number;
}

export interface ApiError {
  status: number;
  detail: string;
}
