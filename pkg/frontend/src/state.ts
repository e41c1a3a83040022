// Form state derived entirely from GET /schema -- no hardcoded attributes.

import type {
  CostDoc,
  FeatureCostDoc,
  GroupCostDoc,
  Plan,
  RecordDoc,
  RecordValue,
  SchemaFeature,
  SchemaResponse,
} from './types';

export interface NumericCostControl {
  kind: 'numeric';
  family: 'linear' | 'quadratic' | 'piecewise';
  weightUp: string; // editable text, 'inf' allowed
  weightDown: string;
  weight: string; // quadratic
  immutable: boolean;
}

export interface GroupCostControl {
  kind: 'categorical';
  uniform: string | null; // null when the default matrix is not uniform
  immutable: boolean;
}

export type CostControl = NumericCostControl | GroupCostControl;

export interface AttributeControl {
  feature: SchemaFeature;
  value: string; // raw input value; categorical values are category codes
  error: string | null;
  cost: CostControl;
  costTouched: boolean;
}

export interface FormModel {
  attributes: AttributeControl[];
  snapshot: Record<string, string> | null; // pre-apply values for undo
}

const asText = (x: number | 'inf' | undefined, fallback: string): string =>
  x === undefined ? fallback : String(x);

function numericControlFrom(doc: FeatureCostDoc | undefined): NumericCostControl {
  const control: NumericCostControl = {
    kind: 'numeric',
    family: 'linear',
    weightUp: '1',
    weightDown: '1',
    weight: '1',
    immutable: false,
  };
  if (!doc) return control;
  if (doc.type === 'immutable') {
    control.immutable = true;
  } else if (doc.type === 'quadratic') {
    control.family = 'quadratic';
    control.weight = asText(doc.weight, '1');
  } else if (doc.type === 'piecewise') {
    control.family = 'piecewise';
  } else {
    control.weightUp = asText(doc.weight_up, '1');
    control.weightDown = asText(doc.weight_down, '1');
  }
  return control;
}

function groupControlFrom(doc: GroupCostDoc | undefined): GroupCostControl {
  const control: GroupCostControl = { kind: 'categorical', uniform: '1', immutable: false };
  if (!doc) return control;
  if (doc.immutable) {
    control.immutable = true;
    return control;
  }
  if (doc.uniform !== undefined) {
    if (doc.uniform === 'inf') control.immutable = true;
    else control.uniform = String(doc.uniform);
    return control;
  }
  const rows = doc.transitions ?? [];
  const off: (number | 'inf')[] = [];
  rows.forEach((row, i) => row.forEach((c, j) => i !== j && off.push(c)));
  if (off.length > 0 && off.every((c) => c === 'inf')) {
    control.immutable = true;
  } else if (off.length > 0 && off.every((c) => c === off[0])) {
    control.uniform = String(off[0]);
  } else {
    control.uniform = null; // custom matrix; only the immutable toggle overrides
  }
  return control;
}

export function buildFormModel(schema: SchemaResponse, record?: RecordDoc): FormModel {
  const featureCosts = new Map(schema.default_costs.features.map((f) => [f.feature, f]));
  const groupCosts = new Map(schema.default_costs.groups.map((g) => [g.group, g]));
  const attributes = schema.features.map((feature) => {
    const initial =
      record && feature.name in record
        ? String(record[feature.name])
        : feature.kind === 'categorical'
          ? feature.categories![0]
          : '';
    const cost: CostControl =
      feature.kind === 'categorical'
        ? groupControlFrom(groupCosts.get(feature.name))
        : numericControlFrom(featureCosts.get(feature.name));
    return { feature, value: initial, error: null, cost, costTouched: false };
  });
  return { attributes, snapshot: null };
}

export function setValue(model: FormModel, name: string, value: string): void {
  const control = model.attributes.find((a) => a.feature.name === name);
  if (!control) return;
  control.value = value;
  control.error = validateValue(control);
}

export function validateValue(control: AttributeControl): string | null {
  const { feature } = control;
  if (feature.kind === 'categorical') {
    return feature.categories!.includes(control.value) ? null : 'pick a category';
  }
  if (control.value.trim() === '') return 'required';
  const x = Number(control.value);
  if (!Number.isFinite(x)) return 'not a number';
  if (feature.bounds) {
    const [lo, hi] = feature.bounds;
    if (x < lo || x > hi) return `must be in [${lo}, ${hi}]`;
  }
  return null;
}

export function formIsValid(model: FormModel): boolean {
  model.attributes.forEach((a) => (a.error = validateValue(a)));
  return model.attributes.every((a) => a.error === null);
}

export function buildRecord(model: FormModel): RecordDoc {
  const record: RecordDoc = {};
  for (const a of model.attributes) {
    record[a.feature.name] = a.feature.kind === 'categorical' ? a.value : Number(a.value);
  }
  return record;
}

export function setImmutable(model: FormModel, name: string, immutable: boolean): void {
  const control = model.attributes.find((a) => a.feature.name === name);
  if (!control) return;
  control.cost.immutable = immutable;
  control.costTouched = true;
}

export function setWeight(
  model: FormModel,
  name: string,
  field: 'weightUp' | 'weightDown' | 'weight' | 'uniform',
  value: string,
): void {
  const control = model.attributes.find((a) => a.feature.name === name);
  if (!control) return;
  if (control.cost.kind === 'numeric' && field !== 'uniform') {
    control.cost[field] = value;
    control.costTouched = true;
  } else if (control.cost.kind === 'categorical' && field === 'uniform') {
    control.cost.uniform = value;
    control.costTouched = true;
  }
}

const parseWeight = (text: string): number | 'inf' => {
  const t = text.trim().toLowerCase();
  return t === 'inf' || t === '+inf' || t === 'infinity' ? 'inf' : Number(text);
};

/** Overrides for every touched control; the immutable toggle maps to the
 * server's infinite-cost sentinel. Untouched controls send nothing, so the
 * server's defaults stay authoritative. */
export function buildCostOverrides(model: FormModel): CostDoc | undefined {
  const features: CostDoc['features'] = [];
  const groups: CostDoc['groups'] = [];
  for (const a of model.attributes) {
    if (!a.costTouched) continue;
    if (a.cost.kind === 'numeric') {
      if (a.cost.immutable) {
        features.push({ feature: a.feature.name, type: 'immutable' });
      } else if (a.cost.family === 'quadratic') {
        features.push({
          feature: a.feature.name,
          type: 'quadratic',
          weight: parseWeight(a.cost.weight),
        });
      } else {
        features.push({
          feature: a.feature.name,
          type: 'linear',
          weight_up: parseWeight(a.cost.weightUp),
          weight_down: parseWeight(a.cost.weightDown),
        });
      }
    } else {
      if (a.cost.immutable) {
        groups.push({ group: a.feature.name, uniform: 'inf' });
      } else if (a.cost.uniform !== null) {
        groups.push({ group: a.feature.name, uniform: parseWeight(a.cost.uniform) });
      }
    }
  }
  if (features.length === 0 && groups.length === 0) return undefined;
  return { features, groups };
}

/** Set form fields to a plan's record, keeping an undo snapshot. */
export function applyPlan(model: FormModel, plan: Plan): void {
  model.snapshot = Object.fromEntries(model.attributes.map((a) => [a.feature.name, a.value]));
  for (const a of model.attributes) {
    const value: RecordValue | undefined = plan.record[a.feature.name];
    if (value !== undefined) {
      a.value = String(value);
      a.error = validateValue(a);
    }
  }
}

export function undoApply(model: FormModel): boolean {
  if (!model.snapshot) return false;
  for (const a of model.attributes) {
    const prev = model.snapshot[a.feature.name];
    if (prev !== undefined) {
      a.value = prev;
      a.error = validateValue(a);
    }
  }
  model.snapshot = null;
  return true;
}

/** Rendering-level invariant: a displayed total must equal the sum of its
 * displayed per-change costs. */
export function planTotalsConsistent(plan: Plan, tolerance = 1e-9): boolean {
  const sum = plan.changes.reduce((acc, c) => acc + c.cost, 0);
  return Math.abs(sum - plan.total_cost) <= tolerance;
}

export function immutableAttributeNames(model: FormModel): string[] {
  return model.attributes.filter((a) => a.cost.immutable).map((a) => a.feature.name);
}
