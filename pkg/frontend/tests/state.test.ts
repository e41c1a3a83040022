import { describe, expect, it } from 'vitest';

import {
  applyPlan,
  buildCostOverrides,
  buildFormModel,
  buildRecord,
  formIsValid,
  planTotalsConsistent,
  setImmutable,
  setValue,
  setWeight,
  undoApply,
} from '../src/state';
import type { Plan, RecordDoc, SchemaResponse } from '../src/types';

import schemaFixture from './fixtures/schema.json';
import recordFixture from './fixtures/record.json';
import recourseFixture from './fixtures/recourse.json';

const schema = schemaFixture as unknown as SchemaResponse;
const record = recordFixture as RecordDoc;

describe('buildFormModel', () => {
  it('derives one control per schema attribute, nothing hardcoded', () => {
    const model = buildFormModel(schema);
    expect(model.attributes).toHaveLength(20);
    expect(model.attributes.map((a) => a.feature.name)).toEqual(
      schema.features.map((f) => f.name),
    );
    const categorical = model.attributes.filter((a) => a.feature.kind === 'categorical');
    expect(categorical).toHaveLength(13);
  });

  it('keeps categorical options in schema declaration order', () => {
    const model = buildFormModel(schema);
    for (const a of model.attributes) {
      if (a.feature.kind === 'categorical') {
        const declared = schema.features.find((f) => f.name === a.feature.name)!.categories!;
        expect(a.feature.categories).toEqual(declared);
      }
    }
  });

  it('initializes cost controls from the server defaults', () => {
    const model = buildFormModel(schema);
    const duration = model.attributes.find((a) => a.feature.name === 'duration_months')!;
    expect(duration.cost).toMatchObject({ kind: 'numeric', weightUp: '0.5', weightDown: '0.5' });
    const gender = model.attributes.find((a) => a.feature.name === 'personal_status_sex')!;
    expect(gender.cost).toMatchObject({ kind: 'categorical', immutable: true });
    const age = model.attributes.find((a) => a.feature.name === 'age_years')!;
    expect(age.cost).toMatchObject({ weightUp: '1', weightDown: 'inf' });
  });

  it('rebuilds idempotently', () => {
    const a = buildFormModel(schema, record);
    const b = buildFormModel(schema, record);
    expect(JSON.stringify(a)).toEqual(JSON.stringify(b));
  });
});

describe('record round trip', () => {
  it('form -> request -> form is lossless for all attribute values', () => {
    const model = buildFormModel(schema, record);
    expect(formIsValid(model)).toBe(true);
    const rebuilt = buildRecord(model);
    expect(rebuilt).toEqual(record);
    const again = buildFormModel(schema, rebuilt);
    expect(buildRecord(again)).toEqual(record);
  });

  it('flags out-of-bounds numerics before any request', () => {
    const model = buildFormModel(schema, record);
    setValue(model, 'age_years', '5');
    expect(formIsValid(model)).toBe(false);
    const age = model.attributes.find((a) => a.feature.name === 'age_years')!;
    expect(age.error).toContain('[18');
  });
});

describe('cost overrides', () => {
  it('sends nothing when no control was touched', () => {
    const model = buildFormModel(schema, record);
    expect(buildCostOverrides(model)).toBeUndefined();
  });

  it('maps the immutable toggle to the infinite-cost sentinel', () => {
    const model = buildFormModel(schema, record);
    setImmutable(model, 'checking_status', true);
    setImmutable(model, 'duration_months', true);
    const overrides = buildCostOverrides(model)!;
    expect(overrides.groups).toContainEqual({ group: 'checking_status', uniform: 'inf' });
    expect(overrides.features).toContainEqual({ feature: 'duration_months', type: 'immutable' });
  });

  it('carries edited weights including inf text', () => {
    const model = buildFormModel(schema, record);
    setWeight(model, 'credit_amount', 'weightDown', 'inf');
    setWeight(model, 'credit_amount', 'weightUp', '0.25');
    const overrides = buildCostOverrides(model)!;
    expect(overrides.features).toContainEqual({
      feature: 'credit_amount',
      type: 'linear',
      weight_up: 0.25,
      weight_down: 'inf',
    });
  });

  it('untoggling immutable restores the editable weights', () => {
    const model = buildFormModel(schema, record);
    setImmutable(model, 'housing', true);
    setImmutable(model, 'housing', false);
    const overrides = buildCostOverrides(model)!;
    expect(overrides.groups).toContainEqual({ group: 'housing', uniform: 5 });
  });
});

describe('apply and undo', () => {
  const plan = (recourseFixture.plans as Plan[])[0];

  it('apply sets every form field to the plan record', () => {
    const model = buildFormModel(schema, record);
    applyPlan(model, plan);
    expect(buildRecord(model)).toEqual(plan.record);
  });

  it('apply of a zero-change plan leaves the form unchanged', () => {
    const model = buildFormModel(schema, record);
    const zeroPlan: Plan = { ...plan, record, changes: [], total_cost: 0 };
    applyPlan(model, zeroPlan);
    expect(buildRecord(model)).toEqual(record);
  });

  it('undo restores the pre-apply record exactly', () => {
    const model = buildFormModel(schema, record);
    const before = buildRecord(model);
    applyPlan(model, plan);
    expect(undoApply(model)).toBe(true);
    expect(buildRecord(model)).toEqual(before);
    expect(undoApply(model)).toBe(false); // single-level snapshot
  });
});

describe('rendering-level total check', () => {
  it('holds for every plan the server returned', () => {
    for (const plan of recourseFixture.plans as Plan[]) {
      expect(planTotalsConsistent(plan)).toBe(true);
    }
  });

  it('detects a corrupted total', () => {
    const plan = { ...(recourseFixture.plans as Plan[])[0] };
    plan.total_cost = plan.total_cost + 1;
    expect(planTotalsConsistent(plan)).toBe(false);
  });
});
