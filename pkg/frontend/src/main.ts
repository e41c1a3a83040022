// DOM wiring: one in-flight recourse request at a time, newest wins.

import { ApiClient, isApiError } from './api';
import {
  renderEmptySchema,
  renderFatal,
  renderForm,
  renderPlans,
  renderPrediction,
  renderRecourseError,
} from './render';
import {
  applyPlan,
  buildCostOverrides,
  buildFormModel,
  buildRecord,
  formIsValid,
  setImmutable,
  setValue,
  setWeight,
  undoApply,
  type FormModel,
} from './state';
import type { PredictResponse, RecourseResponse, SchemaResponse } from './types';

interface AppState {
  schema: SchemaResponse | null;
  form: FormModel | null;
  prediction: PredictResponse | null;
  plans: RecourseResponse | null;
  plansHtml: string;
  requestSeq: number;
  inflight: AbortController | null;
  targetClass: number;
}

const params = new URLSearchParams(location.search);
const api = new ApiClient(params.get('api') ?? 'http://localhost:8000');

const state: AppState = {
  schema: null,
  form: null,
  prediction: null,
  plans: null,
  plansHtml: '',
  requestSeq: 0,
  inflight: null,
  targetClass: 1,
};

const root = (): HTMLElement => document.querySelector('#app')!;

function renderAll(): void {
  if (!state.schema || !state.form) return;
  root().innerHTML = `
    <h1>what-if console</h1>
    <p class="subtitle">forest of ${state.schema.forest_k} trees; a plan needs ${state.schema.clique_size} of them</p>
    <section id="form-panel">${renderForm(state.form)}</section>
    <section id="prediction-panel">${renderPrediction(state.prediction)}</section>
    <section id="plans-panel">${state.plansHtml}</section>
  `;
}

async function init(): Promise<void> {
  root().innerHTML = '<p>loading schema&hellip;</p>';
  try {
    const schema = await api.getSchema();
    if (!schema.features.length) {
      root().innerHTML = renderEmptySchema();
      return;
    }
    state.schema = schema;
    state.form = buildFormModel(schema);
    renderAll();
  } catch (err) {
    root().innerHTML = renderFatal(isApiError(err) ? err.detail : String(err));
  }
}

async function doPredict(): Promise<void> {
  if (!state.form || !formIsValid(state.form)) {
    renderAll();
    return;
  }
  try {
    state.prediction = await api.predict(buildRecord(state.form));
  } catch (err) {
    state.plansHtml = isApiError(err)
      ? renderRecourseError(err, state.form)
      : `<div class="banner error">${String(err)}</div>`;
  }
  renderAll();
}

async function doRecourse(): Promise<void> {
  if (!state.form || !state.schema || !formIsValid(state.form)) {
    renderAll();
    return;
  }
  state.inflight?.abort();
  const controller = new AbortController();
  state.inflight = controller;
  const seq = ++state.requestSeq;
  state.plansHtml = '<p class="pending">searching&hellip;</p>';
  renderAll();
  try {
    const response = await api.recourse(
      {
        record: buildRecord(state.form),
        target_class: state.targetClass,
        cost_overrides: buildCostOverrides(state.form),
        max_results: 5,
      },
      controller.signal,
    );
    if (seq !== state.requestSeq) return; // a newer submission won
    state.plans = response;
    state.plansHtml = renderPlans(response, state.targetClass);
  } catch (err) {
    if ((err as Error).name === 'AbortError' || seq !== state.requestSeq) return;
    state.plansHtml = isApiError(err)
      ? renderRecourseError(err, state.form)
      : `<div class="banner error">${String(err)}</div>`;
  }
  renderAll();
}

function onClick(event: Event): void {
  const target = event.target as HTMLElement;
  if (target.id === 'predict-btn') void doPredict();
  if (target.id === 'recourse-btn') void doRecourse();
  if (target.id === 'retry-btn') void init();
  if (target.id === 'undo-btn' && state.form) {
    if (undoApply(state.form)) {
      state.prediction = null;
      renderAll();
    }
  }
  const applyIndex = target.getAttribute('data-apply');
  if (applyIndex !== null && state.form && state.plans) {
    const plan = state.plans.plans[Number(applyIndex)];
    if (plan) {
      applyPlan(state.form, plan);
      renderAll();
      void doPredict();
    }
  }
}

function onInput(event: Event): void {
  const target = event.target as HTMLInputElement | HTMLSelectElement;
  if (!state.form) return;
  const field = target.getAttribute('data-field');
  if (field) {
    setValue(state.form, field, target.value);
    return;
  }
  const weightOf = target.getAttribute('data-weight');
  const weightField = target.getAttribute('data-weight-field');
  if (weightOf && weightField) {
    setWeight(
      state.form,
      weightOf,
      weightField as 'weightUp' | 'weightDown' | 'weight' | 'uniform',
      target.value,
    );
    return;
  }
  const immutableOf = target.getAttribute('data-immutable');
  if (immutableOf) {
    setImmutable(state.form, immutableOf, (target as HTMLInputElement).checked);
    renderAll(); // weight inputs enable/disable with the toggle
  }
}

document.addEventListener('DOMContentLoaded', () => {
  document.body.addEventListener('click', onClick);
  document.body.addEventListener('input', onInput);
  void init();
});
