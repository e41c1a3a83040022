// Pure HTML builders; main.ts owns the DOM and events.

import type { FormModel } from './state';
import { immutableAttributeNames, planTotalsConsistent } from './state';
import type { ApiError, PredictResponse, RecourseResponse } from './types';

const esc = (s: unknown): string =>
  String(s).replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;').replace(/"/g, '&quot;');

export function renderForm(model: FormModel): string {
  const rows = model.attributes
    .map((a) => {
      const name = esc(a.feature.name);
      let input: string;
      if (a.feature.kind === 'categorical') {
        const options = a.feature
          .categories!.map(
            (c) =>
              `<option value="${esc(c)}"${c === a.value ? ' selected' : ''}>${esc(c)}</option>`,
          )
          .join('');
        input = `<select data-field="${name}">${options}</select>`;
      } else {
        const bounds = a.feature.bounds
          ? ` min="${a.feature.bounds[0]}" max="${a.feature.bounds[1]}"`
          : '';
        input = `<input type="number" data-field="${name}" value="${esc(a.value)}"${bounds} step="${a.feature.granularity ?? 'any'}">`;
      }
      const error = a.error ? `<span class="field-error">${esc(a.error)}</span>` : '';
      return `<div class="attribute-row${a.error ? ' has-error' : ''}" data-row="${name}">
        <label>${name}</label>${input}${error}
        <span class="cost-control">${renderCostControl(a)}</span>
      </div>`;
    })
    .join('\n');
  return `<form id="record-form">${rows}
    <div class="actions">
      <button type="button" id="predict-btn">Predict</button>
      <button type="button" id="recourse-btn">Find recourse</button>
      <button type="button" id="undo-btn"${model.snapshot ? '' : ' disabled'}>Undo apply</button>
    </div>
  </form>`;
}

function renderCostControl(a: FormModel['attributes'][number]): string {
  const name = esc(a.feature.name);
  const immutable = `<label class="immutable-toggle"><input type="checkbox" data-immutable="${name}"${
    a.cost.immutable ? ' checked' : ''
  }> cannot change</label>`;
  if (a.cost.kind === 'numeric') {
    if (a.cost.family === 'quadratic') {
      return `${immutable} <input type="text" class="weight" data-weight="${name}" data-weight-field="weight" value="${esc(a.cost.weight)}" title="quadratic weight"${a.cost.immutable ? ' disabled' : ''}>`;
    }
    if (a.cost.family === 'piecewise') {
      return `${immutable} <span class="weight-note">piecewise (server default)</span>`;
    }
    return `${immutable}
      up <input type="text" class="weight" data-weight="${name}" data-weight-field="weightUp" value="${esc(a.cost.weightUp)}"${a.cost.immutable ? ' disabled' : ''}>
      down <input type="text" class="weight" data-weight="${name}" data-weight-field="weightDown" value="${esc(a.cost.weightDown)}"${a.cost.immutable ? ' disabled' : ''}>`;
  }
  if (a.cost.uniform === null) {
    return `${immutable} <span class="weight-note">custom transitions (server default)</span>`;
  }
  return `${immutable} switch cost <input type="text" class="weight" data-weight="${name}" data-weight-field="uniform" value="${esc(a.cost.uniform)}"${a.cost.immutable ? ' disabled' : ''}>`;
}

export function renderPrediction(p: PredictResponse | null): string {
  if (!p) return '<div id="prediction" class="empty">no prediction yet</div>';
  const label = p.predicted_class === 1 ? 'class 1 (approve)' : 'class 0 (reject)';
  return `<div id="prediction" class="prediction class-${p.predicted_class}">
    <strong>${label}</strong> &mdash; votes: ${p.votes[0]} for class 0, ${p.votes[1]} for class 1
  </div>`;
}

export function renderPlans(response: RecourseResponse, targetClass: number): string {
  const banner = response.exhausted
    ? ''
    : '<div class="banner warning">search budget exhausted &mdash; results may be incomplete</div>';
  if (response.plans.length === 0) {
    return `${banner}<div class="empty">no plans (status: ${esc(response.status)})</div>`;
  }
  const cards = response.plans
    .map((plan, i) => {
      if (plan.changes.length === 0) {
        return `<div class="plan zero-cost" data-plan="${i}">
          <h3>already class ${targetClass} &mdash; no changes needed</h3>
        </div>`;
      }
      const rows = plan.changes
        .map(
          (c) => `<tr>
            <td>${esc(c.attribute)}</td>
            <td class="old">${esc(c.from)}</td>
            <td class="arrow">&rarr;</td>
            <td class="new">${esc(c.to)}</td>
            <td class="cost">${esc(c.cost)}</td>
          </tr>`,
        )
        .join('');
      const mismatch = planTotalsConsistent(plan)
        ? ''
        : '<span class="banner error">total does not match change costs</span>';
      return `<div class="plan" data-plan="${i}">
        <h3>plan ${i + 1} &mdash; total cost ${esc(plan.total_cost)} ${mismatch}</h3>
        <table><tbody>${rows}</tbody></table>
        <button type="button" data-apply="${i}">Apply this plan</button>
      </div>`;
    })
    .join('\n');
  return `${banner}${cards}`;
}

export function renderRecourseError(err: ApiError, model: FormModel): string {
  if (err.status === 422) {
    const immutable = immutableAttributeNames(model);
    const hint = immutable.length
      ? `<p>attributes currently locked: ${immutable.map(esc).join(', ')}</p>`
      : '';
    return `<div class="banner error">no feasible plan: ${esc(err.detail)}${hint}</div>`;
  }
  if (err.status === 504) {
    return `<div class="banner warning">the search ran out of time before finding a plan (${esc(err.detail)})</div>`;
  }
  if (err.status === 0) {
    return `<div class="banner error stale">network failure &mdash; showing last known state (${esc(err.detail)})</div>`;
  }
  return `<div class="banner error">${esc(err.detail)}</div>`;
}

export function renderFatal(detail: string): string {
  return `<div class="banner error blocking">
    could not load the model schema: ${esc(detail)}
    <button type="button" id="retry-btn">Retry</button>
  </div>`;
}

export function renderEmptySchema(): string {
  return '<div class="banner warning">no model loaded &mdash; the service reported an empty schema</div>';
}
