/** HTML string rendering: pure functions from view models to markup. */

import { FormField } from "./forms.js";
import {
  InlineError,
  Projection,
  PromptSegment,
  SessionViewModel,
} from "./viewmodel.js";
import { renderChartSvg } from "./chart.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderPrompt(segments: PromptSegment[]): string {
  const markup = segments
    .map((segment) =>
      segment.fieldPath
        ? `<mark title="${escapeHtml(segment.fieldPath)}">` +
          `${escapeHtml(segment.text)}</mark>`
        : escapeHtml(segment.text),
    )
    .join("");
  return `<pre class="prompt">${markup}</pre>`;
}

export function renderParamTable(vm: SessionViewModel): string {
  const rows = vm.paramRows
    .map(
      (row) =>
        `<tr><td>${escapeHtml(row.name)}</td>` +
        `<td class="value">${escapeHtml(row.value)}</td></tr>`,
    )
    .join("");
  return (
    `<table class="params"><thead><tr><th>parameter</th><th>value</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderNeighborWeights(vm: SessionViewModel): string {
  if (!vm.neighborLabel) {
    return `<p class="neighbors none">no neighbors (source: ${escapeHtml(vm.source)})</p>`;
  }
  return `<p class="neighbors">${escapeHtml(vm.neighborLabel)}</p>`;
}

export function renderChart(vm: SessionViewModel): string {
  return vm.chart ? renderChartSvg(vm.chart) : "";
}

export function renderHistory(vm: SessionViewModel): string {
  const items = vm.historyRows
    .map(
      (row) =>
        `<li><span class="kind">${escapeHtml(row.requestKind)}</span> ` +
        `${escapeHtml(row.requestText)} ` +
        `<span class="source">(${escapeHtml(row.source)})</span></li>`,
    )
    .join("");
  return `<ol class="history">${items}</ol>`;
}

export function renderInlineError(error: InlineError | null): string {
  if (!error) return "";
  return (
    `<div class="inline-error" role="alert">` +
    `<strong>${escapeHtml(error.code)}</strong> ${escapeHtml(error.message)}</div>`
  );
}

export function renderDriftBanner(projection: Projection): string {
  if (projection.kind !== "schema_drift") return "";
  return (
    `<div class="drift-banner" role="alert">${escapeHtml(projection.message)}` +
    `<pre>${escapeHtml(JSON.stringify(projection.raw, null, 2))}</pre></div>`
  );
}

export function renderFormFields(fields: FormField[]): string {
  return fields
    .map((field) => {
      const marker = field.required ? " *" : "";
      const hint = field.enumValues
        ? ` <span class="hint">(${field.enumValues.map(escapeHtml).join(" | ")})</span>`
        : "";
      return `<li><code>${escapeHtml(field.name)}</code>${marker}${hint}</li>`;
    })
    .join("");
}
