// Pure HTML renderers. Every value displayed comes straight from a
// service response: probabilities are stringified, never recomputed.

import type { DispositionRecord, Prediction, QueueRow, ThreadDetail } from "./api.js";
import type { DashboardState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const BAND_LABELS: Record<string, string> = {
  no_action: "No action",
  bot_reminder: "Bot reminder",
  moderator_alert: "Moderator alert",
};

export function bandBadge(band: string | null): string {
  if (band === null) {
    return `<span class="band band-none">Unscored</span>`;
  }
  const label = BAND_LABELS[band] ?? band;
  return `<span class="band band-${escapeHtml(band)}">${escapeHtml(label)}</span>`;
}

export function renderQueue(state: DashboardState): string {
  if (state.rows.length === 0) {
    return `<p class="empty-state">No flagged threads at threshold ${escapeHtml(
      String(state.threshold),
    )}.</p>`;
  }
  const rows = state.rows
    .map(
      (row: QueueRow) => `<tr class="queue-row" data-thread-id="${escapeHtml(row.id)}">
  <td class="ref">${escapeHtml(row.thread_ref)}</td>
  <td class="title">${escapeHtml(row.title)}</td>
  <td class="probability">${escapeHtml(String(row.probability))}</td>
  <td class="band-cell">${bandBadge(row.action_band)}</td>
  <td class="updated">${escapeHtml(row.updated_at)}</td>
</tr>`,
    )
    .join("\n");
  return `<table class="queue">
<thead><tr><th>Thread</th><th>Title</th><th>Risk</th><th>Action</th><th>Updated</th></tr></thead>
<tbody>
${rows}
</tbody>
</table>`;
}

export function renderErrorBanner(state: DashboardState): string {
  if (state.error === null) {
    return "";
  }
  const staleNote = state.stale ? " Showing last known data (stale)." : "";
  return `<div class="banner error-banner">${escapeHtml(state.error)}${staleNote}</div>`;
}

function renderPrediction(prediction: Prediction): string {
  return `<li class="prediction">
  <span class="strategy">${escapeHtml(prediction.strategy)}</span>
  <span class="probability">${escapeHtml(String(prediction.probability))}</span>
  <span class="created">${escapeHtml(prediction.created_at)}</span>
</li>`;
}

function renderDisposition(record: DispositionRecord): string {
  const category = record.error_category === null ? "" : ` [${escapeHtml(record.error_category)}]`;
  return `<li class="disposition">${escapeHtml(record.action_taken)}${category} by ${escapeHtml(
    record.actor,
  )} at ${escapeHtml(record.at)}${record.note ? ` — ${escapeHtml(record.note)}` : ""}</li>`;
}

export const ERROR_CATEGORIES = [
  "overestimates_effect",
  "tone_misread",
  "lock_close_confound",
  "underestimated_tone",
  "context_too_long",
  "civility_juxtaposition",
];

export const DISPOSITION_ACTIONS = [
  "dismissed",
  "no_action",
  "bot_reminder",
  "moderator_alert",
];

export function renderDispositionForm(threadId: string): string {
  const actions = DISPOSITION_ACTIONS.map(
    (action) => `<option value="${action}">${action}</option>`,
  ).join("");
  const categories = ["", ...ERROR_CATEGORIES]
    .map((category) => `<option value="${category}">${category || "(none)"}</option>`)
    .join("");
  return `<form class="disposition-form" data-thread-id="${escapeHtml(threadId)}">
  <label>Action <select name="action_taken">${actions}</select></label>
  <label>Error category <select name="error_category">${categories}</select></label>
  <label>Note <input name="note" type="text" /></label>
  <button type="submit">Record disposition</button>
</form>`;
}

export function renderDetail(state: DashboardState): string {
  const detail: ThreadDetail | null = state.selected;
  if (detail === null) {
    return `<p class="detail-empty">Select a thread to review.</p>`;
  }
  const latest = detail.latest_prediction;
  const inline = state.inlineError
    ? `<div class="inline-error">${escapeHtml(state.inlineError)}</div>`
    : "";
  const summary = latest
    ? `<section class="scd">
  <h3>Conversation dynamics</h3>
  <p class="scd-summary">${escapeHtml(latest.scd_summary)}</p>
  <p class="probability-line">Derailment probability: <strong>${escapeHtml(
    String(latest.probability),
  )}</strong> ${bandBadge(detail.action_band)}</p>
  <h3>Transcript</h3>
  <pre class="transcript">${escapeHtml(latest.transcript)}</pre>
</section>`
    : `<p class="unscored-note">Not scored yet (${detail.comment_count} comments).</p>`;
  const history = detail.predictions.length
    ? `<h3>Prediction history</h3><ul class="history">${detail.predictions
        .map(renderPrediction)
        .join("\n")}</ul>`
    : "";
  const dispositions = detail.dispositions.length
    ? `<h3>Dispositions</h3><ul class="dispositions">${detail.dispositions
        .map(renderDisposition)
        .join("\n")}</ul>`
    : "";
  return `<article class="detail" data-thread-id="${escapeHtml(detail.id)}">
  <header>
    <h2>${escapeHtml(detail.title)}</h2>
    <span class="ref">${escapeHtml(detail.repo)}#${escapeHtml(String(detail.number))}</span>
    <button class="close-detail" type="button">Close</button>
  </header>
  ${inline}
  ${summary}
  <div class="actions">
    <label>Strategy
      <select class="strategy-select">
        <option value="ltm">ltm</option>
        <option value="fewshot">fewshot</option>
        <option value="generic">generic</option>
      </select>
    </label>
    <button class="score-button" type="button">Score</button>
  </div>
  ${history}
  ${dispositions}
  ${renderDispositionForm(detail.id)}
</article>`;
}
