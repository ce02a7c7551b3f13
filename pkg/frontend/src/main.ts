// Dashboard wiring: hash-routed views over the review API.

import { ApiClient, CotResponse, QueueItem, SessionSummary } from "./api.js";
import { renderDiffHtml, escapeHtml } from "./diff.js";
import { applyReviewOutcome, initialState, QueueState } from "./queue.js";
import { resultBanner, timelineEntries } from "./session.js";
import {
  BEHAVIOUR_CHANGE_VALUES,
  BISECT_MARK_VALUES,
  canSubmitCorrection,
  validateResponseDocument,
} from "./schema.js";

const api = new ApiClient("");
const root = document.getElementById("app") as HTMLElement;

function setNotice(text: string | null): void {
  const el = document.getElementById("notice");
  if (el) {
    el.textContent = text ?? "";
    el.className = text ? "notice visible" : "notice";
  }
}

function confidencePercent(value: number): string {
  // displayed verbatim from the payload, only formatted
  return `${(value * 100).toFixed(0)}%`;
}

async function renderQueue(): Promise<void> {
  const items = await api.listQueue();
  let state: QueueState = initialState(items);
  const container = document.createElement("div");

  const table = document.createElement("div");
  container.appendChild(table);

  function draw(): void {
    table.innerHTML = "";
    if (state.items.length === 0) {
      table.innerHTML = '<p class="empty">Review queue is empty.</p>';
      return;
    }
    for (const item of state.items) {
      table.appendChild(queueRow(item));
    }
  }

  function queueRow(item: QueueItem): HTMLElement {
    const row = document.createElement("section");
    row.className = "queue-row";
    const response = item.machine_response;
    const header = document.createElement("header");
    header.innerHTML =
      `<span class="sample-id">${escapeHtml(item.sample_id)}</span>` +
      `<span class="badge mark-${response ? response.bisect_mark : "none"}">` +
      `${response ? escapeHtml(response.bisect_mark) : "no verdict"}</span>` +
      `<span class="confidence">confidence ${confidencePercent(item.machine_confidence)}</span>` +
      `<span class="category">${escapeHtml(item.category)}</span>`;
    row.appendChild(header);

    const diff = document.createElement("div");
    diff.innerHTML = renderDiffHtml(item.diff_text);
    row.appendChild(diff);

    if (response) {
      const reasoning = document.createElement("details");
      reasoning.innerHTML =
        "<summary>model reasoning</summary>" +
        "<ol>" +
        response.reasoning_chain
          .map((step) => `<li>${escapeHtml(step)}</li>`)
          .join("") +
        "</ol>" +
        (response.sem_edits.length
          ? "<p>semantic edits:</p><ul>" +
            response.sem_edits
              .map(
                (edit) =>
                  `<li><code>${escapeHtml(edit.id)}</code> ${escapeHtml(edit.kind)}: ` +
                  `${escapeHtml(edit.behaviour)} (likelihood ${edit.likelihood})</li>`,
              )
              .join("") +
            "</ul>"
          : "");
      row.appendChild(reasoning);
    }

    const actions = document.createElement("div");
    actions.className = "actions";
    for (const action of ["accept", "discard"] as const) {
      const button = document.createElement("button");
      button.textContent = action;
      button.onclick = async () => {
        const outcome = await api.review(item.sample_id, action, item.version);
        state = applyReviewOutcome(state, item.sample_id, outcome);
        setNotice(state.notice);
        if (outcome.status === 409) {
          state = initialState(await api.listQueue());
        }
        draw();
      };
      actions.appendChild(button);
    }
    const correct = document.createElement("button");
    correct.textContent = "correct";
    correct.onclick = () => {
      row.appendChild(correctionEditor(item, async (doc) => {
        const outcome = await api.review(item.sample_id, "correct", item.version, doc);
        state = applyReviewOutcome(state, item.sample_id, outcome);
        setNotice(state.notice);
        if (outcome.status === 409) {
          state = initialState(await api.listQueue());
        }
        draw();
      }));
      correct.disabled = true;
    };
    actions.appendChild(correct);
    row.appendChild(actions);
    return row;
  }

  draw();
  root.replaceChildren(container);
}

function correctionEditor(
  item: QueueItem,
  onSubmit: (doc: CotResponse) => Promise<void>,
): HTMLElement {
  const seed: CotResponse = item.machine_response ?? {
    target_behaviour: item.target_behaviour,
    has_compile_error: false,
    behaviour_change: "no-effect",
    behaviour_confidence: 50,
    sem_edits: [],
    counterfactual_fix: "",
    reasoning_chain: [],
    reflection: "",
    bisect_mark: "",
  };
  const form = document.createElement("form");
  form.className = "correction";
  form.innerHTML = `
    <label>target behaviour <input name="target_behaviour" value="${escapeHtml(seed.target_behaviour)}"></label>
    <label>compile error
      <select name="has_compile_error">
        <option value="false" ${seed.has_compile_error ? "" : "selected"}>false</option>
        <option value="true" ${seed.has_compile_error ? "selected" : ""}>true</option>
      </select>
    </label>
    <label>change type
      <select name="behaviour_change">
        ${BEHAVIOUR_CHANGE_VALUES.map(
          (value) =>
            `<option ${value === seed.behaviour_change ? "selected" : ""}>${value}</option>`,
        ).join("")}
      </select>
    </label>
    <label>confidence (0-100) <input name="behaviour_confidence" type="number" value="${seed.behaviour_confidence}"></label>
    <label>counterfactual fix <input name="counterfactual_fix" value="${escapeHtml(seed.counterfactual_fix)}"></label>
    <label>reasoning (one step per line) <textarea name="reasoning_chain">${escapeHtml(seed.reasoning_chain.join("\n"))}</textarea></label>
    <label>reflection <input name="reflection" value="${escapeHtml(seed.reflection)}"></label>
    <label>verdict
      <select name="bisect_mark">
        <option value="">choose...</option>
        ${BISECT_MARK_VALUES.map(
          (value) =>
            `<option ${value === seed.bisect_mark ? "selected" : ""}>${value}</option>`,
        ).join("")}
      </select>
    </label>
    <div class="field-errors"></div>
    <button type="submit" disabled>submit correction</button>
  `;
  const errorsBox = form.querySelector(".field-errors") as HTMLElement;
  const submit = form.querySelector("button") as HTMLButtonElement;

  function currentDocument(): CotResponse {
    const data = new FormData(form);
    const chain = String(data.get("reasoning_chain") ?? "")
      .split("\n")
      .map((line) => line.trim())
      .filter((line) => line.length > 0);
    return {
      target_behaviour: String(data.get("target_behaviour") ?? ""),
      has_compile_error: data.get("has_compile_error") === "true",
      behaviour_change: String(data.get("behaviour_change") ?? ""),
      behaviour_confidence: Number(data.get("behaviour_confidence")),
      sem_edits: seed.sem_edits,
      counterfactual_fix: String(data.get("counterfactual_fix") ?? ""),
      reasoning_chain: chain,
      reflection: String(data.get("reflection") ?? ""),
      bisect_mark: String(data.get("bisect_mark") ?? ""),
    };
  }

  function revalidate(): void {
    const doc = currentDocument();
    const errors = validateResponseDocument(doc).filter(
      (e) => e.field !== "bisect_mark" || doc.bisect_mark !== "",
    );
    errorsBox.innerHTML = errors
      .map((e) => `<p class="field-error">${escapeHtml(e.field)}: ${escapeHtml(e.reason)}</p>`)
      .join("");
    submit.disabled = !canSubmitCorrection(doc);
  }

  form.addEventListener("input", revalidate);
  form.addEventListener("change", revalidate);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void onSubmit(currentDocument());
  });
  revalidate();
  return form;
}

async function renderSessions(): Promise<void> {
  const sessions = await api.listSessions();
  const list = document.createElement("div");
  if (sessions.length === 0) {
    list.innerHTML = '<p class="empty">No recorded sessions.</p>';
  }
  for (const session of sessions) {
    list.appendChild(sessionCard(session));
  }
  root.replaceChildren(list);
}

function sessionCard(session: SessionSummary): HTMLElement {
  const card = document.createElement("a");
  card.className = "session-card";
  card.href = `#/session/${session.session_id}`;
  card.innerHTML =
    `<span class="sample-id">${escapeHtml(session.session_id)}</span>` +
    `<span>${escapeHtml(session.mode)}</span>` +
    `<span>${session.steps} steps</span>` +
    `<span class="badge result-${session.result.kind}">${session.result.kind}</span>` +
    `<span class="target">${escapeHtml(session.target_behaviour)}</span>`;
  return card;
}

async function renderSession(sessionId: string): Promise<void> {
  let detail;
  try {
    detail = await api.getSession(sessionId);
  } catch {
    root.innerHTML = `<p class="empty">Session ${escapeHtml(sessionId)} was not found.</p>`;
    return;
  }
  const banner = resultBanner(detail);
  const container = document.createElement("div");
  container.innerHTML =
    `<h2>${escapeHtml(detail.session_id)} <small>(${escapeHtml(detail.mode)})</small></h2>` +
    `<p>target: ${escapeHtml(detail.target_behaviour)}</p>` +
    `<div class="banner banner-${banner.kind}">${escapeHtml(banner.text)}` +
    banner.commits
      .map((commit) => ` <code class="commit-link">${escapeHtml(commit)}</code>`)
      .join("") +
    "</div>";
  for (const entry of timelineEntries(detail)) {
    const block = document.createElement("section");
    block.className = "timeline-entry";
    block.innerHTML =
      `<header><span>step ${entry.stepNumber}</span>` +
      `<code>${escapeHtml(entry.commitShort)}</code>` +
      `<span class="badge mark-${entry.mark}">${escapeHtml(entry.mark)}</span>` +
      `<span class="confidence">confidence ${confidencePercent(entry.confidence)}</span>` +
      `<span>${escapeHtml(entry.reason)}</span></header>`;
    const reasoning = document.createElement("details");
    reasoning.innerHTML =
      "<summary>reasoning</summary><ol>" +
      entry.reasoningChain.map((s) => `<li>${escapeHtml(s)}</li>`).join("") +
      "</ol>";
    block.appendChild(reasoning);
    container.appendChild(block);
  }
  root.replaceChildren(container);
}

function route(): void {
  const hash = window.location.hash || "#/queue";
  document.querySelectorAll("nav a").forEach((a) => {
    a.classList.toggle("active", a.getAttribute("href") === hash);
  });
  if (hash.startsWith("#/session/")) {
    void renderSession(hash.slice("#/session/".length));
  } else if (hash === "#/sessions") {
    void renderSessions();
  } else {
    void renderQueue();
  }
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", route);
