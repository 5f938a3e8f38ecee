/** Browser entry: renders one screen per wizard step against the API.
 *
 * Layout philosophy: the decision sequence is explicit. Each stage gets its
 * own screen; earlier results (neighbors, kernel) stay visible below once
 * they exist.
 */

import { ApiClient, ApiError } from "./api.js";
import { graphViewModel, renderGraphSvg } from "./graph.js";
import { renderMatrixTable } from "./matrix.js";
import type { ServerConfig, SessionView } from "./types.js";
import { canSubmit, parseField, validateDescriptors } from "./validation.js";
import { WizardController, WizardStep, cellKey, missingCells, stepIndex } from "./wizard.js";

const API_BASE = new URLSearchParams(location.search).get("api") ?? "";
const client = new ApiClient(API_BASE);
const wizard = new WizardController(client);

let serverConfig: ServerConfig | null = null;
let banner: { kind: "error" | "info"; text: string } | null = null;
let cHatSlider: number | null = null;
let dHatSlider: number | null = null;

const app = document.getElementById("app") as HTMLElement;

const STEP_TITLES: Record<WizardStep, string> = {
  "case-entry": "1. Case entry",
  neighbors: "2. Similar cases",
  assessment: "3. Assess actions",
  decision: "4. Decision proposal",
  review: "5. Review",
  retain: "6. Retain",
  done: "Done",
};

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    const result = await work();
    banner = null;
    return result;
  } catch (err) {
    if (err instanceof ApiError) {
      banner = { kind: "error", text: `${err.code}: ${err.message}` };
    } else {
      banner = { kind: "error", text: String(err) };
    }
    render();
    return undefined;
  }
}

function progressBar(current: WizardStep): string {
  const steps = Object.entries(STEP_TITLES) as [WizardStep, string][];
  const items = steps
    .map(([step, title]) => {
      const cls =
        step === current ? "current" : stepIndex(step) < stepIndex(current) ? "past" : "";
      return `<li class="${cls}">${escapeHtml(title)}</li>`;
    })
    .join("");
  return `<ol class="progress">${items}</ol>`;
}

function bannerHtml(): string {
  if (!banner) return "";
  return `<div class="banner ${banner.kind}">${escapeHtml(banner.text)}</div>`;
}

// screens ---------------------------------------------------------------

function caseEntryScreen(): string {
  if (!serverConfig) return "<p>Loading configuration…</p>";
  const fields = serverConfig.schema
    .map(
      (attr) => `
      <label class="field">
        <span>${escapeHtml(attr.name)}</span>
        <input name="attr-${attr.index}" inputmode="decimal" autocomplete="off">
        <em class="issue" data-for="${attr.index}"></em>
      </label>`,
    )
    .join("");
  const criteriaRows = serverConfig.criteria_config.criteria
    .map(
      (criterion, i) => `
      <tr>
        <td>${escapeHtml(criterion.name)}</td>
        <td>${criterion.direction}</td>
        <td class="hint">${criterion.scale.map(escapeHtml).join(" → ")}</td>
        <td><input name="weight-${i}" type="number" min="0.01" step="0.1"
          value="${criterion.weight}" class="weight-input"></td>
      </tr>`,
    )
    .join("");
  return `
    <form id="case-form" novalidate>
      ${fields}
      <label class="field">
        <span>Physician-proposed actions (one per line)</span>
        <textarea name="physician-actions" rows="3"
          placeholder="acting insulin for basal&#10;rapid-acting insulin for bolus"></textarea>
      </label>
      <details class="criteria-editor">
        <summary>Criteria and weights</summary>
        <table class="grid">
          <thead><tr><th>Criterion</th><th>Direction</th><th>Scale (worst → best position)</th><th>Weight</th></tr></thead>
          <tbody>${criteriaRows}</tbody>
        </table>
      </details>
      <button type="submit" id="open-btn" disabled>Open session</button>
    </form>`;
}

function wireCaseEntry(): void {
  const form = document.getElementById("case-form") as HTMLFormElement | null;
  if (!form || !serverConfig) return;
  const schema = serverConfig.schema;
  const inputs = schema.map(
    (attr) => form.querySelector(`[name="attr-${attr.index}"]`) as HTMLInputElement,
  );
  const submit = document.getElementById("open-btn") as HTMLButtonElement;

  const refresh = () => {
    const values = inputs.map((input) => parseField(input.value));
    const issues = validateDescriptors(schema, values);
    schema.forEach((attr) => {
      const slot = form.querySelector(`[data-for="${attr.index}"]`) as HTMLElement;
      const issue = issues.find((i) => i.index === attr.index);
      const touched = inputs[attr.index - 1].value.trim() !== "";
      slot.textContent = issue && touched ? issue.message : "";
    });
    submit.disabled = !canSubmit(schema, values);
  };
  inputs.forEach((input) => input.addEventListener("input", refresh));
  refresh();

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const values = inputs.map((input) => parseField(input.value) ?? NaN);
    const actionsField = form.querySelector(
      '[name="physician-actions"]',
    ) as HTMLTextAreaElement;
    const actions = actionsField.value
      .split("\n")
      .map((line) => line.trim())
      .filter(Boolean);
    const defaults = serverConfig!.criteria_config;
    const criteria = defaults.criteria.map((criterion, i) => {
      const field = form.querySelector(`[name="weight-${i}"]`) as HTMLInputElement;
      const weight = parseField(field.value);
      return { ...criterion, weight: weight && weight > 0 ? weight : criterion.weight };
    });
    void guard(async () => {
      await wizard.openSession(values, actions, { ...defaults, criteria });
      render();
    });
  });
}

function neighborsScreen(session: SessionView): string {
  const k = serverConfig?.k_default ?? 5;
  return `
    <p>Case registered. Retrieve the nearest stored cases to pool their actions.</p>
    <label class="field inline"><span>k</span>
      <input id="k-input" type="number" min="1" value="${k}"></label>
    <button id="retrieve-btn">Retrieve similar cases</button>
    <p class="hint">Acceptance radius for action pooling: ${session.acceptance_radius}</p>`;
}

function neighborPanel(session: SessionView): string {
  if (session.neighbors.length === 0) return "";
  const inRadius = (d: number) => d <= session.acceptance_radius;
  const rows = session.neighbors
    .map(
      (n) => `
      <tr class="${inRadius(n.distance) ? "in-radius" : "out-of-radius"}">
        <td>${n.rank}</td>
        <td>${escapeHtml(n.case_id)}</td>
        <td>${n.distance.toFixed(3)}</td>
        <td>${n.diagnosis ?? "?"}</td>
        <td>${(n.actions ?? []).map(escapeHtml).join(", ")}</td>
      </tr>`,
    )
    .join("");
  return `
    <section class="panel">
      <h3>Nearest cases</h3>
      <table class="neighbors">
        <thead><tr><th>#</th><th>Case</th><th>Distance</th><th>Diagnosis</th><th>Recorded actions</th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
    </section>`;
}

function assessmentScreen(session: SessionView): string {
  const criteria = session.criteria_config.criteria;
  const saved = new Map(
    session.performance_input.map((c) => [cellKey(c.action, c.criterion), c.label]),
  );
  const header = criteria.map((c) => `<th>${escapeHtml(c.name)}</th>`).join("");
  const rows = session.pooled_actions
    .map((action) => {
      const cells = criteria
        .map((criterion) => {
          const key = cellKey(action, criterion.name);
          const current = wizard.drafts.get(key) ?? saved.get(key) ?? "";
          const options = ["", ...criterion.scale]
            .map(
              (label) =>
                `<option value="${escapeHtml(label)}" ${label === current ? "selected" : ""}>` +
                `${label === "" ? "—" : escapeHtml(label)}</option>`,
            )
            .join("");
          return `<td><select data-action="${escapeHtml(action)}"
            data-criterion="${escapeHtml(criterion.name)}">${options}</select></td>`;
        })
        .join("");
      return `<tr><th scope="row">${escapeHtml(action)}</th>${cells}</tr>`;
    })
    .join("");
  const gaps = missingCells(session, wizard.drafts).length;
  return `
    <p>Assess every pooled action on every criterion.</p>
    <table class="grid"><thead><tr><th>Action</th>${header}</tr></thead><tbody>${rows}</tbody></table>
    <p class="hint" id="gap-count">${gaps} cells left</p>
    <button id="design-btn" ${gaps > 0 ? "disabled" : ""}>Run outranking analysis</button>`;
}

function wireAssessment(): void {
  const session = wizard.session;
  if (!session) return;
  app.querySelectorAll<HTMLSelectElement>("select[data-action]").forEach((select) => {
    select.addEventListener("change", () => {
      if (select.value) {
        wizard.setDraft(select.dataset.action!, select.dataset.criterion!, select.value);
      }
      const gaps = missingCells(wizard.session!, wizard.drafts).length;
      (document.getElementById("gap-count") as HTMLElement).textContent = `${gaps} cells left`;
      (document.getElementById("design-btn") as HTMLButtonElement).disabled = gaps > 0;
    });
  });
  document.getElementById("design-btn")?.addEventListener("click", () => {
    void guard(async () => {
      await wizard.runDesign();
      const current = wizard.session!.criteria_config;
      cHatSlider = current.concordance_threshold;
      dHatSlider = current.discordance_threshold;
      render();
    });
  });
}

function decisionScreen(session: SessionView): string {
  const outranking = session.outranking!;
  const kernel = session.proposal!;
  const cHat = cHatSlider ?? outranking.c_hat;
  const dHat = dHatSlider ?? outranking.d_hat;
  const members = kernel.members
    .map((m) => `<li class="kernel-member">${escapeHtml(m)}</li>`)
    .join("");
  const ties = kernel.collapsed_cycles.length
    ? `<p class="hint">Tied groups (outranking cycles): ${kernel.collapsed_cycles
        .map((g) => g.map(escapeHtml).join(" ⇄ "))
        .join("; ")}</p>`
    : "";
  const choices = [...new Set([...kernel.members, ...session.physician_actions])]
    .map((action) => {
      const override = kernel.members.includes(action)
        ? ""
        : ' <em class="hint">(outside proposal: will be flagged as an override)</em>';
      return `<label class="choice"><input type="radio" name="choice"
        value="${escapeHtml(action)}"> ${escapeHtml(action)}${override}</label>`;
    })
    .join("");
  return `
    <p>Best-compromise subset (kernel):</p>
    <ul class="kernel">${members}</ul>
    ${ties}
    ${renderGraphSvg(graphViewModel(outranking, kernel))}
    <div class="sliders">
      <label>concordance threshold ${cHat.toFixed(2)}
        <input id="c-hat" type="range" min="0.05" max="1" step="0.05" value="${cHat}"></label>
      <label>discordance threshold ${dHat.toFixed(2)}
        <input id="d-hat" type="range" min="0" max="0.95" step="0.05" value="${dHat}"></label>
    </div>
    <div class="matrices">
      ${renderMatrixTable(outranking, "concordance")}
      ${renderMatrixTable(outranking, "discordance")}
    </div>
    <fieldset><legend>Choose the action to apply</legend>${choices}</fieldset>
    <button id="choose-btn" disabled>Record choice</button>`;
}

function wireDecision(): void {
  const rerun = () => {
    const cHat = Number((document.getElementById("c-hat") as HTMLInputElement).value);
    const dHat = Number((document.getElementById("d-hat") as HTMLInputElement).value);
    cHatSlider = cHat;
    dHatSlider = dHat;
    void guard(async () => {
      await wizard.runDesign(cHat, dHat);
      render();
    });
  };
  document.getElementById("c-hat")?.addEventListener("change", rerun);
  document.getElementById("d-hat")?.addEventListener("change", rerun);

  const chooseBtn = document.getElementById("choose-btn") as HTMLButtonElement | null;
  app.querySelectorAll<HTMLInputElement>('input[name="choice"]').forEach((radio) => {
    radio.addEventListener("change", () => {
      if (chooseBtn) chooseBtn.disabled = false;
    });
  });
  chooseBtn?.addEventListener("click", () => {
    const picked = app.querySelector<HTMLInputElement>('input[name="choice"]:checked');
    if (!picked) return;
    void guard(async () => {
      await wizard.choose(picked.value);
      render();
    });
  });
}

function reviewScreen(session: SessionView): string {
  const override = session.override_flag
    ? '<p class="hint">The chosen action was outside the proposal (override recorded).</p>'
    : "";
  return `
    <p>Chosen action: <strong>${escapeHtml(session.chosen_action ?? "")}</strong></p>
    ${override}
    <fieldset><legend>Review verdict</legend>
      <label class="choice"><input type="radio" name="verdict" value="accepted"> accepted</label>
      <label class="choice"><input type="radio" name="verdict" value="revised"> revised</label>
      <label class="choice"><input type="radio" name="verdict" value="rejected"> rejected</label>
    </fieldset>
    <label class="field" id="revised-wrap" hidden>
      <span>Replacement action</span><input id="revised-action"></label>
    <button id="review-btn" disabled>Submit review</button>`;
}

function wireReview(): void {
  const button = document.getElementById("review-btn") as HTMLButtonElement;
  const wrap = document.getElementById("revised-wrap") as HTMLElement;
  app.querySelectorAll<HTMLInputElement>('input[name="verdict"]').forEach((radio) => {
    radio.addEventListener("change", () => {
      wrap.hidden = radio.value !== "revised" || !radio.checked;
      button.disabled = false;
    });
  });
  button.addEventListener("click", () => {
    const verdict = app.querySelector<HTMLInputElement>('input[name="verdict"]:checked');
    if (!verdict) return;
    const revised = (document.getElementById("revised-action") as HTMLInputElement).value;
    void guard(async () => {
      await wizard.submitReview(
        verdict.value as "accepted" | "revised" | "rejected",
        revised || undefined,
      );
      render();
    });
  });
}

function retainScreen(session: SessionView): string {
  if (session.review === "rejected") {
    return `<p>The decision was rejected; this session will not be retained.</p>`;
  }
  return `
    <p>Retain <strong>${escapeHtml(session.chosen_action ?? "")}</strong> for this case
      into the case memory. A confirmed diagnosis is required.</p>
    <label class="field inline"><span>Diagnosis</span>
      <select id="diagnosis"><option value="0">0 (negative)</option>
      <option value="1">1 (positive)</option></select></label>
    <button id="retain-btn">Confirm retention</button>`;
}

function wireRetain(): void {
  document.getElementById("retain-btn")?.addEventListener("click", () => {
    const diagnosis = Number(
      (document.getElementById("diagnosis") as HTMLSelectElement).value,
    ) as 0 | 1;
    void guard(async () => {
      await wizard.retain(diagnosis);
      render();
    });
  });
}

function doneScreen(session: SessionView): string {
  const retained = session.retained_case_id
    ? `<p>Stored as case <strong>${escapeHtml(session.retained_case_id)}</strong>;
       the retrieval model has been refitted.</p>`
    : "<p>Session closed without retention.</p>";
  return `${retained}<button onclick="location.reload()">Start a new session</button>`;
}

// render loop -------------------------------------------------------------

function render(): void {
  const session = wizard.session;
  const step = wizard.step;
  const body =
    step === "case-entry"
      ? caseEntryScreen()
      : step === "neighbors"
        ? neighborsScreen(session!)
        : step === "assessment"
          ? assessmentScreen(session!)
          : step === "decision"
            ? decisionScreen(session!)
            : step === "review"
              ? reviewScreen(session!)
              : step === "retain"
                ? retainScreen(session!)
                : doneScreen(session!);
  const extras = session && step !== "neighbors" ? neighborPanel(session) : "";
  app.innerHTML = `
    ${progressBar(step)}
    ${bannerHtml()}
    <section class="screen"><h2>${STEP_TITLES[step]}</h2>${body}</section>
    ${extras}`;

  if (step === "case-entry") wireCaseEntry();
  if (step === "neighbors") {
    document.getElementById("retrieve-btn")?.addEventListener("click", () => {
      const k = Number((document.getElementById("k-input") as HTMLInputElement).value);
      void guard(async () => {
        await wizard.retrieve(k);
        render();
      });
    });
  }
  if (step === "assessment") wireAssessment();
  if (step === "decision") wireDecision();
  if (step === "review") wireReview();
  if (step === "retain") wireRetain();
}

async function boot(): Promise<void> {
  try {
    serverConfig = await client.config();
    const health = await client.health();
    banner = {
      kind: "info",
      text: `Connected: ${health.case_count} cases, version ${health.casebase_version}`,
    };
  } catch (err) {
    banner = { kind: "error", text: `Cannot reach the API: ${String(err)}` };
  }
  render();
}

void boot();
