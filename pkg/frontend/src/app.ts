/**
 * Browser wiring: a single-page flow over the gateway API.
 *
 * capture (gate panels + file submission) -> review (dual overlays,
 * accept/retake) -> questionnaire -> result, plus the due-reminder list.
 * All clinical values shown on screen come from API responses.
 */

import { ApiError, GatewayClient, OfflineError } from "./api.js";
import { buildGatePanels, offlineGatePanels, GatePanelView } from "./gatePanel.js";
import {
  QUESTION_LABELS,
  buildResultView,
  canSubmit,
  emptyForm,
  missingFields,
  setAnswer,
  toPayload,
  FormState,
} from "./questionnaire.js";
import { buildReminderViews } from "./reminders.js";
import { ReviewController, buildReviewView, captureUnderReview } from "./review.js";
import type { CaseDto, CaptureMetadata, GateConfigDto } from "./types.js";
import { QUESTIONNAIRE_FIELDS } from "./types.js";

const api = new GatewayClient("");
const review = new ReviewController(api);

let gateConfig: GateConfigDto | null = null;
let currentCase: CaseDto | null = null;
let form: FormState = emptyForm();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setBanner(text: string, kind: "info" | "error" | "offline") {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = text;
  banner.className = `banner ${kind}`;
  banner.hidden = text === "";
}

function metadataFromInputs(): CaptureMetadata {
  return {
    depth_mm: Number(el<HTMLInputElement>("meta-depth").value || "0"),
    pitch_deg: Number(el<HTMLInputElement>("meta-pitch").value || "0"),
    roll_deg: Number(el<HTMLInputElement>("meta-roll").value || "0"),
  };
}

function renderGatePanels(view: GatePanelView) {
  const host = el<HTMLDivElement>("gate-panels");
  host.innerHTML = "";
  for (const panel of view.panels) {
    const div = document.createElement("div");
    div.className = `panel ${view.offline ? "offline" : panel.ok ? "pass" : "fail"}`;
    div.innerHTML = `<strong>${panel.label}</strong><span>${panel.value}</span>`;
    host.appendChild(div);
  }
  if (view.offline) setBanner("Server unreachable - values not validated", "offline");
}

async function refreshGatePanels() {
  try {
    if (!gateConfig) gateConfig = await api.getGateConfig();
    renderGatePanels(buildGatePanels(gateConfig, metadataFromInputs()));
    setBanner("", "info");
  } catch (err) {
    if (err instanceof OfflineError) {
      renderGatePanels(offlineGatePanels());
      return;
    }
    throw err;
  }
}

async function onCreateCase() {
  currentCase = await api.createCase();
  el<HTMLSpanElement>("case-id").textContent = currentCase.case_id;
  el<HTMLDivElement>("capture-section").hidden = false;
  await refreshGatePanels();
}

async function onSubmitCapture() {
  if (!currentCase) return;
  const imageInput = el<HTMLInputElement>("file-image");
  const depthInput = el<HTMLInputElement>("file-depth");
  const maskInput = el<HTMLInputElement>("file-mask");
  const image = imageInput.files?.[0];
  const depth = depthInput.files?.[0];
  if (!image || !depth) {
    setBanner("Choose both an image and a depth frame", "error");
    return;
  }
  try {
    currentCase = await api.submitCapture(
      currentCase.case_id,
      image,
      depth,
      metadataFromInputs(),
      maskInput.files?.[0],
    );
    setBanner("", "info");
    await renderReview();
  } catch (err) {
    if (err instanceof ApiError && err.code === "gate_failed") {
      setBanner("Capture rejected: gate conditions not met", "error");
      return;
    }
    if (err instanceof OfflineError) {
      renderGatePanels(offlineGatePanels());
      return;
    }
    throw err;
  }
}

async function renderReview() {
  if (!currentCase) return;
  const capture = captureUnderReview(currentCase);
  const section = el<HTMLDivElement>("review-section");
  if (!capture) {
    section.hidden = true;
    return;
  }
  const urls = await api.getOverlayUrls(currentCase.case_id, capture.capture_id);
  const view = buildReviewView(capture, urls);
  el<HTMLImageElement>("overlay-semi").src = api.resolveUrl(view.semiUrl);
  el<HTMLImageElement>("overlay-opaque").src = api.resolveUrl(view.opaqueUrl);
  el<HTMLSpanElement>("measured-diameter").textContent =
    view.diameterDisplay === null ? "(no measurement)" : `${view.diameterDisplay} mm`;
  const acceptBtn = el<HTMLButtonElement>("btn-accept");
  const retakeBtn = el<HTMLButtonElement>("btn-retake");
  acceptBtn.disabled = retakeBtn.disabled = !review.canDecide(capture);
  section.hidden = false;
}

async function onDecision(decision: "accept" | "retake") {
  if (!currentCase) return;
  const capture = captureUnderReview(currentCase);
  if (!capture) return;
  el<HTMLButtonElement>("btn-accept").disabled = true;
  el<HTMLButtonElement>("btn-retake").disabled = true;
  const outcome = await review.decide(currentCase.case_id, capture, decision);
  if (outcome.kind === "conflict") {
    setBanner(`Decision already recorded elsewhere: ${outcome.message}`, "error");
    currentCase = await api.getCase(currentCase.case_id);
  } else if (outcome.kind === "decided") {
    currentCase = outcome.case;
  }
  if (decision === "accept" && outcome.kind === "decided") {
    renderQuestionnaire();
    el<HTMLDivElement>("questionnaire-section").hidden = false;
  } else {
    setBanner("Capture marked for retake - submit a new capture", "info");
    await renderReview();
  }
}

function renderQuestionnaire() {
  const host = el<HTMLDivElement>("questions");
  host.innerHTML = "";
  for (const field of QUESTIONNAIRE_FIELDS) {
    const row = document.createElement("div");
    row.className = "question";
    const label = document.createElement("span");
    label.textContent = QUESTION_LABELS[field];
    row.appendChild(label);
    for (const value of [true, false]) {
      const btn = document.createElement("button");
      btn.textContent = value ? "Yes" : "No";
      btn.dataset.field = field;
      btn.dataset.value = String(value);
      btn.className = form[field] === value ? "selected" : "";
      btn.addEventListener("click", () => {
        form = setAnswer(form, field, value);
        renderQuestionnaire();
      });
      row.appendChild(btn);
    }
    host.appendChild(row);
  }
  const submit = el<HTMLButtonElement>("btn-submit-questionnaire");
  submit.disabled = !canSubmit(form);
  el<HTMLSpanElement>("questionnaire-missing").textContent = canSubmit(form)
    ? ""
    : `${missingFields(form).length} unanswered`;
}

async function onSubmitQuestionnaire() {
  if (!currentCase) return;
  currentCase = await api.submitQuestionnaire(currentCase.case_id, toPayload(form));
  const assessment = await api.getAssessment(currentCase.case_id);
  const result = buildResultView(assessment);
  el<HTMLSpanElement>("result-diameter").textContent = `${result.diameterDisplay} mm`;
  el<HTMLSpanElement>("result-threshold").textContent = result.thresholdDisplay;
  const label = el<HTMLSpanElement>("result-label");
  label.textContent = result.resultLabel;
  label.className = result.resultLabel === "Positive" ? "positive" : "negative";
  el<HTMLDivElement>("result-section").hidden = false;
}

async function refreshReminders() {
  try {
    const due = await api.dueReminders(new Date().toISOString());
    const host = el<HTMLUListElement>("reminder-list");
    host.innerHTML = "";
    for (const view of buildReminderViews(due)) {
      const li = document.createElement("li");
      li.textContent = `case ${view.caseId.slice(0, 8)}: read window ${view.windowText} `;
      const ack = document.createElement("button");
      ack.textContent = "Acknowledge";
      ack.addEventListener("click", async () => {
        await api.ackReminder(view.reminderId);
        await refreshReminders();
      });
      li.appendChild(ack);
      host.appendChild(li);
    }
  } catch (err) {
    if (err instanceof OfflineError) {
      setBanner("Server unreachable - reminders unavailable", "offline");
      return;
    }
    throw err;
  }
}

export function bootstrap() {
  el<HTMLButtonElement>("btn-new-case").addEventListener("click", onCreateCase);
  el<HTMLButtonElement>("btn-submit-capture").addEventListener(
    "click",
    onSubmitCapture,
  );
  el<HTMLButtonElement>("btn-accept").addEventListener("click", () =>
    onDecision("accept"),
  );
  el<HTMLButtonElement>("btn-retake").addEventListener("click", () =>
    onDecision("retake"),
  );
  el<HTMLButtonElement>("btn-submit-questionnaire").addEventListener(
    "click",
    onSubmitQuestionnaire,
  );
  for (const id of ["meta-depth", "meta-pitch", "meta-roll"]) {
    el<HTMLInputElement>(id).addEventListener("input", refreshGatePanels);
  }
  void refreshReminders();
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", bootstrap);
}
