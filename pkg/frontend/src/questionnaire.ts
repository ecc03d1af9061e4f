/**
 * Questionnaire form state and the assessment result view.
 *
 * The form tracks tri-state answers (unanswered/yes/no) and only becomes
 * submittable when every question is answered. The result view is a pure
 * pass-through of API fields: the diameter string, threshold, and
 * positive/negative label all come from the server response.
 */

import type { AssessmentDto, QuestionnaireDto, QuestionnaireField } from "./types.js";
import { QUESTIONNAIRE_FIELDS } from "./types.js";

export const QUESTION_LABELS: Record<QuestionnaireField, string> = {
  hiv_positive: "Is the patient HIV positive?",
  recent_tb_contact: "Recent contact with an active TB case?",
  immunosuppressed: "Immunosuppressed (or on immunosuppressive therapy)?",
  organ_transplant: "Organ transplant recipient?",
  fibrotic_chest_xray: "Fibrotic changes on a prior chest X-ray?",
  recent_immigrant_high_burden: "Recent immigrant from a high TB-burden country?",
  injection_drug_use: "History of injection drug use?",
  high_risk_congregate_resident:
    "Resident or employee of a high-risk congregate setting?",
  mycobacteriology_lab_worker: "Mycobacteriology laboratory worker?",
  child_under_4: "Child under 4 years of age?",
  lived_low_incidence_area: "Have you lived in a low incidence TB area?",
};

export type FormState = Partial<Record<QuestionnaireField, boolean>>;

export function emptyForm(): FormState {
  return {};
}

export function setAnswer(
  form: FormState,
  field: QuestionnaireField,
  value: boolean,
): FormState {
  return { ...form, [field]: value };
}

export function missingFields(form: FormState): QuestionnaireField[] {
  return QUESTIONNAIRE_FIELDS.filter((f) => typeof form[f] !== "boolean");
}

export function canSubmit(form: FormState): boolean {
  return missingFields(form).length === 0;
}

/** Throws when any question is unanswered; field-level messages come from
 * missingFields. */
export function toPayload(form: FormState): QuestionnaireDto {
  const missing = missingFields(form);
  if (missing.length > 0) {
    throw new Error(`unanswered questions: ${missing.join(", ")}`);
  }
  const payload = {} as QuestionnaireDto;
  for (const f of QUESTIONNAIRE_FIELDS) {
    payload[f] = form[f] as boolean;
  }
  return payload;
}

export interface ResultView {
  diameterDisplay: string;
  thresholdDisplay: string;
  resultLabel: "Positive" | "Negative";
  ruleId: string;
}

/** Renders exactly what the API returned; no clinical value is derived. */
export function buildResultView(assessment: AssessmentDto): ResultView {
  return {
    diameterDisplay: assessment.diameter_mm_display,
    thresholdDisplay: `${assessment.threshold_mm} mm`,
    resultLabel: assessment.result === "positive" ? "Positive" : "Negative",
    ruleId: assessment.rule_id,
  };
}
