/** DTOs mirrored from the gateway's JSON responses. */

export interface PointDto {
  x: number;
  y: number;
}

export interface GateConfigDto {
  guide_center: PointDto;
  guide_inner_radius_px: number;
  guide_outer_radius_px: number;
  depth_min_mm: number;
  depth_max_mm: number;
  pitch_tolerance_deg: number;
  roll_tolerance_deg: number;
  required_consecutive: number;
}

export interface MeasurementDto {
  p1: PointDto;
  p2: PointDto;
  diameter_px: number;
  factor: number;
  diameter_mm: number;
  /** Server-rounded display string; clients must show this, not recompute. */
  diameter_mm_display: string;
}

export interface CaptureDto {
  capture_id: string;
  image_path: string;
  depth_path: string;
  mask_path: string | null;
  measurement: MeasurementDto | null;
  accepted: boolean | null;
}

export type QuestionnaireDto = Record<QuestionnaireField, boolean>;

export type QuestionnaireField =
  | "hiv_positive"
  | "recent_tb_contact"
  | "immunosuppressed"
  | "organ_transplant"
  | "fibrotic_chest_xray"
  | "recent_immigrant_high_burden"
  | "injection_drug_use"
  | "high_risk_congregate_resident"
  | "mycobacteriology_lab_worker"
  | "child_under_4"
  | "lived_low_incidence_area";

export const QUESTIONNAIRE_FIELDS: QuestionnaireField[] = [
  "hiv_positive",
  "recent_tb_contact",
  "immunosuppressed",
  "organ_transplant",
  "fibrotic_chest_xray",
  "recent_immigrant_high_burden",
  "injection_drug_use",
  "high_risk_congregate_resident",
  "mycobacteriology_lab_worker",
  "child_under_4",
  "lived_low_incidence_area",
];

export interface AssessmentDto {
  diameter_mm: number;
  diameter_mm_display: string;
  threshold_mm: number;
  result: "positive" | "negative";
  rule_id: string;
}

export interface CaseDto {
  case_id: string;
  created_at: string;
  administered_at: string;
  questionnaire: QuestionnaireDto | null;
  captures: CaptureDto[];
  assessment: AssessmentDto | null;
  status: "awaiting_read" | "measured" | "assessed";
}

export interface OverlayUrlsDto {
  semi_url: string;
  opaque_url: string;
}

export interface ReminderDto {
  reminder_id: string;
  case_id: string;
  window_start: string;
  window_end: string;
  acknowledged: boolean;
}

/** Client-side gate metadata entered for a capture submission. */
export interface CaptureMetadata {
  depth_mm: number;
  pitch_deg: number;
  roll_deg: number;
  candidate?: { center: PointDto; radius_px: number };
}
