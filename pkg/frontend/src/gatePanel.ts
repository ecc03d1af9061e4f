/**
 * Gate panel view models.
 *
 * Pass/fail coloring mirrors the server's gate rules using thresholds
 * fetched from /config/gate; nothing here hard-codes a limit, so the
 * client can never disagree with the server about what passes.
 */

import type { CaptureMetadata, GateConfigDto } from "./types.js";

export interface PanelItem {
  label: string;
  value: string;
  ok: boolean;
}

export interface GatePanelView {
  offline: boolean;
  panels: PanelItem[];
  allOk: boolean;
}

export function buildGatePanels(
  cfg: GateConfigDto,
  m: CaptureMetadata,
): GatePanelView {
  const depthOk = m.depth_mm >= cfg.depth_min_mm && m.depth_mm <= cfg.depth_max_mm;
  const orientationOk =
    Math.abs(m.pitch_deg) <= cfg.pitch_tolerance_deg &&
    Math.abs(m.roll_deg) <= cfg.roll_tolerance_deg;
  let alignmentOk = false;
  let alignmentValue = "no candidate";
  if (m.candidate) {
    const dx = m.candidate.center.x - cfg.guide_center.x;
    const dy = m.candidate.center.y - cfg.guide_center.y;
    alignmentOk =
      Math.hypot(dx, dy) <= cfg.guide_inner_radius_px &&
      m.candidate.radius_px <= cfg.guide_outer_radius_px;
    alignmentValue = `center (${m.candidate.center.x}, ${m.candidate.center.y}), r=${m.candidate.radius_px}px`;
  }
  const panels: PanelItem[] = [
    {
      label: `Depth (${cfg.depth_min_mm}-${cfg.depth_max_mm} mm)`,
      value: `${m.depth_mm} mm`,
      ok: depthOk,
    },
    {
      label: `Orientation (±${cfg.pitch_tolerance_deg}°)`,
      value: `pitch ${m.pitch_deg}°, roll ${m.roll_deg}°`,
      ok: orientationOk,
    },
    {
      label: "Guide alignment",
      value: alignmentValue,
      ok: alignmentOk,
    },
  ];
  return {
    offline: false,
    panels,
    allOk: depthOk && orientationOk && alignmentOk,
  };
}

/** Distinct offline state: no panel may read as passing. */
export function offlineGatePanels(): GatePanelView {
  const panels: PanelItem[] = [
    { label: "Depth", value: "offline", ok: false },
    { label: "Orientation", value: "offline", ok: false },
    { label: "Guide alignment", value: "offline", ok: false },
  ];
  return { offline: true, panels, allOk: false };
}
