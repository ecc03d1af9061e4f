/**
 * Capture review: dual overlays plus the accept/retake decision loop.
 *
 * Exactly one decision is posted per capture: controls lock while a post
 * is in flight and stay locked once the capture is decided. A 409 from the
 * server (a raced decision) is surfaced as a conflict and also locks the
 * capture.
 */

import { ApiError, GatewayClient } from "./api.js";
import type { CaptureDto, CaseDto } from "./types.js";

export interface ReviewView {
  captureId: string;
  semiUrl: string;
  opaqueUrl: string;
  /** Server-provided display string; never recomputed client-side. */
  diameterDisplay: string | null;
  decided: boolean;
  accepted: boolean | null;
}

export function buildReviewView(
  capture: CaptureDto,
  urls: { semi_url: string; opaque_url: string },
): ReviewView {
  return {
    captureId: capture.capture_id,
    semiUrl: urls.semi_url,
    opaqueUrl: urls.opaque_url,
    diameterDisplay: capture.measurement?.diameter_mm_display ?? null,
    decided: capture.accepted !== null,
    accepted: capture.accepted,
  };
}

export type DecisionOutcome =
  | { kind: "decided"; case: CaseDto }
  | { kind: "blocked" }
  | { kind: "conflict"; message: string };

export class ReviewController {
  private locked = new Set<string>();

  constructor(private readonly api: GatewayClient) {}

  canDecide(capture: CaptureDto): boolean {
    return capture.accepted === null && !this.locked.has(capture.capture_id);
  }

  /** Post accept/retake once; further calls for the capture are blocked. */
  async decide(
    caseId: string,
    capture: CaptureDto,
    decision: "accept" | "retake",
  ): Promise<DecisionOutcome> {
    if (!this.canDecide(capture)) {
      return { kind: "blocked" };
    }
    this.locked.add(capture.capture_id);
    try {
      const updated = await this.api.decideCapture(
        caseId,
        capture.capture_id,
        decision,
      );
      return { kind: "decided", case: updated };
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        return { kind: "conflict", message: err.message };
      }
      this.locked.delete(capture.capture_id); // transient failure: allow retry
      throw err;
    }
  }
}

/** The capture the review screen should show: latest undecided, else latest. */
export function captureUnderReview(c: CaseDto): CaptureDto | null {
  const undecided = c.captures.filter((cap) => cap.accepted === null);
  if (undecided.length > 0) return undecided[undecided.length - 1] ?? null;
  return c.captures[c.captures.length - 1] ?? null;
}
