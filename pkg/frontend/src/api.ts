/**
 * Typed client for the gateway HTTP JSON API.
 *
 * The UI talks to the backend exclusively through this module. Network
 * failures surface as OfflineError so views can switch to their offline
 * state; non-2xx responses surface as ApiError carrying the server's
 * machine-readable code.
 */

import type {
  AssessmentDto,
  CaseDto,
  CaptureMetadata,
  GateConfigDto,
  OverlayUrlsDto,
  QuestionnaireDto,
  ReminderDto,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class OfflineError extends Error {
  constructor(cause: unknown) {
    super(`server unreachable: ${String(cause)}`);
    this.name = "OfflineError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new OfflineError(err);
    }
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status}`;
      try {
        const body = await response.json();
        if (body && typeof body.code === "string") code = body.code;
        if (body && typeof body.message === "string") message = body.message;
      } catch {
        // non-JSON error body: keep defaults
      }
      throw new ApiError(response.status, code, message);
    }
    return response;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.request(path, init);
    return (await response.json()) as T;
  }

  getGateConfig(): Promise<GateConfigDto> {
    return this.json<GateConfigDto>("/config/gate");
  }

  createCase(administeredAt?: string): Promise<CaseDto> {
    return this.json<CaseDto>("/cases", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(administeredAt ? { administered_at: administeredAt } : {}),
    });
  }

  getCase(caseId: string): Promise<CaseDto> {
    return this.json<CaseDto>(`/cases/${caseId}`);
  }

  submitCapture(
    caseId: string,
    image: Blob,
    depth: Blob,
    metadata: CaptureMetadata,
    mask?: Blob,
  ): Promise<CaseDto> {
    const form = new FormData();
    form.append("image", image, "image.png");
    form.append("depth", depth, "depth.dpth");
    if (mask) form.append("mask", mask, "mask.png");
    form.append("depth_mm", String(metadata.depth_mm));
    form.append("pitch_deg", String(metadata.pitch_deg));
    form.append("roll_deg", String(metadata.roll_deg));
    if (metadata.candidate) {
      form.append("candidate_x", String(metadata.candidate.center.x));
      form.append("candidate_y", String(metadata.candidate.center.y));
      form.append("candidate_radius_px", String(metadata.candidate.radius_px));
    }
    return this.json<CaseDto>(`/cases/${caseId}/captures`, {
      method: "POST",
      body: form,
    });
  }

  getOverlayUrls(caseId: string, captureId: string): Promise<OverlayUrlsDto> {
    return this.json<OverlayUrlsDto>(
      `/cases/${caseId}/captures/${captureId}/overlay`,
    );
  }

  /** Absolute URL for an overlay image, for direct use in <img src>. */
  resolveUrl(path: string): string {
    return this.baseUrl + path;
  }

  decideCapture(
    caseId: string,
    captureId: string,
    decision: "accept" | "retake",
  ): Promise<CaseDto> {
    return this.json<CaseDto>(`/cases/${caseId}/captures/${captureId}/decision`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ decision }),
    });
  }

  submitQuestionnaire(caseId: string, q: QuestionnaireDto): Promise<CaseDto> {
    return this.json<CaseDto>(`/cases/${caseId}/questionnaire`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(q),
    });
  }

  getAssessment(caseId: string): Promise<AssessmentDto> {
    return this.json<AssessmentDto>(`/cases/${caseId}/assessment`);
  }

  dueReminders(nowIso: string): Promise<ReminderDto[]> {
    return this.json<{ reminders: ReminderDto[] }>(
      `/reminders/due?now=${encodeURIComponent(nowIso)}`,
    ).then((body) => body.reminders);
  }

  ackReminder(reminderId: string): Promise<ReminderDto> {
    return this.json<ReminderDto>(`/reminders/${reminderId}/ack`, {
      method: "POST",
    });
  }
}
