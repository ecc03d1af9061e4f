"""HTTP JSON service exposing the capture/measure/interpret flow.

Endpoints (all JSON unless noted):

    GET  /config/gate                                  gate thresholds for clients
    POST /cases                                        create a case
    GET  /cases/{id}                                   fetch a case
    POST /cases/{id}/captures                          multipart capture submission
    GET  /cases/{id}/captures/{cid}/overlay            both overlay URLs
    GET  /cases/{id}/captures/{cid}/overlay?style=...  overlay PNG (semi|opaque)
    POST /cases/{id}/captures/{cid}/decision           {"decision": "accept"|"retake"}
    POST /cases/{id}/questionnaire                     flat boolean object
    GET  /cases/{id}/assessment                        classify accepted measurement
    GET  /reminders/due?now=RFC3339                    due follow-up reminders
    POST /reminders/{id}/ack                           acknowledge a reminder

Handlers are thin wrappers over the library; all state lives in the record
store. A capture submission carries the client-side gate metadata (depth,
pitch, roll, optional candidate) and is re-validated server-side against
the configured gate; offending submissions get 422 ``gate_failed``.
"""

from __future__ import annotations

import io
import json

from fastapi import FastAPI, File, Form, Query, Request, Response, UploadFile
from fastapi.responses import JSONResponse

from .errors import (
    GateFailedError,
    InputError,
    NotFoundError,
    TstKitError,
)
from .gate import DEFAULT_GATE_CONFIG, GateConfig, SensorSample, evaluate_sample
from .interpret import DEFAULT_RULES, Questionnaire, RuleTable, classify
from .measure import CalibrationTable, DEFAULT_TABLE
from .pipeline import run_measurement_pipeline
from .raster import Point, Raster, decode_depth_frame, load_raster
from .segment import (
    OPAQUE,
    SEMI_TRANSPARENT,
    SegmentationMask,
    ingest_mask,
    render_overlay,
)
from .store import (
    CaptureArtifact,
    DEFAULT_READ_WINDOW_HOURS,
    RecordStore,
    TstCase,
    new_record_id,
    parse_utc,
)

import numpy as np
from PIL import Image


def _case_json(case: TstCase) -> dict:
    d = case.to_dict()
    # Expose display-rounded millimeters alongside full precision so clients
    # never have to compute a clinical value themselves.
    for capture in d["captures"]:
        m = capture.get("measurement")
        if m:
            m["diameter_mm_display"] = f"{m['diameter_mm']:.2f}"
    if d.get("assessment"):
        d["assessment"]["diameter_mm_display"] = (
            f"{d['assessment']['diameter_mm']:.2f}"
        )
    return d


def _decode_upload_png(data: bytes, name: str) -> Raster:
    try:
        im = Image.open(io.BytesIO(data))
        im.load()
    except Exception as exc:
        raise InputError(f"{name}: not a decodable PNG: {exc}") from exc
    if im.mode not in ("RGB", "RGBA"):
        raise InputError(f"{name}: expected RGB/RGBA PNG, got mode {im.mode}")
    return Raster(np.asarray(im, dtype=np.uint8)[:, :, :3].copy())


def create_app(
    store: RecordStore,
    *,
    gate_config: GateConfig = DEFAULT_GATE_CONFIG,
    table: CalibrationTable = DEFAULT_TABLE,
    rules: RuleTable = DEFAULT_RULES,
    read_window_hours: tuple[float, float] = DEFAULT_READ_WINDOW_HOURS,
    auto_reminder: bool = True,
) -> FastAPI:
    app = FastAPI(title="tstkit", docs_url=None, redoc_url=None)

    @app.exception_handler(TstKitError)
    async def _domain_error(request: Request, exc: TstKitError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": exc.message},
        )

    @app.get("/config/gate")
    def get_gate_config():
        return gate_config.to_dict()

    @app.post("/cases", status_code=201)
    async def create_case(request: Request):
        body = await request.body()
        administered_at = None
        if body:
            try:
                payload = json.loads(body)
                if payload.get("administered_at"):
                    administered_at = parse_utc(payload["administered_at"])
            except (json.JSONDecodeError, ValueError) as exc:
                raise InputError(f"bad case body: {exc}") from exc
        case = store.create_case(administered_at)
        if auto_reminder:
            store.schedule_reminder(case.case_id, read_window_hours)
        return _case_json(store.load_case(case.case_id))

    @app.get("/cases/{case_id}")
    def get_case(case_id: str):
        return _case_json(store.load_case(case_id))

    @app.post("/cases/{case_id}/captures", status_code=201)
    async def submit_capture(
        case_id: str,
        image: UploadFile = File(...),
        depth: UploadFile = File(...),
        mask: UploadFile | None = File(None),
        depth_mm: int = Form(...),
        pitch_deg: float = Form(...),
        roll_deg: float = Form(...),
        candidate_x: int | None = Form(None),
        candidate_y: int | None = Form(None),
        candidate_radius_px: float | None = Form(None),
    ):
        case = store.load_case(case_id)

        candidate = (
            Point(candidate_x, candidate_y)
            if candidate_x is not None and candidate_y is not None
            else None
        )
        try:
            sample = SensorSample(0, depth_mm, pitch_deg, roll_deg, candidate,
                                  candidate_radius_px if candidate else None)
        except ValueError as exc:
            raise InputError(f"bad gate metadata: {exc}") from exc
        status = evaluate_sample(gate_config, sample)
        # Trust-but-verify: depth and orientation always re-checked; the
        # alignment panel only when the client sent candidate tracking data.
        gate_ok = status.depth_ok and status.orientation_ok and (
            status.alignment_ok if candidate is not None else True
        )
        if not gate_ok:
            raise GateFailedError(
                "capture metadata fails the gate: "
                + json.dumps(status.to_dict())
            )

        image_bytes = await image.read()
        raster = _decode_upload_png(image_bytes, "image")
        depth_bytes = await depth.read()
        decode_depth_frame(depth_bytes, name="depth")  # validate format

        ext_mask: SegmentationMask | None = None
        mask_rel = None
        if mask is not None:
            mask_bytes = await mask.read()
            try:
                mim = Image.open(io.BytesIO(mask_bytes))
                mim.load()
            except Exception as exc:
                raise InputError(f"mask: not a decodable PNG: {exc}") from exc
            if mim.mode != "L":
                raise InputError(f"mask: expected 8-bit grayscale PNG, got {mim.mode}")
            arr = np.asarray(mim, dtype=np.uint8)
            if arr.shape != (raster.height, raster.width):
                raise InputError(
                    f"mask is {arr.shape[1]}x{arr.shape[0]}, image is "
                    f"{raster.width}x{raster.height}"
                )
            ext_mask = SegmentationMask(arr >= 128)
            mask_rel = store.put_artifact(mask_bytes, ".png")

        result = run_measurement_pipeline(raster, mask=ext_mask, table=table)

        image_rel = store.put_artifact(image_bytes, ".png")
        depth_rel = store.put_artifact(depth_bytes, ".dpth")
        if mask_rel is None:
            buf = io.BytesIO()
            Image.fromarray(
                np.where(result.mask.bits, 255, 0).astype(np.uint8), mode="L"
            ).save(buf, format="PNG")
            mask_rel = store.put_artifact(buf.getvalue(), ".png")

        capture = CaptureArtifact(
            capture_id=new_record_id(),
            image_path=image_rel,
            depth_path=depth_rel,
            mask_path=mask_rel,
            measurement=result.measurement,
        )
        store.add_capture(case.case_id, capture)
        return _case_json(store.load_case(case.case_id))

    @app.get("/cases/{case_id}/captures/{capture_id}/overlay")
    def get_overlay(case_id: str, capture_id: str, style: str | None = Query(None)):
        case = store.load_case(case_id)
        capture = case.get_capture(capture_id)
        base = f"/cases/{case_id}/captures/{capture_id}/overlay"
        if style is None:
            return {"semi_url": f"{base}?style=semi", "opaque_url": f"{base}?style=opaque"}
        if style not in ("semi", "opaque"):
            raise InputError("style must be 'semi' or 'opaque'")
        raster = load_raster(store.artifact_path(capture.image_path))
        if capture.mask_path is None:
            raise NotFoundError("capture has no mask to overlay")
        m = ingest_mask(
            store.artifact_path(capture.mask_path), raster.width, raster.height
        )
        overlay = render_overlay(
            raster, m, SEMI_TRANSPARENT if style == "semi" else OPAQUE
        )
        buf = io.BytesIO()
        Image.fromarray(overlay.pixels, mode="RGB").save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    @app.post("/cases/{case_id}/captures/{capture_id}/decision")
    async def decide(case_id: str, capture_id: str, request: Request):
        try:
            payload = json.loads(await request.body())
            decision = payload["decision"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"body must be {{\"decision\": ...}}: {exc}") from exc
        if decision not in ("accept", "retake"):
            raise InputError("decision must be 'accept' or 'retake'")
        store.decide_capture(case_id, capture_id, decision == "accept")
        return _case_json(store.load_case(case_id))

    @app.post("/cases/{case_id}/questionnaire")
    async def set_questionnaire(case_id: str, request: Request):
        try:
            payload = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON body: {exc}") from exc
        q = Questionnaire.from_dict(payload)
        store.set_questionnaire(case_id, q)
        return _case_json(store.load_case(case_id))

    @app.get("/cases/{case_id}/assessment")
    def get_assessment(case_id: str):
        case = store.load_case(case_id)
        if case.assessment is not None:
            return _case_json(case)["assessment"]
        accepted = case.accepted_capture
        if accepted is None or accepted.measurement is None:
            raise NotFoundError("case has no accepted measured capture yet")
        if case.questionnaire is None:
            raise NotFoundError("case has no questionnaire yet")
        assessment = classify(
            accepted.measurement.diameter_mm, case.questionnaire, rules
        )
        store.set_assessment(case_id, assessment)
        return _case_json(store.load_case(case_id))["assessment"]

    @app.get("/reminders/due")
    def reminders_due(now: str = Query(...)):
        try:
            ts = parse_utc(now)
        except ValueError as exc:
            raise InputError(f"bad 'now' timestamp: {exc}") from exc
        return {"reminders": [r.to_dict() for r in store.due_reminders(ts)]}

    @app.post("/reminders/{reminder_id}/ack")
    def ack_reminder(reminder_id: str):
        return store.acknowledge_reminder(reminder_id).to_dict()

    @app.post("/cases/{case_id}/reminders", status_code=201)
    async def schedule_case_reminder(case_id: str, request: Request):
        start_h, end_h = read_window_hours
        body = await request.body()
        if body:
            try:
                payload = json.loads(body)
                start_h = float(payload.get("start_hours", start_h))
                end_h = float(payload.get("end_hours", end_h))
            except (json.JSONDecodeError, TypeError, ValueError) as exc:
                raise InputError(f"bad reminder body: {exc}") from exc
        return store.schedule_reminder(case_id, (start_h, end_h)).to_dict()

    return app
