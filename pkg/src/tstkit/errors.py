"""Exception hierarchy with stable machine-readable codes.

Every error surfaced by the CLI or the HTTP service maps to exactly one
``code``; ``http_status`` is what the service responds with when the error
escapes a handler.
"""

from __future__ import annotations


class TstKitError(Exception):
    """Base class for all toolkit errors."""

    code = "internal_error"
    http_status = 500

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_api_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "http_status": self.http_status}


class InputError(TstKitError):
    """Malformed or unreadable input data (CLI exit code 3)."""

    code = "input_error"
    http_status = 400


class FileReadError(InputError):
    code = "file_unreadable"


class UnsupportedFormatError(InputError):
    code = "unsupported_format"


class CorruptStreamError(InputError):
    code = "corrupt_stream"


class BadMagicError(InputError):
    code = "bad_magic"


class SizeMismatchError(InputError):
    code = "size_mismatch"


class DimensionMismatchError(InputError):
    code = "dimension_mismatch"


class StreamParseError(InputError):
    """Sensor-stream text that fails to parse; carries the 1-based line number."""

    code = "stream_parse"

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class PipelineError(TstKitError):
    """Well-formed input that the pipeline cannot process (CLI exit code 4)."""

    code = "pipeline_error"
    http_status = 422


class OutOfBoundsError(PipelineError):
    code = "out_of_bounds"


class DegenerateMaskError(PipelineError):
    code = "degenerate_mask"


class CalibrationRangeError(PipelineError):
    code = "out_of_calibration_range"


class GateTerminalError(PipelineError):
    code = "gate_terminal"


class GateFailedError(PipelineError):
    code = "gate_failed"


class InvalidWindowError(PipelineError):
    code = "invalid_window"


class StoreError(TstKitError):
    code = "store_error"
    http_status = 500


class NotFoundError(StoreError):
    code = "not_found"
    http_status = 404


class CorruptRecordError(StoreError):
    code = "corrupt_record"


class WriteFailureError(StoreError):
    code = "store_write_failure"


class ConflictError(StoreError):
    """Mutation incompatible with current record state."""

    code = "conflict"
    http_status = 409


class DecisionConflictError(ConflictError):
    code = "decision_conflict"
    http_status = 409
