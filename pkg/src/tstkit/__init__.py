"""TST induration capture, measurement, and interpretation toolkit."""

from .errors import TstKitError
from .gate import (
    CaptureDecision,
    DEFAULT_GATE_CONFIG,
    GateConfig,
    GatePanelStatus,
    GateState,
    SensorSample,
    evaluate_sample,
    step,
)
from .interpret import (
    Assessment,
    DEFAULT_RULES,
    Questionnaire,
    RuleTable,
    ThresholdRule,
    TstResult,
    classify,
    determine_threshold,
)
from .measure import (
    BoundarySet,
    CalibrationBand,
    CalibrationTable,
    ChordMeasurement,
    DEFAULT_TABLE,
    extract_boundary,
    max_chord,
    measure,
    px_to_mm,
)
from .phantom import PhantomSpec, consistent_scale, generate_phantom
from .pipeline import run_measurement_pipeline
from .raster import (
    DepthFrame,
    Point,
    Raster,
    center_crop,
    denoise,
    enhance_contrast,
    get_millimeters_depth,
    load_depth_frame,
    load_raster,
    save_depth_frame,
    save_raster,
)
from .segment import (
    OPAQUE,
    OverlayStyle,
    SEMI_TRANSPARENT,
    SegmentationMask,
    ingest_mask,
    largest_component,
    render_overlay,
    save_mask,
    segment_classical,
)
from .store import CaptureArtifact, CaseStatus, RecordStore, Reminder, TstCase

__version__ = "0.1.0"
