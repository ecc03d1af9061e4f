from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tstkit.phantom import PhantomSpec, consistent_scale, generate_phantom
from tstkit.raster import Raster
from tstkit.store import RecordStore


@pytest.fixture
def store(tmp_path) -> RecordStore:
    return RecordStore(tmp_path / "store")


@pytest.fixture
def phantom_10mm():
    """10 mm phantom at the calibrated depth, with exact ground truth."""
    spec = PhantomSpec(
        true_diameter_mm=10.0,
        depth_mm=219.5,
        px_per_mm_at_calibrated_depth=consistent_scale(10.0),
    )
    return generate_phantom(spec)


def solid_raster(width: int, height: int, color=(128, 128, 128)) -> Raster:
    px = np.empty((height, width, 3), dtype=np.uint8)
    px[:] = np.array(color, dtype=np.uint8)
    return Raster(px)
