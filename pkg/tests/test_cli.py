from __future__ import annotations

import json

import numpy as np
import pytest
from PIL import Image

from tstkit.cli import EXIT_INPUT, EXIT_OK, EXIT_PIPELINE, main
from tstkit.phantom import PhantomSpec, consistent_scale, generate_phantom
from tstkit.raster import save_raster
from tstkit.segment import save_mask


@pytest.fixture
def phantom_files(tmp_path):
    spec = PhantomSpec(
        true_diameter_mm=10.0,
        depth_mm=219.5,
        px_per_mm_at_calibrated_depth=consistent_scale(10.0),
    )
    raster, _, truth = generate_phantom(spec)
    image = tmp_path / "phantom.png"
    mask = tmp_path / "mask.png"
    save_raster(raster, image)
    save_mask(truth, mask)
    return image, mask


class TestMeasureCommand:
    def test_phantom_with_mask(self, phantom_files, capsys):
        image, mask = phantom_files
        rc = main(["measure", str(image), "--mask", str(mask)])
        assert rc == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert set(out) == {"p1", "p2", "diameter_px", "factor", "diameter_mm"}
        assert abs(out["diameter_mm"] - 10.0) <= 0.3

    def test_phantom_classical_route(self, phantom_files, capsys):
        image, _ = phantom_files
        rc = main(["measure", str(image)])
        assert rc == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert abs(out["diameter_mm"] - 10.0) <= 0.8

    def test_uniform_image_degenerate(self, tmp_path, capsys):
        arr = np.full((64, 64, 3), 150, dtype=np.uint8)
        Image.fromarray(arr).save(tmp_path / "flat.png")
        rc = main(["measure", str(tmp_path / "flat.png")])
        assert rc == EXIT_PIPELINE
        err = json.loads(capsys.readouterr().err)
        assert err["code"] == "degenerate_mask"

    def test_missing_file(self, tmp_path, capsys):
        rc = main(["measure", str(tmp_path / "absent.png")])
        assert rc == EXIT_INPUT
        err = json.loads(capsys.readouterr().err)
        assert err["code"] == "file_unreadable"

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["measure"])  # missing image argument
        assert exc.value.code == 2


class TestSegmentCommand:
    def test_writes_mask_and_dual_overlays(self, phantom_files, tmp_path, capsys):
        image, _ = phantom_files
        prefix = tmp_path / "out" / "seg"
        rc = main(["segment", str(image), "--output", str(prefix)])
        assert rc == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["pixel_count"] > 0
        assert (tmp_path / "out" / "seg_mask.png").exists()
        assert (tmp_path / "out" / "seg_overlay_semi.png").exists()
        assert (tmp_path / "out" / "seg_overlay_opaque.png").exists()


class TestGateSimCommand:
    def test_capture_after_five_passes(self, tmp_path, capsys):
        lines = [f"{i} 300 0.0 0.0 225 225 90" for i in range(5)]
        stream = tmp_path / "s.txt"
        stream.write_text("\n".join(lines) + "\n")
        rc = main(["gate-sim", str(stream)])
        assert rc == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        assert out[-1] == "Capture"
        assert len(out) == 6  # one line per sample + the decision

    def test_all_failing_stream(self, tmp_path, capsys):
        stream = tmp_path / "s.txt"
        stream.write_text("0 100 0 0\n1 100 0 0\n")
        rc = main(["gate-sim", str(stream)])
        assert rc == EXIT_OK
        assert capsys.readouterr().out.strip().splitlines()[-1] == "NoCapture"

    def test_malformed_line_3(self, tmp_path, capsys):
        stream = tmp_path / "s.txt"
        stream.write_text("0 300 0 0\n1 300 0 0\nnot a line\n")
        rc = main(["gate-sim", str(stream)])
        assert rc == EXIT_INPUT
        err = json.loads(capsys.readouterr().err)
        assert err["code"] == "stream_parse"
        assert "line 3" in err["message"]

    def test_custom_config(self, tmp_path, capsys):
        cfg = {
            "guide_center": {"x": 10, "y": 10},
            "guide_inner_radius_px": 5,
            "guide_outer_radius_px": 8,
            "required_consecutive": 1,
        }
        (tmp_path / "cfg.json").write_text(json.dumps(cfg))
        (tmp_path / "s.txt").write_text("0 300 0 0 10 10 6\n")
        rc = main(["gate-sim", str(tmp_path / "s.txt"), "--config",
                   str(tmp_path / "cfg.json")])
        assert rc == EXIT_OK
        assert capsys.readouterr().out.strip().splitlines()[-1] == "Capture"


class TestEvalCommands:
    def test_depth_sweep_outputs(self, tmp_path, capsys):
        rc = main([
            "eval", "depth-sweep",
            "--true-mm", "10",
            "--depths", "210:230:10",
            "--trials", "2",
            "--seed", "7",
            "--output", str(tmp_path / "sweep"),
        ])
        assert rc == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["best_depths_mm"]
        for ext in (".csv", ".json", ".png"):
            assert (tmp_path / "sweep").with_suffix(ext).exists()

    def test_scalar_fit_outputs(self, tmp_path, capsys):
        rc = main([
            "eval", "scalar-fit",
            "--true-mm", "10",
            "--trials", "3",
            "--seed", "7",
            "--output", str(tmp_path / "fit"),
        ])
        assert rc == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert abs(out["fitted_factor"] - 0.1523) < 0.002
        for ext in (".csv", ".json", ".png"):
            assert (tmp_path / "fit").with_suffix(ext).exists()

    def test_seed_required(self):
        with pytest.raises(SystemExit) as exc:
            main(["eval", "scalar-fit", "--true-mm", "10", "--output", "x"])
        assert exc.value.code == 2
