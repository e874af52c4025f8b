import json

import numpy as np
import tifffile
from click.testing import CliRunner

from zenesis.cli import main
from zenesis.volume import load_mask_stack, write_mask_stack

from .conftest import drifting_disk_volume


def write_disk_volume(path, **kw):
    pixels, gt = drifting_disk_volume(**kw)
    tifffile.imwrite(str(path), pixels[:, :, :, 0], photometric="minisblack")
    return gt


class TestBatchCommand:
    def test_batch_exports(self, tmp_path):
        vol = tmp_path / "vol.tif"
        write_disk_volume(vol, depth=6)
        out = tmp_path / "out"
        result = CliRunner().invoke(main, [
            "batch", "--input", str(vol), "--prompt", "disk",
            "--out", str(out), "--refine-window", "3",
        ])
        assert result.exit_code == 0, result.output
        masks = load_mask_stack(out / "masks.tif")
        assert len(masks) == 6
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["depth"] == 6
        assert "0 refined replacements" in result.output

    def test_batch_reports_replacements(self, tmp_path):
        vol = tmp_path / "vol.tif"
        write_disk_volume(vol, depth=12, zero_slice=8)
        out = tmp_path / "out"
        result = CliRunner().invoke(main, [
            "batch", "--input", str(vol), "--prompt", "disk",
            "--out", str(out), "--refine-window", "3",
        ])
        assert result.exit_code == 0, result.output
        assert "1 refined replacements" in result.output


class TestEvalCommand:
    def test_eval_writes_reports(self, tmp_path):
        rng = np.random.default_rng(0)
        masks = [rng.random((8, 8)) > 0.5 for _ in range(4)]
        stack = tmp_path / "m.tif"
        write_mask_stack(masks, stack)
        report = tmp_path / "r.json"
        csv = tmp_path / "r.csv"
        result = CliRunner().invoke(main, [
            "eval", "--pred", str(stack), "--gt", str(stack),
            "--report", str(report), "--csv", str(csv),
        ])
        assert result.exit_code == 0, result.output
        assert "iou: 1.0000±0.0000" in result.output
        data = json.loads(report.read_text())
        assert data["sample_count"] == 4
        assert csv.read_text().startswith("slice,accuracy,iou,dice")

    def test_empty_zero_flag(self, tmp_path):
        stack = tmp_path / "e.tif"
        write_mask_stack([np.zeros((4, 4), bool)], stack)
        default = CliRunner().invoke(main, ["eval", "--pred", str(stack), "--gt", str(stack)])
        assert "iou: 1.0000" in default.output
        zeroed = CliRunner().invoke(main, [
            "eval", "--pred", str(stack), "--gt", str(stack), "--empty-zero"])
        assert "iou: 0.0000" in zeroed.output


class TestBaselineCommand:
    def test_otsu(self, tmp_path):
        vol = tmp_path / "vol.tif"
        write_disk_volume(vol, depth=4)
        out = tmp_path / "out"
        result = CliRunner().invoke(main, [
            "baseline", "--method", "otsu", "--input", str(vol), "--out", str(out)])
        assert result.exit_code == 0, result.output
        masks = load_mask_stack(out / "otsu-masks.tif")
        assert len(masks) == 4
        assert masks[0].sum() > 0  # the disk separates

    def test_ungrounded(self, tmp_path):
        vol = tmp_path / "vol.tif"
        write_disk_volume(vol, depth=4)
        out = tmp_path / "out"
        result = CliRunner().invoke(main, [
            "baseline", "--method", "ungrounded", "--input", str(vol), "--out", str(out)])
        assert result.exit_code == 0, result.output
        summary = json.loads((out / "ungrounded-summary.json").read_text())
        assert summary["depth"] == 4


class TestEnvOverrides:
    def test_data_dir_env_overrides_flag(self, tmp_path, monkeypatch):
        vol = tmp_path / "vol.tif"
        write_disk_volume(vol, depth=4)
        env_dir = tmp_path / "env-sessions"
        monkeypatch.setenv("ZENESIS_DATA_DIR", str(env_dir))
        out = tmp_path / "out"
        result = CliRunner().invoke(main, [
            "batch", "--input", str(vol), "--prompt", "disk", "--out", str(out),
            "--data-dir", str(tmp_path / "flag-sessions"),
        ])
        assert result.exit_code == 0, result.output
        assert env_dir.exists()
        assert not (tmp_path / "flag-sessions").exists()
