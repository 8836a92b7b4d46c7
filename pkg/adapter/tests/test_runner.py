"""Export-run behavior with stub models."""

import json
import sys

import numpy as np
import pytest

from depth_export.formats import read_png16
from depth_export.runner import ExportConfig, ExportError, export_run, load_model

from dataset_stub import build_fake_corrupted_tree

TYPES = ("brightness", "smoke")
SEVS = (1, 2)


def _config(manifest, tmp_path, model, **kw):
    corrupted = tmp_path / "corrupted"
    build_fake_corrupted_tree(corrupted, manifest, TYPES, SEVS)
    defaults = dict(manifest=manifest, output_root=tmp_path / "pred",
                    corrupted_root=corrupted, model=model,
                    types=TYPES, severities=SEVS)
    defaults.update(kw)
    return ExportConfig(**defaults)


def test_identity_stub_reproduces_gt(dataset):
    manifest, tmp_path = dataset
    config = _config(manifest, tmp_path, "stub_models:identity_gt")
    report = export_run(config)
    total = 2 + 2 * len(TYPES) * len(SEVS)  # clean + corrupted units
    assert report.attempted == total
    assert report.succeeded == total
    assert not report.failures
    gt = read_png16(tmp_path / "data" / "depth" / "frame_000.png")
    for rel in ("clean/frame_000.png", "brightness/1/frame_000.png",
                "smoke/2/frame_000.png"):
        np.testing.assert_array_equal(read_png16(tmp_path / "pred" / rel), gt)


def test_constant_stub_writes_constant(dataset):
    manifest, tmp_path = dataset
    config = _config(manifest, tmp_path, "stub_models:constant_25mm")
    report = export_run(config)
    assert report.ok()
    out = read_png16(tmp_path / "pred" / "clean" / "frame_001.png")
    np.testing.assert_array_equal(out, 25.0)


def test_raising_stub_records_failures_and_continues(dataset):
    manifest, tmp_path = dataset
    config = _config(manifest, tmp_path, "stub_models:raises_on_frame_001",
                     batch_size=1)
    report = export_run(config)
    # frame_001 appears once per tree cell plus once clean
    expected_failures = 1 + len(TYPES) * len(SEVS)
    assert len(report.failures) == expected_failures
    assert all("frame_001" in key for key, _ in report.failures)
    assert report.succeeded == report.attempted - expected_failures
    assert (tmp_path / "pred" / "clean" / "frame_000.png").is_file()
    assert not (tmp_path / "pred" / "clean" / "frame_001.png").exists()


def test_inverse_depth_conversion(dataset):
    manifest, tmp_path = dataset
    config = _config(manifest, tmp_path, "stub_models:inverse_of_gt",
                     conversion="inverse_depth")
    report = export_run(config)
    assert report.ok()
    gt = read_png16(tmp_path / "data" / "depth" / "frame_000.png")
    out = read_png16(tmp_path / "pred" / "clean" / "frame_000.png")
    np.testing.assert_allclose(out, gt, atol=1 / 256)


def test_png16_overflow_recorded_not_fatal(dataset):
    manifest, tmp_path = dataset
    config = _config(manifest, tmp_path, "stub_models:out_of_png16_range")
    report = export_run(config)
    assert report.attempted == len(report.failures)
    assert all("png16 range" in reason for _, reason in report.failures)


def test_pfm_format_handles_any_range(dataset):
    manifest, tmp_path = dataset
    config = _config(manifest, tmp_path, "stub_models:out_of_png16_range",
                     fmt="pfm")
    report = export_run(config)
    assert report.ok()
    from depth_export.formats import read_pfm
    out = read_pfm(tmp_path / "pred" / "clean" / "frame_000.pfm")
    np.testing.assert_array_equal(out, 300.0)


def test_command_template_mode(dataset, tmp_path):
    manifest, base = dataset
    script = tmp_path / "model_cmd.py"
    script.write_text(
        "import json, sys\n"
        "import numpy as np\n"
        "from PIL import Image\n"
        "batch = json.load(open(sys.argv[1]))\n"
        "for src, dst in zip(batch['inputs'], batch['outputs']):\n"
        "    h, w = np.array(Image.open(src)).shape[:2]\n"
        "    np.save(dst, np.full((h, w), 42.0, dtype=np.float32))\n")
    config = _config(manifest, base,
                     f"{sys.executable} {script} {{batch}}")
    report = export_run(config)
    assert report.ok(), report.failures
    out = read_png16(base / "pred" / "clean" / "frame_000.png")
    np.testing.assert_array_equal(out, 42.0)


def test_model_load_failure_is_export_error():
    with pytest.raises(ExportError, match="cannot load model"):
        load_model("no_such_module:fn")
    with pytest.raises(ExportError, match="cannot load model"):
        load_model("stub_models:no_such_function")


def test_missing_input_recorded(dataset):
    manifest, tmp_path = dataset
    corrupted = tmp_path / "corrupted"
    build_fake_corrupted_tree(corrupted, manifest, TYPES, SEVS)
    (corrupted / "smoke" / "1" / "frame_000.png").unlink()
    config = ExportConfig(manifest=manifest, output_root=tmp_path / "pred",
                          corrupted_root=corrupted,
                          model="stub_models:constant_25mm",
                          types=TYPES, severities=SEVS)
    report = export_run(config)
    assert len(report.failures) == 1
    assert report.failures[0][0] == "smoke/1/frame_000"
    assert report.attempted == report.succeeded + 1


def test_resolution_sidecar_written(dataset):
    manifest, tmp_path = dataset
    config = _config(manifest, tmp_path, "stub_models:constant_25mm")
    export_run(config)
    lines = (tmp_path / "pred" / "resolutions.jsonl").read_text().splitlines()
    records = [json.loads(line) for line in lines]
    assert len(records) == 2 + 2 * len(TYPES) * len(SEVS)
    assert all(r["width"] == 32 and r["height"] == 32 for r in records)


def test_inputs_are_read_only(dataset):
    manifest, tmp_path = dataset
    corrupted = tmp_path / "corrupted"
    build_fake_corrupted_tree(corrupted, manifest, TYPES, SEVS)
    before = {p: p.read_bytes() for p in corrupted.rglob("*.png")}
    config = ExportConfig(manifest=manifest, output_root=tmp_path / "pred",
                          corrupted_root=corrupted,
                          model="stub_models:constant_25mm",
                          types=TYPES, severities=SEVS)
    export_run(config)
    after = {p: p.read_bytes() for p in corrupted.rglob("*.png")}
    assert before == after


def test_config_validation():
    with pytest.raises(ExportError, match="format"):
        ExportConfig(manifest="m.json", output_root="o", model="x:y", fmt="exr")
    with pytest.raises(ExportError, match="conversion"):
        ExportConfig(manifest="m.json", output_root="o", model="x:y",
                     conversion="meters")
    with pytest.raises(ExportError, match="entry point"):
        ExportConfig(manifest="m.json", output_root="o", model="")
