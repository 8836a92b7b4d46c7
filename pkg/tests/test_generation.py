"""Corrupted-tree generation: layout, reproducibility, resume, verification."""

import pytest

from endobench import DETERMINISTIC_TYPES
from endobench.errors import BenchmarkError, InvalidSpecError
from endobench.generation import (CorruptionRun, OutputIndex,
                                  generate_corrupted_tree, verify_index)

from synthetic import build_dataset

TYPES = ("brightness", "gaussian_noise")
SEVS = (1, 3)


@pytest.fixture()
def dataset(tmp_path, params):
    manifest = build_dataset(tmp_path / "data", n_frames=3, size=32)
    return manifest, tmp_path, params


def _run(out, seed=0, types=TYPES, severities=SEVS, workers=None):
    return CorruptionRun(global_seed=seed, output_root=out, types=types,
                         severities=severities, workers=workers)


def test_tree_layout_and_cardinality(dataset):
    manifest, tmp_path, params = dataset
    out = tmp_path / "out"
    index = generate_corrupted_tree(manifest, _run(out), params)
    assert len(index) == 3 * len(TYPES) * len(SEVS)
    for ctype in TYPES:
        for sev in SEVS:
            for fid in manifest.frame_ids():
                assert (out / ctype / str(sev) / f"{fid}.png").is_file()
    assert (out / "index.jsonl").is_file()


def test_rerun_reproduces_hashes(dataset):
    manifest, tmp_path, params = dataset
    a = generate_corrupted_tree(manifest, _run(tmp_path / "a"), params)
    b = generate_corrupted_tree(manifest, _run(tmp_path / "b"), params)
    hashes_a = {k: e.pixel_sha256 for k, e in a.entries.items()}
    hashes_b = {k: e.pixel_sha256 for k, e in b.entries.items()}
    assert hashes_a == hashes_b


def test_worker_count_does_not_change_hashes(dataset):
    manifest, tmp_path, params = dataset
    a = generate_corrupted_tree(manifest, _run(tmp_path / "a", workers=1), params)
    b = generate_corrupted_tree(manifest, _run(tmp_path / "b", workers=8), params)
    assert {k: e.pixel_sha256 for k, e in a.entries.items()} == \
           {k: e.pixel_sha256 for k, e in b.entries.items()}


def test_seed_shift_changes_only_stochastic_types(dataset):
    manifest, tmp_path, params = dataset
    types = ("brightness", "pixelate", "gaussian_noise", "smoke")
    a = generate_corrupted_tree(manifest, _run(tmp_path / "a", seed=5,
                                               types=types), params)
    b = generate_corrupted_tree(manifest, _run(tmp_path / "b", seed=6,
                                               types=types), params)
    for key in a.entries:
        _, ctype, _ = key
        same = a.entries[key].pixel_sha256 == b.entries[key].pixel_sha256
        assert same == (ctype in DETERMINISTIC_TYPES), key


def test_resume_skips_existing(dataset):
    manifest, tmp_path, params = dataset
    out = tmp_path / "out"
    first = generate_corrupted_tree(manifest, _run(out), params)
    victim = out / first.entries[("frame_001", "brightness", 3)].path
    victim.unlink()
    second = generate_corrupted_tree(manifest, _run(out), params)
    assert victim.is_file()
    assert {k: e.pixel_sha256 for k, e in first.entries.items()} == \
           {k: e.pixel_sha256 for k, e in second.entries.items()}


def test_output_root_must_differ_from_manifest_root(dataset):
    manifest, tmp_path, params = dataset
    with pytest.raises(BenchmarkError, match="differ"):
        generate_corrupted_tree(manifest, _run(manifest.root), params)


def test_severity_zero_rejected_in_run(tmp_path):
    with pytest.raises(InvalidSpecError, match="1..5"):
        CorruptionRun(global_seed=0, output_root=tmp_path, severities=(0, 1))


def test_unknown_type_rejected_in_run(tmp_path):
    with pytest.raises(InvalidSpecError, match="unknown"):
        CorruptionRun(global_seed=0, output_root=tmp_path, types=("sparkle",))


def test_index_journal_round_trip(dataset):
    manifest, tmp_path, params = dataset
    out = tmp_path / "out"
    index = generate_corrupted_tree(manifest, _run(out), params)
    loaded = OutputIndex.load(out / "index.jsonl")
    assert loaded.entries == index.entries


class TestVerifyIndex:
    def test_untouched_tree(self, dataset):
        manifest, tmp_path, params = dataset
        out = tmp_path / "out"
        index = generate_corrupted_tree(manifest, _run(out), params)
        report = verify_index(index, out)
        assert report.ok
        assert len(report.matched) == len(index)

    def test_one_corrupted_file(self, dataset):
        manifest, tmp_path, params = dataset
        out = tmp_path / "out"
        index = generate_corrupted_tree(manifest, _run(out), params)
        key = ("frame_000", "gaussian_noise", 1)
        from endobench.image_io import load_rgb, save_rgb
        img = load_rgb(out / index.entries[key].path)
        img[0, 0, 0] ^= 0xFF
        save_rgb(out / index.entries[key].path, img)
        report = verify_index(index, out)
        assert report.mismatched == [key]
        assert not report.missing

    def test_one_truncated_file(self, dataset):
        manifest, tmp_path, params = dataset
        out = tmp_path / "out"
        index = generate_corrupted_tree(manifest, _run(out), params)
        key = ("frame_001", "brightness", 3)
        target = out / index.entries[key].path
        target.write_bytes(target.read_bytes()[:40])
        report = verify_index(index, out)
        assert report.mismatched == [key]
        assert not report.missing

    def test_one_deleted_file(self, dataset):
        manifest, tmp_path, params = dataset
        out = tmp_path / "out"
        index = generate_corrupted_tree(manifest, _run(out), params)
        key = ("frame_002", "brightness", 1)
        (out / index.entries[key].path).unlink()
        report = verify_index(index, out)
        assert report.missing == [key]
        assert not report.mismatched


def test_debug_jpeg_emits_intermediate(dataset):
    manifest, tmp_path, params = dataset
    out = tmp_path / "out"
    run = CorruptionRun(global_seed=0, output_root=out,
                        types=("jpeg_compression",), severities=(2,),
                        debug_jpeg=True)
    generate_corrupted_tree(manifest, run, params)
    jpgs = list((out / "jpeg_compression" / "2").glob("*.jpg"))
    assert len(jpgs) == 3
