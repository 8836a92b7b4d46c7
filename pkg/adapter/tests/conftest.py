"""Shared pytest fixtures for the adapter suite."""

import pytest

from dataset_stub import build_dataset


@pytest.fixture()
def dataset(tmp_path, monkeypatch):
    manifest = build_dataset(tmp_path / "data", n_frames=2, size=32)
    monkeypatch.setenv("STUB_GT_DIR", str(tmp_path / "data" / "depth"))
    return manifest, tmp_path
