import json

import pytest

import lodforge


def test_box_pipeline(tmp_path):
    truth = lodforge.synth("box", tmp_path / "box.obj")
    assert truth["volume"] == 1.0
    assert truth["levels"] == 0

    summary = lodforge.run_pipeline(tmp_path / "box.obj", tmp_path / "out", rmse_samples=1000)
    assert summary["P"] == 6
    assert summary["levels"] == 0
    assert summary["anchors"] == 1
    for key in ("T1", "T2", "T3"):
        assert key in summary

    manifest = lodforge.load_manifest(tmp_path / "out" / "manifest.json")
    assert manifest["version"] == 1
    assert manifest["levels"] == 0
    steps = [m["steps"] for m in manifest["models"]]
    assert steps == list(range(len(steps)))
    final = manifest["models"][-1]
    assert final["tag"] == "anchor"
    assert final["faces"] == 6
    assert final["s"] is None

    report = lodforge.check_obj(tmp_path / "out" / final["file"])
    assert report["closed_manifold"]
    assert report["volume"] == pytest.approx(1.0, rel=1e-4)


def test_house_levels(tmp_path):
    lodforge.synth("full_house", tmp_path / "house.obj")
    summary = lodforge.run_pipeline(tmp_path / "house.obj", tmp_path / "out")
    assert summary["addons"] == 1
    assert summary["cutouts"] == 4
    assert summary["levels"] == 2
    raw = json.loads((tmp_path / "out" / "manifest.json").read_text())
    anchors = [m for m in raw["models"] if m["tag"] == "anchor"]
    assert [m["level"] for m in anchors] == [0, 1, 2]
    for m in raw["models"]:
        assert lodforge.check_obj(tmp_path / "out" / m["file"])["closed_manifold"]


def test_mean_shift():
    assignment, modes = lodforge.mean_shift_1d([1.0, 1.2, 9.0, 9.5], 2.0)
    assert assignment == [0, 0, 1, 1]
    assert modes[0] == pytest.approx(1.1)
    assert modes[1] == pytest.approx(9.25)


def test_rmse_identity(tmp_path):
    lodforge.synth("box", tmp_path / "a.obj")
    assert lodforge.rmse(tmp_path / "a.obj", tmp_path / "a.obj", samples=2000) == pytest.approx(0.0, abs=1e-9)


def test_errors(tmp_path):
    with pytest.raises(lodforge.LodforgeError):
        lodforge.synth("castle", tmp_path / "x.obj")
    with pytest.raises(lodforge.LodforgeError):
        lodforge.run_pipeline(tmp_path / "missing.obj", tmp_path / "out")
    with pytest.raises(lodforge.LodforgeError):
        lodforge.run_pipeline(tmp_path / "missing.obj", tmp_path / "out", interp_pct=1.5)
