import json

import numpy as np
import pytest
from click.testing import CliRunner
from PIL import Image

from hierpix import imgio
from hierpix.cli import main
from hierpix.hierarchy import MergeSequence
from hierpix.partition import grid_partition

from conftest import voronoi_label_map


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def scene_files(tmp_path, rng):
    h, w = 18, 24
    img = rng.integers(0, 256, (h, w, 3), dtype=np.uint8)
    image_path = tmp_path / "image.png"
    Image.fromarray(img).save(image_path)
    objects = voronoi_label_map(rng, h, w, 3)
    objects_path = tmp_path / "objects.png"
    imgio.save_label_map(objects, objects_path)
    fine = grid_partition(w, h, 30)
    fine_path = tmp_path / "fine.png"
    imgio.save_label_map(fine, fine_path)
    return {
        "dir": tmp_path,
        "image": image_path,
        "objects": objects_path,
        "fine": fine_path,
    }


class TestBuild:
    def test_build_with_grid_init(self, runner, scene_files):
        out = scene_files["dir"] / "seq.json"
        result = runner.invoke(
            main,
            ["build", str(scene_files["image"]), "--init-grid", "30",
             "--objects", str(scene_files["objects"]), "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        seq = MergeSequence.load(out)
        assert seq.n_f == 30
        assert len(seq.records) == 29
        assert "phase1=" in result.output and "time=" in result.output

    def test_build_zero_wpos_allowed(self, runner, scene_files):
        out = scene_files["dir"] / "seq0.json"
        result = runner.invoke(
            main,
            ["build", str(scene_files["image"]), "--init-grid", "12",
             "--wpos", "0", "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert MergeSequence.load(out).params.w_pos == 0.0

    def test_build_reruns_byte_identical(self, runner, scene_files):
        args = ["build", str(scene_files["image"]), "--fine", str(scene_files["fine"]),
                "--objects", str(scene_files["objects"])]
        out1 = scene_files["dir"] / "a.json"
        out2 = scene_files["dir"] / "b.json"
        assert runner.invoke(main, args + ["-o", str(out1)]).exit_code == 0
        assert runner.invoke(main, args + ["-o", str(out2)]).exit_code == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_mismatched_fine_map_fails_without_output(self, runner, scene_files, tmp_path):
        bad_fine = tmp_path / "bad_fine.png"
        imgio.save_label_map(grid_partition(10, 10, 5), bad_fine)
        out = tmp_path / "never.json"
        result = runner.invoke(
            main,
            ["build", str(scene_files["image"]), "--fine", str(bad_fine),
             "-o", str(out)],
        )
        assert result.exit_code != 0
        assert not out.exists()

    def test_missing_fine_and_grid_fails(self, runner, scene_files, tmp_path):
        result = runner.invoke(
            main, ["build", str(scene_files["image"]), "-o", str(tmp_path / "x.json")]
        )
        assert result.exit_code != 0

    def test_benchmark_scale_grid_init(self, runner, tmp_path, rng):
        # reference working size: 1250 starting regions on a 481x321 image
        img = rng.integers(0, 256, (321, 481, 3), dtype=np.uint8)
        image_path = tmp_path / "big.png"
        Image.fromarray(img).save(image_path)
        out = tmp_path / "seq.json"
        result = runner.invoke(
            main,
            ["build", str(image_path), "--init-grid", "1250", "--wpos", "5",
             "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        seq = MergeSequence.load(out)
        assert seq.n_f == 1250
        assert len(seq.records) == 1249


class TestExtract:
    @pytest.fixture
    def built(self, runner, scene_files):
        out = scene_files["dir"] / "seq.json"
        result = runner.invoke(
            main,
            ["build", str(scene_files["image"]), "--fine", str(scene_files["fine"]),
             "--objects", str(scene_files["objects"]), "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        return out

    def test_one_png_per_k(self, runner, scene_files, built):
        outdir = scene_files["dir"] / "parts"
        result = runner.invoke(
            main,
            ["extract", str(built), str(scene_files["fine"]),
             "--k", "30,10,3", "-o", str(outdir)],
        )
        assert result.exit_code == 0, result.output
        for k in (30, 10, 3):
            labels = imgio.load_label_map(outdir / f"fine_k{k}.png")
            assert np.unique(labels).tolist() == list(range(k))

    def test_k_one_collapses(self, runner, scene_files, built):
        outdir = scene_files["dir"] / "one"
        result = runner.invoke(
            main,
            ["extract", str(built), str(scene_files["fine"]), "--k", "1",
             "-o", str(outdir)],
        )
        assert result.exit_code == 0
        assert (imgio.load_label_map(outdir / "fine_k1.png") == 0).all()

    def test_k_zero_rejected(self, runner, scene_files, built):
        result = runner.invoke(
            main,
            ["extract", str(built), str(scene_files["fine"]), "--k", "0",
             "-o", str(scene_files["dir"] / "zero")],
        )
        assert result.exit_code != 0


class TestEval:
    def test_partition_equal_to_gt_scores_one(self, runner, scene_files, tmp_path):
        gt = scene_files["objects"]
        json_out = tmp_path / "report.json"
        csv_out = tmp_path / "report.csv"
        result = runner.invoke(
            main,
            ["eval", str(gt), "--gt", str(gt), "--json", str(json_out),
             "--csv", str(csv_out)],
        )
        assert result.exit_code == 0, result.output
        reports = json.loads(json_out.read_text())
        assert reports[0]["asa"] == 1.0
        assert reports[0]["br"] == 1.0
        header, row = csv_out.read_text().strip().splitlines()
        assert header == "image,k,asa,br,cd,src"
        assert row.startswith("objects.png,3,1.0,1.0")

    def test_nestedness_between_levels(self, runner, scene_files, tmp_path):
        seq_path = scene_files["dir"] / "seq.json"
        runner.invoke(
            main,
            ["build", str(scene_files["image"]), "--fine", str(scene_files["fine"]),
             "--objects", str(scene_files["objects"]), "-o", str(seq_path)],
        )
        outdir = scene_files["dir"] / "levels"
        runner.invoke(
            main,
            ["extract", str(seq_path), str(scene_files["fine"]), "--k", "20,5",
             "-o", str(outdir)],
        )
        result = runner.invoke(
            main,
            ["eval", str(outdir / "fine_k20.png"), "--gt", str(scene_files["objects"]),
             "--coarse", str(outdir / "fine_k5.png")],
        )
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)[0]
        assert report["nestedness"] == 1.0

    def test_missing_gt_fails(self, runner, scene_files, tmp_path):
        result = runner.invoke(
            main,
            ["eval", str(scene_files["objects"]), "--gt", str(tmp_path / "nope.png")],
        )
        assert result.exit_code != 0
