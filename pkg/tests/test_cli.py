import csv
import json

import numpy as np
import pytest

import sparse_hinf as sh
from sparse_hinf import fileio
from sparse_hinf.cli import main


@pytest.fixture()
def plant1_file(tmp_path, bundle1):
    path = tmp_path / "plant1.json"
    fileio.save_plant(bundle1.plant_ct, path)
    return str(path)


@pytest.fixture()
def plant1_d_file(tmp_path, plant1_d):
    path = tmp_path / "plant1_d.json"
    fileio.save_plant(plant1_d, path)
    return str(path)


class TestDiscretize:
    def test_prints_and_writes(self, plant1_file, tmp_path, capsys, bundle1):
        out = tmp_path / "disc.json"
        rc = main(["discretize", plant1_file, "--ts", "0.1", "-o", str(out)])
        assert rc == 0
        text = capsys.readouterr().out
        assert "0.8189" in text
        disc = fileio.load_plant(out)
        assert disc.ts == 0.1
        assert np.allclose(disc.A[0, 0], 0.81892, atol=1e-4)

    def test_already_discrete_errors(self, plant1_d_file):
        rc = main(["discretize", plant1_d_file, "--ts", "0.1"])
        assert rc == 1


class TestHinfNorm:
    def test_open_loop_and_closed_loop(self, plant1_d_file, tmp_path, capsys, bundle1):
        ctrl = bundle1.references[1].controller
        kpath = tmp_path / "k1.json"
        fileio.save_controller(ctrl, kpath)
        rc = main(["hinf-norm", plant1_d_file, "--controller", str(kpath),
                   "--output", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["hinf_norm"] == pytest.approx(1.9043, abs=5e-3)

    def test_lmi_method(self, tmp_path, capsys):
        plant = sh.GeneralizedPlant([[0.5]], [[1.0]], [[1.0]], [[1.0]], [[1.0]],
                                    [[0.0]], [[0.0]], [[0.0]], ts=1.0)
        path = tmp_path / "p.json"
        fileio.save_plant(plant, path)
        rc = main(["hinf-norm", str(path), "--method", "lmi", "--output", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["hinf_norm"] == pytest.approx(2.0, rel=1e-3)


class TestSynth:
    def test_synthesis_run_writes_controller_and_trace(self, plant1_d_file,
                                                       tmp_path, capsys):
        out = tmp_path / "ctrl.json"
        trace = tmp_path / "trace.csv"
        rc = main(["synth", plant1_d_file, "--mu", "24", "--order", "1",
                   "--pattern", "diag", "--k", "10,5,2",
                   "-o", str(out), "--trace", str(trace), "--output", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["closed_loop_norm_discrete"] ** 2 < 24.0
        saved = json.loads(out.read_text())
        assert saved["n_f"] == 1
        assert saved["certificate"]["mu"] == 24.0
        with open(trace) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iter", "stage", "status", "margin"]
        assert len(rows) > 2

    def test_infeasible_exit_code(self, tmp_path, plant1_d):
        # all-zero pattern on an unstable plant cannot be stabilized
        path = tmp_path / "p.json"
        fileio.save_plant(plant1_d, path)
        spath = tmp_path / "s.json"
        fileio.save_pattern(sh.SparsityPattern(np.zeros((2, 2))), spath)
        rc = main(["synth", str(path), "--mu", "100", "--pattern", str(spath)])
        assert rc == 2

    def test_io_error_exit_code(self, tmp_path):
        rc = main(["synth", str(tmp_path / "missing.json"), "--mu", "1"])
        assert rc == 1


class TestDiscover:
    def test_trace_row_count_matches_iterations(self, tmp_path, capsys):
        plant = sh.GeneralizedPlant([[0.3]], [[0.2]], [[1.0]], [[0.5]], [[1.0]],
                                    [[0.0]], [[0.4]], [[0.3]], ts=1.0)
        path = tmp_path / "p.json"
        fileio.save_plant(plant, path)
        trace = tmp_path / "t.csv"
        out = tmp_path / "s.json"
        rc = main(["discover", str(path), "--mu", "100", "--max-iter", "3",
                   "--no-early-stop", "-o", str(out), "--trace", str(trace),
                   "--output", "json"])
        assert rc == 0
        with open(trace) as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 3  # header + one row per pass
        assert fileio.load_pattern(out).S.shape == (1, 1)


class TestFitCt:
    def test_fit_controller_entries(self, tmp_path, capsys, bundle1):
        kpath = tmp_path / "k1.json"
        fileio.save_controller(bundle1.references[1].controller, kpath)
        rc = main(["fit-ct", str(kpath), "--poles", "1", "--output", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["entries"]) == 2  # diagonal entries only


class TestDemo:
    def test_replay_only_report(self, capsys):
        rc = main(["demo", "ex1", "--no-synth", "--output", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        rows = {r["controller"]: r for r in doc["replay"]}
        assert rows["static"]["replay_norm_continuous"] == pytest.approx(1.85, abs=0.01)
        assert rows["first-order"]["replay_norm_discrete"] == pytest.approx(1.9043, abs=0.005)
        assert doc["discretized_A_max_rel_err"] < 5e-4
