import json
from pathlib import Path

import numpy as np
import pytest

import tasteleak as tl
from tasteleak import report
from tasteleak.cli import main
from tasteleak.data import __file__ as _data_init

POPULATION = Path(_data_init).with_name("population.json")
SMALL = ["--sigma", "0.5,1", "--delta", "1"]


def _config(tmp_path, **doc):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_negative_sigma_is_config_error(tmp_path, capsys):
    assert main(["-c", _config(tmp_path, sigmas=[-1]), "-o", str(tmp_path / "o")]) == 1
    assert "sigma must be positive" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_bad_row_sum_is_config_error(tmp_path, capsys):
    doc = json.loads(POPULATION.read_text())
    row = doc["frequencies"]["African"]["TAS2R38"]
    s = sum(row)
    doc["frequencies"]["African"]["TAS2R38"] = [0.9 * x / s for x in row]
    (tmp_path / "pop.json").write_text(json.dumps(doc))
    cfg = _config(tmp_path, population="pop.json", sigmas=[0, 1])
    assert main(["-c", cfg, "--validate"]) == 1
    err = capsys.readouterr().err
    assert "row sum out of tolerance" in err
    assert "sigma must be positive" in err


def test_validate_ok(tmp_path):
    assert main(["--validate"]) == 0


def test_unreadable_config(tmp_path, capsys):
    assert main(["-c", str(tmp_path / "missing.json")]) == 1
    (tmp_path / "broken.json").write_text("{not json")
    assert main(["-c", str(tmp_path / "broken.json")]) == 1
    assert main(["-c", _config(tmp_path, colour="blue")]) == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_output_path_is_a_file(tmp_path, capsys):
    target = tmp_path / "taken"
    target.write_text("x")
    assert main(["-o", str(target), *SMALL]) == 3
    assert "I/O error" in capsys.readouterr().err


def test_invariant_violation_exit_code(tmp_path, monkeypatch):
    real = report.exact_joint

    def broken(*args, **kwargs):
        j = real(*args, **kwargs)
        return tl.JointDistribution(j.outputs, j.table * 1.1, j.provenance)

    monkeypatch.setattr(report, "exact_joint", broken)
    assert main(["-o", str(tmp_path / "o"), *SMALL]) == 2


def test_failed_crosscheck_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(report, "CROSSCHECK_SE_LIMIT", -1.0)
    assert main(["-o", str(tmp_path / "o"), "--samples", "10", "--programs", "phenotype_r16", "--crosscheck"]) == 2
    assert "cross-check" in capsys.readouterr().err


def test_repeat_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["-o", str(a), *SMALL]) == 0
    assert main(["-o", str(b), *SMALL]) == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    manifest = json.loads((a / "manifest.json").read_text())
    assert {e["file"] for e in manifest["artifacts"]} == set(files) - {"manifest.json"}


def test_outputs_and_scores(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["-o", str(out), *SMALL]) == 0
    stdout = capsys.readouterr().out
    assert "delta=1: recommended noisy_score sigma=0.5" in stdout
    scores = json.loads((out / "scores.json").read_text())["programs"]
    v = {p: scores[p]["bayes_vulnerability"] for p in (tl.PHENOTYPE_R38, tl.PHENOTYPE_R16, tl.LINEAR_SCORE)}
    assert v[tl.PHENOTYPE_R16] < v[tl.PHENOTYPE_R38] < v[tl.LINEAR_SCORE]
    assert scores[tl.NOISY_SCORE]["0.5"]["bayes_vulnerability"] > scores[tl.NOISY_SCORE]["1"]["bayes_vulnerability"]
    for name in ("prior_TAS2R38.csv", "joint_linear_score.csv", "output_privacy_noisy_score_sigma0.5.csv",
                 "utility_error_bounds.csv", "utility_summary.json", "tradeoff.csv"):
        assert (out / name).is_file(), name
    rows = (out / "joint_noisy_score_sigma0.5.csv").read_text().splitlines()
    cells = np.array([[float(x) for x in r.split(",")[1:]] for r in rows[1:]])
    assert cells.sum() == pytest.approx(1.0, abs=1e-3)


def test_empty_sigma_and_delta_lists(tmp_path):
    out = tmp_path / "o"
    assert main(["-o", str(out), "--sigma", "", "--delta", ""]) == 0
    names = {p.name for p in out.iterdir()}
    assert not any(n.startswith("utility_") for n in names)
    assert "tradeoff.csv" not in names
    assert not any("noisy" in n for n in names)


def test_only_linear_frontier_without_noise(tmp_path):
    out = tmp_path / "o"
    assert main(["-o", str(out), "--sigma", "", "--delta", "1"]) == 0
    rows = json.loads((out / "tradeoff.json").read_text())
    assert [(r["program"], r["recommended"]) for r in rows] == [(tl.LINEAR_SCORE, True)]


def test_crosscheck_small_sample(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["-o", str(out), "--samples", "10", "--crosscheck", *SMALL]) == 0
    doc = json.loads((out / "crosscheck.json").read_text())
    assert doc["passed"] and doc["samples"] == 10
    assert set(doc["variants"]) == {"phenotype_r38", "phenotype_r16", "linear_score",
                                    "noisy_score_sigma0.5", "noisy_score_sigma1"}


def test_relative_paths_resolve_against_config(tmp_path):
    sub = tmp_path / "cfg"
    sub.mkdir()
    (sub / "pop.json").write_text(POPULATION.read_text())
    cfg = report.AnalysisConfig.from_file(_config(sub, population="pop.json", output_dir="res"))
    assert cfg.population == str(sub / "pop.json")
    assert cfg.output_dir == str(sub / "res")
