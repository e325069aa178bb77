import json

import pytest

from whitehead.cli import main


def run_cli(capsys, *argv):
    main(list(argv))
    return capsys.readouterr().out


class TestWordCommands:
    def test_min(self, capsys):
        out = json.loads(run_cli(capsys, "min", "abb"))
        assert out["minimal_length"] < 3
        assert out["steps"] >= 1
        assert out["witness"]["source"] == "abb"

    def test_equiv_true(self, capsys):
        out = json.loads(run_cli(capsys, "equiv", "a", "b"))
        assert out["equivalent"] is True
        assert "witness" in out

    def test_equiv_false(self, capsys):
        out = json.loads(run_cli(capsys, "equiv", "abAB", "a"))
        assert out["equivalent"] is False

    def test_orbit(self, capsys):
        out = json.loads(run_cli(capsys, "orbit", "abAB"))
        assert out["minimal"] == "abAB"
        assert out["vertex_count"] == 2
        assert sorted(out["vertices"]) == ["aBAb", "abAB"]

    def test_stab(self, capsys):
        out = json.loads(run_cli(capsys, "stab", "a"))
        assert out["generator_count"] >= 1
        for g in out["generators"]:
            assert g["source"] == g["target"]

    def test_rank_guard(self, capsys):
        with pytest.raises(SystemExit):
            run_cli(capsys, "min", "abc", "--rank", "2")


class TestDetectAndSpectrum:
    def test_mle_detect_success(self, capsys):
        out = json.loads(run_cli(capsys, "mle-detect", "abAB",
                                 "--m", "4", "--lambda", "3/2", "--eps", "1/10"))
        assert out["mlew_minimal"] is True
        assert sorted(out["set"]) == ["aBAb", "abAB"]

    def test_mle_detect_failure(self, capsys):
        out = json.loads(run_cli(capsys, "mle-detect", "ababab",
                                 "--m", "2", "--lambda", "3/2", "--eps", "1/10"))
        assert out["mlew_minimal"] is False
        assert out["violated_condition"] in (1, 3, 4)

    def test_spectrum(self, capsys):
        out = json.loads(run_cli(capsys, "spectrum", "--preset", "uniform-cyclic",
                                 "--radius", "1", "--samples", "5", "--n", "100"))
        assert out["j_hat"] == 1.0
        assert out["m_hat"] >= 8


class TestCurrent:
    def test_uniform_jsonl(self, capsys):
        out = run_cli(capsys, "current", "uniform", "--depth", "2")
        lines = [json.loads(l) for l in out.strip().split("\n")]
        assert lines[0] == {"word": "a", "weight": "1/2"}
        assert len(lines) == 4 + 12

    def test_counting(self, capsys):
        out = run_cli(capsys, "current", "counting", "--word", "abAB", "--depth", "1")
        lines = [json.loads(l) for l in out.strip().split("\n")]
        assert all(l["weight"] == "2" for l in lines)

    def test_characteristic_preset(self, capsys):
        out = run_cli(capsys, "current", "characteristic", "--preset", "rose2",
                      "--depth", "1")
        lines = [json.loads(l) for l in out.strip().split("\n")]
        assert all(l["weight"] == "1/2" for l in lines)


class TestBench:
    def test_bench_run(self, capsys, tmp_path):
        cfg = {
            "experiment": "strict-minimality",
            "lengths": [20, 40],
            "trials": 4,
            "seed": 5,
            "sampler": {"kind": "uniform-cyclic", "rank": 2},
            "params": {},
            "out": str(tmp_path / "bench"),
            "schema": 1,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = json.loads(run_cli(capsys, "bench", "strict-minimality",
                                 "--config", str(cfg_path)))
        assert out["records"] == 8
        assert (tmp_path / "bench" / "strict-minimality_summary.csv").exists()
        assert (tmp_path / "bench" / "strict-minimality.png").exists()

    def test_bench_name_mismatch(self, capsys, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "experiment": "lambda0", "lengths": [10], "trials": 1, "seed": 0}))
        with pytest.raises(SystemExit):
            run_cli(capsys, "bench", "ex1-ratio", "--config", str(cfg_path))
