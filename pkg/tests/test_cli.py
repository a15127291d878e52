import json
import math

import pytest

from hyperwidth import cli
from hyperwidth.cli import UsageError, load_config_file, main, make_config, parse_surface

F8_HALF = 3.634732625668904503381877


def run_dir(root, command):
    (d,) = [p for p in root.iterdir() if p.name.startswith(command + "-")]
    return d


def record(root, command):
    return json.loads((run_dir(root, command) / "record.json").read_text())


class TestConfig:
    def test_parse_surface(self):
        assert parse_surface("bolza") == {"kind": "bolza"}
        assert parse_surface("s_ma:m=3,a=0.7") == {"kind": "s_ma", "m": 3, "a": 0.7}
        assert parse_surface("s_L:L=1e-1") == {"kind": "s_L", "L": 0.1}
        with pytest.raises(UsageError):
            parse_surface("s_ma:m")

    def test_defaults_and_override(self):
        cfg = make_config("sweepout", {"epsilon": 0.2, "resolution": 0.1}, {"resolution": 0.02, "seed": None})
        assert cfg.epsilon == 0.2 and cfg.resolution == 0.02 and cfg.seed == 0

    @pytest.mark.parametrize("values", [
        {"epsilon": 50.0}, {"bogus": 1}, {"cuffs": [1, 2]}, {"surface": "torus"},
        {"surface": {"kind": "s_ma", "m": 2}}, {"max_word_len": 0}, {"length": -1.0},
    ])
    def test_rejected(self, values):
        with pytest.raises(UsageError):
            make_config("width", values)

    def test_hash_ignores_output(self):
        a = make_config("width", {"output": "/a"})
        b = make_config("width", {"output": "/b"})
        assert a.config_hash == b.config_hash
        assert make_config("width", {"seed": 1}).config_hash != a.config_hash

    def test_toml_error_position(self, tmp_path):
        p = tmp_path / "bad.toml"
        p.write_text('surface = "bolza"\nepsilon = = 1\n')
        with pytest.raises(UsageError, match="line 2"):
            load_config_file(p)

    def test_json_error_position(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"epsilon": 0.1,\n "tol": }')
        with pytest.raises(UsageError, match=":2:"):
            load_config_file(p)


class TestCommands:
    def test_width(self, tmp_path, capsys):
        assert main(["width", "--surface", "s_ma:m=2,a=0.5", "--output", str(tmp_path)]) == 0
        rec = record(tmp_path, "width")
        assert rec["exact"] and rec["value"] == pytest.approx(F8_HALF, rel=1e-14)
        assert rec["config_hash"].startswith(run_dir(tmp_path, "width").name.split("-")[1])
        meta = json.loads((run_dir(tmp_path, "width") / "metadata.json").read_text())
        assert meta["exit_status"] == 0 and meta["wall_clock_s"] >= 0
        assert str(tmp_path) in capsys.readouterr().out

    def test_deterministic_record(self, tmp_path):
        args = ["width", "--surface", "s_L:L=0.5", "--output", str(tmp_path)]
        assert main(args) == 0
        first = (run_dir(tmp_path, "width") / "record.json").read_bytes()
        assert main(args) == 0
        assert (run_dir(tmp_path, "width") / "record.json").read_bytes() == first

    def test_env_output(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HYPERWIDTH_OUTPUT", str(tmp_path))
        assert main(["heteroclinic"]) == 0
        rec = record(tmp_path, "heteroclinic")
        assert rec["h0"] == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-12)
        assert (run_dir(tmp_path, "heteroclinic") / "profile.csv").read_text().startswith("# config_hash=")

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text('[surface]\nkind = "s_ma"\nm = 3\na = 0.25\n')
        assert main(["width", "--config", str(cfg), "--output", str(tmp_path)]) == 0
        assert record(tmp_path, "width")["config"]["surface"] == {"kind": "s_ma", "m": 3, "a": 0.25}

    def test_uncertified_exit(self, tmp_path):
        assert main(["width", "--surface", "s_ma:m=2,a=6.0", "--output", str(tmp_path)]) == cli.EXIT_CERTIFICATE
        assert record(tmp_path, "width")["status"] == "uncertified"

    def test_usage_exit(self, tmp_path, capsys):
        assert main(["ac-minmax", "--epsilon", "50", "--output", str(tmp_path)]) == cli.EXIT_USAGE
        assert "epsilon" in capsys.readouterr().err
        assert main(["width", "--config", str(tmp_path / "missing.toml")]) == cli.EXIT_USAGE
        with pytest.raises(SystemExit) as exc:
            main(["no-such-command"])
        assert exc.value.code == 2

    def test_index_geodesic(self, tmp_path):
        assert main(["index", "--length", str(2 * math.pi), "--curvature", "1", "--output", str(tmp_path)]) == 0
        geo = record(tmp_path, "index")["geodesic"]
        assert geo["index"] == 1 and geo["nullity"] == 2

    def test_index_numerical_exit(self, tmp_path):
        args = ["index", "--length", "50", "--grid", "8", "--output", str(tmp_path)]
        assert main(args) == cli.EXIT_NUMERICAL

    def test_index_needs_input(self, tmp_path):
        assert main(["index", "--output", str(tmp_path)]) == cli.EXIT_USAGE

    def test_spectrum(self, tmp_path):
        assert main(["spectrum", "--surface", "bolza", "--cutoff", "5", "--output", str(tmp_path)]) == 0
        lines = (run_dir(tmp_path, "spectrum") / "spectrum.csv").read_text().splitlines()
        assert lines[1] == "length,multiplicity,separating,simple,word"
        assert float(lines[2].split(",")[0]) == pytest.approx(2 * math.acosh(1 + math.sqrt(2)), abs=1e-9)

    def test_sweepout(self, tmp_path):
        assert main(["sweepout", "--surface", "s_L:L=0.5", "--output", str(tmp_path)]) == 0
        rec = record(tmp_path, "sweepout")
        assert all(rec["checks"].values())
        assert rec["composite"]["max_mass"] == pytest.approx(F8_HALF + 0.5, rel=0.01)
        d = run_dir(tmp_path, "sweepout")
        assert (d / "curves.txt").read_text().startswith("# sample 0")
        assert (d / "composite.csv").exists()

    def test_ac_minmax_and_index(self, tmp_path):
        args = ["ac-minmax", "--mesh-vertices", "4000", "--epsilon", "0.15", "--path-resolution", "17",
                "--output", str(tmp_path)]
        assert main(args) == 0
        rec = record(tmp_path, "ac-minmax")
        assert [b["kind"] for b in rec["interface"]["bands"]] == ["figure-eight"]
        assert rec["newton_residual"] < 1e-8
        field = run_dir(tmp_path, "ac-minmax") / "field.txt"
        assert main(["index", "--field-path", str(field), "--n-eigs", "4", "--output", str(tmp_path)]) == 0
        ac = record(tmp_path, "index")["allen_cahn"]
        assert ac["index"] == 1 and ac["nullity"] == 0


@pytest.mark.slow
def test_reproduce_paper_perturbed(tmp_path, capsys):
    status = main(["reproduce-paper", "--output", str(tmp_path), "--perturb", "equator index=1"])
    out = capsys.readouterr().out
    assert status == cli.EXIT_CERTIFICATE
    lines = [ln for ln in out.splitlines() if ln.startswith(("PASS", "FAIL"))]
    failed = [ln for ln in lines if ln.startswith("FAIL")]
    assert len(failed) == 1 and "equator index" in failed[0]
    assert len(lines) >= 14
    table = (tmp_path / "reproduce-desk" / "golden.csv").read_text().splitlines()
    assert table[1].startswith("name,value,expected")
    assert len(table) == len(lines) + 2


def test_perturb_malformed(capsys):
    assert main(["reproduce-paper", "--perturb", "no-equals-sign"]) == cli.EXIT_USAGE
