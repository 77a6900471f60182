import json

import pytest

from cglind.cli import main, parse_config, ConfigError

BASE_QFGR = """\
[scenario]
kind = qfgr
preset = two-sector-qubit

[schedule]
lambda = 0.5 0.25
xi = 1.0
t_ref = 1.2

[time]
mode = explicit
start = 0.0
stop = 6.0
count = 4

[run]
seed = 0

[output]
csv = out.csv
json = out.json
"""

INLINE_QFGR = """\
[scenario]
kind = qfgr
sector_dims = 1 1
h0 = 2 2
    0.3 0  0 0
    0 0  -0.5 0
hp = 2 2
    0.2 0  0.7 0
    0.7 0  -0.1 0

[schedule]
lambda = 0.5
xi = 1.0
t_ref = 1.2

[time]
mode = explicit
start = 0.0
stop = 4.0
count = 3

[output]
csv = inline.csv
json = inline.json
"""

GIBBS = """\
[scenario]
kind = heat_bath
preset = qubit-gibbs

[schedule]
lambda = 0.3 0.1
xi = 1.0
t_ref = 1.0

[time]
mode = explicit
start = 0.0
stop = 5.0
count = 3

[run]
seed = 0

[output]
csv = gibbs.csv
json = gibbs.json
"""


def write_config(tmp_path, text, name="cfg.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_csv_rows(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [dict(zip(header, map(float, line.split(","))))
                for line in fh if line.strip()]
    return header, rows


class TestValidate:
    def test_ok(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_QFGR)
        assert main(["validate", cfg]) == 0
        assert "ok" in capsys.readouterr().out

    def test_zero_lambda_exit_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_QFGR.replace(
            "lambda = 0.5 0.25", "lambda = 0.0"))
        assert main(["validate", cfg]) == 2
        err = capsys.readouterr().err
        assert "nonzero" in err

    def test_missing_t_ref_named(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_QFGR.replace("t_ref = 1.2\n", ""))
        assert main(["validate", cfg]) == 2
        assert "t_ref" in capsys.readouterr().err

    def test_xi_out_of_range_cites_bound(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_QFGR.replace("xi = 1.0", "xi = 2.5"))
        assert main(["validate", cfg]) == 2
        assert "0 < xi < 2" in capsys.readouterr().err

    def test_unknown_preset(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_QFGR.replace(
            "preset = two-sector-qubit", "preset = nope"))
        assert main(["validate", cfg]) == 2
        assert "preset" in capsys.readouterr().err

    def test_parse_config_collects_issues(self, tmp_path):
        cfg = write_config(tmp_path, BASE_QFGR
                           .replace("xi = 1.0", "xi = 2.5")
                           .replace("lambda = 0.5 0.25", "lambda = 0.0"))
        with pytest.raises(ConfigError) as err:
            parse_config(cfg)
        fields = [f for f, _ in err.value.issues]
        assert "[schedule].xi" in fields
        assert "[schedule].lambda" in fields


class TestRun:
    def test_qfgr_preset(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_QFGR)
        out = tmp_path / "out"
        assert main(["--out-dir", str(out), "run", cfg]) == 0
        header, rows = read_csv_rows(out / "out.csv")
        assert header == ["lambda", "t", "error_norm", "trace_dev",
                          "min_choi_eig", "min_state_eig"]
        assert len(rows) == 8  # two couplings x four times
        assert all(r["trace_dev"] < 1e-9 for r in rows)
        assert all(r["min_state_eig"] > -1e-9 for r in rows)
        payload = json.loads((out / "out.json").read_text())
        assert payload["passed"] is True
        assert [r["lambda"] for r in payload["results"]] == [0.5, 0.25]

    def test_inline_matrices(self, tmp_path):
        cfg = write_config(tmp_path, INLINE_QFGR)
        out = tmp_path / "out"
        assert main(["--out-dir", str(out), "run", cfg]) == 0
        _, rows = read_csv_rows(out / "inline.csv")
        assert len(rows) == 3

    def test_gibbs_preset_summary(self, tmp_path):
        cfg = write_config(tmp_path, GIBBS)
        out = tmp_path / "out"
        assert main(["--out-dir", str(out), "run", cfg]) == 0
        payload = json.loads((out / "gibbs.json").read_text())
        dists = [g["distance"] for g in payload["gibbs_distances"]]
        assert len(dists) == 2
        assert dists[1] < dists[0]
        assert payload["results"][0]["extras"]["dual_path_residual"] < 1e-7

    def test_deterministic_csv(self, tmp_path):
        cfg = write_config(tmp_path, BASE_QFGR)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["--out-dir", str(out1), "run", cfg]) == 0
        assert main(["--out-dir", str(out2), "run", cfg]) == 0
        assert (out1 / "out.csv").read_bytes() == (out2 / "out.csv").read_bytes()

    def test_threaded_run_matches_serial(self, tmp_path):
        cfg = write_config(tmp_path, BASE_QFGR)
        out1, out2 = tmp_path / "serial", tmp_path / "threaded"
        assert main(["--out-dir", str(out1), "run", cfg]) == 0
        assert main(["--out-dir", str(out2), "--threads", "2", "run", cfg]) == 0
        assert (out1 / "out.csv").read_bytes() == (out2 / "out.csv").read_bytes()

    def test_out_dir_env_var(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path, BASE_QFGR)
        target = tmp_path / "envout"
        monkeypatch.setenv("CGLIND_OUT_DIR", str(target))
        assert main(["run", cfg]) == 0
        assert (target / "out.csv").exists()


class TestPresets:
    def test_list(self, capsys):
        assert main(["presets", "list"]) == 0
        out = capsys.readouterr().out
        for name in ("two-sector-qubit", "qubit-gibbs", "quasi-continuum",
                     "heat-bath-qutrit", "qfgr-two-blocks"):
            assert name in out
