import csv
import json

import pytest

import purf.experiments
from purf.cli import ConfigError, main, read_config_file, resolve
from purf.theory import BoundSet


def _write(path, text):
    path.write_text(text)
    return str(path)


def _csv_rows(path):
    lines = [l for l in open(path) if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_m12_run_writes_csv(tmp_path, capsys):
    cfg = _write(tmp_path / "m12.cfg", "seed = 5\nk = 3, 10  # two sizes\nreplicates = 2000\n")
    out = tmp_path / "m12.csv"
    assert main(["m12", "--config", cfg, "--out", str(out)]) == 0
    text = out.read_text()
    assert "# seed = 5" in text and "# k = 3,10" in text
    rows = _csv_rows(out)
    assert [r["k"] for r in rows] == ["3", "10"]
    assert all(abs(float(r["z"])) < 5 for r in rows)
    assert "wrote 2 rows" in capsys.readouterr().out


def test_cli_overrides_file_values(tmp_path):
    cfg = _write(tmp_path / "c.cfg", "seed = 5\nk = 3\nreplicates = 100\n")
    out = tmp_path / "o.csv"
    assert main(["m12", "--config", cfg, "--k", "4", "--seed", "6", "--out", str(out)]) == 0
    assert "# seed = 6" in out.read_text()
    assert _csv_rows(out)[0]["k"] == "4"


@pytest.mark.parametrize(
    "body, needle",
    [
        ("k = 5\n", "seed"),
        ("seed = 1\ncolour = red\n", "colour"),
        ("seed = 1\nn = ten\n", "n:"),
        ("seed = 1\nmodel = quadratic\n", "model"),
        ("seed = 1\nk = 0\n", "k:"),
        ("seed = 1\nsigma = -1\n", "sigma"),
    ],
)
def test_bad_config_exits_1(tmp_path, capsys, body, needle):
    cfg = _write(tmp_path / "bad.cfg", body)
    assert main(["tree-decomposition", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 1
    assert needle in capsys.readouterr().err


def test_unknown_experiment_lists_names(capsys):
    assert main(["forest-party", "--seed", "1"]) == 1
    err = capsys.readouterr().err
    assert "m12" in err and "rate" in err


def test_bad_flag_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["m12", "--seed", "1", "--bogus", "3"])
    assert exc.value.code == 1


def test_missing_config_file():
    with pytest.raises(ConfigError):
        read_config_file("/nonexistent/purf.cfg")


def test_unwritable_output_exits_3(tmp_path):
    out = tmp_path / "missing-dir" / "o.csv"
    assert main(["m12", "--seed", "1", "--k", "3", "--replicates", "50", "--out", str(out)]) == 3


def test_bias_above_bound_exits_2(tmp_path, monkeypatch):
    def tiny_bounds(model, n, k):
        return BoundSet(0.0, 1e-300, 0.0, 0.0, 0.0, 0)

    monkeypatch.setattr(purf.experiments, "bounds", tiny_bounds)
    out = tmp_path / "t.csv"
    code = main(["tree-decomposition", "--seed", "1", "--n", "200", "--k", "4",
                 "--replicates", "3", "--out", str(out)])
    assert code == 2
    assert _csv_rows(out)[0]["bias_ok"] == "0"


@pytest.mark.parametrize(
    "experiment, args",
    [
        ("forest-decomposition", ["--n", "300", "--k", "5", "--q", "3", "--replicates", "6"]),
        ("covariance-ratio", ["--n", "300", "--k", "5", "--replicates", "6"]),
        ("tree-decomposition", ["--n", "300,600", "--k", "5", "--replicates", "6"]),
    ],
)
def test_output_is_byte_identical_across_threads(tmp_path, experiment, args):
    texts = []
    for threads in ("1", "3"):
        out = tmp_path / f"{threads}.csv"
        assert main([experiment, "--seed", "11", "--threads", threads, "--out", str(out)] + args) == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_json_rows_mirror_csv_rows(tmp_path):
    common = ["--seed", "2", "--model", "sine-uniform", "--n", "400", "--k", "6",
              "--replicates", "5"]
    csv_out, json_out = tmp_path / "a.csv", tmp_path / "a.json"
    assert main(["tree-decomposition", "--out", str(csv_out)] + common) == 0
    assert main(["tree-decomposition", "--format", "json", "--out", str(json_out)] + common) == 0
    doc = json.loads(json_out.read_text())
    assert doc["experiment"] == "tree-decomposition"
    assert doc["config"]["seed"] == 2
    rows = _csv_rows(csv_out)
    assert len(rows) == len(doc["rows"])
    for c, j in zip(rows, doc["rows"]):
        assert list(c) == list(j)
        for key in c:
            assert float(c[key]) == float(j[key])


def test_rate_and_eq9_experiments_run(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["rate", "--seed", "3", "--n", "64,125,216", "--q", "4", "--replicates", "4",
                 "--out", str(out)]) == 0
    rows = _csv_rows(out)
    assert [r["k"] for r in rows] == ["3", "4", "5"]
    assert rows[0]["tree_slope"] == rows[2]["tree_slope"]
    out = tmp_path / "e.csv"
    assert main(["eq9-check", "--seed", "3", "--n", "50", "--k", "3", "--partitions", "2",
                 "--mc-samples", "500", "--out", str(out)]) == 0
    assert len(_csv_rows(out)) == 2


def test_resolve_defaults_output_name():
    cfg = resolve("m12", {"seed": "4"}, {"format": "json"})
    assert cfg.out == "m12.json"
    assert cfg.k == [20]
