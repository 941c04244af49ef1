import json
import subprocess
import sys

import pytest

from lmoments import __version__
from lmoments.cli import (
    EXIT_BAD_FILE,
    EXIT_BAD_NUMBER,
    EXIT_BAD_VALUE,
    EXIT_RUNTIME,
    EXIT_UNKNOWN_KEY,
    EXIT_VIOLATION,
    COLUMNS,
    ConfigError,
    main,
    parse_config,
)
from lmoments.report import read_csv_report, render


def write(tmp_path, text, name="run.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_minimal_file(tmp_path):
    cfg = parse_config(["--config", write(tmp_path, "subcommand: moments\nq: [101]\nk: [1]\nt: [0]\n")])
    assert cfg.subcommand == "moments" and cfg.q == [101] and cfg.k == [1.0] and cfg.t == [0.0]


def test_flag_overrides_file(tmp_path):
    path = write(tmp_path, "subcommand: moments\nq: [101]\nk: [1]\n")
    assert parse_config(["--config", path, "--k", "0.5"]).k == [0.5]
    assert parse_config(["sweep", "--config", path]).subcommand == "sweep"


def test_underscore_keys(tmp_path):
    path = write(tmp_path, "subcommand: lemma22\nq: 101\nk: 0.5\nwindow_mode: custom\nwindow_bounds: [7]\n")
    cfg = parse_config(["--config", path])
    assert cfg.window_mode == "custom" and cfg.window_bounds == [7.0] and cfg.q == [101]


@pytest.mark.parametrize("argv,code,key", [
    (["moments", "--q", "100"], EXIT_BAD_VALUE, "q must be prime"),
    (["moments", "--q", "abc"], EXIT_BAD_NUMBER, "q"),
    (["moments", "--k", "1.5x"], EXIT_BAD_NUMBER, "k"),
    (["moments", "--bogus", "1"], EXIT_UNKNOWN_KEY, "bogus"),
    (["moments", "--config", "/nonexistent/run.yaml"], EXIT_BAD_FILE, "config"),
    (["lemma21", "--k", "1"], EXIT_BAD_VALUE, "k"),
    (["moments", "--format", "xml"], EXIT_BAD_VALUE, "format"),
    (["teleport"], EXIT_BAD_VALUE, "subcommand"),
    ([], EXIT_BAD_VALUE, "subcommand"),
    (["twisted", "--h", "2", "--b", "4"], EXIT_BAD_VALUE, "h"),
    (["twisted", "--q", "101", "--h", "101", "--b", "1"], EXIT_BAD_VALUE, "h"),
    (["moments", "--q", "2000003"], EXIT_BAD_VALUE, "q"),
])
def test_config_errors(argv, code, key, capsys):
    assert main(argv) == code
    assert key in capsys.readouterr().err


def test_file_errors(tmp_path):
    with pytest.raises(ConfigError) as exc:
        parse_config(["--config", write(tmp_path, "subcommand: moments\nqq: [5]\n")])
    assert exc.value.code == EXIT_UNKNOWN_KEY and exc.value.key == "qq"
    with pytest.raises(ConfigError) as exc:
        parse_config(["--config", write(tmp_path, "- just\n- a list\n")])
    assert exc.value.code == EXIT_BAD_FILE
    with pytest.raises(ConfigError) as exc:
        parse_config(["--config", write(tmp_path, "subcommand: moments\nq: [101, seven]\n")])
    assert exc.value.code == EXIT_BAD_NUMBER


def test_moments_report_schema(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["moments", "--q", "101", "--k", "1", "--t", "0", "--out", str(out)]) == 0
    meta, rows = read_csv_report(out.read_text())
    assert len(rows) == 1
    assert list(rows[0]) == ["q", "k", "t", "moment", "normalizer", "ratio"]
    assert meta["version"] == __version__
    assert meta["config"]["q"] == [101] and meta["config"]["subcommand"] == "moments"


def test_lemma21_grid_exit_zero(tmp_path):
    out = tmp_path / "l.csv"
    code = main(["lemma21", "--q", "101", "--k", "0.5", "2", "--window-mode", "custom", "--out", str(out)])
    assert code == 0
    _, rows = read_csv_report(out.read_text())
    assert {r["holds"] for r in rows} == {"true"}


def test_violation_exit_two(tmp_path):
    out = tmp_path / "l.csv"
    code = main(["lemma22", "--q", "101", "--k", "0.5", "--window-mode", "custom", "--constant", "1e-6",
                 "--out", str(out)])
    assert code == EXIT_VIOLATION
    _, rows = read_csv_report(out.read_text())
    assert rows[0]["holds"] == "false"


def test_unwritable_output(tmp_path, capsys):
    code = main(["moments", "--q", "101", "--out", str(tmp_path / "missing" / "x.csv")])
    assert code == EXIT_RUNTIME
    assert "cannot write" in capsys.readouterr().err


def test_runtime_error_exit_one(capsys):
    # a custom window bound above q is only detectable while running
    assert main(["lemma21", "--q", "101", "--k", "0.5", "--window-mode", "custom",
                 "--window-bounds", "200"]) == EXIT_RUNTIME
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("sub,extra", [
    ("moments", []), ("sweep", ["--workers", "2", "--q", "101", "103"]),
    ("lemma21", ["--window-mode", "custom"]), ("lemma22", ["--window-mode", "custom"]),
    ("twisted", ["--h", "1", "2", "--b", "1", "3", "--t", "0", "1.3"]), ("twisted-general", ["--t", "1"]),
    ("prop24", ["--window-mode", "custom"]), ("prop25", []), ("prop26", ["--window-mode", "custom"]),
    ("afe-profile", ["--x-grid", "200", "800"]),
])
def test_every_subcommand_is_deterministic(tmp_path, sub, extra):
    runs = []
    out = tmp_path / f"{sub}.csv"
    for _ in range(2):
        assert main([sub, "--q", "101", "--k", "0.5", *extra, "--out", str(out)]) == 0
        runs.append(out.read_bytes())
    assert runs[0] == runs[1]
    meta, rows = read_csv_report(runs[0].decode())
    assert rows and list(rows[0]) == COLUMNS[sub]
    assert meta["config"]["subcommand"] == sub


def test_json_mirrors_csv(tmp_path):
    out = tmp_path / "t.json"
    assert main(["twisted", "--q", "101", "--h", "2", "--b", "3", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["columns"] == COLUMNS["twisted"]
    assert doc["metadata"]["version"] == __version__
    assert set(doc["rows"][0]) == set(COLUMNS["twisted"])


def test_render_rejects_missing_columns():
    with pytest.raises(KeyError):
        render("csv", ["a", "b"], [{"a": 1}], {})
    with pytest.raises(ValueError):
        render("xml", ["a"], [{"a": 1}], {})


def test_number_format():
    text = render("csv", ["x", "z", "n", "b"], [{"x": 1 / 3, "z": -0.0, "n": float("nan"), "b": True}], {})
    assert text.splitlines()[-1] == "0.333333333333,0,nan,true"


def test_console_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run([sys.executable, "-m", "lmoments.cli", "moments", "--q", "101", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("# tool:")
