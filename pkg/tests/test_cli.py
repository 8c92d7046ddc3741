import argparse
import json
import subprocess
import sys

import pytest

from sieveclass import __version__
from sieveclass.cli import main, parse_grid

from conftest import SMALL_FIT, run_cli_pipeline


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    return run_cli_pipeline(tmp_path_factory.mktemp("cli"), 1)


def test_pipeline_outputs(artifacts):
    names = set(artifacts)
    for name in ["model.json", "pred.csv", "features.csv", "train_features.csv",
                 "stationarity.csv", "oracle.csv", "dstar.csv", "bench.csv",
                 "data/manifest.json", "data/X0000.csv", "cv/Y0003.csv"]:
        assert name in names
    model = json.loads(artifacts["model.json"])
    assert model["version"] == __version__
    assert model["config"]["standardize"] is False
    pred = artifacts["pred.csv"].decode().splitlines()
    assert pred[0].startswith("series_id,predicted_label")
    assert len(pred) == 5


def test_bench_rows(artifacts):
    rows = artifacts["bench.csv"].decode().splitlines()
    assert len(rows) == 3
    assert rows[1].split(",")[2] == "0.2"


def test_oracle_csv(artifacts):
    rows = [r.split(",") for r in artifacts["dstar.csv"].decode().splitlines()]
    assert rows[0] == ["j", "D_star"] and len(rows) == 4
    assert float(rows[1][1]) > 0


def test_determinism_across_threads(artifacts, tmp_path):
    assert run_cli_pipeline(tmp_path / "p8", 8) == artifacts


def test_parse_grid():
    assert parse_grid("1-4") == (1, 2, 3, 4)
    assert parse_grid("1,2,5") == (1, 2, 5)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_grid("4-1")


def test_exit_codes(tmp_path, capsys):
    assert main(["oracle", "--kind", "tvar1", "--coef", "1.5", "--out", str(tmp_path / "o.csv")]) == 2
    assert main(["oracle", "--kind", "tvma1", "--coef", "__import__('os')"]) == 2
    assert main(["train", "--manifest", str(tmp_path / "missing.json")]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--model", "9", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_short_series_is_data_error(tmp_path):
    main(["simulate", "--model", "1", "--n", "20", "--n1", "1", "--n2", "1", "--out", str(tmp_path)])
    assert main(["train", "--manifest", str(tmp_path / "manifest.json"),
                 "--model-out", str(tmp_path / "m.json")]) == 3


def test_version_mismatch_exit_code(artifacts, tmp_path):
    model = json.loads(artifacts["model.json"])
    model["version"] = "0.0.1"
    path = tmp_path / "old.json"
    path.write_text(json.dumps(model))
    (tmp_path / "z.csv").write_bytes(artifacts["data/X0000.csv"])
    assert main(["predict", "--model", str(path), str(tmp_path / "z.csv")]) == 3


def test_standardize_auto_for_ingested(tmp_path, artifacts):
    data = tmp_path / "data"
    data.mkdir()
    manifest = json.loads(artifacts["data/manifest.json"])
    manifest["source"] = "ingested"
    for entry in manifest["series"]:
        (data / entry["path"]).write_bytes(artifacts["data/" + entry["path"]])
    (data / "manifest.json").write_text(json.dumps(manifest))
    assert main(["train", "--manifest", str(data / "manifest.json"), "--pretest", "off",
                 "--model-out", str(tmp_path / "m.json"), *SMALL_FIT]) == 0
    assert json.loads((tmp_path / "m.json").read_text())["config"]["standardize"] is True


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "sieveclass.cli", "oracle", "--kind", "tvma1",
                          "--coef", "0.5", "--b", "1", "--grid-size", "3"],
                         capture_output=True, text=True, check=True)
    lines = out.stdout.splitlines()
    assert lines[0] == "t,phi_1"
    assert float(lines[1].split(",")[1]) == pytest.approx(0.4)
