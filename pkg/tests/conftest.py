import numpy as np
import pytest
from scipy.signal import lfilter

from sieveclass.simgen import rng_for_seed


def simulate_ar(coefs, n, seed, burn=200):
    """Stationary Gaussian AR(p) series, independent of the package simulator."""
    e = rng_for_seed(seed).standard_normal(n + burn)
    return lfilter([1.0], np.concatenate([[1.0], -np.asarray(coefs, float)]), e)[burn:]


@pytest.fixture
def ar_series():
    return simulate_ar


SMALL_FIT = ["--b-grid", "1-3", "--c-grid", "1-4"]


def run_cli_pipeline(root, threads):
    """Run every CLI command on a small problem; return artifact bytes by name."""
    from sieveclass.cli import main

    root.mkdir(parents=True, exist_ok=True)
    t = ["--threads", str(threads)]
    data, test = root / "data", root / "test"
    steps = [
        ["simulate", "--model", "1", "--delta", "0.4", "--n", "300", "--n1", "4", "--n2", "4",
         "--seed", "11", "--out", str(data)],
        ["simulate", "--model", "1", "--delta", "0.4", "--n", "300", "--n1", "2", "--n2", "2",
         "--seed", "9000", "--out", str(test)],
        ["train", "--manifest", str(data / "manifest.json"), "--model-out", str(root / "model.json"),
         "--features-out", str(root / "train_features.csv"), "--bootstrap", "100", *SMALL_FIT, *t],
        ["predict", "--model", str(root / "model.json"), "--manifest", str(test / "manifest.json"),
         "--out", str(root / "pred.csv")],
        ["features", "--manifest", str(data / "manifest.json"), "--out", str(root / "features.csv"),
         "--cv-dir", str(root / "cv"), *SMALL_FIT, *t],
        ["test-stationarity", "--manifest", str(test / "manifest.json"), "--bootstrap", "100",
         "--out", str(root / "stationarity.csv"), *SMALL_FIT, *t],
        ["oracle", "--kind", "tvma1", "--coef", "0.5*sin(2*pi*t)", "--b", "3", "--grid-size", "21",
         "--out", str(root / "oracle.csv"), "--features-out", str(root / "dstar.csv")],
        ["benchmark", "--model", "1", "--delta", "0.4", "--n", "300", "--n1", "3", "--n2", "3",
         "--n-test", "4", "--reps", "3", "--sweep", "delta", "--values", "0.2,0.4",
         "--out", str(root / "bench.csv"), *SMALL_FIT, *t],
    ]
    for argv in steps:
        code = main(argv)
        assert code == 0, (argv[0], code)
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


ACCEPTANCE_RESULTS = {}


def record_criterion(number, passed, detail):
    ACCEPTANCE_RESULTS[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
