"""Monte-Carlo replication driver for simulation accuracy tables.

Replication ``r`` of a cell draws its cohort seeds from
``SeedSequence(seed, spawn_key=(cell, r))``, so a cell's results do not
depend on how replications are spread over workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ._parallel import parallel_map
from .classify import TrainConfig, predict, train
from .errors import IndeterminateClassesError
from .simgen import SimulationSpec, generate_cohort


@dataclass(frozen=True)
class BenchmarkCell:
    model_id: int = 1
    noise_id: int = 1
    delta: float = 0.2
    n: int = 1000
    n1: int = 100
    n2: int = 100
    n_test: int = 25


@dataclass
class CellResult:
    cell: BenchmarkCell
    accuracies: list
    failures: int

    @property
    def reps(self) -> int:
        return len(self.accuracies)

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        return float(np.std(self.accuracies, ddof=1)) if self.reps > 1 else float("nan")

    @property
    def standard_error(self) -> float:
        return self.std / math.sqrt(self.reps) if self.reps > 1 else float("nan")

    def formatted(self) -> str:
        if self.reps < 2:
            return f"{self.mean:.2f}"
        return f"{self.mean:.2f} ({self.std:.2f})"


def replication_seeds(seed: int, cell_index: int, rep: int) -> tuple[int, int]:
    """Base seeds for the training and the test cohort of one replication."""
    state = np.random.SeedSequence(seed, spawn_key=(cell_index, rep)).generate_state(2, np.uint64)
    # keep seed + record index well inside 64 bits
    return int(state[0] >> np.uint64(2)), int(state[1] >> np.uint64(2))


def run_replication(cell: BenchmarkCell, config: TrainConfig, train_seed: int,
                    test_seed: int) -> tuple[float, bool]:
    """Train on one simulated cohort and score a balanced test cohort.

    Returns ``(accuracy, failed)``; a replication whose class medians
    coincide cannot label anything and scores chance level 0.5.
    """
    template = SimulationSpec(cell.model_id, cell.noise_id, cell.delta, cell.n)
    cohort = generate_cohort(template, cell.n1, cell.n2, train_seed)
    tx = (cell.n_test + 1) // 2
    tests = generate_cohort(template, tx, cell.n_test - tx, test_seed, prefix="test-")
    try:
        model = train(cohort, config)
    except IndeterminateClassesError:
        return 0.5, True
    correct = sum(predict(model, rec).label == rec.label for rec in tests)
    return correct / len(tests), False


def _rep_task(args):
    cell, config, train_seed, test_seed = args
    return run_replication(cell, config, train_seed, test_seed)


def run_cell(cell: BenchmarkCell, reps: int, config: TrainConfig | None = None,
             seed: int = 0, cell_index: int = 0, threads: int = 1) -> CellResult:
    config = replace(config or TrainConfig(), threads=1)
    tasks = [(cell, config) + replication_seeds(seed, cell_index, r) for r in range(reps)]
    out = parallel_map(_rep_task, tasks, threads)
    return CellResult(cell, [a for a, _ in out], sum(f for _, f in out))


def sweep_cells(base: BenchmarkCell, sweep: str | None, values: Sequence[float]) -> list:
    """Cells of a robustness sweep over ``delta``, ``kappa`` or ``n``.

    ``kappa`` keeps ``n1`` and sets ``n2 = kappa * n1``.
    """
    if not sweep or sweep == "none":
        return [base]
    if sweep == "delta":
        return [replace(base, delta=float(v)) for v in values]
    if sweep == "kappa":
        return [replace(base, n2=int(round(float(v) * base.n1))) for v in values]
    if sweep == "n":
        return [replace(base, n=int(v)) for v in values]
    raise ValueError(f"unknown sweep {sweep!r}")


def run_benchmark(cells: Sequence[BenchmarkCell], reps: int, config: TrainConfig | None = None,
                  seed: int = 0, threads: int = 1) -> list:
    return [run_cell(cell, reps, config, seed, k, threads) for k, cell in enumerate(cells)]
