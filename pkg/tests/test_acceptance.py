"""Acceptance suite: every criterion runs from its frozen config in configs/.

Each report prints one PASS/FAIL line straight to the terminal, also when
pytest captures output. Run as a script for the same lines without pytest.
"""
import sys
from pathlib import Path

import pytest

from qwalk.harness import ExperimentConfig, run_experiment

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
CRITERIA = [f"A{i}" for i in range(1, 11)]


def run(criterion: str, out_root):
    cfg = ExperimentConfig.load(CONFIGS / f"{criterion}.json")
    assert cfg.experiment == criterion
    return run_experiment(cfg, out_root)


@pytest.mark.parametrize("criterion", CRITERIA)
def test_criterion(criterion, tmp_path, capsys):
    res = run(criterion, tmp_path)
    with capsys.disabled():
        print()
        for r in res.reports:
            print(f"  [{criterion}] {r.line()}")
    assert res.reports
    failed = [r.line() for r in res.reports if not r.passed]
    assert not failed, "\n".join(failed)


if __name__ == "__main__":
    ok = True
    for c in sys.argv[1:] or CRITERIA:
        res = run(c, None)
        for r in res.reports:
            print(f"[{c}] {r.line()}", flush=True)
        ok &= res.passed
    raise SystemExit(0 if ok else 1)
