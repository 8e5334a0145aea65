import json

import numpy as np
import pytest
from scipy import stats

from qwalk.cli import main
from qwalk.harness import (
    ConfigError,
    ExperimentConfig,
    PoolingError,
    chi_square,
    counts_for,
    ecdf,
    jitter,
    ks_test,
    pool_cells,
    run_experiment,
)


def test_ks_against_own_ecdf():
    x = np.random.default_rng(0).normal(size=500)
    rep = ks_test(x, ecdf(x))
    assert rep.statistic <= 1 / x.size + 1e-15


def test_ks_calibration_uniform():
    rng = np.random.default_rng(1)
    ps = np.array([ks_test(rng.uniform(size=400), stats.uniform.cdf).value for _ in range(300)])
    # p-values of a true null are roughly uniform
    assert stats.kstest(ps, "uniform").pvalue > 0.001
    assert 0.0 < np.mean(ps < 0.05) < 0.12


def test_ks_power():
    x = np.random.default_rng(2).normal(0.2, 1.0, size=5000)
    assert ks_test(x, stats.norm.cdf).value < 1e-6


def test_ks_empty():
    with pytest.raises(ValueError):
        ks_test([], stats.norm.cdf)


def test_chi_square_exact_expected():
    p = np.array([0.2, 0.3, 0.5])
    rep = chi_square(p * 1000, p)
    assert rep.statistic == pytest.approx(0.0, abs=1e-12)
    assert rep.value == pytest.approx(1.0)
    assert rep.ledger["dof"] == 2


def test_chi_square_fair_die():
    rolls = np.random.default_rng(3).integers(1, 7, size=6000)
    rep = chi_square(counts_for(rolls, range(1, 7)), np.full(6, 1 / 6), threshold=0.01)
    assert rep.passed
    loaded = np.where(rolls == 6, 5, rolls)
    assert not chi_square(counts_for(loaded, range(1, 7)), np.full(6, 1 / 6)).passed


def test_chi_square_truncated_support_adds_cell():
    rep = chi_square([40, 40], [0.4, 0.4], n=100)
    assert rep.ledger["cells"] == 3


def test_pooling():
    obs, exp = pool_cells([10, 3, 2, 20], [10, 2, 2, 20])
    # the pooled cell (expected 4) is still too small and joins the smallest cell
    assert exp.tolist() == [14, 20] and obs.tolist() == [15, 20]
    obs, exp = pool_cells([1, 1, 1, 30], [3, 3, 3, 30])
    assert exp.tolist() == [30, 9] and obs.tolist() == [30, 3]
    with pytest.raises(PoolingError):
        chi_square([2, 2], [0.5, 0.5], pool=False)
    with pytest.raises(PoolingError):
        chi_square([3, 1], [0.5, 0.5])


def test_jitter_stays_in_cell():
    v = np.arange(100)
    j = jitter(v, np.random.default_rng(4))
    assert np.all(np.abs(j - v) <= 0.5)


def test_counts_for_rows():
    vals = np.array([[0, 1], [0, 1], [2, 3]])
    assert counts_for(vals, [(0, 1), (2, 3), (5, 6)]).tolist() == [2, 1, 0]


def test_config_requires_seed():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "A6"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "A6", "seed": 1, "colour": "red"})
    with pytest.raises(ConfigError):
        run_experiment({"experiment": "A99", "seed": 1})


def test_digest_ignores_output():
    a = ExperimentConfig("A6", 1, {"n_max": 3}, {}, "x")
    b = ExperimentConfig("A6", 1, {"n_max": 3}, {}, "y")
    assert a.digest == b.digest
    assert a.digest != ExperimentConfig("A6", 2, {"n_max": 3}).digest


def test_reruns_are_byte_identical(tmp_path):
    cfg = {"experiment": "A6", "seed": 5}
    r1 = run_experiment(cfg, tmp_path / "one")
    r2 = run_experiment(cfg, tmp_path / "two")
    assert r1.passed
    csvs = sorted(p.name for p in r1.run_dir.glob("*.csv"))
    assert "results.csv" in csvs and "ledger.csv" in csvs
    for name in csvs:
        assert (r1.run_dir / name).read_bytes() == (r2.run_dir / name).read_bytes()
    assert json.loads((r1.run_dir / "config.json").read_text())["seed"] == 5


def test_cli_verify_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "a6.json"
    cfg.write_text(json.dumps({"experiment": "A6", "seed": 1}))
    assert main(["verify", "--config", str(cfg)]) == 0
    assert "PASS" in capsys.readouterr().out
    strict = tmp_path / "strict.json"
    strict.write_text(json.dumps({"experiment": "A6", "seed": 1, "thresholds": {"max_discrepancy": -1.0}}))
    assert main(["verify", "--config", str(strict)]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"experiment": "A6"}))
    assert main(["verify", "--config", str(bad)]) == 2


def test_cli_transition(tmp_path):
    out = tmp_path / "row.csv"
    assert main(["transition", "--n", "2", "--g", "geom_up:0.3", "--from", "1,0", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "mu,probability"
    assert sum(float(r.split(",")[-1]) for r in rows[1:]) == pytest.approx(1.0, abs=1e-10)


def test_cli_kernel_and_gue(capsys):
    assert main(["kernel", "--q", "0.5", "--points", "(0,1)"]) == 0
    out = capsys.readouterr().out
    assert "rho_n" in out
    assert main(["gue", "--n", "2", "--reps", "5", "--seed", "1"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 6
    assert main(["gue", "--n", "2", "--density-grid=-1,1,3"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 1 + 6


def test_cli_pushasep(capsys, tmp_path):
    assert main(["pushasep", "--zeta", "2,1", "--t", "1", "--exact", "6"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x1,x2,probability"
    assert main(["pushasep", "--zeta", "2,1", "--t", "5", "--reps", "4", "--rescale"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("x1,x2,tilde1") and len(lines) == 5
    cfg = tmp_path / "p.json"
    cfg.write_text(json.dumps({"zeta": [1, 1], "reps": 3, "colour": 1}))
    assert main(["pushasep", "--config", str(cfg)]) == 2
