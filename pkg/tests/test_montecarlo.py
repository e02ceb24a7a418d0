import json
import math

import numpy as np
import pytest

from gtail import montecarlo as mc
from gtail.asymptotics import psi_MR
from gtail.errors import DomainError


def small_cfg(**over):
    base = dict(family="burr", n=400, replications=8, seed=11,
                gamma=1.0, rho=-1.0)
    base.update(over)
    return mc.ExperimentConfig(**base)


class TestConfig:
    def test_validation(self):
        with pytest.raises(DomainError):
            small_cfg(replications=0)
        with pytest.raises(DomainError):
            small_cfg(estimators=("hill", "nope"))
        with pytest.raises(DomainError):
            small_cfg(grid=(((-1.0, -1.0)),))

    def test_digest_stability(self):
        assert small_cfg().digest() == small_cfg().digest()
        assert small_cfg().digest() != small_cfg(seed=12).digest()


class TestRunCell:
    def test_determinism_same_seed(self):
        cfg = small_cfg()
        a = mc.run_cell(cfg, 1.0, -1.0)
        b = mc.run_cell(cfg, 1.0, -1.0)
        assert a == b

    def test_workers_do_not_change_bytes(self):
        cfg = small_cfg(replications=12)
        rep1 = mc.simulate(cfg, workers=1)
        rep4 = mc.simulate(cfg, workers=4)
        assert mc.report_to_csv(rep1) == mc.report_to_csv(rep4)

    def test_mse_decomposition(self):
        cell = mc.run_cell(small_cfg(replications=20), 1.0, -1.0)
        for st in cell.stats.values():
            if st.count == 0:
                continue
            assert abs(st.mse - (st.variance + st.bias**2)) <= 1e-10 * max(st.mse, 1.0)

    def test_failure_accounting(self):
        cell = mc.run_cell(small_cfg(replications=10), 1.0, -1.0)
        for st in cell.stats.values():
            assert st.count + st.failures == 10

    def test_pareto_cell_is_degenerate(self):
        cfg = small_cfg(family="pareto", rho=None)
        cell = mc.run_cell(cfg, 1.0, -1.0)
        assert cell.degenerate
        for st in cell.stats.values():
            assert st.failures == cfg.replications
            assert math.isnan(st.mse)


class TestSimulate:
    def test_grid_and_manifest(self):
        grid = ((0.5, -1.0), (1.0, -0.5))
        cfg = small_cfg(gamma=None, rho=None, grid=grid, replications=4)
        rep = mc.simulate(cfg)
        assert [(c.gamma, c.rho) for c in rep.cells] == list(grid)
        assert rep.manifest["seed"] == 11
        assert rep.manifest["generator"] == mc.GENERATOR_NAME
        assert rep.manifest["config_digest"] == cfg.digest()
        json.dumps(rep.manifest)  # serializable

    def test_needs_cell_or_grid(self):
        with pytest.raises(DomainError):
            mc.simulate(small_cfg(gamma=None, rho=None))

    def test_dominance_rows(self):
        grid = ((0.5, -1.0), (1.0, -0.5))
        rep = mc.simulate(small_cfg(gamma=None, rho=None, grid=grid, replications=4))
        rows = mc.dominance_map(rep)
        assert len(rows) == 2
        for g, r, wm, wb in rows:
            assert wm in mc.LABELS or wm == "degenerate"
            assert wb in mc.LABELS or wb == "degenerate"


def test_ratio_curve_smoke():
    cfg = small_cfg(n=500, replications=10)
    rows = mc.ratio_curve(cfg, 1.0, [-1.0, -2.0])
    assert len(rows) == 2
    for rho, ratio, theory in rows:
        assert theory == pytest.approx(float(psi_MR(rho)), rel=1e-12)
        assert math.isnan(ratio) or ratio > 0


def test_variance_check_smoke():
    out = mc.variance_check(1.0, 0.2, 1, 2000, 200, 50, seed=5)
    assert out["theoretical"] > 0
    assert 0 < out["empirical_var_scaled"] < 10 * out["theoretical"]


class TestContamination:
    def test_monotone_and_bounded_for_positive_r(self):
        xs = [1e2, 1e4, 1e6, 1e8]
        rows = mc.contamination_experiment(1.0, 0.5, 1, 2000, 200, 9, xs)
        deltas = [d for _, d in rows]
        assert deltas == sorted(deltas)
        assert all(np.isfinite(deltas))

    def test_consistency_guard(self):
        with pytest.raises(DomainError):
            mc.contamination_experiment(2.0, 0.6, 1, 1000, 100, 9, [10.0])


class TestSerialization:
    def test_report_csv_shape(self):
        rep = mc.simulate(small_cfg(replications=4))
        csv = mc.report_to_csv(rep)
        lines = csv.strip().split("\n")
        assert lines[0].startswith("gamma,rho,estimator")
        assert len(lines) == 1 + len(mc.LABELS)

    def test_dominance_csv(self):
        rep = mc.simulate(small_cfg(replications=4))
        csv = mc.dominance_to_csv(mc.dominance_map(rep))
        assert csv.splitlines()[0] == "gamma,rho,winner_mse,winner_bias"

    def test_manifest_json_round_trip(self):
        rep = mc.simulate(small_cfg(replications=4))
        assert json.loads(mc.manifest_json(rep))["version"] == mc.VERSION
