import numpy as np
import pytest

from depclust.core import cut_dendrogram, partitions_equivalent
from depclust.correlation import correlation_distance
from depclust.experiment import (
    ExperimentPlan,
    TrialCell,
    _simulate,
    grids_to_csv,
    kendall_concentration_bound,
    recovery_bound,
    run_grid,
    run_trial,
    trial_outcomes,
)
from depclust.hcbm import MarginKind
from depclust.linkage import cluster


class TestBounds:
    def test_concentration_value(self):
        expected = 1 - 50 * np.exp(-11.25)
        assert kendall_concentration_bound(5, 1000, 0.3) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.99935, abs=1e-5)

    def test_concentration_clamps(self):
        assert kendall_concentration_bound(5, 2, 0.3) == 0.0

    def test_concentration_monotone(self):
        by_t = [kendall_concentration_bound(5, t, 0.3) for t in range(100, 3000, 100)]
        by_eps = [kendall_concentration_bound(5, 1000, e) for e in np.linspace(0.05, 1, 30)]
        assert np.all(np.diff(by_t) >= 0) and np.all(np.diff(by_eps) >= 0)

    def test_recovery_values(self):
        assert recovery_bound(10, 100_000, 0.2) == pytest.approx(1.0, abs=1e-12)
        assert recovery_bound(400, 250, 0.1) == 0.0
        assert recovery_bound(400, 250, 0.0) == 0.0


class TestTrial:
    def test_easy_cell_succeeds(self):
        assert run_trial(TrialCell(50, 0.45, 2000), 0, kind="pearson", linkage="average")

    def test_tiny_t_fails(self):
        cell = TrialCell(100, 0.1, 3)
        wins = sum(run_trial(cell, t, base_seed=1) for t in range(20))
        assert wins <= 1

    def test_deterministic(self):
        cell = TrialCell(40, 0.15, 60, index=4)
        for t in range(5):
            assert run_trial(cell, t, 9, "spearman", "single") == run_trial(cell, t, 9, "spearman", "single")
        X1, _ = _simulate(cell, 2, 9)
        X2, _ = _simulate(cell, 2, 9)
        np.testing.assert_array_equal(X1, X2)

    def test_outcomes_match_manual_pipeline(self):
        cell = TrialCell(30, 0.2, 80, MarginKind("student", 3.0), index=2)
        out, warnings = trial_outcomes(cell, 0, 5, ["kendall"], ["complete"])
        X, planted = _simulate(cell, 0, 5)
        found = cut_dendrogram(cluster(correlation_distance(X, "kendall"), "complete"), 2)
        assert out["kendall", "complete"] == partitions_equivalent(found, planted)
        assert warnings == 0

    def test_debug_mode_consistency(self):
        cell = TrialCell(30, 0.3, 200)
        for t in range(10):
            trial_outcomes(cell, t, 0, ["pearson", "spearman"],
                           ["single", "average", "complete", "mcquitty"], debug=True)

    def test_zero_variance_is_a_logged_failure(self, caplog, monkeypatch):
        import depclust.experiment as ex

        cell = TrialCell(10, 0.2, 5)
        X, planted = _simulate(cell, 0, 0)
        X[4] = 1.0
        monkeypatch.setattr(ex, "_simulate", lambda *a: (X, planted))
        out, warnings = trial_outcomes(cell, 0, 0, ["pearson"], ["average"])
        assert out == {("pearson", "average"): False}
        assert warnings == 1
        assert "cell 0 trial 0" in caplog.text


class TestPlan:
    def test_parse_rho_axis(self):
        p = ExperimentPlan.from_dict({"rho": [0.1, 0.2], "T": [50], "N": 20, "trials": 3})
        assert p.axis1 == "rho" and p.n == 20
        assert [(c.n, c.rho, c.T, c.index) for c in p.cells()] == [(20, 0.1, 50, 0), (20, 0.2, 50, 1)]

    def test_parse_n_axis(self):
        p = ExperimentPlan.from_dict({"N": [10, 20], "T": [30, 40], "rho": 0.2})
        assert [c.index for c in p.cells()] == [0, 1, 2, 3]
        assert p.cells()[3].n == 20 and p.cells()[3].T == 40

    @pytest.mark.parametrize("bad", [
        {"N": [], "T": [10]},
        {"N": [10], "T": [10], "trials": 0},
        {"rho": [0.6], "T": [10]},
        {"N": [10], "T": [10], "colour": 1},
        {"T": [10]},
    ])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            ExperimentPlan.from_dict(bad)

    def test_defaults(self):
        p = ExperimentPlan.nt_default()
        assert len(p.axis1_values) == 20 and p.axis1_values[0] == 10 and p.axis1_values[-1] == 400
        q = ExperimentPlan.rho_default("student:3")
        assert q.axis1_values[-1] == pytest.approx(0.1)
        assert ExperimentPlan.rho_default().axis1_values[-1] == pytest.approx(0.5)


class TestGrid:
    def plan(self, trials=1):
        return ExperimentPlan("rho", [0.05, 0.3, 0.5], [20, 60], n=16, trials=trials,
                              corr_kinds=("pearson", "kendall"), linkages=("single", "ward"),
                              base_seed=3)

    def test_single_trial_grid_is_pointwise(self):
        plan = self.plan()
        grids, warnings = run_grid(plan)
        assert warnings == 0
        for cell in plan.cells():
            i, j = divmod(cell.index, 2)
            for kind in plan.corr_kinds:
                for link in plan.linkages:
                    assert grids[kind, link].counts[i, j] == int(
                        run_trial(cell, 0, plan.base_seed, kind, link))

    def test_csv_independent_of_workers(self):
        plan = self.plan(trials=3)
        a = grids_to_csv(run_grid(plan, workers=1)[0])
        b = grids_to_csv(run_grid(plan, workers=2)[0])
        assert a == b
        lines = a.splitlines()
        assert lines[0] == "axis1,axis2,kind,linkage,successes,trials"
        assert len(lines) == 1 + 3 * 2 * 4

    def test_counts_bounded(self):
        grids, _ = run_grid(self.plan(trials=2))
        for g in grids.values():
            assert np.all((0 <= g.counts) & (g.counts <= 2))
            assert 0 <= g.mean_rate() <= 1

    @pytest.mark.slow
    def test_success_grows_with_t(self):
        plan = ExperimentPlan("rho", [0.1, 0.2, 0.3], [20, 60, 120, 240], n=30, trials=10,
                              corr_kinds=("pearson", "spearman"))
        grids, _ = run_grid(plan)
        for key, g in grids.items():
            by_t = g.counts.mean(axis=0)
            assert np.sum(np.diff(by_t) < 0) <= 1, (key, by_t)
