import numpy as np
import pytest

from ceilsim.domain import BiasMechanism
from ceilsim.metrics import MECHANISM_LABELS, SnapshotRecord, aggregate, snapshot
from ceilsim.scheduler import run_simulation

from conftest import make_company, make_level, small_config


def record(run, cycle=1, level=1, pct_male=0.5, men=None, women=None, bias=None):
    return SnapshotRecord(
        run_index=run,
        cycle=cycle,
        level=level,
        n_agents=10,
        n_men=5,
        n_women=5,
        pct_male=pct_male,
        mean_net_success_men=men,
        mean_net_success_women=women,
        mean_bias_count_women=bias,
    )


class TestSnapshot:
    def test_pct_male_arithmetic(self):
        level = make_level(np.arange(10), [False] * 7 + [True] * 3, np.full(10, 50.0))
        company = make_company([level])
        (rec,) = snapshot(company, cycle=1, run_index=0)
        assert rec.pct_male == pytest.approx(0.7)
        assert rec.n_men == 7 and rec.n_women == 3

    def test_net_success_means_by_gender(self):
        level = make_level(
            [0, 1, 2], [False, True, True], [50.0] * 3,
            successes=[4, 6, 2], failures=[1, 1, 3],
        )
        (rec,) = snapshot(make_company([level]), 1, 0)
        assert rec.mean_net_success_men == pytest.approx(3.0)
        assert rec.mean_net_success_women == pytest.approx(2.0)  # (5 + -1) / 2

    def test_zero_women_emits_null_markers(self):
        level = make_level([0, 1], [False, False], [50.0, 50.0])
        (rec,) = snapshot(make_company([level]), 1, 0)
        assert rec.mean_net_success_women is None
        assert rec.mean_bias_count_women is None

    def test_bias_means_include_total(self):
        level = make_level([0, 1], [True, True], [50.0, 50.0])
        level.bias_events[0, BiasMechanism.REWARD_INDIVIDUAL_SUCCESS] = 4
        level.bias_events[1, BiasMechanism.PENALTY_NON_ALTRUISM] = 2
        (rec,) = snapshot(make_company([level]), 1, 0)
        values = dict(zip(MECHANISM_LABELS, rec.mean_bias_count_women))
        assert values["reward_individual_success"] == pytest.approx(2.0)
        assert values["penalty_non_altruism"] == pytest.approx(1.0)
        assert values["total"] == pytest.approx(3.0)

    def test_unbiased_run_has_zero_bias_counts(self):
        result = run_simulation(small_config(), 3, 0)
        for rec in result.snapshots:
            if rec.mean_bias_count_women is not None:
                assert all(v == 0 for v in rec.mean_bias_count_women)

    def test_record_invariants_on_biased_run(self):
        config = small_config(**{
            "bias.r2": 0.022, "bias.r2_group": 0.022, "bias.p_com": 0.1,
            "bias.f_dis": 0.9, "bias.p_female": 0.2,
        })
        snapshots = []
        for run_index in (0, 1):
            snapshots += run_simulation(config, 8, run_index).snapshots
        for rec in snapshots:
            assert rec.n_men + rec.n_women == rec.n_agents
            assert 0.0 <= rec.pct_male <= 1.0
            if rec.mean_bias_count_women is not None:
                assert all(v >= 0 for v in rec.mean_bias_count_women)
        for agg in aggregate(snapshots):
            assert agg.ci_low <= agg.mean <= agg.ci_high


class TestAggregate:
    def test_two_run_closed_form(self):
        records = [record(0, pct_male=0.4), record(1, pct_male=0.6)]
        (agg,) = aggregate(records)
        assert agg.mean == pytest.approx(0.5)
        # s = stdev({0.4, 0.6}) = 0.141421; half-width 1.96 * s / sqrt(2)
        assert agg.ci_low == pytest.approx(0.5 - 0.196, abs=1e-9)
        assert agg.ci_high == pytest.approx(0.5 + 0.196, abs=1e-9)
        assert agg.n_runs == 2

    def test_identical_values_zero_width(self):
        records = [record(i, pct_male=0.25) for i in range(100)]
        (agg,) = aggregate(records)
        assert agg.mean == 0.25 and agg.ci_low == 0.25 and agg.ci_high == 0.25

    def test_single_run_degenerate_with_warning(self):
        with pytest.warns(UserWarning, match="single run"):
            (agg,) = aggregate([record(0, pct_male=0.4)])
        assert agg.mean == agg.ci_low == agg.ci_high == 0.4
        assert agg.n_runs == 1

    def test_permutation_invariance_is_exact(self):
        rng = np.random.default_rng(5)
        records = [record(i, pct_male=float(rng.random())) for i in range(50)]
        shuffled = list(records)
        rng.shuffle(shuffled)
        assert aggregate(records) == aggregate(shuffled)

    def test_interval_shrinks_with_more_runs(self):
        # Same sample spread, more runs: half-width scales as 1/sqrt(n).
        few = aggregate([record(i, pct_male=v) for i, v in enumerate([0.4, 0.6] * 5)])
        many = aggregate([record(i, pct_male=v) for i, v in enumerate([0.4, 0.6] * 50)])
        assert (many[0].ci_high - many[0].ci_low) < (few[0].ci_high - few[0].ci_low)

    def test_null_metrics_skipped_not_zeroed(self):
        records = [
            record(0, women=2.0, men=1.0),
            record(1, women=None, men=3.0),
        ]
        aggs = aggregate(records)
        women = [a for a in aggs if a.metric == "mean_net_success" and a.group == "woman"]
        men = [a for a in aggs if a.metric == "mean_net_success" and a.group == "man"]
        assert women[0].n_runs == 1 and women[0].mean == 2.0
        assert men[0].n_runs == 2 and men[0].mean == 2.0

    def test_bias_counts_per_mechanism(self):
        bias = tuple(float(i) for i in range(len(MECHANISM_LABELS)))
        aggs = aggregate([record(0, bias=bias), record(1, bias=bias)])
        per_mech = {a.group: a.mean for a in aggs if a.metric == "mean_count_per_woman"}
        assert per_mech["reward_individual_success"] == 0.0
        assert per_mech["total"] == float(len(MECHANISM_LABELS) - 1)
