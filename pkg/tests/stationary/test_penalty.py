"""Tests for the soft-to-hard reflection sweep."""

import numpy as np
import pytest

from grbm.errors import ConfigurationError
from grbm.stationary.penalty import PenaltyTable, count_inversions, penalty_sweep


def _table(distance, n_paths=100) -> PenaltyTable:
    betas = np.array([1.0, 2.0, 4.0, 8.0])[:len(distance)]
    return PenaltyTable(betas, np.array(distance, dtype=float), n_paths, 1.0)


class TestInversions:
    def test_count(self):
        assert count_inversions([3.0, 2.0, 2.5, 1.0]) == 1
        assert count_inversions([3.0, 2.0, 2.5, 1.0], tolerance=0.6) == 0
        assert count_inversions([1.0]) == 0


class TestPenaltyTable:
    def test_noise_floor(self):
        assert _table([0.3, 0.2], n_paths=400).noise_floor == pytest.approx(0.05)

    def test_decreasing_is_a_trend(self):
        assert _table([0.5, 0.3, 0.2, 0.1]).trend_ok

    def test_one_small_inversion_allowed(self):
        table = _table([0.5, 0.3, 0.35, 0.1])
        assert table.inversions == 1
        assert table.trend_ok

    def test_large_inversion_breaks_trend(self):
        assert not _table([0.5, 0.3, 0.45, 0.1]).trend_ok

    def test_two_inversions_break_trend(self):
        assert not _table([0.5, 0.52, 0.3, 0.31]).trend_ok

    def test_table_and_summary(self):
        table = _table([0.5, 0.3])
        assert list(table.to_frame().columns) == ["beta", "distance", "n_paths"]
        assert table.to_dict()["trend_ok"] is True


class TestPenaltySweep:
    def test_betas_must_increase(self, hard_pair):
        with pytest.raises(ConfigurationError):
            penalty_sweep(hard_pair, [4.0, 2.0], 0.1, 10, 0, 0.01)

    def test_betas_must_be_positive(self, hard_pair):
        with pytest.raises(ConfigurationError):
            penalty_sweep(hard_pair, [0.0, 2.0], 0.1, 10, 0, 0.01)

    def test_small_sweep_is_deterministic(self, hard_pair):
        a = penalty_sweep(hard_pair, [1.0, 4.0], 0.2, 200, 5, 0.01, z0=[0.0, 1.0])
        b = penalty_sweep(hard_pair, [1.0, 4.0], 0.2, 200, 5, 0.01, z0=[0.0, 1.0])
        assert np.array_equal(a.distance, b.distance)
        assert a.t_obs == 0.2

    @pytest.mark.slow
    def test_distance_shrinks_as_penalty_steepens(self, hard_pair):
        table = penalty_sweep(hard_pair, [1.0, 4.0, 16.0], 2.0, 2000, 3, 1e-2, z0=[0.0, 1.0])
        assert table.distance[-1] < table.distance[0]
        assert table.distance[0] > table.noise_floor
