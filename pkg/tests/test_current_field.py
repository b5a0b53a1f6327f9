import numpy as np
import pytest

from octopt.current_field import (CurrentField, SynthesisSpec, load_csv,
                                  save_csv, speed_at, synthesize)
from octopt.errors import ConfigError, CoverageError


def small_field():
    return CurrentField(
        depth_bins=np.array([0.0, 10.0, 20.0]),
        time_stamps=np.array([0.0, 1.0, 2.0]),
        speeds=np.array([[0.6, 0.8, 0.2],
                         [0.5, 0.7, 0.1],
                         [0.4, 0.6, 0.3]]),
    )


def test_grid_node_is_exact():
    f = small_field()
    assert speed_at(f, 10.0, 1.0) == 0.7
    assert speed_at(f, 20.0, 2.0) == 0.3
    assert speed_at(f, 0.0, 0.0) == 0.6


def test_depth_midpoint_is_linear():
    f = small_field()
    assert speed_at(f, 5.0, 0.0) == pytest.approx(0.7, abs=1e-15)


def test_constant_field_everywhere():
    f = CurrentField(np.array([0.0, 100.0]), np.array([0.0, 10.0]),
                     np.full((2, 2), 0.42))
    rng = np.random.default_rng(1)
    for _ in range(20):
        z, t = rng.uniform(0, 100), rng.uniform(0, 10)
        assert speed_at(f, z, t) == pytest.approx(0.42, abs=1e-15)


def test_interpolation_bounded_by_neighbors():
    rng = np.random.default_rng(4)
    f = CurrentField(np.arange(0.0, 60.0, 10.0), np.arange(0.0, 5.0),
                     rng.uniform(0.0, 2.0, size=(5, 6)))
    for _ in range(200):
        z, t = rng.uniform(0, 50), rng.uniform(0, 4)
        iz = min(int(z // 10), 4)
        it = min(int(t), 3)
        corners = f.speeds[it:it + 2, iz:iz + 2]
        v = speed_at(f, z, t)
        assert corners.min() - 1e-12 <= v <= corners.max() + 1e-12


def test_out_of_coverage_queries():
    f = small_field()
    with pytest.raises(CoverageError):
        speed_at(f, 25.0, 1.0)
    with pytest.raises(CoverageError):
        speed_at(f, 10.0, 2.5)


def test_validation_rejects_bad_grids():
    with pytest.raises(ConfigError, match="ascending"):
        CurrentField(np.array([10.0, 0.0]), np.array([0.0, 1.0]),
                     np.zeros((2, 2)))
    with pytest.raises(ConfigError, match="uniform"):
        CurrentField(np.array([0.0, 10.0]), np.array([0.0, 1.0, 3.0]),
                     np.zeros((3, 2)))
    with pytest.raises(ConfigError, match=">= 0"):
        CurrentField(np.array([0.0, 10.0]), np.array([0.0, 1.0]),
                     np.array([[0.1, -0.2], [0.1, 0.2]]))
    with pytest.raises(ConfigError, match="shape"):
        CurrentField(np.array([0.0, 10.0]), np.array([0.0, 1.0]),
                     np.zeros((3, 2)))


def test_synthesize_deterministic():
    a = synthesize(42)
    b = synthesize(42)
    assert np.array_equal(a.speeds, b.speeds)
    assert np.array_equal(a.depth_bins, b.depth_bins)
    assert not np.array_equal(a.speeds, synthesize(43).speeds)


def test_synthesize_default_grid():
    f = synthesize(0)
    assert f.depth_bins[0] == 0.0 and f.depth_bins[-1] == 400.0
    assert np.all(np.diff(f.depth_bins) == 5.0)
    assert np.all(np.diff(f.time_stamps) == 1.0)


def test_synthesize_time_invariant_degenerate():
    f = synthesize(3, SynthesisSpec(amplitude=0.0, noise_std=0.0))
    assert np.all(f.speeds == f.speeds[0][None, :])


def test_synthesize_mean_at_top_of_operating_band():
    f = synthesize(0)
    at_50 = [speed_at(f, 50.0, t) for t in f.time_stamps]
    assert 0.5 <= np.mean(at_50) <= 0.9


def test_synthesize_shear_nonincreasing_with_depth():
    f = synthesize(11)
    assert np.all(np.diff(f.speeds, axis=1) <= 0.0)


def test_synthesize_rejects_bad_spec():
    with pytest.raises(ConfigError):
        SynthesisSpec(mean=-0.1)
    with pytest.raises(ConfigError):
        SynthesisSpec(depth_stop=0.0)


def test_csv_round_trip(tmp_path):
    f = synthesize(9, SynthesisSpec(duration_hours=24.0))
    path = tmp_path / "field.csv"
    save_csv(f, path)
    g = load_csv(path)
    assert np.array_equal(f.depth_bins, g.depth_bins)
    assert np.array_equal(f.time_stamps, g.time_stamps)
    assert np.array_equal(f.speeds, g.speeds)


def test_csv_rejects_shuffled_depth_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time_h,10.0,0.0\n0.0,0.5,0.6\n1.0,0.5,0.6\n")
    with pytest.raises(ConfigError, match="ascending"):
        load_csv(path)


def test_csv_rejects_ragged_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time_h,0.0,10.0\n0.0,0.5\n")
    with pytest.raises(ConfigError, match=":2:"):
        load_csv(path)


def test_csv_rejects_negative_speed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time_h,0.0,10.0\n0.0,0.5,-0.1\n1.0,0.5,0.1\n")
    with pytest.raises(ConfigError, match=">= 0"):
        load_csv(path)


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("hour,0.0,10.0\n0.0,0.5,0.5\n")
    with pytest.raises(ConfigError, match="header"):
        load_csv(path)


def test_profiler_style_layout_accepted(tmp_path):
    # 5 m bins over 0..400 m with hourly stamps, the shape measured
    # profiler data arrives in.
    f = synthesize(2, SynthesisSpec(duration_hours=48.0))
    path = tmp_path / "adcp.csv"
    save_csv(f, path)
    g = load_csv(path)
    assert g.depth_bins.size == 81
    assert np.all(np.diff(g.depth_bins) == 5.0)
