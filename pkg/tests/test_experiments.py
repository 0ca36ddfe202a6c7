"""Training runs, sweeps, closed-loop logs, metrics, and CSV round trips."""

import numpy as np
import pytest

from koopesc.experiments import (
    MAP_HEADER,
    RUNLOG_HEADER,
    Metrics,
    RunLog,
    TrainingConfig,
    UndefinedMetricError,
    compute_metrics,
    convexity_score,
    format_metrics,
    load_runlog,
    load_static_map,
    map_minimum,
    run_closed_loop,
    save_metrics_csv,
    save_runlog,
    save_static_map,
    smooth_map,
    static_map,
    train,
)
from koopesc.plant import InterferenceParams, PlantParams, SimulationDivergence
from koopesc.signal import DetectorConfig, RelayConfig

PLANT = PlantParams()
INTERF = InterferenceParams()
SMALL_TRAIN = TrainingConfig(n_trajectories=3, traj_duration=2.0, seed=0)


# ---------------------------------------------------------------------------
# training


def test_training_config_validation():
    with pytest.raises(ValueError):
        TrainingConfig(n_trajectories=0)
    with pytest.raises(ValueError):
        TrainingConfig(traj_duration=0.0)
    with pytest.raises(ValueError):
        TrainingConfig(theta_range=(5.0, -5.0))
    with pytest.raises(ValueError):
        TrainingConfig(x_init_range=(9.0, 3.0))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_train_small_is_deterministic():
    m1 = train(SMALL_TRAIN, PLANT, INTERF)
    m2 = train(SMALL_TRAIN, PLANT, INTERF)
    np.testing.assert_array_equal(m1.k_matrix, m2.k_matrix)
    np.testing.assert_array_equal(m1.eigenvalues, m2.eigenvalues)
    np.testing.assert_array_equal(m1.energies, m2.energies)
    assert m1.dominant_indices == m2.dominant_indices


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_train_seed_changes_model():
    m1 = train(SMALL_TRAIN, PLANT, INTERF)
    m2 = train(
        TrainingConfig(n_trajectories=3, traj_duration=2.0, seed=1), PLANT, INTERF
    )
    assert np.abs(m1.k_matrix - m2.k_matrix).max() > 0.0


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_train_sees_interference():
    m_on = train(SMALL_TRAIN, PLANT, INTERF)
    m_off = train(SMALL_TRAIN, PLANT, InterferenceParams(enabled=False))
    assert np.linalg.norm(m_on.k_matrix - m_off.k_matrix) > 0.0


# ---------------------------------------------------------------------------
# static map


def test_static_map_shapes_and_ramp():
    th, r = static_map(
        PLANT, INTERF, None, "raw",
        sweep_duration=30.0, log_start=2.0,
    )
    assert th.shape == r.shape
    assert th[0] <= 2.0 and th[-1] >= -5.0  # ramp from 2 down toward -5
    assert np.all(np.diff(th) < 0)  # strictly decreasing
    assert np.all(r >= 0.0)


def test_static_map_duration_validation():
    with pytest.raises(ValueError):
        static_map(PLANT, INTERF, None, "raw", sweep_duration=0.0)
    with pytest.raises(ValueError):
        static_map(
            PLANT, INTERF, None, "raw", sweep_duration=10.0, log_start=50.0
        )


def test_static_map_lifted_requires_model():
    with pytest.raises(ValueError):
        static_map(PLANT, INTERF, None, "lifted", sweep_duration=10.0)


def test_static_map_divergence_attaches_partial():
    coarse = PlantParams(dt=1.0)
    det = DetectorConfig(dt=1.0)
    with pytest.raises(SimulationDivergence) as info:
        static_map(
            coarse, INTERF, None, "raw",
            sweep_duration=2000.0, log_start=2.0, det=det,
        )
    th, r = info.value.partial_map
    assert th.shape == r.shape
    assert np.all(np.isfinite(r))


# ---------------------------------------------------------------------------
# closed loop


def test_run_duration_validation():
    relay = RelayConfig(step_k=PLANT.dt / 15.0)
    with pytest.raises(ValueError):
        run_closed_loop(PLANT, INTERF, None, "raw", relay, duration=0.0)


def test_run_frozen_controller_holds_theta():
    relay = RelayConfig(step_k=0.0)
    log = run_closed_loop(
        PLANT, INTERF, None, "raw", relay, duration=10.0, log_start=1.0
    )
    np.testing.assert_array_equal(log.theta, np.full(len(log), 2.0))


def test_run_log_invariants():
    relay = RelayConfig(step_k=PLANT.dt / 15.0)
    log = run_closed_loop(
        PLANT, INTERF, None, "raw", relay, duration=40.0, log_start=1.0
    )
    dt = PLANT.dt
    assert np.all(np.diff(log.t) > 0)
    np.testing.assert_allclose(np.diff(log.t), dt, rtol=1e-9)
    for col in log.columns().values():
        assert np.all(np.isfinite(col))
    assert set(np.unique(log.epsilon)) <= {-1.0, 1.0}
    assert np.all((log.theta >= -5.0) & (log.theta <= 5.0))
    assert np.all(log.r >= 0.0)
    # log window starts at the requested offset
    assert log.t[0] == pytest.approx(1.0, abs=1e-12)


def test_run_divergence_attaches_partial():
    coarse = PlantParams(dt=1.0)
    det = DetectorConfig(dt=1.0)
    relay = RelayConfig(step_k=coarse.dt / 15.0)
    with pytest.raises(SimulationDivergence) as info:
        run_closed_loop(
            coarse, INTERF, None, "raw", relay, det_cfg=det,
            duration=2000.0, log_start=1.0,
        )
    assert len(info.value.partial_log) >= 1


# ---------------------------------------------------------------------------
# metrics


def _make_log(t, theta, r):
    n = len(t)
    zeros = np.zeros(n)
    return RunLog(
        t=np.asarray(t, float),
        x_true=zeros, y_true=zeros, x_meas=zeros, y_meas=zeros,
        y_out=zeros, r=np.asarray(r, float),
        theta=np.asarray(theta, float),
        epsilon=np.ones(n), log_start=float(t[0]),
    )


def test_metrics_on_target_from_start():
    t = np.linspace(100.0, 110.0, 201)
    log = _make_log(t, np.full_like(t, -3.0), np.linspace(1.0, 0.0, 201))
    m = compute_metrics(log, theta_star=-3.0, r_star=0.0)
    assert m.iae == 0.0
    assert m.ise == 0.0
    assert m.t_hit == 100.0  # absolute time of the first logged sample
    assert m.t_hit_offset == 0.0


def test_metrics_constant_unit_error():
    t = np.linspace(0.0, 10.0, 401)
    log = _make_log(t, np.full_like(t, -2.0), np.linspace(1.0, 0.0, 401))
    m = compute_metrics(log, theta_star=-3.0, r_star=0.0)
    assert m.iae == pytest.approx(10.0, rel=1e-12)
    assert m.ise == pytest.approx(10.0, rel=1e-12)
    assert m.t_hit is None
    assert m.t_hit_offset is None


def test_metrics_ramp_oracle():
    # theta falls linearly from -1 to -3 over [0, 10]: err(t) = 2 - 0.2 t,
    # IAE = 10 exactly, ISE = 40/3; the trapezoid is exact for IAE (piecewise
    # linear) and second-order for ISE, hence the fine grid
    h = 1e-4
    t = np.arange(0.0, 10.0 + h / 2, h)
    theta = -1.0 - 0.2 * t
    log = _make_log(t, theta, np.linspace(1.0, 0.0, t.shape[0]))
    m = compute_metrics(log, theta_star=-3.0, r_star=0.0)
    assert m.iae == pytest.approx(10.0, rel=1e-12)
    assert m.ise == pytest.approx(40.0 / 3.0, rel=1e-9)
    # the hit happens when err < 0.25, i.e. t > 8.75
    assert m.t_hit == pytest.approx(8.75, abs=2 * h)


def test_metrics_tail_mean():
    t = np.linspace(0.0, 10.0, 1000)
    r = np.linspace(1.0, 0.0, 1000)
    log = _make_log(t, np.full_like(t, -3.0), r)
    m = compute_metrics(log, theta_star=-3.0, r_star=0.0)
    n_tail = max(1, round(0.30 * 1000))
    expected = abs(r[-n_tail:].mean() - 0.0) / (r.max() - r.min())
    assert m.e_ss == pytest.approx(expected, rel=1e-12)


def test_metrics_constant_r_undefined():
    t = np.linspace(0.0, 10.0, 100)
    log = _make_log(t, np.full_like(t, -3.0), np.ones(100))
    with pytest.raises(UndefinedMetricError):
        compute_metrics(log, theta_star=-3.0, r_star=1.0)


def test_metrics_short_log_rejected():
    log = _make_log([0.0], [0.0], [0.0])
    with pytest.raises(ValueError):
        compute_metrics(log, theta_star=-3.0, r_star=0.0)


# ---------------------------------------------------------------------------
# map scoring


def test_smooth_map_window_validation():
    r = np.ones(100)
    with pytest.raises(ValueError):
        smooth_map(r, smoothing_window=0)
    with pytest.raises(ValueError):
        smooth_map(r, smoothing_window=4)
    with pytest.raises(ValueError):
        smooth_map(np.ones(10), smoothing_window=51)


def test_smooth_map_preserves_constants():
    out = smooth_map(np.full(100, 3.0), smoothing_window=11)
    assert out.shape == (90,)
    np.testing.assert_allclose(out, 3.0, rtol=1e-12)


def test_convexity_zero_for_parabola():
    theta = np.linspace(-5.0, 2.0, 500)
    r = (theta + 3.0) ** 2
    assert convexity_score(theta, r) == 0.0


def test_convexity_zero_for_monotone():
    theta = np.linspace(-5.0, 2.0, 500)
    assert convexity_score(theta, np.exp(theta)) == 0.0


def test_convexity_positive_for_noise():
    rng = np.random.default_rng(17)
    theta = np.linspace(-5.0, 2.0, 2000)
    r = (theta + 3.0) ** 2 + 5.0 * rng.normal(size=2000)
    assert convexity_score(theta, r) > 0.0


def test_map_minimum_locates_parabola_vertex():
    theta = np.linspace(-5.0, 2.0, 1401)  # 0.005 spacing
    r = (theta + 3.0) ** 2
    th_min, r_min = map_minimum(theta, r, smoothing_window=51)
    assert th_min == pytest.approx(-3.0, abs=0.01)
    assert r_min < 0.01


# ---------------------------------------------------------------------------
# CSV persistence


def test_runlog_round_trip(tmp_path):
    relay = RelayConfig(step_k=PLANT.dt / 15.0)
    log = run_closed_loop(
        PLANT, INTERF, None, "raw", relay, duration=5.0, log_start=1.0
    )
    path = tmp_path / "run.csv"
    save_runlog(log, path)
    first = path.read_text().splitlines()[0]
    assert first == RUNLOG_HEADER
    back = load_runlog(path)
    assert len(back) == len(log)
    for name, col in log.columns().items():
        # 12 significant digits on the way out
        np.testing.assert_allclose(
            back.columns()[name], col, rtol=1e-11, atol=1e-300, err_msg=name
        )


def test_load_runlog_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        load_runlog(path)


def test_static_map_round_trip(tmp_path):
    th, r = static_map(
        PLANT, INTERF, None, "raw", sweep_duration=30.0, log_start=2.0
    )
    path = tmp_path / "map.csv"
    save_static_map(th, r, path)
    assert path.read_text().splitlines()[0] == MAP_HEADER
    th2, r2 = load_static_map(path)
    np.testing.assert_allclose(th2, th, rtol=1e-11)
    np.testing.assert_allclose(r2, r, rtol=1e-11, atol=1e-300)


def test_load_static_map_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError):
        load_static_map(path)


def test_format_metrics_fields():
    m = Metrics(iae=1.5, ise=2.25, t_hit=130.0, e_ss=0.01, t_start=100.0)
    text = format_metrics(m)
    lines = dict(ln.split("=") for ln in text.strip().splitlines())
    assert float(lines["iae"]) == 1.5
    assert float(lines["ise"]) == 2.25
    assert float(lines["t_hit"]) == 130.0
    assert float(lines["t_hit_offset"]) == 30.0
    assert float(lines["e_ss"]) == 0.01


def test_format_metrics_not_reached():
    m = Metrics(iae=1.0, ise=1.0, t_hit=None, e_ss=0.5, t_start=100.0)
    text = format_metrics(m)
    assert "t_hit=not_reached" in text


def test_save_metrics_csv(tmp_path):
    m = Metrics(iae=1.5, ise=2.25, t_hit=None, e_ss=0.01, t_start=100.0)
    path = tmp_path / "m.metrics.csv"
    save_metrics_csv(m, path)
    text = path.read_text()
    assert "iae" in text and "not_reached" in text
