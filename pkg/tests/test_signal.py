"""Cost maps, the offset-rejecting detector, and the relay tuner."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koopesc.signal import (
    DetectorConfig,
    DetectorState,
    RelayConfig,
    RelayState,
    detector_step,
    initial_detector_state,
    initial_relay_state,
    raw_cost,
    relay_step,
)

DT = 0.005


# ---------------------------------------------------------------------------
# raw cost


def test_raw_cost_examples():
    assert raw_cost(0.0, 0.0) == 0.0
    assert raw_cost(3.0, 4.0) == 5.0 / math.sqrt(2.0)
    assert raw_cost(-3.0, 4.0) == 5.0 / math.sqrt(2.0)
    assert raw_cost(1.0, 1.0) == pytest.approx(1.0, rel=1e-15)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
@settings(max_examples=100, deadline=None)
def test_raw_cost_nonnegative_and_symmetric(x, y):
    r = raw_cost(x, y)
    assert r >= 0.0
    assert raw_cost(-x, -y) == r
    assert raw_cost(y, x) == r


# ---------------------------------------------------------------------------
# detector config


def test_detector_config_defaults():
    cfg = DetectorConfig(dt=DT)
    assert cfg.w_hp == 1.0
    assert cfg.w_lp == 0.2
    assert cfg.alpha_hp == math.exp(-1.0 * DT)
    assert cfg.alpha_lp == math.exp(-0.2 * DT)


def test_detector_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(dt=0.0)
    with pytest.raises(ValueError):
        DetectorConfig(dt=DT, w_hp=0.0)
    with pytest.raises(ValueError):
        DetectorConfig(dt=DT, w_lp=-1.0)


def test_detector_hand_recursion():
    # pick rates so the smoothing factors are exactly 0.9 and 0.99 at dt=1
    cfg = DetectorConfig(dt=1.0, w_hp=-math.log(0.9), w_lp=-math.log(0.99))
    assert cfg.alpha_hp == pytest.approx(0.9, abs=1e-15)
    assert cfg.alpha_lp == pytest.approx(0.99, abs=1e-15)
    st0 = initial_detector_state()
    r1, st1 = detector_step(2.0, st0, cfg)
    assert r1 == 0.0  # first sample seeds the differencer
    r2, st2 = detector_step(5.0, st1, cfg)
    a, b = 0.9, 0.99
    y_hp = a * 0.0 + (1 - a) * (5.0 - 2.0)
    y_lp = b * 0.0 + (1 - b) * y_hp * y_hp
    assert st2.y_hp_prev == pytest.approx(y_hp, abs=1e-15)
    assert r2 == pytest.approx(y_lp, abs=1e-15)


def test_detector_constant_stream_stays_zero():
    cfg = DetectorConfig(dt=DT)
    st0 = initial_detector_state()
    r, stt = detector_step(3.7, st0, cfg)
    assert r == 0.0
    for _ in range(500):
        r, stt = detector_step(3.7, stt, cfg)
        assert r == 0.0


def test_detector_geometric_decay_from_excited_state():
    # with the input frozen, y_hp decays by alpha_hp and the squared term
    # vanishes, so r contracts exactly by alpha_lp once y_hp has died out
    cfg = DetectorConfig(dt=DT)
    stt = DetectorState(
        y_hp_prev=0.0, y_lp_prev=1.0, y_out_prev=2.0, initialized=True
    )
    r, st2 = detector_step(2.0, stt, cfg)
    assert r == cfg.alpha_lp * 1.0
    r2, _ = detector_step(2.0, st2, cfg)
    assert r2 == cfg.alpha_lp * r


def test_detector_dc_offset_near_invariance():
    # a constant shift of the whole input stream passes through the
    # differencer unchanged up to floating point cancellation
    cfg = DetectorConfig(dt=DT)
    sig = [math.sin(0.3 * k) for k in range(400)]
    out_a, out_b = [], []
    sa, sb = initial_detector_state(), initial_detector_state()
    for v in sig:
        ra, sa = detector_step(v, sa, cfg)
        rb, sb = detector_step(v + 50.0, sb, cfg)
        out_a.append(ra)
        out_b.append(rb)
    for ra, rb in zip(out_a, out_b):
        assert rb == pytest.approx(ra, abs=1e-10)


def test_detector_rectifies_negative():
    # y_lp cannot go negative from a fresh state (square input), so the
    # clamp only matters for adversarial states; feed one directly
    cfg = DetectorConfig(dt=DT)
    stt = DetectorState(
        y_hp_prev=0.0, y_lp_prev=-5.0, y_out_prev=0.0, initialized=True
    )
    r, _ = detector_step(0.0, stt, cfg)
    assert r == 0.0


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=60))
@settings(max_examples=100, deadline=None)
def test_detector_output_nonnegative(stream):
    cfg = DetectorConfig(dt=DT)
    stt = initial_detector_state()
    for v in stream:
        r, stt = detector_step(v, stt, cfg)
        assert r >= 0.0


# ---------------------------------------------------------------------------
# relay config and state


def test_relay_config_defaults():
    cfg = RelayConfig(step_k=DT / 15.0)
    assert cfg.dwell_limit == 15.0
    assert cfg.tau_f == 10.0
    assert cfg.theta_min == -5.0
    assert cfg.theta_max == 5.0
    assert cfg.theta_init == 2.0
    assert cfg.epsilon_init == 1


def test_relay_config_validation():
    with pytest.raises(ValueError):
        RelayConfig(step_k=-1e-9)
    RelayConfig(step_k=0.0)  # frozen controller is legal
    RelayConfig(step_k=0.1, dwell_limit=0.0)  # no-dwell is legal too
    with pytest.raises(ValueError):
        RelayConfig(step_k=0.1, dwell_limit=-1.0)
    with pytest.raises(ValueError):
        RelayConfig(step_k=0.1, tau_f=0.0)
    with pytest.raises(ValueError):
        RelayConfig(step_k=0.1, tau_f=-1.0)
    with pytest.raises(ValueError):
        RelayConfig(step_k=0.1, theta_min=5.0, theta_max=-5.0)
    with pytest.raises(ValueError):
        RelayConfig(step_k=0.1, epsilon_init=0)


def test_initial_relay_state():
    cfg = RelayConfig(step_k=0.1)
    stt = initial_relay_state(cfg)
    assert stt.theta == 2.0
    assert stt.epsilon == 1
    assert stt.dwell_elapsed == cfg.dwell_limit  # dwell starts expired
    assert not stt.initialized


def test_relay_first_call_never_flips():
    # the first sample seeds r_prev, so the filtered derivative is zero
    cfg = RelayConfig(step_k=0.1)
    stt = initial_relay_state(cfg)
    st1 = relay_step(1e9, stt, cfg, DT)
    assert st1.epsilon == 1
    assert st1.theta == pytest.approx(2.0 - 0.1 * 1, rel=1e-15)


def test_relay_decreasing_cost_no_flip():
    cfg = RelayConfig(step_k=0.1)
    stt = initial_relay_state(cfg)
    for r in (5.0, 4.0, 3.0, 2.0):
        stt = relay_step(r, stt, cfg, DT)
    assert stt.epsilon == 1
    assert stt.theta == pytest.approx(2.0 - 0.1 * 4, rel=1e-14)


def test_relay_rising_cost_flips_after_dwell():
    cfg = RelayConfig(step_k=0.0, dwell_limit=1.0)
    stt = initial_relay_state(cfg)  # dwell already expired
    stt = relay_step(1.0, stt, cfg, 0.5)  # seeds r_prev
    st2 = relay_step(2.0, stt, cfg, 0.5)  # rising: hp > 0, dwell ok
    assert st2.epsilon == -1
    assert st2.dwell_elapsed == 0.0


def test_relay_dwell_blocks_flip_but_theta_moves():
    cfg = RelayConfig(step_k=0.1, dwell_limit=100.0)
    stt = RelayState(
        theta=2.0, epsilon=1, hp_prev=0.0, r_prev=0.0,
        dwell_elapsed=0.0, initialized=True,
    )
    st1 = relay_step(10.0, stt, cfg, DT)  # hp > 0 but dwell far from limit
    assert st1.epsilon == 1
    assert st1.theta == pytest.approx(2.0 - 0.1, rel=1e-15)
    assert st1.dwell_elapsed == DT


def test_relay_flip_resets_dwell_no_increment():
    cfg = RelayConfig(step_k=0.0, dwell_limit=2.0)
    stt = RelayState(
        theta=2.0, epsilon=1, hp_prev=0.0, r_prev=0.0,
        dwell_elapsed=5.0, initialized=True,
    )
    st1 = relay_step(3.0, stt, cfg, 1.0)
    assert st1.epsilon == -1
    assert st1.dwell_elapsed == 0.0  # reset, not 0 + dt


def test_relay_clamps_at_bounds():
    cfg = RelayConfig(step_k=1.0, dwell_limit=1e9)
    stt = RelayState(
        theta=-4.5, epsilon=1, hp_prev=0.0, r_prev=0.0,
        dwell_elapsed=0.0, initialized=True,
    )
    st1 = relay_step(0.0, stt, cfg, DT)
    assert st1.theta == -5.0  # clamped at the floor
    stt = RelayState(
        theta=4.5, epsilon=-1, hp_prev=0.0, r_prev=0.0,
        dwell_elapsed=0.0, initialized=True,
    )
    st1 = relay_step(0.0, stt, cfg, DT)
    assert st1.theta == 5.0


def test_relay_filter_coefficient():
    # hp = a*hp_prev + (1-a)*(r - r_prev) with a = exp(-dt/tau_f)
    cfg = RelayConfig(step_k=0.0, tau_f=10.0, dwell_limit=1e9)
    stt = RelayState(
        theta=2.0, epsilon=1, hp_prev=0.25, r_prev=1.0,
        dwell_elapsed=0.0, initialized=True,
    )
    st1 = relay_step(4.0, stt, cfg, DT)
    a = math.exp(-DT / 10.0)
    assert st1.hp_prev == pytest.approx(a * 0.25 + (1 - a) * 3.0, abs=1e-15)
    assert st1.r_prev == 4.0


def test_relay_positive_scale_invariance():
    # flip decisions depend only on the sign of the filtered derivative,
    # so scaling the whole cost stream must reproduce the same theta path
    cfg = RelayConfig(step_k=0.02, dwell_limit=2.0)
    stream = [
        abs(math.sin(0.37 * k)) + 0.3 * math.sin(1.7 * k) for k in range(400)
    ]
    paths = []
    for scale in (1.0, 2.0, 3.7, 0.25):
        stt = initial_relay_state(cfg)
        path = []
        for r in stream:
            stt = relay_step(scale * r, stt, cfg, 0.5)
            path.append((stt.theta, stt.epsilon))
        paths.append(path)
    for other in paths[1:]:
        assert other == paths[0]


@given(
    st.lists(st.floats(0.0, 1e6), min_size=1, max_size=80),
    st.floats(1e-4, 0.5),
)
@settings(max_examples=100, deadline=None)
def test_relay_invariants(stream, step_k):
    cfg = RelayConfig(step_k=step_k, dwell_limit=1.0)
    stt = initial_relay_state(cfg)
    for r in stream:
        prev_theta = stt.theta
        stt = relay_step(r, stt, cfg, DT)
        assert stt.epsilon in (-1, 1)
        assert cfg.theta_min <= stt.theta <= cfg.theta_max
        assert abs(stt.theta - prev_theta) <= step_k * DT / DT + 1e-12
        # strictly inside the bounds, the move is exactly one step
        if cfg.theta_min < stt.theta < cfg.theta_max:
            assert abs(stt.theta - prev_theta) == pytest.approx(
                step_k, rel=0, abs=1e-12
            )
