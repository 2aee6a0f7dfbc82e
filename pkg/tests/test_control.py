import numpy as np
import pytest

from gesturebot import control as ct


def run_stream(events, config=None):
    """Feed (event, now) pairs through the state machine, collecting emissions."""
    config = config or ct.ControllerConfig()
    state = ct.ControllerState()
    out = []
    for event, now in events:
        out.append(ct.update(state, event, now, config))
    return state, out


class TestGestureMap:
    def test_default_table(self):
        cfg = ct.ControllerConfig()
        assert ct.map_gesture(0, cfg) == ct.CommandIntent("gripper", gripper="close")
        assert ct.map_gesture(1, cfg) == ct.CommandIntent("gripper", gripper="open")
        assert ct.map_gesture(2, cfg) == ct.CommandIntent("jog", "z", 1)
        assert ct.map_gesture(3, cfg) == ct.CommandIntent("jog", "z", -1)
        assert ct.map_gesture(7, cfg) == ct.CommandIntent("jog", "x", 1)

    def test_total_over_labels(self):
        cfg = ct.ControllerConfig()
        for label in range(8):
            assert ct.map_gesture(label, cfg).kind in ("jog", "gripper", "none")

    def test_remap_overrides_default(self):
        table = ct.parse_gesture_map("2 = jog x -\n")
        cfg = ct.ControllerConfig(gesture_map=table)
        assert ct.map_gesture(2, cfg) == ct.CommandIntent("jog", "x", -1)
        assert ct.map_gesture(3, cfg) == ct.CommandIntent("jog", "z", -1)  # untouched

    def test_parse_errors_name_lines(self):
        with pytest.raises(ct.ControlError, match="line 2"):
            ct.parse_gesture_map("0 = gripper close\nnot a mapping\n")
        with pytest.raises(ct.ControlError, match="line 1"):
            ct.parse_gesture_map("9 = jog x +\n")
        with pytest.raises(ct.ControlError, match="line 1"):
            ct.parse_gesture_map("1 = jog w +\n")


class TestDebounce:
    def test_three_consecutive_activates(self):
        events = [((2, 0.9), t) for t in (0, 33, 66)]
        state, out = run_stream(events)
        assert out[0] is None and out[1] is None
        assert out[2] is not None
        np.testing.assert_allclose(out[2].linear_velocity, (0, 0, 0.05))
        assert state.active == ct.CommandIntent("jog", "z", 1)

    def test_low_confidence_counts_as_no_gesture(self):
        events = [((2, 0.5), t) for t in (0, 33, 66, 99)]
        state, out = run_stream(events)
        assert all(cmd is None for cmd in out)
        assert state.active == ct.NONE_INTENT

    def test_alternating_labels_never_activate(self):
        events = [((2 if i % 2 == 0 else 3, 0.9), i * 33) for i in range(12)]
        state, out = run_stream(events)
        assert all(cmd is None for cmd in out)

    def test_continuous_emission_while_held(self):
        events = [((2, 0.9), i * 33) for i in range(10)]
        _, out = run_stream(events)
        jogs = [c for c in out if c is not None]
        assert len(jogs) == 8  # every tick after activation
        assert all(c.linear_velocity == (0, 0, 0.05) for c in jogs)

    def test_gripper_emits_single_action(self):
        events = [((0, 0.9), i * 33) for i in range(6)]
        _, out = run_stream(events)
        actions = [c for c in out if c is not None]
        assert len(actions) == 1
        assert actions[0].gripper_action == "close"
        assert actions[0].linear_velocity == (0, 0, 0)


class TestTimeout:
    def test_single_stop_after_silence(self):
        cfg = ct.ControllerConfig()
        state = ct.ControllerState()
        for t in (0, 33, 66):
            ct.update(state, (2, 0.9), t, cfg)
        assert state.active.kind == "jog"
        # silence via idle ticks: jog keeps emitting until the timeout fires
        cmds = [ct.idle(state, 66 + 10 * k, cfg) for k in range(1, 60)]
        stops = [c for c in cmds if c is not None and c.is_stop]
        assert len(stops) == 1
        assert state.active == ct.NONE_INTENT
        # no further stops
        assert all(ct.idle(state, 1000 + k, cfg) is None for k in range(10))

    def test_observed_no_gesture_also_times_out(self):
        cfg = ct.ControllerConfig(gesture_timeout_ms=100)
        state = ct.ControllerState()
        for t in (0, 33, 66):
            ct.update(state, (2, 0.9), t, cfg)
        cmd = ct.update(state, None, 200, cfg)
        assert cmd is not None and cmd.is_stop

    def test_time_regression_rejected(self):
        cfg = ct.ControllerConfig()
        state = ct.ControllerState()
        ct.update(state, (2, 0.9), 100, cfg)
        with pytest.raises(ct.ControlError):
            ct.update(state, (2, 0.9), 50, cfg)

    def test_determinism(self):
        events = [((2, 0.9), i * 33) for i in range(5)] + [(None, 600)]
        _, out_a = run_stream(events)
        _, out_b = run_stream(events)
        assert out_a == out_b


class TestJointClamp:
    def test_shoulder_lift_lower(self):
        q = np.array([0.0, -200.0, 0.0, 0.0, 0.0, 0.0])
        out, clamped = ct.clamp_joint_targets(q, ct.SafetyEnvelope())
        assert out[1] == -183.0 and clamped

    def test_interior_untouched(self):
        q = np.array([0.0, -100.0, 0.0, 0.0, 0.0, 0.0])
        out, clamped = ct.clamp_joint_targets(q, ct.SafetyEnvelope())
        assert out[1] == -100.0 and not clamped

    def test_shoulder_lift_upper(self):
        q = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        out, clamped = ct.clamp_joint_targets(q, ct.SafetyEnvelope())
        assert out[1] == -13.0 and clamped


class TestSpeedScale:
    def test_single_fast_joint_scaled_to_cap(self):
        qdot = np.array([1.0, 0, 0, 0, 0, 0])
        out = ct.scale_joint_speed(qdot, ct.SafetyEnvelope())
        assert out[0] == pytest.approx(0.2 * np.pi, abs=1e-5)
        assert out[0] == pytest.approx(0.62832, abs=1e-5)

    def test_within_cap_unchanged(self):
        qdot = np.full(6, 0.1)
        assert np.array_equal(ct.scale_joint_speed(qdot, ct.SafetyEnvelope()), qdot)

    def test_zero_vector(self):
        assert np.array_equal(ct.scale_joint_speed(np.zeros(6), ct.SafetyEnvelope()), np.zeros(6))

    def test_direction_preserved(self, rng):
        qdot = rng.normal(size=6) * 5
        out = ct.scale_joint_speed(qdot, ct.SafetyEnvelope())
        ratios = out / qdot
        np.testing.assert_allclose(ratios, ratios[0])


class TestPayload:
    def test_half_kilo_accepted(self):
        assert ct.check_payload(0.5, ct.SafetyEnvelope()).accepted

    def test_boundary_inclusive(self):
        assert ct.check_payload(1.0, ct.SafetyEnvelope()).accepted

    def test_over_cap_rejected(self):
        verdict = ct.check_payload(1.2, ct.SafetyEnvelope())
        assert not verdict.accepted and verdict.reasons == ["payload"]

    def test_negative_mass(self):
        with pytest.raises(ct.ControlError):
            ct.check_payload(-0.1, ct.SafetyEnvelope())


class TestValidateJog:
    def _resolver(self, qdot):
        return lambda q, v: np.asarray(qdot, dtype=float)

    def test_payload_rejection_stops_everything(self):
        cmd = ct.JogCommand((0, 0, 0.05))
        verdict, qdot = ct.validate_jog(
            cmd, np.zeros(6), 2.0, ct.SafetyEnvelope(), self._resolver(np.ones(6)), 0.01
        )
        assert not verdict.accepted and verdict.reasons == ["payload"]
        assert np.array_equal(qdot, np.zeros(6))

    def test_joint_limit_lookahead_zeroes_motion(self):
        # shoulder lift sitting at -182.9 deg, pushed outward
        q = np.radians([0, -182.9, 0, 0, 0, 0])
        qdot_req = np.array([0.0, -0.5, 0.0, 0, 0, 0])
        cmd = ct.JogCommand((0, 0, -0.05))
        verdict, qdot = ct.validate_jog(
            cmd, q, 0.0, ct.SafetyEnvelope(), self._resolver(qdot_req), 0.01
        )
        # one-step Euler oracle: q + qdot*dt crosses -183 deg
        assert np.degrees(q[1] + qdot_req[1] * 0.01) < -183.0
        assert verdict.accepted and "joint_limit" in verdict.reasons
        assert qdot[1] == 0.0

    def test_benign_jog_passes_through(self):
        q = np.radians([0, -90, 90, -90, -90, 0])
        qdot_req = np.full(6, 0.05)
        cmd = ct.JogCommand((0, 0, 0.05))
        verdict, qdot = ct.validate_jog(
            cmd, q, 0.5, ct.SafetyEnvelope(), self._resolver(qdot_req), 0.01
        )
        assert verdict.accepted and not verdict.clamped and verdict.reasons == []
        np.testing.assert_allclose(qdot, qdot_req)

    def test_speed_limit_flagged(self):
        q = np.radians([0, -90, 90, -90, -90, 0])
        cmd = ct.JogCommand((0, 0, 0.05))
        verdict, qdot = ct.validate_jog(
            cmd, q, 0.0, ct.SafetyEnvelope(), self._resolver(np.full(6, 2.0)), 0.01
        )
        assert "speed_limit" in verdict.reasons
        assert np.max(np.abs(qdot)) <= 0.2 * np.pi + 1e-12
