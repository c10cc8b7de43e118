import sys
import textwrap

import numpy as np
import pytest

from confal import Signal
from confal.errors import ChannelMismatch, ConfigError, InputOutOfBounds, UnknownModel
from confal.models import CountingModel, ExternalModel, builtin, builtin_names

from oracles import at_reference

AT = builtin("at_surrogate")
TR = builtin("tracker_surrogate")


def at_input(thr, brk, n=300):
    return Signal(["throttle", "brake"], 0.1, np.column_stack([np.broadcast_to(thr, n), np.broadcast_to(brk, n)]))


def random_at_input(rng, n):
    k = max(1, n // 30)
    thr = np.repeat(rng.uniform(0, 100, k), n // k + 1)[:n]
    brk = np.repeat(rng.uniform(0, 325, k), n // k + 1)[:n]
    return Signal(["throttle", "brake"], 0.1, np.column_stack([thr, brk]))


def test_builtin_registry():
    assert builtin_names() == ["at_surrogate", "tracker_surrogate"]
    assert AT.bounds == {"throttle": (0.0, 100.0), "brake": (0.0, 325.0)}
    assert TR.bounds == {"Ref": (1.0, 3.0)}
    with pytest.raises(UnknownModel):
        builtin("nope")


def test_full_throttle_never_downshifts():
    y = AT.simulate(at_input(100.0, 0.0))
    gear = y.column("gear")
    assert np.all(np.diff(gear) >= 0)
    assert gear[-1] == 4


def test_braking_from_rest_stays_at_rest():
    y = AT.simulate(at_input(0.0, 325.0))
    speed = y.column("speed")
    assert np.all(np.diff(speed) <= 0)
    assert speed[-1] == 0.0


def test_matches_plain_python_integration():
    rng = np.random.default_rng(3)
    for _ in range(20):
        u = random_at_input(rng, 300)
        y = AT.simulate(u)
        speed, rpm, gear = at_reference(u.column("throttle"), u.column("brake"))
        np.testing.assert_allclose(y.column("speed"), speed, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(y.column("rpm"), rpm, rtol=1e-12, atol=1e-9)
        assert y.column("gear").tolist() == gear


def test_at_invariants_on_random_inputs():
    rng = np.random.default_rng(0)
    for _ in range(50):
        y = AT.simulate(random_at_input(rng, 300))
        assert set(np.unique(y.column("gear"))) <= {1.0, 2.0, 3.0, 4.0}
        assert np.all(y.column("rpm") >= 0)
        assert np.all(y.column("speed") >= 0)


def test_deterministic_bitwise():
    u = random_at_input(np.random.default_rng(1), 300)
    a, b = AT.simulate(u), AT.simulate(u)
    assert a.values.tobytes() == b.values.tobytes()


def test_causality_on_random_pairs():
    rng = np.random.default_rng(7)
    for _ in range(100):
        u = random_at_input(rng, int(rng.integers(1, 120)))
        u2 = random_at_input(rng, int(rng.integers(1, 120)))
        whole = AT.simulate(u.concat(u2))
        assert whole.restrict(0, u.horizon) == AT.simulate(u)
    for _ in range(100):
        r = Signal(["Ref"], 0.1, rng.uniform(1, 3, int(rng.integers(1, 120))))
        r2 = Signal(["Ref"], 0.1, rng.uniform(1, 3, int(rng.integers(1, 120))))
        assert TR.simulate(r.concat(r2)).restrict(0, r.horizon) == TR.simulate(r)


def test_tracker_settles():
    y = TR.simulate(Signal(["Ref"], 0.1, np.full(200, 2.0)))
    pos = y.column("Pos")
    assert np.all(np.abs(pos[100:] - 2.0) < 0.05)
    assert pos.max() > 2.0  # underdamped: overshoots


def test_tracker_is_linear_around_rest():
    rng = np.random.default_rng(5)
    dev = rng.uniform(0, 2, 200)
    full = TR.simulate(Signal(["Ref"], 0.1, 1.0 + dev)).column("Pos") - 1.0
    half = TR.simulate(Signal(["Ref"], 0.1, 1.0 + 0.5 * dev)).column("Pos") - 1.0
    np.testing.assert_allclose(half, 0.5 * full, rtol=0, atol=1e-9)


def test_input_validation():
    with pytest.raises(InputOutOfBounds):
        AT.simulate(at_input(101.0, 0.0, n=10))
    with pytest.raises(ChannelMismatch):
        AT.simulate(Signal(["throttle"], 0.1, np.zeros(10)))


def test_counting_model_counts():
    m = CountingModel(TR)
    u = Signal(["Ref"], 0.1, np.full(10, 2.0))
    m.simulate(u)
    m(u)
    assert m.count == 2
    assert m.inputs == TR.inputs


def test_external_model_round_trip(tmp_path):
    script = tmp_path / "double.py"
    script.write_text(textwrap.dedent("""
        import csv, sys
        rows = list(csv.reader(sys.stdin))
        out = csv.writer(sys.stdout, lineterminator="\\n")
        out.writerow(["time", "y"])
        for t, r in rows[1:]:
            out.writerow([t, 2 * float(r)])
    """))
    m = ExternalModel([sys.executable, str(script)], ("r",), ("y",), {"r": (0.0, 10.0)})
    u = Signal(["r"], 0.1, np.linspace(0, 1, 11))
    y = m.simulate(u)
    assert y.channels == ("y",)
    np.testing.assert_array_equal(y.column("y"), 2 * u.column("r"))


def test_external_model_failures(tmp_path):
    with pytest.raises(ConfigError):
        ExternalModel([], ("r",), ("y",), {"r": (0, 1)})
    with pytest.raises(ConfigError):
        ExternalModel(["true"], ("r",), ("y",), {})
    bad = ExternalModel([sys.executable, "-c", "import sys; sys.exit(4)"], ("r",), ("y",), {"r": (0, 1)})
    with pytest.raises(RuntimeError):
        bad.simulate(Signal(["r"], 0.1, np.zeros(3)))
