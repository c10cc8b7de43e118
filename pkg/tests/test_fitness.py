import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from confal import Signal
from confal.errors import ConfigError
from confal.fitness import (
    PenaltyConfig,
    Verdict,
    _scaled_max,
    constraint_term,
    estimate_rmax,
    fitness_ba,
    fitness_ce,
    gcf_fal,
    gcf_fal_sf,
    make_fitness,
    spec_term,
    success_predicate,
    t1,
    t2,
    verify_witness,
)
from confal.models import CountingModel, SystemModel, builtin
from confal.param import ChannelSpace, SearchSpace, decode
from confal.stl import FALSE, TRUE, parse


class Toy(SystemModel):
    """Output ``y`` copies input ``b``; with psi = a < 0 and phi = y > 0 this
    makes f1 = a and f2 = b."""

    name = "toy"
    inputs = ("a", "b")
    outputs = ("y",)
    bounds = {"a": (-10.0, 10.0), "b": (-10.0, 10.0)}

    def _simulate(self, u):
        return Signal(["y"], u.step, u.column("b"))


SP = SearchSpace((ChannelSpace("a", -10, 10, 1), ChannelSpace("b", -10, 10, 1)), horizon=1.0, step=0.1)
PSI = parse("a < 0")
PHI = parse("y > 0")
CFG = PenaltyConfig(base=10, rmax_psi=1.0, rmax_phi=4.0)


def test_t1_examples():
    assert t1(-1, 4) == 0
    assert t1(2, 4) == 0.5
    assert t1(8, 4) == 1
    assert t1(math.inf, 4) == 1 and t1(-math.inf, 4) == 0


def test_t2_examples():
    assert t2(-0.001, 4, 1e-6) == 0
    assert t2(0, 4, 1e-6) == 1e-6
    assert t2(2, 4, 1e-6) == 0.5
    assert t2(1e-12, 4, 1e-6) == 1e-6  # tiny positive never ranks below zero


@given(st.floats(allow_nan=False), st.floats(allow_nan=False))
def test_transforms_monotone(a, b):
    lo, hi = min(a, b), max(a, b)
    assert t1(lo, 3.0) <= t1(hi, 3.0)
    assert t2(lo, 3.0, 1e-6) <= t2(hi, 3.0, 1e-6)
    assert 0 <= t1(a, 3.0) <= 1 and 0 <= t2(a, 3.0, 1e-6) <= 1


def test_penalty_config_validation():
    for kw in ({"base": 1.0}, {"rmax_psi": 0.0}, {"epsilon": 1.0}, {"epsilon": 0.0}):
        with pytest.raises(ConfigError):
            PenaltyConfig(**kw)


def test_ba_examples():
    m = builtin("at_surrogate")
    sp = SearchSpace.for_model(m)
    x = np.zeros(sp.dim)  # no throttle: speed stays 0
    assert fitness_ba(sp, x, m, parse("G[0,30](speed < 120)")).value == 120
    assert fitness_ba(sp, x, m, FALSE).value == -math.inf


def test_ce_examples():
    out = fitness_ce(SP, [-3.0, -1.0], Toy(), PHI, PSI)
    assert out.value == -1.0 and out.simulated
    assert fitness_ce(SP, [2.0, -5.0], Toy(), PHI, PSI).value >= 2


def test_gcf_examples():
    out = gcf_fal(SP, [-0.3, 2.0], Toy(), PHI, PSI, CFG)
    assert out.value == pytest.approx(4.5)
    out = gcf_fal(SP, [0.23, 2.0], Toy(), PHI, PSI, CFG)
    assert out.value == pytest.approx(34.5)
    assert out.simulated


def test_gcf_sf_examples():
    m = CountingModel(Toy())
    out = gcf_fal_sf(SP, [0.23, 2.0], m, PHI, PSI, CFG)
    assert out.value == 30 and not out.simulated and out.spec_rob is None
    assert m.count == 0
    out = gcf_fal_sf(SP, [-0.3, 2.0], m, PHI, PSI, CFG)
    assert out.value == pytest.approx(4.5) and out.simulated
    out = gcf_fal_sf(SP, [0.0, 2.0], m, PHI, PSI, CFG)  # f1 = 0 takes the simulating branch
    assert out.simulated and m.count == 2


def test_zero_gcf_implies_verified_witness():
    out = gcf_fal(SP, [-1.0, -2.0], Toy(), PHI, PSI, CFG)
    assert out.value == 0
    assert success_predicate("lm")(out)
    assert verify_witness(decode(SP, [-1.0, -2.0]), Toy(), PHI, PSI).verdict is Verdict.VERIFIED


def test_success_predicate_excludes_boundary():
    # f1 == 0: psi holds only with zero margin, so no verified witness
    out = gcf_fal(SP, [0.0, -2.0], Toy(), PHI, PSI, CFG)
    assert out.value == 0 and not success_predicate("lm")(out)


@given(st.sampled_from([5.0, 10.0, 100.0, 1000.0]),
       st.floats(1e-300, 1e12), st.floats(-1e12, 0.0),
       st.floats(allow_nan=False), st.floats(allow_nan=False))
def test_lexicographic_dominance(base, f1_bad, f1_ok, f2_bad, f2_ok):
    cfg = PenaltyConfig(base=base, rmax_psi=2.0, rmax_phi=3.0)
    infeasible = constraint_term(f1_bad, cfg) + spec_term(f2_bad, cfg)
    feasible = constraint_term(f1_ok, cfg) + spec_term(f2_ok, cfg)
    assert constraint_term(f1_bad, cfg) >= base
    assert feasible <= base - 1 < base <= infeasible


def test_quantization_levels():
    cfg = PenaltyConfig(base=10, rmax_psi=1.0)
    seen = {constraint_term(r, cfg) for r in np.linspace(1e-9, 2.0, 5000)}
    assert seen == {10.0 * k for k in range(1, 10)}
    assert constraint_term(-1.0, cfg) == 0


def test_estimate_rmax():
    assert _scaled_max([2.0, 5.0, 3.0], 1.5) == 7.5
    assert _scaled_max([-1.0, 0.0], 1.5) == 1.0
    assert _scaled_max([math.inf, 2.0], 1.0) == 2.0
    rng = np.random.default_rng(0)
    m = CountingModel(Toy())
    rpsi, rphi = estimate_rmax(SP, m, PHI, TRUE, n=7, factor=1.5, rng=rng)
    assert rpsi == 1.0  # !true is -inf everywhere
    assert rphi > 0 and m.count == 7
    one = estimate_rmax(SP, Toy(), PHI, PSI, n=1, factor=1.0, rng=np.random.default_rng(4))
    x = np.random.default_rng(4).uniform(SP.lower, SP.upper)
    assert one == (x[0] if x[0] > 0 else 1.0, x[1] if x[1] > 0 else 1.0)
    with pytest.raises(ConfigError):
        estimate_rmax(SP, Toy(), PHI, PSI, n=0)


def test_verify_witness_verdicts():
    u_ok = Signal(["a", "b"], 0.1, np.tile([-1.0, -2.0], (10, 1)))
    u_bad = Signal(["a", "b"], 0.1, np.tile([1.0, -2.0], (10, 1)))
    u_safe = Signal(["a", "b"], 0.1, np.tile([-1.0, 2.0], (10, 1)))
    assert verify_witness(u_ok, Toy(), PHI, PSI).verified
    assert verify_witness(u_bad, Toy(), PHI, PSI).verdict is Verdict.INFEASIBLE
    assert verify_witness(u_safe, Toy(), PHI, PSI).verdict is Verdict.NOT_FALSIFYING


def test_make_fitness_dispatch():
    with pytest.raises(ConfigError):
        make_fitness("lm", SP, Toy(), PHI, PSI)
    with pytest.raises(ConfigError):
        make_fitness("nope", SP, Toy(), PHI, PSI, CFG)
    f = make_fitness("lmsf", SP, Toy(), PHI, PSI, CFG)
    assert f(np.array([-0.3, 2.0])).value == pytest.approx(4.5)
