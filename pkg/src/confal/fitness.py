"""Fitness functions for constrained falsification.

Four methods map a decision vector to a scalar to minimise:

``ba``
    plain specification robustness, constraint ignored;
``ce``
    robustness of ``psi -> phi`` on the joined input/output signal;
``lm``
    lexicographic global cost ``B*ceil((B-1)*T1(f1)) + (B-1)*T2(f2)`` with
    ``f1 = rob(u, !psi)`` and ``f2 = rob(M(u), phi)``;
``lmsf``
    the same cost, but inputs with ``f1 > 0`` are scored on the constraint
    term alone and never simulated.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError
from .models import CountingModel, SystemModel
from .param import SearchSpace, decode, sample_uniform
from .signal import Signal
from .stl import TRUE, Formula, Not, implies, robustness

METHODS = ("ba", "ce", "lm", "lmsf")
ROB_CLAMP = 1e9


@dataclass(frozen=True)
class PenaltyConfig:
    base: float = 10.0
    rmax_psi: float = 1.0
    rmax_phi: float = 1.0
    epsilon: float = 1e-6

    def __post_init__(self):
        if not self.base > 1:
            raise ConfigError(f"base must exceed 1, got {self.base}")
        if not (self.rmax_psi > 0 and self.rmax_phi > 0):
            raise ConfigError("rmax values must be positive")
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1)")


@dataclass(frozen=True)
class FitnessOutcome:
    value: float
    constraint_rob: float  # rob(u, !psi)
    spec_rob: Optional[float]  # rob(M(u), phi); None when simulation was skipped
    simulated: bool


def _finite(r: float) -> float:
    return min(max(r, -ROB_CLAMP), ROB_CLAMP)


def t1(r: float, rmax_psi: float) -> float:
    """Normalise constraint-violation robustness into [0, 1]."""
    r = _finite(r)
    if r < 0:
        return 0.0
    return min(r / rmax_psi, 1.0)


def t2(r: float, rmax_phi: float, eps: float) -> float:
    """Normalise specification robustness into [0, 1]; robustness 0 maps to ``eps``."""
    r = _finite(r)
    if r < 0:
        return 0.0
    if r == 0:
        return eps
    return max(eps, min(r / rmax_phi, 1.0))


def constraint_term(f1: float, cfg: PenaltyConfig) -> float:
    """``B * ceil((B-1) * T1(f1))``: one of B quantisation levels scaled by B."""
    level = math.ceil((cfg.base - 1) * t1(f1, cfg.rmax_psi))
    if f1 > 0:
        level = max(level, 1)  # guard against underflow of tiny positive f1
    return cfg.base * level


def spec_term(f2: float, cfg: PenaltyConfig) -> float:
    return (cfg.base - 1) * t2(f2, cfg.rmax_phi, cfg.epsilon)


def _spec_rob(u: Signal, y: Signal, phi: Formula) -> float:
    # phi may mention input channels as well, so monitor the joined trace
    return robustness(u.join(y), phi)


def fitness_ba(sp: SearchSpace, x, model: SystemModel, phi: Formula, psi: Formula = TRUE) -> FitnessOutcome:
    u = decode(sp, x)
    f1 = robustness(u, Not(psi))
    f2 = _spec_rob(u, model.simulate(u), phi)
    return FitnessOutcome(f2, f1, f2, True)


def fitness_ce(sp: SearchSpace, x, model: SystemModel, phi: Formula, psi: Formula = TRUE) -> FitnessOutcome:
    u = decode(sp, x)
    y = model.simulate(u)
    joined = u.join(y)
    value = robustness(joined, implies(psi, phi))
    return FitnessOutcome(value, robustness(u, Not(psi)), robustness(joined, phi), True)


def gcf_fal(sp: SearchSpace, x, model: SystemModel, phi: Formula, psi: Formula,
            cfg: PenaltyConfig) -> FitnessOutcome:
    u = decode(sp, x)
    f1 = robustness(u, Not(psi))
    f2 = _spec_rob(u, model.simulate(u), phi)
    return FitnessOutcome(constraint_term(f1, cfg) + spec_term(f2, cfg), f1, f2, True)


def gcf_fal_sf(sp: SearchSpace, x, model: SystemModel, phi: Formula, psi: Formula,
               cfg: PenaltyConfig) -> FitnessOutcome:
    u = decode(sp, x)
    f1 = robustness(u, Not(psi))
    if f1 > 0:
        return FitnessOutcome(constraint_term(f1, cfg), f1, None, False)
    f2 = _spec_rob(u, model.simulate(u), phi)
    return FitnessOutcome(spec_term(f2, cfg), f1, f2, True)


def make_fitness(method: str, sp: SearchSpace, model: SystemModel, phi: Formula,
                 psi: Formula = TRUE, cfg: PenaltyConfig | None = None) -> Callable:
    """Bind a method name to a one-argument fitness callable ``x -> FitnessOutcome``."""
    if method == "ba":
        return lambda x: fitness_ba(sp, x, model, phi, psi)
    if method == "ce":
        return lambda x: fitness_ce(sp, x, model, phi, psi)
    if cfg is None:
        raise ConfigError(f"method {method!r} needs a PenaltyConfig")
    if method == "lm":
        return lambda x: gcf_fal(sp, x, model, phi, psi, cfg)
    if method == "lmsf":
        return lambda x: gcf_fal_sf(sp, x, model, phi, psi, cfg)
    raise ConfigError(f"unknown method {method!r}; choose from {METHODS}")


def success_predicate(method: str) -> Callable[[FitnessOutcome], bool]:
    """When an optimiser may stop: negative value for ba/ce, zero cost for lm/lmsf.

    A zero lexicographic cost with ``f1 == 0`` sits exactly on the constraint
    boundary, where robustness cannot certify satisfaction, so it does not
    count as success.
    """
    if method in ("ba", "ce"):
        return lambda out: out.value < 0
    return lambda out: out.value == 0 and out.constraint_rob < 0


def estimate_rmax(sp: SearchSpace, model: SystemModel, phi: Formula, psi: Formula,
                  n: int = 20, factor: float = 1.5,
                  rng: np.random.Generator | None = None) -> tuple:
    """Estimate ``(rmax_psi, rmax_phi)`` from ``n`` uniform samples of the space.

    Each is ``factor`` times the largest finite positive robustness seen, or
    1.0 when no sample produced one.  Costs ``n`` simulations.
    """
    if n < 1:
        raise ConfigError("rmax estimation needs at least one sample")
    if factor < 1:
        raise ConfigError("rmax factor must be >= 1")
    rng = rng if rng is not None else np.random.default_rng()
    psi_vals, phi_vals = [], []
    for _ in range(n):
        u = decode(sp, sample_uniform(sp, rng))
        psi_vals.append(robustness(u, Not(psi)))
        phi_vals.append(_spec_rob(u, model.simulate(u), phi))
    return _scaled_max(psi_vals, factor), _scaled_max(phi_vals, factor)


def _scaled_max(values, factor: float) -> float:
    finite = [max(v, 0.0) for v in values if math.isfinite(v)]
    top = max(finite, default=0.0)
    return factor * top if top > 0 else 1.0


class Verdict(enum.Enum):
    VERIFIED = "verified"
    NOT_FALSIFYING = "not_falsifying"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class WitnessCheck:
    verdict: Verdict
    constraint_rob: float  # rob(u, psi)
    spec_rob: float  # rob(M(u), phi)

    @property
    def verified(self) -> bool:
        return self.verdict is Verdict.VERIFIED


def verify_witness(u: Signal, model: SystemModel, phi: Formula, psi: Formula = TRUE) -> WitnessCheck:
    """Re-check a candidate from scratch: strictly satisfies psi and strictly violates phi."""
    model = model.model if isinstance(model, CountingModel) else model
    psi_rob = robustness(u, psi)
    phi_rob = _spec_rob(u, model.simulate(u), phi)
    if not psi_rob > 0:
        return WitnessCheck(Verdict.INFEASIBLE, psi_rob, phi_rob)
    if not phi_rob < 0:
        return WitnessCheck(Verdict.NOT_FALSIFYING, psi_rob, phi_rob)
    return WitnessCheck(Verdict.VERIFIED, psi_rob, phi_rob)
