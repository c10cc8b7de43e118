"""Budgeted black-box minimisers over a :class:`SearchSpace`.

``minimize_cmaes`` is a (mu/mu_w, lambda)-CMA-ES with the default strategy
parameters, run in coordinates normalised to the unit box; proposals are
projected onto the box before evaluation.  ``minimize_random`` draws i.i.d.
uniform points.  Both stop as soon as ``stop_when`` accepts an evaluation or
the budget runs out, and both are deterministic given the seed.

The objective may return a plain float or an object with ``value`` and
``simulated`` attributes (a :class:`~confal.fitness.FitnessOutcome`); only the
latter consumes simulation budget.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .param import SearchSpace, decode, sample_uniform

INF = math.inf


@dataclass(frozen=True)
class Budget:
    max_evaluations: float = INF
    max_simulations: float = INF
    timeout: float = INF

    def __post_init__(self):
        if all(math.isinf(v) for v in (self.max_evaluations, self.max_simulations, self.timeout)):
            raise ConfigError("budget needs at least one finite bound")


@dataclass
class RunResult:
    best_vector: Optional[np.ndarray]
    best_fitness: float
    evaluations_used: int
    simulations_used: int
    elapsed: float
    falsified: bool
    best_outcome: Any = None
    witness: Any = None
    history: List[Tuple[int, float]] = field(default_factory=list)


def _default_stop(out) -> bool:
    return getattr(out, "value", out) < 0


class _Tracker:
    """Evaluates candidates, enforces the budget and keeps the incumbent."""

    def __init__(self, f, budget: Budget, stop_when, on_eval):
        self.f = f
        self.budget = budget
        self.stop_when = stop_when or _default_stop
        self.on_eval = on_eval
        self.evals = 0
        self.sims = 0
        self.best_x = None
        self.best_value = INF
        self.best_outcome = None
        self.history: List[Tuple[int, float]] = []
        self.success = False
        self.t0 = time.perf_counter()

    def exhausted(self) -> bool:
        b = self.budget
        return (
            self.success
            or self.evals >= b.max_evaluations
            or self.sims >= b.max_simulations
            or time.perf_counter() - self.t0 >= b.timeout
        )

    def __call__(self, x: np.ndarray) -> float:
        out = self.f(x)
        value = float(getattr(out, "value", out))
        if math.isnan(value):
            raise ValueError(f"objective returned NaN at {x}")
        self.evals += 1
        self.sims += int(bool(getattr(out, "simulated", False)))
        if self.on_eval is not None:
            self.on_eval(x, out)
        if self.best_x is None or value < self.best_value:
            self.best_x, self.best_value, self.best_outcome = x.copy(), value, out
            self.history.append((self.evals, value))
        if self.stop_when(out):
            self.success = True
            self.best_x, self.best_value, self.best_outcome = x.copy(), value, out
        return value

    def result(self, sp: SearchSpace) -> RunResult:
        witness = decode(sp, self.best_x) if self.success else None
        return RunResult(
            best_vector=self.best_x,
            best_fitness=self.best_value,
            evaluations_used=self.evals,
            simulations_used=self.sims,
            elapsed=time.perf_counter() - self.t0,
            falsified=self.success,
            best_outcome=self.best_outcome,
            witness=witness,
            history=self.history,
        )


def minimize_random(f: Callable, sp: SearchSpace, budget: Budget, seed: int,
                    stop_when: Callable | None = None, on_eval: Callable | None = None) -> RunResult:
    rng = np.random.default_rng(seed)
    track = _Tracker(f, budget, stop_when, on_eval)
    while not track.exhausted():
        track(sample_uniform(sp, rng))
    return track.result(sp)


@dataclass(frozen=True)
class CMAOptions:
    sigma0_frac: float = 0.3
    popsize: Optional[int] = None
    restarts: bool = False  # IPOP-style: double popsize on stagnation
    tolx: float = 1e-12


class _CMAState:
    def __init__(self, d: int, mean: np.ndarray, sigma: float, popsize: Optional[int]):
        self.d = d
        self.lam = popsize or 4 + int(math.floor(3 * math.log(d)))
        self.mu = self.lam // 2
        w = math.log(self.mu + 0.5) - np.log(np.arange(1, self.mu + 1))
        self.weights = w / w.sum()
        self.mueff = 1.0 / float(np.sum(self.weights ** 2))
        mueff = self.mueff
        self.cc = (4 + mueff / d) / (d + 4 + 2 * mueff / d)
        self.cs = (mueff + 2) / (d + mueff + 5)
        self.c1 = 2 / ((d + 1.3) ** 2 + mueff)
        self.cmu = min(1 - self.c1, 2 * (mueff - 2 + 1 / mueff) / ((d + 2) ** 2 + mueff))
        self.damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (d + 1)) - 1) + self.cs
        self.chi_n = math.sqrt(d) * (1 - 1 / (4 * d) + 1 / (21 * d * d))
        self.mean = mean
        self.sigma = sigma
        self.pc = np.zeros(d)
        self.ps = np.zeros(d)
        self.C = np.eye(d)
        self.B = np.eye(d)
        self.D = np.ones(d)
        self.gen = 0

    def ask(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal((self.lam, self.d))
        return self.mean + self.sigma * (z * self.D) @ self.B.T

    def tell(self, xs: np.ndarray, values: np.ndarray):
        d = self.d
        self.gen += 1
        order = np.argsort(values, kind="stable")
        sel = xs[order[: self.mu]]
        old = self.mean
        self.mean = self.weights @ sel
        y = (self.mean - old) / self.sigma
        inv_sqrt_c = self.B @ np.diag(1 / self.D) @ self.B.T
        self.ps = (1 - self.cs) * self.ps + math.sqrt(self.cs * (2 - self.cs) * self.mueff) * (inv_sqrt_c @ y)
        ps_norm = float(np.linalg.norm(self.ps))
        hsig = ps_norm / math.sqrt(1 - (1 - self.cs) ** (2 * self.gen)) / self.chi_n < 1.4 + 2 / (d + 1)
        self.pc = (1 - self.cc) * self.pc + hsig * math.sqrt(self.cc * (2 - self.cc) * self.mueff) * y
        art = (sel - old) / self.sigma
        rank_mu = (art.T * self.weights) @ art
        c1a = self.c1 * (1 - (1 - hsig) * self.cc * (2 - self.cc))
        self.C = (1 - c1a - self.cmu) * self.C + self.c1 * np.outer(self.pc, self.pc) + self.cmu * rank_mu
        self.sigma *= math.exp((self.cs / self.damps) * (ps_norm / self.chi_n - 1))
        self.C = np.triu(self.C) + np.triu(self.C, 1).T
        eigvals, self.B = np.linalg.eigh(self.C)
        self.D = np.sqrt(np.maximum(eigvals, 1e-300))

    def stagnated(self, tolx: float) -> bool:
        return self.sigma * float(self.D.max()) < tolx or not math.isfinite(self.sigma)


def minimize_cmaes(f: Callable, sp: SearchSpace, budget: Budget, seed: int,
                   opts: CMAOptions | None = None, stop_when: Callable | None = None,
                   on_eval: Callable | None = None) -> RunResult:
    opts = opts or CMAOptions()
    rng = np.random.default_rng(seed)
    lower, upper = sp.lower, sp.upper
    span = upper - lower
    d = sp.dim
    track = _Tracker(f, budget, stop_when, on_eval)

    def to_box(z):
        return np.clip(lower + z * span, lower, upper)

    popsize = opts.popsize
    state = _CMAState(d, rng.uniform(0.0, 1.0, d), opts.sigma0_frac, popsize)
    while not track.exhausted():
        zs = np.clip(state.ask(rng), 0.0, 1.0)
        values = []
        for z in zs:
            if track.exhausted():
                break
            values.append(track(to_box(z)))
        if len(values) < len(zs):
            break
        state.tell(zs, np.asarray(values))
        if opts.restarts and state.stagnated(opts.tolx):
            popsize = 2 * state.lam
            state = _CMAState(d, rng.uniform(0.0, 1.0, d), opts.sigma0_frac, popsize)
    return track.result(sp)


def minimize(name: str, f: Callable, sp: SearchSpace, budget: Budget, seed: int, **kw) -> RunResult:
    if name == "cmaes":
        return minimize_cmaes(f, sp, budget, seed, **kw)
    if name == "random":
        kw.pop("opts", None)
        return minimize_random(f, sp, budget, seed, **kw)
    raise ConfigError(f"unknown optimizer {name!r}; choose cmaes or random")
