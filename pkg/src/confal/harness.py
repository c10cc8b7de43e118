"""Experiment orchestration: repeated seeded trials, witness checks, aggregates."""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .errors import ConfalError, ConfigError, SoundnessViolation
from .fitness import (
    METHODS,
    PenaltyConfig,
    Verdict,
    estimate_rmax,
    make_fitness,
    success_predicate,
    verify_witness,
)
from .models import CountingModel, SystemModel, builtin
from .optimizer import Budget, CMAOptions, minimize
from .param import SearchSpace, decode
from .signal import grid_index
from .stl import TRUE, Formula, Until, free_channels, parse
from .stl.syntax import walk

log = logging.getLogger(__name__)

RMAX_SEED_OFFSET = 1_000_003
RESULT_COLUMNS = [
    "trial", "seed", "method", "falsified", "constraint_satisfied",
    "fitness_best", "evals", "sims", "elapsed_s", "witness_path",
]


@dataclass
class ExperimentConfig:
    model: Union[str, SystemModel]
    spec: Formula
    constraint: Optional[Formula] = None
    method: str = "lm"
    k: int = 5
    horizon: float = 30.0
    step: float = 0.1
    base: float = 10.0
    epsilon: float = 1e-6
    rmax_samples: int = 20
    rmax_factor: float = 1.5
    rmax_psi: Optional[float] = None
    rmax_phi: Optional[float] = None
    optimizer: str = "cmaes"
    sigma0_frac: float = 0.3
    popsize: Optional[int] = None
    restarts: bool = False
    max_evals: Optional[int] = None
    max_sims: Optional[int] = 300
    timeout_s: Optional[float] = None
    reps: int = 30
    seed: int = 0
    space: Optional[SearchSpace] = None

    def __post_init__(self):
        if isinstance(self.spec, str):
            self.spec = parse(self.spec)
        if isinstance(self.constraint, str):
            self.constraint = parse(self.constraint)

    @property
    def psi(self) -> Formula:
        return self.constraint if self.constraint is not None else TRUE

    def resolve_model(self) -> SystemModel:
        return builtin(self.model) if isinstance(self.model, str) else self.model

    def search_space(self, model: SystemModel) -> SearchSpace:
        if self.space is not None:
            return self.space
        return SearchSpace.for_model(model, self.k, self.horizon, self.step)

    def budget(self) -> Budget:
        max_evals = self.max_evals
        if max_evals is None and self.max_sims is not None:
            # lmsf may evaluate without simulating; keep its loop finite
            max_evals = 10 * self.max_sims
        return Budget(
            max_evaluations=math.inf if max_evals is None else max_evals,
            max_simulations=math.inf if self.max_sims is None else self.max_sims,
            timeout=math.inf if self.timeout_s is None else self.timeout_s,
        )

    def validate(self) -> tuple:
        """Check channels, delays and intervals; return ``(model, space)``."""
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        model = self.resolve_model()
        sp = self.search_space(model)
        if sp.names != tuple(model.inputs):
            raise ConfigError(f"search space channels {sp.names} != model inputs {model.inputs}")
        inputs, outputs = set(model.inputs), set(model.outputs)
        for label, f, allowed in (("constraint", self.psi, inputs), ("spec", self.spec, inputs | outputs)):
            used = free_channels(f)
            unknown = set(used) - allowed
            if unknown:
                raise ConfigError(f"{label} references unknown channels {sorted(unknown)}")
            for ch, ds in used.items():
                for d in ds:
                    _aligned(d, sp, f"{label} delay {d} on {ch}")
                    if d >= sp.horizon:
                        raise ConfigError(f"{label} delay {d} exceeds the horizon {sp.horizon}")
            for node in walk(f):
                if isinstance(node, Until):
                    _aligned(node.interval.lo, sp, f"{label} interval bound {node.interval.lo}")
                    if math.isfinite(node.interval.hi):
                        _aligned(node.interval.hi, sp, f"{label} interval bound {node.interval.hi}")
        self.budget()
        PenaltyConfig(self.base, 1.0, 1.0, self.epsilon)
        return model, sp


def _aligned(t: float, sp: SearchSpace, what: str):
    try:
        grid_index(t, sp.step)
    except ConfalError:
        raise ConfigError(f"{what} is not a multiple of step {sp.step}") from None


@dataclass
class TrialRecord:
    trial: int
    seed: int
    method: str
    falsified: bool
    constraint_satisfied: Optional[bool]
    fitness_best: float
    evals: int
    sims: int
    elapsed_s: float
    witness_path: str = ""
    rmax_psi: Optional[float] = None
    rmax_phi: Optional[float] = None
    witness: object = field(default=None, repr=False)

    def row(self) -> list:
        cs = "" if self.constraint_satisfied is None else int(self.constraint_satisfied)
        return [
            self.trial, self.seed, self.method, int(self.falsified), cs,
            repr(float(self.fitness_best)), self.evals, self.sims,
            f"{self.elapsed_s:.6f}", self.witness_path,
        ]


@dataclass
class Aggregate:
    fr: int
    reps: int
    csr_count: int
    csr_pct: Optional[float]
    mean_time_s: Optional[float]

    def to_json(self) -> dict:
        return {
            "fr": self.fr,
            "reps": self.reps,
            "csr_count": self.csr_count,
            "csr_pct": "-" if self.csr_pct is None else round(self.csr_pct, 4),
            "mean_time_s": self.mean_time_s,
        }

    def __str__(self):
        csr = "-" if self.csr_pct is None else f"{self.csr_count} ({self.csr_pct:.1f}%)"
        t = "-" if self.mean_time_s is None else f"{self.mean_time_s:.2f}s"
        return f"FR {self.fr}/{self.reps}  CSR {csr}  time {t}"


def aggregate(records: List[TrialRecord]) -> Aggregate:
    if not records:
        raise ConfigError("cannot aggregate an empty record list")
    hits = [r for r in records if r.falsified]
    csr_count = sum(1 for r in hits if r.constraint_satisfied)
    csr_pct = 100.0 * csr_count / len(hits) if hits else None
    mean_time = float(np.mean([r.elapsed_s for r in hits])) if hits else None
    return Aggregate(len(hits), len(records), csr_count, csr_pct, mean_time)


def run_trial(cfg: ExperimentConfig, trial: int, model: SystemModel, sp: SearchSpace) -> TrialRecord:
    seed = cfg.seed + trial
    t0 = time.perf_counter()
    counted = CountingModel(model)
    psi = cfg.psi
    est_evals = 0
    rmax_psi = rmax_phi = None
    penalty = None
    if cfg.method in ("lm", "lmsf"):
        rmax_psi, rmax_phi = cfg.rmax_psi, cfg.rmax_phi
        if rmax_psi is None or rmax_phi is None:
            rng = np.random.default_rng(seed + RMAX_SEED_OFFSET)
            est_psi, est_phi = estimate_rmax(sp, counted, cfg.spec, psi, cfg.rmax_samples, cfg.rmax_factor, rng)
            est_evals = cfg.rmax_samples
            rmax_psi = est_psi if rmax_psi is None else rmax_psi
            rmax_phi = est_phi if rmax_phi is None else rmax_phi
        penalty = PenaltyConfig(cfg.base, rmax_psi, rmax_phi, cfg.epsilon)

    est_sims = counted.count
    b = cfg.budget()
    budget = Budget(
        max_evaluations=b.max_evaluations,
        max_simulations=b.max_simulations - est_sims,
        timeout=b.timeout - (time.perf_counter() - t0),
    )
    fitness = make_fitness(cfg.method, sp, counted, cfg.spec, psi, penalty)
    opts = CMAOptions(sigma0_frac=cfg.sigma0_frac, popsize=cfg.popsize, restarts=cfg.restarts)
    kw = {"opts": opts} if cfg.optimizer == "cmaes" else {}
    run = minimize(cfg.optimizer, fitness, sp, budget, seed, stop_when=success_predicate(cfg.method), **kw)

    if counted.count != est_sims + run.simulations_used:
        raise SoundnessViolation(
            f"simulation accounting drifted: model saw {counted.count}, "
            f"optimizer charged {est_sims + run.simulations_used}"
        )

    witness = None
    satisfied = None
    if run.falsified:
        u = decode(sp, run.best_vector)
        check = verify_witness(u, model, cfg.spec, psi)
        if cfg.method == "ba":
            if not check.spec_rob < 0:
                raise SoundnessViolation(
                    f"trial {trial}: ba reported a falsification with spec robustness {check.spec_rob}"
                )
        elif check.verdict is not Verdict.VERIFIED:
            raise SoundnessViolation(
                f"trial {trial}: {cfg.method} witness failed re-verification ({check.verdict.value}, "
                f"constraint {check.constraint_rob}, spec {check.spec_rob})"
            )
        satisfied = check.constraint_rob > 0
        witness = u.join(model.simulate(u))

    return TrialRecord(
        trial=trial,
        seed=seed,
        method=cfg.method,
        falsified=run.falsified,
        constraint_satisfied=satisfied,
        fitness_best=run.best_fitness,
        evals=run.evaluations_used + est_evals,
        sims=counted.count,
        elapsed_s=time.perf_counter() - t0,
        rmax_psi=rmax_psi,
        rmax_phi=rmax_phi,
        witness=witness,
    )


def _run_indexed(args) -> TrialRecord:
    cfg, i, model, sp = args
    return run_trial(cfg, i, model, sp)


def run_experiment(cfg: ExperimentConfig, out: Union[str, Path, None] = None,
                   jobs: int = 1) -> List[TrialRecord]:
    """Run ``cfg.reps`` trials with seeds ``cfg.seed + i``.

    With ``out`` set, results are appended to that CSV as each trial
    finishes, every falsifying witness (joined input/output trace) is saved
    beside it, and the aggregate is written to ``<out stem>.json``.
    ``jobs > 1`` runs trials in worker processes; records are still
    written in trial order.
    """
    model, sp = cfg.validate()
    records = []
    writer = fh = None
    out_path = Path(out) if out is not None else None
    if out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        fh = open(out_path, "w", newline="")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
    pool = None
    tasks = [(cfg, i, model, sp) for i in range(cfg.reps)]
    if jobs > 1:
        pool = ProcessPoolExecutor(max_workers=jobs)
        stream = pool.map(_run_indexed, tasks)
    else:
        stream = map(_run_indexed, tasks)
    try:
        for i, rec in enumerate(stream):
            if out_path is not None and rec.witness is not None:
                name = f"{out_path.stem}_witness_{i}.csv"
                rec.witness.to_csv(out_path.parent / name)
                rec.witness_path = name
            log.info("trial %d seed %d falsified=%s sims=%d", i, rec.seed, rec.falsified, rec.sims)
            records.append(rec)
            if writer is not None:
                writer.writerow(rec.row())
                fh.flush()
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
        if fh is not None:
            fh.close()
    if out_path is not None:
        with open(out_path.with_suffix(".json"), "w") as jf:
            json.dump(aggregate(records).to_json(), jf, indent=2)
            jf.write("\n")
    return records


def with_method(cfg: ExperimentConfig, method: str) -> ExperimentConfig:
    return replace(cfg, method=method)
