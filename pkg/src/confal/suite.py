"""Bundled specification/constraint formulas and the benchmark suite built on them.

Thresholds were re-derived for the surrogate dynamics so that every
specification is falsifiable within the default search space.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional

from .errors import ConfigError
from .harness import ExperimentConfig, TrialRecord, aggregate, run_experiment
from .stl import Formula, parse


def bundled_names() -> List[str]:
    root = resources.files("confal") / "specs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".stl"))


def bundled_text(name: str) -> str:
    stem = name[:-4] if name.endswith(".stl") else name
    path = resources.files("confal") / "specs" / f"{stem}.stl"
    if not path.is_file():
        raise ConfigError(f"no bundled formula {name!r}; available: {', '.join(bundled_names())}")
    return path.read_text()


def load_formula(arg: str) -> Formula:
    """Resolve ``arg`` as a file path, then a bundled formula name, then inline text."""
    p = Path(arg)
    if p.is_file():
        return parse(p.read_text())
    stem = arg[:-4] if arg.endswith(".stl") else arg
    if stem in bundled_names():
        return parse(bundled_text(stem))
    if arg.endswith(".stl"):
        raise ConfigError(f"formula file {arg!r} not found")
    return parse(arg)


@dataclass(frozen=True)
class Benchmark:
    name: str
    model: str
    spec: str
    constraint: str
    horizon: float = 30.0

    def config(self, method: str, **overrides) -> ExperimentConfig:
        kw = dict(horizon=self.horizon)
        kw.update(overrides)
        return ExperimentConfig(
            self.model, parse(bundled_text(self.spec)), parse(bundled_text(self.constraint)),
            method=method, **kw,
        )


SUITE = (
    Benchmark("at1/at_con1_tol", "at_surrogate", "at1", "at_con1_tol"),
    Benchmark("at2/at_con2", "at_surrogate", "at2", "at_con2"),
    Benchmark("at4/at_con4", "at_surrogate", "at4", "at_con4"),
    Benchmark("at12/at_con3", "at_surrogate", "at12", "at_con3"),
    Benchmark("nn1/nn_con2", "tracker_surrogate", "nn1", "nn_con2", horizon=20.0),
)


def run_suite(methods=("ba", "ce", "lm", "lmsf"), reps: int = 10, seed: int = 0,
              max_sims: int = 300, out_dir: Optional[Path] = None,
              benchmarks=SUITE) -> Dict[tuple, List[TrialRecord]]:
    """Run every benchmark under every method; return records keyed by ``(bench, method)``."""
    results = {}
    for bench in benchmarks:
        for method in methods:
            cfg = bench.config(method, reps=reps, seed=seed, max_sims=max_sims)
            out = None
            if out_dir is not None:
                out = Path(out_dir) / f"{bench.name.replace('/', '__')}__{method}.csv"
            results[(bench.name, method)] = run_experiment(cfg, out)
    return results


def summary_lines(results: Dict[tuple, List[TrialRecord]]) -> List[str]:
    return [f"{bench:<18} {method:<5} {aggregate(recs)}" for (bench, method), recs in results.items()]
