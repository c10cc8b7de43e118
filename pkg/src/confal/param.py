"""Search space: a box of decision variables decoded into piecewise-constant inputs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import ConfigError, DimensionMismatch, OutOfBounds
from .signal import Signal, grid_index


@dataclass(frozen=True)
class ChannelSpace:
    name: str
    lower: float
    upper: float
    k: int = 5


@dataclass(frozen=True)
class SearchSpace:
    """Hyperrectangle over ``sum(k_i)`` control points, channel by channel.

    Channel ``i`` is split into ``k_i`` equal segments of ``horizon / k_i``
    seconds, each held at one decision variable.
    """

    channels: Tuple[ChannelSpace, ...]
    horizon: float = 30.0
    step: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        if not self.channels:
            raise ConfigError("search space needs at least one channel")
        n = grid_index(self.horizon, self.step)
        if n <= 0:
            raise ConfigError("horizon must be positive")
        for ch in self.channels:
            if not ch.lower <= ch.upper:
                raise ConfigError(f"{ch.name}: lower bound {ch.lower} exceeds upper {ch.upper}")
            if ch.k < 1 or n % ch.k:
                raise ConfigError(
                    f"{ch.name}: {n} samples cannot be split into {ch.k} equal segments"
                )

    @classmethod
    def for_model(cls, model, k: int = 5, horizon: float = 30.0, step: float = 0.1) -> "SearchSpace":
        return cls(tuple(ChannelSpace(c, *model.bounds[c], k) for c in model.inputs), horizon, step)

    @property
    def n_samples(self) -> int:
        return grid_index(self.horizon, self.step)

    @property
    def dim(self) -> int:
        return sum(ch.k for ch in self.channels)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(ch.name for ch in self.channels)

    @property
    def lower(self) -> np.ndarray:
        return np.concatenate([np.full(ch.k, ch.lower, dtype=float) for ch in self.channels])

    @property
    def upper(self) -> np.ndarray:
        return np.concatenate([np.full(ch.k, ch.upper, dtype=float) for ch in self.channels])

    @classmethod
    def from_text(cls, text: str, horizon: float = 30.0, step: float = 0.1) -> "SearchSpace":
        """Parse one ``name, min, max, k`` line per channel; ``#`` starts a comment."""
        chans = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 4:
                raise ConfigError(f"line {lineno}: expected 'name, min, max, k', got {line!r}")
            try:
                chans.append(ChannelSpace(parts[0], float(parts[1]), float(parts[2]), int(parts[3])))
            except ValueError:
                raise ConfigError(f"line {lineno}: bad number in {line!r}") from None
        return cls(tuple(chans), horizon, step)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and bool(np.all(x >= self.lower) and np.all(x <= self.upper))


def decode(sp: SearchSpace, x) -> Signal:
    x = np.asarray(x, dtype=float)
    if x.shape != (sp.dim,):
        raise DimensionMismatch(f"expected a vector of length {sp.dim}, got shape {x.shape}")
    if not sp.contains(x):
        raise OutOfBounds(f"decision vector leaves the search space: {x}")
    n = sp.n_samples
    cols = []
    pos = 0
    for ch in sp.channels:
        seg = n // ch.k
        cols.append(np.repeat(x[pos:pos + ch.k], seg))
        pos += ch.k
    return Signal(sp.names, sp.step, np.column_stack(cols))


def encode(sp: SearchSpace, u: Signal) -> np.ndarray:
    """Read the segment values back out of a decoded signal."""
    n = sp.n_samples
    parts = []
    for ch in sp.channels:
        seg = n // ch.k
        parts.append(u.column(ch.name)[::seg][: ch.k])
    return np.concatenate(parts)


def sample_uniform(sp: SearchSpace, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(sp.lower, sp.upper)


def clamp(sp: SearchSpace, x: Sequence[float]) -> np.ndarray:
    return np.clip(np.asarray(x, dtype=float), sp.lower, sp.upper)
