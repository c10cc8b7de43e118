"""Uniformly sampled, piecewise-constant multi-channel signals.

A signal with ``n`` rows and sampling period ``step`` has horizon
``T = n * step``.  Row ``i`` holds the value on ``[i*step, (i+1)*step)``;
the value at ``t = T`` is the held last row.  With this convention
concatenation is a row append and restriction is a row slice, which is
what makes model causality checkable bit-for-bit.
"""
from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ChannelCollision,
    ChannelMismatch,
    EmptyInterval,
    NotGridAligned,
    OutOfHorizon,
    SignalError,
    StepMismatch,
    UnknownChannel,
)

_ALIGN_TOL = 1e-9


def grid_index(t: float, step: float) -> int:
    """Return ``t / step`` as an int, rejecting offsets off the sampling grid."""
    k = t / step
    r = round(k)
    if abs(k - r) > _ALIGN_TOL * max(1.0, abs(k)):
        raise NotGridAligned(f"{t!r} is not a multiple of step {step!r}")
    return int(r)


def delta_channel_name(channel: str, delay: float) -> str:
    return f"delta_{delay:g}_{channel}"


class Signal:
    """Immutable multi-channel trace on a uniform grid."""

    __slots__ = ("channels", "step", "values", "_index")

    def __init__(self, channels: Sequence[str], step: float, values):
        channels = tuple(channels)
        arr = np.array(values, dtype=float, copy=True)
        if arr.ndim == 1 and len(channels) == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise SignalError("values must be a 2-D array (rows x channels)")
        if not step > 0 or not math.isfinite(step):
            raise SignalError(f"step must be positive and finite, got {step!r}")
        if arr.shape[0] == 0:
            raise SignalError("a signal needs at least one sample")
        if arr.shape[1] != len(channels):
            raise SignalError(
                f"{arr.shape[1]} value columns for {len(channels)} channels"
            )
        if len(set(channels)) != len(channels):
            raise SignalError(f"duplicate channel names in {channels}")
        if not np.all(np.isfinite(arr)):
            raise SignalError("all samples must be finite")
        arr.setflags(write=False)
        self.channels = channels
        self.step = float(step)
        self.values = arr
        self._index = {c: i for i, c in enumerate(channels)}

    @classmethod
    def from_columns(cls, step: float, **columns) -> "Signal":
        names = list(columns)
        return cls(names, step, np.column_stack([np.asarray(columns[c], float) for c in names]))

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def horizon(self) -> float:
        return len(self) * self.step

    def __eq__(self, other) -> bool:
        if not isinstance(other, Signal):
            return NotImplemented
        return (
            self.channels == other.channels
            and self.step == other.step
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )

    def __hash__(self):
        return hash((self.channels, self.step, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"Signal(channels={list(self.channels)}, step={self.step}, n={len(self)})"

    def column(self, ch: str) -> np.ndarray:
        try:
            return self.values[:, self._index[ch]]
        except KeyError:
            raise UnknownChannel(f"unknown channel {ch!r}; have {list(self.channels)}") from None

    def __contains__(self, ch: str) -> bool:
        return ch in self._index

    def value_at(self, t: float, ch: str) -> float:
        col = self.column(ch)
        if not 0 <= t <= self.horizon:
            raise OutOfHorizon(f"t={t} outside [0, {self.horizon}]")
        i = min(int(math.floor(t / self.step)), len(self) - 1)
        return float(col[i])

    def shift(self, t: float) -> "Signal":
        """The ``t``-shift ``w^t(t') = w(t + t')``; requires ``0 <= t < horizon``."""
        if not 0 <= t < self.horizon:
            raise OutOfHorizon(f"shift {t} outside [0, {self.horizon})")
        k = grid_index(t, self.step)
        if k >= len(self):
            raise OutOfHorizon(f"shift {t} outside [0, {self.horizon})")
        return Signal(self.channels, self.step, self.values[k:])

    def restrict(self, t1: float, t2: float) -> "Signal":
        if t1 == t2:
            raise EmptyInterval(f"empty restriction [{t1}, {t2}]")
        if not 0 <= t1 < t2 <= self.horizon:
            raise OutOfHorizon(f"[{t1}, {t2}] not within [0, {self.horizon}]")
        i1, i2 = grid_index(t1, self.step), grid_index(t2, self.step)
        if i1 == i2:
            raise EmptyInterval(f"[{t1}, {t2}] contains no sample")
        return Signal(self.channels, self.step, self.values[i1:i2])

    def concat(self, other: "Signal") -> "Signal":
        if self.channels != other.channels:
            raise ChannelMismatch(f"{self.channels} != {other.channels}")
        if self.step != other.step:
            raise StepMismatch(f"{self.step} != {other.step}")
        return Signal(self.channels, self.step, np.vstack([self.values, other.values]))

    def augment_delta(self, ch: str, d: float) -> "Signal":
        """Add channel ``delta_<d>_<ch>`` holding ``w(t+d) - w(t)`` (0 past ``T-d``)."""
        col = self.column(ch)
        k = grid_index(d, self.step)
        if k < 0 or d >= self.horizon:
            raise OutOfHorizon(f"delay {d} must lie in [0, {self.horizon})")
        name = delta_channel_name(ch, d)
        if name in self._index:
            return self
        n = len(self)
        idx = np.arange(n)
        diff = col[np.minimum(idx + k, n - 1)] - col
        diff[idx > n - k] = 0.0  # t > T - d: padded
        return self.with_columns({name: diff})

    def with_columns(self, columns: dict) -> "Signal":
        names = list(self.channels)
        cols = [self.values]
        for name, col in columns.items():
            names.append(name)
            cols.append(np.asarray(col, dtype=float).reshape(-1, 1))
        return Signal(names, self.step, np.hstack(cols))

    def select(self, channels: Iterable[str]) -> "Signal":
        channels = list(channels)
        return Signal(channels, self.step, np.column_stack([self.column(c) for c in channels]))

    def join(self, other: "Signal") -> "Signal":
        """Channel-wise union ``<self, other>`` of two signals on the same grid."""
        clash = set(self.channels) & set(other.channels)
        if clash:
            raise ChannelCollision(f"channels present on both sides: {sorted(clash)}")
        if self.step != other.step:
            raise StepMismatch(f"{self.step} != {other.step}")
        if len(self) != len(other):
            raise SignalError(f"length mismatch {len(self)} != {len(other)}")
        return Signal(self.channels + other.channels, self.step, np.hstack([self.values, other.values]))

    # CSV: header ``time,<ch1>,...``; one row per sample at ``i*step``.
    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", *self.channels])
        for i, row in enumerate(self.values):
            w.writerow([format(i * self.step, ".12g"), *(repr(float(v)) for v in row)])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source, step: float | None = None) -> "Signal":
        """Read a trace from a path or file object; ``step`` is required for one-row traces."""
        if hasattr(source, "read"):
            text = source.read()
        else:
            with open(source, newline="") as fh:
                text = fh.read()
        return cls.from_csv_text(text, step)

    @classmethod
    def from_csv_text(cls, text: str, step: float | None = None) -> "Signal":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if not rows or rows[0][0].strip() != "time":
            raise SignalError("CSV trace must start with a 'time' header column")
        header = [h.strip() for h in rows[0][1:]]
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
        if data.size == 0:
            raise SignalError("CSV trace has no samples")
        times = data[:, 0]
        if len(times) >= 2:
            dts = np.diff(times)
            inferred = (times[-1] - times[0]) / (len(times) - 1)
            tol = 1e-9 * max(abs(times[-1]), inferred)
            if inferred <= 0 or np.any(np.abs(dts - inferred) > tol):
                raise SignalError("CSV time stamps are not strictly increasing and uniform")
            if step is not None and abs(step - inferred) > 1e-9 * step:
                raise StepMismatch(f"declared step {step} != inferred {inferred}")
            step = step if step is not None else float(_round_step(inferred))
        elif step is None:
            raise SignalError("a one-row trace needs an explicit step")
        if abs(times[0]) > 1e-9:
            raise SignalError("CSV trace must start at time 0")
        return cls(header, step, data[:, 1:])


def _round_step(dt: float) -> float:
    # undo accumulation noise from formatted time stamps, e.g. 0.1000000000003
    return float(f"{dt:.12g}")
