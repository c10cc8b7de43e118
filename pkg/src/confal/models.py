"""Black-box system models and the built-in surrogate benchmarks.

A model maps an input :class:`Signal` to an output :class:`Signal` on the
same grid.  The surrogates are small hybrid ODEs integrated by forward
Euler at the input's step, so output row ``i`` depends only on input rows
``< i`` and causality holds bit-for-bit.  Their coefficients are toolkit
constants, not calibrated vehicle or magnet data.
"""
from __future__ import annotations

import subprocess
import threading
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from . import _kernels
from .errors import ChannelMismatch, ConfigError, InputOutOfBounds, UnknownModel
from .signal import Signal


class SystemModel:
    """Base class: subclasses implement :meth:`_simulate` on validated input."""

    name: str = "model"
    inputs: Tuple[str, ...] = ()
    outputs: Tuple[str, ...] = ()
    bounds: Dict[str, Tuple[float, float]] = {}

    def simulate(self, u: Signal) -> Signal:
        if tuple(u.channels) != tuple(self.inputs):
            raise ChannelMismatch(f"{self.name} expects inputs {list(self.inputs)}, got {list(u.channels)}")
        for ch in self.inputs:
            lo, hi = self.bounds[ch]
            col = u.column(ch)
            if col.min() < lo or col.max() > hi:
                raise InputOutOfBounds(
                    f"{ch} leaves [{lo}, {hi}] (range {col.min()}..{col.max()})"
                )
        out = self._simulate(u)
        if len(out) != len(u) or out.step != u.step:
            raise ChannelMismatch(f"{self.name} returned a signal on a different grid")
        return out

    __call__ = simulate

    def _simulate(self, u: Signal) -> Signal:
        raise NotImplementedError


class ATSurrogate(SystemModel):
    """Four-gear automatic transmission surrogate.

    ``dv/dt = (0.6*throttle*g(gear) - 0.12*brake - 0.3*v) / 50`` with speed
    floored at 0, ``rpm = 40*v*g(gear)``, upshift above 4000 rpm and
    downshift below 1200 rpm, at most one shift per second.
    """

    name = "at_surrogate"
    inputs = ("throttle", "brake")
    outputs = ("speed", "rpm", "gear")
    bounds = {"throttle": (0.0, 100.0), "brake": (0.0, 325.0)}

    mass = 50.0
    ratios = (4.0, 2.5, 1.7, 1.2)
    c_throttle = 0.6
    c_brake = 0.12
    c_drag = 0.3
    rpm_factor = 40.0
    up_rpm = 4000.0
    down_rpm = 1200.0
    dwell = 1.0

    def _simulate(self, u):
        dwell_steps = max(1, int(round(self.dwell / u.step)))
        speed, rpm, gear = _kernels.simulate_at(
            u.column("throttle"), u.column("brake"), u.step, self.mass,
            np.asarray(self.ratios), self.c_throttle, self.c_brake, self.c_drag,
            self.rpm_factor, self.up_rpm, self.down_rpm, dwell_steps,
        )
        return Signal(self.outputs, u.step, np.column_stack([speed, rpm, gear]))


class TrackerSurrogate(SystemModel):
    """Damped second-order position tracker (natural frequency 2, damping ratio 0.7)."""

    name = "tracker_surrogate"
    inputs = ("Ref",)
    outputs = ("Pos",)
    bounds = {"Ref": (1.0, 3.0)}

    pos0 = 1.0
    stiffness = 4.0
    damping = 2.8

    def _simulate(self, u):
        pos = _kernels.simulate_tracker(u.column("Ref"), u.step, self.pos0, self.stiffness, self.damping)
        return Signal(self.outputs, u.step, np.asarray(pos).reshape(-1, 1))


@dataclass
class ExternalModel(SystemModel):
    """A model implemented by an executable.

    For every simulation the command is started, the input trace is written
    to its stdin as CSV (``time,<inputs...>``) and the output trace is read
    back from its stdout in the same format.
    """

    command: Sequence[str] = ()
    inputs: Tuple[str, ...] = ()
    outputs: Tuple[str, ...] = ()
    bounds: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    name: str = "external"
    timeout: float = 60.0

    def __post_init__(self):
        self.inputs = tuple(self.inputs)
        self.outputs = tuple(self.outputs)
        if not self.command:
            raise ConfigError("external model needs a command")
        missing = set(self.inputs) - set(self.bounds)
        if missing:
            raise ConfigError(f"no bounds declared for inputs {sorted(missing)}")

    def _simulate(self, u):
        proc = subprocess.run(
            list(self.command), input=u.to_csv(), capture_output=True,
            text=True, timeout=self.timeout, check=False,
        )
        if proc.returncode != 0:
            raise RuntimeError(f"model command failed ({proc.returncode}): {proc.stderr.strip()}")
        out = Signal.from_csv_text(proc.stdout, step=u.step)
        if tuple(out.channels) != self.outputs:
            raise ChannelMismatch(f"model returned {list(out.channels)}, declared {list(self.outputs)}")
        return out


class CountingModel(SystemModel):
    """Wraps a model and counts simulate calls; safe to share between threads."""

    def __init__(self, model: SystemModel):
        self.model = model
        self.name = model.name
        self.inputs = model.inputs
        self.outputs = model.outputs
        self.bounds = model.bounds
        self._lock = threading.Lock()
        self.count = 0

    def simulate(self, u):
        with self._lock:
            self.count += 1
        return self.model.simulate(u)

    __call__ = simulate


_BUILTINS = {"at_surrogate": ATSurrogate, "tracker_surrogate": TrackerSurrogate}


def builtin(name: str) -> SystemModel:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise UnknownModel(f"unknown model {name!r}; choose from {sorted(_BUILTINS)}") from None


def builtin_names():
    return sorted(_BUILTINS)
