"""Hot-kernel backend selection.

The compiled Cython core is used when it was built; otherwise the numpy
fallback is loaded.  Set ``CONFAL_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback as fallback

core = None
if os.environ.get("CONFAL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as core
    except ImportError:  # extension not built
        core = None

active = core if core is not None else fallback
BACKEND = "cython" if core is not None else "python"

until_profile = active.until_profile
eventually_profile = active.eventually_profile
simulate_at = active.simulate_at
simulate_tracker = active.simulate_tracker

__all__ = [
    "BACKEND",
    "core",
    "fallback",
    "until_profile",
    "eventually_profile",
    "simulate_at",
    "simulate_tracker",
]
