"""Pure-Python/numpy implementations of the hot kernels.

Each function mirrors ``_core.pyx`` operation for operation so both
backends produce bit-identical floats (no fused multiply-add, same
evaluation order).
"""
import numpy as np

INF = float("inf")


def until_profile(left, right, lo, hi):
    """Robustness of ``left U[lo,hi] right`` at every shift index.

    ``left``/``right`` are per-shift robustness arrays of length n; ``lo``
    and ``hi`` are grid offsets (``hi < 0`` means unbounded).  Entry i is
    ``max_{j in [i+lo, min(i+hi, n-1)]} min(right[j], min(left[i:j]))``
    with the empty min = +inf and the empty max = -inf.
    """
    left = np.ascontiguousarray(left, dtype=float)
    right = np.ascontiguousarray(right, dtype=float)
    n = left.shape[0]
    out = np.full(n, -INF)
    last = n - 1 if hi < 0 else min(hi, n - 1)
    runmin = np.full(n, INF)
    for k in range(last + 1):
        m = n - k
        if k >= lo:
            cand = np.minimum(right[k:], runmin[:m])
            np.maximum(out[:m], cand, out=out[:m])
        np.minimum(runmin[:m], left[k:], out=runmin[:m])
    return out


def eventually_profile(right, lo, hi):
    n = right.shape[0]
    out = np.full(n, -INF)
    last = n - 1 if hi < 0 else min(hi, n - 1)
    for k in range(lo, last + 1):
        m = n - k
        np.maximum(out[:m], right[k:], out=out[:m])
    return out


def simulate_at(throttle, brake, step, mass, ratios, c_throttle, c_brake,
                c_drag, rpm_factor, up_rpm, down_rpm, dwell_steps):
    n = len(throttle)
    speed = np.empty(n)
    rpm = np.empty(n)
    gear_out = np.empty(n)
    ratios = [float(r) for r in ratios]
    top = len(ratios)
    thr = [float(x) for x in throttle]
    brk = [float(x) for x in brake]
    v = 0.0
    gear = 1
    since = dwell_steps
    for i in range(n):
        g = ratios[gear - 1]
        speed[i] = v
        rpm[i] = rpm_factor * v * g
        gear_out[i] = gear
        acc = (c_throttle * thr[i] * g - c_brake * brk[i] - c_drag * v) / mass
        v = v + step * acc
        if v < 0.0:
            v = 0.0
        since += 1
        if since >= dwell_steps:
            r = rpm_factor * v * g
            if r > up_rpm and gear < top:
                gear += 1
                since = 0
            elif r < down_rpm and gear > 1:
                gear -= 1
                since = 0
    return speed, rpm, gear_out


def simulate_tracker(ref, step, pos0, stiffness, damping):
    n = len(ref)
    pos_out = np.empty(n)
    refs = [float(x) for x in ref]
    pos = pos0
    vel = 0.0
    for i in range(n):
        pos_out[i] = pos
        acc = stiffness * (refs[i] - pos) - damping * vel
        pos = pos + step * vel
        vel = vel + step * acc
    return pos_out
