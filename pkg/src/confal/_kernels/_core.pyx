# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; semantics documented in ``_fallback.py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def until_profile(left, right, Py_ssize_t lo, Py_ssize_t hi):
    cdef const double[::1] l = np.ascontiguousarray(left, dtype=np.float64)
    cdef const double[::1] r = np.ascontiguousarray(right, dtype=np.float64)
    cdef Py_ssize_t n = l.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, last
    cdef double best, run, c
    for i in range(n):
        best = -INFINITY
        run = INFINITY
        if hi < 0 or i + hi > n - 1:
            last = n - 1
        else:
            last = i + hi
        j = i
        while j <= last:
            if j - i >= lo:
                c = r[j] if r[j] < run else run
                if c > best:
                    best = c
            if l[j] < run:
                run = l[j]
            j += 1
        out[i] = best
    return out_arr


def eventually_profile(right, Py_ssize_t lo, Py_ssize_t hi):
    cdef const double[::1] r = np.ascontiguousarray(right, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, last
    cdef double best
    for i in range(n):
        best = -INFINITY
        if hi < 0 or i + hi > n - 1:
            last = n - 1
        else:
            last = i + hi
        j = i + lo
        while j <= last:
            if r[j] > best:
                best = r[j]
            j += 1
        out[i] = best
    return out_arr


def simulate_at(throttle, brake, double step, double mass, ratios,
                double c_throttle, double c_brake, double c_drag,
                double rpm_factor, double up_rpm, double down_rpm,
                Py_ssize_t dwell_steps):
    cdef const double[::1] thr = np.ascontiguousarray(throttle, dtype=np.float64)
    cdef const double[::1] brk = np.ascontiguousarray(brake, dtype=np.float64)
    cdef const double[::1] g_of = np.ascontiguousarray(ratios, dtype=np.float64)
    cdef Py_ssize_t n = thr.shape[0]
    cdef Py_ssize_t top = g_of.shape[0]
    speed_arr = np.empty(n, dtype=np.float64)
    rpm_arr = np.empty(n, dtype=np.float64)
    gear_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] speed = speed_arr
    cdef double[::1] rpm = rpm_arr
    cdef double[::1] gear_out = gear_arr
    cdef double v = 0.0, g, acc, rr
    cdef Py_ssize_t gear = 1, since = dwell_steps, i
    for i in range(n):
        g = g_of[gear - 1]
        speed[i] = v
        rpm[i] = rpm_factor * v * g
        gear_out[i] = gear
        acc = (c_throttle * thr[i] * g - c_brake * brk[i] - c_drag * v) / mass
        v = v + step * acc
        if v < 0.0:
            v = 0.0
        since += 1
        if since >= dwell_steps:
            rr = rpm_factor * v * g
            if rr > up_rpm and gear < top:
                gear += 1
                since = 0
            elif rr < down_rpm and gear > 1:
                gear -= 1
                since = 0
    return speed_arr, rpm_arr, gear_arr


def simulate_tracker(ref, double step, double pos0, double stiffness, double damping):
    cdef const double[::1] rf = np.ascontiguousarray(ref, dtype=np.float64)
    cdef Py_ssize_t n = rf.shape[0], i
    pos_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] pos_out = pos_arr
    cdef double pos = pos0, vel = 0.0, acc
    for i in range(n):
        pos_out[i] = pos
        acc = stiffness * (rf[i] - pos) - damping * vel
        pos = pos + step * vel
        vel = vel + step * acc
    return pos_arr
