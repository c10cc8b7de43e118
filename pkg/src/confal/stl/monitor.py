"""Robust and Boolean semantics on the sampling grid.

Every subformula is evaluated once into a *profile*: an array whose entry
``i`` is the robustness of the shifted signal ``w^{i*step}``.  Temporal
operators combine child profiles through the kernels in ``confal._kernels``.
Suprema and infima range over grid points of ``[0, T)``.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .. import _kernels
from ..signal import Signal, grid_index
from .syntax import TRUE, Affine, And, Atom, FalseF, Formula, Interval, Not, Or, Ref, Until

INF = math.inf


def _ref_column(s: Signal, ref: Ref) -> np.ndarray:
    name = ref.name
    if name in s:
        return s.column(name)
    if ref.kind == "delta":
        return s.augment_delta(ref.channel, ref.delay).column(name)
    if ref.kind == "shift":
        col = s.column(ref.channel)
        k = grid_index(ref.delay, s.step)
        n = len(col)
        return col[np.minimum(np.arange(n) + k, n - 1)]
    return s.column(name)  # raises UnknownChannel


def affine_values(s: Signal, expr: Affine) -> np.ndarray:
    acc = np.zeros(len(s))
    for ref, coef in expr.terms:
        acc = acc + coef * _ref_column(s, ref)
    return acc + expr.const


def interval_offsets(iv: Interval, step: float) -> tuple:
    """Grid offsets ``(lo, hi)`` of an interval; ``hi == -1`` means unbounded."""
    lo = grid_index(iv.lo, step)
    hi = -1 if iv.hi == INF else grid_index(iv.hi, step)
    return lo, hi


class _Profiler:
    def __init__(self, s: Signal):
        self.s = s
        self.n = len(s)
        self.memo: dict = {}

    def __call__(self, f: Formula) -> np.ndarray:
        key = id(f)
        hit = self.memo.get(key)
        if hit is not None:
            return hit[1]
        out = self._eval(f)
        self.memo[key] = (f, out)  # keep f alive so its id stays unique
        return out

    def _eval(self, f: Formula) -> np.ndarray:
        if isinstance(f, Atom):
            v = affine_values(self.s, f.expr)
            return -np.abs(v) if f.rel == "==" else v
        if isinstance(f, FalseF):
            return np.full(self.n, -INF)
        if isinstance(f, Not):
            return -self(f.arg)
        if isinstance(f, And):
            return np.minimum(self(f.left), self(f.right))
        if isinstance(f, Or):
            return np.maximum(self(f.left), self(f.right))
        if isinstance(f, Until):
            lo, hi = interval_offsets(f.interval, self.s.step)
            right = self(f.right)
            if f.left == TRUE:
                return _kernels.eventually_profile(right, lo, hi)
            return _kernels.until_profile(self(f.left), right, lo, hi)
        raise TypeError(f"not a formula node: {f!r}")


def robustness_profile(s: Signal, f: Formula) -> np.ndarray:
    return _Profiler(s)(f)


def robustness(s: Signal, f: Formula) -> float:
    """Robustness of ``f`` on ``s`` at time 0, in ``R u {+inf, -inf}``."""
    return float(robustness_profile(s, f)[0])


def boolean_sat(s: Signal, f: Formula) -> bool:
    """Classical Boolean satisfaction on the same grid, evaluated recursively."""
    n = len(s)
    atoms: dict = {}

    def atom_holds(a: Atom, i: int) -> bool:
        vals = atoms.get(id(a))
        if vals is None:
            vals = atoms[id(a)] = (a, affine_values(s, a.expr).tolist())
        e = vals[1][i]
        if a.rel == ">":
            return e > 0
        if a.rel == ">=":
            return e >= 0
        return e == 0

    @lru_cache(maxsize=None)
    def sat(node_id: int, i: int) -> bool:
        node = nodes[node_id]
        if isinstance(node, Atom):
            return atom_holds(node, i)
        if isinstance(node, FalseF):
            return False
        if isinstance(node, Not):
            return not sat(id(node.arg), i)
        if isinstance(node, And):
            return sat(id(node.left), i) and sat(id(node.right), i)
        if isinstance(node, Or):
            return sat(id(node.left), i) or sat(id(node.right), i)
        lo, hi = interval_offsets(node.interval, s.step)
        last = n - 1 if hi < 0 else min(i + hi, n - 1)
        for j in range(i, last + 1):
            if j - i >= lo and sat(id(node.right), j):
                return True
            if not sat(id(node.left), j):
                return False
        return False

    nodes = {}
    stack = [f]
    while stack:
        node = stack.pop()
        nodes[id(node)] = node
        if isinstance(node, Not):
            stack.append(node.arg)
        elif isinstance(node, (And, Or, Until)):
            stack.extend((node.left, node.right))
    return sat(id(f), 0)
