"""STL abstract syntax.

Only the core connectives are node types: ``Atom``, ``FalseF``, ``Not``,
``And``, ``Or`` and ``Until``.  ``true``, ``implies``, ``eventually`` and
``always`` are smart constructors that desugar into the core.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

from ..errors import ConfalError
from ..signal import delta_channel_name

INF = math.inf


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float = INF

    def __post_init__(self):
        if not (self.lo >= 0 and math.isfinite(self.lo)):
            raise ConfalError(f"interval lower bound must be finite and >= 0, got {self.lo}")
        if not self.lo < self.hi:
            raise ConfalError(f"interval [{self.lo}, {self.hi}] is singular or empty")

    def __str__(self):
        hi = "inf" if self.hi == INF else f"{self.hi:g}"
        return f"[{self.lo:g},{hi}]"


@dataclass(frozen=True)
class Ref:
    """A signal reference: plain channel, ``delta[d](ch)`` or ``shift[d](ch)``."""

    channel: str
    delay: Optional[float] = None
    kind: str = "plain"  # "plain" | "delta" | "shift"

    @property
    def name(self) -> str:
        if self.kind == "delta":
            return delta_channel_name(self.channel, self.delay)
        if self.kind == "shift":
            return f"shift_{self.delay:g}_{self.channel}"
        return self.channel

    def __str__(self):
        if self.kind == "plain":
            return self.channel
        return f"{self.kind}[{self.delay:g}]({self.channel})"


@dataclass(frozen=True)
class Affine:
    """``sum(coef * ref) + const`` with terms kept in first-appearance order."""

    terms: Tuple[Tuple[Ref, float], ...] = ()
    const: float = 0.0

    def __add__(self, other: "Affine") -> "Affine":
        merged = dict(self.terms)
        for ref, c in other.terms:
            merged[ref] = merged.get(ref, 0.0) + c
        return Affine(tuple(merged.items()), self.const + other.const)

    def scale(self, k: float) -> "Affine":
        return Affine(tuple((r, c * k) for r, c in self.terms), self.const * k)

    def __neg__(self) -> "Affine":
        return self.scale(-1.0)

    def __sub__(self, other: "Affine") -> "Affine":
        return self + (-other)

    def __str__(self):
        parts = []
        for ref, c in self.terms:
            parts.append(f"{c:+g}*{ref}")
        parts.append(f"{self.const:+g}")
        return " ".join(parts)


@dataclass(frozen=True)
class Atom:
    """``expr > 0``, ``expr >= 0`` or ``expr == 0``."""

    expr: Affine
    rel: str = ">"

    def __post_init__(self):
        if self.rel not in (">", ">=", "=="):
            raise ConfalError(f"atom relation must be one of >, >=, ==; got {self.rel!r}")

    def __str__(self):
        return f"({self.expr} {self.rel} 0)"


@dataclass(frozen=True)
class FalseF:
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self):
        return f"!{self.arg}"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} && {self.right})"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} || {self.right})"


@dataclass(frozen=True)
class Until:
    interval: Interval
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} U{self.interval} {self.right})"


Formula = Union[Atom, FalseF, Not, And, Or, Until]

FALSE = FalseF()
TRUE = Not(FALSE)


def true() -> Formula:
    return TRUE


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def eventually(interval: Interval, f: Formula) -> Formula:
    return Until(interval, TRUE, f)


def always(interval: Interval, f: Formula) -> Formula:
    return Not(eventually(interval, Not(f)))


def children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    if isinstance(f, Until):
        return (f.left, f.right)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(children(node))


def refs(f: Formula) -> set:
    """All signal references appearing in atoms of ``f``."""
    out = set()
    for node in walk(f):
        if isinstance(node, Atom):
            out.update(r for r, _ in node.expr.terms)
    return out


def free_channels(f: Formula) -> dict:
    """Map each base channel used by ``f`` to the set of delays it is referenced with.

    Plain references contribute the key with no delay; ``delta[d](ch)`` and
    ``shift[d](ch)`` contribute ``d``.
    """
    out: dict = {}
    for r in refs(f):
        delays = out.setdefault(r.channel, set())
        if r.delay is not None:
            delays.add(r.delay)
    return {ch: frozenset(ds) for ch, ds in out.items()}


def delays(f: Formula) -> set:
    return {d for ds in free_channels(f).values() for d in ds}


def depth(f: Formula) -> int:
    kids = children(f)
    return 1 + max((depth(k) for k in kids), default=0)
