"""Windowed graded F_p vector spaces and degree-shifting linear maps.

All gradings are homological (lower); cohomological statements are
translated by negating degrees.  Every operation records the sub-window on
which its output is trustworthy, and consumers are expected to intersect
windows before drawing conclusions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .fplin import FpMatrix


@dataclass(frozen=True, order=True)
class Window:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty window [{self.lo}, {self.hi}]")

    def __contains__(self, d: int) -> bool:
        return self.lo <= d <= self.hi

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def shift(self, n: int) -> "Window":
        return Window(self.lo + n, self.hi + n)

    def negate(self) -> "Window":
        return Window(-self.hi, -self.lo)

    def shrink(self, amount: int) -> "Window":
        return Window(self.lo + amount, self.hi - amount)

    def intersect(self, other: "Window"):
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Window(lo, hi) if lo <= hi else None


class WindowedGradedSpace:
    """Graded F_p space with an ordered named basis per degree, valid on window.

    support_lo, when set, promises that the underlying object vanishes below
    that degree even outside the window (the view is complete from below);
    it is required for trustworthy tensor windows.
    """

    def __init__(self, p: int, window: Window, basis: dict[int, list[str]],
                 support_lo: int | None = None):
        self.p = p
        self.window = window
        self.support_lo = support_lo
        self.basis = {}
        for d, labels in sorted(basis.items()):
            if labels:
                if d not in window:
                    raise ValueError(f"degree {d} outside window {window}")
                if len(set(labels)) != len(labels):
                    raise ValueError(f"duplicate labels in degree {d}")
                self.basis[d] = list(labels)
        self._index = {
            d: {lab: i for i, lab in enumerate(labels)} for d, labels in self.basis.items()
        }

    def dim(self, d: int) -> int:
        return len(self.basis.get(d, ()))

    def labels(self, d: int) -> list[str]:
        return self.basis.get(d, [])

    def index_of(self, d: int, label: str) -> int:
        return self._index[d][label]

    def degrees(self) -> list[int]:
        return sorted(self.basis)

    def total_dim(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def is_zero(self) -> bool:
        return not self.basis

    def dims(self) -> dict[int, int]:
        return {d: len(v) for d, v in self.basis.items()}

    def __eq__(self, other):
        return (
            isinstance(other, WindowedGradedSpace)
            and self.p == other.p
            and self.window == other.window
            and self.basis == other.basis
        )

    def __repr__(self):
        return f"WindowedGradedSpace(p={self.p}, window={self.window}, dims={self.dims()})"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "window": [self.window.lo, self.window.hi],
            "basis": {str(d): list(labels) for d, labels in self.basis.items()},
        }

    @staticmethod
    def from_json(obj: dict) -> "WindowedGradedSpace":
        lo, hi = obj["window"]
        return WindowedGradedSpace(
            int(obj["p"]),
            Window(int(lo), int(hi)),
            {int(d): list(labels) for d, labels in obj["basis"].items()},
        )


def space_from_dims(p: int, window: Window, dims: dict[int, int], prefix: str = "e",
                    complete: bool = True) -> WindowedGradedSpace:
    basis = {d: [f"{prefix}{d}_{i}" for i in range(n)] for d, n in dims.items() if n}
    support = (min(basis) if basis else window.hi) if complete else None
    return WindowedGradedSpace(p, window, basis, support_lo=support)


def point_space(p: int, degree: int, label: str = "x") -> WindowedGradedSpace:
    return WindowedGradedSpace(p, Window(degree, degree), {degree: [label]}, support_lo=degree)


def suspend(v: WindowedGradedSpace, n: int) -> WindowedGradedSpace:
    basis = {d + n: list(labels) for d, labels in v.basis.items()}
    sup = None if v.support_lo is None else v.support_lo + n
    return WindowedGradedSpace(v.p, v.window.shift(n), basis, support_lo=sup)


def dual(v: WindowedGradedSpace) -> WindowedGradedSpace:
    basis = {-d: [f"{lab}*" for lab in labels] for d, labels in v.basis.items()}
    return WindowedGradedSpace(v.p, v.window.negate(), basis)


def direct_sum(a: WindowedGradedSpace, b: WindowedGradedSpace, tags=("L:", "R:")) -> WindowedGradedSpace:
    if a.p != b.p:
        raise ValueError("modulus mismatch")
    win = a.window.intersect(b.window)
    if win is None:
        raise ValueError("windows do not overlap")
    basis = {}
    for d in set(a.basis) | set(b.basis):
        if d not in win:
            raise ValueError(f"summand degree {d} outside common window")
        basis[d] = [tags[0] + l for l in a.labels(d)] + [tags[1] + l for l in b.labels(d)]
    sup = None
    if a.support_lo is not None and b.support_lo is not None:
        sup = min(a.support_lo, b.support_lo)
    return WindowedGradedSpace(a.p, win, basis, support_lo=sup)


def tensor(a: WindowedGradedSpace, b: WindowedGradedSpace) -> WindowedGradedSpace:
    """Graded tensor product; valid only where every contributing pair is windowed.

    Both factors must be complete from below (support_lo set, inside the
    window); the safe window is then [lo_a+lo_b, min(a.hi+sb, b.hi+sa)].
    """
    if a.p != b.p:
        raise ValueError("modulus mismatch")
    sa, sb = a.support_lo, b.support_lo
    if sa is None or sb is None:
        raise ValueError("tensor factors must be complete from below (support_lo set)")
    if sa < a.window.lo or sb < b.window.lo:
        raise ValueError("window cuts the bottom of a factor's support")
    lo = min(a.window.lo + b.window.lo, sa + sb)
    hi = min(a.window.hi + sb, b.window.hi + sa)
    if lo > hi:
        raise ValueError("tensor window is empty")
    win = Window(lo, hi)
    basis = {}
    for da, la in a.basis.items():
        for db, lb in b.basis.items():
            d = da + db
            if d in win:
                basis.setdefault(d, []).extend(f"{x}|{y}" for x in la for y in lb)
    return WindowedGradedSpace(a.p, win, basis, support_lo=sa + sb)


def dim_vector(v: WindowedGradedSpace, window: Window) -> list[tuple[int, int]]:
    if window.lo < v.window.lo or window.hi > v.window.hi:
        raise ValueError(f"requested window {window} exceeds trusted window {v.window}")
    return [(d, v.dim(d)) for d in window.degrees()]


class GradedMap:
    """Degree-d family of F_p matrices between two windowed spaces.

    blocks[n] maps the degree-n part of source to degree n+shift of target,
    columns indexed by source basis order.
    """

    def __init__(self, source: WindowedGradedSpace, target: WindowedGradedSpace, shift: int, blocks: dict[int, FpMatrix]):
        if source.p != target.p:
            raise ValueError("modulus mismatch")
        self.source = source
        self.target = target
        self.shift = shift
        self.blocks = {}
        for n, m in sorted(blocks.items()):
            if m.is_zero():
                continue
            if m.p != source.p:
                raise ValueError("block modulus mismatch")
            if m.cols != source.dim(n) or m.rows != target.dim(n + shift):
                raise ValueError(
                    f"block at degree {n} has shape {m.rows}x{m.cols}, expected "
                    f"{target.dim(n + shift)}x{source.dim(n)}"
                )
            self.blocks[n] = m

    @property
    def p(self) -> int:
        return self.source.p

    def block(self, n: int) -> FpMatrix:
        m = self.blocks.get(n)
        if m is None:
            return FpMatrix.zeros(self.p, self.target.dim(n + self.shift), self.source.dim(n))
        return m

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks.values())

    def compose(self, inner: "GradedMap") -> "GradedMap":
        """self after inner."""
        if inner.target is not self.source and inner.target.basis != self.source.basis:
            raise ValueError("composition spaces mismatch")
        blocks = {}
        for n in set(inner.blocks) | {m - inner.shift for m in self.blocks}:
            blocks[n] = self.block(n + inner.shift).matmul(inner.block(n))
        return GradedMap(inner.source, self.target, self.shift + inner.shift, blocks)

    def add(self, other: "GradedMap") -> "GradedMap":
        if other.shift != self.shift:
            raise ValueError("shift mismatch")
        blocks = {}
        for n in set(self.blocks) | set(other.blocks):
            s = (self.block(n).to_dense() + other.block(n).to_dense()) % self.p
            blocks[n] = FpMatrix.from_dense(s, self.p)
        return GradedMap(self.source, self.target, self.shift, blocks)

    def scale(self, c: int) -> "GradedMap":
        blocks = {
            n: FpMatrix.from_dense(m.to_dense() * (c % self.p), self.p)
            for n, m in self.blocks.items()
        }
        return GradedMap(self.source, self.target, self.shift, blocks)

    @staticmethod
    def zero(source, target, shift) -> "GradedMap":
        return GradedMap(source, target, shift, {})

    @staticmethod
    def identity(space) -> "GradedMap":
        blocks = {d: FpMatrix.identity(space.p, space.dim(d)) for d in space.degrees()}
        return GradedMap(space, space, 0, blocks)

    def to_json(self) -> dict:
        return {
            "shift": self.shift,
            "blocks": {
                str(n): {f"{i},{j}": v for (i, j), v in sorted(m.entries.items())}
                for n, m in self.blocks.items()
            },
        }


def map_from_blocks_json(source, target, shift, blocks_obj) -> GradedMap:
    blocks = {}
    for ns, ent in blocks_obj.items():
        n = int(ns)
        entries = {}
        for key, v in ent.items():
            i, j = (int(t) for t in key.split(","))
            entries[(i, j)] = int(v) % source.p
        entries = {k: v for k, v in entries.items() if v}
        blocks[n] = FpMatrix(source.p, target.dim(n + shift), source.dim(n), entries)
    return GradedMap(source, target, shift, blocks)


def space_to_json_str(v: WindowedGradedSpace) -> str:
    return json.dumps(v.to_json(), sort_keys=True, indent=2)
