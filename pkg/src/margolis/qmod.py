"""Modules over E(Q): validation, Cohen-Kaplansky decomposition, tensors.

A QModule is a windowed graded space with an operator Q lowering degree by
an odd amount |Q| and squaring to zero.  Every such module splits into free
cyclic summands E(Q) and trivial cyclic summands k; the decomposition here
processes degrees top-down with pivoting in canonical basis order, so its
output is deterministic even though the splitting itself is not unique.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from . import fplin
from .fplin import FpMatrix, image_basis, kernel_basis, quotient_basis, rank
from .graded import GradedMap, Window, WindowedGradedSpace, direct_sum as space_sum, map_from_blocks_json, space_from_dims, tensor as space_tensor


@dataclass
class Verdict:
    ok: bool
    reason: str = ""
    first_failure: int | None = None

    def __bool__(self):
        return self.ok


class QModule:
    def __init__(self, space: WindowedGradedSpace, q: GradedMap, qdeg: int):
        if qdeg <= 0 or qdeg % 2 == 0:
            raise ValueError("|Q| must be odd positive")
        if q.shift != -qdeg:
            raise ValueError(f"Q must shift degree by {-qdeg}")
        self.space = space
        self.q = q
        self.qdeg = qdeg

    @property
    def p(self) -> int:
        return self.space.p

    @property
    def window(self) -> Window:
        return self.space.window

    def valid_window(self):
        return (
            Window(self.window.lo + self.qdeg, self.window.hi - self.qdeg)
            if self.window.hi - self.window.lo >= 2 * self.qdeg
            else None
        )

    def q_block(self, d: int) -> FpMatrix:
        return self.q.block(d)

    def to_json(self) -> dict:
        obj = self.space.to_json()
        obj["qdeg"] = self.qdeg
        obj["q_blocks"] = self.q.to_json()["blocks"]
        return obj

    @staticmethod
    def from_json(obj: dict) -> "QModule":
        space = WindowedGradedSpace.from_json(obj)
        qdeg = int(obj["qdeg"])
        q = map_from_blocks_json(space, space, -qdeg, obj.get("q_blocks", {}))
        return QModule(space, q, qdeg)


def validate(m: QModule) -> Verdict:
    """Q has the right degree shift and squares to zero on the window interior."""
    for d in m.space.degrees():
        blk = m.q.blocks.get(d)
        if blk is not None and (blk.cols != m.space.dim(d) or blk.rows != m.space.dim(d - m.qdeg)):
            return Verdict(False, f"block shape mismatch at degree {d}", d)
    lo = m.window.lo + 2 * m.qdeg
    for d in sorted(m.space.degrees(), reverse=True):
        if d < lo:
            continue
        comp = m.q_block(d - m.qdeg).matmul(m.q_block(d))
        if not comp.is_zero():
            return Verdict(False, f"Q^2 != 0 at degree {d}", d)
    return Verdict(True)


@dataclass
class CyclicDecomposition:
    free_tops: dict[int, int]  # top-class degree -> multiplicity
    trivials: dict[int, int]  # degree -> multiplicity
    valid_window: Window | None

    def reassembled_dims(self, qdeg: int) -> dict[int, int]:
        dims: dict[int, int] = {}
        for d, n in self.free_tops.items():
            dims[d] = dims.get(d, 0) + n
            dims[d - qdeg] = dims.get(d - qdeg, 0) + n
        for d, n in self.trivials.items():
            dims[d] = dims.get(d, 0) + n
        return {d: n for d, n in dims.items() if n}

    def margolis_dims(self) -> dict[int, int]:
        return dict(self.trivials)


def cyclic_decompose(m: QModule) -> CyclicDecomposition:
    """Split into suspensions of E(Q) and of k.

    Free tops are trusted on [lo+|Q|, hi] (the Q-block is fully visible
    there); trivial summands only on the doubly shrunk window where both the
    kernel and the incoming image are visible.
    """
    v = validate(m)
    if not v:
        raise ValueError(f"invalid QModule: {v.reason}")
    free_tops: dict[int, int] = {}
    trivials: dict[int, int] = {}
    win = m.valid_window()
    lo, hi = m.window.lo, m.window.hi
    if lo + m.qdeg > hi:
        return CyclicDecomposition(free_tops, trivials, None)
    for d in range(hi, lo + m.qdeg - 1, -1):
        nd = m.space.dim(d)
        if nd == 0:
            continue
        qd = m.q_block(d)
        r = rank(qd)
        if r:
            free_tops[d] = r
        if win is not None and d in win:
            # trivial summands: ker Q_d / im Q_{d+|Q|}
            kb = kernel_basis(qd)
            ib = image_basis(m.q_block(d + m.qdeg))
            h = kb.cols - ib.cols
            if h:
                trivials[d] = h
    return CyclicDecomposition(free_tops, trivials, win)


def is_simple_torsion_certificate(m: QModule) -> Verdict:
    dec = cyclic_decompose(m)
    if dec.valid_window is None:
        return Verdict(False, "window too narrow to certify")
    if dec.trivials:
        d = min(dec.trivials)
        return Verdict(False, f"trivial summand at degree {d}", d)
    return Verdict(True)


# -- constructions -------------------------------------------------------


def free_module(p: int, qdeg: int, top_degrees: list[int], window: Window) -> QModule:
    """Direct sum of E(Q) copies with given top-class degrees, windowed."""
    basis: dict[int, list[str]] = {}
    gens = []
    for k, d in enumerate(sorted(top_degrees)):
        if d in window:
            basis.setdefault(d, []).append(f"g{k}d{d}")
        if d - qdeg in window:
            basis.setdefault(d - qdeg, []).append(f"Qg{k}d{d}")
        gens.append((k, d))
    space = WindowedGradedSpace(p, window, basis, support_lo=min(basis) if basis else window.hi)
    blocks = {}
    for k, d in gens:
        if d in window and d - qdeg in window:
            i = space.index_of(d - qdeg, f"Qg{k}d{d}")
            j = space.index_of(d, f"g{k}d{d}")
            blocks.setdefault(d, {})[(i, j)] = 1
    q = GradedMap(
        space,
        space,
        -qdeg,
        {
            d: FpMatrix(p, space.dim(d - qdeg), space.dim(d), ent)
            for d, ent in blocks.items()
        },
    )
    return QModule(space, q, qdeg)


def trivial_module(p: int, qdeg: int, degrees: list[int], window: Window) -> QModule:
    basis: dict[int, list[str]] = {}
    for k, d in enumerate(sorted(degrees)):
        if d in window:
            basis.setdefault(d, []).append(f"t{k}d{d}")
    space = WindowedGradedSpace(p, window, basis, support_lo=min(basis) if basis else window.hi)
    return QModule(space, GradedMap.zero(space, space, -qdeg), qdeg)


def direct_sum(a: QModule, b: QModule) -> QModule:
    if a.qdeg != b.qdeg:
        raise ValueError("|Q| mismatch")
    space = space_sum(a.space, b.space)
    blocks = {}
    for d in space.degrees():
        ba, bb = a.q_block(d), b.q_block(d)
        rows, cols = space.dim(d - a.qdeg), space.dim(d)
        ent = dict(ba.entries)
        for (i, j), v in bb.entries.items():
            ent[(i + a.space.dim(d - a.qdeg), j + a.space.dim(d))] = v
        blocks[d] = FpMatrix(a.p, rows, cols, ent)
    return QModule(space, GradedMap(space, space, -a.qdeg, blocks), a.qdeg)


def tensor_qmod(a: QModule, b: QModule) -> QModule:
    """Q(x (x) y) = Qx (x) y + (-1)^{|x|} x (x) Qy."""
    if a.qdeg != b.qdeg:
        raise ValueError("|Q| mismatch")
    p = a.p
    space = space_tensor(a.space, b.space)
    blocks = {}
    for d in space.degrees():
        td = d - a.qdeg
        if td not in space.window:
            continue
        # index maps for tensor bases
        src = []
        for da in a.space.degrees():
            db = d - da
            for i in range(a.space.dim(da)):
                for j in range(b.space.dim(db)):
                    src.append((da, i, db, j))
        tgt_index = {}
        pos = 0
        for da in a.space.degrees():
            db = td - da
            for i in range(a.space.dim(da)):
                for j in range(b.space.dim(db)):
                    tgt_index[(da, i, db, j)] = pos
                    pos += 1
        ent = {}
        for col, (da, i, db, j) in enumerate(src):
            qa = a.q_block(da)
            for (ii, jj), v in qa.entries.items():
                if jj == i:
                    key = (da - a.qdeg, ii, db, j)
                    if key in tgt_index:
                        ent[(tgt_index[key], col)] = (ent.get((tgt_index[key], col), 0) + v) % p
            sign = 1 if p == 2 or da % 2 == 0 else p - 1
            qb = b.q_block(db)
            for (ii, jj), v in qb.entries.items():
                if jj == j:
                    key = (da, i, db - b.qdeg, ii)
                    if key in tgt_index:
                        ent[(tgt_index[key], col)] = (ent.get((tgt_index[key], col), 0) + sign * v) % p
        ent = {k: v for k, v in ent.items() if v}
        blocks[d] = FpMatrix(p, space.dim(td), space.dim(d), ent)
    return QModule(space, GradedMap(space, space, -a.qdeg, blocks), a.qdeg)


def dual_qmodule(m: QModule) -> QModule:
    """Dual space with the transposed operator (grading signs reversed)."""
    from .graded import dual as dual_space

    space = dual_space(m.space)
    blocks = {}
    for d in m.space.degrees():
        blk = m.q.blocks.get(d)
        if blk is None:
            continue
        # Q*: (M_{-d'})* -> (M_{-d'+|Q|})* is the transpose of Q: M_{d} -> M_{d-|Q|}
        # placed at dual degree -(d - qdeg)
        ent = {(j, i): v for (i, j), v in blk.entries.items()}
        blocks[-(d - m.qdeg)] = FpMatrix(m.p, blk.cols, blk.rows, ent)
    return QModule(space, GradedMap(space, space, -m.qdeg, blocks), m.qdeg)


def random_qmodule(rng: random.Random, p: int, qdeg: int, window: Window,
                   max_total_dim: int = 40) -> QModule:
    """Random module: random cyclic summands conjugated by random basis changes.

    By Cohen-Kaplansky this reaches every isomorphism type.
    """
    tops: list[int] = []
    trivs: list[int] = []
    budget = rng.randrange(2, max_total_dim + 1)
    degrees = list(window.degrees())
    while budget > 0:
        if rng.random() < 0.6 and budget >= 2:
            d = rng.choice(degrees)
            tops.append(d)
            budget -= 2
        else:
            trivs.append(rng.choice(degrees))
            budget -= 1
    base = direct_sum(
        free_module(p, qdeg, tops, window), trivial_module(p, qdeg, trivs, window)
    )
    # conjugate Q by a random invertible change of basis per degree
    change: dict[int, np.ndarray] = {}
    inv: dict[int, np.ndarray] = {}
    for d in base.space.degrees():
        n = base.space.dim(d)
        g = _random_invertible(rng, p, n)
        change[d] = g
        inv[d] = _invert_mod(g, p)
    blocks = {}
    for d in base.space.degrees():
        blk = base.q_block(d)
        if d - qdeg not in base.space.basis and blk.is_zero():
            continue
        gd = change.get(d - qdeg)
        if gd is None:
            continue
        mat = (gd @ blk.to_dense() @ inv[d]) % p
        blocks[d] = FpMatrix.from_dense(mat, p)
    space = space_from_dims(p, window, base.space.dims(), prefix="r")
    q = GradedMap(space, space, -qdeg, {d: b for d, b in blocks.items() if not b.is_zero()})
    return QModule(space, q, qdeg)


def _random_invertible(rng: random.Random, p: int, n: int) -> np.ndarray:
    """Product of random elementary matrices; deterministic given rng."""
    g = np.eye(n, dtype=np.int64)
    for _ in range(2 * n + 2):
        if n < 2:
            break
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.randrange(1, p)
        g[i] = (g[i] + c * g[j]) % p
    perm = list(range(n))
    rng.shuffle(perm)
    return g[perm]


def _invert_mod(g: np.ndarray, p: int) -> np.ndarray:
    n = g.shape[0]
    if n == 0:
        return g.copy()
    aug = np.concatenate([g, np.eye(n, dtype=np.int64)], axis=1)
    from ._kernels import rref_dense

    r, piv = rref_dense(aug, p)
    if list(piv) != list(range(n)):
        raise ValueError("matrix not invertible")
    return r[:, n:]


def submodule_from_vectors(m: QModule, seed_vectors: dict[int, list[np.ndarray]]):
    """Q-stable span of the given vectors: (sub QModule, inclusion GradedMap)."""
    p = m.p
    spans: dict[int, list[np.ndarray]] = {d: [] for d in m.space.degrees()}

    def add_vec(d, v):
        v = np.asarray(v, dtype=np.int64) % p
        if not v.any() or d not in m.space.basis:
            return False
        cur = spans.setdefault(d, [])
        if cur:
            bm = FpMatrix.from_dense(np.array(cur).T, p)
            if fplin.in_span(bm, v):
                return False
        cur.append(v)
        return True

    work = [(d, v) for d, vs in seed_vectors.items() for v in vs]
    while work:
        d, v = work.pop()
        if add_vec(d, v):
            img = m.q_block(d).apply(np.asarray(v) % p)
            if img.any():
                work.append((d - m.qdeg, img))
    # canonicalize spans by rref rows
    sub_basis: dict[int, np.ndarray] = {}
    for d, vs in spans.items():
        if not vs:
            continue
        mat = FpMatrix.from_dense(np.array(vs), p)
        r, piv = fplin.rref(mat)
        rows = r.to_dense()[: len(piv)]
        sub_basis[d] = rows
    dims = {d: rows.shape[0] for d, rows in sub_basis.items()}
    sub_space = space_from_dims(p, m.window, dims, prefix="s")
    incl_blocks = {}
    for d, rows in sub_basis.items():
        incl_blocks[d] = FpMatrix.from_dense(rows.T, p)
    incl = GradedMap(sub_space, m.space, 0, incl_blocks)
    # restricted Q: solve incl * x = Q(incl * e_j)
    q_blocks = {}
    for d, rows in sub_basis.items():
        td = d - m.qdeg
        cols = rows.shape[0]
        rowsT = rows.T
        targets = (m.q_block(d).to_dense() @ rowsT) % p
        if td in sub_basis:
            binc = FpMatrix.from_dense(sub_basis[td].T, p)
            sol = fplin.solve_many(binc, FpMatrix.from_dense(targets, p))
            if sol is None:
                raise ValueError("span not Q-stable (internal error)")
            q_blocks[d] = sol
        elif targets.any():
            raise ValueError("span not Q-stable (internal error)")
    q = GradedMap(sub_space, sub_space, -m.qdeg, q_blocks)
    return QModule(sub_space, q, m.qdeg), incl


def quotient_module(m: QModule, incl: GradedMap):
    """Quotient of m by the image of incl: (quotient QModule, projection map)."""
    p = m.p
    reps: dict[int, FpMatrix] = {}
    proj: dict[int, np.ndarray] = {}
    dims = {}
    for d in m.space.degrees():
        sub = incl.block(d)
        n = m.space.dim(d)
        q = quotient_basis(sub, n)
        reps[d] = q
        dims[d] = q.cols
        # projection: coordinates along reps modulo sub: solve [sub|reps] x = v
        full = sub.hstack(q)
        inv = _invert_full(full, p)
        proj[d] = inv[sub.cols:, :]
    qspace = space_from_dims(p, m.window, {d: n for d, n in dims.items() if n}, prefix="q")
    pr_blocks = {d: FpMatrix.from_dense(proj[d], p) for d in m.space.degrees() if dims.get(d)}
    pr = GradedMap(m.space, qspace, 0, pr_blocks)
    q_blocks = {}
    for d in qspace.degrees():
        td = d - m.qdeg
        mat = (proj.get(td, np.zeros((0, m.space.dim(td)), dtype=np.int64)) @ m.q_block(d).to_dense() @ reps[d].to_dense()) % p
        q_blocks[d] = FpMatrix.from_dense(mat, p)
    q = GradedMap(qspace, qspace, -m.qdeg, q_blocks)
    return QModule(qspace, q, m.qdeg), pr


def _invert_full(full: FpMatrix, p: int) -> np.ndarray:
    if full.rows != full.cols:
        raise ValueError("basis completion is not square")
    return _invert_mod(full.to_dense(), p)
