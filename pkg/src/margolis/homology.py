"""Margolis homology of E(Q)-modules and the Ext identifications built on it.

H(M;Q)_d = ker(Q: M_d -> M_{d-|Q|}) / im(Q: M_{d+|Q|} -> M_d), trusted on
the window shrunk by |Q| on each side.  Ext over E(Q) is read off the
2-periodic free resolution of k; internal-degree bookkeeping follows the
homological convention pinned by the k and E(Q) cases: Ext^{s,t} matches
homology at module degree t + s|Q|.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fplin
from .fplin import FpMatrix, image_basis, kernel_basis, quotient_basis, rank
from .graded import GradedMap, Window, WindowedGradedSpace, dual as dual_space, suspend
from .qmod import QModule, Verdict, dual_qmodule, validate


@dataclass
class DegreeData:
    cycles: FpMatrix  # columns: basis of ker Q_d in M_d coordinates
    boundaries_in_cycles: FpMatrix  # columns: im Q_{d+|Q|} in cycle coordinates
    reps: FpMatrix  # columns: homology representatives in M_d coordinates


@dataclass
class MargolisResult:
    homology: WindowedGradedSpace
    valid_window: Window | None
    tables: dict[int, dict[str, int]] = field(default_factory=dict)
    _data: dict[int, DegreeData] = field(default_factory=dict)

    def dim(self, d: int) -> int:
        return self.homology.dim(d)

    def dims(self) -> dict[int, int]:
        return self.homology.dims()

    def is_zero(self) -> bool:
        return self.homology.is_zero()

    def report(self) -> list[dict]:
        return [
            {"degree": d, **self.tables[d]}
            for d in sorted(self.tables)
        ]


def margolis_homology(m: QModule) -> MargolisResult:
    v = validate(m)
    if not v:
        raise ValueError(f"invalid QModule: {v.reason}")
    win = m.valid_window()
    if win is None:
        empty = WindowedGradedSpace(m.p, m.window, {})
        return MargolisResult(empty, None)
    basis: dict[int, list[str]] = {}
    tables = {}
    data = {}
    for d in win.degrees():
        nd = m.space.dim(d)
        if nd == 0:
            if m.space.dim(d + m.qdeg):
                tables[d] = {"dim": 0, "kernel": 0, "image": 0, "homology": 0}
            continue
        kb = kernel_basis(m.q_block(d))
        ib = image_basis(m.q_block(d + m.qdeg))
        # boundaries expressed inside the kernel
        bic = fplin.solve_many(kb, ib)
        if bic is None:
            raise ValueError(f"boundary not a cycle at degree {d}; Q^2 != 0?")
        qc = quotient_basis(bic, kb.cols)
        reps = kb.matmul(qc)
        h = qc.cols
        tables[d] = {"dim": nd, "kernel": kb.cols, "image": ib.cols, "homology": h}
        data[d] = DegreeData(kb, bic, reps)
        if h:
            basis[d] = [f"h{d}_{i}" for i in range(h)]
    hom = WindowedGradedSpace(m.p, win, basis)
    return MargolisResult(hom, win, tables, data)


def reduce_to_homology(res: MargolisResult, d: int, vec: np.ndarray, m: QModule):
    """Coordinates of a cycle's class in the homology basis at degree d, or None."""
    dd = res._data.get(d)
    if dd is None:
        return np.zeros(0, dtype=np.int64) if res.dim(d) == 0 else None
    # vec = cycles * x ; then project x modulo boundaries onto rep coordinates
    x = fplin.solve(dd.cycles, vec)
    if x is None:
        return None  # not a cycle
    full = dd.boundaries_in_cycles.hstack(
        fplin.solve_many(dd.cycles, dd.reps) or FpMatrix.zeros(m.p, dd.cycles.cols, 0)
    )
    y = fplin.solve(full, x)
    if y is None:
        raise ValueError("cycle space decomposition failed")
    return y[dd.boundaries_in_cycles.cols:]


# -- long exact sequence ---------------------------------------------------


def les_check(mprime: QModule, m: QModule, mdprime: QModule,
              incl: GradedMap, proj: GradedMap) -> Verdict:
    """Verify the Margolis long exact sequence of 0 -> M' -> M -> M'' -> 0.

    Builds the connecting map by an explicit zig-zag on chosen lifts and
    checks exactness at every trustworthy degree.
    """
    if not (m.qdeg == mprime.qdeg == mdprime.qdeg):
        return Verdict(False, "|Q| mismatch")
    p, qd = m.p, m.qdeg
    # Q-equivariance and degreewise short exactness
    for d in m.space.degrees():
        if d - qd >= m.window.lo:
            a = m.q_block(d).matmul(incl.block(d))
            b = incl.block(d - qd).matmul(mprime.q_block(d))
            if a != b:
                return Verdict(False, f"inclusion not Q-equivariant at {d}", d)
            a = mdprime.q_block(d).matmul(proj.block(d))
            b = proj.block(d - qd).matmul(m.q_block(d))
            if a != b:
                return Verdict(False, f"projection not Q-equivariant at {d}", d)
    for d in set(m.space.degrees()) | set(mprime.space.degrees()) | set(mdprime.space.degrees()):
        ib = incl.block(d)
        pb = proj.block(d)
        if rank(ib) != mprime.space.dim(d):
            return Verdict(False, f"inclusion not injective at {d}", d)
        if rank(pb) != mdprime.space.dim(d):
            return Verdict(False, f"projection not surjective at {d}", d)
        if not pb.matmul(ib).is_zero():
            return Verdict(False, f"composite nonzero at {d}", d)
        if mprime.space.dim(d) + mdprime.space.dim(d) != m.space.dim(d):
            return Verdict(False, f"not short exact at {d}", d)

    hp = margolis_homology(mprime)
    hm = margolis_homology(m)
    hq = margolis_homology(mdprime)
    wins = [w for w in (hp.valid_window, hm.valid_window, hq.valid_window) if w is not None]
    if not wins:
        return Verdict(True, "window too narrow; nothing to check")
    win = wins[0]
    for w in wins[1:]:
        win = win.intersect(w)
        if win is None:
            return Verdict(True, "window too narrow; nothing to check")

    def induced(res_src, res_tgt, block_of, tgt_mod):
        mats = {}
        for d in win.degrees():
            cols = res_src.dim(d)
            rows = res_tgt.dim(d)
            ent = {}
            dd = res_src._data.get(d)
            if dd is not None and cols:
                for j in range(cols):
                    vec = block_of(d).apply(dd.reps.column(j))
                    y = reduce_to_homology(res_tgt, d, vec, tgt_mod)
                    if y is None:
                        return None, d
                    for i, c in enumerate(y):
                        if c:
                            ent[(i, j)] = int(c)
            mats[d] = FpMatrix(p, rows, cols, ent)
        return mats, None

    imap, bad = induced(hp, hm, incl.block, m)
    if imap is None:
        return Verdict(False, f"inclusion does not send cycles to cycles at {bad}", bad)
    pmats, bad = induced(hm, hq, proj.block, mdprime)
    if pmats is None:
        return Verdict(False, f"projection does not send cycles to cycles at {bad}", bad)

    # connecting map H_d(M'') -> H_{d-|Q|}(M') by zig-zag
    cmats = {}
    for d in win.degrees():
        cols = hq.dim(d)
        rows = hp.dim(d - qd) if (d - qd) in win else 0
        ent = {}
        dd = hq._data.get(d)
        if dd is not None and cols and rows:
            for j in range(cols):
                z = dd.reps.column(j)
                lift = fplin.solve(proj.block(d), z)
                if lift is None:
                    return Verdict(False, f"projection not surjective on a cycle at {d}", d)
                qlift = m.q_block(d).apply(lift)
                w = fplin.solve(incl.block(d - qd), qlift)
                if w is None:
                    return Verdict(False, f"zig-zag failed at {d}", d)
                y = reduce_to_homology(hp, d - qd, w, mprime)
                if y is None:
                    return Verdict(False, f"connecting image not a cycle at {d}", d)
                for i, c in enumerate(y):
                    if c:
                        ent[(i, j)] = int(c)
        if rows or cols:
            cmats[d] = FpMatrix(p, rows, cols, ent)

    # exactness: at H(M'): im(connecting from d+|Q|) = ker(incl_*);
    # at H(M): im(incl_*) = ker(proj_*); at H(M''): im(proj_*) = ker(connecting)
    for d in win.degrees():
        checks = []
        if d + qd in win:
            checks.append((cmats.get(d + qd, FpMatrix.zeros(p, hp.dim(d), hq.dim(d + qd))), imap[d], hp.dim(d)))
        checks.append((imap[d], pmats[d], hm.dim(d)))
        if d - qd in win:
            checks.append((pmats[d], cmats.get(d, FpMatrix.zeros(p, hp.dim(d - qd), hq.dim(d))), hq.dim(d)))
        for incoming, outgoing, dim_here in checks:
            if not outgoing.matmul(incoming).is_zero():
                return Verdict(False, f"composite nonzero in LES near degree {d}", d)
            # exactness: im(incoming) = ker(outgoing), i.e. ranks match
            if rank(incoming) != dim_here - rank(outgoing):
                return Verdict(False, f"LES not exact near degree {d}", d)
    return Verdict(True)


def kunneth_check(a: QModule, b: QModule) -> Verdict:
    """dim H(a (x) b)_d = sum_e dim H(a)_e * dim H(b)_{d-e} on the safe window."""
    from .qmod import tensor_qmod

    t = tensor_qmod(a, b)
    ht = margolis_homology(t)
    ha = margolis_homology(a)
    hb = margolis_homology(b)
    if ht.valid_window is None or ha.valid_window is None or hb.valid_window is None:
        return Verdict(True, "window too narrow; nothing to check")
    # A degree is trusted when every pair of nonzero module degrees summing
    # to it lies inside both factors' valid homology windows; support bounds
    # rule out contributions from above the windows.
    sa = a.space.support_lo if a.space.support_lo is not None else a.window.lo
    sb = b.space.support_lo if b.space.support_lo is not None else b.window.lo
    hi = min(ht.valid_window.hi, ha.valid_window.hi + sb, hb.valid_window.hi + sa)
    checked = 0
    for d in ht.valid_window.degrees():
        if d > hi:
            continue
        pairs = [
            (e, d - e)
            for e in a.space.degrees()
            if a.space.dim(e) and b.space.dim(d - e)
        ]
        if any(e not in ha.valid_window or f not in hb.valid_window for e, f in pairs):
            continue
        lhs = ht.dim(d)
        rhs = sum(ha.dim(e) * hb.dim(f) for e, f in pairs)
        if lhs != rhs:
            return Verdict(False, f"Kunneth fails at degree {d}: {lhs} != {rhs}", d)
        checked += 1
    if checked == 0:
        return Verdict(True, "no fully trusted degrees in window")
    return Verdict(True)


# -- Ext over E(Q) ---------------------------------------------------------


def ext_q(m: QModule, s: int) -> WindowedGradedSpace:
    """Ext^{s,t}(k, M): s=0 gives ker Q; s>0 gives H(M;Q) suspended by -s|Q|."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s == 0:
        if m.window.lo + m.qdeg > m.window.hi:
            return WindowedGradedSpace(m.p, m.window, {})
        win = Window(m.window.lo + m.qdeg, m.window.hi)
        basis = {}
        for d in win.degrees():
            if m.space.dim(d):
                n = kernel_basis(m.q_block(d)).cols
                if n:
                    basis[d] = [f"z{d}_{i}" for i in range(n)]
        return WindowedGradedSpace(m.p, win, basis)
    res = margolis_homology(m)
    if res.valid_window is None:
        return WindowedGradedSpace(m.p, m.window, {})
    return suspend(res.homology, -s * m.qdeg)


def ext_resolution_oracle(m: QModule, s: int) -> dict[int, int]:
    """Ext^{s,t} dimensions straight from the 2-periodic resolution.

    Independent of margolis_homology: per internal degree t the cochain at
    position s is M_{t+s|Q|} and the two relevant Q blocks are rank-counted
    directly.  Only trustworthy t are reported.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    qd = m.qdeg
    out = {}
    for t in range(m.window.lo - s * qd, m.window.hi - s * qd + 1):
        d = t + s * qd
        if d not in m.window or d - qd < m.window.lo:
            continue
        if s > 0 and d + qd > m.window.hi:
            continue
        nd = m.space.dim(d)
        kdim = nd - rank(m.q_block(d))
        if s == 0:
            dim = kdim
        else:
            dim = kdim - rank(m.q_block(d + qd))
        if dim:
            out[t] = dim
    return out


def ext_dual(m: QModule, s: int) -> WindowedGradedSpace:
    """Ext^{s,t}(M, k) for s > 0: the dual of H(M;Q), suspended by -s|Q|."""
    if s <= 0:
        raise ValueError("the duality isomorphism needs s > 0; use hom directly for s = 0")
    res = margolis_homology(m)
    if res.valid_window is None:
        return WindowedGradedSpace(m.p, m.window, {})
    return suspend(dual_space(res.homology), -s * m.qdeg)


def duality_check(m: QModule) -> Verdict:
    """dim H(M*;Q)_d = dim H(M;Q)_{-d} on the shared valid window."""
    md = dual_qmodule(m)
    h = margolis_homology(m)
    hd = margolis_homology(md)
    if h.valid_window is None or hd.valid_window is None:
        return Verdict(True, "window too narrow; nothing to check")
    for d in hd.valid_window.degrees():
        if -d in h.valid_window:
            if hd.dim(d) != h.dim(-d):
                return Verdict(False, f"duality fails at degree {d}", d)
    return Verdict(True)
