"""Exact linear algebra over the prime field F_p.

FpMatrix is a canonical sparse container (only nonzero residues stored);
the actual elimination runs dense through the numba/numpy kernels in
_kernels.  A dictionary-based sparse elimination (rref_sparse) is kept as
an independent second route and must produce identical output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import rref_dense, rref_numpy, rref_numba, set_backend, get_backend, HAS_NUMBA

_SMALL_PRIMES = {2, 3, 5, 7, 11, 13}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p in _SMALL_PRIMES:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FpMatrix:
    """Sparse matrix over F_p; entries maps (row, col) -> residue in [1, p-1]."""

    p: int
    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        if self.p >= 1 << 20:
            raise ValueError("modulus too large for exact dense arithmetic")
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ValueError(f"entry ({i},{j}) outside {self.rows}x{self.cols}")
            if not (1 <= v < self.p):
                raise ValueError(f"stored residue {v} not in [1, p-1]")

    @staticmethod
    def from_dense(a, p: int) -> "FpMatrix":
        a = np.asarray(a, dtype=np.int64) % p
        ent = {}
        for i, j in zip(*np.nonzero(a)):
            ent[(int(i), int(j))] = int(a[i, j])
        return FpMatrix(p, a.shape[0], a.shape[1], ent)

    @staticmethod
    def zeros(p: int, rows: int, cols: int) -> "FpMatrix":
        return FpMatrix(p, rows, cols, {})

    @staticmethod
    def identity(p: int, n: int) -> "FpMatrix":
        return FpMatrix(p, n, n, {(i, i): 1 for i in range(n)})

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols), dtype=np.int64)
        for (i, j), v in self.entries.items():
            a[i, j] = v
        return a

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return (self.p, self.rows, self.cols, self.entries) == (
            other.p,
            other.rows,
            other.cols,
            other.entries,
        )

    def column(self, j: int) -> np.ndarray:
        v = np.zeros(self.rows, dtype=np.int64)
        for (i, jj), c in self.entries.items():
            if jj == j:
                v[i] = c
        return v

    def matmul(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p or self.cols != other.rows:
            raise ValueError("shape/modulus mismatch")
        a = (self.to_dense() @ other.to_dense()) % self.p
        return FpMatrix.from_dense(a, self.p)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return (self.to_dense() @ (np.asarray(vec, dtype=np.int64) % self.p)) % self.p

    def hstack(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p or self.rows != other.rows:
            raise ValueError("shape/modulus mismatch")
        ent = dict(self.entries)
        for (i, j), v in other.entries.items():
            ent[(i, j + self.cols)] = v
        return FpMatrix(self.p, self.rows, self.cols + other.cols, ent)

    def is_zero(self) -> bool:
        return not self.entries


def rref(m: FpMatrix):
    """Reduced row-echelon form. Returns (FpMatrix, list of pivot columns)."""
    a, piv = rref_dense(m.to_dense(), m.p)
    return FpMatrix.from_dense(a, m.p), [int(c) for c in piv]


def rref_sparse(m: FpMatrix):
    """Dictionary-of-rows elimination; independent of the dense kernels.

    Same pivot rule as the dense path (first nonzero row at the leftmost
    unfinished column), so the output must coincide exactly.
    """
    p = m.p
    rows = [dict() for _ in range(m.rows)]
    for (i, j), v in m.entries.items():
        rows[i][j] = v
    pivots = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        piv = None
        for i in range(r, m.rows):
            if rows[i].get(c):
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = {j: (v * inv) % p for j, v in rows[r].items() if (v * inv) % p}
        for i in range(m.rows):
            if i == r:
                continue
            f = rows[i].get(c, 0)
            if f:
                ri = rows[i]
                for j, v in rows[r].items():
                    nv = (ri.get(j, 0) - f * v) % p
                    if nv:
                        ri[j] = nv
                    elif j in ri:
                        del ri[j]
        pivots.append(c)
        r += 1
    ent = {}
    for i, row in enumerate(rows):
        for j, v in row.items():
            ent[(i, j)] = v
    return FpMatrix(p, m.rows, m.cols, ent), pivots


def rank(m: FpMatrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: FpMatrix) -> FpMatrix:
    """Columns form a basis of the null space, free variables in pivot order."""
    r, piv = rref(m)
    pivset = set(piv)
    free = [j for j in range(m.cols) if j not in pivset]
    rd = r.to_dense()
    ent = {}
    for k, j in enumerate(free):
        ent[(j, k)] = 1
        for ri, pc in enumerate(piv):
            v = int(rd[ri, j])
            if v:
                ent[(pc, k)] = (-v) % m.p
    return FpMatrix(m.p, m.cols, len(free), ent)


def image_basis(m: FpMatrix) -> FpMatrix:
    """Columns independently spanning the column space (original pivot columns)."""
    _, piv = rref(m)
    ent = {}
    for k, j in enumerate(piv):
        for (i, jj), v in m.entries.items():
            if jj == j:
                ent[(i, k)] = v
    return FpMatrix(m.p, m.rows, len(piv), ent)


def quotient_basis(sub: FpMatrix, ambient_dim: int) -> FpMatrix:
    """Standard basis vectors completing sub's column span to F_p^ambient_dim.

    Dependent columns in sub are accepted (reduced internally).
    """
    if sub.rows != ambient_dim:
        raise ValueError("sub columns must live in the ambient space")
    probe = sub.hstack(FpMatrix.identity(sub.p, ambient_dim))
    _, piv = rref(probe)
    reps = [j - sub.cols for j in piv if j >= sub.cols]
    ent = {(i, k): 1 for k, i in enumerate(reps)}
    return FpMatrix(sub.p, ambient_dim, len(reps), ent)


def solve(m: FpMatrix, target: np.ndarray):
    """One solution x of m x = target, or None when inconsistent."""
    t = np.asarray(target, dtype=np.int64).reshape(-1) % m.p
    if t.shape[0] != m.rows:
        raise ValueError("target length mismatch")
    aug = np.concatenate([m.to_dense(), t[:, None]], axis=1)
    r, piv = rref_dense(aug, m.p)
    if any(c == m.cols for c in piv):
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    for ri, c in enumerate(piv):
        x[c] = r[ri, m.cols]
    return x


def solve_many(m: FpMatrix, targets: FpMatrix):
    """Solve m X = targets columnwise; None when any column is inconsistent."""
    if m.rows != targets.rows:
        raise ValueError("shape mismatch")
    aug = np.concatenate([m.to_dense(), targets.to_dense()], axis=1)
    r, piv = rref_dense(aug, m.p)
    if any(c >= m.cols for c in piv):
        return None
    x = np.zeros((m.cols, targets.cols), dtype=np.int64)
    for ri, c in enumerate(piv):
        x[c, :] = r[ri, m.cols:]
    return FpMatrix.from_dense(x, m.p)


def in_span(basis: FpMatrix, vec: np.ndarray) -> bool:
    return solve(basis, vec) is not None


def kernel_sparse_f2(rows, ncols: int):
    """Null-space basis over F_2 from bitmask rows (python ints, bit j = column j).

    Used for large sparse systems where a dense array would not fit.
    Returns bitmask kernel vectors, one per free column, ascending.
    """
    pivots = {}  # pivot column (highest set bit) -> reduced row
    for row in rows:
        r = row
        while r:
            lead = r.bit_length() - 1
            if lead in pivots:
                r ^= pivots[lead]
            else:
                pivots[lead] = r
                break
    # back-eliminate pivot bits from other rows (full RREF)
    for lead in sorted(pivots, reverse=True):
        mask = 1 << lead
        for other in pivots:
            if other != lead and pivots[other] & mask:
                pivots[other] ^= pivots[lead]
    kvs = []
    for j in range(ncols):
        if j in pivots:
            continue
        vec = 1 << j
        jbit = 1 << j
        for c, row in pivots.items():
            if row & jbit:
                vec |= 1 << c
        kvs.append(vec)
    return kvs
