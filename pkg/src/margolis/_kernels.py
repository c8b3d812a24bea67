"""Dense mod-p elimination kernels.

Two interchangeable implementations of the same row-reduction routine: a
numba-jitted one and a vectorized pure-numpy one.  The active backend is
chosen at import time from the MARGOLIS_BACKEND environment variable
("numba" or "numpy"; default is numba when importable) and can be switched
at runtime with set_backend().  Matrices are int64 arrays with entries
already reduced into [0, p).
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


def _inv_mod(a: int, p: int) -> int:
    # p prime, a not divisible by p
    return pow(int(a), p - 2, p)


def rref_numpy(a: np.ndarray, p: int):
    """Reduced row echelon form over F_p. Returns (rref, pivot_columns)."""
    a = a.copy() % p
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * _inv_mod(int(a[r, c]), p)) % p
        rest = np.nonzero(a[:, c])[0]
        rest = rest[rest != r]
        if rest.size:
            a[rest] = (a[rest] - np.outer(a[rest, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a, np.array(pivots, dtype=np.int64)


@njit(cache=True)
def _rref_numba_impl(a, p):  # pragma: no cover - exercised via dispatch
    m, n = a.shape
    pivots = np.empty(min(m, n), dtype=np.int64)
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv == -1:
            continue
        if piv != r:
            for j in range(n):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        # modular inverse via fermat
        inv = 1
        base = a[r, c] % p
        e = p - 2
        while e > 0:
            if e & 1:
                inv = (inv * base) % p
            base = (base * base) % p
            e >>= 1
        for j in range(n):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(m):
            if i != r and a[i, c] != 0:
                f = a[i, c]
                for j in range(n):
                    a[i, j] = (a[i, j] - f * a[r, j]) % p
        pivots[r] = c
        r += 1
    return a, pivots[:r]


def rref_numba(a: np.ndarray, p: int):
    a = np.ascontiguousarray(a.copy() % p, dtype=np.int64)
    out, piv = _rref_numba_impl(a, p)
    return out, piv.copy()


_BACKENDS = {"numpy": rref_numpy}
if HAS_NUMBA:
    _BACKENDS["numba"] = rref_numba

_active = os.environ.get("MARGOLIS_BACKEND", "numba" if HAS_NUMBA else "numpy")
if _active not in _BACKENDS:
    _active = "numpy"


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    _active = name


def get_backend() -> str:
    return _active


def rref_dense(a: np.ndarray, p: int):
    """Row-reduce with the active backend."""
    return _BACKENDS[_active](a, p)
