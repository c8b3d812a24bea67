import random

import numpy as np
import pytest

from margolis import fplin
from margolis.fplin import (
    FpMatrix,
    image_basis,
    kernel_basis,
    kernel_sparse_f2,
    quotient_basis,
    rank,
    rref,
    rref_sparse,
    solve,
)


def test_rref_duplicate_rows_f2():
    m = FpMatrix.from_dense([[1, 1], [1, 1]], 2)
    r, piv = rref(m)
    assert r.to_dense().tolist() == [[1, 1], [0, 0]]
    assert piv == [0]


def test_rref_identity_f3():
    m = FpMatrix.identity(3, 3)
    r, piv = rref(m)
    assert r == m
    assert piv == [0, 1, 2]


def test_rref_scalar_normalization_f5():
    m = FpMatrix.from_dense([[2, 4]], 5)
    r, piv = rref(m)
    assert r.to_dense().tolist() == [[1, 2]]
    assert piv == [0]


def test_kernel_basis_examples():
    m = FpMatrix.from_dense([[1, 1]], 2)
    k = kernel_basis(m)
    assert k.to_dense().tolist() == [[1], [1]]

    z = FpMatrix.zeros(7, 4, 3)
    assert kernel_basis(z) == FpMatrix.identity(7, 3)

    inj = FpMatrix.identity(3, 2)
    assert kernel_basis(inj).cols == 0


def test_image_and_quotient_examples():
    m = FpMatrix.from_dense([[1, 1], [1, 1]], 2)
    im = image_basis(m)
    assert im.to_dense().tolist() == [[1], [1]]

    q = quotient_basis(FpMatrix.zeros(3, 2, 0), 2)
    assert q.cols == 2

    full = FpMatrix.identity(3, 2)
    assert quotient_basis(full, 2).cols == 0


def test_quotient_accepts_dependent_columns():
    sub = FpMatrix.from_dense([[1, 2], [1, 2]], 3)
    q = quotient_basis(sub, 2)
    assert q.cols == 1


def _random_matrix(rng, p, rows, cols):
    ent = {}
    for i in range(rows):
        for j in range(cols):
            v = rng.randrange(p)
            if v:
                ent[(i, j)] = v
    return FpMatrix(p, rows, cols, ent)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_rank_nullity_and_idempotence(p):
    rng = random.Random(1729 + p)
    for _ in range(40):
        m = _random_matrix(rng, p, rng.randrange(1, 9), rng.randrange(1, 9))
        k = kernel_basis(m)
        assert k.cols + rank(m) == m.cols
        if k.cols:
            assert (m.to_dense() @ k.to_dense() % p == 0).all()
        r, piv = rref(m)
        r2, piv2 = rref(r)
        assert r2 == r and piv2 == piv


@pytest.mark.parametrize("p", [2, 3, 5])
def test_sparse_dense_paths_agree(p):
    rng = random.Random(99 + p)
    for _ in range(40):
        m = _random_matrix(rng, p, rng.randrange(1, 10), rng.randrange(1, 10))
        assert rref(m) == rref_sparse(m)


def test_backends_agree():
    if not fplin.HAS_NUMBA:
        pytest.skip("numba unavailable")
    rng = random.Random(7)
    prev = fplin.get_backend()
    try:
        for p in (2, 5):
            m = _random_matrix(rng, p, 8, 11)
            fplin.set_backend("numpy")
            a = rref(m)
            fplin.set_backend("numba")
            b = rref(m)
            assert a == b
    finally:
        fplin.set_backend(prev)


def test_solve_consistent_and_inconsistent():
    m = FpMatrix.from_dense([[1, 2], [0, 0]], 5)
    x = solve(m, np.array([4, 0]))
    assert x is not None
    assert ((m.to_dense() @ x) % 5).tolist() == [4, 0]
    assert solve(m, np.array([0, 1])) is None


def test_kernel_sparse_f2_matches_dense():
    rng = random.Random(5)
    for _ in range(30):
        rows, cols = rng.randrange(1, 9), rng.randrange(1, 9)
        m = _random_matrix(rng, 2, rows, cols)
        dense = m.to_dense()
        bitrows = [int(sum((1 << j) for j in range(cols) if dense[i, j])) for i in range(rows)]
        kvs = kernel_sparse_f2(bitrows, cols)
        k = kernel_basis(m)
        assert len(kvs) == k.cols
        for v in kvs:
            vec = np.array([(v >> j) & 1 for j in range(cols)], dtype=np.int64)
            assert ((dense @ vec) % 2 == 0).all()
        # independence: distinct free columns
        assert len({v & -v for v in kvs}) == len(kvs) or len(kvs) == 0
