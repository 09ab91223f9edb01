"""Shared generators and oracles for the test suite.

Norm oracles go through numpy directly so the kernels under test are
compared against an independent implementation.
"""
from __future__ import annotations

import numpy as np

from blockdom import BlockTridiagonalMatrix, GeneralBlockMatrix, NormKind

NP_ORD = {NormKind.ONE: 1, NormKind.INF: np.inf, NormKind.FRO: "fro", NormKind.TWO: 2}

ALL_KINDS = (NormKind.ONE, NormKind.INF, NormKind.FRO, NormKind.TWO)


def np_norm(a, kind: NormKind) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=np.complex128), ord=NP_ORD[kind]))


def random_block(rng: np.random.Generator, m: int, complex_entries: bool = True) -> np.ndarray:
    b = rng.standard_normal((m, m))
    if complex_entries:
        b = b + 1j * rng.standard_normal((m, m))
    return b.astype(np.complex128)


def well_conditioned_block(rng: np.random.Generator, m: int,
                           complex_entries: bool = True) -> np.ndarray:
    # Resample until the singular values stay within a factor ~7 so the
    # off-diagonal blocks of generated instances are safely invertible.
    while True:
        b = random_block(rng, m, complex_entries)
        s = np.linalg.svd(b, compute_uv=False)
        if s[-1] >= 0.15 * s[0]:
            return b


def random_dominant_tridiag(rng: np.random.Generator, n: int, m: int,
                            kind: NormKind, complex_entries: bool = True,
                            target: float = 0.9) -> BlockTridiagonalMatrix:
    """Strictly row block diagonally dominant instance with row sums
    (per numpy oracle norms) at most ``target``."""
    if n > 1:
        sup = np.asarray([well_conditioned_block(rng, m, complex_entries)
                          for _ in range(n - 1)])
        sub = np.asarray([well_conditioned_block(rng, m, complex_entries)
                          for _ in range(n - 1)])
    else:
        sup = sub = np.zeros((0, m, m), dtype=np.complex128)
    diag = []
    eye = np.eye(m)
    for i in range(n):
        base = random_block(rng, m, complex_entries)
        shift = 1.0
        while True:
            d = base + shift * eye
            try:
                di = np.linalg.inv(d)
            except np.linalg.LinAlgError:
                shift *= 2.0
                continue
            row_sum = 0.0
            if i > 0:
                row_sum += np_norm(di @ sub[i - 1], kind)
            if i < n - 1:
                row_sum += np_norm(di @ sup[i], kind)
            if row_sum <= target and np.linalg.cond(d) < 1e6:
                break
            shift *= 2.0
        diag.append(d)
    return BlockTridiagonalMatrix(diag=np.asarray(diag), sup=sup, sub=sub)


def random_general(rng: np.random.Generator, n: int, m: int,
                   complex_entries: bool = True,
                   diag_boost: float = 0.0) -> GeneralBlockMatrix:
    grid = np.asarray([[random_block(rng, m, complex_entries)
                        for _ in range(n)] for _ in range(n)])
    if diag_boost:
        for i in range(n):
            grid[i, i] = grid[i, i] + diag_boost * np.eye(m)
    return GeneralBlockMatrix(blocks=grid)


def scalar_tridiag(n: int, sub: float, diag: float, sup: float) -> BlockTridiagonalMatrix:
    """Scalar (m=1) tridiagonal Toeplitz instance."""
    return BlockTridiagonalMatrix(
        diag=np.full((n, 1, 1), diag, dtype=np.complex128),
        sup=np.full((n - 1, 1, 1), sup, dtype=np.complex128),
        sub=np.full((n - 1, 1, 1), sub, dtype=np.complex128))
