"""Block matrix containers and constructors for the worked examples.

Blocks are stored stacked: a block tridiagonal matrix with n block rows
of block size m keeps its diagonal as an (n, m, m) array and the two
off-diagonals as (n-1, m, m) arrays. Python indices are 0-based; the
mathematical block rows 1..n map to array indices 0..n-1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


def _stack(blocks, name: str, count: int, m: int) -> np.ndarray:
    arr = np.asarray(blocks, dtype=np.complex128)
    if arr.ndim != 3 or arr.shape != (count, m, m):
        raise ValueError(f"{name} must have shape ({count}, {m}, {m}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BlockTridiagonalMatrix:
    """Square block tridiagonal matrix.

    ``diag[i]`` is the i-th diagonal block, ``sup[i]`` the block coupling
    block row i to row i+1, ``sub[i]`` the block coupling row i+1 to row i.
    """

    diag: np.ndarray
    sup: np.ndarray
    sub: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=np.complex128)
        if d.ndim != 3 or d.shape[1] != d.shape[2] or d.shape[0] < 1:
            raise ValueError(f"diag must be (n, m, m) with n >= 1, got {d.shape}")
        n, m = d.shape[0], d.shape[1]
        if m < 1:
            raise ValueError("block size must be at least 1")
        object.__setattr__(self, "diag", _stack(d, "diag", n, m))
        object.__setattr__(self, "sup", _stack(self.sup, "sup", n - 1, m))
        object.__setattr__(self, "sub", _stack(self.sub, "sub", n - 1, m))

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    @property
    def m(self) -> int:
        return self.diag.shape[1]

    @classmethod
    def from_blocks(cls, diag: Sequence, sup: Sequence = (), sub: Sequence = ()):
        d = [np.atleast_2d(np.asarray(b, dtype=np.complex128)) for b in diag]
        if not d:
            raise ValueError("need at least one diagonal block")
        m = d[0].shape[0]
        shape3 = lambda bs: (np.asarray([np.atleast_2d(np.asarray(b, dtype=np.complex128)) for b in bs])
                             if bs else np.zeros((0, m, m), dtype=np.complex128))
        return cls(diag=np.asarray(d), sup=shape3(list(sup)), sub=shape3(list(sub)))

    def to_dense(self) -> np.ndarray:
        n, m = self.n, self.m
        out = np.zeros((n * m, n * m), dtype=np.complex128)
        for i in range(n):
            out[i * m:(i + 1) * m, i * m:(i + 1) * m] = self.diag[i]
        for i in range(n - 1):
            out[i * m:(i + 1) * m, (i + 1) * m:(i + 2) * m] = self.sup[i]
            out[(i + 1) * m:(i + 2) * m, i * m:(i + 1) * m] = self.sub[i]
        return out

    def to_general(self) -> "GeneralBlockMatrix":
        n, m = self.n, self.m
        grid = np.zeros((n, n, m, m), dtype=np.complex128)
        for i in range(n):
            grid[i, i] = self.diag[i]
        for i in range(n - 1):
            grid[i, i + 1] = self.sup[i]
            grid[i + 1, i] = self.sub[i]
        return GeneralBlockMatrix(blocks=grid)


@dataclass(frozen=True)
class GeneralBlockMatrix:
    """Square matrix partitioned into an n-by-n grid of m-by-m blocks."""

    blocks: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.blocks, dtype=np.complex128)
        if g.ndim != 4 or g.shape[0] != g.shape[1] or g.shape[2] != g.shape[3]:
            raise ValueError(f"blocks must be (n, n, m, m), got {g.shape}")
        if g.shape[0] < 1 or g.shape[2] < 1:
            raise ValueError("need n >= 1 and m >= 1")
        if not np.all(np.isfinite(g)):
            raise ValueError("blocks contain non-finite entries")
        g = g.copy()
        g.setflags(write=False)
        object.__setattr__(self, "blocks", g)

    @property
    def n(self) -> int:
        return self.blocks.shape[0]

    @property
    def m(self) -> int:
        return self.blocks.shape[2]

    def to_dense(self) -> np.ndarray:
        n, m = self.n, self.m
        return self.blocks.transpose(0, 2, 1, 3).reshape(n * m, n * m).copy()

    @classmethod
    def from_dense(cls, dense, m: int) -> "GeneralBlockMatrix":
        a = np.asarray(dense, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if m < 1 or a.shape[0] % m != 0:
            raise ValueError(f"dimension {a.shape[0]} is not a multiple of block size {m}")
        n = a.shape[0] // m
        grid = a.reshape(n, m, n, m).transpose(0, 2, 1, 3)
        return cls(blocks=grid)


def tridiag_from_dense(dense, m: int) -> BlockTridiagonalMatrix:
    """Partition a dense matrix into m-by-m blocks; fails if any block
    outside the three central block diagonals is nonzero."""
    g = GeneralBlockMatrix.from_dense(dense, m)
    n = g.n
    for i in range(n):
        for j in range(n):
            if abs(i - j) > 1 and np.any(g.blocks[i, j] != 0):
                raise ValueError(f"block ({i + 1}, {j + 1}) outside the tridiagonal band is nonzero")
    diag = np.asarray([g.blocks[i, i] for i in range(n)])
    sup = (np.asarray([g.blocks[i, i + 1] for i in range(n - 1)])
           if n > 1 else np.zeros((0, m, m), dtype=np.complex128))
    sub = (np.asarray([g.blocks[i + 1, i] for i in range(n - 1)])
           if n > 1 else np.zeros((0, m, m), dtype=np.complex128))
    return BlockTridiagonalMatrix(diag=diag, sup=sup, sub=sub)


def build_tridiag_toeplitz(k: int, sub, diag, sup) -> np.ndarray:
    """Dense k-by-k Toeplitz tridiagonal matrix with the given scalars."""
    if k < 1:
        raise ValueError("need k >= 1")
    out = np.zeros((k, k), dtype=np.complex128)
    np.fill_diagonal(out, diag)
    for i in range(k - 1):
        out[i + 1, i] = sub
        out[i, i + 1] = sup
    return out


def kron_sum(t) -> BlockTridiagonalMatrix:
    """Block tridiagonal matrix T (x) I + I (x) T of a Toeplitz tridiagonal T.

    The result has k block rows of size k: diagonal blocks T + diag(T)[0] I
    shifted, off-diagonal blocks sub*I and sup*I.
    """
    a = np.asarray(t, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    k = a.shape[0]
    sub = a[1, 0] if k > 1 else 0.0
    sup = a[0, 1] if k > 1 else 0.0
    if not np.array_equal(a, build_tridiag_toeplitz(k, sub, a[0, 0], sup)):
        raise ValueError("kron_sum needs a Toeplitz tridiagonal input")
    eye = np.eye(k, dtype=np.complex128)
    dense = np.kron(a, eye) + np.kron(eye, a)
    return tridiag_from_dense(dense, k)


def block_tridiag_from_stencils(n: int, m: int, sub_stencil, diag_stencil,
                                sup_stencil) -> BlockTridiagonalMatrix:
    """Block tridiagonal matrix whose blocks are themselves Toeplitz
    tridiagonal, given as (sub, diag, sup) scalar triples."""
    if n < 1:
        raise ValueError("need n >= 1")
    d = build_tridiag_toeplitz(m, *diag_stencil)
    lo = build_tridiag_toeplitz(m, *sub_stencil)
    hi = build_tridiag_toeplitz(m, *sup_stencil)
    return BlockTridiagonalMatrix(
        diag=np.repeat(d[None, :, :], n, axis=0),
        sup=np.repeat(hi[None, :, :], n - 1, axis=0),
        sub=np.repeat(lo[None, :, :], n - 1, axis=0))


def left_scale_blockrows(a: BlockTridiagonalMatrix, scales) -> BlockTridiagonalMatrix:
    """Multiply block row i by the nonzero scalar scales[i] (diag(R) (x) I
    acting from the left)."""
    r = np.asarray(scales, dtype=np.complex128)
    if r.ndim != 1 or r.shape[0] != a.n:
        raise ValueError(f"need exactly {a.n} scale factors, got shape {r.shape}")
    if np.any(r == 0):
        raise ValueError("scale factors must be nonzero")
    return BlockTridiagonalMatrix(
        diag=a.diag * r[:, None, None],
        sup=a.sup * r[:-1, None, None],
        sub=a.sub * r[1:, None, None])


# Multiplier and increment of Knuth's MMIX linear congruential generator.
_LCG_MUL = 6364136223846793005
_LCG_INC = 1442695040888963407
_LCG_MOD = 2 ** 64


def build_random_diag(n: int, lo: int, hi: int, seed: int) -> list[int]:
    """Deterministic sequence of n integers in [lo, hi] from a 64-bit LCG.

    The generator is x_{k+1} = (6364136223846793005 x_k + 1442695040888963407)
    mod 2^64 seeded with x_0 = seed; each draw keeps the top 31 bits of the
    next state and reduces them modulo the range width. Documented so runs
    can be reproduced outside this package.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    span = hi - lo + 1
    x = seed % _LCG_MOD
    out = []
    for _ in range(n):
        x = (_LCG_MUL * x + _LCG_INC) % _LCG_MOD
        out.append(lo + (x >> 33) % span)
    return out
