"""Exact inversion of block tridiagonal matrices via four block sequences.

With nonsingular off-diagonal blocks, the inverse Z of a block
tridiagonal matrix satisfies Z_ij = U_i V_j for i <= j and Z_ij = Y_i X_j
for i >= j, where the four sequences follow three-term recurrences driven
only by the matrix blocks. Diagonal blocks are assembled as U_i V_i and
cross-checked against Y_i X_i.

Sequence magnitudes can grow geometrically when the matrix is far from
block diagonally dominant; growth beyond MAX_BLOCK_MAGNITUDE aborts with
a diagnostic naming the offending step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import NormKind, invert, norm
from .structures import BlockTridiagonalMatrix, GeneralBlockMatrix

MAX_BLOCK_MAGNITUDE = 1e150


class RecurrenceOverflowError(RuntimeError):
    """A recurrence iterate exceeded MAX_BLOCK_MAGNITUDE."""

    def __init__(self, step: str, magnitude: float):
        super().__init__(
            f"recurrence overflow at {step}: max entry magnitude {magnitude:.3e} "
            f"exceeds {MAX_BLOCK_MAGNITUDE:.0e}")
        self.step = step
        self.magnitude = magnitude


@dataclass(frozen=True)
class InverseFactors:
    """The four sequences, stacked (n, m, m); index k holds term k+1."""

    u: np.ndarray
    v: np.ndarray
    x: np.ndarray
    y: np.ndarray

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def m(self) -> int:
        return self.u.shape[1]


@dataclass(frozen=True, eq=False)
class BlockInverse:
    """Assembled inverse as an (n, n, m, m) block grid.

    ``diag_consistency`` is the largest entrywise difference between the
    two diagonal representations U_i V_i and Y_i X_i, relative to the
    largest diagonal-block entry.
    """

    blocks: np.ndarray
    diag_consistency: float

    @property
    def n(self) -> int:
        return self.blocks.shape[0]

    @property
    def m(self) -> int:
        return self.blocks.shape[2]

    def norm_grid(self, kind: NormKind) -> np.ndarray:
        """(n, n) array of block norms, cached per norm kind."""
        cache = getattr(self, "_norm_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_norm_cache", cache)
        if kind not in cache:
            n = self.n
            grid = np.array([[norm(self.blocks[i, j], kind) for j in range(n)]
                             for i in range(n)])
            grid.setflags(write=False)
            cache[kind] = grid
        return cache[kind]

    def to_general(self) -> GeneralBlockMatrix:
        return GeneralBlockMatrix(blocks=self.blocks)

    def to_dense(self) -> np.ndarray:
        n, m = self.n, self.m
        return self.blocks.transpose(0, 2, 1, 3).reshape(n * m, n * m).copy()


def _guard(block: np.ndarray, step: str) -> np.ndarray:
    mag = float(np.abs(block).max())
    if mag > MAX_BLOCK_MAGNITUDE:
        raise RecurrenceOverflowError(step, mag)
    return block


def ikebe_factors(a: BlockTridiagonalMatrix) -> InverseFactors:
    """Run the four recurrences.

    Raises SingularError (naming the inverted block or seed) if an
    off-diagonal block or a seed matrix is singular, and
    RecurrenceOverflowError on geometric growth of the iterates.
    """
    n, m = a.n, a.m
    eye = np.eye(m, dtype=np.complex128)
    if n == 1:
        v0 = invert(a.diag[0], context="A_1 inversion")
        return InverseFactors(u=np.asarray([eye]), v=np.asarray([v0]),
                              x=np.asarray([eye]), y=np.asarray([v0]))

    # sup[k] is block B_{k+1}, sub[k] is block C_{k+1} in 1-based terms.
    sup_inv = [invert(a.sup[k], context=f"B_{k + 1} inversion") for k in range(n - 1)]
    sub_inv = [invert(a.sub[k], context=f"C_{k + 1} inversion") for k in range(n - 1)]

    u = [None] * n
    u[0] = eye
    u[1] = _guard(-sup_inv[0] @ (a.diag[0] @ u[0]), "U_2")
    for k in range(2, n):
        u[k] = _guard(-sup_inv[k - 1] @ (a.sub[k - 2] @ u[k - 2] + a.diag[k - 1] @ u[k - 1]),
                      f"U_{k + 1}")

    v = [None] * n
    seed = a.diag[n - 1] @ u[n - 1] + a.sub[n - 2] @ u[n - 2]
    v[n - 1] = _guard(invert(seed, context="V_n seed inversion"), "V_n")
    v[n - 2] = _guard(-(v[n - 1] @ a.diag[n - 1]) @ sup_inv[n - 2], f"V_{n - 1}")
    for k in range(n - 3, -1, -1):
        v[k] = _guard(-(v[k + 1] @ a.diag[k + 1] + v[k + 2] @ a.sub[k + 1]) @ sup_inv[k],
                      f"V_{k + 1}")

    x = [None] * n
    x[0] = eye
    x[1] = _guard(-(x[0] @ a.diag[0]) @ sub_inv[0], "X_2")
    for k in range(2, n):
        x[k] = _guard(-(x[k - 2] @ a.sup[k - 2] + x[k - 1] @ a.diag[k - 1]) @ sub_inv[k - 1],
                      f"X_{k + 1}")

    y = [None] * n
    seed = x[n - 1] @ a.diag[n - 1] + x[n - 2] @ a.sup[n - 2]
    y[n - 1] = _guard(invert(seed, context="Y_n seed inversion"), "Y_n")
    y[n - 2] = _guard(-sub_inv[n - 2] @ (a.diag[n - 1] @ y[n - 1]), f"Y_{n - 1}")
    for k in range(n - 3, -1, -1):
        y[k] = _guard(-sub_inv[k] @ (a.diag[k + 1] @ y[k + 1] + a.sup[k + 1] @ y[k + 2]),
                      f"Y_{k + 1}")

    return InverseFactors(u=np.asarray(u), v=np.asarray(v),
                          x=np.asarray(x), y=np.asarray(y))


def assemble_inverse(factors: InverseFactors) -> BlockInverse:
    """Build the full block grid of the inverse from the four sequences."""
    n, m = factors.n, factors.m
    z = np.zeros((n, n, m, m), dtype=np.complex128)
    consistency = 0.0
    scale = 0.0
    for i in range(n):
        for j in range(n):
            if i <= j:
                z[i, j] = factors.u[i] @ factors.v[j]
            else:
                z[i, j] = factors.y[i] @ factors.x[j]
        alt = factors.y[i] @ factors.x[i]
        consistency = max(consistency, float(np.abs(z[i, i] - alt).max()))
        scale = max(scale, float(np.abs(z[i, i]).max()))
    rel = consistency / scale if scale > 0.0 else consistency
    return BlockInverse(blocks=z, diag_consistency=rel)


def invert_block_tridiagonal(a: BlockTridiagonalMatrix) -> BlockInverse:
    """Convenience wrapper: run the recurrences and assemble the inverse."""
    return assemble_inverse(ikebe_factors(a))


def residual(a: BlockTridiagonalMatrix, z: BlockInverse, kind: NormKind) -> float:
    """||Z A - I|| in the requested norm, computed densely."""
    dense_a = a.to_dense()
    dense_z = z.to_dense()
    eye = np.eye(dense_a.shape[0], dtype=np.complex128)
    return norm(dense_z @ dense_a - eye, kind)


def condition_estimate(a: BlockTridiagonalMatrix, z: BlockInverse,
                       kind: NormKind = NormKind.TWO) -> float:
    """||A|| ||Z|| with the assembled inverse standing in for A^{-1}."""
    return norm(a.to_dense(), kind) * norm(z.to_dense(), kind)
