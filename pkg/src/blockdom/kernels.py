"""Dense complex linear algebra primitives used by every other module.

Everything here operates on small square complex128 blocks. The LU
factorization, triangular solves and the spectral-norm iteration are
written out explicitly so their failure modes (singular pivot, stalled
iteration) surface as typed exceptions instead of library-specific ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_PIVOT_TOL = 1e-13

# Power iteration on the Gram matrix: relative eigenvalue tolerance and cap.
_POWER_RELTOL = 1e-13
_POWER_MAXITER = 10000

# One-sided Jacobi: column-orthogonality threshold and sweep cap.
_JACOBI_TOL = 1e-15
_JACOBI_MAX_SWEEPS = 60


class NormKind(Enum):
    """Matrix norm selector shared across the package."""

    ONE = "one"
    INF = "inf"
    FRO = "fro"
    TWO = "two"


class SingularError(ValueError):
    """A matrix that must be inverted was singular to working precision."""

    def __init__(self, message: str, pivot_index: int | None = None,
                 context: str | None = None):
        if context:
            message = f"{message} during {context}"
        super().__init__(message)
        self.pivot_index = pivot_index
        self.context = context


class ConvergenceError(RuntimeError):
    """An iterative kernel failed to reach its tolerance."""


def as_block(a) -> np.ndarray:
    """Validate a square matrix block and return it as complex128."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square 2-d block, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("blocks must be at least 1x1")
    if not np.all(np.isfinite(arr)):
        raise ValueError("block contains non-finite entries")
    return arr


@dataclass(frozen=True)
class LUFactors:
    """Compact LU factorization with partial pivoting: P A = L U.

    ``lu`` stores U on and above the diagonal and the unit-lower
    multipliers strictly below it.  ``perm[k]`` is the original row of A
    living in row k of the factored matrix.
    """

    lu: np.ndarray
    perm: np.ndarray

    @property
    def m(self) -> int:
        return self.lu.shape[0]

    @property
    def lower(self) -> np.ndarray:
        l = np.tril(self.lu, -1)
        np.fill_diagonal(l, 1.0)
        return l

    @property
    def upper(self) -> np.ndarray:
        return np.triu(self.lu)


def lu_factor(block, pivot_tolerance: float = DEFAULT_PIVOT_TOL,
              context: str | None = None) -> LUFactors:
    """Factor a square block as P A = L U with partial pivoting.

    A pivot counts as zero when its magnitude is at most
    ``pivot_tolerance`` times the largest magnitude in the pivot's
    original row; that keeps the test scale invariant.
    """
    a = as_block(block)
    m = a.shape[0]
    lu = a.copy()
    perm = np.arange(m)
    row_scale = np.abs(a).max(axis=1)
    for k in range(m):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        piv = abs(lu[p, k])
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        if piv <= pivot_tolerance * row_scale[perm[k]]:
            raise SingularError(
                f"singular matrix: pivot {k} has magnitude {piv:.3e}",
                pivot_index=k, context=context)
        if k + 1 < m:
            lu[k + 1:, k] /= lu[k, k]
            lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return LUFactors(lu=lu, perm=perm)


def lu_solve(factors: LUFactors, rhs) -> np.ndarray:
    """Solve A x = rhs given LUFactors of A. rhs may be a vector or matrix."""
    b = np.asarray(rhs, dtype=np.complex128)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    if b.shape[0] != factors.m:
        raise ValueError(f"rhs has {b.shape[0]} rows, expected {factors.m}")
    lu = factors.lu
    m = factors.m
    y = b[factors.perm].copy()
    for k in range(1, m):
        y[k] -= lu[k, :k] @ y[:k]
    for k in range(m - 1, -1, -1):
        if k + 1 < m:
            y[k] -= lu[k, k + 1:] @ y[k + 1:]
        y[k] /= lu[k, k]
    return y[:, 0] if vector else y


def invert(block, pivot_tolerance: float = DEFAULT_PIVOT_TOL,
           context: str | None = None) -> np.ndarray:
    """Invert a square block via LU with partial pivoting."""
    a = as_block(block)
    factors = lu_factor(a, pivot_tolerance, context=context)
    return lu_solve(factors, np.eye(a.shape[0], dtype=np.complex128))


def matmul(a, b) -> np.ndarray:
    """Multiply two blocks, checking the inner dimensions explicitly."""
    x = np.asarray(a, dtype=np.complex128)
    y = np.asarray(b, dtype=np.complex128)
    if x.ndim != 2 or y.ndim != 2:
        raise ValueError("matmul expects 2-d operands")
    if x.shape[1] != y.shape[0]:
        raise ValueError(f"inner dimensions differ: {x.shape} @ {y.shape}")
    return x @ y


def _two_norm_power(a: np.ndarray) -> tuple[float, bool]:
    """Largest singular value of ``a`` by power iteration on the Gram matrix.

    Returns (sigma, converged). The iterate lambda = ||G v|| is never above
    the true top eigenvalue of G = a^H a, so the estimate approaches sigma
    from below.
    """
    g = a.conj().T @ a
    ncols = g.shape[0]
    v = np.full(ncols, 1.0 / np.sqrt(ncols), dtype=np.complex128)
    lam_prev = -1.0
    lam = 0.0
    for _ in range(_POWER_MAXITER):
        w = g @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0, True
        v = w / lam
        if abs(lam - lam_prev) <= _POWER_RELTOL * lam:
            return float(np.sqrt(lam)), True
        lam_prev = lam
    return float(np.sqrt(lam)), False


def _two_norm_jacobi(a: np.ndarray) -> float:
    """Largest singular value via one-sided Jacobi orthogonalization.

    Deterministic cyclic sweeps; used as the fallback when power
    iteration stalls or fails its certificate check.
    """
    w = np.array(a, dtype=np.complex128, copy=True)
    ncols = w.shape[1]
    for _ in range(_JACOBI_MAX_SWEEPS):
        rotated = False
        for p in range(ncols - 1):
            for q in range(p + 1, ncols):
                gamma = np.vdot(w[:, p], w[:, q])
                alpha = np.vdot(w[:, p], w[:, p]).real
                beta = np.vdot(w[:, q], w[:, q]).real
                if abs(gamma) <= _JACOBI_TOL * np.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / abs(gamma)
                # Rotate columns p and (phase-adjusted) q to orthogonality.
                zeta = (beta - alpha) / (2.0 * abs(gamma))
                if zeta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = w[:, p].copy()
                col_q = w[:, q] * np.conj(phase)
                w[:, p] = c * col_p - s * col_q
                w[:, q] = s * col_p + c * col_q
        if not rotated:
            break
    return float(np.sqrt((np.abs(w) ** 2).sum(axis=0)).max())


def _two_norm(a: np.ndarray) -> float:
    if a.shape == (1, 1):
        return float(abs(a[0, 0]))
    scale = float(np.abs(a).max())
    if scale == 0.0:
        return 0.0
    b = a / scale
    sigma, converged = _two_norm_power(b)
    # Cheap lower bounds on sigma_max certify the power iteration result;
    # the all-ones start vector can be orthogonal to the top singular
    # direction, in which case the iteration converges to a smaller sigma.
    sq = np.abs(b) ** 2
    certificate = max(
        float(np.sqrt(sq.sum(axis=0).max())),
        float(np.sqrt(sq.sum(axis=1).max())),
        float(np.sqrt(sq.sum() / min(b.shape))),
    )
    if not converged or sigma < certificate * (1.0 - 1e-9):
        sigma = _two_norm_jacobi(b)
    return sigma * scale


def norm(block, kind: NormKind) -> float:
    """Matrix norm of a block: max column sum, max row sum, Frobenius,
    or the spectral norm."""
    a = np.asarray(block, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("norm expects a 2-d block")
    if a.size == 0:
        raise ValueError("norm of an empty block is undefined")
    if kind is NormKind.ONE:
        return float(np.abs(a).sum(axis=0).max())
    if kind is NormKind.INF:
        return float(np.abs(a).sum(axis=1).max())
    if kind is NormKind.FRO:
        scale = float(np.abs(a).max())
        if scale == 0.0:
            return 0.0
        return scale * float(np.sqrt((np.abs(a / scale) ** 2).sum()))
    if kind is NormKind.TWO:
        return _two_norm(a)
    raise ValueError(f"unknown norm kind {kind!r}")


def identity_norm(m: int, kind: NormKind) -> float:
    """Norm of the m-by-m identity: sqrt(m) for Frobenius, 1 otherwise."""
    if m < 1:
        raise ValueError("identity_norm needs m >= 1")
    if kind is NormKind.FRO:
        return float(np.sqrt(m))
    return 1.0


MAX_EIG_DIM = 64


def eigenvalues_small(block, max_iter: int = 100) -> np.ndarray:
    """Eigenvalues of a block of dimension at most 64, verified a posteriori.

    Each eigenpair must satisfy ||A v - lambda v|| <= 1e-8 ||A||_2; pairs
    that miss the target are refined by inverse iteration, and persistent
    failures raise ConvergenceError.
    """
    a = as_block(block)
    m = a.shape[0]
    if m > MAX_EIG_DIM:
        raise ValueError(f"eigenvalues_small caps dimension at {MAX_EIG_DIM}, got {m}")
    try:
        vals, vecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    scale = _two_norm(a)
    tol = 1e-8 * scale if scale > 0.0 else 1e-8
    for k in range(m):
        v = vecs[:, k]
        lam = vals[k]
        res = float(np.linalg.norm(a @ v - lam * v))
        if res <= tol:
            continue
        # Inverse iteration with the computed eigenvalue as a fixed shift.
        shift = a - lam * np.eye(m, dtype=np.complex128)
        refined = False
        for _ in range(max_iter):
            try:
                v = lu_solve(lu_factor(shift), v)
            except SingularError:
                # Shifted matrix numerically singular: nudge off the
                # eigenvalue by one unit of scale roundoff.
                shift = shift + (1e-14 * max(scale, 1.0)) * np.eye(m)
                continue
            v = v / np.linalg.norm(v)
            res = float(np.linalg.norm(a @ v - lam * v))
            if res <= tol:
                refined = True
                break
        if not refined:
            raise ConvergenceError(
                f"eigenpair {k} residual {res:.3e} above tolerance {tol:.3e}")
    return vals
