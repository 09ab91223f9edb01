"""A priori decay bounds on the block norms of the inverse.

For a row block diagonally dominant block tridiagonal matrix A with
inverse Z, the coefficient tables tau and omega bound the off-diagonal
decay of Z:

    ||Z_ij|| <= ||Z_jj|| * tau_{i,t} ... tau_{j-1,t}       for i < j,
    ||Z_ij|| <= ||Z_jj|| * omega_{j+1,t} ... omega_{i,t}   for i > j,

together with a two-sided estimate of the diagonal block norms. The
refinement step t runs from 1 to n-1; coefficients never increase with t,
so every refinement step tightens (or preserves) the bounds.

Indices in formulas are 1-based to match the recurrences; arrays store
row i at index i-1 and step t at index t-1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .inverse import BlockInverse
from .kernels import NormKind, identity_norm, lu_factor, lu_solve, norm
from .structures import BlockTridiagonalMatrix


class DominanceViolation(ValueError):
    """A refinement denominator dropped to zero or below."""

    def __init__(self, row: int, step: int, denominator: float, which: str):
        super().__init__(
            f"{which} denominator {denominator:.6g} <= 0 in row {row} at step {step}; "
            "the matrix is not row block diagonally dominant enough")
        self.row = row
        self.step = step


@dataclass(frozen=True)
class TauOmegaTable:
    """Refined decay coefficients; tau[i-1, t-1] holds tau_{i,t}."""

    norm_kind: NormKind
    tau: np.ndarray
    omega: np.ndarray

    @property
    def n(self) -> int:
        return self.tau.shape[0]

    @property
    def t_max(self) -> int:
        return self.tau.shape[1]

    def tau_at(self, i: int, t: int) -> float:
        """tau_{i,t} with the boundary convention tau_0 = 0."""
        if not 0 <= i <= self.n:
            raise IndexError(f"row {i} out of range 0..{self.n}")
        if not 1 <= t <= self.t_max:
            raise IndexError(f"step {t} out of range 1..{self.t_max}")
        return 0.0 if i == 0 else float(self.tau[i - 1, t - 1])

    def omega_at(self, i: int, t: int) -> float:
        """omega_{i,t} with the boundary convention omega_{n+1} = 0."""
        if not 1 <= i <= self.n + 1:
            raise IndexError(f"row {i} out of range 1..{self.n + 1}")
        if not 1 <= t <= self.t_max:
            raise IndexError(f"step {t} out of range 1..{self.t_max}")
        return 0.0 if i == self.n + 1 else float(self.omega[i - 1, t - 1])

    def rho(self, t: int) -> tuple[float, float]:
        """(max_i tau_{i,t}, max_i omega_{i,t}): per-step decay rates."""
        return float(self.tau[:, t - 1].max()), float(self.omega[:, t - 1].max())


def _ratio(num: float, den: float, row: int, step: int, which: str) -> float:
    # A zero numerator gives a zero coefficient regardless of the
    # denominator; only rows that actually couple need den > 0.
    if num == 0.0:
        return 0.0
    if den <= 0.0:
        raise DominanceViolation(row, step, den, which)
    return num / den


def compute_tau_omega(a: BlockTridiagonalMatrix, kind: NormKind,
                      t_max: int | None = None) -> TauOmegaTable:
    """Base coefficients (t=1) and their refinements up to t_max.

    t_max defaults to n-1 (clamped to at least 1). Raises
    DominanceViolation when a denominator is nonpositive while its
    numerator is nonzero, and SingularError for singular diagonal blocks.
    """
    n = a.n
    if t_max is None:
        t_max = max(1, n - 1)
    if t_max < 1:
        raise ValueError("t_max must be at least 1")

    # nab[i-1] = ||A_i^{-1} B_i||  (zero for i = n),
    # nac[i-1] = ||A_i^{-1} C_{i-1}||  (zero for i = 1).
    nab = np.zeros(n)
    nac = np.zeros(n)
    for i in range(n):
        factors = lu_factor(a.diag[i], context=f"A_{i + 1} inversion")
        if i < n - 1:
            nab[i] = norm(lu_solve(factors, a.sup[i]), kind)
        if i > 0:
            nac[i] = norm(lu_solve(factors, a.sub[i - 1]), kind)

    tau = np.zeros((n, t_max))
    omega = np.zeros((n, t_max))
    for i in range(1, n + 1):
        tau[i - 1, 0] = _ratio(nab[i - 1], 1.0 - nac[i - 1], i, 1, "tau")
        omega[i - 1, 0] = _ratio(nac[i - 1], 1.0 - nab[i - 1], i, 1, "omega")
    for t in range(2, t_max + 1):
        for i in range(1, n + 1):
            if t > i:
                tau[i - 1, t - 1] = tau[i - 1, t - 2]
            else:
                prev = tau[i - 2, t - 2] if i >= 2 else 0.0
                tau[i - 1, t - 1] = _ratio(
                    nab[i - 1], 1.0 - nac[i - 1] * prev, i, t, "tau")
            if i > n - t + 1:
                omega[i - 1, t - 1] = omega[i - 1, t - 2]
            else:
                nxt = omega[i, t - 2] if i <= n - 1 else 0.0
                omega[i - 1, t - 1] = _ratio(
                    nac[i - 1], 1.0 - nab[i - 1] * nxt, i, t, "omega")
    return TauOmegaTable(norm_kind=kind, tau=tau, omega=omega)


@dataclass(frozen=True)
class ChainFactors:
    """Matrix chains whose norms the tau/omega coefficients bound.

    l_blocks[k] holds L_{k+1} and t_blocks[k] holds T_{k+1} for
    k = 0..n-2; m_blocks[k] holds M_{k+2} and w_blocks[k] holds W_{k+2}.
    """

    l_blocks: np.ndarray
    t_blocks: np.ndarray
    m_blocks: np.ndarray
    w_blocks: np.ndarray

    def L(self, i: int) -> np.ndarray:
        return self.l_blocks[i - 1]

    def T(self, i: int) -> np.ndarray:
        return self.t_blocks[i - 1]

    def M(self, i: int) -> np.ndarray:
        return self.m_blocks[i - 2]

    def W(self, i: int) -> np.ndarray:
        return self.w_blocks[i - 2]


def compute_chains(a: BlockTridiagonalMatrix) -> ChainFactors:
    """Forward chain L_i (i = 1..n-1) and backward chain M_i (i = 2..n).

    L_1 = T_1 = A_1^{-1} B_1, then T_i = I - A_i^{-1} C_{i-1} L_{i-1} and
    L_i = T_i^{-1} A_i^{-1} B_i; the M/W chain mirrors this from row n.
    The inverse factor sequences satisfy U_i = -L_i U_{i+1} and
    Y_i = -M_i Y_{i-1}.
    """
    n, m = a.n, a.m
    eye = np.eye(m, dtype=np.complex128)
    if n == 1:
        empty = np.zeros((0, m, m), dtype=np.complex128)
        return ChainFactors(empty, empty, empty, empty)

    diag_factors = [lu_factor(a.diag[i], context=f"A_{i + 1} inversion")
                    for i in range(n)]
    ab = [lu_solve(diag_factors[i], a.sup[i]) for i in range(n - 1)]
    ac = [lu_solve(diag_factors[i], a.sub[i - 1]) for i in range(1, n)]

    l = [None] * (n - 1)
    t = [None] * (n - 1)
    l[0] = ab[0]
    t[0] = ab[0]
    for i in range(2, n):
        t[i - 1] = eye - ac[i - 2] @ l[i - 2]
        l[i - 1] = lu_solve(lu_factor(t[i - 1], context=f"T_{i} inversion"), ab[i - 1])

    mm = [None] * (n - 1)
    w = [None] * (n - 1)
    mm[n - 2] = ac[n - 2]
    w[n - 2] = ac[n - 2]
    for i in range(n - 1, 1, -1):
        w[i - 2] = eye - ab[i - 1] @ mm[i - 1]
        mm[i - 2] = lu_solve(lu_factor(w[i - 2], context=f"W_{i} inversion"), ac[i - 2])

    return ChainFactors(l_blocks=np.asarray(l), t_blocks=np.asarray(t),
                        m_blocks=np.asarray(mm), w_blocks=np.asarray(w))


@dataclass(frozen=True)
class BoundsReport:
    """Bounds, validity flags and relative errors at one refinement step.

    ``upper[i-1, j-1]`` bounds ||Z_ij||; on the diagonal it is the upper
    estimate of ||Z_ii|| and is +inf with ``diag_upper_valid[i-1]`` False
    when the estimate's denominator is nonpositive. ``e_upper`` holds
    (u - ||Z||)/u with NaN where undefined; ``max_eu`` is its largest
    finite off-diagonal entry (None when there is none).
    """

    t: int
    norm_kind: NormKind
    upper: np.ndarray
    lower: np.ndarray
    diag_upper_valid: np.ndarray
    z_norms: np.ndarray | None
    e_upper: np.ndarray | None
    e_lower: np.ndarray | None
    max_eu: float | None
    max_el: float | None
    rho1: float
    rho2: float
    anchored_on_inverse: bool

    @property
    def n(self) -> int:
        return self.upper.shape[0]

    def summary_dict(self) -> dict:
        return {
            "t": self.t,
            "max_Eu": self.max_eu,
            "max_El": self.max_el,
            "rho1": self.rho1,
            "rho2": self.rho2,
        }

    def write_csv(self, path) -> None:
        def fmt(v: float) -> str:
            if np.isnan(v):
                return "nan"
            if np.isinf(v):
                return "inf"
            return "%.17g" % v

        lines = ["i,j,norm_Zij,u_ij,valid,E_u"]
        for i in range(self.n):
            for j in range(self.n):
                nz = float(self.z_norms[i, j]) if self.z_norms is not None else float("nan")
                eu = float(self.e_upper[i, j]) if self.e_upper is not None else float("nan")
                valid = 1 if np.isfinite(self.upper[i, j]) else 0
                lines.append("%d,%d,%s,%s,%d,%s" % (
                    i + 1, j + 1, fmt(nz), fmt(self.upper[i, j]), valid, fmt(eu)))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def compute_bounds(a: BlockTridiagonalMatrix, z: BlockInverse | None,
                   table: TauOmegaTable, t: int,
                   anchor_from_inverse: bool = True) -> BoundsReport:
    """Evaluate the decay bounds at refinement step t.

    With ``anchor_from_inverse`` the off-diagonal bounds are anchored on
    the computed ||Z_jj||; otherwise on the a priori diagonal upper
    estimates, which makes the report independent of z (z may be None,
    dropping the relative-error fields).
    """
    if not 1 <= t <= table.t_max:
        raise ValueError(f"step t={t} outside table range 1..{table.t_max}")
    if anchor_from_inverse and z is None:
        raise ValueError("anchor_from_inverse requires the computed inverse")
    n, m = a.n, a.m
    kind = table.norm_kind
    eye_n = identity_norm(m, kind)

    na = np.array([norm(a.diag[i], kind) for i in range(n)])
    nb = np.array([norm(a.sup[i], kind) for i in range(n - 1)])
    nc = np.array([norm(a.sub[i], kind) for i in range(n - 1)])
    inv_na = np.array([
        norm(lu_solve(lu_factor(a.diag[i], context=f"A_{i + 1} inversion"),
                      np.eye(m, dtype=np.complex128)), kind)
        for i in range(n)])

    # Diagonal sandwich: tau_{i-1,t} ||C_{i-1}|| and omega_{i+1,t} ||B_i||
    # vanish at the corners.
    lower = np.zeros(n)
    diag_upper = np.zeros(n)
    diag_valid = np.ones(n, dtype=bool)
    for i in range(1, n + 1):
        tail = 0.0
        if i > 1:
            tail += table.tau_at(i - 1, t) * nc[i - 2]
        if i < n:
            tail += table.omega_at(i + 1, t) * nb[i - 1]
        lower[i - 1] = eye_n / (na[i - 1] + tail)
        den = 1.0 / inv_na[i - 1] - tail
        if den > 0.0:
            diag_upper[i - 1] = eye_n / den
        else:
            diag_upper[i - 1] = np.inf
            diag_valid[i - 1] = False

    z_norms = None
    if z is not None:
        z_norms = z.norm_grid(kind)

    anchor = z_norms.diagonal().copy() if anchor_from_inverse else diag_upper.copy()

    upper = np.empty((n, n))
    for j in range(1, n + 1):
        upper[j - 1, j - 1] = diag_upper[j - 1]
        for i in range(1, n + 1):
            if i == j:
                continue
            if i < j:
                prod = float(np.prod([table.tau_at(k, t) for k in range(i, j)]))
            else:
                prod = float(np.prod([table.omega_at(k, t) for k in range(j + 1, i + 1)]))
            if np.isinf(anchor[j - 1]):
                upper[i - 1, j - 1] = np.inf
            else:
                upper[i - 1, j - 1] = anchor[j - 1] * prod

    e_upper = None
    e_lower = None
    max_eu = None
    max_el = None
    if z is not None:
        e_upper = np.full((n, n), np.nan)
        e_lower = np.full(n, np.nan)
        for i in range(n):
            for j in range(n):
                u = upper[i, j]
                if not np.isfinite(u):
                    continue
                if u > 0.0:
                    e_upper[i, j] = (u - z_norms[i, j]) / u
                elif z_norms[i, j] == 0.0:
                    e_upper[i, j] = 0.0
            if z_norms[i, i] > 0.0:
                e_lower[i] = (z_norms[i, i] - lower[i]) / z_norms[i, i]
        off = ~np.eye(n, dtype=bool) & np.isfinite(e_upper)
        if off.any():
            max_eu = float(e_upper[off].max())
        if np.isfinite(e_lower).any():
            max_el = float(np.nanmax(e_lower))

    rho1, rho2 = table.rho(t)
    return BoundsReport(
        t=t, norm_kind=kind, upper=upper, lower=lower,
        diag_upper_valid=diag_valid, z_norms=z_norms,
        e_upper=e_upper, e_lower=e_lower, max_eu=max_eu, max_el=max_el,
        rho1=rho1, rho2=rho2, anchored_on_inverse=anchor_from_inverse)


def decay_envelope(table: TauOmegaTable, t: int, z_diag_norms) -> np.ndarray:
    """Single-rate envelope rho1^(j-i) resp. rho2^(i-j) times ||Z_jj||.

    Always at least as large as the per-row product bounds; the diagonal
    is NaN since the envelope only covers off-diagonal blocks.
    """
    zd = np.asarray(z_diag_norms, dtype=float)
    n = table.n
    if zd.shape != (n,):
        raise ValueError(f"need {n} diagonal norms, got shape {zd.shape}")
    rho1, rho2 = table.rho(t)
    env = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(n):
            if i < j:
                env[i, j] = rho1 ** (j - i) * zd[j]
            elif i > j:
                env[i, j] = rho2 ** (i - j) * zd[j]
    return env
