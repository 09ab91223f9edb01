"""Block Gershgorin eigenvalue inclusion regions.

For a block partitioned matrix A, row i contributes two candidate sets:

    new:  sum_{j != i} ||(A_ii - z I)^{-1} A_ij||  >= 1
    fv:   ||(A_ii - z I)^{-1}|| sum_{j != i} ||A_ij||  >= 1

The new set is contained in the fv set row by row, both contain the
spectrum when unioned over rows, and for 1x1 blocks both collapse to the
classical Gershgorin disks. Points where A_ii - z I is singular belong to
both sets; their margins are +infinity.

Grid evaluation batches the shifted blocks per row and runs stacked
SVDs/solves over whole node chunks, optionally across threads
(BLOCKDOM_THREADS); chunk order is fixed, so output is deterministic.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .kernels import NormKind, eigenvalues_small, norm
from .structures import BlockTridiagonalMatrix, GeneralBlockMatrix

# A shifted diagonal block counts as singular when sigma_min falls at or
# below this multiple of sigma_max.
SINGULAR_SHIFT_RTOL = 1e-13


@dataclass(frozen=True)
class RegionQuery:
    """Membership margins of one point for one block row (1-based)."""

    z: complex
    row: int
    margin_new: float
    margin_fv: float

    @property
    def in_new(self) -> bool:
        return self.margin_new >= 1.0

    @property
    def in_fv(self) -> bool:
        return self.margin_fv >= 1.0


@dataclass(frozen=True)
class RegionGrid:
    """Margins of both region families on a rectangular node grid.

    ``margins_new[i, iy, ix]`` is the new-set margin of block row i+1 at
    node (re[ix], im[iy]); likewise ``margins_fv``.
    """

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int
    ny: int
    norm_kind: NormKind
    margins_new: np.ndarray
    margins_fv: np.ndarray

    @property
    def rows(self) -> int:
        return self.margins_new.shape[0]

    def re_values(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.nx)

    def im_values(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.ny)

    def member_new(self) -> np.ndarray:
        return self.margins_new >= 1.0

    def member_fv(self) -> np.ndarray:
        return self.margins_fv >= 1.0

    def write_csv(self, path) -> None:
        def fmt(v: float) -> str:
            return "inf" if np.isinf(v) else "%.17g" % v

        res = self.re_values()
        ims = self.im_values()
        lines = ["re,im,row,margin_new,margin_fv"]
        for iy in range(self.ny):
            for ix in range(self.nx):
                for i in range(self.rows):
                    lines.append("%s,%s,%d,%s,%s" % (
                        fmt(res[ix]), fmt(ims[iy]), i + 1,
                        fmt(self.margins_new[i, iy, ix]),
                        fmt(self.margins_fv[i, iy, ix])))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class ComparisonSummary:
    """Node counts comparing the two region families on one grid."""

    counts_new: tuple[int, ...]
    counts_fv: tuple[int, ...]
    union_count_new: int
    union_count_fv: int
    containment_violations: int
    node_area: float

    def to_json_dict(self) -> dict:
        ratios = [cn / cf if cf else float("nan")
                  for cn, cf in zip(self.counts_new, self.counts_fv)]
        return {
            "counts_new": list(self.counts_new),
            "counts_fv": list(self.counts_fv),
            "count_ratio": ratios,
            "union_count_new": self.union_count_new,
            "union_count_fv": self.union_count_fv,
            "union_area_new": self.union_count_new * self.node_area,
            "union_area_fv": self.union_count_fv * self.node_area,
            "containment_violations": self.containment_violations,
            "node_area": self.node_area,
        }


def _as_general(a) -> GeneralBlockMatrix:
    if isinstance(a, BlockTridiagonalMatrix):
        return a.to_general()
    if isinstance(a, GeneralBlockMatrix):
        return a
    raise TypeError(f"unsupported matrix type {type(a).__name__}")


def _batch_norm(stack: np.ndarray, kind: NormKind) -> np.ndarray:
    if kind is NormKind.ONE:
        return np.abs(stack).sum(axis=-2).max(axis=-1)
    if kind is NormKind.INF:
        return np.abs(stack).sum(axis=-1).max(axis=-1)
    if kind is NormKind.FRO:
        return np.sqrt((np.abs(stack) ** 2).sum(axis=(-2, -1)))
    return np.linalg.svd(stack, compute_uv=False)[:, 0]


def _row_margins(diag: np.ndarray, offs: list[np.ndarray], radius: float,
                 zs: np.ndarray, kind: NormKind) -> tuple[np.ndarray, np.ndarray]:
    """Margins of one block row at a batch of points."""
    m = diag.shape[0]
    if m == 1:
        dist = np.abs(diag[0, 0] - zs)
        with np.errstate(divide="ignore"):
            margin = np.where(dist == 0.0, np.inf, radius / np.where(dist == 0.0, 1.0, dist))
        return margin, margin.copy()

    npts = zs.shape[0]
    shifted = np.broadcast_to(diag, (npts, m, m)).copy()
    idx = np.arange(m)
    shifted[:, idx, idx] -= zs[:, None]
    svals = np.linalg.svd(shifted, compute_uv=False)
    singular = svals[:, -1] <= SINGULAR_SHIFT_RTOL * svals[:, 0]

    margins_new = np.full(npts, np.inf)
    margins_fv = np.full(npts, np.inf)
    ok = ~singular
    if ok.any():
        sub = shifted[ok]
        if kind is NormKind.TWO:
            inv_norms = 1.0 / svals[ok, -1]
        else:
            try:
                inv_norms = _batch_norm(np.linalg.inv(sub), kind)
            except np.linalg.LinAlgError:
                # A pivot underflowed despite the SVD mask: fall back to
                # one matrix at a time, marking failures singular.
                inv_norms = np.empty(sub.shape[0])
                for k in range(sub.shape[0]):
                    try:
                        inv_norms[k] = _batch_norm(np.linalg.inv(sub[k])[None], kind)[0]
                    except np.linalg.LinAlgError:
                        inv_norms[k] = np.inf
        margins_fv[ok] = inv_norms * radius
        total = np.zeros(sub.shape[0])
        for b in offs:
            total += _batch_norm(np.linalg.solve(sub, b), kind)
        margins_new[ok] = total
    return margins_new, margins_fv


def _rows_offs_radii(g: GeneralBlockMatrix, kind: NormKind):
    rows = []
    for i in range(g.n):
        offs = [np.ascontiguousarray(g.blocks[i, j]) for j in range(g.n) if j != i]
        radius = sum(norm(b, kind) for b in offs)
        rows.append((np.ascontiguousarray(g.blocks[i, i]), offs, radius))
    return rows


def margins_at(a, z: complex, kind: NormKind) -> list[RegionQuery]:
    """Both margins of every block row at a single point."""
    g = _as_general(a)
    zs = np.asarray([z], dtype=np.complex128)
    out = []
    for i, (diag, offs, radius) in enumerate(_rows_offs_radii(g, kind)):
        mn, mf = _row_margins(diag, offs, radius, zs, kind)
        out.append(RegionQuery(z=complex(z), row=i + 1,
                               margin_new=float(mn[0]), margin_fv=float(mf[0])))
    return out


def auto_box(a, kind: NormKind, pad: float = 0.1) -> tuple[float, float, float, float]:
    """Window covering the union of disks around each diagonal block's
    eigenvalues with that row's off-diagonal norm sum as radius."""
    g = _as_general(a)
    re_lo = im_lo = np.inf
    re_hi = im_hi = -np.inf
    for diag, _, radius in _rows_offs_radii(g, kind):
        eigs = eigenvalues_small(diag)
        re_lo = min(re_lo, float((eigs.real - radius).min()))
        re_hi = max(re_hi, float((eigs.real + radius).max()))
        im_lo = min(im_lo, float((eigs.imag - radius).min()))
        im_hi = max(im_hi, float((eigs.imag + radius).max()))
    pad_re = pad * (re_hi - re_lo)
    pad_im = pad * (im_hi - im_lo)
    if pad_re == 0.0:
        pad_re = 1.0
    if pad_im == 0.0:
        pad_im = 1.0
    return re_lo - pad_re, re_hi + pad_re, im_lo - pad_im, im_hi + pad_im


def eval_grid(a, box: tuple[float, float, float, float] | None,
              nx: int, ny: int, kind: NormKind,
              workers: int | None = None) -> RegionGrid:
    """Evaluate both margins for every block row on an nx-by-ny grid.

    ``box`` is (re_min, re_max, im_min, im_max); None selects auto_box.
    ``workers`` defaults to the BLOCKDOM_THREADS environment variable.
    """
    g = _as_general(a)
    if box is None:
        box = auto_box(g, kind)
    re_min, re_max, im_min, im_max = (float(v) for v in box)
    if not (re_min < re_max and im_min < im_max):
        raise ValueError(f"degenerate box {box}")
    if nx < 2 or ny < 2:
        raise ValueError("need nx >= 2 and ny >= 2")
    if workers is None:
        workers = max(1, int(os.environ.get("BLOCKDOM_THREADS", "1")))

    res = np.linspace(re_min, re_max, nx)
    ims = np.linspace(im_min, im_max, ny)
    zs = (res[None, :] + 1j * ims[:, None]).ravel()

    rows = _rows_offs_radii(g, kind)
    margins_new = np.empty((g.n, ny * nx))
    margins_fv = np.empty((g.n, ny * nx))

    if workers == 1:
        for i, (diag, offs, radius) in enumerate(rows):
            margins_new[i], margins_fv[i] = _row_margins(diag, offs, radius, zs, kind)
    else:
        chunks = np.array_split(np.arange(zs.shape[0]), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, (diag, offs, radius) in enumerate(rows):
                futures = [pool.submit(_row_margins, diag, offs, radius, zs[c], kind)
                           for c in chunks if c.size]
                mn = np.concatenate([f.result()[0] for f in futures])
                mf = np.concatenate([f.result()[1] for f in futures])
                margins_new[i], margins_fv[i] = mn, mf

    return RegionGrid(
        re_min=re_min, re_max=re_max, im_min=im_min, im_max=im_max,
        nx=nx, ny=ny, norm_kind=kind,
        margins_new=margins_new.reshape(g.n, ny, nx),
        margins_fv=margins_fv.reshape(g.n, ny, nx))


def compare_regions(grid: RegionGrid) -> ComparisonSummary:
    """Count member nodes per row and for the unions, and check row-wise
    containment of the new set in the fv set."""
    mn = grid.member_new()
    mf = grid.member_fv()
    dx = (grid.re_max - grid.re_min) / (grid.nx - 1)
    dy = (grid.im_max - grid.im_min) / (grid.ny - 1)
    return ComparisonSummary(
        counts_new=tuple(int(c) for c in mn.sum(axis=(1, 2))),
        counts_fv=tuple(int(c) for c in mf.sum(axis=(1, 2))),
        union_count_new=int(mn.any(axis=0).sum()),
        union_count_fv=int(mf.any(axis=0).sum()),
        containment_violations=int((mn & ~mf).sum()),
        node_area=dx * dy)
