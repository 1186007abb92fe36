"""Small dense linear-algebra helpers with flop accounting.

Thin wrappers over numpy/scipy factorizations used by the oracles and
the m x m dual solves.  They translate failures into library errors and
charge the shared flop counter so that dense baselines and recursive
algorithms are priced consistently.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from . import flops
from .errors import NotPositiveDefinite


def chol_factor(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive definite matrix."""
    n = a.shape[0]
    flops.add(flops.cholesky(n))
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None


def chol_solve(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = low.shape[0]
    nrhs = 1 if b.ndim == 1 else b.shape[1]
    flops.add(flops.chol_solve(n, nrhs))
    return scipy.linalg.cho_solve((low, True), b, check_finite=False)


def solve_pd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b for symmetric positive definite a."""
    return chol_solve(chol_factor(a), b)


def chol_inverse(low: np.ndarray) -> np.ndarray:
    """Explicit inverse from a Cholesky factor (standard 2n^3/3 cost)."""
    n = low.shape[0]
    flops.add((2 * n ** 3) // 3)
    inv = scipy.linalg.cho_solve((low, True), np.eye(n), check_finite=False)
    return 0.5 * (inv + inv.T)


def eigh_psd(a: np.ndarray):
    """Eigendecomposition of a symmetric matrix, flop-charged."""
    flops.add(flops.sym_eig(a.shape[0]))
    return np.linalg.eigh(a)


def pinv_solve_psd(a: np.ndarray, b: np.ndarray, rcond: float = 1e-12):
    """Minimum-norm solve of a symmetric PSD system via eigendecomposition.

    Returns ``(x, rank)`` where rank counts eigenvalues above
    ``rcond * max(eig)``.
    """
    w, v = eigh_psd(a)
    wmax = float(w[-1]) if w.size else 0.0
    keep = w > max(rcond * wmax, 0.0)
    rank = int(np.count_nonzero(keep))
    n = a.shape[0]
    nrhs = 1 if b.ndim == 1 else b.shape[1]
    flops.add(flops.gemm(rank, n, nrhs) * 2)
    if rank == 0:
        return np.zeros_like(b), 0
    vk = v[:, keep]
    x = vk @ ((vk.T @ b).T / w[keep]).T
    return x, rank


def psd_rank(a: np.ndarray, rcond: float = 1e-12) -> int:
    w = eigh_psd(a)[0]
    wmax = float(w[-1]) if w.size else 0.0
    return int(np.count_nonzero(w > max(rcond * wmax, 0.0)))


class SmallPD:
    """Cached factorization of a small SPD matrix (a joint-space inertia).

    Scalar 1x1 blocks are inverted directly; larger blocks hold a
    Cholesky factor.  Raises :class:`NotPositiveDefinite` if the block
    is not PD.  Callers charge flops themselves.
    """

    __slots__ = ("n", "_inv", "_low")

    def __init__(self, d: np.ndarray):
        self.n = d.shape[0]
        if self.n == 1:
            if d[0, 0] <= 0.0:
                raise NotPositiveDefinite("1x1 block is not positive")
            self._inv = 1.0 / d[0, 0]
            self._low = None
        else:
            self._inv = None
            try:
                self._low = np.linalg.cholesky(d)
            except np.linalg.LinAlgError as exc:
                raise NotPositiveDefinite(str(exc)) from None

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._low is None:
            return rhs * self._inv
        return scipy.linalg.cho_solve((self._low, True), rhs, check_finite=False)

    @property
    def min_pivot(self) -> float:
        if self._low is None:
            return 1.0 / self._inv if self._inv else 0.0
        return float(np.min(np.diag(self._low)) ** 2)
