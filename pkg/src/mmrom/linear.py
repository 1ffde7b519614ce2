"""Linear-solve backends for the Newton iteration."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when a direct factorization detects (near-)singularity."""


@dataclass
class BlockTridiagonal:
    """Block-tridiagonal matrix with a constant off-diagonal block.

    Diagonal blocks ``diag[i]`` are (N, N); the sub- and super-diagonal
    blocks are all equal to ``off``.
    """

    diag: list
    off: np.ndarray

    @property
    def nblocks(self) -> int:
        return len(self.diag)

    @property
    def block_size(self) -> int:
        return self.diag[0].shape[0]

    def to_dense(self) -> np.ndarray:
        n, N = self.nblocks, self.block_size
        out = np.zeros((n * N, n * N))
        for i, D in enumerate(self.diag):
            out[i * N:(i + 1) * N, i * N:(i + 1) * N] = D
            if i > 0:
                out[i * N:(i + 1) * N, (i - 1) * N:i * N] = self.off
            if i < n - 1:
                out[i * N:(i + 1) * N, (i + 1) * N:(i + 2) * N] = self.off
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        n, N = self.nblocks, self.block_size
        xb = x.reshape(n, N)
        out = np.empty_like(xb)
        for i in range(n):
            acc = self.diag[i] @ xb[i]
            if i > 0:
                acc = acc + self.off @ xb[i - 1]
            if i < n - 1:
                acc = acc + self.off @ xb[i + 1]
            out[i] = acc
        return out.ravel()


def solve_dense_lu(A: np.ndarray, b: np.ndarray, pivot_rtol: float = 1e-12) -> np.ndarray:
    """LU solve that raises SingularMatrixError on tiny pivots."""
    lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < pivot_rtol * pivots.max():
        raise SingularMatrixError(
            f"LU pivot ratio {pivots.min() / pivots.max():.3e} below {pivot_rtol:.1e}"
        )
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def solve_pseudoinverse(A: np.ndarray, b: np.ndarray, rank_cutoff: float = 1e-10) -> np.ndarray:
    """Minimum-norm least-squares solve, truncating singular values below
    rank_cutoff * sigma_max."""
    return np.linalg.pinv(A, rcond=rank_cutoff) @ b


def solve_block_tridiagonal(A: BlockTridiagonal, b: np.ndarray) -> np.ndarray:
    """Block Thomas elimination; raises SingularMatrixError if a reduced
    diagonal block is singular."""
    n, N = A.nblocks, A.block_size
    rhs = b.reshape(n, N)
    W = [None] * n
    g = [None] * n
    denom = A.diag[0]
    for i in range(n):
        if i > 0:
            denom = A.diag[i] - A.off @ W[i - 1]
        try:
            if i < n - 1:
                W[i] = np.linalg.solve(denom, A.off)
            g[i] = np.linalg.solve(
                denom, rhs[i] if i == 0 else rhs[i] - A.off @ g[i - 1]
            )
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError(f"singular reduced block at index {i}") from exc
    x = np.empty((n, N))
    x[n - 1] = g[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = g[i] - W[i] @ x[i + 1]
    return x.ravel()
