"""Newton iteration on the Galerkin coefficients, plus the Sylvester oracle."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import GalerkinOperators, jacobian_JF, residual_F
from .linear import (
    BlockTridiagonal,
    SingularMatrixError,
    solve_block_tridiagonal,
    solve_dense_lu,
    solve_pseudoinverse,
)
from .problems import Problem

BACKENDS = ("auto", "dense_lu", "pseudoinverse", "block_tridiagonal")

DIVERGENCE_FACTOR = 1e8
PIVOT_RTOL = 1e-12


class SingularJacobianError(RuntimeError):
    """Raised when even the pseudoinverse step stops reducing the residual."""


@dataclass
class SolverOptions:
    tol_F_l1: float = 1e-7
    max_iter: int = 300
    backend: str = "auto"
    rank_cutoff: float = 1e-10
    damping: float = 1.0
    initial_guess: np.ndarray | None = None

    def __post_init__(self):
        if self.tol_F_l1 <= 0:
            raise ValueError("tol_F_l1 must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0.0 < self.rank_cutoff < 1.0:
            raise ValueError("rank_cutoff must lie in (0, 1)")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}, expected one of {BACKENDS}")


@dataclass
class Solution:
    """Converged (or not) coefficient block with provenance."""

    c: np.ndarray
    iterations: int
    residual_history: list = field(repr=False)
    converged: bool
    backend_used: str
    basis: object = None
    domain: object = None

    def blocks(self, n: int) -> np.ndarray:
        return self.c.reshape(n, -1)


def newton_step(JF, F: np.ndarray, backend: str, rank_cutoff: float = 1e-10) -> np.ndarray:
    """Solve JF * delta = F with the requested backend."""
    if backend == "block_tridiagonal":
        if isinstance(JF, BlockTridiagonal):
            if JF.nblocks == 1:
                return np.linalg.solve(JF.diag[0], F)
            return solve_block_tridiagonal(JF, F)
        raise TypeError("block_tridiagonal backend requires a BlockTridiagonal Jacobian")
    A = JF.to_dense() if isinstance(JF, BlockTridiagonal) else JF
    if backend == "dense_lu":
        return solve_dense_lu(A, F, pivot_rtol=PIVOT_RTOL)
    if backend == "pseudoinverse":
        return solve_pseudoinverse(A, F, rank_cutoff=rank_cutoff)
    raise ValueError(f"unknown backend {backend!r}")


def solve_invariance(
    problem: Problem, ops: GalerkinOperators, options: SolverOptions | None = None
) -> Solution:
    """Newton iteration on F(c) = 0 from the configured initial guess."""
    opts = options or SolverOptions()
    n, N = problem.system.n, ops.size
    if opts.initial_guess is not None:
        c = np.asarray(opts.initial_guess, dtype=float).ravel().copy()
        if c.shape[0] != n * N:
            raise ValueError(f"initial guess has length {c.shape[0]}, expected {n * N}")
    else:
        c = np.zeros(n * N)

    backend = opts.backend
    if backend == "auto":
        backend = (
            "block_tridiagonal"
            if problem.system.structure_tag == "chain_cubic"
            else "dense_lu"
        )

    F = residual_F(problem, ops, c)
    history = [float(np.linalg.norm(F, 1))]
    iterations = 0
    stalled_pinv_steps = 0

    while history[-1] > opts.tol_F_l1 and iterations < opts.max_iter:
        if not np.isfinite(history[-1]) or history[-1] > DIVERGENCE_FACTOR * max(history[0], 1e-30):
            break
        JF = jacobian_JF(problem, ops, c)
        try:
            delta = newton_step(JF, F, backend, opts.rank_cutoff)
        except SingularMatrixError:
            backend = "pseudoinverse"
            delta = newton_step(JF, F, backend, opts.rank_cutoff)
        c = c - opts.damping * delta
        F = residual_F(problem, ops, c)
        norm = float(np.linalg.norm(F, 1))
        if not np.isfinite(norm):
            history.append(norm)
            iterations += 1
            break
        if backend == "pseudoinverse":
            stalled_pinv_steps = 0 if norm < history[-1] else stalled_pinv_steps + 1
            if stalled_pinv_steps >= 5:
                raise SingularJacobianError(
                    "pseudoinverse iteration failed to reduce |F|_1 over 5 consecutive steps"
                )
        history.append(norm)
        iterations += 1

    return Solution(
        c=c,
        iterations=iterations,
        residual_history=history,
        converged=bool(np.isfinite(history[-1]) and history[-1] <= opts.tol_F_l1),
        backend_used=backend,
        basis=ops.basis,
        domain=ops.domain,
    )


def solve_sylvester(S: np.ndarray, L: np.ndarray, A_sys: np.ndarray, B_sys: np.ndarray) -> np.ndarray:
    """Solve Pi S = A Pi + B L for the invariant mapping of a linear problem.

    Solved as the vectorized nd x nd linear system; raises if the spectra of
    S and A_sys overlap (singular system).
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    A_sys = np.atleast_2d(np.asarray(A_sys, dtype=float))
    L = np.atleast_2d(np.asarray(L, dtype=float))
    B_sys = np.atleast_2d(np.asarray(B_sys, dtype=float))
    n, d = A_sys.shape[0], S.shape[0]
    lhs = np.kron(S.T, np.eye(n)) - np.kron(np.eye(d), A_sys)
    rhs = (B_sys @ L).reshape(n * d, order="F")
    try:
        vec = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(
            "Sylvester system is singular (spectra of S and A overlap)"
        ) from exc
    return vec.reshape(n, d, order="F")
