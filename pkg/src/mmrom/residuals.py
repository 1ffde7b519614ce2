"""Pointwise PDE residuals and weighted L2 residual norms over a subdomain."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .basis import Basis, eval_basis, eval_basis_gradient
from .assembly import _eval_map_at, _f_at_nodes
from .problems import Problem
from .quadrature import BoxDomain, tensor_rule

DEFAULT_NORM_QUADRATURE = 20


@dataclass
class ResidualReport:
    per_component_norms: np.ndarray
    weighted_norm: float
    subdomain: BoxDomain
    quadrature_order: int


def residual_at(problem: Problem, basis: Basis, c: np.ndarray, omega) -> np.ndarray:
    """Invariance-equation residual grad(pi_i) . s - f_i at one point."""
    gen, sys = problem.generator, problem.system
    C = np.asarray(c, dtype=float).reshape(sys.n, basis.size)
    omega = np.asarray(omega, dtype=float)
    pival = eval_basis(basis, omega) @ C.T
    grad = eval_basis_gradient(basis, omega)          # (N, d)
    sval = np.atleast_1d(gen.s(omega))
    advect = C @ (grad @ sval)                        # (n,)
    fval = np.asarray(sys.f(pival, np.atleast_1d(gen.l(omega))), dtype=float)
    if not np.all(np.isfinite(fval)):
        raise ValueError(f"non-finite dynamics at omega={omega}")
    return advect - fval


def _residual_at_nodes(problem: Problem, basis: Basis, C: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    gen = problem.generator
    bvals = eval_basis(basis, nodes)                  # (K, N)
    grads = eval_basis_gradient(basis, nodes)         # (K, N, d)
    svals = _eval_map_at(gen.s, nodes, gen.d)
    lvals = _eval_map_at(gen.l, nodes, gen.m)
    pivals = bvals @ C.T                              # (K, n)
    advect = np.zeros_like(pivals)
    for j in range(gen.d):
        advect += (grads[:, :, j] @ C.T) * svals[:, j:j + 1]
    fvals = _f_at_nodes(problem, pivals, lvals)
    return advect - fvals                             # (K, n)


def residual_norm(
    problem: Problem,
    basis: Basis,
    c: np.ndarray,
    W: BoxDomain | None = None,
    q: int = DEFAULT_NORM_QUADRATURE,
    solve_domain: BoxDomain | None = None,
) -> ResidualReport:
    """Per-component L2 residual norms over W and the coefficient-weighted
    aggregate norm."""
    n = problem.system.n
    if W is None:
        W = BoxDomain(lo=-0.7 * np.ones(basis.d), hi=0.7 * np.ones(basis.d))
    if solve_domain is not None and (
        np.any(W.lo < solve_domain.lo) or np.any(W.hi > solve_domain.hi)
    ):
        warnings.warn("residual subdomain extends beyond the solve domain", stacklevel=2)
    C = np.asarray(c, dtype=float).reshape(n, basis.size)
    rule = tensor_rule(W, q)
    R = _residual_at_nodes(problem, basis, C, rule.nodes)
    per_component = np.sqrt(rule.weights @ (R * R))
    block_norms = np.linalg.norm(C, axis=1)
    total = block_norms.sum()
    if total == 0.0:
        raise ValueError("all coefficient blocks are zero; weighted norm is undefined")
    weighted = float(block_norms @ per_component / total)
    return ResidualReport(
        per_component_norms=per_component,
        weighted_norm=weighted,
        subdomain=W,
        quadrature_order=q,
    )
