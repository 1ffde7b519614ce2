"""Moment-matching reduced-order models and stabilizing output-injection gains."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from .basis import eval_basis
from .newton import Solution
from .problems import Problem, linearize


class UnstableGainError(RuntimeError):
    """The chosen gain does not stabilize the reduced dynamics at the origin."""


class NotDetectableError(RuntimeError):
    """(S, L) has unstable or marginal modes invisible to the output."""


@dataclass
class GainSpec:
    """Output-injection gain for the reduced dynamics.

    kind 'constant' uses a fixed d x m matrix G; 'chain_linear' uses (0, c);
    'chain_vdp' uses (0, mu*(1 - r_1^2) + c), matching the ladder benchmarks.
    """

    kind: str
    G: np.ndarray | None = None
    c: float = 10.0
    mu: float = 0.25

    def matrix(self, r: np.ndarray) -> np.ndarray:
        if self.kind == "constant":
            return self.G
        if self.kind == "chain_linear":
            return np.array([[0.0], [self.c]])
        if self.kind == "chain_vdp":
            return np.array([[0.0], [self.mu * (1.0 - r[0] ** 2) + self.c]])
        raise ValueError(f"unknown gain kind {self.kind!r}")


@dataclass
class ReducedOrderModel:
    """Reduced dynamics s(r) - g(r) l(r) + g(r) u with output h(pi^N(r))."""

    dim: int
    dynamics: callable = field(repr=False)
    output: callable = field(repr=False)
    gain_spec: GainSpec = None
    pi_solution: Solution = None
    generator: object = field(default=None, repr=False)


def build_rom(problem: Problem, solution: Solution, gain: GainSpec) -> ReducedOrderModel:
    """Assemble the reduced-order model from a converged coefficient block."""
    if not solution.converged:
        raise ValueError("solution did not converge; refusing to build a reduced model")
    gen, sys = problem.generator, problem.system
    basis = solution.basis
    C = solution.blocks(sys.n)

    def dynamics(r, u):
        r = np.asarray(r, dtype=float)
        g = gain.matrix(r)
        lr = np.atleast_1d(gen.l(r))
        return np.atleast_1d(gen.s(r)) - g @ lr + g @ np.atleast_1d(u)

    def output(r):
        x = eval_basis(basis, np.asarray(r, dtype=float)) @ C.T
        return np.atleast_1d(sys.h(x))

    rom = ReducedOrderModel(
        dim=gen.d, dynamics=dynamics, output=output,
        gain_spec=gain, pi_solution=solution, generator=gen,
    )
    report = verify_rom_stability(rom, problem)
    if not report["stable"]:
        raise UnstableGainError(
            f"reduced dynamics unstable at the origin, eigenvalues {report['eigenvalues']}"
        )
    return rom


def stabilizing_gain(S: np.ndarray, L: np.ndarray, target_margin: float = 0.5) -> np.ndarray:
    """Find G with max Re eig(S - G L) <= -target_margin by pole relocation.

    Works through the dual pair (S^T, L^T); raises NotDetectableError when
    unstable or marginal modes are unobservable.
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    L = np.atleast_2d(np.asarray(L, dtype=float))
    d = S.shape[0]
    poles = np.array([-target_margin - 0.5 * k for k in range(d)])
    try:
        placed = scipy.signal.place_poles(S.T, L.T, poles)
    except ValueError as exc:
        raise NotDetectableError(f"pole placement failed: {exc}") from exc
    G = placed.gain_matrix.T
    eigs = np.linalg.eigvals(S - G @ L)
    if np.max(eigs.real) > -target_margin + 1e-8:
        raise NotDetectableError(
            f"could not reach margin {target_margin}; eigenvalues {eigs}"
        )
    return G


def verify_rom_stability(rom: ReducedOrderModel, problem: Problem, step: float = 1e-6) -> dict:
    """Finite-difference linearization of r -> s(r) - g(r) l(r) at the origin."""
    gen = problem.generator
    d = rom.dim

    def field_at(r):
        g = rom.gain_spec.matrix(r)
        return np.atleast_1d(gen.s(r)) - g @ np.atleast_1d(gen.l(r))

    J = np.empty((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = step
        J[:, j] = (field_at(e) - field_at(-e)) / (2.0 * step)
    eigs = np.linalg.eigvals(J)
    return {
        "stable": bool(np.max(eigs.real) < 0.0),
        "eigenvalues": eigs,
        "jacobian": J,
    }


def default_gain(problem: Problem, c: float = 10.0, target_margin: float = 0.5) -> GainSpec:
    """Benchmark-appropriate gain: hand-crafted for the ladder problems,
    pole-relocated constant matrix otherwise."""
    if problem.system.structure_tag == "chain_cubic":
        if "mu" in problem.params:
            return GainSpec(kind="chain_vdp", c=c, mu=problem.params["mu"])
        return GainSpec(kind="chain_linear", c=c)
    S, L, _, _ = linearize(problem)
    return GainSpec(kind="constant", G=stabilizing_gain(S, L, target_margin))
