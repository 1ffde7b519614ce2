"""Problem data: signal generators, full-order systems, and built-in benchmarks.

A problem couples an autonomous signal generator (s, l) with a full-order
system (f, h) through u = l(omega).  Polynomial maps can be given as
coefficient tables (exponent multi-index -> coefficient, per component),
which enables exact integration during operator assembly; transcendental
dynamics are provided through the built-in constructors.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


class PolyMap:
    """Vector polynomial map R^k -> R^q defined by coefficient tables.

    ``tables`` is a list (one entry per output component) of dicts mapping
    exponent tuples of length ``nvars`` to real coefficients.
    """

    def __init__(self, tables, nvars: int):
        self.nvars = nvars
        self.nout = len(tables)
        self.tables = [dict(t) for t in tables]
        self._exps = []
        self._coefs = []
        for t in self.tables:
            items = sorted(t.items())
            exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), nvars)
            coefs = np.array([c for _, c in items], dtype=float)
            self._exps.append(exps)
            self._coefs.append(coefs)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        single = z.ndim == 1
        pts = z[None, :] if single else z
        out = np.zeros((pts.shape[0], self.nout))
        for i, (exps, coefs) in enumerate(zip(self._exps, self._coefs)):
            if len(coefs) == 0:
                continue
            monos = np.prod(pts[:, None, :] ** exps[None, :, :], axis=2)
            out[:, i] = monos @ coefs
        return out[0] if single else out

    def jacobian(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        single = z.ndim == 1
        pts = z[None, :] if single else z
        jac = np.zeros((pts.shape[0], self.nout, self.nvars))
        for i, (exps, coefs) in enumerate(zip(self._exps, self._coefs)):
            for j in range(self.nvars):
                sel = exps[:, j] > 0
                if not np.any(sel):
                    continue
                dexps = exps[sel].copy()
                dcoefs = coefs[sel] * dexps[:, j]
                dexps[:, j] -= 1
                monos = np.prod(pts[:, None, :] ** dexps[None, :, :], axis=2)
                jac[:, i, j] = monos @ dcoefs
        return jac[0] if single else jac

    def max_degree(self) -> int:
        return max((int(e.sum(axis=1).max()) for e in self._exps if len(e)), default=0)


@dataclass
class SignalGenerator:
    """Autonomous exosystem omega' = s(omega), v = l(omega)."""

    d: int
    m: int
    s: callable
    l: callable
    s_jacobian: callable
    l_jacobian: callable
    s_poly: PolyMap | None = None
    l_poly: PolyMap | None = None

    @property
    def is_polynomial(self) -> bool:
        return self.s_poly is not None and self.l_poly is not None


@dataclass
class FullOrderSystem:
    """Controlled dynamics x' = f(x, u), y = h(x)."""

    n: int
    m: int
    p: int
    f: callable
    h: callable
    f_jacobian_x: callable
    f_jacobian_u: callable
    structure_tag: str = "generic"
    f_poly: PolyMap | None = None  # over the concatenated variables (x, u)

    @property
    def is_polynomial(self) -> bool:
        return self.f_poly is not None or self.structure_tag == "chain_cubic"


@dataclass
class Problem:
    generator: SignalGenerator
    system: FullOrderSystem
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.generator.m != self.system.m:
            raise ValueError(
                f"generator output dimension {self.generator.m} != system input "
                f"dimension {self.system.m}"
            )

    @property
    def is_polynomial(self) -> bool:
        return self.generator.is_polynomial and self.system.is_polynomial


def generator_from_tables(d: int, m: int, s_tables, l_tables) -> SignalGenerator:
    """Build a polynomial signal generator from coefficient tables."""
    s_poly = PolyMap(s_tables, d)
    l_poly = PolyMap(l_tables, d)
    if s_poly.nout != d or l_poly.nout != m:
        raise ValueError("table counts inconsistent with d, m")
    return SignalGenerator(
        d=d, m=m,
        s=s_poly, l=l_poly,
        s_jacobian=s_poly.jacobian, l_jacobian=l_poly.jacobian,
        s_poly=s_poly, l_poly=l_poly,
    )


def system_from_tables(n: int, m: int, p: int, f_tables, h_tables) -> FullOrderSystem:
    """Build a polynomial system from tables; f is over the stacked (x, u)."""
    f_poly = PolyMap(f_tables, n + m)
    h_poly = PolyMap(h_tables, n)
    if f_poly.nout != n or h_poly.nout != p:
        raise ValueError("table counts inconsistent with n, p")

    def f(x, u):
        return f_poly(np.concatenate([np.atleast_1d(x), np.atleast_1d(u)]))

    def f_jacobian_x(x, u):
        return f_poly.jacobian(np.concatenate([np.atleast_1d(x), np.atleast_1d(u)]))[:, :n]

    def f_jacobian_u(x, u):
        return f_poly.jacobian(np.concatenate([np.atleast_1d(x), np.atleast_1d(u)]))[:, n:]

    return FullOrderSystem(
        n=n, m=m, p=p,
        f=f, h=h_poly,
        f_jacobian_x=f_jacobian_x, f_jacobian_u=f_jacobian_u,
        f_poly=f_poly,
    )


# ---------------------------------------------------------------------------
# Built-in benchmark problems
# ---------------------------------------------------------------------------

def make_test1(a: float = 2.0) -> Problem:
    """Two-state benchmark with a rotational generator and known solution."""
    if a == 0:
        raise ValueError("require a != 0")
    gen = generator_from_tables(
        d=2, m=1,
        s_tables=[{(0, 1): a}, {(1, 0): -a}],
        l_tables=[{(1, 0): 1.0}],
    )
    # variables (x1, x2, u)
    sys = system_from_tables(
        n=2, m=1, p=1,
        f_tables=[
            {(1, 0, 0): -1.0, (0, 0, 1): 1.0},
            {(0, 1, 0): -1.0, (1, 0, 1): 1.0},
        ],
        h_tables=[{(1, 0): 1.0}],
    )
    return Problem(generator=gen, system=sys, params={"a": a})


def test1_exact_pi(a: float):
    """Closed-form invariant mapping for make_test1."""
    c1 = 1.0 / (1.0 + a * a)
    c2 = 1.0 / (1.0 + 5 * a * a + 4 * a ** 4)

    def pi(omega):
        w1, w2 = omega
        return np.array([
            c1 * (w1 - a * w2),
            c2 * ((1 + a * a) * w1 ** 2 - 3 * a * w1 * w2 + 3 * a * a * w2 ** 2),
        ])

    return pi


def test1_exact_coefficients(basis, a: float) -> np.ndarray:
    """Exact expansion coefficients of the make_test1 solution, shape (2, N)."""
    c1 = 1.0 / (1.0 + a * a)
    c2 = 1.0 / (1.0 + 5 * a * a + 4 * a ** 4)
    terms = [
        {(1, 0): c1, (0, 1): -a * c1},
        {(2, 0): (1 + a * a) * c2, (1, 1): -3 * a * c2, (0, 2): 3 * a * a * c2},
    ]
    coeffs = np.zeros((2, basis.size))
    lookup = {tuple(e): k for k, e in enumerate(basis.exponents)}
    for i, table in enumerate(terms):
        for exp, val in table.items():
            coeffs[i, lookup[exp]] = val
    return coeffs


def make_cart_pendulum(a1: float = 2.0, a2: float = 3.0, k: float = -2.0 / 3.0) -> Problem:
    """Cart-pendulum position-control benchmark with sinusoidal dynamics."""
    if a1 <= 0 or a2 <= 0:
        raise ValueError("require a1 > 0 and a2 > 0")
    if not k < -1.0 / a2:
        raise ValueError(f"require k < -1/a2 = {-1.0 / a2}, got k={k}")

    def s(omega):
        w1, w2 = omega
        return np.array([w2, a1 * np.sin(w1) / (1.0 + k * a2 * np.cos(w1))])

    def s_jacobian(omega):
        w1, _ = omega
        denom = 1.0 + k * a2 * np.cos(w1)
        ds2 = (a1 * np.cos(w1) * denom + a1 * np.sin(w1) * k * a2 * np.sin(w1)) / denom ** 2
        return np.array([[0.0, 1.0], [ds2, 0.0]])

    def l(omega):
        w1, _ = omega
        return np.array([k * a1 * np.sin(w1) / (1.0 + k * a2 * np.cos(w1))])

    def l_jacobian(omega):
        return (k * s_jacobian(omega)[1, :])[None, :]

    def f(x, u):
        u0 = np.atleast_1d(u)[0]
        return np.array([x[2], x[3], a1 * np.sin(x[0]) - a2 * np.cos(x[0]) * u0, u0])

    def f_jacobian_x(x, u):
        u0 = np.atleast_1d(u)[0]
        jac = np.zeros((4, 4))
        jac[0, 2] = 1.0
        jac[1, 3] = 1.0
        jac[2, 0] = a1 * np.cos(x[0]) + a2 * np.sin(x[0]) * u0
        return jac

    def f_jacobian_u(x, u):
        return np.array([[0.0], [0.0], [-a2 * np.cos(x[0])], [1.0]])

    gen = SignalGenerator(d=2, m=1, s=s, l=l, s_jacobian=s_jacobian, l_jacobian=l_jacobian)

    def h(x):
        return np.array([x[0]])

    sys = FullOrderSystem(
        n=4, m=1, p=1,
        f=f, h=h,
        f_jacobian_x=f_jacobian_x, f_jacobian_u=f_jacobian_u,
    )
    return Problem(generator=gen, system=sys, params={"a1": a1, "a2": a2, "k": k})


def cart_pendulum_exact_coefficients(basis, k: float) -> np.ndarray:
    """Exact coefficients (w1, k w1, w2, k w2) of the cart-pendulum solution."""
    coeffs = np.zeros((4, basis.size))
    lookup = {tuple(e): j for j, e in enumerate(basis.exponents)}
    coeffs[0, lookup[(1, 0)]] = 1.0
    coeffs[1, lookup[(1, 0)]] = k
    coeffs[2, lookup[(0, 1)]] = 1.0
    coeffs[3, lookup[(0, 1)]] = k
    return coeffs


def make_rl_ladder(n: int, kappa: float = 1.1) -> FullOrderSystem:
    """Resistor-inductor ladder: tridiagonal coupling, cubic local nonlinearity.

    The linear part has -2*kappa on the diagonal and 1 on the off-diagonals,
    every component carries -(x_i^2/2 + x_i^3/3), the input enters only the
    first equation, and the output is x_1.
    """
    if n < 2:
        raise ValueError(f"require n >= 2, got n={n}")
    T = np.diag(-2.0 * kappa * np.ones(n)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)
    b = np.zeros(n)
    b[0] = 1.0

    def f(x, u):
        x = np.asarray(x, dtype=float)
        u0 = np.atleast_1d(u)[0]
        return T @ x - (x * x / 2.0 + x * x * x / 3.0) + b * u0

    def f_jacobian_x(x, u):
        x = np.asarray(x, dtype=float)
        return T - np.diag(x + x * x)

    def f_jacobian_u(x, u):
        return b[:, None].copy()

    def h(x):
        return np.array([x[0]])

    return FullOrderSystem(
        n=n, m=1, p=1,
        f=f, h=h,
        f_jacobian_x=f_jacobian_x, f_jacobian_u=f_jacobian_u,
        structure_tag="chain_cubic",
    )


def make_linear_oscillator(a: float = 2.0) -> SignalGenerator:
    """Harmonic oscillator generator s = (a w2, -a w1), output w2."""
    if a == 0:
        raise ValueError("require a != 0")
    return generator_from_tables(
        d=2, m=1,
        s_tables=[{(0, 1): a}, {(1, 0): -a}],
        l_tables=[{(0, 1): 1.0}],
    )


def make_van_der_pol(mu: float = 0.25) -> SignalGenerator:
    """Van der Pol oscillator generator, output w2."""
    if mu <= 0:
        raise ValueError(f"require mu > 0, got mu={mu}")
    return generator_from_tables(
        d=2, m=1,
        s_tables=[
            {(0, 1): 1.0},
            {(1, 0): -1.0, (0, 1): mu, (2, 1): -mu},
        ],
        l_tables=[{(0, 1): 1.0}],
    )


def make_rl_linear(n: int = 2, a: float = 2.0, kappa: float = 1.1) -> Problem:
    """RL ladder driven by the harmonic oscillator generator."""
    return Problem(
        generator=make_linear_oscillator(a),
        system=make_rl_ladder(n, kappa),
        params={"a": a, "kappa": kappa},
    )


def make_rl_vdp(n: int = 2, mu: float = 0.25, kappa: float = 1.1) -> Problem:
    """RL ladder driven by the Van der Pol generator."""
    return Problem(
        generator=make_van_der_pol(mu),
        system=make_rl_ladder(n, kappa),
        params={"mu": mu, "kappa": kappa},
    )


# ---------------------------------------------------------------------------
# Linearization and assumption checks
# ---------------------------------------------------------------------------

def linearize(problem: Problem):
    """Jacobians (S, L, A_sys, B_sys) of the problem data at the origin."""
    gen, sys = problem.generator, problem.system
    zero_w = np.zeros(gen.d)
    zero_x = np.zeros(sys.n)
    zero_u = np.zeros(sys.m)
    S = np.asarray(gen.s_jacobian(zero_w), dtype=float)
    L = np.atleast_2d(np.asarray(gen.l_jacobian(zero_w), dtype=float))
    A_sys = np.asarray(sys.f_jacobian_x(zero_x, zero_u), dtype=float)
    B_sys = np.asarray(sys.f_jacobian_u(zero_x, zero_u), dtype=float).reshape(sys.n, sys.m)
    return S, L, A_sys, B_sys


def check_assumptions(problem: Problem, tol: float = 1e-9) -> dict:
    """Advisory report on generator neutral stability (necessary condition)
    and first-approximation stability of the system."""
    S, _, A_sys, _ = linearize(problem)
    s_eigs = np.linalg.eigvals(S)
    a_eigs = np.linalg.eigvals(A_sys)
    purely_imaginary = bool(np.all(np.abs(s_eigs.real) < tol))
    simple = len(set(np.round(s_eigs, 9))) == len(s_eigs)
    a1 = purely_imaginary and simple
    a2 = bool(np.all(a_eigs.real < 0))
    return {
        "A1_necessary": a1,
        "A2": a2,
        "details": {
            "generator_eigenvalues": s_eigs,
            "system_eigenvalues": a_eigs,
            "generator_spectrum_imaginary": purely_imaginary,
            "generator_spectrum_simple": simple,
        },
    }
