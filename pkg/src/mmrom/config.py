"""Run configuration: YAML schema, validation, and object construction."""
from __future__ import annotations

import numpy as np
import yaml

from .newton import SolverOptions
from .problems import (
    Problem,
    generator_from_tables,
    make_cart_pendulum,
    make_rl_linear,
    make_rl_vdp,
    make_test1,
    system_from_tables,
)
from .quadrature import BoxDomain
from .rom import GainSpec, default_gain
from .simulate import SimConfig


class ConfigError(ValueError):
    """Invalid or unknown configuration content; message names the field."""


_SCHEMA = {
    "problem": {"name", "params", "generic"},
    "domain": {"lo", "hi"},
    "degree": None,
    "quadrature": None,
    "solver": {"tol_F_l1", "max_iter", "backend", "rank_cutoff", "damping"},
    "rom": {"gain", "c", "mu", "margin", "G"},
    "simulation": {
        "t_start", "t_end", "method", "abs_tol", "rel_tol",
        "fixed_step", "steady_window_fraction", "omega0", "r0", "x0",
    },
    "output_dir": None,
}

_BUILTIN_PARAMS = {
    "test1": {"a"},
    "cart_pendulum": {"a1", "a2", "k"},
    "rl_linear": {"n", "a", "kappa"},
    "rl_vdp": {"n", "mu", "kappa"},
}


def _check_keys(mapping: dict, allowed, where: str) -> None:
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where}: expected a mapping")
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"{where}: unknown key {key!r}")


def validate_config(cfg: dict) -> dict:
    _check_keys(cfg, _SCHEMA, "config")
    for key in ("problem", "domain", "degree"):
        if key not in cfg:
            raise ConfigError(f"config: missing required key {key!r}")
    for key, allowed in _SCHEMA.items():
        if allowed is not None and key in cfg:
            _check_keys(cfg[key], allowed, key)
    prob = cfg["problem"]
    name = prob.get("name")
    if name is None:
        raise ConfigError("problem.name: missing")
    if name == "generic":
        if "generic" not in prob:
            raise ConfigError("problem.generic: required for generic problems")
        _check_keys(prob["generic"], {"d", "n", "m", "p", "s", "l", "f", "h"}, "problem.generic")
    elif name in _BUILTIN_PARAMS:
        _check_keys(prob.get("params", {}), _BUILTIN_PARAMS[name], f"problem.params ({name})")
    else:
        raise ConfigError(
            f"problem.name: unknown builtin {name!r}; expected one of "
            f"{sorted(_BUILTIN_PARAMS) + ['generic']}"
        )
    if not isinstance(cfg["degree"], int) or cfg["degree"] < 1:
        raise ConfigError("degree: must be a positive integer")
    return cfg


def load_config(path) -> dict:
    with open(path) as fh:
        cfg = yaml.safe_load(fh)
    return validate_config(cfg)


def dump_config(cfg: dict) -> str:
    return yaml.safe_dump(cfg, sort_keys=True)


def _tables_from_config(raw):
    # per component: list of [exponent-list, coefficient] pairs
    tables = []
    for comp in raw:
        tables.append({tuple(int(e) for e in exps): float(coef) for exps, coef in comp})
    return tables


def build_problem(cfg: dict) -> Problem:
    prob = cfg["problem"]
    name = prob["name"]
    params = prob.get("params", {}) or {}
    if name == "test1":
        return make_test1(**params)
    if name == "cart_pendulum":
        return make_cart_pendulum(**params)
    if name == "rl_linear":
        return make_rl_linear(**params)
    if name == "rl_vdp":
        return make_rl_vdp(**params)
    g = prob["generic"]
    gen = generator_from_tables(
        d=int(g["d"]), m=int(g["m"]),
        s_tables=_tables_from_config(g["s"]),
        l_tables=_tables_from_config(g["l"]),
    )
    sys = system_from_tables(
        n=int(g["n"]), m=int(g["m"]), p=int(g["p"]),
        f_tables=_tables_from_config(g["f"]),
        h_tables=_tables_from_config(g["h"]),
    )
    return Problem(generator=gen, system=sys, params={})


def build_domain(cfg: dict) -> BoxDomain:
    dom = cfg["domain"]
    return BoxDomain(lo=np.asarray(dom["lo"], dtype=float),
                     hi=np.asarray(dom["hi"], dtype=float))


def build_solver_options(cfg: dict) -> SolverOptions:
    raw = cfg.get("solver", {}) or {}
    return SolverOptions(**raw)


def build_sim_config(cfg: dict):
    raw = dict(cfg.get("simulation", {}) or {})
    omega0 = np.asarray(raw.pop("omega0", [0.1, 0.2]), dtype=float)
    r0 = np.asarray(raw.pop("r0", [0.0, 1.0]), dtype=float)
    x0 = raw.pop("x0", None)
    t_span = (float(raw.pop("t_start", 0.0)), float(raw.pop("t_end", 50.0)))
    sim = SimConfig(t_span=t_span, **raw)
    return sim, omega0, r0, x0


def build_gain(cfg: dict, problem: Problem) -> GainSpec:
    raw = dict(cfg.get("rom", {}) or {})
    kind = raw.get("gain", "auto")
    c = float(raw.get("c", 10.0))
    if kind == "auto":
        return default_gain(problem, c=c, target_margin=float(raw.get("margin", 0.5)))
    if kind == "constant":
        if "G" not in raw:
            raise ConfigError("rom.G: required for constant gain")
        return GainSpec(kind="constant", G=np.asarray(raw["G"], dtype=float))
    if kind == "chain_linear":
        return GainSpec(kind="chain_linear", c=c)
    if kind == "chain_vdp":
        return GainSpec(kind="chain_vdp", c=c,
                        mu=float(raw.get("mu", problem.params.get("mu", 0.25))))
    raise ConfigError(f"rom.gain: unknown kind {kind!r}")
