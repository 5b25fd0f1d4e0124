"""YAML experiment configs: system definitions, per-command parameters and validation.

Errors carry the offending key path and its line in the source text.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import yaml

from .errors import ConfigError
from .jets import make_primitive
from .symbolic import DEFAULT_BUDGET
from .system import (
    CantorSystem,
    gauss_digits,
    make_system,
    middle_alpha,
    perturbed,
    two_ratio,
)

COMMANDS = ("dim", "limitgeom", "marstrand", "sumscan", "extract", "recurrence")

DEFAULT_CONFIG = """\
systems:
  middle_third:
    generator: middle_alpha
    alpha: 0.3333333333333333
  half_quarter:
    generator: two_ratio
    r1: 0.5
    r2: 0.25
  gauss12:
    generator: gauss_digits
    digits: [1, 2]
  middle_04:
    generator: middle_alpha
    alpha: 0.6464466094067263
  perturbed_04:
    generator: perturbed
    eps: 0.05
    base:
      generator: two_ratio
      r1: 0.1907
      r2: 0.1907

experiments:
  dim:
    systems: [middle_third, half_quarter, gauss12]
    depths: [2, 4, 6, 8]
  limitgeom:
    system: gauss12
    tail_symbol: 1
    depths: [4, 5, 6, 7, 8, 9, 10, 11, 12]
    step: 2
    relation_n: 2
    relation_depth: 10
    h_prime_one:
      tail0: [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]
      tail1: [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 1]
      depth: 12
      points: 50
    periodic_words: [[1], [2], [1, 2]]
  marstrand:
    pair: [middle_third, middle_third]
    rhos: {base: 3, from: 2, to: 6}
    R: 4.0
    c0: 2.0
    s_values: [0.5, 1.0, 1.4142135623730951, 2.0]
  sumscan:
    pair: [perturbed_04, perturbed_04]
    map: sum
    R: 4.0
    s_points: 50
    deltas: {base: 2, from: 6, to: 14}
    tol: 0.1
    fit_scales: 5
  extract:
    system: middle_third
    a: 0.3
    b: 0.45
  recurrence:
    pair: [gauss12, gauss12]
    rho: 0.03125
    m: 3
    R: 4.0
    c0: 2.0
    s_points: 9
    c5_factor: 4.0
"""


# -- line lookup ------------------------------------------------------------------


def _line_index(text):
    """Map key paths to 1-based line numbers via the YAML node tree."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"YAML syntax error: {exc.problem if hasattr(exc, 'problem') else exc}", None, None if mark is None else mark.line + 1) from None
    index = {}

    def walk(node, path):
        index.setdefault(path, node.start_mark.line + 1)
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                key = yaml.safe_load(yaml.serialize(k)) if isinstance(k, yaml.ScalarNode) else k.value
                index[path + (key,)] = k.start_mark.line + 1
                walk(v, path + (key,))
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                walk(v, path + (i,))

    if root is not None:
        walk(root, ())
    return index


@dataclass
class ExperimentConfig:
    data: dict
    lines: dict = field(default_factory=dict)
    source: str = "<default>"

    def error(self, message, path):
        path = tuple(path)
        line = None
        for k in range(len(path), -1, -1):
            if path[:k] in self.lines:
                line = self.lines[path[:k]]
                break
        where = "/".join(str(p) for p in path)
        return ConfigError(f"{self.source}: {message}", where, line)

    def get(self, path, default=None):
        node = self.data
        for p in path:
            if isinstance(node, dict) and p in node:
                node = node[p]
            elif isinstance(node, list) and isinstance(p, int) and 0 <= p < len(node):
                node = node[p]
            else:
                return default
        return node

    def digest(self) -> str:
        canon = json.dumps(self.data, sort_keys=True, default=str, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def load_config(text: str | None = None, source: str = "<default>") -> ExperimentConfig:
    text = DEFAULT_CONFIG if text is None else text
    lines = _line_index(text)
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping", None, 1)
    return ExperimentConfig(data, lines, source)


def load_config_file(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return load_config(fh.read(), str(path))


# -- systems ------------------------------------------------------------------------


def _number(cfg, path, value, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise cfg.error(f"expected a number, got {value!r}", path)
    if positive and value <= 0:
        raise cfg.error("must be positive", path)
    return float(value)


def _require(cfg, spec, path, key):
    if key not in spec:
        raise cfg.error(f"missing field {key!r}", path)
    return spec[key]


def _build(cfg, spec, path) -> CantorSystem:
    if not isinstance(spec, dict):
        raise cfg.error("system definition must be a mapping", path)
    gen = spec.get("generator")
    try:
        if gen == "middle_alpha":
            return middle_alpha(_number(cfg, path + ("alpha",), _require(cfg, spec, path, "alpha")), bool(spec.get("normalized", False)))
        if gen == "two_ratio":
            r1 = _number(cfg, path + ("r1",), _require(cfg, spec, path, "r1"))
            r2 = _number(cfg, path + ("r2",), _require(cfg, spec, path, "r2"))
            return two_ratio(r1, r2, bool(spec.get("normalized", False)))
        if gen == "gauss_digits":
            return gauss_digits(_require(cfg, spec, path, "digits"))
        if gen == "perturbed":
            base = _build(cfg, _require(cfg, spec, path, "base"), path + ("base",))
            return perturbed(base, _number(cfg, path + ("eps",), _require(cfg, spec, path, "eps")))
        if gen is not None:
            raise cfg.error(f"unknown generator {gen!r}", path + ("generator",))
        return _explicit(cfg, spec, path)
    except ConfigError:
        raise
    except Exception as exc:  # invalid parameters surface as config errors at the system
        raise cfg.error(f"{type(exc).__name__}: {exc}", path) from None


def _explicit(cfg, spec, path) -> CantorSystem:
    alphabet = list(_require(cfg, spec, path, "alphabet"))
    transitions = [tuple(t) for t in _require(cfg, spec, path, "transitions")]
    base = _require(cfg, spec, path, "base_intervals")
    prims = {}
    for i, br in enumerate(_require(cfg, spec, path, "branches")):
        bpath = path + ("branches", i)
        src = _require(cfg, br, bpath, "from")
        dst = _require(cfg, br, bpath, "to")
        prim = make_primitive(_require(cfg, br, bpath, "family"), _require(cfg, br, bpath, "coeffs"))
        targets = [b for a, b in transitions if a == src] if dst == "*" else [dst]
        for b in targets:
            prims[(src, b)] = prim
    missing = [t for t in transitions if t not in prims]
    if missing:
        raise cfg.error(f"no branch for transitions {missing[:3]}", path + ("branches",))
    return make_system(alphabet, transitions, base, prims, spec.get("name", path[-1]))


def build_systems(cfg: ExperimentConfig) -> dict:
    systems = cfg.get(("systems",), {})
    if not isinstance(systems, dict) or not systems:
        raise cfg.error("no systems defined", ("systems",))
    out = {}
    for name, spec in systems.items():
        sys_ = _build(cfg, spec, ("systems", name))
        out[name] = sys_ if sys_.name == name else CantorSystem(sys_.spec, sys_.base_intervals, sys_.branches, str(name))
    return out


def resolve_scales(cfg, path, value) -> list:
    """A descending list of scales from an explicit list or {base, from, to}."""
    if isinstance(value, dict):
        base = _number(cfg, path + ("base",), _require(cfg, value, path, "base"), positive=True)
        lo, hi = int(_require(cfg, value, path, "from")), int(_require(cfg, value, path, "to"))
        vals = [base ** -k for k in range(lo, hi + 1)]
    elif isinstance(value, list):
        vals = [_number(cfg, path + (i,), v, positive=True) for i, v in enumerate(value)]
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise cfg.error("scale list must be sorted in descending order", path)
    else:
        raise cfg.error("expected a list of scales or {base, from, to}", path)
    if not vals:
        raise cfg.error("empty scale list", path)
    return vals


def system_ref(cfg, systems, path):
    name = cfg.get(path)
    if name not in systems:
        raise cfg.error(f"unknown system {name!r}", path)
    return systems[name]


def positive_int(cfg, path, value):
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise cfg.error(f"expected a positive integer, got {value!r}", path)
    return value


def check_budget(cfg, budget):
    if budget is None:
        return DEFAULT_BUDGET
    return positive_int(cfg, ("budget",), budget)


# -- emission -----------------------------------------------------------------------


def _prim_entry(prim):
    return {"family": prim.family, "coeffs": prim.coeffs()}


def system_to_config(system: CantorSystem) -> dict:
    """Explicit definition of ``system``; branches shared by one source symbol use ``to: '*'``."""
    spec = system.spec
    alphabet = list(spec.alphabet)
    trans = sorted(spec.transitions, key=lambda t: (spec.index(t[0]), spec.index(t[1])))
    branches = []
    for a in alphabet:
        succ = spec.successors(a)
        prims = [system.branches[(a, b)].primitive for b in succ]
        if all(p == prims[0] for p in prims):
            branches.append({"from": a, "to": "*", **_prim_entry(prims[0])})
        else:
            branches.extend({"from": a, "to": b, **_prim_entry(p)} for b, p in zip(succ, prims))
    return {
        "alphabet": alphabet,
        "transitions": [list(t) for t in trans],
        "base_intervals": {a: list(system.base_intervals[a]) for a in alphabet},
        "branches": branches,
    }


def dump_systems(systems: dict) -> str:
    return yaml.safe_dump({"systems": {k: system_to_config(v) for k, v in systems.items()}}, sort_keys=False)
