"""JSON (de)serialization of solution specs and job configurations.

A spec is a JSON object with a ``"family"`` discriminator; complex numbers
are written as ``[re, im]`` and may be read from a plain number, a pair or
``{"re": .., "im": ..}``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from .exceptions import ConfigError, ConstraintViolation, NoRoot
from .residuals import DEFAULT_TOLERANCES
from .solutions import (
    CompositeSpec,
    CylComponent,
    CylStringSpec,
    EllipticStringSpec,
    HedgehogSpec,
    MassiveCylSpec,
    SphComponent,
    solve_elliptic_lambda,
)
from .solutions.base import as_complex

FAMILIES = ("cyl_string", "massive_cyl", "elliptic_string", "hedgehog", "composite")
TASKS = ("verify", "charge", "locate", "trace", "closure", "sample-grid")

# non-residual thresholds, overridable from the config
EXTRA_TOLERANCES = {
    "locus": 1e-8,
    "zero": 1e-10,
    "charge_defect": 0.05,
    "closure": 1e-6,
}


def default_tolerances() -> Dict[str, float]:
    return {**DEFAULT_TOLERANCES, **EXTRA_TOLERANCES}


# --- spec <-> dict ----------------------------------------------------------

def _cx(v: complex) -> list:
    v = complex(v)
    return [v.real, v.imag]


def spec_to_dict(spec) -> dict:
    """Resolved, JSON-ready description of a spec (inverse of :func:`spec_from_dict`)."""
    if isinstance(spec, CylStringSpec):
        return {
            "family": "cyl_string",
            "components": [{"C": _cx(c.C), "n": c.n, "k": c.k} for c in spec.components],
            "c": _cx(spec.c),
            "sign": spec.sign,
        }
    if isinstance(spec, MassiveCylSpec):
        return {
            "family": "massive_cyl",
            "C": _cx(spec.C),
            "n": spec.n,
            "k": spec.k,
            "m": spec.m,
            "sign": spec.sign,
            "dim": spec.dim,
        }
    if isinstance(spec, EllipticStringSpec):
        return {
            "family": "elliptic_string",
            "C": _cx(spec.C),
            "c0": spec.c0,
            "k": spec.k,
            "a": spec.a,
            "n": spec.n,
            "lam": spec.lam,
            "sign": spec.sign,
        }
    if isinstance(spec, HedgehogSpec):
        out = {
            "family": "hedgehog",
            "components": [{"C": _cx(c.C), "n": c.n} for c in spec.components],
            "c": _cx(spec.c),
            "sign": spec.sign,
        }
        if spec.m_pow is not None:
            out["m_pow"] = spec.m_pow
        return out
    if isinstance(spec, CompositeSpec):
        return {"family": "composite", "base": spec_to_dict(spec.base), "coeffs": list(spec.coeffs)}
    raise TypeError(f"cannot serialise {type(spec).__name__}")


class _Reader:
    """Field access with a dotted path for error messages."""

    def __init__(self, data, path):
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected an object, got {type(data).__name__}")
        self.data, self.path = data, path

    def get(self, key, kind, default=...):
        where = f"{self.path}.{key}"
        if key not in self.data:
            if default is ...:
                raise ConfigError(f"{where}: required field missing")
            return default
        v = self.data[key]
        try:
            if kind == "complex":
                return as_complex(v)
            if kind == "int":
                if isinstance(v, bool) or float(v) != int(v):
                    raise ValueError
                return int(v)
            if kind == "float":
                if isinstance(v, bool):
                    raise ValueError
                f = float(v)
                if not math.isfinite(f):
                    raise ValueError
                return f
            if kind == "list":
                if not isinstance(v, list):
                    raise ValueError
                return v
        except (TypeError, ValueError):
            raise ConfigError(f"{where}: expected {kind}, got {v!r}") from None
        return v


def spec_from_dict(data, path: str = "spec", validate: bool = True):
    """Build a spec from its JSON form; elliptic ``lam`` is solved when omitted.

    Raises :class:`ConfigError` for structural problems and lets
    :class:`ConstraintViolation` through (prefixed with the field path) when
    ``validate`` is set.
    """
    r = _Reader(data, path)
    family = r.get("family", str)
    if family not in FAMILIES:
        raise ConfigError(f"{path}.family: unknown family {family!r}; expected one of {FAMILIES}")
    try:
        if family == "cyl_string":
            comps = []
            for i, c in enumerate(r.get("components", "list")):
                cr = _Reader(c, f"{path}.components[{i}]")
                comps.append(CylComponent(cr.get("C", "complex", 1.0), cr.get("n", "int"), cr.get("k", "float")))
            spec = CylStringSpec(tuple(comps), r.get("c", "complex", 0j), r.get("sign", "int", 1))
        elif family == "massive_cyl":
            spec = MassiveCylSpec(
                r.get("C", "complex", 1.0),
                r.get("n", "int"),
                r.get("k", "float", 0.0),
                r.get("m", "float"),
                r.get("sign", "int", 1),
                r.get("dim", "int", 3),
            )
        elif family == "elliptic_string":
            k, a, n = r.get("k", "float"), r.get("a", "float"), r.get("n", "int")
            lam = r.get("lam", "float", None)
            if lam is None:
                try:
                    lam = solve_elliptic_lambda(k, a, n)
                except (NoRoot, ValueError) as exc:
                    raise ConfigError(f"{path}.lam: could not solve the quantization condition ({exc})") from None
            spec = EllipticStringSpec(
                r.get("C", "complex", 1.0), r.get("c0", "float", 0.0), k, a, lam, n, r.get("sign", "int", 1)
            )
        elif family == "hedgehog":
            comps = []
            for i, c in enumerate(r.get("components", "list")):
                cr = _Reader(c, f"{path}.components[{i}]")
                comps.append(SphComponent(cr.get("C", "complex", 1.0), cr.get("n", "int")))
            spec = HedgehogSpec(
                tuple(comps), r.get("c", "complex", 0j), r.get("sign", "int", 1), r.get("m_pow", "float", None)
            )
        else:
            base = spec_from_dict(r.get("base", dict), f"{path}.base", validate=False)
            coeffs = [float(v) for v in r.get("coeffs", "list")]
            spec = CompositeSpec(base, tuple(coeffs))
    except ConfigError:
        raise
    except ConstraintViolation as exc:
        raise ConstraintViolation(f"{path}: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if validate:
        try:
            spec.validate()
        except ConstraintViolation as exc:
            raise type(exc)(f"{path}: {exc}") from None
    return spec


# --- job config -------------------------------------------------------------

@dataclass
class JobConfig:
    spec: Any
    tasks: List[dict]
    output: str = "out"
    seed: int = 0
    tolerances: Dict[str, float] = field(default_factory=default_tolerances)
    source: Optional[str] = None


def parse_job(data, source: str = "<config>") -> JobConfig:
    r = _Reader(data, "config")
    spec = spec_from_dict(r.get("spec", dict), "spec")
    tasks = r.get("tasks", "list")
    if not tasks:
        raise ConfigError("config.tasks: at least one task is required")
    parsed = []
    for i, t in enumerate(tasks):
        if isinstance(t, str):
            t = {"task": t}
        tr = _Reader(t, f"config.tasks[{i}]")
        kind = tr.get("task", str)
        if kind not in TASKS:
            raise ConfigError(f"config.tasks[{i}].task: unknown task {kind!r}; expected one of {TASKS}")
        parsed.append(dict(t))
    tol = default_tolerances()
    overrides = r.get("tolerances", dict, {})
    if not isinstance(overrides, dict):
        raise ConfigError("config.tolerances: expected an object")
    for key, v in overrides.items():
        if key not in tol:
            raise ConfigError(f"config.tolerances.{key}: unknown tolerance; expected one of {sorted(tol)}")
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError(f"config.tolerances.{key}: must be a positive number, got {v!r}")
        tol[key] = float(v)
    seed = r.get("seed", "int", 0)
    output = r.get("output", str, "out")
    return JobConfig(spec=spec, tasks=parsed, output=output, seed=seed, tolerances=tol, source=source)


def load_job(path) -> JobConfig:
    """Read and validate a JSON job file; JSON syntax errors report line and column."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
    try:
        return parse_job(data, str(path))
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    except ConstraintViolation as exc:
        raise type(exc)(f"{path}: {exc}") from None


def dumps(obj) -> str:
    """Deterministic JSON text: key order as built, shortest round-trip floats."""
    return json.dumps(_plain(obj), indent=2, allow_nan=True) + "\n"


def _plain(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj
