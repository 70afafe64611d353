"""Command-line front end: ``run``, ``validate`` and ``sample`` on JSON job files.

Exit status is 0 when every task passes, 2 when some task misses its
threshold and 1 for configuration errors (including violated solution
constraints).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import re
import sys
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import residuals as R
from .config import JobConfig, dumps, load_job, spec_to_dict
from .exceptions import ConfigError, ConstraintViolation, DomainError, EikonalError
from .field_core import TWO_PI, as_xyz, cylindrical_to_cartesian, spherical_to_cartesian, stereographic_project
from .solutions import CompositeSpec, CylStringSpec, EllipticStringSpec, HedgehogSpec, MassiveCylSpec
from .topology import (
    braid_closure,
    locate_strings,
    match_zeros,
    monopole_degree,
    predict_strings,
    trace_string_curves,
    winding_number,
)
from .topology.loci import _field_scale

log = logging.getLogger("eikonal_defects")

EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2


def _number(v, where: str) -> float:
    """A float, or a string such as ``"6pi"``, ``"2*pi/3"``."""
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    if isinstance(v, str):
        m = re.fullmatch(r"\s*([-+]?[0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*", v)
        if m:
            coef = float(m.group(1)) if m.group(1) not in ("", "+", "-") else float(m.group(1) + "1")
            return coef * np.pi / (float(m.group(2)) if m.group(2) else 1.0)
        try:
            return float(v)
        except ValueError:
            pass
    raise ConfigError(f"{where}: expected a number or a multiple of pi, got {v!r}")


def default_identities(spec):
    if isinstance(spec, CompositeSpec):
        return default_identities(spec.base)
    if isinstance(spec, MassiveCylSpec):
        return ["massive", "effective_mass"] if spec.dim == 2 else ["massive"]
    if isinstance(spec, HedgehogSpec):
        return ["eikonal"] if spec.general else ["laplace", "o3_eom"]
    return ["eikonal"]


def _is_spherical(spec) -> bool:
    return spec.box_system == "spherical"


class Job:
    """Runs the tasks of one :class:`JobConfig` and writes their reports."""

    def __init__(self, config: JobConfig, output: Path, quiet: bool = False):
        self.config = config
        self.spec = config.spec
        self.tol = config.tolerances
        self.out = output
        self.quiet = quiet
        self.curves = None
        self.timing = {}

    # --- tasks -----------------------------------------------------------

    def verify(self, t, where):
        ident = t.get("identity", default_identities(self.spec))
        idents = [ident] if isinstance(ident, str) else list(ident)
        for name in idents:
            if name not in R.RESIDUALS:
                raise ConfigError(f"{where}.identity: unknown identity {name!r}")
        count = int(t.get("count", 1000))
        box = t.get("box")
        if box is not None:
            box = {k: (_number(v[0], f"{where}.box.{k}"), _number(v[1], f"{where}.box.{k}")) for k, v in box.items()}
        pts = R.sample_points(self.spec, count, seed=self.config.seed, box=box)
        reports = []
        for name in idents:
            rep = R.residual(name, self.spec, pts)
            reports.append({**rep.to_dict(), "tolerance": self.tol[name], "passed": rep.passed(self.tol[name])})
        return all(r["passed"] for r in reports), {"reports": reports}

    def charge(self, t, where):
        expect = t.get("expect")
        try:
            if _is_spherical(self.spec):
                r = _number(t.get("r", 1.0), f"{where}.r")
                grid = tuple(int(g) for g in t.get("grid", (128, 128)))
                rep = monopole_degree(self.spec, r=r, grid=grid)
                kind = "degree"
            else:
                z = _number(t.get("z", 0.0), f"{where}.z")
                radius = t.get("radius")
                radius = None if radius is None else _number(radius, f"{where}.radius")
                samples = t.get("samples")
                center = tuple(t.get("center", (0.0, 0.0)))
                rep = winding_number(self.spec, z=z, radius=radius, samples=samples, center=center)
                kind = "winding"
        except (EikonalError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            return False, {"error": f"{type(exc).__name__}: {exc}"}
        ok = rep.defect < self.tol["charge_defect"] and (expect is None or rep.index == int(expect))
        return ok, {"kind": kind, **rep.to_dict(), "expected": expect}

    def locate(self, t, where):
        zs = t.get("z", [0.0])
        zs = [zs] if not isinstance(zs, list) else zs
        rho_max = t.get("rho_max")
        rho_max = None if rho_max is None else _number(rho_max, f"{where}.rho_max")
        slices, ok = [], True
        for zv in zs:
            z = _number(zv, f"{where}.z")
            zeros = locate_strings(self.spec, z, rho_max=rho_max, tol=self.tol["zero"])
            pred = predict_strings(self.spec, z)
            entry = {"z": z, "zeros": [list(p) for p in zeros]}
            if pred is not None:
                dev = match_zeros(zeros, pred)
                entry["predicted"] = pred[:, :2].tolist()
                entry["max_deviation"] = dev
                ok &= dev <= self.tol["locus"]
            ok &= bool(zeros)
            slices.append(entry)
        return ok, {"slices": slices}

    def _trace(self, z_min, z_max, step):
        curves = trace_string_curves(self.spec, z_min, z_max, step)
        self.curves = curves
        with open(self.out / "curves.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "z", "branch"])
            for c in curves:
                for x, y, z in c.points:
                    w.writerow([repr(float(x)), repr(float(y)), repr(float(z)), c.branch])
        return curves

    def trace(self, t, where):
        z_min = _number(t.get("z_min", 0.0), f"{where}.z_min")
        z_max = _number(t.get("z_max", "2pi"), f"{where}.z_max")
        step = _number(t.get("step", 0.05), f"{where}.step")
        try:
            curves = self._trace(z_min, z_max, step)
        except EikonalError as exc:
            return False, {"error": f"{type(exc).__name__}: {exc}"}
        scale = _field_scale(self.spec)
        summary = []
        worst = 0.0
        for c in curves:
            u = np.abs(self.spec.value(c.points)) / scale
            worst = max(worst, float(u.max()))
            summary.append(
                {
                    "branch": c.branch,
                    "points": int(len(c.points)),
                    "rho_min": float(c.rho.min()),
                    "rho_max": float(c.rho.max()),
                    "max_abs_u": float(u.max()),
                }
            )
        ok = bool(curves) and worst < self.tol["zero"]
        return ok, {"curves": summary, "csv": "curves.csv", "z_range": [z_min, z_max], "step": step}

    def closure(self, t, where):
        if "period" not in t:
            raise ConfigError(f"{where}.period: required field missing")
        period = _number(t["period"], f"{where}.period")
        step = _number(t.get("step", 0.05), f"{where}.step")
        try:
            curves = self.curves
            if not curves or curves[0].z_range[1] - curves[0].z_range[0] < period - 1e-9:
                curves = self._trace(0.0, period, step)
            bc = braid_closure(curves, period, tol=self.tol["closure"])
        except EikonalError as exc:
            return False, {"error": f"{type(exc).__name__}: {exc}"}
        ok = True
        expect = t.get("expect")
        if expect is not None:
            m = re.fullmatch(r"\s*T\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*", str(expect))
            if not m:
                raise ConfigError(f"{where}.expect: expected a label like 'T(2,3)', got {expect!r}")
            want = tuple(sorted((abs(int(m.group(1))), abs(int(m.group(2))))))
            ok = bc.torus_type == want
        return ok, {**bc.to_dict(), "expected": expect}

    def sample_grid(self, t, where):
        rows = sample_grid(self.spec, t, where)
        with open(self.out / "grid.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "z", "re_u", "im_u", "n1", "n2", "n3"])
            for row in rows:
                w.writerow([repr(float(v)) for v in row])
        return True, {"rows": len(rows), "csv": "grid.csv"}

    # --- driver ----------------------------------------------------------

    def run(self, only=None) -> int:
        self.out.mkdir(parents=True, exist_ok=True)
        handlers = {
            "verify": self.verify,
            "charge": self.charge,
            "locate": self.locate,
            "trace": self.trace,
            "closure": self.closure,
            "sample-grid": self.sample_grid,
        }
        used = {}
        status = EXIT_OK
        for i, t in enumerate(self.config.tasks):
            kind = t["task"]
            if only is not None and kind not in only:
                continue
            name = str(t.get("name", kind))
            used[name] = used.get(name, 0) + 1
            if used[name] > 1:
                name = f"{name}-{used[name]}"
            where = f"config.tasks[{i}]"
            start = time.perf_counter()
            ok, result = handlers[kind](t, where)
            self.timing[name] = time.perf_counter() - start
            report = {
                "task": kind,
                "name": name,
                "passed": bool(ok),
                "seed": self.config.seed,
                "parameters": {k: v for k, v in t.items() if k != "task"},
                "spec": spec_to_dict(self.spec),
                "tolerances": self.tol,
                "result": result,
            }
            (self.out / f"{name}.report.json").write_text(dumps(report))
            if not self.quiet:
                print(f"{name:<16} {'PASS' if ok else 'FAIL'}  {_headline(kind, result)}")
            if not ok:
                status = EXIT_FAIL
        # wall-clock times live apart from the reports so those stay reproducible
        (self.out / "timing.json").write_text(dumps({"seconds": self.timing}))
        return status


def _headline(kind, result) -> str:
    if "error" in result:
        return result["error"]
    if kind == "verify":
        return ", ".join(f"{r['identity']} max_rel={r['max_rel']:.2e}" for r in result["reports"])
    if kind == "charge":
        return f"{result['kind']} {result['index']} (defect {result['defect']:.1e})"
    if kind == "locate":
        return "; ".join(f"z={s['z']:g}: {len(s['zeros'])} zeros" for s in result["slices"])
    if kind == "trace":
        return f"{len(result['curves'])} curves"
    if kind == "closure":
        return f"{result['link_label']} ({result['name']})"
    return f"{result.get('rows', 0)} rows"


def _axis(spec, where):
    if isinstance(spec, (int, float)):
        return np.array([float(spec)])
    if not isinstance(spec, list) or len(spec) not in (1, 3):
        raise ConfigError(f"{where}: expected a number or [lo, hi, count]")
    if len(spec) == 1:
        return np.array([_number(spec[0], where)])
    lo, hi = _number(spec[0], where), _number(spec[1], where)
    return np.linspace(lo, hi, int(spec[2]))


def sample_grid(spec, t: Optional[dict] = None, where: str = "grid"):
    """Rows ``(x, y, z, Re u, Im u, n1, n2, n3)`` over a tensor grid.

    ``t["system"]`` picks the axes: cartesian ``x, y, z`` (default),
    cylindrical ``rho, phi, z`` or spherical ``r, theta, phi``; each axis is
    a number or ``[lo, hi, count]``.  Poles are written as ``u = inf`` with
    ``n = (0, 0, 1)``.
    """
    t = t or {}
    system = t.get("system", "cartesian")
    names = {
        "cartesian": ("x", "y", "z"),
        "cylindrical": ("rho", "phi", "z"),
        "spherical": ("r", "theta", "phi"),
    }
    if system not in names:
        raise ConfigError(f"{where}.system: expected one of {sorted(names)}, got {system!r}")
    defaults = {"x": [-2.0, 2.0, 8], "y": [-2.0, 2.0, 8], "z": 0.0, "rho": [0.5, 2.0, 4], "phi": [0.0, "2pi", 9],
                "r": [0.5, 2.0, 4], "theta": [0.2, 2.9, 6]}
    axes = [_axis(t.get(k, defaults[k]), f"{where}.{k}") for k in names[system]]
    A, B, C = np.meshgrid(*axes, indexing="ij")
    if system == "cartesian":
        xyz = np.stack([A, B, C], axis=-1)
    elif system == "cylindrical":
        xyz = cylindrical_to_cartesian(A, B, C)
    else:
        xyz = spherical_to_cartesian(A, B, C)
    xyz = as_xyz(xyz).reshape(-1, 3)
    try:
        pole = spec.pole_mask(xyz)
    except DomainError as exc:
        raise ConfigError(f"{where}: grid leaves the validity domain ({exc})") from None
    u = np.full(len(xyz), complex(np.inf, 0.0))
    with np.errstate(over="ignore", invalid="ignore"):
        u[~pole] = spec._value(xyz[~pole])
    bad = ~np.isfinite(u)
    u[bad] = complex(np.inf, 0.0)
    n = stereographic_project(u, pole | bad)
    return np.column_stack([xyz, u.real, u.imag, n])


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eikonal-defects", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("run", "run every task and write reports"),
        ("validate", "parse the config and check solution constraints only"),
        ("sample", "run only the sample-grid tasks (a default grid if none)"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="JSON job file")
        sp.add_argument("--output", help="output directory (overrides the config)")
        sp.add_argument("--seed", type=int, help="sampler seed (overrides the config)")
        sp.add_argument("--quiet", action="store_true", help="suppress the per-task summary")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        job = load_job(args.config)
    except (ConfigError, ConstraintViolation) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        job.seed = args.seed
    if args.command == "validate":
        if not args.quiet:
            print(f"{args.config}: ok ({job.spec.family}, {len(job.tasks)} tasks)")
        return EXIT_OK
    out = Path(args.output if args.output else job.output)
    if args.command == "sample" and not any(t["task"] == "sample-grid" for t in job.tasks):
        job.tasks = [{"task": "sample-grid"}]
    runner = Job(job, out, quiet=args.quiet)
    try:
        return runner.run(only={"sample-grid"} if args.command == "sample" else None)
    except (ConfigError, ConstraintViolation) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
