"""Command-line front end: ``reinhardt {norms,project,extend,cover,kernel,verify}``.

Exit codes: 0 success, 1 certificate or suite failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from .covering import finite_subcover
from .domains import (PROFILE_CATALOG, AnnulusProduct, DomainError, domain_from_config,
                      domain_to_config, index_window)
from .extension import certify_extension, extension_product
from .friedrichs import project_conjugate, project_conjugate_by_quadrature
from .kernel import TruncatedKernel, kernel_eval, reproducing_check
from .norms import NormTable
from .quadrature import QuadratureError
from .series import LaurentSeries
from .verify import SUITE_DOCS, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TIMESTAMP_KEY = "generated"

_pair = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_complex_vec = {"type": "array", "items": {"oneOf": [{"type": "number"}, _pair]}, "minItems": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["annulus_product", "hartogs", "log_profile"]},
        "dim": {"type": "integer", "minimum": 1},
        "radii": {"type": "array", "items": _pair, "minItems": 1},
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "profile": {
            "type": "object",
            "required": ["type", "params"],
            "properties": {"type": {"enum": list(PROFILE_CATALOG)},
                           "params": {"type": "array", "items": {"type": "number"}}},
            "additionalProperties": False,
        },
        "bounding_box": {"type": "array", "items": _pair, "minItems": 1},
        "degree_cap": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "extension_radii": {"type": "array", "items": _pair, "minItems": 1},
        "points": {"type": "array", "items": {
            "type": "object", "required": ["z"],
            "properties": {"z": _complex_vec, "w": _complex_vec}, "additionalProperties": False}},
        "suites": {"type": "array", "items": {"type": "string"}},
        "comment": {"type": "string"},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "annulus_product"}}}, "then": {"required": ["radii"]}},
        {"if": {"properties": {"kind": {"const": "log_profile"}}}, "then": {"required": ["dim", "profile"]}},
    ],
    "additionalProperties": False,
}


class UsageError(Exception):
    pass


def load_config(path: str) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from None
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise UsageError(f"schema error at {where}: {exc.message}") from None
    return cfg


def strip_timestamp(text: str) -> str:
    """Drop the timestamp line so artifacts from identical runs compare equal."""
    return "".join(line for line in text.splitlines(keepends=True)
                   if not line.lstrip().startswith((f'"{TIMESTAMP_KEY}"', f"# {TIMESTAMP_KEY}")))


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _dump(payload: dict) -> str:
    return json.dumps({TIMESTAMP_KEY: _now(), **payload}, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _complex_point(raw) -> np.ndarray:
    return np.array([complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in raw])


def _read_series(path: str | None, dim: int) -> LaurentSeries:
    if path is None:
        raise UsageError("this command needs --coeffs")
    try:
        with open(path) as fh:
            return LaurentSeries.from_lines(fh, dim)
    except OSError as exc:
        raise UsageError(f"cannot read coefficients: {exc}") from None


def _jsonable(x: float):
    return x if math.isfinite(x) else "inf"


# ---------------------------------------------------------------------------
# commands


def cmd_norms(cfg: dict, args) -> int:
    domain = domain_from_config(cfg)
    cap = args.degree_cap if args.degree_cap is not None else cfg.get("degree_cap", 3)
    table = NormTable(domain)
    _emit(f"# {TIMESTAMP_KEY}: {_now()}\n" + table.to_csv(index_window(domain.dim, cap)), args.out)
    return EXIT_OK


def cmd_project(cfg: dict, args) -> int:
    domain = domain_from_config(cfg)
    f = _read_series(args.coeffs, domain.dim)
    norms = NormTable(domain)
    g = project_conjugate(domain, f, norms)
    header = {"domain": domain_to_config(domain), "terms_in": len(f), "terms_out": len(g)}
    status = EXIT_OK
    if args.oracle:
        cap = max(f.max_abs_degree(), 1)
        h = project_conjugate_by_quadrature(domain, f, cap)
        keys = set(g.support) | set(h.support)
        worst = max((abs(g[k] - h[k]) for k in keys), default=0.0)
        tol = cfg.get("tolerance", 1e-8)
        header["oracle"] = {"max_discrepancy": worst, "tolerance": tol, "pass": worst <= tol}
        print(json.dumps(header["oracle"], sort_keys=True), file=sys.stderr)
        if worst > tol:
            status = EXIT_FAIL
    lines = [f"# {TIMESTAMP_KEY}: {_now()}", "# " + json.dumps(header, sort_keys=True)] + g.to_lines()
    _emit("\n".join(lines) + "\n", args.out)
    return status


def cmd_extend(cfg: dict, args) -> int:
    P = domain_from_config(cfg)
    if not isinstance(P, AnnulusProduct):
        raise DomainError("extend needs an annulus_product domain")
    P_ext, window = extension_product(P)
    if cfg.get("extension_radii") is not None:
        P_ext = AnnulusProduct(tuple(tuple(p) for p in cfg["extension_radii"]))
    cap = args.degree_cap if args.degree_cap is not None else cfg.get("degree_cap", 60)
    cert = certify_extension(P, P_ext, cap)
    payload = {"window": [list(w) for w in window.window],
               "log_midpoint_radii": [list(c) for c in window.chosen],
               "inside_window": window.contains(P_ext.radii),
               "certificate": cert.to_dict()}
    _emit(_dump(payload), args.out)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_cover(cfg: dict, args) -> int:
    domain = domain_from_config(cfg)
    samples = args.samples if args.samples is not None else cfg.get("samples", 400)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    cert = finite_subcover(domain, samples, seed)
    _emit(_dump({"domain": domain_to_config(domain), "certificate": cert.to_dict()}), args.out)
    if args.out:
        stem = Path(args.out).with_suffix("")
        Path(f"{stem}.hull.csv").write_text(cert.hull_csv())
        Path(f"{stem}.patches.csv").write_text(cert.patches_csv())
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_kernel(cfg: dict, args) -> int:
    domain = domain_from_config(cfg)
    N = args.degree_cap if args.degree_cap is not None else cfg.get("degree_cap", 20)
    K = TruncatedKernel(domain, N)
    f = _read_series(args.coeffs, domain.dim) if args.coeffs else None
    tol = cfg.get("tolerance", 1e-8)
    rows, ok = [], True
    for p in cfg.get("points", []):
        z = _complex_point(p["z"])
        w = _complex_point(p.get("w", p["z"]))
        if len(z) != domain.dim or len(w) != domain.dim:
            raise UsageError("point dimension does not match the domain")
        v = kernel_eval(K, z, w)
        row = {"z": [[c.real, c.imag] for c in z], "w": [[c.real, c.imag] for c in w],
               "value": [v.real, v.imag]}
        if f is not None:
            res = reproducing_check(K, f, z)
            row["reproducing_residual"] = res
            ok &= res <= tol
        rows.append(row)
    payload = {"domain": domain_to_config(domain), "degree_cap": N, "indices": len(K.indices),
               "evaluations": rows}
    _emit(_dump(payload), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg: dict, args) -> int:
    domain = domain_from_config(cfg)
    if args.degree_cap is not None:
        cfg = {**cfg, "degree_cap": args.degree_cap}
    if args.samples is not None:
        cfg = {**cfg, "samples": args.samples}
    if args.seed is not None:
        cfg = {**cfg, "seed": args.seed}
    try:
        checks = run_suites(domain, cfg, cfg.get("suites"))
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    failed = [c.name for c in checks if c.passed is False]
    payload = {"pass": not failed, "failed": failed, "checks": [c.to_dict() for c in checks]}
    _emit(_dump(payload), args.out)
    for c in checks:
        print(f"{c.to_dict()['status'].upper():4s} {c.name} {c.detail}".rstrip(), file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "norms": cmd_norms,
    "project": cmd_project,
    "extend": cmd_extend,
    "cover": cmd_cover,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reinhardt", description="Bergman projections on Reinhardt domains.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--coeffs", help="coefficient file, one 'a_1 ... a_n re im' per line")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--degree-cap", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--oracle", action="store_true", help="cross-check a projection by quadrature")
    p.add_argument("--list", action="store_true", help="list verification suites and exit")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify" and args.list:
        for name, doc in SUITE_DOCS.items():
            print(f"{name:12s} {doc}")
        return EXIT_OK
    for flag in ("degree_cap", "samples", "seed"):
        v = getattr(args, flag)
        if v is not None and v < 0:
            print(f"error: --{flag.replace('_', '-')} must be non-negative", file=sys.stderr)
            return EXIT_USAGE
    if not args.config:
        print("error: --config is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
