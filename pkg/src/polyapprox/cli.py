"""Command line front end.

Exit codes: 0 success, 1 configuration or usage error, 2 a checked
mathematical property failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import reporting
from .domain import (
    Box,
    Interval,
    QuadSpec,
    chunkiness,
    domain_from_mapping,
    parse_domain,
    quadrature,
    validate_star_ball,
)
from .errors import ApproxError, HypothesisViolatedError
from .field import CORPUS, parse_field
from .verify import (
    INTERP_CONSTANT,
    INTERP_TOL,
    BoundQuery,
    bound_check,
    constant_sweep,
    dilation_sweep,
    functional_check,
    interp1d_check,
    mean_minus_point,
    midpoint_error,
    point_evaluation,
)

log = logging.getLogger("polyapprox")

COMMANDS = ("check", "interp1d", "sweep", "dilate", "functional", "chunkiness")
DILATION_TOL = 1e-5

DEFAULTS = {
    "domain": ["interval:0,1"],
    "field": None,
    "m": None,
    "k": None,
    "p": None,
    "method": "averaged-taylor",
    "quad_order": 16,
    "mc_samples": 20000,
    "scheme": "auto",
    "seed": None,
    "out": None,
    "format": "csv",
    "workers": 1,
    "scales": [1.0, 0.5, 0.25, 0.125],
    "functional": "midpoint",
    "x0": None,
    "lengths": [1.0, 0.5, 0.25, 0.125],
}


# per command: (m, p) used when neither flags nor config set them
COMMAND_DEFAULTS = {
    "sweep": ([1, 2, 3], [1.0, 2.0, math.inf]),
    "dilate": ([1, 2, 3], [2.0, math.inf]),
    "functional": ([2], [math.inf]),
}


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    out = []
    for t in str(text).split(","):
        t = t.strip().lower()
        out.append(math.inf if t in ("inf", "infinity", "oo") else float(t))
    return out


def _ints(text: str) -> list[int]:
    return [int(t) for t in str(text).split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyapprox",
                     description="Polynomial approximation bounds in Sobolev seminorms: "
                                 + ", ".join(COMMANDS))
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}",
                                parser_class=_Parser)
    helps = {
        "check": "one bound check |u - v|_{k,p} vs d^(m-k) |u|_{m,p}",
        "interp1d": "linear interpolation error against (b-a)^2 sup|u''|",
        "sweep": "constant sweep over fields, domains, m, k, p",
        "dilate": "ratio invariance under dilation of the domain",
        "functional": "bound a linear functional vanishing on low-degree polynomials",
        "chunkiness": "star ball, rho_max and gamma of a domain",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name], description=helps[name])
        p.add_argument("--config", type=Path, help="YAML file with the same keys as the flags")
        p.add_argument("--domain", action="append",
                       help="domain tag, e.g. interval:0,1 square:1 disk:1 pacman:1,pi/2 (repeatable)")
        p.add_argument("--field", action="append",
                       help=f"corpus label ({', '.join(CORPUS)}) or poly:x^2*y (repeatable)")
        p.add_argument("--m", type=_ints, help="order(s), comma separated")
        p.add_argument("--k", type=_ints, help="derivative order(s), comma separated")
        p.add_argument("--p", type=_floats, help="exponent(s), comma separated; 'inf' allowed")
        p.add_argument("--method", choices=["averaged-taylor", "l2-projection", "l2", "taylor", "both"])
        p.add_argument("--quad-order", type=int, dest="quad_order")
        p.add_argument("--mc-samples", type=int, dest="mc_samples")
        p.add_argument("--scheme", choices=["auto", "gauss", "mc"])
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--workers", type=int)
        p.add_argument("--scales", type=_floats, help="dilation factors (dilate)")
        p.add_argument("--lengths", type=_floats, help="interval lengths (interp1d)")
        p.add_argument("--functional", choices=["midpoint", "mean-minus-point", "point"])
        p.add_argument("--x0", type=_floats, help="point for point-type functionals")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags (flags win)."""
    cfg = dict(DEFAULTS)
    if args.config is not None:
        try:
            loaded = yaml.safe_load(args.config.read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a mapping")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in cfg:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = value
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    # normalize scalar-or-list keys coming from YAML
    for key, conv in (("m", _ints), ("k", _ints), ("p", _floats), ("scales", _floats),
                      ("lengths", _floats)):
        v = cfg[key]
        if v is not None and not isinstance(v, list):
            cfg[key] = conv(v)
        elif isinstance(v, list):
            cfg[key] = [x for item in v for x in conv(item)]
    for key in ("domain", "field"):
        if isinstance(cfg[key], str):
            cfg[key] = [cfg[key]]
    try:
        domains = [domain_from_mapping(d) if isinstance(d, dict) else parse_domain(d)
                   for d in cfg["domain"]]
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    cfg["domains"] = domains
    tensorable = all(isinstance(d, (Interval, Box)) for d in domains)
    needs_mc = args.command != "chunkiness" and (
        cfg["scheme"] == "mc" or (cfg["scheme"] == "auto" and not tensorable))
    if needs_mc and cfg["seed"] is None:
        raise ConfigError("a seed is required when Monte-Carlo quadrature is used (--seed)")
    m_default, p_default = COMMAND_DEFAULTS.get(args.command, ([2], [2.0]))
    cfg["m"] = cfg["m"] or m_default
    cfg["p"] = cfg["p"] or p_default
    if args.command == "check" and cfg["k"] and cfg["k"][0] > cfg["m"][0]:
        raise ConfigError("k must not exceed m")
    if cfg["out"] is not None:
        out = Path(cfg["out"])
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
        cfg["out"] = out
    return cfg


def _spec(cfg) -> QuadSpec:
    return QuadSpec(cfg["scheme"], cfg["quad_order"], cfg["mc_samples"], cfg["seed"])


def _methods(cfg) -> list[str]:
    return ["averaged-taylor", "l2-projection"] if cfg["method"] == "both" else [cfg["method"]]


def _emit(cfg, name: str, csv_text: Optional[str], json_data: Optional[dict]):
    if cfg["out"] is not None:
        if csv_text is not None:
            reporting.write_text(cfg["out"] / f"{name}.csv", csv_text)
        if json_data is not None:
            reporting.write_text(cfg["out"] / f"{name}.json", reporting.dumps_json(json_data))
    if cfg["format"] == "json" and json_data is not None:
        sys.stdout.write(reporting.dumps_json(json_data))
    elif csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(reporting.dumps_json(json_data))


def _fields(cfg, dim: int, default=CORPUS) -> list:
    labels = cfg["field"] or list(default)
    try:
        return [parse_field(lbl, dim, max(max(cfg["m"]), 2)) for lbl in labels]
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def cmd_check(cfg) -> int:
    dom = cfg["domains"][0]
    if not cfg["field"]:
        raise ConfigError("check needs --field")
    u = _fields(cfg, dom.dim)[0]
    m = cfg["m"][0]
    k = (cfg["k"] or [0])[0]
    reports = []
    for method in _methods(cfg):
        for p in cfg["p"]:
            reports.append(bound_check(BoundQuery(u, dom, m, k, p, method), _spec(cfg)))
    _emit(cfg, "check", reporting.reports_to_csv(reports),
          {"schema_version": reporting.SCHEMA_VERSION,
           "reports": [reporting.report_dict(r) for r in reports]})
    return 0


def cmd_interp1d(cfg) -> int:
    reports = []
    base = [d for d in cfg["domains"] if isinstance(d, Interval)] or [Interval(0.0, 1.0)]
    for dom in base:
        for L in cfg["lengths"]:
            iv = Interval(dom.a, dom.a + L * (dom.b - dom.a))
            for u in _fields(cfg, 1):
                reports.append(interp1d_check(u, iv))
    worst = max((r.ratio for r in reports if r.ratio is not None), default=0.0)
    _emit(cfg, "interp1d", reporting.reports_to_csv(reports),
          {"schema_version": reporting.SCHEMA_VERSION, "max_ratio": worst,
           "bound": INTERP_CONSTANT, "reports": [reporting.report_dict(r) for r in reports]})
    if worst > INTERP_CONSTANT + INTERP_TOL:
        log.error("interpolation ratio %.9g exceeds %g", worst, INTERP_CONSTANT)
        return 2
    return 0


def cmd_sweep(cfg) -> int:
    labels = cfg["field"] or list(CORPUS)
    ms = cfg["m"]
    for dom in cfg["domains"]:
        _fields(cfg, dom.dim)
    reports, estimates = constant_sweep(labels, cfg["domains"], ms, cfg["p"], _methods(cfg),
                                        _spec(cfg), cfg["seed"], cfg["workers"])
    meta = {"domains": [d.tag() for d in cfg["domains"]], "fields": labels, "m": ms,
            "p": [reporting._p_json(p) for p in cfg["p"]], "methods": _methods(cfg),
            "quad_order": cfg["quad_order"], "mc_samples": cfg["mc_samples"],
            "scheme": cfg["scheme"], "seed": cfg["seed"], "mollifier_profile": "bump"}
    summary = reporting.summary_dict(estimates, reports, meta)
    csv_text = reporting.reports_to_csv(reports)
    if cfg["out"] is not None:
        reporting.write_text(cfg["out"] / "bounds.csv", csv_text)
        reporting.write_text(cfg["out"] / "summary.json", reporting.dumps_json(summary))
    sys.stdout.write(reporting.dumps_json(summary) if cfg["format"] == "json" else csv_text)
    return 0


def cmd_dilate(cfg) -> int:
    dom = cfg["domains"][0]
    fields = _fields(cfg, dom.dim)
    ks = cfg["k"]
    reports, worst = [], 0.0
    for u in fields:
        for m in cfg["m"]:
            for k in (ks or range(m + 1)):
                if k > m:
                    continue
                for p in cfg["p"]:
                    for method in _methods(cfg):
                        rows = dilation_sweep(BoundQuery(u, dom, m, k, p, method), cfg["scales"],
                                              _spec(cfg))
                        reports.extend(rows)
                        ratios = [r.ratio for r in rows if r.ratio is not None]
                        if ratios and len(ratios) == len(rows):
                            ref = ratios[0]
                            spread = max(abs(r - ref) for r in ratios) / max(abs(ref), 1e-300)
                            worst = max(worst, spread)
    _emit(cfg, "dilate", reporting.reports_to_csv(reports),
          {"schema_version": reporting.SCHEMA_VERSION, "max_relative_spread": worst,
           "reports": [reporting.report_dict(r) for r in reports]})
    if worst > DILATION_TOL:
        log.error("ratio varies by %.3e across scales (tolerance %g)", worst, DILATION_TOL)
        return 2
    return 0


def cmd_functional(cfg) -> int:
    dom = cfg["domains"][0]
    quad = quadrature(dom, _spec(cfg))
    kind = cfg["functional"]
    if kind == "midpoint":
        ell = midpoint_error(dom, quad)
    elif kind == "mean-minus-point":
        ell = mean_minus_point(dom, quad, cfg["x0"])
    else:
        ell = point_evaluation(cfg["x0"] if cfg["x0"] is not None else dom.centroid())
    fields = _fields(cfg, dom.dim)
    rows = []
    for m in cfg["m"]:
        for p in cfg["p"]:
            try:
                rep = functional_check(ell, fields, dom, m, p, quad=quad)
            except HypothesisViolatedError as exc:
                log.error("%s", exc)
                return 2
            rows.append(reporting.report_dict(rep))
    _emit(cfg, "functional", None, {"schema_version": reporting.SCHEMA_VERSION, "reports": rows})
    return 0


def cmd_chunkiness(cfg) -> int:
    rows = []
    bad = False
    for dom in cfg["domains"]:
        rep = chunkiness(dom)
        frac = validate_star_ball(dom, rep.center, rep.radius)
        bad |= frac < 1.0
        rows.append({"domain": dom.tag(), "diameter": rep.diameter, "rho_max": rep.rho_max,
                     "center": list(rep.center), "gamma": rep.gamma, "certified": rep.certified,
                     "validation": frac})
    header = "domain,diameter,rho_max,gamma,certified,validation\n"
    csv_text = header + "".join(
        f"{r['domain']},{r['diameter']!r},{r['rho_max']!r},{r['gamma']!r},{int(r['certified'])},{r['validation']!r}\n"
        for r in rows)
    _emit(cfg, "chunkiness", csv_text, {"schema_version": reporting.SCHEMA_VERSION, "domains": rows})
    return 2 if bad else 0


HANDLERS = {"check": cmd_check, "interp1d": cmd_interp1d, "sweep": cmd_sweep,
            "dilate": cmd_dilate, "functional": cmd_functional, "chunkiness": cmd_chunkiness}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help()
        return 1
    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        shown = {k: (v if k != "domains" else [d.tag() for d in v]) for k, v in cfg.items()}
        log.info("resolved config: %s", json.dumps(shown, default=str, sort_keys=True))
        log.info("seed: %s", cfg["seed"])
        return HANDLERS[args.command](cfg)
    except (ConfigError, ApproxError, ValueError) as exc:
        log.error("%s", exc)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
