"""Command line front end: JSON reports on stdout, optional CSV dumps.

Exit codes: 0 success, 1 invalid input, 2 verdict disagreement in scenario
mode.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .diagnostics import (
    ScanGrid,
    berezin_scan,
    default_seed,
    halfplane_transfer,
    kernel_scan,
    lemma_witness,
    luecking_criterion,
    test_function_scan,
    toeplitz_criterion,
)
from .expr import EvaluationError, ParseError
from .measure import PullbackMeasure, carleson_constant, ess_inf_criterion, pushforward_measure, rn_density_boundary
from .results import _jsonable
from .scenarios import (
    ConfigError,
    list_scenarios,
    load_config,
    load_scenario,
    policy_from_config,
    run_config,
    spec_from_config,
    toeplitz_symbol,
)

EXIT_OK, EXIT_INPUT, EXIT_DISAGREE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(obj, out=None):
    text = json.dumps(_jsonable(obj), indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _dump_scan(res, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda_re", "lambda_im", "value"])
        for z, v in zip(res.details["points"], res.details["values"]):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(v))])


def _scan_grid(cfg, spec):
    g = cfg.get("grids", {})
    if spec.space.on_disk:
        if "radii" in g or "n_angles" in g:
            return ScanGrid.disk(g.get("radii", (0, 0.3, 0.6, 0.9, 0.99, 0.999)), g.get("n_angles", 64))
        return None
    if "sigmas" in g or "taus" in g:
        return ScanGrid.halfplane(g["sigmas"], g["taus"])
    return None


def cmd_analyze(a):
    cfg = load_config(a.config)
    report = run_config(cfg, a.seed)
    _emit(report.to_dict(), a.out)
    return EXIT_OK


def cmd_scan(a, which):
    cfg = load_config(a.config)
    spec = spec_from_config(cfg)
    pol = policy_from_config(cfg)
    grid = _scan_grid(cfg, spec)
    res = kernel_scan(spec, grid, pol) if which == "kernels" else test_function_scan(spec, grid, pol)
    if a.csv:
        _dump_scan(res, a.csv)
    d = res.to_dict()
    d["details"].pop("points", None)
    d["details"].pop("values", None)
    _emit(d, a.out)
    return EXIT_OK


def cmd_density(a):
    cfg = load_config(a.config)
    spec = spec_from_config(cfg)
    if not spec.space.is_hardy:
        raise ConfigError("density needs a Hardy-space config")
    pol = policy_from_config(cfg)
    seed = default_seed(a.seed)
    mu = pushforward_measure(spec.h, spec.psi, spec.space.p, "hardy", a.samples, rng=np.random.default_rng(seed))
    d = rn_density_boundary(mu, a.bins, pol.ess_inf_percentile, pol.confidence_z)
    res = ess_inf_criterion(d, pol)
    res.details["carleson_constant"] = carleson_constant(mu)
    res.grid["seed"] = seed
    if a.csv:
        with open(a.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "density", "half_width"])
            for t, v, hw in zip(d.bin_centers, d.density, d.half_width):
                w.writerow([repr(float(t)), repr(float(v)), repr(float(hw))])
    _emit(res.to_dict(), a.out)
    return EXIT_OK


def cmd_berezin(a):
    cfg = load_config(a.config)
    spec = spec_from_config(cfg)
    res = berezin_scan(spec, policy=policy_from_config(cfg))
    if a.csv:
        _dump_scan(res, a.csv)
    d = res.to_dict()
    d["details"].pop("points", None)
    d["details"].pop("values", None)
    _emit(d, a.out)
    return EXIT_OK


def cmd_luecking(a):
    cfg = load_config(a.config)
    res = luecking_criterion(spec_from_config(cfg), policy=policy_from_config(cfg))
    _emit(res.to_dict(), a.out)
    return EXIT_OK


def cmd_toeplitz(a):
    if a.config:
        cfg = load_config(a.config)
    elif a.symbol:
        cfg = {"kind": "toeplitz", "symbol": a.symbol}
    else:
        cfg = {"kind": "toeplitz", "smooth_arc": {}}
    hb = toeplitz_symbol(cfg, a.N)
    res = toeplitz_criterion(hb, tuple(a.sizes), policy=policy_from_config(cfg))
    if a.csv:
        _dump_scan(res, a.csv)
    d = res.to_dict()
    d["details"].pop("points", None)
    d["details"].pop("values", None)
    _emit(d, a.out)
    return EXIT_OK


def cmd_halfplane(a):
    tr = halfplane_transfer(a.phi, a.space)
    d = tr.to_dict()
    for k in ("halfplane", "disk"):
        d[k]["details"].pop("points", None)
        d[k]["details"].pop("values", None)
    _emit(d, a.out)
    return EXIT_OK


def cmd_witness(a):
    cfg = load_config(a.config)
    spec = spec_from_config(cfg)
    w = lemma_witness(spec, tuple(a.arc), a.n_max, seed=a.seed, policy=policy_from_config(cfg))
    _emit(w.to_dict(), a.out)
    return EXIT_OK


def cmd_scenario(a):
    if a.action == "list":
        for name in list_scenarios():
            sc = load_scenario(name)
            print(f"{name:32s} {str(sc.get('oracle')):18s} {sc.get('oracle_note', '')}")
        return EXIT_OK
    if not a.name:
        raise ConfigError("scenario run needs a NAME or 'all'")
    names = list_scenarios() if a.name == "all" else [a.name]
    reports = []
    failed = False
    for name in names:
        rep = run_config(load_scenario(name), a.seed)
        failed |= rep.status == "FAIL"
        reports.append(rep.to_dict())
        print(f"{name}: {rep.agreement} {rep.status}", file=sys.stderr)
    _emit(reports[0] if len(reports) == 1 else {"scenarios": reports, "failed": failed}, a.out)
    return EXIT_DISAGREE if failed else EXIT_OK


def cmd_measure(a):
    fmt = a.format
    if a.action == "export":
        if not a.config or not a.path:
            raise ConfigError("measure export needs --config and a target path")
        cfg = load_config(a.config)
        spec = spec_from_config(cfg)
        if not spec.space.on_disk:
            raise ConfigError("pullback measures are built on the disk")
        if spec.space.is_hardy:
            mu = pushforward_measure(spec.h, spec.psi, spec.space.p, "hardy", a.samples,
                                     rng=np.random.default_rng(default_seed(a.seed)))
        else:
            mu = pushforward_measure(spec.h, spec.psi, spec.space.p, "bergman", alpha=spec.space.alpha)
        (mu.to_csv if fmt == "csv" else mu.to_binary)(a.path)
        _emit({"path": a.path, "format": fmt, "atoms": len(mu.weights), "total_mass": mu.total_mass})
        return EXIT_OK
    if not a.path:
        raise ConfigError("measure import needs a source path")
    mu = (PullbackMeasure.from_csv if fmt == "csv" else PullbackMeasure.from_binary)(a.path)
    out = {
        "atoms": len(mu.weights),
        "total_mass": mu.total_mass,
        "boundary_mass": mu.boundary_mass,
        "interior_mass": mu.interior_mass,
        "carleson_constant": carleson_constant(mu),
    }
    if len(mu.weights) >= 16 * a.bins:
        d = rn_density_boundary(mu, a.bins)
        out["ess_inf_density"] = ess_inf_criterion(d).to_dict()
    _emit(out)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="ktlab", description="Bounded-below diagnostics for weighted composition operators.")
    p.add_argument("--version", action="version", version=f"ktlab {__version__}")
    p.add_argument("--seed", type=int, default=None, help="Monte-Carlo seed (default: KTL_SEED or 0)")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def with_config(name, help_, csv_=False):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", required=True)
        s.add_argument("--out")
        if csv_:
            s.add_argument("--csv", help="CSV dump of the scan (lambda_re, lambda_im, value)")
        return s

    with_config("analyze", "run every applicable criterion").set_defaults(fn=cmd_analyze)
    with_config("scan-kernels", "normalized kernel scan", True).set_defaults(fn=lambda a: cmd_scan(a, "kernels"))
    with_config("scan-testfns", "normalized test-function scan", True).set_defaults(fn=lambda a: cmd_scan(a, "testfns"))
    s = with_config("density", "boundary density and its essential infimum", True)
    s.add_argument("--bins", type=int, default=1024)
    s.add_argument("--samples", type=int, default=2**20)
    s.set_defaults(fn=cmd_density)
    with_config("berezin", "Berezin transform scan (Bergman)", True).set_defaults(fn=cmd_berezin)
    with_config("luecking", "Luecking disc condition (Bergman)").set_defaults(fn=cmd_luecking)

    s = sub.add_parser("toeplitz", help="Toeplitz operator criterion")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--config")
    g.add_argument("--symbol", help="symbol as an expression in z on the circle, e.g. '2+(z+1/z)/2'")
    g.add_argument("--smooth-arc", action="store_true", help="default smoothed arc indicator")
    s.add_argument("--N", type=int, default=2**14)
    s.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512])
    s.add_argument("--csv")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_toeplitz)

    s = sub.add_parser("halfplane", help="half-plane composition operator via the Cayley transfer")
    s.add_argument("--phi", required=True, help="self-map of the right half-plane in the variable s")
    s.add_argument("--space", choices=["H2+", "A2+"], default="H2+")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_halfplane)

    s = with_config("witness", "outer-function witness on an arc (Hardy)")
    s.add_argument("--arc", type=float, nargs=2, default=[np.pi / 2, np.pi], metavar=("A", "B"))
    s.add_argument("--n-max", type=int, default=64)
    s.set_defaults(fn=cmd_witness)

    s = sub.add_parser("scenario", help="run shipped scenarios")
    s.add_argument("action", choices=["run", "list"])
    s.add_argument("name", nargs="?")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_scenario)

    s = sub.add_parser("measure", help="pullback measure export/import (csv or flat binary)")
    s.add_argument("action", choices=["export", "import"])
    s.add_argument("path", nargs="?")
    s.add_argument("--config")
    s.add_argument("--format", choices=["csv", "bin"], default="csv")
    s.add_argument("--samples", type=int, default=2**16)
    s.add_argument("--bins", type=int, default=1024)
    s.set_defaults(fn=cmd_measure)
    return p


def main(argv=None):
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        return a.fn(a)
    except (ConfigError, ParseError, EvaluationError, ValueError, NotImplementedError, OSError, KeyError) as exc:
        print(f"ktlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
