"""``loopon`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource cap hit.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, bounds, mc, verify
from .cache import CountCache
from .enumerate import DEFAULT_EDGE_CAP, loop_length_distribution
from .errors import CapExceeded
from .lattice import box_domain, domain_minus, parse_box, parse_lattice
from .params import ModelParams, NumberMode
from .saw import DEFAULT_SAW_CAP
from .tables import count_rows

logger = logging.getLogger("loopon")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


def _vertex(text: str) -> tuple:
    return tuple(int(c) for c in text.replace(" ", "").split(","))


def _vertex_list(text: str | None) -> list[tuple]:
    if not text:
        return []
    return [_vertex(part) for part in text.split(";") if part.strip()]


def _int_range(text: str) -> list[int]:
    """``"1..16"``, ``"6-16:2"`` (step 2) or ``"4,8,12"``."""
    text = text.strip()
    step = 1
    if ":" in text:
        text, s = text.rsplit(":", 1)
        step = int(s)
    for sep in ("..", "-"):
        if sep in text:
            lo, hi = text.split(sep)
            return list(range(int(lo), int(hi) + 1, step))
    return [int(t) for t in text.split(",")]


def _float_grid(text: str) -> list[float]:
    """``"start:stop:num"`` (inclusive linspace) or a comma-separated list."""
    if ":" in text:
        start, stop, num = text.split(":")
        return [float(v) for v in np.linspace(float(start), float(stop), int(num))]
    return [float(t) for t in text.split(",")]


def _domain(args):
    lattice = parse_lattice(args.lattice)
    sides = parse_box(args.box)
    corner = _vertex(args.corner) if getattr(args, "corner", None) else (0,) * lattice.d
    G = box_domain(lattice, corner, sides)
    removed = _vertex_list(getattr(args, "remove", None))
    return domain_minus(G, removed) if removed else G


def _params(args, mode=None) -> ModelParams:
    return ModelParams(args.lam, args.n, mode or getattr(args, "mode", "rational"))


def _manifest(args) -> dict:
    skip = {"func", "out", "cache_dir", "verbose", "started"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {"command": args.command, "params": params, "tool_version": __version__}


def _emit(args, text: str, run_info: dict):
    if args.out:
        path = Path(args.out)
        path.write_text(text, encoding="utf-8")
        sidecar = path.with_name(path.name + ".manifest.json")
        run_info = {**run_info, "duration_s": round(time.perf_counter() - args.started, 6)}
        sidecar.write_text(json.dumps({**_manifest(args), **run_info}, indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")
    else:
        sys.stdout.write(text)
    logger.info("run info: %s", json.dumps(run_info, sort_keys=True))


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


# ------------------------------------------------------------------ commands


def cmd_z(args) -> int:
    G = _domain(args)
    p = _params(args)
    if G.is_empty:
        payload = {"Z": "1" if p.mode is NumberMode.RATIONAL else 1.0, "mode": p.mode.value,
                   "params": p.to_json(), "configs": 1, "marked": None, "length_law": []}
    else:
        x = _vertex(args.marked) if args.marked else G.sorted_vertices[0]
        payload = loop_length_distribution(G, x, p, cap=args.cap, force=args.force).to_json()
    payload["domain"] = G.to_json()
    payload["manifest"] = _manifest(args)
    _emit(args, _json_text(payload), {})
    return EXIT_OK


def cmd_verify(args) -> int:
    lattice = parse_lattice(args.lattice)
    p = _params(args)
    suite = args.suite
    if suite == "starting-point":
        rep = verify.starting_point_suite(_domain(args), p, args.max_length or 12)
    elif suite == "factorization":
        rep = verify.factorization_suite(_domain(args), p, args.max_length)
    elif suite == "lemma1":
        rep = verify.lemma1_suite(_domain(args), p, args.a, args.max_length)
    elif suite == "bound-partition":
        rep = verify.bound_partition_suite(lattice, p, args.squares)
    else:
        rep = verify.q_disjoint_suite(lattice, args.max_length or 16)
    payload = rep.to_json()
    payload["manifest"] = _manifest(args)
    _emit(args, _json_text(payload), {})
    log = logger.info if rep.passed else logger.error
    log("%s: %s (%d checks, %d failures)", suite, "pass" if rep.passed else "FAIL", rep.checks, rep.failures)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_counts(args) -> int:
    lattice = parse_lattice(args.lattice)
    cache = CountCache(args.cache_dir, enabled=not args.no_cache)
    rows = count_rows(args.kind, lattice, _int_range(args.N), a=args.a, of=args.of, cache=cache,
                      cap=args.cap, force=args.force)
    if args.kind == "deficient":
        header = ["N", "w", "total", "deficient", "fraction"]
    else:
        header = ["N", "count", "mu_hat"]
    text = _csv_text(header, ([r[h] for h in header] for r in rows))
    _emit(args, text, {"cache_hits": cache.hits, "cache_misses": cache.misses})
    return EXIT_OK


def cmd_bound_curve(args) -> int:
    inputs = bounds.ThresholdInputs(args.mu, args.mu_prime, args.a_prime)
    curve = bounds.threshold_curve(_float_grid(args.n_grid), inputs)
    _emit(args, curve.to_csv(), {})
    return EXIT_OK


def _mc_setup(args):
    G = _domain(args)
    p = _params(args, NumberMode.FLOAT)
    marked = _vertex_list(args.marked) or [G.sorted_vertices[len(G.vertices) // 2]]
    return G, p, marked


def cmd_mc(args) -> int:
    G, p, marked = _mc_setup(args)
    report = mc.run(G, p, int(float(args.sweeps)), int(float(args.burn_in)), args.seed, marked,
                    full_recount=args.full_recount)
    payload = report.to_json()
    payload["manifest"] = {**_manifest(args), "rng": mc.RNG_NAME, "seed": args.seed}
    _emit(args, _json_text(payload), {})
    return EXIT_OK


def cmd_mc_tv(args) -> int:
    G, p, marked = _mc_setup(args)
    seeds = [int(s) for s in str(args.seeds).split(",")]
    results = []
    ok = True
    for x in marked:
        exact = loop_length_distribution(G, x, p, cap=args.cap, force=args.force).length_law
        for seed in seeds:
            report = mc.run(G, p, int(float(args.sweeps)), int(float(args.burn_in)), seed, [x])
            tv = mc.tv_distance(report.length_law(x), exact)
            ok &= tv < args.tol
            results.append({"vertex": list(x), "seed": seed, "tv": tv, "pass": tv < args.tol,
                            "empirical": [[k, v] for k, v in report.length_law(x).items()],
                            "exact": [[k, float(v)] for k, v in sorted(exact.items())]})
    payload = {"results": results, "tol": args.tol, "pass": ok, "heuristic": not G.lattice.is_hexagonal,
               "manifest": {**_manifest(args), "rng": mc.RNG_NAME}}
    _emit(args, _json_text(payload), {})
    return EXIT_OK if ok else EXIT_FAIL


# ------------------------------------------------------------------ parser


def _add_domain(p, box="4x4", lattice="z2"):
    p.add_argument("--lattice", default=lattice, help="z<d> or hex")
    p.add_argument("--box", default=box, help="side lengths, e.g. 4x4")
    p.add_argument("--corner", default=None, help="box corner, e.g. 0,0")
    p.add_argument("--remove", default=None, help="vertices to remove, e.g. '1,1;2,2'")


def _add_params(p, lam="1", n="1", mode=True):
    p.add_argument("--lambda", dest="lam", default=lam, help="edge weight (e.g. 1/2)")
    p.add_argument("--n", default=n, help="loop weight")
    if mode:
        p.add_argument("--mode", default="rational", choices=[m.value for m in NumberMode])


def _add_caps(p, default):
    p.add_argument("--cap", type=int, default=default)
    p.add_argument("--force", action="store_true", help="override the resource cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loopon", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"loopon {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("z", help="exact partition function and loop-length law")
    _add_domain(p, box="2x2")
    _add_params(p)
    p.add_argument("--marked", default=None, help="vertex for the loop-length law")
    _add_caps(p, DEFAULT_EDGE_CAP)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_z)

    p = sub.add_parser("verify", help="exhaustive identity and inequality suites")
    p.add_argument("--suite", required=True, choices=verify.SUITES)
    _add_domain(p)
    _add_params(p, lam="1/2", n="1")
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--a", type=float, default=None, help="pattern density for the ceil(aN) bound")
    p.add_argument("--squares", type=int, default=4, help="number of disjoint faces (bound-partition)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counts", help="walk, polygon and pattern-deficient counts")
    p.add_argument("--kind", required=True, choices=["saw", "sap", "deficient"])
    p.add_argument("--lattice", default="z2")
    p.add_argument("--N", default="1..12", help="e.g. 1..16, 6-16:2 or 4,8,12")
    p.add_argument("--a", type=float, default=0.01, help="threshold w = ceil(a N) for deficient counts")
    p.add_argument("--of", default="saw", choices=["saw", "sap"], help="objects for deficient counts")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--cache-dir", default=None)
    _add_caps(p, DEFAULT_SAW_CAP)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("bound-curve", help="threshold lower bound as a function of n (CSV)")
    p.add_argument("--mu", type=float, default=2.638)
    p.add_argument("--mu-prime", type=float, default=2.0)
    p.add_argument("--a-prime", type=float, default=0.01)
    p.add_argument("--n-grid", default="0:1:11")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bound_curve)

    for name, func, help_ in (("mc", cmd_mc, "Metropolis face-flip sampler"),
                              ("mc-tv", cmd_mc_tv, "sampler vs exact law (total variation)")):
        p = sub.add_parser(name, help=help_)
        _add_domain(p, box="4x4", lattice="hex")
        _add_params(p, lam="0.5", n="1.0", mode=False)
        p.add_argument("--sweeps", default="1e4")
        p.add_argument("--burn-in", default="100")
        p.add_argument("--marked", default=None, help="marked vertices, e.g. '1,1;2,1'")
        if name == "mc":
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--full-recount", action="store_true")
        else:
            p.add_argument("--seeds", default="1,2,3")
            p.add_argument("--tol", type=float, default=0.02)
            _add_caps(p, DEFAULT_EDGE_CAP)
        p.add_argument("--out", default=None)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    args.started = time.perf_counter()
    try:
        code = args.func(args)
    except CapExceeded as exc:
        logger.error("%s", exc)
        return EXIT_CAP
    except (ValueError, KeyError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    logger.info("%s finished in %.3fs", args.command, time.perf_counter() - args.started)
    return code


if __name__ == "__main__":
    sys.exit(main())
