"""Command-line interface: ``avoidlab <command> [options]``.

Exit status: 0 success, 2 validation failure (e.g. a set that does not
avoid), 1 usage or input error.  Every command writes its outputs
atomically and a JSON manifest ``<output>.manifest.json`` recording the
command line, parameters, seed, version and SHA-256 digests of inputs and
outputs; :func:`replay_manifest` re-runs it and compares digests.

Seeds: every random consumer derives from the single ``--seed``.  Search
chain k uses child k of ``numpy.random.SeedSequence(seed)`` (its first
64-bit state word); single-consumer commands use the seed as given.
``AVOIDLAB_THREADS`` caps the number of worker processes used for
independent search chains (default 1).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .constructions import BandSet, band_measure, build_AR, certify_AR_avoidance, find_band_corner
from .corpus import side
from .energy import Disk, backprojection_check, rasterize_disk, riesz_energy, xray_transform
from .forms import error_part_scan, form_on_set, structured_lower_scan, uniform_part_scan
from .geometry import FIXED_AREA_TRIANGLE, ConfigKind, boxunion_avoids, corner_witness_point
from .graham import GrahamParams, GridSet, graham_extract, transference_sample
from .plotting import Plot, render, render_set
from .raster import rasterize
from .search import SearchConfig, anneal, bandset_corner_witness, density_curve, theory_curves
from .setfile import (SetFileError, atomic_write_text, read_csv, read_gridset, read_set, write_csv,
                      write_gridset, write_set)
from .spectral import lp_partition_check, multiplier_decay_fit

EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2

# fixed CSV column schemas, keyed by the command that writes them
SCHEMAS = {
    "verify": ["check", "status", "detail"],
    "form-eval": ["kind", "lam", "eps", "h", "value", "quad_error", "flags"],
    "error-scan": ["eps", "value", "value_over_log"],
    "uniform-scan": ["eps", "difference", "error"],
    "structured-scan": ["lambda", "ratio"],
    "multiplier": ["xi", "abs_m"],
    "energy": ["method", "energy", "error_estimate"],
    "backprojection": ["theta", "int_G_squared"],
    "graham": ["step", "ok", "detail"],
    "transfer": ["n", "T", "density", "target", "achieved", "precondition_ok", "u", "v"],
    "history": ["step", "move", "detail", "feasible", "accepted", "measure", "temperature"],
    "density": ["R", "best_measure", "band_measure", "delta_hat"],
    "summary": ["source", "R", "measure", "delta_hat", "consistency"],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def threads() -> int:
    raw = os.environ.get("AVOIDLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"AVOIDLAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("AVOIDLAB_THREADS must be at least 1")
    return n


def chain_seeds(seed: int, chains: int) -> list:
    children = np.random.SeedSequence(seed).spawn(chains)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


class Run:
    """Collects inputs and outputs of one command and writes its manifest."""

    def __init__(self, args, argv):
        self.args, self.argv = args, list(argv)
        self.inputs, self.outputs = {}, []

    def input(self, path):
        self.inputs[os.fspath(path)] = _sha256(path)
        return path

    def output(self, path):
        self.outputs.append(os.fspath(path))
        return path

    def manifest(self, status: int):
        if not self.outputs:
            return
        params = {k: v for k, v in vars(self.args).items() if k != "func"}
        doc = {
            "command": self.args.command,
            "argv": self.argv,
            "cwd": os.getcwd(),
            "params": params,
            "seed": params.get("seed"),
            "version": __version__,
            "exit_status": status,
            "inputs": self.inputs,
            "outputs": {p: _sha256(p) for p in self.outputs if os.path.exists(p)},
        }
        atomic_write_text(self.outputs[0] + ".manifest.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _load_set(run, path):
    try:
        return read_set(run.input(path))
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _cfg(args) -> ConfigKind:
    if args.config == "corner":
        return ConfigKind.corner(signed_t=getattr(args, "signed_t", False))
    return ConfigKind.triangle(args.area)


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _raster_input(run, args):
    if args.disk is not None:
        return rasterize_disk(Disk(0.0, 0.0, args.disk), args.h)
    if args.set is None:
        raise UsageError("give --set or --disk")
    return rasterize(_load_set(run, args.set), args.h)


# --------------------------------------------------------------------------
# commands

def cmd_construct(run, args):
    B = build_AR(args.R)
    out = args.out or f"AR{args.R:g}.txt"
    write_set(run.output(out), B)
    if args.svg:
        atomic_write_text(run.output(args.svg), render_set(B))
    print(f"A_R with R={args.R:g}: {len(B.bands)} bands, measure {band_measure(B):.12g} -> {out}")
    return EXIT_OK


def cmd_verify(run, args):
    S = _load_set(run, args.set)
    cfg = _cfg(args)
    rows = []
    if isinstance(S, BandSet):
        if cfg.tag == FIXED_AREA_TRIANGLE or cfg.signed_t:
            raise UsageError("band files are verified for the corner with t > 0 only")
        cert = certify_AR_avoidance(S, find_witness=False)
        rows.append(("separation certificate", cert.status, cert.summary()))
        trip = bandset_corner_witness(S)
        if trip is None:
            rows.append(("exact band triples", "PASS", f"{len(S.bands) ** 3} triples"))
            status = EXIT_OK
        else:
            w = find_band_corner(S)
            detail = f"bands {trip}" + (f"; witness (x, y, t) = {w}" if w else "")
            rows.append(("exact band triples", "FAIL", detail))
            status = EXIT_INVALID
    else:
        rep = boxunion_avoids(S, cfg)
        if rep.avoids:
            rows.append(("box triples", "PASS", f"{rep.triples_checked} triples"))
            status = EXIT_OK
        else:
            detail = "boxes " + "; ".join(str(b.as_tuple()) for b in rep.witness)
            if cfg.tag != FIXED_AREA_TRIANGLE:
                w = corner_witness_point(*rep.witness)
                if w is not None:
                    detail += f"; witness {w}"
            rows.append(("box triples", "FAIL", detail))
            status = EXIT_INVALID
    for r in rows:
        print(f"{r[0]}: {r[1]} ({r[2]})")
    if args.out:
        write_csv(run.output(args.out), SCHEMAS["verify"], rows)
    print("PASS" if status == EXIT_OK else "FAIL")
    return status


def cmd_form_eval(run, args):
    S = _load_set(run, args.set)
    ev = form_on_set(S, args.kind.lower(), args.lam, args.eps, args.h, args.angles)
    print(f"{ev.kind}(lam={args.lam:g}, eps={args.eps:g}) = {ev.value:.10g} +/- {ev.quad_error:.3g}"
          + (f" [{'; '.join(ev.flags)}]" if ev.flags else ""))
    if args.out:
        write_csv(run.output(args.out), SCHEMAS["form-eval"],
                  [(ev.kind, args.lam, args.eps, args.h, ev.value, ev.quad_error, ";".join(ev.flags))])
    return EXIT_OK


def cmd_error_scan(run, args):
    S = _load_set(run, args.set)
    F = rasterize(S, args.h)
    R = args.R or (S.R if isinstance(S, BandSet) else side(S))
    cache, rows = {}, []
    for k in range(args.kmin, args.kmax + 1):
        eps = 2.0 ** -k
        sc = error_part_scan(F, eps, R, args.n_lambda, args.form, n_angles=args.angles, _structured_cache=cache)
        rows.append((eps, sc.value, sc.value / math.log(1 / eps)))
        print(f"eps=2^-{k}: V={sc.value:.6g}  V/ln(1/eps)={rows[-1][2]:.6g}")
    vals = [r[2] for r in rows if r[2] > 0]
    if vals:
        print(f"band ratio c2/c1 = {max(vals) / min(vals):.4g}")
    if args.out:
        write_csv(run.output(args.out), SCHEMAS["error-scan"], rows)
    return EXIT_OK


def cmd_uniform_scan(run, args):
    S = _load_set(run, args.set)
    F = rasterize(S, args.h)
    eps = _floats(args.eps) if args.eps else [2.0 ** -k for k in range(1, 8)]
    try:
        fit = uniform_part_scan(F, args.lam, eps)
    except ValueError as e:
        print(f"uniform scan not possible: {e}")
        return EXIT_INVALID
    if fit.noise_limited:
        print("differences are below the quadrature error: noise-limited")
    else:
        print(f"sigma_hat = {fit.sigma_hat:.4g} over {len(fit.eps_used)} eps values")
    if args.out:
        write_csv(run.output(args.out), SCHEMAS["uniform-scan"],
                  list(zip(fit.eps_used, fit.differences, fit.errors)))
    return EXIT_OK


def cmd_structured_scan(run, args):
    S = _load_set(run, args.set)
    F = rasterize(S, args.h)
    R = args.R or (S.R if isinstance(S, BandSet) else side(S))
    sc = structured_lower_scan(F, R, args.n_lambda, args.form, n_angles=args.angles)
    print(f"min ratio ({args.form}) = {sc.min_ratio:.6g}")
    if args.out:
        write_csv(run.output(args.out), SCHEMAS["structured-scan"], list(zip(sc.lambdas, sc.ratios)))
    return EXIT_OK


def cmd_multiplier(run, args):
    xis = np.geomspace(args.xi_min, args.xi_max, args.n)
    fit = multiplier_decay_fit(not args.anti, xis)
    label = "anti-diagonal" if args.anti else "diagonal"
    print(f"{label} log-log slope = {fit.slope:.5g}")
    dev = lp_partition_check(np.linspace(-2000, 2000, 40001))
    print(f"Littlewood-Paley partition deviation = {dev:.3g}")
    if args.out:
        write_csv(run.output(args.out), SCHEMAS["multiplier"], list(zip(fit.xis, fit.values)))
    return EXIT_OK


def cmd_energy(run, args):
    F = _raster_input(run, args)
    rep = riesz_energy(F, args.method, n_angles=args.angles, n_samples=args.samples,
                       rng=np.random.default_rng(args.seed))
    print(f"E = {rep.energy:.8g} +/- {rep.error_estimate:.3g} ({rep.method})")
    if args.out:
        write_csv(run.output(args.out), SCHEMAS["energy"], [(rep.method, rep.energy, rep.error_estimate)])
    return EXIT_OK


def cmd_backprojection(run, args):
    F = _raster_input(run, args)
    thetas = np.arange(args.angles) * math.pi / args.angles
    rows = []
    for th in thetas:
        y, G = xray_transform(F, th)
        rows.append((th, float(np.sum(G ** 2) * (y[1] - y[0]) if len(y) > 1 else 0.0)))
    e = math.pi * float(np.mean([r[1] for r in rows]))
    rel = backprojection_check(F, args.angles)
    print(f"backprojection E = {e:.8g}; relative gap to grid summation = {rel:.3g}")
    if args.out:
        write_csv(run.output(args.out), SCHEMAS["backprojection"], rows)
    return EXIT_OK


def cmd_graham(run, args):
    if args.grid:
        B = read_gridset(run.input(args.grid))
    elif args.full:
        B = GridSet.full(args.full)
    else:
        raise UsageError("give --grid FILE or --full n")
    try:
        params = GrahamParams(args.beta, args.r, args.N, args.l)
    except ValueError as e:
        raise UsageError(str(e)) from None
    tr = graham_extract(B, params)
    for s in tr.steps:
        print(f"[{'ok' if s.ok else 'FAIL'}] {s.name}: {s.detail}")
    for f in tr.flags:
        print(f"flag: {f}")
    if args.out:
        write_csv(run.output(args.out), SCHEMAS["graham"], [(s.name, s.ok, s.detail) for s in tr.steps])
    if tr.success:
        print(f"triangle {tr.triangle} of area {params.target_area:g}")
        return EXIT_OK
    print(f"extraction failed at: {tr.failed_step}")
    return EXIT_INVALID


def cmd_transfer(run, args):
    S = _load_set(run, args.set)
    res = transference_sample(S, args.n, args.T, args.trials, args.seed)
    print(f"best density {res.density:.4g} (target {res.target:.4g}); achieved={res.achieved}; "
          f"precondition={res.precondition_ok}")
    if args.out:
        write_gridset(run.output(args.out), res.grid)
    if args.csv:
        write_csv(run.output(args.csv), SCHEMAS["transfer"],
                  [(args.n, args.T, res.density, res.target, res.achieved, res.precondition_ok, *res.corner)])
    return EXIT_OK if res.achieved else EXIT_INVALID


def _anneal_job(config):
    return anneal(config)


def cmd_search(run, args):
    cfg = _cfg(args)
    if args.R_list:
        Rs = _floats(args.R_list)
        rows = density_curve(Rs, cfg, args.steps, h=args.h, seed=args.seed)
        out = args.out or "density.csv"
        write_csv(run.output(out), SCHEMAS["density"],
                  [(r.R, r.best_measure, r.band_measure, r.best_measure / r.R ** 2) for r in rows])
        for r in rows:
            print(f"R={r.R:g}: best {r.best_measure:.6g}, A_R {r.band_measure:.6g}")
        return EXIT_OK
    if args.R is None:
        raise UsageError("give --R or --R-list")
    rep = "bands" if args.init == "bands" else args.representation
    init = "A_R" if args.init == "bands" else args.init
    try:
        base = SearchConfig(args.R, cfg, rep, args.h, args.T0, args.cooling, args.steps, args.seed, init)
    except ValueError as e:
        raise UsageError(str(e)) from None
    seeds = [args.seed] if args.chains == 1 else chain_seeds(args.seed, args.chains)
    configs = [replace(base, seed=s) for s in seeds]
    nproc = min(threads(), len(configs))
    if nproc > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(nproc) as ex:
            results = list(ex.map(_anneal_job, configs))
    else:
        results = [anneal(c) for c in configs]
    k = min(range(len(results)), key=lambda i: (-results[i].best_measure, seeds[i]))
    res = results[k]
    best = res.best
    if isinstance(best, BandSet):
        ok = bandset_corner_witness(best) is None
    else:
        ok = bool(boxunion_avoids(best, cfg))
    out = args.out or f"search_R{args.R:g}.txt"
    write_set(run.output(out), best)
    hist = args.history or os.path.splitext(out)[0] + ".history.csv"
    write_csv(run.output(hist), SCHEMAS["history"],
              [(r.step, r.move, " ".join(f"{v:g}" for v in r.detail), r.feasible, r.accepted, r.measure,
                r.temperature) for r in res.history])
    if args.svg:
        atomic_write_text(run.output(args.svg), render_set(best))
    print(f"best measure {res.best_measure:.6g} (chain seed {seeds[k]}), final {res.final_measure:.6g}; "
          f"re-check {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_INVALID


def _parse_consts(items) -> dict:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise UsageError(f"--const expects name=value, got {it!r}")
        k, v = it.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"--const value must be a number: {it!r}") from None
    bad = set(out) - {"RlogR", "quarter", "third", "half"}
    if bad:
        raise UsageError(f"unknown curve(s): {', '.join(sorted(bad))}")
    return out


def consistency_value(delta: float, R: float) -> float:
    """delta^4 log R / (1 + log(1/delta)); stays bounded for sets obeying the upper bound."""
    if not 0 < delta <= 1 or R <= 1:
        return float("nan")
    return delta ** 4 * math.log(R) / (1 + math.log(1 / delta))


_KINDS = [  # (required columns, x, y, log axes)
    (("R", "best_measure"), "R", "best_measure", True),
    (("eps", "value_over_log"), "eps", "value", True),
    (("eps", "difference"), "eps", "difference", True),
    (("lambda", "ratio"), "lambda", "ratio", True),
    (("xi", "abs_m"), "xi", "abs_m", True),
]


def cmd_report(run, args):
    consts = _parse_consts(args.const)
    plot = Plot(title="avoidlab report", logx=True, logy=True)
    summary = []
    for path in args.inputs:
        try:
            header, body = read_csv(run.input(path))
        except (OSError, SetFileError) as e:
            raise UsageError(f"{path}: {e}") from None
        kind = next((k for k in _KINDS if all(c in header for c in k[0])), None)
        if kind is None:
            raise UsageError(f"{path}: unrecognized CSV columns {header}")
        _, xc, yc, _ = kind
        try:
            x = [float(r[header.index(xc)]) for r in body]
            y = [float(r[header.index(yc)]) for r in body]
        except ValueError:
            raise UsageError(f"{path}: non-numeric data") from None
        name = os.path.basename(path)
        plot.xlabel, plot.ylabel = xc, yc
        plot.add(f"{name}: {yc}", x, y, "both")
        if xc == "R":
            bm = [float(r[header.index("band_measure")]) for r in body] if "band_measure" in header else []
            if bm:
                plot.add(f"{name}: band_measure", x, bm, "both", dashed=True)
            for R, m in zip(x, y):
                d = m / R ** 2
                summary.append((name, R, m, d, consistency_value(d, R)))
            if consts and x:
                Rs = np.geomspace(min(x), max(x), 64) if len(x) > 1 else np.array(x)
                curves = [theory_curves(float(R), consts) for R in Rs]
                for key in consts:
                    plot.add(f"{consts[key]:g}*{key}", Rs, [c[key] for c in curves], "line", dashed=True)
    out = args.out or "report.csv"
    write_csv(run.output(out), SCHEMAS["summary"], summary)
    svg = args.svg or os.path.splitext(out)[0] + ".svg"
    atomic_write_text(run.output(svg), render(plot))
    for s in summary:
        print(f"{s[0]} R={s[1]:g}: delta={s[3]:.4g}, delta^4 log R/(1+log(1/delta)) = {s[4]:.4g}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="avoidlab", description="Laboratory for configuration-avoiding planar sets.")
    p.add_argument("--version", action="version", version=f"avoidlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        return sp

    def config_opts(sp):
        sp.add_argument("--config", choices=["corner", "triangle"], default="corner")
        sp.add_argument("--area", type=float, default=1.0, help="triangle area")
        sp.add_argument("--signed-t", action="store_true", help="allow t < 0 for corners")

    sp = add("construct", cmd_construct, "write the band set A_R")
    sp.add_argument("--R", type=float, required=True)
    sp.add_argument("--out")
    sp.add_argument("--svg")

    sp = add("verify", cmd_verify, "check a set for avoidance")
    sp.add_argument("--set", required=True)
    config_opts(sp)
    sp.add_argument("--out")

    sp = add("form-eval", cmd_form_eval, "evaluate a counting form on a set")
    sp.add_argument("--set", required=True)
    sp.add_argument("--kind", choices=["N0", "Neps", "N1", "Mvec", "M"], default="N0")
    sp.add_argument("--lam", type=float, default=1.0)
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--h", type=float, default=0.125)
    sp.add_argument("--angles", type=int, default=16)
    sp.add_argument("--out")

    sp = add("error-scan", cmd_error_scan, "L2(dlam/lam) size of N^eps - N^1 for eps = 2^-k")
    sp.add_argument("--set", required=True)
    sp.add_argument("--h", type=float, default=0.125)
    sp.add_argument("--R", type=float)
    sp.add_argument("--kmin", type=int, default=3)
    sp.add_argument("--kmax", type=int, default=8)
    sp.add_argument("--n-lambda", type=int, default=32)
    sp.add_argument("--form", choices=["N", "M"], default="N")
    sp.add_argument("--angles", type=int, default=8)
    sp.add_argument("--out")

    sp = add("uniform-scan", cmd_uniform_scan, "decay exponent of |N0 - N^eps| in eps")
    sp.add_argument("--set", required=True)
    sp.add_argument("--h", type=float, default=1 / 32)
    sp.add_argument("--lam", type=float, default=1.0)
    sp.add_argument("--eps", help="comma-separated decreasing eps values")
    sp.add_argument("--out")

    sp = add("structured-scan", cmd_structured_scan, "normalized structured-part lower scan")
    sp.add_argument("--set", required=True)
    sp.add_argument("--h", type=float, default=0.25)
    sp.add_argument("--R", type=float)
    sp.add_argument("--n-lambda", type=int, default=32)
    sp.add_argument("--form", choices=["N", "M"], default="N")
    sp.add_argument("--angles", type=int, default=8)
    sp.add_argument("--out")

    sp = add("multiplier", cmd_multiplier, "decay of the oscillatory multiplier")
    sp.add_argument("--xi-min", type=float, default=32.0)
    sp.add_argument("--xi-max", type=float, default=1024.0)
    sp.add_argument("--n", type=int, default=11)
    sp.add_argument("--anti", action="store_true", help="anti-diagonal (xi, -xi)")
    sp.add_argument("--out")

    for name, func, help in (("energy", cmd_energy, "Riesz energy of a set"),
                             ("backprojection", cmd_backprojection, "X-ray backprojection energy")):
        sp = add(name, func, help)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--set")
        g.add_argument("--disk", type=float, help="radius of a disk centred at the origin")
        sp.add_argument("--h", type=float, default=1 / 32)
        sp.add_argument("--angles", type=int, default=64)
        sp.add_argument("--out")
        if name == "energy":
            sp.add_argument("--method", choices=["grid", "montecarlo", "backprojection"], default="grid")
            sp.add_argument("--samples", type=int, default=1_000_000)
            sp.add_argument("--seed", type=int, default=0)

    sp = add("graham", cmd_graham, "discrete fixed-area triangle extraction")
    sp.add_argument("--grid", help="GridSet file")
    sp.add_argument("--full", type=int, help="use the full n x n grid")
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--l", type=int)
    sp.add_argument("--out")

    sp = add("transfer", cmd_transfer, "sample a dense grid set from a continuous set")
    sp.add_argument("--set", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="GridSet output file")
    sp.add_argument("--csv")

    sp = add("search", cmd_search, "greedy / annealing search for dense avoiding sets")
    sp.add_argument("--R", type=float)
    sp.add_argument("--R-list", help="comma-separated increasing R values: write a density table")
    config_opts(sp)
    sp.add_argument("--h", type=float, default=0.25)
    sp.add_argument("--steps", type=int, default=5000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--init", choices=["empty", "bands", "random"], default="empty")
    sp.add_argument("--representation", choices=["cells", "bands"], default="cells")
    sp.add_argument("--T0", type=float)
    sp.add_argument("--cooling", type=float, default=0.995)
    sp.add_argument("--chains", type=int, default=1)
    sp.add_argument("--out")
    sp.add_argument("--history")
    sp.add_argument("--svg")

    sp = add("report", cmd_report, "plot CSV outputs with bound shapes")
    sp.add_argument("--inputs", nargs="+", required=True)
    sp.add_argument("--const", action="append", help="curve constant, e.g. RlogR=0.125 (curves: "
                    "RlogR, quarter, third, half)")
    sp.add_argument("--out")
    sp.add_argument("--svg")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    run = Run(args, argv)
    try:
        status = args.func(run, args)
    except (UsageError, SetFileError) as e:
        print(f"avoidlab {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"avoidlab {args.command}: invalid parameters: {e}", file=sys.stderr)
        return EXIT_USAGE
    run.manifest(status)
    return status


def replay_manifest(path) -> dict:
    """Re-run a manifest's command in its working directory; map output path -> digest matches."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    old = os.getcwd()
    os.chdir(doc["cwd"])
    try:
        main(doc["argv"])
        return {p: os.path.exists(p) and _sha256(p) == d for p, d in doc["outputs"].items()}
    finally:
        os.chdir(old)


if __name__ == "__main__":
    sys.exit(main())
