"""Command-line front end: ``plap <command> [options]``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid parameters,
64 usage error.  Options may also come from a ``key=value`` file given with
``--config``; flags on the command line win.  Outputs go to ``--out``, else
``$PLAP_OUTPUT_DIR``, else ``./plap_output``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .closed_forms import phi_ode_residual, phi_profile, write_csv
from .constants import ProfileConstants, build_ledger
from .exceptions import ParameterError, PlapError
from .interface import extract_interface, front_power
from .params import Params, validate
from .profiles import extract_f0, extract_f1, rescale_f0
from .regimes import classify, predicted_interface_law
from .solver import Grid1D, SolverOptions, run_manifest, solve, write_snapshots_csv

EXIT_OK, EXIT_CHECK, EXIT_PARAMS, EXIT_USAGE = 0, 1, 2, 64

PARAM_KEYS = ("p", "b", "beta", "alpha", "C")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


# ------------------------------------------------------------ argument plumbing


def _add_params(sp):
    g = sp.add_argument_group("problem parameters")
    for k in PARAM_KEYS:
        g.add_argument(f"--{k}", type=float, default=None)


def _add_grid(sp, n_cells=1024, x_lo=-4.0, x_hi=4.0):
    g = sp.add_argument_group("grid")
    g.add_argument("--x-lo", type=float, default=None, help=f"default {x_lo}")
    g.add_argument("--x-hi", type=float, default=None, help=f"default {x_hi}")
    g.add_argument("--n-cells", type=int, default=None, help=f"default {n_cells}")
    sp.set_defaults(_grid_defaults={"x_lo": x_lo, "x_hi": x_hi, "n_cells": n_cells})


def _add_solver(sp):
    g = sp.add_argument_group("solver")
    g.add_argument("--eps-reg", type=float, default=None)
    g.add_argument("--delta-abs", type=float, default=None)
    g.add_argument("--theta", type=float, default=None)
    g.add_argument("--dt-rel", type=float, default=None)
    g.add_argument("--splitting", choices=("unsplit_implicit", "strang_exact_reaction"), default=None)
    g.add_argument("--bc", choices=("dirichlet_from_data", "zero", "no_flux"), default=None)
    g.add_argument("--snapshot-mode", choices=("exact", "interpolate"), default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="plap", description="Fronts and tails of the fast-diffusion p-Laplacian with absorption.")
    ap.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="key=value file; flags win")
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("--seed", type=int, default=None)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("classify", parents=[common], help="region, sub-case and interface law")
    _add_params(sp)

    sp = sub.add_parser("constants", parents=[common], help="explicit constants with provenance")
    _add_params(sp)
    for k in ("A0", "A1", "lambda", "ell1"):
        sp.add_argument(f"--{k}", type=float, default=None, dest=f"profile_{k}")
    sp.add_argument("--epsilon", type=float, default=None)

    sp = sub.add_parser("solve", parents=[common], help="run the solver and write snapshots")
    _add_params(sp)
    _add_grid(sp)
    _add_solver(sp)
    sp.add_argument("--t-end", type=float, default=None)
    sp.add_argument("--times", type=str, default=None, help="comma-separated snapshot times")

    sp = sub.add_parser("profile", parents=[common], help="self-similar profile at t = 1")
    sp.add_argument("--kind", choices=("f0", "f1"), default=None)
    _add_params(sp)
    _add_grid(sp, n_cells=2048)
    _add_solver(sp)
    sp.add_argument("--threshold", type=float, default=None)

    sp = sub.add_parser("phi", parents=[common], help="exponential-tail profile phi")
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--b", type=float, default=None)
    sp.add_argument("--x-max", type=float, default=None)
    sp.add_argument("--n-points", type=int, default=None)

    sp = sub.add_parser("verify-theorem", parents=[common], help="scripted theorem check")
    sp.add_argument("n", type=int, choices=(1, 2, 3, 4, 5))
    _add_params(sp)
    sp.add_argument("--n-cells", type=int, default=None)

    sp = sub.add_parser("sweep", parents=[common], help="regime atlas over (alpha, beta)")
    for k in ("p", "b", "C"):
        sp.add_argument(f"--{k}", type=float, default=None)
    sp.add_argument("--alpha-range", type=str, default=None, help="lo:hi:n")
    sp.add_argument("--beta-range", type=str, default=None, help="lo:hi:n")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--spot", type=str, default=None, help="alpha,beta;alpha,beta points for short solver runs")
    sp.add_argument("--no-boundaries", action="store_true", default=None,
                    help="omit the extra points placed on the region boundaries")
    return ap


def read_config(path: Path) -> dict:
    out = {}
    for ln, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{ln}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _truthy(v: str) -> bool:
    if v.lower() in ("1", "true", "yes", "on"):
        return True
    if v.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v}")


def merge_config(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> argparse.Namespace:
    """Fill options left unset on the command line from the config file."""
    if ns.config is None:
        return ns
    if not ns.config.is_file():
        raise UsageError(f"config file {ns.config} not found")
    sub = parser._subparsers._group_actions[0].choices[ns.command]
    types = {a.dest: (_truthy if isinstance(a, argparse._StoreTrueAction) else a.type)
             for a in sub._actions if a.dest != "help"}
    for k, v in read_config(ns.config).items():
        if k not in types:
            raise UsageError(f"unknown config key {k!r} for {ns.command}")
        if getattr(ns, k, None) is None:
            conv = types[k] or str
            try:
                setattr(ns, k, conv(v))
            except (TypeError, ValueError) as exc:
                raise UsageError(f"config key {k}: {exc}") from exc
    return ns


def _params(ns, defaults: Params = None) -> Params:
    vals = {k: getattr(ns, k, None) for k in PARAM_KEYS}
    if defaults is not None:
        vals = {k: (getattr(defaults, k) if v is None else v) for k, v in vals.items()}
    missing = [k for k in ("p", "b", "beta", "alpha") if vals[k] is None]
    if missing:
        raise UsageError("missing " + ", ".join(f"--{k}" for k in missing))
    if vals["C"] is None:
        vals["C"] = 1.0
    return validate(Params(**vals))


def _grid(ns) -> Grid1D:
    d = ns._grid_defaults
    return Grid1D(ns.x_lo if ns.x_lo is not None else d["x_lo"],
                  ns.x_hi if ns.x_hi is not None else d["x_hi"],
                  ns.n_cells if ns.n_cells is not None else d["n_cells"])


def _opts(ns) -> SolverOptions:
    kw = {}
    for k in ("eps_reg", "delta_abs", "theta", "dt_rel", "splitting", "bc", "snapshot_mode"):
        v = getattr(ns, k, None)
        if v is not None:
            kw[k] = v
    return SolverOptions(**kw)


def _outdir(ns, name: str) -> Path:
    root = ns.out or Path(os.environ.get("PLAP_OUTPUT_DIR", "plap_output"))
    d = Path(root) / name if ns.out is None else Path(root)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _echo(ns) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(ns).items()) if not k.startswith("_")}


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    if hasattr(o, "value"):
        return o.value
    return str(o)


def write_manifest(out: Path, ns, files, wall, checks=None, tolerances=None, extra=None) -> Path:
    doc = {
        "config": _echo(ns),
        "code_version": __version__,
        "wall_time": wall,
        "files": [{"path": f.name, "sha256": sha256(f), "bytes": f.stat().st_size} for f in sorted(files)],
        "checks": checks or [],
        "tolerances": tolerances or {},
    }
    if extra:
        doc.update(extra)
    path = out / "manifest.json"
    write_json(path, doc)
    return path


# ------------------------------------------------------------ commands


def cmd_classify(ns) -> int:
    t0 = time.perf_counter()
    prm = _params(ns)
    label = classify(prm)
    law = predicted_interface_law(prm)
    doc = {"params": prm.to_dict(), "region": label.region.value, "subcase": label.subcase.value,
           "interface_law": law.to_dict()}
    out = _outdir(ns, "classify")
    f = out / "classify.json"
    write_json(f, doc)
    write_manifest(out, ns, [f], time.perf_counter() - t0)
    expo = "none" if law.exponent is None else f"{law.exponent:.4f}"
    print(f"region {label.region.value} ({label.subcase.value}); interface exponent {expo}, direction {law.direction.value}")
    return EXIT_OK


def cmd_constants(ns) -> int:
    t0 = time.perf_counter()
    prm = _params(ns)
    vals = {k: getattr(ns, f"profile_{k}") for k in ("A0", "A1", "lambda", "ell1")}
    prof = None
    if any(v is not None for v in vals.values()):
        prof = ProfileConstants(A0=vals["A0"], A1=vals["A1"], lam=vals["lambda"], ell1=vals["ell1"], source="cli")
    led = build_ledger(prm, prof, epsilon=ns.epsilon if ns.epsilon is not None else 0.05)
    out = _outdir(ns, "constants")
    f = out / "constants.json"
    f.write_text(led.to_json() + "\n")
    write_manifest(out, ns, [f], time.perf_counter() - t0)
    for name, e in led.entries.items():
        print(f"{name:>10} = {e.value:.10g}   [{e.formula_id}]")
    for name, need in led.requires_profile.items():
        print(f"{name:>10} needs profile input {need}")
    return EXIT_OK


def _times(ns):
    if ns.times:
        try:
            ts = [float(s) for s in ns.times.split(",") if s.strip()]
        except ValueError as exc:
            raise UsageError(f"--times: {exc}") from exc
        if not ts:
            raise UsageError("--times is empty")
        return ts
    if ns.t_end is None:
        raise UsageError("give --t-end or --times")
    return [ns.t_end]


def cmd_solve(ns) -> int:
    t0 = time.perf_counter()
    prm = _params(ns)
    times = _times(ns)
    res = solve(prm, _grid(ns), _opts(ns), t_end=ns.t_end, snapshot_times=times)
    out = _outdir(ns, "solve")
    files = [out / "snapshots.csv"]
    write_snapshots_csv(files[0], res.snapshots)
    power = front_power(prm)
    if power is not None:
        tr = extract_interface(res.snapshots, power=power)
        files.append(out / "interface.csv")
        tr.to_csv(files[-1])
    run = out / "run.json"
    write_json(run, run_manifest(res))
    files.append(run)
    write_manifest(out, ns, files, time.perf_counter() - t0)
    print(f"{len(res.snapshots)} snapshots, {res.diagnostics.steps} steps, {res.diagnostics.wall_time:.2f} s -> {out}")
    return EXIT_OK


def cmd_profile(ns) -> int:
    t0 = time.perf_counter()
    kind = ns.kind or "f0"
    grid, opts = _grid(ns), _opts(ns)
    out = _outdir(ns, "profile")
    if kind == "f0":
        if ns.p is None or ns.alpha is None:
            raise UsageError("f0 needs --p and --alpha")
        validate(Params(ns.p, 0.0, 1.0, ns.alpha, 1.0))
        table, a0 = extract_f0(ns.p, ns.alpha, grid, opts)
        C = ns.C if ns.C is not None else 1.0
        if C != 1.0:
            table = rescale_f0(table, C, ns.p, ns.alpha)
            a0 *= C ** (ns.p / (ns.p + ns.alpha * (2.0 - ns.p)))
        summary = {"A0": a0}
    else:
        prm = _params(ns)
        res = extract_f1(prm, grid, opts, threshold_abs=ns.threshold if ns.threshold is not None else 1e-18)
        table = res.table
        summary = {"zeta_star": res.zeta_star, "A1": res.A1, "lambda": res.lam, "ell1": res.ell1,
                   "certified": res.certified}
    f = out / f"{kind}.csv"
    table.to_csv(f)
    s = out / "summary.json"
    write_json(s, summary)
    write_manifest(out, ns, [f, f.with_suffix(".json"), s], time.perf_counter() - t0)
    print(", ".join(f"{k}={v}" for k, v in summary.items()))
    return EXIT_OK


def cmd_phi(ns) -> int:
    t0 = time.perf_counter()
    if ns.p is None or ns.b is None:
        raise UsageError("phi needs --p and --b")
    prm = validate(Params(ns.p, ns.b, ns.p - 1.0, 1.0, 1.0))
    if not prm.b > 0:
        raise ParameterError("phi needs b > 0")
    prof = phi_profile(prm, ns.x_max if ns.x_max is not None else 10.0,
                       ns.n_points if ns.n_points is not None else 2001)
    out = _outdir(ns, "phi")
    f = out / "phi.csv"
    prof.to_csv(f)
    r = float(np.max(np.abs(phi_ode_residual(prof))))
    s = out / "summary.json"
    write_json(s, {"ode_residual_max": r, "decay_rate": prof.decay_rate})
    write_manifest(out, ns, [f, s], time.perf_counter() - t0)
    print(f"phi on [0, {prof.x[-1]:g}] with {prof.x.size} points; ODE residual {r:.3g}")
    return EXIT_OK


def cmd_verify(ns) -> int:
    from . import experiments as ex

    t0 = time.perf_counter()
    n = ns.n
    given = any(getattr(ns, k) is not None for k in PARAM_KEYS)
    prm = _params(ns, ex.THEOREM_DEFAULTS[n]) if given else ex.THEOREM_DEFAULTS[n]
    kw = {"n_cells": ns.n_cells} if ns.n_cells is not None else {}
    if n == 2:
        from .constants import _cstar

        validate(prm)
        if ns.C is not None:
            kw["factors"] = (prm.C / _cstar(prm.p, prm.b, prm.beta),)
    rep = ex.THEOREMS[n](prm, **kw)
    out = _outdir(ns, f"theorem{n}")
    files = []
    for name, (header, cols) in sorted(rep.data.items()):
        files.append(out / f"{name}.csv")
        write_csv(files[-1], header, cols)
    rp = out / "report.json"
    write_json(rp, rep.to_dict())
    files.append(rp)
    checks = [{"name": c.name, "passed": c.passed} for c in rep.checks]
    tols = {c.name: c.tolerance for c in rep.checks}
    write_manifest(out, ns, files, time.perf_counter() - t0, checks, tols, {"passed": rep.passed})
    for c in rep.checks:
        print(c.line())
    return EXIT_OK if rep.passed else EXIT_CHECK


def parse_range(text: str, name: str):
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise UsageError(f"{name} must be lo:hi:n") from exc
    if n < 1 or hi < lo or (n > 1 and hi == lo):
        raise UsageError(f"{name} is empty")
    return np.linspace(lo, hi, n)


def boundary_points(p, b, C, alphas, betas):
    """Points on the balancing curve alpha = p/(p-1-beta) and on the line beta = p-1 inside the ranges."""
    extra = []
    for be in betas:
        if be < p - 1.0:
            thr = p / (p - 1.0 - be)
            if alphas[0] <= thr <= alphas[-1]:
                extra.append((p, b, C, float(thr), float(be)))
    if betas[0] <= p - 1.0 <= betas[-1]:
        extra += [(p, b, C, float(a), p - 1.0) for a in alphas]
    return extra


def _sweep_point(args):
    p, b, C, alpha, beta = args
    try:
        lab = classify(Params(p, b, beta, alpha, C))
        return alpha, beta, lab.region.value, lab.subcase.value, ""
    except PlapError as exc:
        return alpha, beta, "error", "", f"{type(exc).__name__}: {exc}"


def _spot_point(args):
    p, b, C, alpha, beta = args
    try:
        prm = Params(p, b, beta, alpha, C)
        res = solve(prm, Grid1D(-2.0, 2.0, 512), SolverOptions(), snapshot_times=[1e-2])
        power = front_power(prm)
        if power is None:
            return alpha, beta, "ok", math.nan, float(res[-1].u.min())
        tr = extract_interface(res.snapshots, power=power)
        return alpha, beta, tr.status[0], float(tr.eta[0]), float(res[-1].u.min())
    except PlapError as exc:
        return alpha, beta, f"error: {type(exc).__name__}", math.nan, math.nan


def _pmap(fn, items, workers):
    if workers <= 1:
        return [fn(a) for a in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def cmd_sweep(ns) -> int:
    t0 = time.perf_counter()
    if ns.alpha_range is None or ns.beta_range is None:
        raise UsageError("sweep needs --alpha-range and --beta-range")
    alphas = parse_range(ns.alpha_range, "--alpha-range")
    betas = parse_range(ns.beta_range, "--beta-range")
    p = ns.p if ns.p is not None else 1.5
    b = ns.b if ns.b is not None else 1.0
    C = ns.C if ns.C is not None else 1.0
    if not 1.0 < p < 2.0:
        raise ParameterError(f"p={p} must satisfy 1 < p < 2")
    workers = ns.workers or 1
    pts = [(p, b, C, float(a), float(be)) for a in alphas for be in betas]
    if not ns.no_boundaries and b > 0:
        pts += boundary_points(p, b, C, alphas, betas)
    rows = _pmap(_sweep_point, pts, workers)
    out = _outdir(ns, "sweep")
    atlas = out / "atlas.csv"
    write_csv(atlas, ["alpha", "beta", "region", "subcase"], list(zip(*[r[:4] for r in rows])))
    files = [atlas]
    failures = [r for r in rows if r[2] == "error"]
    if failures:
        files.append(out / "failures.csv")
        write_csv(files[-1], ["alpha", "beta", "error"], list(zip(*[(r[0], r[1], r[4]) for r in failures])))
    if ns.spot:
        try:
            spots = [tuple(float(v) for v in s.split(",")) for s in ns.spot.split(";") if s.strip()]
        except ValueError as exc:
            raise UsageError(f"--spot: {exc}") from exc
        srows = _pmap(_spot_point, [(p, b, C, a, be) for a, be in spots], workers)
        files.append(out / "spots.csv")
        write_csv(files[-1], ["alpha", "beta", "status", "eta", "min_u"], list(zip(*srows)))
    counts = {}
    for r in rows:
        counts[r[2]] = counts.get(r[2], 0) + 1
    write_manifest(out, ns, files, time.perf_counter() - t0, extra={"region_counts": counts})
    print(f"{len(rows)} points: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "constants": cmd_constants,
    "solve": cmd_solve,
    "profile": cmd_profile,
    "phi": cmd_phi,
    "verify-theorem": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        ns = merge_config(ns, parser)
        return COMMANDS[ns.command](ns)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"plap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, PlapError, ValueError) as exc:
        print(f"plap: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
