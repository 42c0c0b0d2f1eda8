"""Batch front end: ``cf-lab {bounds,simulate,martingale,scaling}``.

Exit codes: 0 success, 1 usage, 2 feasibility/resource, 3 bound violation,
4 I/O failure.  CSV floats are written with 17 significant digits so equal
runs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
from pathlib import Path
import sys
import time

import numpy as np

from . import __version__
from .bounds import (MartingaleParams, azuma_bound, ofdm_bounds, refined_azuma_asymptotic,
                     refined_azuma_bound)
from .errors import FeasibilityError, ResourceError
from .martingale import (exact_doob_trace, mc_doob_trace, psk_variance_identity,
                         verify_bounded_differences, verify_exhaustive, crest_factor_table)
from .montecarlo import (DEFAULT_ALPHAS, SimulationConfig, compare_bounds, median_mean_gap,
                         run_cf_simulation, scaling_study)
from .ofdm import Constellation, psk, qam, sample_codeword
from . import rng as _rng
from ._parallel import default_workers

EXIT_OK, EXIT_USAGE, EXIT_FEASIBILITY, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3, 4
PSK_IDENTITY_TOL = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _float_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def parse_modulation(text: str) -> Constellation:
    """``psk8``, ``qam16`` or a bare ``M`` meaning M-PSK."""
    t = text.strip().lower()
    try:
        if t.startswith("psk"):
            return psk(int(t[3:]))
        if t.startswith("qam"):
            return qam(int(t[3:]))
        return psk(int(t))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad modulation {text!r}: {e}")


class Run:
    """Collects output files and writes them together with the manifest."""

    def __init__(self, command, args, out, fmt_choice="both"):
        self.command = command
        self.params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
        self.out = Path(out) if out else None
        self.format = fmt_choice
        self.t0 = time.perf_counter()
        self.files: dict[str, str] = {}

    def add(self, name, text):
        self.files[name] = text

    def manifest(self) -> dict:
        params = {k: (v.name if isinstance(v, Constellation) else v) for k, v in self.params.items()}
        return {
            "command": self.command,
            "parameters": _jsonable(params),
            "seed": params.get("seed"),
            "version": __version__,
            "argv": sys.argv[1:],
            "duration_s": time.perf_counter() - self.t0,
            "outputs": sorted(self.files) + ["manifest.json"],
        }

    def write(self):
        if self.out is None:
            return
        self.out.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            (self.out / name).write_text(text, encoding="utf-8", newline="\n")
        (self.out / "manifest.json").write_text(
            json.dumps(self.manifest(), indent=2) + "\n", encoding="utf-8", newline="\n")

    def wants(self, kind):
        return self.format in (kind, "both")


def _json_dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


BOUND_NAMES = ("azuma", "refined", "mcdiarmid", "talagrand")


def cmd_bounds(args) -> int:
    if any(a < 0 or not math.isfinite(a) for a in args.alphas):
        raise UsageError("alphas must be finite and >= 0")
    general = None
    given = [args.d, args.sigma2, args.steps]
    if any(v is not None for v in given):
        if any(v is None for v in given):
            raise UsageError("--d, --sigma2 and --steps must be given together")
        try:
            general = MartingaleParams(args.d, args.sigma2, args.steps)
        except ValueError as e:
            raise UsageError(str(e))
    header = ["alpha"] + [f"{b}_{k}" for b in BOUND_NAMES for k in ("raw", "capped")]
    if general is not None:
        header += ["general_azuma_raw", "general_refined_raw", "general_refined_asymptotic_raw"]
    rows = []
    for a in args.alphas:
        ob = ofdm_bounds(a)
        row = [a]
        for bv in ob:
            row += [bv.raw, bv.capped]
        if general is not None:
            row.append(azuma_bound(a * general.n, [general.d] * general.n).raw)
            row.append(refined_azuma_bound(a, general).raw)
            row.append(refined_azuma_asymptotic(a, general).raw if general.gamma > 0 else math.nan)
        rows.append(row)
    text = csv_text(header, rows)
    sys.stdout.write(text)
    run = Run("bounds", args, args.out, args.format)
    if run.wants("csv"):
        run.add("bounds.csv", text)
    if run.wants("json"):
        run.add("bounds.json", _json_dump({"rows": [dict(zip(header, r)) for r in rows]}))
    run.write()
    return EXIT_OK


def _config(args, n=None) -> SimulationConfig:
    try:
        return SimulationConfig(
            n=args.n if n is None else n, constellation=args.mod, trials=args.trials,
            seed=args.seed, oversampling=args.oversample, alphas=tuple(args.alphas),
            workers=args.workers)
    except ValueError as e:
        raise UsageError(str(e))


def cmd_simulate(args) -> int:
    cfg = _config(args)
    sample = run_cf_simulation(cfg)
    report = compare_bounds(sample, cfg.alphas)
    gap = median_mean_gap(sample)
    header = ["alpha", "tail_mean", "se_mean", "tail_median", "se_median"]
    header += [f"{b}_capped" for b in BOUND_NAMES] + [f"{b}_violation" for b in BOUND_NAMES]
    rows = []
    for r in report.records:
        v = r.violations
        rows.append([r.alpha, r.tail_mean, r.se_mean, r.tail_median, r.se_median]
                    + [getattr(r.bounds, b).capped for b in BOUND_NAMES]
                    + [v[b] for b in BOUND_NAMES])
    run = Run("simulate", args, args.out, args.format)
    if run.wants("csv"):
        run.add("tails.csv", csv_text(header, rows))
    summary = {
        "n": cfg.n, "modulation": cfg.constellation.name, "trials": sample.trials,
        "mean": sample.mean, "median": sample.median, "variance": sample.variance,
        "quantiles": sample.quantiles,
        "median_mean_gap": {"gap": gap.gap, "bound": gap.bound, "satisfied": gap.satisfied},
        "refined_bound_asymptotic": True,
        "violations": report.violation_count,
        "tails": [dict(zip(header, r)) for r in rows],
    }
    if run.wants("json"):
        run.add("summary.json", _json_dump({**summary, "manifest": run.manifest()}))
    run.write()
    print(f"n={cfg.n} {cfg.constellation.name} trials={sample.trials} mean={sample.mean:.6f} "
          f"median={sample.median:.6f} violations={report.violation_count}")
    return EXIT_VIOLATION if report.violation_count else EXIT_OK


def cmd_martingale(args) -> int:
    run = Run("martingale", args, args.out, args.format)
    if args.psk_identity:
        vals = {M: psk_variance_identity(M) for M in args.psk_identity}
        ok = all(abs(v - 2.0) <= PSK_IDENTITY_TOL for v in vals.values())
        if run.wants("csv"):
            run.add("psk_identity.csv", csv_text(["M", "value"], sorted(vals.items())))
        if run.wants("json"):
            run.add("summary.json", _json_dump({"psk_identity": vals, "satisfied": ok}))
        run.write()
        for M, v in sorted(vals.items()):
            print(f"M={M} value={v:.17g}")
        return EXIT_OK if ok else EXIT_VIOLATION

    c = args.mod
    if args.n < 1:
        raise UsageError("n must be >= 1")
    codeword = sample_codeword(c, args.n, _rng.stream(args.seed, 0))
    summary = {"n": args.n, "modulation": c.name, "mode": args.mode}
    ok = True
    if args.mode == "exact":
        crest_factor_table(c, args.n, args.oversample, args.workers)
        trace = exact_doob_trace(c, codeword, args.oversample)
        ex = verify_exhaustive(c, args.n, args.oversample)
        summary["exhaustive"] = {
            "codewords": ex.codewords, "max_tower_residual": ex.max_tower_residual,
            "tower_tol": ex.tower_tol, "max_increment": ex.max_increment,
            "increment_bound": ex.increment_bound,
            "max_cond_second_moment": ex.max_cond_second_moment,
            "second_moment_bound": ex.second_moment_bound, "violations": ex.violations,
        }
        ok &= ex.satisfied
    else:
        if args.inner_samples < 1000:
            raise UsageError("--inner-samples must be >= 1000")
        trace = mc_doob_trace(c, codeword, args.inner_samples, args.seed,
                              args.oversample, args.workers)
    bd = verify_bounded_differences(trace, args.n)
    ok &= bd.satisfied
    summary["bounded_differences"] = {"max_increment": bd.max_increment, "bound": bd.bound,
                                      "slack": bd.slack, "satisfied": bd.satisfied}
    summary["codeword_indices"] = c.index_of(codeword)
    summary["satisfied"] = ok
    rows = []
    for i in range(trace.n + 1):
        inc = trace.increments[i - 1] if i else math.nan
        inc_se = trace.increment_se[i - 1] if i else math.nan
        csm = trace.cond_second_moments[i - 1] if i else math.nan
        rows.append([i, trace.values[i], trace.std_errors[i], inc, inc_se, csm])
    header = ["step", "value", "std_error", "increment", "increment_se", "cond_second_moment"]
    if run.wants("csv"):
        run.add("trace.csv", csv_text(header, rows))
    if run.wants("json"):
        summary["trace"] = [dict(zip(header, r)) for r in rows]
        run.add("summary.json", _json_dump({**summary, "manifest": run.manifest()}))
    run.write()
    print(f"n={args.n} {c.name} mode={args.mode} max_increment={bd.max_increment:.6f} "
          f"bound={bd.bound:.6f} satisfied={ok}")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_scaling(args) -> int:
    n_list = args.n
    if len(n_list) < 3:
        raise UsageError("scaling needs at least three values of n")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise UsageError("n list must be strictly increasing")
    table = scaling_study(n_list, _config(args, n=n_list[0]))
    header = ["n", "mean_cf", "median_cf", "ratio_ln", "ratio_log2",
              "lw_center", "lw_halfwidth", "in_lw_band"]
    rows = [[r.n, r.mean_cf, r.median_cf, r.ratio_ln, r.ratio_log2,
             r.lw_center, r.lw_halfwidth, r.in_lw_band] for r in table.rows]
    run = Run("scaling", args, args.out, args.format)
    if run.wants("csv"):
        run.add("scaling.csv", csv_text(header, rows))
    if run.wants("json"):
        run.add("scaling.json", _json_dump({
            "rows": [dict(zip(header, r)) for r in rows],
            "mean_nondecreasing": table.mean_nondecreasing, "manifest": run.manifest()}))
    run.write()
    sys.stdout.write(csv_text(header, rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cf-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, sim=True):
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--format", choices=("csv", "json", "both"), default="both")
        if sim:
            sp.add_argument("--mod", type=parse_modulation, default=psk(4),
                            help="psk<M>, qam<M> or bare M for M-PSK (default psk4)")
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--oversample", type=int, default=16)
            sp.add_argument("--workers", type=int, default=default_workers())

    b = sub.add_parser("bounds", help="evaluate the closed-form bounds on an alpha grid")
    b.add_argument("--alphas", type=_float_list, default=list(DEFAULT_ALPHAS))
    b.add_argument("--d", type=float, default=None, help="jump bound of a generic martingale")
    b.add_argument("--sigma2", type=float, default=None, help="conditional variance bound")
    b.add_argument("--steps", type=int, default=None, help="number of martingale steps")
    common(b, sim=False)
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("simulate", help="sample crest factors and compare tails to the bounds")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--alphas", type=_float_list, default=list(DEFAULT_ALPHAS))
    common(s)
    s.set_defaults(func=cmd_simulate)

    m = sub.add_parser("martingale", help="build and verify the Doob martingale")
    m.add_argument("--n", type=int, default=8)
    m.add_argument("--mode", choices=("exact", "mc"), default="exact")
    m.add_argument("--inner-samples", type=int, default=10_000)
    m.add_argument("--psk-identity", type=_int_list, default=None, metavar="M_LIST",
                   help="only evaluate the PSK variance identity for these M")
    common(m)
    m.set_defaults(func=cmd_martingale)

    c = sub.add_parser("scaling", help="mean crest factor versus n")
    c.add_argument("--n", type=_int_list, required=True, help="comma-separated ascending n")
    c.add_argument("--trials", type=int, default=10_000)
    c.add_argument("--alphas", type=_float_list, default=list(DEFAULT_ALPHAS))
    common(c)
    c.set_defaults(func=cmd_scaling)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FeasibilityError, ResourceError) as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_FEASIBILITY
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
