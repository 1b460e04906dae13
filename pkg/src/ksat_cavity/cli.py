"""Command-line surface: one JSON document on stdout, progress on stderr.

Every command accepts --seed and is bit-reproducible for a fixed seed
and any --threads value.  A config file of ``key = value`` lines can
supply any option; explicit flags win.  Exit codes: 0 success, 2
invariant violation, 3 non-convergence, 4 input error.
"""

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import __version__, kernels
from .cavity import (
    INIT_PRESETS,
    load_population,
    save_population,
    save_trace,
    solve_fixed_point,
)
from .exact import CapError, free_energy, overlap_moment_gap
from .metrics import summarize
from .model import ModelParams, rng_stream
from .regions import contraction_test, inclusion_scan, lipschitz_test, region_check
from .rs import rs_eval

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_NONCONVERGED = 3
EXIT_INPUT = 4

# Stream labels: one integer per command so runs never share randomness.
TAG_FIXEDPOINT = 1
TAG_RS = 2
TAG_EXACT = 3
TAG_OVERLAP = 4
TAG_LIPSCHITZ = 5
TAG_CONTRACTION = 6
TAG_COMPARE = 7


def _progress(msg):
    print(msg, file=sys.stderr, flush=True)


def _parse_bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int_list(text):
    return [int(tok) for tok in str(text).split(",") if tok.strip()]


def _parse_grid(text):
    """'start:stop:count' or 'start:stop:count:log' -> ndarray."""
    parts = str(text).split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"grid spec must be start:stop:count[:log], got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("grid count must be >= 1")
    scale = parts[3] if len(parts) == 4 else "lin"
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise ValueError("log grid needs positive endpoints")
        return np.logspace(math.log10(start), math.log10(stop), count)
    if scale == "lin":
        return np.linspace(start, stop, count)
    raise ValueError(f"unknown grid scale {scale!r}")


class _Option:
    def __init__(self, name, convert, default, help="", is_flag=False):
        self.name = name
        self.dest = name.replace("-", "_")
        self.convert = convert
        self.default = default
        self.help = help
        self.is_flag = is_flag


_PARAM_OPTS = [
    _Option("p", int, 3, "clause arity (>= 2)"),
    _Option("alpha", float, 0.05, "connectivity parameter"),
    _Option("beta", float, 1.0, "inverse temperature"),
    _Option("seed", int, 0, "master RNG seed"),
]
_RUNTIME_OPTS = [
    _Option("threads", int, None, "cap kernel parallelism (results identical)"),
    _Option("config", str, None, "key = value config file; flags win"),
]
_SOLVER_OPTS = [
    _Option("pop-size", int, 100_000, "population size M"),
    _Option("max-iters", int, 100, "iteration cap for the fixed point"),
    _Option("tol", float, 1e-2, "Wasserstein step tolerance"),
    _Option("init", str, "zeros", f"initial population, one of {INIT_PRESETS}"),
]

_COMMAND_OPTS = {
    "regions": _PARAM_OPTS
    + _RUNTIME_OPTS
    + [
        _Option("p-grid", _parse_int_list, None, "comma list of p values (CSV mode)"),
        _Option("alpha-grid", _parse_grid, None, "alpha grid start:stop:count[:log]"),
        _Option("beta-grid", _parse_grid, None, "beta grid start:stop:count[:log]"),
        _Option("scan-inclusion", _parse_bool, False, "run the inclusion scan", is_flag=True),
    ],
    "fixedpoint": _PARAM_OPTS
    + _RUNTIME_OPTS
    + _SOLVER_OPTS
    + [
        _Option("snapshot", str, None, "write the final population here"),
        _Option("trace", str, None, "write per-iteration distances here (CSV)"),
    ],
    "exact": _PARAM_OPTS
    + _RUNTIME_OPTS
    + [
        _Option("n", int, 12, "system size N (enumerates 2^N states)"),
        _Option("n-disorder", int, 100, "number of disorder replicas"),
        _Option("enum-cap", int, 24, "refuse enumeration beyond 2^cap"),
        _Option("trace", str, None, "per-instance CSV (id, clauses, log Z)"),
    ],
    "rs": _PARAM_OPTS
    + _RUNTIME_OPTS
    + _SOLVER_OPTS
    + [
        _Option("n-mc", int, 1_000_000, "Monte Carlo trials per term"),
        _Option("snapshot-in", str, None, "evaluate at this population snapshot"),
        _Option("no-solve", _parse_bool, False,
                "evaluate at the init preset without solving", is_flag=True),
    ],
    "compare": _PARAM_OPTS
    + _RUNTIME_OPTS
    + _SOLVER_OPTS
    + [
        _Option("n-list", _parse_int_list, [10, 12, 14], "system sizes, comma list"),
        _Option("n-mc", int, 1_000_000, "Monte Carlo trials per term"),
        _Option("n-disorder", int, 200, "disorder replicas per system size"),
        _Option("enum-cap", int, 24, "refuse enumeration beyond 2^cap"),
        _Option("slack-c", float, 1.0, "finite-size slack constant C in C/N"),
    ],
    "overlap": _PARAM_OPTS
    + _RUNTIME_OPTS
    + [
        _Option("n-list", _parse_int_list, [8, 10, 12, 14], "system sizes, comma list"),
        _Option("n-disorder", int, 300, "disorder replicas per system size"),
        _Option("enum-cap", int, 24, "refuse enumeration beyond 2^cap"),
    ],
    "lipschitz": _PARAM_OPTS
    + _RUNTIME_OPTS
    + [
        _Option("r-max", int, 8, "max clause count per trial"),
        _Option("trials", int, 100_000, "number of trials"),
    ],
    "contraction": _PARAM_OPTS
    + _RUNTIME_OPTS
    + [
        _Option("pairs", int, 20, "number of coupled population pairs"),
        _Option("pop-size", int, 100_000, "population size M"),
        _Option("pair-kind", str, "delta", "'delta' (+1/-1 masses) or 'uniform'"),
        _Option("ratios-csv", str, None, "write per-pair ratios here"),
    ],
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; the contract wants 4."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _build_parser():
    parser = _Parser(prog="ksat-cavity", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, opts in _COMMAND_OPTS.items():
        sub = subparsers.add_parser(command)
        for opt in opts:
            sub.add_argument(f"--{opt.name}", dest=opt.dest, type=str,
                             default=None, help=opt.help)
    return parser


def _read_config_file(path):
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (want key = value): {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args, opts):
    """Merge defaults < config file < explicit flags, with typed conversion."""
    from_file = {}
    if args.config is not None:
        from_file = _read_config_file(args.config)
    resolved = {}
    for opt in opts:
        raw = getattr(args, opt.dest)
        if raw is None and opt.dest in from_file:
            raw = from_file[opt.dest]
        if raw is None:
            resolved[opt.dest] = opt.default
        else:
            resolved[opt.dest] = opt.convert(raw)
    return resolved


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def _emit(doc):
    print(json.dumps(doc, indent=2, default=_jsonable))


def _params_from(cfg):
    return ModelParams(p=cfg["p"], alpha=cfg["alpha"], beta=cfg["beta"], seed=cfg["seed"])


def _config_echo(command, cfg):
    echo = {k: _jsonable(v) for k, v in cfg.items() if k != "config"}
    echo["command"] = command
    echo["backend"] = kernels.BACKEND
    return echo


def _cmd_regions(cfg):
    grid_mode = any(cfg[k] is not None for k in ("p_grid", "alpha_grid", "beta_grid"))
    if cfg["scan_inclusion"]:
        violations = inclusion_scan()
        doc = {
            "config": _config_echo("regions", cfg),
            "scan": "inclusion",
            "violations": violations,
        }
        _emit(doc)
        return EXIT_OK if not violations else EXIT_VIOLATION
    if grid_mode:
        p_values = cfg["p_grid"] if cfg["p_grid"] is not None else [cfg["p"]]
        alphas = cfg["alpha_grid"] if cfg["alpha_grid"] is not None else [cfg["alpha"]]
        betas = cfg["beta_grid"] if cfg["beta_grid"] is not None else [cfg["beta"]]
        writer = csv.writer(sys.stdout)
        writer.writerow(
            ["p", "alpha", "beta", "lhs_13", "lhs_14", "lhs_15",
             "pass_13", "pass_14", "pass_15", "pass_small_alpha"]
        )
        for p in p_values:
            for alpha in alphas:
                for beta in betas:
                    rep = region_check(ModelParams(p=int(p), alpha=float(alpha),
                                                   beta=float(beta)))
                    writer.writerow(
                        [rep.p, rep.alpha, rep.beta, rep.lhs_13, rep.lhs_14,
                         rep.lhs_15, rep.pass_13, rep.pass_14, rep.pass_15,
                         rep.pass_small_alpha]
                    )
        return EXIT_OK
    report = region_check(_params_from(cfg))
    _emit({"config": _config_echo("regions", cfg), "region": report.to_dict()})
    return EXIT_OK


def _solve(cfg, params, label):
    init = cfg["init"]
    if init not in INIT_PRESETS:
        raise ValueError(f"init must be one of {INIT_PRESETS}, got {init!r}")
    rng = rng_stream(params.seed, label, INIT_PRESETS.index(init))
    _progress(f"solving fixed point: M={cfg['pop_size']} tol={cfg['tol']} init={init}")
    result = solve_fixed_point(
        params,
        size=cfg["pop_size"],
        max_iters=cfg["max_iters"],
        tol=cfg["tol"],
        init=init,
        rng=rng,
    )
    _progress(
        f"fixed point {'converged' if result.converged else 'DID NOT converge'} "
        f"after {result.iterations} iterations (last step {result.final_distance:.3e})"
    )
    return result


def _cmd_fixedpoint(cfg):
    params = _params_from(cfg)
    result = _solve(cfg, params, TAG_FIXEDPOINT)
    if cfg["snapshot"] is not None:
        save_population(cfg["snapshot"], result.population, params)
    if cfg["trace"] is not None:
        save_trace(cfg["trace"], result.trace)
    doc = {
        "config": _config_echo("fixedpoint", cfg),
        "converged": result.converged,
        "iterations": result.iterations,
        "final_distance": result.final_distance,
        "summary": summarize(result.population).to_dict(),
    }
    _emit(doc)
    return EXIT_OK if result.converged else EXIT_NONCONVERGED


def _cmd_exact(cfg):
    params = _params_from(cfg)
    estimate = free_energy(
        params,
        n_sites=cfg["n"],
        n_disorder=cfg["n_disorder"],
        rng=rng_stream(params.seed, TAG_EXACT, cfg["n"]),
        enum_cap=cfg["enum_cap"],
        trace_path=cfg["trace"],
    )
    _emit({"config": _config_echo("exact", cfg), "free_energy": estimate.to_dict()})
    return EXIT_OK


def _cmd_rs(cfg):
    params = _params_from(cfg)
    if cfg["snapshot_in"] is not None:
        pop, _ = load_population(cfg["snapshot_in"])
        converged = True
    elif cfg["no_solve"]:
        from .cavity import make_population

        pop = make_population(cfg["pop_size"], preset=cfg["init"],
                              rng=rng_stream(params.seed, TAG_RS, 0))
        converged = True
    else:
        result = _solve(cfg, params, TAG_FIXEDPOINT)
        pop = result.population
        converged = result.converged
    breakdown = rs_eval(pop, params, cfg["n_mc"], rng_stream(params.seed, TAG_RS, 1))
    doc = {
        "config": _config_echo("rs", cfg),
        "p": params.p,
        "alpha": params.alpha,
        "beta": params.beta,
        "M": int(pop.size),
        "n_mc": cfg["n_mc"],
        "log2_term": breakdown.log2_term,
        "cavity_term": breakdown.cavity_term.to_dict(),
        "correction_term": breakdown.correction_term.to_dict(),
        "total": breakdown.total.value,
        "std_error": breakdown.total.std_error,
    }
    _emit(doc)
    return EXIT_OK if converged else EXIT_NONCONVERGED


def _cmd_compare(cfg):
    params = _params_from(cfg)
    region = region_check(params)
    warning = None
    if not (region.pass_13 and region.pass_14):
        warning = (
            "parameters outside the proven region: the fixed-point value "
            "is only an upper-bound candidate for the free energy"
        )
        _progress(f"warning: {warning}")
    result = _solve(cfg, params, TAG_COMPARE)
    breakdown = rs_eval(
        result.population, params, cfg["n_mc"], rng_stream(params.seed, TAG_COMPARE, 100)
    )
    _progress(f"rs total = {breakdown.total.value:.6f} +- {breakdown.total.std_error:.1e}")
    exact_rows = []
    gap_rows = []
    all_pass = True
    for n in cfg["n_list"]:
        estimate = free_energy(
            params,
            n_sites=n,
            n_disorder=cfg["n_disorder"],
            rng=rng_stream(params.seed, TAG_COMPARE, 200 + n),
            enum_cap=cfg["enum_cap"],
        )
        gap = abs(estimate.value - breakdown.total.value)
        tolerance = 3.0 * math.hypot(estimate.std_error, breakdown.total.std_error)
        tolerance += cfg["slack_c"] / n
        ok = gap <= tolerance
        all_pass = all_pass and ok
        _progress(f"N={n}: exact={estimate.value:.6f} gap={gap:.3e} tol={tolerance:.3e}")
        exact_rows.append({"n": n, **estimate.to_dict()})
        gap_rows.append({"n": n, "gap": gap, "tolerance": tolerance, "pass": ok})
    doc = {
        "config": _config_echo("compare", cfg),
        "region": region.to_dict(),
        "fixed_point": {
            "converged": result.converged,
            "iterations": result.iterations,
            "final_distance": result.final_distance,
        },
        "rs": breakdown.to_dict(),
        "exact": exact_rows,
        "gaps": gap_rows,
        "all_pass": all_pass,
    }
    if warning:
        doc["warning"] = warning
    _emit(doc)
    if not result.converged:
        return EXIT_NONCONVERGED
    if region.pass_13 and region.pass_14 and not all_pass:
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_overlap(cfg):
    params = _params_from(cfg)
    rows = []
    for n in cfg["n_list"]:
        moments = overlap_moment_gap(
            params,
            n_sites=n,
            n_disorder=cfg["n_disorder"],
            rng=rng_stream(params.seed, TAG_OVERLAP, n),
            enum_cap=cfg["enum_cap"],
        )
        _progress(f"N={n}: gap={moments.gap.value:.5f} +- {moments.gap.std_error:.1e}")
        rows.append(moments.to_dict())
    _emit({"config": _config_echo("overlap", cfg), "moments": rows})
    return EXIT_OK


def _cmd_lipschitz(cfg):
    params = _params_from(cfg)
    result = lipschitz_test(
        params,
        r_max=cfg["r_max"],
        n_trials=cfg["trials"],
        rng=rng_stream(params.seed, TAG_LIPSCHITZ),
    )
    _emit({"config": _config_echo("lipschitz", cfg), **result.to_dict()})
    return EXIT_OK if result.violations == 0 else EXIT_VIOLATION


def _cmd_contraction(cfg):
    params = _params_from(cfg)
    result = contraction_test(
        params,
        size=cfg["pop_size"],
        n_pairs=cfg["pairs"],
        rng=rng_stream(params.seed, TAG_CONTRACTION),
        pair_kind=cfg["pair_kind"],
    )
    if cfg["ratios_csv"] is not None:
        with open(cfg["ratios_csv"], "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["pair", "ratio", "coupled_ratio"])
            writer.writerows(
                (i, r, c)
                for i, (r, c) in enumerate(zip(result.ratios, result.coupled_ratios))
            )
    region = region_check(params)
    _emit({"config": _config_echo("contraction", cfg), **result.to_dict()})
    if region.pass_14 and not result.within_bound:
        return EXIT_VIOLATION
    return EXIT_OK


_HANDLERS = {
    "regions": _cmd_regions,
    "fixedpoint": _cmd_fixedpoint,
    "exact": _cmd_exact,
    "rs": _cmd_rs,
    "compare": _cmd_compare,
    "overlap": _cmd_overlap,
    "lipschitz": _cmd_lipschitz,
    "contraction": _cmd_contraction,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args, _COMMAND_OPTS[args.command])
        kernels.set_threads(cfg.get("threads"))
        return _HANDLERS[args.command](cfg)
    except (ValueError, CapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
