"""Command line front end.

Every subcommand reads an optional JSON config file, applies repeatable
``--set dotted.path=value`` overrides on top, resolves the seed, echoes
the resolved configuration into the output directory, then runs.  All
files are written atomically.  Exit codes: 0 on success, 2 for config or
feasibility problems, 3 when a validation run finds formula violations,
1 for anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys
import traceback

from .bounds import min_distance_lower_bound, rate_report
from .codebook import ConcatCodebook, export_codewords_csv, plan_params, write_params_json
from .errors import DegenerateFadingError, InfeasibleError, ValidationFailure
from .fading import parse_distribution
from .harness import (
    CONFIG_KEYS,
    ExperimentConfig,
    MomentGridConfig,
    moment_validation,
    run_experiment,
    write_text_atomic,
)
from .packing import (
    PROFILES,
    PackingSpec,
    check_projection_property,
    export_csv,
    generate_expurgated,
    verify_packing,
)

CONSTRUCT_KEYS = {
    "n": "block length",
    "a": "distance exponent margin in (0, 1/8)",
    "power_bound": "energy budget A per codeword",
    "eps1": "inner code distance fraction",
    "eps2": "outer code distance fraction",
    "field_seed": "seed for the field modulus searches (--seed sets this)",
    "export_codewords": "write the first k codewords to codewords.csv (0 = skip)",
}

BOUNDS_KEYS = {
    "n": "block length",
    "log2_size": "log2 of the codebook size",
    "power_bound": "energy budget A",
    "sigma2": "noise variance (used for the distance lower bound)",
    "lambda1": "type-I error budget",
    "lambda2": "type-II error budget",
    "d_min": "minimum distance; derived from the error budgets if omitted",
    "fading": "fading law record for the reference capacities (optional)",
    "snr": "signal to noise ratio for the reference capacities (optional)",
    "outage_eps": "outage probability for the outage capacity (optional)",
}

MOMENTS_KEYS = {
    "distributions": "list of fading law records to sweep",
    "modes": "subset of [\"csi\", \"nocsi\"]",
    "n": "vector length for the synthetic codewords",
    "draws": "Monte Carlo draws per check",
    "sigma2": "noise variance",
    "pair_count": "codeword pairs per law and mode",
    "vector_power": "per-coordinate variance of the synthetic codewords",
    "seed": "master seed",
    "chunk": "draws per batch",
    "tolerance_sigmas": "allowed deviation in standard errors",
}

PACKING_KEYS = {
    "spec.n": "dimension",
    "spec.target_size": "how many vectors to aim for",
    "spec.power_bound": "hard energy cap A (power n*A)",
    "spec.sampling_power": "sampling variance A' < A",
    "spec.distance_exponent": "margin a; distance floor is n^(1/4 + a)",
    "spec.seed": "sampling seed (--seed sets this)",
    "spec.fourth_moment_bound": "fourth-power budget per coordinate (optional)",
    "profile": " | ".join(PROFILES),
    "check_projection": "also run the projected-distance check (bool)",
    "projection.mu": "fraction of coordinates that survive projection",
    "projection.alpha": "projected distances must reach n^alpha",
    "projection.mode": "exhaustive | sampled",
    "projection.sample_count": "subsets per pair in sampled mode",
}


def _parse_set(values: list[str]) -> dict:
    out: dict = {}
    for item in values:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        node = out
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ValueError(f"--set path {key!r} collides with a scalar")
        node[parts[-1]] = val
    return out


def _deep_merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out


def _load_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ValueError("config file must hold a JSON object")
    return _deep_merge(cfg, _parse_set(args.set or []))


def _resolve_seed(args, cfg: dict, key: str = "seed") -> dict:
    if args.seed is not None:
        cfg[key] = int(args.seed)
    if cfg.get(key) is None:
        cfg[key] = secrets.randbelow(2**31)
        print(f"seed: {cfg[key]} (drawn; pass --seed to reproduce)")
    return cfg

def _dig(cfg: dict, dotted: str, default=None):
    node = cfg
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return default
        node = node[part]
    return node


def _outdir(args) -> str:
    os.makedirs(args.outdir, exist_ok=True)
    return args.outdir


def _echo_config(outdir: str, cfg: dict) -> None:
    write_text_atomic(os.path.join(outdir, "resolved_config.json"),
                      json.dumps(cfg, sort_keys=True, indent=1) + "\n")


def _keys_epilog(keys: dict) -> str:
    lines = ["config keys (settable via the JSON config or --set):"]
    lines += [f"  {k:28s} {v}" for k, v in keys.items()]
    return "\n".join(lines)


def cmd_construct(args) -> int:
    cfg = _load_config(args)
    if args.seed is not None:
        # construction is deterministic; the seed only steers modulus search
        cfg["field_seed"] = int(args.seed)
    outdir = _outdir(args)
    params = plan_params(
        n=int(cfg["n"]),
        a=float(cfg["a"]),
        power_bound=float(cfg.get("power_bound", 1.0)),
        eps1=float(cfg.get("eps1", 0.1)),
        eps2=float(cfg.get("eps2", 0.1)),
        field_seed=int(cfg.get("field_seed", 0)),
    )
    _echo_config(outdir, cfg)
    write_params_json(os.path.join(outdir, "params.json"), params)
    limit = int(cfg.get("export_codewords", 0))
    if limit > 0:
        book = ConcatCodebook(params)
        export_codewords_csv(os.path.join(outdir, "codewords.csv"), book, limit)
    print(f"n={params.n} q1={params.q1} (n1,k1)=({params.n1},{params.k1}) "
          f"(n2,k2)=({params.n2},{params.k2}) rate={params.rate:.6g} "
          f"min_distance={params.min_euclidean_distance:.6g} "
          f"log2_size={params.log2_size:.6g}")
    return 0


def cmd_simulate(args) -> int:
    cfg = _resolve_seed(args, _load_config(args))
    outdir = _outdir(args)
    exp = ExperimentConfig.from_dict(cfg)
    _echo_config(outdir, exp.to_dict())
    report = run_experiment(exp)
    write_text_atomic(os.path.join(outdir, "report.json"), report.full_json() + "\n")
    if args.format == "csv":
        write_text_atomic(os.path.join(outdir, "identities.csv"), report.identities_csv())
        write_text_atomic(os.path.join(outdir, "pairs.csv"), report.pairs_csv())
    r = report.results
    print(f"type-I pooled error rate: {r['type1']['pooled']['error_rate']}")
    print(f"type-II pooled accept rate: {r['type2']['pooled']['accept_rate']}")
    print(f"outage fraction: {r['outage']['fraction']}")
    return 0


def cmd_bounds(args) -> int:
    cfg = _load_config(args)
    outdir = _outdir(args)
    sigma2 = float(cfg.get("sigma2", 1.0))
    lam = float(cfg.get("lambda1", 0.0)) + float(cfg.get("lambda2", 0.0))
    derived_d = min_distance_lower_bound(lam, math.sqrt(sigma2)) if lam > 0 else 0.0
    d_min = float(cfg.get("d_min", derived_d))
    dist = parse_distribution(cfg["fading"]) if cfg.get("fading") else None
    report = rate_report(
        n=float(cfg["n"]),
        log2_size=float(cfg["log2_size"]),
        power_bound=float(cfg.get("power_bound", 1.0)),
        d_min=d_min,
        dist=dist,
        snr=None if cfg.get("snr") is None else float(cfg["snr"]),
        outage_eps=None if cfg.get("outage_eps") is None else float(cfg["outage_eps"]),
    )
    _echo_config(outdir, cfg)
    payload = {
        "n": report.n, "log2_size": report.log2_size, "rate": report.rate,
        "upper_bound": report.upper_bound, "power_bound": report.power_bound,
        "d_min": report.d_min, "d_min_from_error_budgets": derived_d,
        "outage_capacity": report.outage_capacity,
        "ergodic_capacity": report.ergodic_capacity,
    }
    if args.format == "csv":
        head = ",".join(payload)
        row = ",".join("" if v is None else repr(v) for v in payload.values())
        write_text_atomic(os.path.join(outdir, "bounds.csv"), head + "\n" + row + "\n")
    write_text_atomic(os.path.join(outdir, "bounds.json"),
                      json.dumps(payload, sort_keys=True, indent=1) + "\n")
    print(f"rate={report.rate:.6g} upper_bound={report.upper_bound:.6g}")
    return 0


def cmd_moments(args) -> int:
    cfg = _resolve_seed(args, _load_config(args))
    outdir = _outdir(args)
    dists = tuple(parse_distribution(d) for d in cfg.get("distributions", []))
    if not dists:
        raise ValueError("moments needs at least one entry under 'distributions'")
    grid = MomentGridConfig(
        distributions=dists,
        modes=tuple(cfg.get("modes", ("csi", "nocsi"))),
        n=int(cfg.get("n", 64)),
        draws=int(cfg.get("draws", 1_000_000)),
        sigma2=float(cfg.get("sigma2", 1.0)),
        pair_count=int(cfg.get("pair_count", 3)),
        vector_power=float(cfg.get("vector_power", 1.0)),
        seed=int(cfg["seed"]),
        chunk=int(cfg.get("chunk", 20_000)),
        tolerance_sigmas=float(cfg.get("tolerance_sigmas", 4.0)),
    )
    _echo_config(outdir, cfg)
    report = moment_validation(grid)
    write_text_atomic(os.path.join(outdir, "moments.json"), report.to_json() + "\n")
    if args.format == "csv":
        head = "case,statistic,quantity,formula,estimate,std_error,deviation,ok"
        rows = [head] + [
            f"{r.case},{r.statistic},{r.quantity},{r.formula!r},{r.estimate!r},"
            f"{r.std_error!r},{r.deviation!r},{r.ok}"
            for r in report.rows
        ]
        write_text_atomic(os.path.join(outdir, "moments.csv"), "\n".join(rows) + "\n")
    bad = report.failures
    print(f"checked {len(report.rows)} moments, {len(bad)} outside "
          f"{grid.tolerance_sigmas} standard errors")
    if bad:
        for r in bad[:10]:
            print(f"  FAIL {r.case} {r.statistic} {r.quantity}: "
                  f"formula {r.formula:.6g} vs estimate {r.estimate:.6g} "
                  f"({r.deviation:.2f} SE)", file=sys.stderr)
        raise ValidationFailure(f"{len(bad)} moment checks failed")
    return 0


def cmd_packing(args) -> int:
    cfg = _load_config(args)
    if args.seed is not None:
        cfg.setdefault("spec", {})["seed"] = int(args.seed)
    if _dig(cfg, "spec.seed") is None:
        cfg.setdefault("spec", {})["seed"] = secrets.randbelow(2**31)
        print(f"seed: {cfg['spec']['seed']} (drawn; pass --seed to reproduce)")
    outdir = _outdir(args)
    spec = PackingSpec(
        n=int(_dig(cfg, "spec.n")),
        target_size=int(_dig(cfg, "spec.target_size")),
        power_bound=float(_dig(cfg, "spec.power_bound", 1.0)),
        sampling_power=float(_dig(cfg, "spec.sampling_power", 0.5)),
        distance_exponent=float(_dig(cfg, "spec.distance_exponent")),
        seed=int(_dig(cfg, "spec.seed")),
        fourth_moment_bound=_dig(cfg, "spec.fourth_moment_bound"),
    )
    profile = cfg.get("profile", "basic")
    _echo_config(outdir, cfg)
    vectors, report = generate_expurgated(spec, profile)
    problems = verify_packing(vectors, spec, profile)
    if problems:
        for p in problems[:10]:
            print(f"  VERIFY {p}", file=sys.stderr)
        raise ValidationFailure("independent packing verification failed")
    export_csv(os.path.join(outdir, "vectors.csv"), vectors, spec, profile)
    payload = {
        "profile": report.profile, "seed": report.seed, "sampled": report.sampled,
        "requested": report.requested, "survivors": report.survivors,
        "distance_floor": report.distance_floor,
        "removed": {"power": report.removed_power, "fourth": report.removed_fourth,
                    "band": report.removed_band, "distance": report.removed_distance},
    }
    if cfg.get("check_projection"):
        proj = check_projection_property(
            vectors,
            mu=float(_dig(cfg, "projection.mu", 1.0)),
            alpha=float(_dig(cfg, "projection.alpha", 0.25)),
            mode=_dig(cfg, "projection.mode", "sampled"),
            sample_count=int(_dig(cfg, "projection.sample_count", 200)),
            seed=spec.seed,
        )
        payload["projection"] = {
            "mode": proj.mode, "subset_size": proj.subset_size,
            "threshold": proj.threshold, "certified": proj.certified,
            "overall_min": proj.overall_min, "passed": proj.passed,
        }
        if not proj.passed:
            raise ValidationFailure("projected distances fell below the threshold")
    write_text_atomic(os.path.join(outdir, "report.json"),
                      json.dumps(payload, sort_keys=True, indent=1) + "\n")
    print(f"kept {report.survivors} of {report.sampled} sampled vectors "
          f"(floor {report.distance_floor:.6g})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicode",
        description="Identification codebooks, fading channel trials, and rate bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, keys):
        p = sub.add_parser(
            name, help=help_text, epilog=_keys_epilog(keys),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override one config entry (repeatable, dotted paths)")
        p.add_argument("--seed", type=int, help="master seed; drawn and printed if absent")
        p.add_argument("--outdir", default=".", help="where outputs are written")
        p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="also emit CSV tables when set to csv")
        p.set_defaults(fn=fn)
        return p

    add("construct", cmd_construct,
        "plan and build a concatenated codebook", CONSTRUCT_KEYS)
    add("simulate", cmd_simulate,
        "run identification trials over a channel", CONFIG_KEYS)
    add("bounds", cmd_bounds,
        "rate bounds and reference capacities", BOUNDS_KEYS)
    add("moments", cmd_moments,
        "validate the closed-form statistic moments by Monte Carlo", MOMENTS_KEYS)
    add("packing", cmd_packing,
        "sample and expurgate a sphere packing", PACKING_KEYS)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InfeasibleError, DegenerateFadingError, ValueError, KeyError,
            json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationFailure as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
