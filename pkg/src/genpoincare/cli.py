"""Command-line front end.

Usage examples::

    genpoincare check-rank --config symmetric_gradient_r2.json
    genpoincare check-complex --config de_rham_r3_degree0.json --out report.json
    genpoincare find-complex --config symmetric_gradient_r2.json --dim-w 2
    genpoincare poincare --config gradient_r2.json --out poincare.json
    genpoincare riesz-check --config symmetric_gradient_r2.json

``--config`` also accepts the name of a bundled example (``genpoincare list``).
Exit status: 0 verified, 1 verification failed, 2 configuration error.
"""

import argparse
import json
import sys
from itertools import combinations
from pathlib import Path

from . import __version__, kernels
from .complexes import check_structure, completion_search, complex_from_completion, compose_condition
from .config import SCHEMA_VERSION, ConfigError, bundled_config_path, bundled_configs, load_config
from .poincare import (
    commutation_residual,
    ensemble,
    operator_summary,
    poincare_report,
    riesz_identity_residual,
)
from .symbol import sampled_rank_profile, sphere_samples

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2
RIESZ_TOL = 1e-8


def dump_report(report: dict) -> str:
    """Canonical JSON text; parsing and re-dumping it is the identity."""
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _resolve_config(value):
    path = Path(value)
    if not path.exists() and value in bundled_configs():
        return load_config(bundled_config_path(value))
    return load_config(path)


def _envelope(command, cfg, args, body):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config_name": cfg.name,
        "seed": args.seed if args.seed is not None else cfg.seed,
        "samples": args.samples,
        **body,
    }


def cmd_check_rank(cfg, args):
    seed = args.seed if args.seed is not None else cfg.seed
    profile = sampled_rank_profile(cfg.operator, args.samples, seed)
    ok = profile.is_constant
    lines = [f"{cfg.name}: symbol rank in [{profile.min_rank}, {profile.max_rank}] "
             f"over {profile.samples_used} sphere samples ({profile.method})"]
    if ok:
        lines.append(f"constant rank {profile.min_rank}")
    else:
        lines.append(f"rank drops to {profile.min_rank} at xi={list(profile.witness_min)}")
    body = {"operator": operator_summary(cfg.operator), "rank_profile": profile.to_dict(),
            "verified": ok}
    return ok, lines, body


def cmd_check_complex(cfg, args):
    if not cfg.has_q:
        raise ConfigError(f"config {cfg.name!r} has no q_matrices; check-complex needs Q")
    seed = args.seed if args.seed is not None else cfg.seed
    spec = cfg.complex_spec
    report = check_structure(spec, sphere_samples(spec.n, args.samples, seed))
    lines = [
        f"{cfg.name}: U=R^{spec.dims[0]} -> V=R^{spec.dims[1]} -> W=R^{spec.dims[2]}",
        f"  composition residual  {report.cond_compose:.6e} (tol {report.compose_tol:g})",
        f"  exact at witness      {report.cond_exact_at_witness} xi={list(report.exactness_witness)}",
        f"  rank P constant       {report.cond_rank_p.is_constant} "
        f"[{report.cond_rank_p.min_rank}, {report.cond_rank_p.max_rank}]",
        f"  rank Q constant       {report.cond_rank_q.is_constant} "
        f"[{report.cond_rank_q.min_rank}, {report.cond_rank_q.max_rank}]",
        f"  elliptic complex      {report.verdict}",
    ]
    body = {"conditions": report.to_dict(), "verified": report.verdict}
    return report.verdict, lines, body


def cmd_find_complex(cfg, args):
    dim_w = args.dim_w if args.dim_w is not None else cfg.dim_w
    if dim_w is None:
        raise ConfigError("find-complex needs --dim-w")
    if dim_w < 1:
        raise ConfigError("--dim-w must be positive")
    seed = args.seed if args.seed is not None else cfg.seed
    op = cfg.operator
    basis = completion_search(op, dim_w)
    samples = sphere_samples(op.n, args.samples, seed)
    elements = []
    for b in basis:
        spec = complex_from_completion(op, b)
        rep = check_structure(spec, samples)
        elements.append({
            "q_matrices": b.tolist(),
            "compose_residual": compose_condition(spec),
            "elliptic": rep.verdict,
            "exact_at_witness": rep.cond_exact_at_witness,
        })
    lines = [f"{cfg.name}: completions Q with QP = 0 and dim W = {dim_w}: dimension {len(basis)}"]
    for idx, e in enumerate(elements):
        lines.append(f"  basis[{idx}] elliptic={e['elliptic']} residual={e['compose_residual']:.2e}")
    if not elements:
        lines.append("  only Q = 0 composes to zero")
    body = {"dim_w": dim_w, "dimension": len(basis), "basis": elements,
            "any_elliptic": any(e["elliptic"] for e in elements)}
    return True, lines, body


def cmd_poincare(cfg, args):
    seed = args.seed if args.seed is not None else cfg.seed
    reports = []
    ok = True
    lines = []
    for p in cfg.p:
        rep = poincare_report(cfg.operator, p, cfg.grid_size, cfg.bandwidth, cfg.ensemble_size,
                              seed, args.samples, args.reading)
        reports.append(rep.to_dict())
        holds = rep.p2_bound_holds
        if not rep.rank_profile.is_constant or holds is False:
            ok = False
        if rep.empirical_constant is None:
            lines.append(f"{cfg.name} p={p:g}: skipped ({rep.skipped})")
        else:
            extra = f" <= bound {rep.theoretical_bound_p2:.6f}: {holds}" if holds is not None else ""
            lines.append(f"{cfg.name} p={p:g}: empirical constant {rep.empirical_constant:.6f} "
                         f"over {len(rep.ratios)} fields{extra}")
    return ok, lines, {"reports": reports, "verified": ok}


def cmd_riesz_check(cfg, args):
    seed = args.seed if args.seed is not None else cfg.seed
    op = cfg.operator
    n, size, bw = op.n, cfg.grid_size, cfg.bandwidth
    identity_worst = 0.0
    commute_worst = 0.0
    members = zip(ensemble(n, size, op.dim_u, bw, cfg.ensemble_size, seed),
                  ensemble(n, size, op.dim_v, bw, cfg.ensemble_size, seed + cfg.ensemble_size))
    for g, h in members:
        identity_worst = max(identity_worst, riesz_identity_residual(op, g, args.fault_zero_mode))
        for j, l in combinations(range(n), 2):
            commute_worst = max(commute_worst, commutation_residual(op, h, j, l))
    ok = identity_worst < RIESZ_TOL and commute_worst < RIESZ_TOL
    lines = [
        f"{cfg.name}: {cfg.ensemble_size} fields on N={size}, bandwidth {bw}",
        f"  max |sum_j A_j R_j Pg - Pg|   {identity_worst:.3e}",
        f"  max |d_j R_k h - d_k R_j h|   {commute_worst:.3e}",
        f"  within {RIESZ_TOL:g}: {ok}",
    ]
    body = {
        "grid_size": size,
        "bandwidth": bw,
        "ensemble_size": cfg.ensemble_size,
        "zero_mode": args.fault_zero_mode,
        "identity_residual": identity_worst,
        "commutation_residual": commute_worst,
        "tolerance": RIESZ_TOL,
        "verified": ok,
    }
    return ok, lines, body


COMMANDS = {
    "check-rank": cmd_check_rank,
    "check-complex": cmd_check_complex,
    "find-complex": cmd_find_complex,
    "poincare": cmd_poincare,
    "riesz-check": cmd_riesz_check,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="genpoincare", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="config JSON path or bundled example name")
        p.add_argument("--out", default=None, help="write the full JSON report here")
        p.add_argument("--samples", type=int, default=1000, help="unit-sphere samples for rank checks")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if name == "find-complex":
            p.add_argument("--dim-w", type=int, default=None, help="dimension of the target space W")
        if name == "poincare":
            p.add_argument("--reading", choices=("jacobian", "sum"), default="jacobian",
                           help="norm of the stacked Jacobian, or of the literal sum of partials")
        if name == "riesz-check":
            p.add_argument("--fault-zero-mode", choices=("zero", "identity"), default="zero",
                           help="fault injection: store the identity at xi = 0")
    sub.add_parser("list", help="list bundled example configs")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for name in bundled_configs():
            print(name)
        return EXIT_OK
    try:
        if args.samples < 1:
            raise ConfigError("--samples must be positive")
        cfg = _resolve_config(args.config)
        if args.samples < 2 * cfg.n:
            raise ConfigError(f"--samples must be at least {2 * cfg.n} to cover the axes")
        ok, lines, body = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print("\n".join(lines))
    if args.out:
        report = _envelope(args.command, cfg, args, body)
        report["backend"] = kernels.BACKEND
        Path(args.out).write_text(dump_report(report), encoding="utf-8")
    return EXIT_OK if ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
