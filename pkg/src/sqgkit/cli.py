"""Command line: kernel | solve | diagnose | sweep | verify.

``solve`` owns one output directory per run: snapshots, the diagnostics CSV
(fixed column order), a far-field ratio CSV, the kernel profile CSV it used,
a progress sidecar (for crash-safe resume), and manifest.json.  A rerun on
the same directory with the same configuration resumes from the last intact
snapshot and reproduces the uninterrupted trajectory bit for bit.

``sweep`` fans independent runs over a list of dissipation orders (worker
count capped by SQG_THREADS) and tabulates fitted decay/growth exponents
against their predicted values from targets.csv.

``verify`` runs the named contract registry (quick: kernel oracles and
spectral identities; full: adds acceptance runs and rate fits), prints a
pass/fail table, writes a machine-readable report, and exits nonzero on any
failure.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .config import ConfigError, config_hash, parse_config
from .contracts import run_contracts
from .diagnostics import (
    AnnulusSpec,
    checkpoint_record,
    farfield_ratio_check,
    ratio_samples_to_csv,
    fit_decay_exponent,
    records_to_csv,
)
from .kernel import build_profile, profile_from_csv, profile_to_csv
from .solver import RunError, SolverConfig, mass, read_snapshot, run

_PROGRESS_NAME = "progress.json"
_MANIFEST_NAME = "manifest.json"


def _worker_cap():
    env = os.environ.get("SQG_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def targets_path():
    return os.path.join(os.path.dirname(__file__), "data", "targets.csv")


def load_targets(path=None):
    """targets.csv rows as {(quantity, alpha): exponent}."""
    out = {}
    with open(path or targets_path(), "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "quantity,alpha,target_exponent":
            raise ValueError(f"unexpected targets header: {header!r}")
        for line in fh:
            if not line.strip():
                continue
            quantity, alpha, exponent = line.strip().split(",")
            out[(quantity, float(alpha))] = float(exponent)
    return out


# -- kernel ---------------------------------------------------------------


def cmd_kernel(args):
    profile = build_profile(args.alpha, r_max=args.r_max, quad_tol=args.tol)
    profile_to_csv(profile, args.out)
    print(
        f"kernel profile alpha={args.alpha}: {profile.radii.size} radii, "
        f"r_star={profile.r_star:g} -> {args.out}"
    )
    return 0


# -- solve ----------------------------------------------------------------


def _write_json(path, payload):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    os.replace(tmp, path)


def _manifest(out_dir, payload):
    for rel in payload.get("paths", {}).values():
        if isinstance(rel, str) and not os.path.exists(os.path.join(out_dir, rel)):
            raise RuntimeError(f"manifest references missing path {rel!r}")
    _write_json(os.path.join(out_dir, _MANIFEST_NAME), payload)


def _intact_snapshots(out_dir):
    """Longest readable prefix snapshot_0000, snapshot_0001, ..."""
    snaps = []
    index = 0
    while True:
        path = os.path.join(out_dir, f"snapshot_{index:04d}.sqgf")
        if not os.path.exists(path):
            break
        try:
            snaps.append(read_snapshot(path))
        except (ValueError, OSError):
            break
        index += 1
    return snaps



def _resolve_annulus(cfg, options):
    r_max = options.annulus_r_max if options.annulus_r_max else cfg.L / 2.0
    r_min = (
        options.annulus_r_min
        if options.annulus_r_min
        else min(5.0 * cfg.width, r_max / 2.0)
    )
    return AnnulusSpec(r_min, r_max)


def _resume_payload(out_dir, cfg, options, run_hash, profile):
    progress_path = os.path.join(out_dir, _PROGRESS_NAME)
    if not os.path.exists(progress_path):
        return None
    with open(progress_path, "r", encoding="utf-8") as fh:
        progress = json.load(fh)
    if progress.get("config_hash") != run_hash:
        raise ConfigError(
            f"{out_dir} holds a run with a different configuration; refusing to mix"
        )
    snaps = _intact_snapshots(out_dir)
    done = progress.get("done", [])
    usable = min(len(snaps) - 1, len(done))  # snapshot 0 is the initial state
    if usable <= 0:
        return None
    snaps = snaps[: usable + 1]
    theta0 = snaps[0].theta
    m0 = mass(theta0)
    annulus = _resolve_annulus(cfg, options)
    records = [
        checkpoint_record(
            snap,
            theta0=theta0,
            mass0=m0,
            profile=profile,
            annulus=annulus,
            diss_integral=done[i]["diss_integral"],
            wq_q=options.wq_q,
            wgrad_p=options.wgrad_p,
            sigma=options.sigma,
        )
        for i, snap in enumerate(snaps[1:])
    ]
    return snaps, records, done[usable - 1]["diss_integral"]


def cmd_solve(args):
    cfg, options, warnings = parse_config(args.config)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    run_hash = config_hash(cfg, options)
    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)

    t_start = time.perf_counter()
    profile = build_profile(cfg.alpha)
    profile_csv = os.path.join(out_dir, "profile.csv")
    profile_to_csv(profile, profile_csv)

    resume = None
    if not args.fresh:
        resume = _resume_payload(out_dir, cfg, options, run_hash, profile)
        if resume is not None:
            print(f"resuming from t = {resume[0][-1].t:g} ({len(resume[0])} snapshots)")

    # the manifest says "incomplete" until the final write flips it, so a
    # killed process leaves an honestly-marked directory behind
    _manifest(
        out_dir,
        {"config_hash": run_hash, "status": "incomplete", "paths": {}, "version": __version__},
    )
    progress = {"config_hash": run_hash, "done": []}
    if resume is not None:
        progress["done"] = [
            {"index": i + 1, "t": s.t, "diss_integral": d["diss_integral"]}
            for i, (s, d) in enumerate(zip(resume[0][1:], _load_done(out_dir)))
        ]

    def on_checkpoint(index, snap, rec, state):
        progress["done"].append(
            {"index": index, "t": snap.t, "diss_integral": state.diss_integral}
        )
        _write_json(os.path.join(out_dir, _PROGRESS_NAME), progress)

    try:
        snaps, records = run(
            cfg,
            profile=profile,
            out_dir=out_dir,
            config_hash=run_hash,
            resume_from=resume,
            on_checkpoint=on_checkpoint,
            annulus=_resolve_annulus(cfg, options),
            wq_q=options.wq_q,
            wgrad_p=options.wgrad_p,
            sigma=options.sigma,
        )
    except RunError as exc:
        _manifest(
            out_dir,
            {
                "config_hash": run_hash,
                "status": "incomplete",
                "error": str(exc),
                "paths": {},
                "version": __version__,
            },
        )
        print(f"error: {exc}", file=sys.stderr)
        return 1

    diag_csv = os.path.join(out_dir, "diagnostics.csv")
    records_to_csv(records, diag_csv)
    m0 = records[0].mass
    ratio_csv = None
    if m0 != 0.0:
        ratio_csv = os.path.join(out_dir, "ratio.csv")
        annulus = _resolve_annulus(cfg, options)
        radii = np.linspace(annulus.r_min, annulus.r_max, 13)
        rows = farfield_ratio_check(snaps[-1], profile, m0, radii)
        ratio_samples_to_csv(rows, ratio_csv, t=snaps[-1].t, mass0=m0)

    paths = {
        "diagnostics_csv": "diagnostics.csv",
        "profile_csv": "profile.csv",
        "snapshots": [f"snapshot_{i:04d}.sqgf" for i in range(len(snaps))],
    }
    if ratio_csv:
        paths["ratio_csv"] = "ratio.csv"
    _manifest(
        out_dir,
        {
            "config_hash": run_hash,
            "status": "complete",
            "paths": paths,
            "wall_clock_s": round(time.perf_counter() - t_start, 3),
            "n_checkpoints": len(records),
            "version": __version__,
        },
    )
    print(f"run complete: {len(snaps)} snapshots -> {out_dir}")
    return 0


def _load_done(out_dir):
    with open(os.path.join(out_dir, _PROGRESS_NAME), "r", encoding="utf-8") as fh:
        return json.load(fh)["done"]


# -- diagnose ---------------------------------------------------------------


def cmd_diagnose(args):
    snaps = _intact_snapshots(args.snapshots)
    if not snaps:
        print(f"error: no snapshots in {args.snapshots}", file=sys.stderr)
        return 1
    if snaps[0].t != 0.0:
        print("error: missing the t = 0 snapshot (needed as reference data)", file=sys.stderr)
        return 1
    profile = profile_from_csv(args.alpha_profile)
    theta0 = snaps[0].theta
    m0 = mass(theta0)
    L = theta0.grid.L
    if args.annulus:
        r_min, r_max = (float(tok) for tok in args.annulus.split(","))
        annulus = AnnulusSpec(r_min, r_max)
    else:
        annulus = AnnulusSpec(L / 8.0, L / 2.0)
    records = [
        checkpoint_record(s, theta0=theta0, mass0=m0, profile=profile, annulus=annulus)
        for s in snaps[1:]
    ]
    records_to_csv(records, args.out)
    if m0 != 0.0:
        radii = np.linspace(annulus.r_min, annulus.r_max, 13)
        rows = farfield_ratio_check(snaps[-1], profile, m0, radii)
        ratio_samples_to_csv(rows, f"{args.out}.ratio.csv", t=snaps[-1].t, mass0=m0)
    print(f"{len(records)} checkpoint records -> {args.out}")
    return 0


# -- sweep ------------------------------------------------------------------


def _sweep_one(task):
    alpha, base_path, out_dir = task
    cfg, options, _ = parse_config(base_path)
    cfg = SolverConfig(
        **{
            **{k: getattr(cfg, k) for k in (
                "N", "L", "t_end", "cfl", "checkpoints", "init_kind", "amplitude",
                "width", "centers", "custom_expr", "dealias", "linear_only",
            )},
            "alpha": alpha,
        }
    )
    os.makedirs(out_dir, exist_ok=True)
    profile = build_profile(alpha)
    run_hash = config_hash(cfg, options)
    snaps, records = run(cfg, profile=profile, out_dir=out_dir, config_hash=run_hash)
    records_to_csv(records, os.path.join(out_dir, "diagnostics.csv"))
    profile_to_csv(profile, os.path.join(out_dir, "profile.csv"))
    ts = np.array([r.t for r in records])
    # fit over the last decade of the run (the acceptance window for
    # t_end = 50 is [5, 50])
    window = (max(ts[0], ts[-1] / 10.0), ts[-1])

    def fitted(vals):
        return fit_decay_exponent(ts, np.array(vals), window).exponent

    result = {
        "alpha": alpha,
        "linf_exp": fitted([r.linf for r in records]),
        "h3_exp": fitted([r.h_sigma for r in records]),
        "wq_exp": fitted([r.wq for r in records]),
        "annulus_exp": fitted([r.annulus_cancel for r in records]),
        "v_exp": fitted([r.v_weighted for r in records]),
    }
    _manifest(
        out_dir,
        {
            "config_hash": run_hash,
            "status": "complete",
            "paths": {
                "diagnostics_csv": "diagnostics.csv",
                "profile_csv": "profile.csv",
                "snapshots": [f"snapshot_{i:04d}.sqgf" for i in range(len(snaps))],
            },
            "fits": result,
            "version": __version__,
        },
    )
    return result


def cmd_sweep(args):
    alphas = [float(tok) for tok in args.alphas.split(",") if tok.strip()]
    if not alphas:
        print("error: empty alpha list", file=sys.stderr)
        return 1
    unique = sorted(set(alphas))
    if len(unique) != len(alphas):
        print("notice: duplicate alphas removed", file=sys.stderr)
    bad = [a for a in unique if not 0.0 < a <= 1.0]
    if bad:
        print(f"error: sweep alphas must lie in (0, 1], got {bad}", file=sys.stderr)
        return 1
    os.makedirs(args.out_dir, exist_ok=True)
    tasks = [
        (a, args.config, os.path.join(args.out_dir, f"alpha_{a:.4g}")) for a in unique
    ]
    workers = min(_worker_cap(), len(tasks))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, tasks))
    else:
        results = [_sweep_one(t) for t in tasks]

    targets = load_targets(args.targets)
    combined = os.path.join(args.out_dir, "exponents.csv")
    with open(combined, "w", encoding="utf-8") as fh:
        fh.write(
            "alpha,linf_exp,linf_target,h3_exp,h3_target,wq_exp,wq_target,"
            "annulus_exp,annulus_target,v_exp,v_target\n"
        )
        for res in results:
            a = res["alpha"]
            fh.write(
                ",".join(
                    repr(float(v))
                    for v in (
                        a,
                        res["linf_exp"],
                        targets[("linf", a)],
                        res["h3_exp"],
                        targets[("h3", a)],
                        res["wq_exp"],
                        targets[("wq_q4", a)],
                        res["annulus_exp"],
                        targets[("annulus_cancel", a)],
                        res["v_exp"],
                        targets[("v_weighted", a)],
                    )
                )
                + "\n"
            )
    print(f"sweep complete: {len(results)} runs -> {combined}")
    return 0


# -- verify -----------------------------------------------------------------


def cmd_verify(args):
    results = run_contracts(level=args.level)
    for res in results:
        print(res.row())
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} contracts passed")
    if args.report:
        payload = [
            {
                "contract": r.contract_id,
                "passed": r.passed,
                "measured": r.measured,
                "bound": r.bound,
                "seconds": round(r.seconds, 3),
                "detail": r.detail,
            }
            for r in results
        ]
        _write_json(args.report, payload)
        print(f"report -> {args.report}")
    return 1 if n_fail else 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="sqgkit",
        description="fractional quasi-geostrophic solver and far-field diagnostics",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="tabulate the fractional heat kernel profile")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--r-max", type=float, default=400.0)
    p.add_argument("--tol", type=float, default=5e-9)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_kernel)

    p = sub.add_parser("solve", help="run the solver from a key=value config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument(
        "--fresh", action="store_true", help="ignore resumable state in out-dir"
    )
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("diagnose", help="recompute diagnostics from snapshots")
    p.add_argument("--snapshots", required=True)
    p.add_argument("--alpha-profile", required=True)
    p.add_argument("--annulus", default=None, help="r_min,r_max")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_diagnose)

    p = sub.add_parser("sweep", help="independent runs over a list of alphas")
    p.add_argument("--alphas", required=True, help="comma-separated, in (0, 1]")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--targets", default=None, help="targets.csv path")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", help="run the named verification contracts")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--report", default=None, help="write a JSON report here")
    p.set_defaults(fn=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
