"""Command-line front end: simulation, detection, and Monte-Carlo campaigns.

Subcommands: simulate, detect, arl, delay, curve, k, lift. All campaign
commands require an explicit --seed and are deterministic given their
arguments; --workers (or the ARQCD_WORKERS environment variable, which takes
precedence) only changes wall-clock time, never results.

Models of order q > 1 are handled through their first-order block form:
detection consumes blocks of q samples, and campaign horizons/run lengths
count blocks.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .detect import (
    BlockedDetector,
    ErgodicCusum,
    OgaCusum,
    StationaryCusum,
    run_detector,
    run_with_trace,
)
from .experiment import (
    DetectorConfig,
    McConfig,
    estimate_arl,
    estimate_delay,
    estimate_k,
    select_threshold,
    wadd_vs_arl_curve,
    write_curve_csv,
)
from .model import (
    ARModel,
    FirstOrderModel,
    lift_to_first_order,
    load_model,
    save_model,
    stationary_state_cov,
    validate_model,
)
from .simulate import (
    ChangeConfig,
    generate_trajectory,
    read_trajectory_csv,
    stationary_init,
    write_trajectory_csv,
)


class ConfigError(Exception):
    """Invalid configuration detected before any computation starts."""


def _parse_t0(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        t0 = int(text)
    except ValueError as exc:
        raise ConfigError(f"--t0 must be a positive integer or 'inf', got {text!r}") from exc
    if t0 < 1:
        raise ConfigError(f"--t0 must be >= 1, got {t0}")
    return float(t0)


def _load_validated(path: str) -> ARModel:
    if not os.path.exists(path):
        raise ConfigError(f"model file not found: {path}")
    try:
        m = load_model(path)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    report = validate_model(m)
    if not report.ok:
        raise ConfigError(f"invalid model {path}: " + "; ".join(report.errors()))
    return m


def _first_order(m: ARModel) -> tuple[FirstOrderModel, int]:
    """Lifted model plus the block size q."""
    return lift_to_first_order(m), m.order


def _threshold(args) -> float:
    if getattr(args, "threshold", None) is not None:
        if args.threshold <= 0:
            raise ConfigError("--threshold must be positive")
        return args.threshold
    if getattr(args, "gamma", None) is not None:
        if args.gamma <= 1:
            raise ConfigError("--gamma must exceed 1")
        return select_threshold(args.gamma)
    raise ConfigError("one of --threshold or --gamma is required")


def _workers(args) -> int:
    env = os.environ.get("ARQCD_WORKERS")
    if env is not None:
        try:
            w = int(env)
        except ValueError as exc:
            raise ConfigError(f"ARQCD_WORKERS must be an integer, got {env!r}") from exc
    else:
        w = args.workers
    if w < 1:
        raise ConfigError("worker count must be >= 1")
    return w


def _mc_config(args, f: FirstOrderModel) -> McConfig:
    if args.reps < 1:
        raise ConfigError("--reps must be >= 1")
    if args.horizon < 1:
        raise ConfigError("--horizon must be >= 1")
    return McConfig(replicates=args.reps, max_horizon=args.horizon,
                    master_seed=args.seed, workers=_workers(args),
                    init=stationary_init(f))


def _detector_config(name: str, args) -> DetectorConfig:
    if name not in ("ergodic", "stationary", "oga"):
        raise ConfigError(f"unknown detector {name!r}")
    if name == "oga":
        if args.beta <= 0 or args.eps <= 0:
            raise ConfigError("--beta and --eps must be positive")
        return DetectorConfig(kind="oga", step_size=args.beta, eig_floor=args.eps)
    return DetectorConfig(kind=name)


def _build_detector(name: str, f: FirstOrderModel, q: int, args):
    if name == "ergodic":
        det = ErgodicCusum(f, stationary_init(f))
    elif name == "stationary":
        det = StationaryCusum(stationary_state_cov(f) + np.eye(f.dim))
    elif name == "oga":
        if args.beta <= 0 or args.eps <= 0:
            raise ConfigError("--beta and --eps must be positive")
        det = OgaCusum(dim=f.dim, step_size=args.beta, eig_floor=args.eps)
    else:
        raise ConfigError(f"unknown detector {name!r}")
    return BlockedDetector(det, q) if q > 1 else det


def _cmd_simulate(args) -> int:
    m = _load_validated(args.model)
    f, q = _first_order(m)
    t0 = _parse_t0(args.t0)
    if args.length < 1:
        raise ConfigError("--len must be >= 1")
    cfg = ChangeConfig(change_point=t0, length=args.length, init=stationary_init(f))
    traj = generate_trajectory(f, cfg, seed=args.seed)
    write_trajectory_csv(traj, args.out)
    print(f"wrote {traj.length} samples (dim {traj.dim}, q={q} blocks) to {args.out}")
    return 0


def _cmd_detect(args) -> int:
    m = _load_validated(args.model)
    f, q = _first_order(m)
    c = _threshold(args)
    if args.traj is not None:
        if not os.path.exists(args.traj):
            raise ConfigError(f"trajectory file not found: {args.traj}")
        obs, _ = read_trajectory_csv(args.traj)
        if obs.shape[1] * q != f.dim:
            raise ConfigError(
                f"trajectory dim {obs.shape[1]} is incompatible with model dim "
                f"{f.dim // q} (order {q})"
            )
    else:
        if args.length is None or args.seed is None or args.t0 is None:
            raise ConfigError("provide --traj, or --t0/--len/--seed for inline simulation")
        cfg = ChangeConfig(change_point=_parse_t0(args.t0), length=args.length,
                           init=stationary_init(f))
        traj = generate_trajectory(f, cfg, seed=args.seed)
        if q > 1:
            obs = traj.observations.reshape(-1, f.dim // q)
        else:
            obs = traj.observations
    detector = _build_detector(args.detector, f, q, args)
    true_model = f if args.detector == "oga" and q == 1 else None
    if args.trace is not None:
        alarm = run_with_trace(detector, obs, c, args.trace, true_model=true_model)
    else:
        alarm = run_detector(detector, obs, c)
    if alarm is None:
        print(f"no alarm within {obs.shape[0]} samples (threshold {c:g})")
    else:
        print(f"alarm at t={alarm.stopping_time} (statistic {alarm.statistic_at_stop:.6g}, "
              f"threshold {c:g})")
    return 0


def _cmd_arl(args) -> int:
    m = _load_validated(args.model)
    f, _ = _first_order(m)
    c = _threshold(args)
    det = _detector_config(args.detector, args)
    cfg = _mc_config(args, f)
    res = estimate_arl(f, det, c, cfg)
    print(f"ARL estimate: {res.estimate:.6g} (se {res.std_error:.3g}, "
          f"censored {res.n_censored}/{res.n}, threshold {c:.6g})")
    return 0


def _cmd_delay(args) -> int:
    m = _load_validated(args.model)
    f, _ = _first_order(m)
    c = _threshold(args)
    det = _detector_config(args.detector, args)
    cfg = _mc_config(args, f)
    if args.t0 < 1 or args.t0 > args.horizon:
        raise ConfigError("--t0 must be in [1, --horizon]")
    res = estimate_delay(f, det, c, args.t0, cfg)
    print(f"delay estimate: {res.estimate:.6g} (se {res.std_error:.3g}, "
          f"censored {res.n_censored}, discarded {res.n_discarded}, n {res.n})")
    return 0


def _cmd_curve(args) -> int:
    m = _load_validated(args.model)
    f, _ = _first_order(m)
    names = [s.strip() for s in args.detectors.split(",") if s.strip()]
    if not names:
        raise ConfigError("--detectors must name at least one detector")
    dets = [_detector_config(name, args) for name in names]
    try:
        gammas = [float(g) for g in args.gammas.split(",")]
    except ValueError as exc:
        raise ConfigError(f"--gammas must be a comma-separated number list: {exc}") from exc
    if any(g <= 1 for g in gammas) or sorted(gammas) != gammas:
        raise ConfigError("--gammas must be ascending and all > 1")
    cfg = _mc_config(args, f)
    rows = wadd_vs_arl_curve(f, dets, gammas, cfg, t0=args.t0)
    write_curve_csv(rows, args.out)
    print(f"wrote {len(rows)} curve rows to {args.out}")
    if args.plot is not None:
        _plot_curve(rows, args.plot)
        print(f"wrote plot to {args.plot}")
    return 0


def _plot_curve(rows, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for name in dict.fromkeys(r.detector for r in rows):
        pts = [r for r in rows if r.detector == name]
        ax.plot([r.arl_hat for r in pts], [r.delay_hat for r in pts],
                marker="o", label=name)
    ax.set_xscale("log")
    ax.set_xlabel("ARL")
    ax.set_ylabel("mean detection delay")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _cmd_k(args) -> int:
    m = _load_validated(args.model)
    f, _ = _first_order(m)
    if args.burn_in < 0 or args.burn_in >= args.horizon:
        raise ConfigError("--burn-in must be in [0, --horizon)")
    cfg = McConfig(replicates=args.reps, max_horizon=args.horizon,
                   master_seed=args.seed, workers=_workers(args),
                   init=stationary_init(f))
    res = estimate_k(f, horizon=args.horizon, cfg=cfg, burn_in=args.burn_in)
    print(f"drift estimate: {res.estimate:.6g} (se {res.std_error:.3g}, n {res.n})")
    return 0


def _cmd_lift(args) -> int:
    m = _load_validated(args.model)
    f, q = _first_order(m)
    lifted = ARModel(coeffs=(f.a,), innovation_cov=f.r)
    if args.out is not None:
        save_model(lifted, args.out)
        print(f"wrote first-order form (dim {f.dim} = {q} x {m.dim}) to {args.out}")
    else:
        import json

        print(json.dumps({
            "dim": f.dim, "order": 1,
            "coeffs": [f.a.tolist()],
            "innovation_cov": f.r.tolist(),
        }, indent=2))
    return 0


def _add_oga_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta", type=float, default=1e-3,
                   help="OGA step size (default 1e-3)")
    p.add_argument("--eps", type=float, default=1e-4,
                   help="OGA eigenvalue floor for the covariance estimate (default 1e-4)")


def _add_campaign_flags(p: argparse.ArgumentParser, reps: int, horizon: int) -> None:
    p.add_argument("--reps", type=int, default=reps,
                   help=f"Monte-Carlo replicates (default {reps})")
    p.add_argument("--horizon", type=int, default=horizon,
                   help=f"per-replicate step cap (default {horizon})")
    p.add_argument("--seed", type=int, required=True, help="master seed (required)")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel workers; ARQCD_WORKERS overrides (results unaffected)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arqcd",
        description="Quickest change detection for AR disturbance signals in Gaussian noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a simulated trajectory CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--t0", required=True, help="change point (positive integer or 'inf')")
    p.add_argument("--len", dest="length", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("detect", help="run one detector over one trajectory")
    p.add_argument("--model", required=True)
    p.add_argument("--detector", required=True, choices=["ergodic", "stationary", "oga"])
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None,
                   help="false-alarm budget; threshold becomes log(gamma)")
    p.add_argument("--traj", default=None, help="trajectory CSV (from `simulate`)")
    p.add_argument("--t0", default=None, help="inline simulation change point")
    p.add_argument("--len", dest="length", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trace", default=None, help="write per-step trace CSV here")
    _add_oga_flags(p)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("arl", help="estimate the average run length to false alarm")
    p.add_argument("--model", required=True)
    p.add_argument("--detector", required=True, choices=["ergodic", "stationary", "oga"])
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    _add_campaign_flags(p, reps=2000, horizon=10_000)
    _add_oga_flags(p)
    p.set_defaults(func=_cmd_arl)

    p = sub.add_parser("delay", help="estimate the mean detection delay")
    p.add_argument("--model", required=True)
    p.add_argument("--detector", required=True, choices=["ergodic", "stationary", "oga"])
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--t0", type=int, default=1, help="change point (default 1)")
    _add_campaign_flags(p, reps=2000, horizon=10_000)
    _add_oga_flags(p)
    p.set_defaults(func=_cmd_delay)

    p = sub.add_parser("curve", help="delay-vs-ARL curve over a gamma grid")
    p.add_argument("--model", required=True)
    p.add_argument("--detectors", required=True,
                   help="comma-separated subset of ergodic,stationary,oga")
    p.add_argument("--gammas", required=True, help="ascending comma-separated list, all > 1")
    p.add_argument("--t0", type=int, default=1)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--plot", default=None, help="optional PNG of the curves")
    _add_campaign_flags(p, reps=2000, horizon=10_000)
    _add_oga_flags(p)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("k", help="estimate the post-change drift constant")
    p.add_argument("--model", required=True)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=1000)
    _add_campaign_flags(p, reps=20, horizon=100_000)
    p.set_defaults(func=_cmd_k)

    p = sub.add_parser("lift", help="print or write the first-order form of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_lift)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
