"""Command-line surface: seeded, CSV-emitting analysis commands.

Every command writes one CSV (RFC-4180 style, dot decimal, UTF-8) plus a
sidecar ``<out>.config.json`` echoing the effective configuration.  Output
is deterministic for a given seed and config.  ``MAGCAP_LOG`` sets the log
level (DEBUG/INFO/WARNING/...).
"""

import argparse
import csv
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .actuation import ActuationMode, approximation_error, force_profile
from .config import MODE_NAMES, load_config, write_effective_config
from .errors import MagcapError
from .magnetics import DipoleSource, unit
from .risk import (abs_friction_impulse, contact_profile, mean_normal_force,
                   net_twist_per_cycle)
from .sensing import PoseEstimate, SensorArray, localize_capsule, \
    simulate_reading
from .sim import (PropulsionConfig, default_environment, load_environment,
                  run_propulsion)

log = logging.getLogger("magcap")

OMEGA_DC = np.array([1.0, 0.0, 0.0])  # +x tube axis for analytic commands
THETA_AR_GRID_DEG = (10.0, 30.0, 50.0, 70.0, 90.0)


def _fmt(x):
    return format(float(x), ".12e")


def _write_csv(path, schema, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema: {schema}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_force_profile(config, args):
    """Force decomposition over one actuator revolution (raw + normalized)."""
    geom = config.geometry(OMEGA_DC)
    prof = force_profile(geom, config.ma_moment_a_m2, config.mc_moment_a_m2,
                         n_samples=args.samples)
    totals = [float(np.linalg.norm(dec.total)) for _, dec in prof]
    scale = max(totals)
    rows = []
    for (theta_ax, dec), f_tot in zip(prof, totals):
        f_r = float(np.linalg.norm(dec.remainder))
        raw = (dec.f_p_signed, dec.f_l_signed, f_r, f_tot)
        rows.append([_fmt(math.degrees(theta_ax))]
                    + [_fmt(v) for v in raw]
                    + [_fmt(v / scale) for v in raw])
    _write_csv(config.out, "magcap.force-profile/1",
               ["theta_ax_deg", "f_p", "f_l_signed", "f_r", "f_total",
                "f_p_norm", "f_l_signed_norm", "f_r_norm", "f_total_norm"],
               rows)


def cmd_risk_sweep(config, args):
    """Wall contact and net twist per cycle for CRMA/RRMA."""
    modes = [m.strip().lower() for m in args.modes.split(",") if m.strip()]
    if not modes:
        raise MagcapError("empty mode list")
    for m in modes:
        if m not in ("crma", "rrma"):
            raise MagcapError(f"risk sweep supports crma/rrma, got {m!r}")
    geom = config.geometry(OMEGA_DC)
    rows = []
    for mode_name in sorted(modes):
        for theta_ar_deg in THETA_AR_GRID_DEG:
            if mode_name == "rrma":
                cfg_mode = ActuationMode.rrma(math.radians(theta_ar_deg))
            else:
                cfg_mode = ActuationMode.crma()
            prof = contact_profile(geom, config.ma_moment_a_m2,
                                   config.mc_moment_a_m2, cfg_mode,
                                   rate=config.spin_rate_rad_s)
            net = net_twist_per_cycle(prof)
            mass = abs_friction_impulse(prof)
            for s in prof.samples:
                rows.append([mode_name, _fmt(theta_ar_deg),
                             _fmt(math.degrees(s.theta_ax)),
                             _fmt(s.normal_force), _fmt(s.signed_friction),
                             str(s.spin_sign), _fmt(net), _fmt(mass)])
    _write_csv(config.out, "magcap.risk-sweep/1",
               ["mode", "theta_ar_deg", "theta_ax_deg", "normal_force_n",
                "signed_friction_n", "spin_sign", "net_twist_per_cycle_n",
                "abs_friction_impulse_n"],
               rows)


def cmd_normal_force_sweep(config, args):
    """Mean and max wall normal force versus reciprocation angle."""
    geom = config.geometry(OMEGA_DC)
    rows = []
    for theta_ar_deg in THETA_AR_GRID_DEG:
        theta_ar = math.radians(theta_ar_deg)
        mean = mean_normal_force(geom, config.ma_moment_a_m2,
                                 config.mc_moment_a_m2, theta_ar)
        prof = contact_profile(geom, config.ma_moment_a_m2,
                               config.mc_moment_a_m2,
                               ActuationMode.rrma(theta_ar),
                               rate=config.spin_rate_rad_s)
        peak = max(s.normal_force for s in prof.samples)
        rows.append([_fmt(theta_ar_deg), _fmt(mean), _fmt(peak)])
    _write_csv(config.out, "magcap.normal-force-sweep/1",
               ["theta_ar_deg", "mean_normal_force_n", "max_normal_force_n"],
               rows)


def localization_trials(n_trials, noise_sigma, seed):
    """Seeded random-pose localization benchmark.

    True poses are drawn over the sensing workspace, the initial guess is
    the truth perturbed by a few millimeters and degrees (tracking regime),
    and the fit runs on one simulated noisy reading per pose.  Returns a
    list of (position_error_m, orientation_error_deg, converged).
    """
    rng = np.random.default_rng(seed)
    array = SensorArray.default(noise_sigma=noise_sigma)
    lo = np.array([0.12, 0.18, 0.08])
    hi = np.array([0.30, 0.36, 0.20])
    results = []
    for _ in range(n_trials):
        p_true = lo + rng.random(3) * (hi - lo)
        m_true = unit(rng.normal(size=3))
        capsule = DipoleSource(p_true, 0.97855, m_true)
        reading = simulate_reading(array, capsule, rng_seed=rng)
        guess = PoseEstimate(p_true + rng.normal(0.0, 2e-3, 3),
                             unit(m_true + rng.normal(0.0, 0.05, 3)),
                             np.array([1.0, 0.0, 0.0]))
        est = localize_capsule(reading, array, 0.97855, guess)
        pos_err = float(np.linalg.norm(est.position - p_true))
        cosang = float(np.clip(est.moment_direction @ m_true, -1.0, 1.0))
        results.append((pos_err, math.degrees(math.acos(cosang)),
                        est.converged))
    return results


def cmd_localize_bench(config, args):
    """Per-trial localization errors plus an RMS summary row."""
    trials = localization_trials(args.trials, config.noise_sigma_t,
                                 config.seed)
    rows = [[str(i), _fmt(p), _fmt(o), str(int(c))]
            for i, (p, o, c) in enumerate(trials)]
    pos = np.array([p for p, _, _ in trials])
    ori = np.array([o for _, o, _ in trials])
    rows.append(["rms", _fmt(math.sqrt(float(np.mean(pos**2)))),
                 _fmt(math.sqrt(float(np.mean(ori**2)))),
                 str(sum(int(c) for _, _, c in trials))])
    _write_csv(config.out, "magcap.localize-bench/1",
               ["trial", "position_error_m", "orientation_error_deg",
                "converged"],
               rows)


def cmd_propel(config, args):
    """Closed-loop propulsion across seeds and modes; summary CSV plus one
    trajectory CSV per run next to it."""
    env = load_environment(args.env) if args.env else default_environment()
    modes = [m.strip().lower() for m in args.modes.split(",") if m.strip()]
    if not modes:
        raise MagcapError("empty mode list")
    for m in modes:
        if m not in MODE_NAMES:
            raise MagcapError(f"unknown mode {m!r}")
    prop = PropulsionConfig(dt=config.dt_s,
                            time_budget_s=config.time_budget_s,
                            spin_rate=config.spin_rate_rad_s,
                            d=config.d_m,
                            alpha=math.radians(config.alpha_deg),
                            beta=math.radians(config.beta_deg),
                            ma_mag=config.ma_moment_a_m2,
                            mc_mag=config.mc_moment_a_m2,
                            noise_sigma=config.noise_sigma_t)
    stem, ext = os.path.splitext(config.out)
    rows = []
    for mode_name in sorted(modes):
        mode = config.actuation_mode(mode_name)
        for k in range(args.n_seeds):
            seed = config.seed + k
            result = run_propulsion(env, mode, prop, rng_seed=seed)
            log.info("propel %s seed=%d: %s", mode_name, seed,
                     result.failure_reason)
            rows.append([mode_name, str(seed), str(int(result.success)),
                         _fmt(result.avg_speed), _fmt(result.time_elapsed),
                         result.failure_reason,
                         _fmt(result.final_state.twist)])
            traj_path = f"{stem}_{mode_name}_seed{seed}{ext or '.csv'}"
            traj_rows = [[_fmt(t), _fmt(arc), _fmt(twist),
                          _fmt(math.degrees(theta)), _fmt(fp), _fmt(fl),
                          _fmt(fr)]
                         for t, arc, twist, theta, fp, fl, fr, _speed
                         in result.trajectory]
            _write_csv(traj_path, "magcap.trajectory/1",
                       ["t", "arc_length_m", "twist_rad", "theta_ax_deg",
                        "f_p", "f_l_signed", "f_r"],
                       traj_rows)
    _write_csv(config.out, "magcap.propel/1",
               ["mode", "seed", "success", "avg_speed_m_s", "time_s",
                "failure_reason", "end_twist_rad"],
               rows)


def cmd_approx_check(config, args):
    """Propulsive-force approximation error versus reciprocation angle."""
    geom = config.geometry(OMEGA_DC)
    rows = []
    for theta_ar_deg in (1.0,) + THETA_AR_GRID_DEG:
        mode = ActuationMode.rrma(math.radians(theta_ar_deg))
        err = approximation_error(geom, mode, config.ma_moment_a_m2,
                                  config.mc_moment_a_m2)
        rows.append([_fmt(theta_ar_deg), _fmt(err)])
    _write_csv(config.out, "magcap.approx-check/1",
               ["theta_ar_deg", "approximation_error"],
               rows)


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file (flags override)")
    parser.add_argument("--seed", type=int, help="RNG seed")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--d-m", type=float, dest="d_m",
                        help="actuator-capsule distance (m)")
    parser.add_argument("--alpha-deg", type=float, dest="alpha_deg",
                        help="offset angle alpha (deg)")
    parser.add_argument("--beta-deg", type=float, dest="beta_deg",
                        help="plane tilt beta (deg)")
    parser.add_argument("--theta-ar-deg", type=float, dest="theta_ar_deg",
                        help="reciprocation half-amplitude (deg)")
    parser.add_argument("--spin-rate-deg-s", type=float,
                        dest="spin_rate_deg_s", help="spin rate (deg/s)")
    parser.add_argument("--noise-sigma-t", type=float, dest="noise_sigma_t",
                        help="per-axis sensor noise sigma (T)")
    parser.add_argument("--dt-s", type=float, dest="dt_s",
                        help="simulation step (s)")
    parser.add_argument("--time-budget-s", type=float, dest="time_budget_s",
                        help="simulation time budget (s)")
    parser.add_argument("--mode", choices=MODE_NAMES, help="actuation mode")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="magcap",
        description="Rotating magnetic actuation analysis and simulation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("force-profile",
                       help="force decomposition over one revolution")
    p.add_argument("--samples", type=int, default=720)
    p.set_defaults(func=cmd_force_profile)

    p = sub.add_parser("risk-sweep",
                       help="contact profiles and net twist per mode")
    p.add_argument("--modes", default="crma,rrma",
                   help="comma-separated mode list")
    p.set_defaults(func=cmd_risk_sweep)

    p = sub.add_parser("normal-force-sweep",
                       help="mean/max wall normal force vs reciprocation "
                            "angle")
    p.set_defaults(func=cmd_normal_force_sweep)

    p = sub.add_parser("localize-bench",
                       help="random-pose localization benchmark")
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_localize_bench)

    p = sub.add_parser("propel", help="closed-loop propulsion runs")
    p.add_argument("--env", help="tube environment JSON file")
    p.add_argument("--n-seeds", type=int, default=5)
    p.add_argument("--modes", default="dma,crma,rrma",
                   help="comma-separated mode list")
    p.set_defaults(func=cmd_propel)

    p = sub.add_parser("approx-check",
                       help="sweep-mean force approximation error")
    p.set_defaults(func=cmd_approx_check)

    for sp in sub.choices.values():
        _add_common(sp)
    return parser


_CONFIG_KEYS = ("seed", "out", "d_m", "alpha_deg", "beta_deg",
                "theta_ar_deg", "spin_rate_deg_s", "noise_sigma_t", "dt_s",
                "time_budget_s", "mode")


def main(argv=None):
    logging.basicConfig(level=os.environ.get("MAGCAP_LOG", "WARNING"))
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: getattr(args, k, None) for k in _CONFIG_KEYS}
    try:
        config = load_config(args.config, overrides)
        args.func(config, args)
        extra = {"command": args.command}
        for key in ("samples", "trials", "n_seeds", "modes", "env"):
            if hasattr(args, key):
                extra[key] = getattr(args, key)
        write_effective_config(config.out, config, extra)
    except (MagcapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
