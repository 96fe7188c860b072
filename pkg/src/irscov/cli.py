"""Command-line interface.

Subcommands: validate, link-cdf, coverage, bounds. Exit codes: 0 success,
2 configuration/usage error, 1 runtime failure. Delimited outputs land in
--out together with rendered figures (suppress with --no-figures).
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np
from scipy.stats import rice

from . import report
from .config import ConfigError, ScenarioConfig, config_hash, parse_config
from .fading import e_nlos, erp_modified_stats, ground_rician_k, multipath_channel_samples
from .network import bounds_report, run_coverage


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="scenario JSON (defaults apply when omitted)")
    p.add_argument("--seed", type=int, default=None, help="master seed override")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--no-figures", action="store_true",
                   help="emit delimited files only")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="irscov",
                                 description="Reflecting-panel base-station "
                                             "coverage simulator")
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("--config", type=Path, default=None)

    lc = sub.add_parser("link-cdf", help="analytic vs multipath-oracle "
                                         "channel power CDFs")
    _add_common(lc)
    lc.add_argument("--samples", type=int, default=None,
                    help="fading realizations per oracle series")

    cov = sub.add_parser("coverage", help="ergodic-throughput coverage maps")
    _add_common(cov)
    cov.add_argument("--cells", choices=("single", "multi"), default="single")
    cov.add_argument("--height", choices=("ground", "aerial"), default="ground")
    cov.add_argument("--schemes", type=str, default=None,
                     help="comma-separated subset of the configured schemes")

    b = sub.add_parser("bounds", help="mean-power bounds vs Monte-Carlo averages")
    _add_common(b)
    return ap


def _load_config(args) -> ScenarioConfig:
    text = args.config.read_text() if getattr(args, "config", None) else ""
    cfg = parse_config(text)
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise ConfigError([("--seed", "must be a nonnegative integer")])
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def _cmd_validate(args) -> int:
    cfg = _load_config(args)
    print(f"configuration valid (hash {config_hash(cfg)})")
    return 0


def _cmd_link_cdf(args) -> int:
    cfg = _load_config(args)
    study = cfg.link_study
    n_angles = cfg.budgets.angle_instances
    n_phases = cfg.budgets.phase_per_instance
    if args.samples is not None:
        if args.samples < 1:
            raise ConfigError([("--samples", "must be a positive draw count")])
        n_phases = max(1, -(-args.samples // n_angles))

    pattern = cfg.irs_pattern("irs-cos")
    h_ue = cfg.grid.ground_height_m
    dz = cfg.geometry.panel_height_m - h_ue
    az = np.deg2rad(study.ue_azimuth_deg)
    d3d = float(np.hypot(study.ue_distance_m, dz))
    # user direction in the panel frame: off-boresight angle via the x component
    x = study.ue_distance_m * np.cos(az)
    theta_u = float(np.arccos(np.clip(x / d3d, -1.0, 1.0)))
    glos = pattern.gain * float(pattern.f(theta_u))
    k = ground_rician_k(d3d)
    los_phase = float(2.0 * np.pi * d3d / cfg.wavelength_m % (2.0 * np.pi))

    series: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    idx = 0
    for theta_g in study.theta_g_values_rad:
        spec = cfg.spectrum(theta_g=theta_g, theta_m=study.theta_m_rad,
                            clip_to_box=False)
        stats = erp_modified_stats(k, glos, e_nlos(spec, pattern, k))
        tag = f"tg{np.rad2deg(theta_g):.0f}"
        for n_p in study.path_counts:
            rng = np.random.default_rng(
                np.random.SeedSequence(cfg.seed, spawn_key=(10_000, idx)))
            idx += 1
            h = multipath_channel_samples(rng, k, pattern, spec, glos, los_phase,
                                          n_p, n_angles, n_phases)
            power = np.sort(np.abs(h) ** 2)
            cdf = np.arange(1, power.size + 1) / power.size
            series[f"oracle_np{n_p}_{tag}"] = (power, cdf)
        nu, sig = stats.upsilon_prime, stats.sigma_prime
        xs = np.linspace(0.0, float(rice.ppf(0.999, nu / sig, scale=sig) ** 2), 512)
        series[f"analytic_{tag}"] = (xs, rice.cdf(np.sqrt(xs), nu / sig, scale=sig))

    args.out.mkdir(parents=True, exist_ok=True)
    written = report.write_link_cdf(args.out, series, render=not args.no_figures)
    meta = report.run_metadata(cfg, "link-cdf", {
        "workers": args.workers, "outputs": [p.name for p in written],
        "series_draws": n_angles * n_phases})
    report.write_json(args.out / "run_link_cdf.json", meta)
    print(f"wrote {len(written) + 1} files to {args.out}")
    return 0


def _cmd_coverage(args) -> int:
    cfg = _load_config(args)
    schemes = tuple(cfg.schemes)
    if args.schemes:
        requested = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
        unknown = [s for s in requested if s not in schemes]
        if unknown:
            raise ConfigError([("--schemes",
                                f"not in configured schemes: {', '.join(unknown)}")])
        schemes = requested
    multicell = args.cells == "multi"
    grid, results, summaries = run_coverage(cfg, args.height, schemes, multicell,
                                            workers=max(1, args.workers))
    args.out.mkdir(parents=True, exist_ok=True)
    tag = f"{args.height}_{args.cells}"
    written = report.write_coverage(args.out, tag, grid, results, summaries, cfg,
                                    render=not args.no_figures)
    for s in schemes:
        v = summaries[s]
        itf = ("-inf" if v.mean_interference_db is None
               else f"{v.mean_interference_db:7.1f}")
        print(f"{report.TABLE_SCHEME_LABELS[s]:14s} R={v.r_bar:7.3f} bps/Hz  "
              f"J={v.jain:.4f}  S={v.mean_signal_db:7.1f} dB  I={itf} dB")
    print(f"wrote {len(written)} files to {args.out}")
    return 0


def _cmd_bounds(args) -> int:
    cfg = _load_config(args)
    rep = bounds_report(cfg, scheme="irs-cos", workers=max(1, args.workers))
    args.out.mkdir(parents=True, exist_ok=True)
    written = report.write_bounds(args.out, rep, cfg, render=not args.no_figures)
    for height, quantities in rep.items():
        for quantity, vals in quantities.items():
            flag = "inside" if vals["inside"] else "OUTSIDE"
            print(f"{height:6s} {quantity:12s} [{vals['lb_db']:7.1f}, "
                  f"{vals['ub_db']:7.1f}] dB  MC {vals['mc_db']:7.1f} dB  {flag}")
    print(f"wrote {len(written)} files to {args.out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"validate": _cmd_validate, "link-cdf": _cmd_link_cdf,
                "coverage": _cmd_coverage, "bounds": _cmd_bounds}
    try:
        return handlers[args.cmd](args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
