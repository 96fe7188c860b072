"""Serialization of results: delimited files, JSON summaries, figures.

Every emitted column carries its unit in the header; dB values are
10*log10 of linear watts (powers) or of dimensionless ratios. Figures are
rendered next to each delimited file with the same stem.
"""
from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .config import ScenarioConfig, config_hash, to_dict

TABLE_SCHEME_LABELS = {"fixed": "Fixed Pattern", "mrt": "3D BF",
                       "irs-cos": "IRScos", "irs-cos3": "IRScos3"}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def run_metadata(cfg: ScenarioConfig, command: str, extra: dict | None = None) -> dict:
    meta = {
        "command": command,
        "seed": cfg.seed,
        "config_hash": config_hash(cfg),
        "config": to_dict(cfg),
    }
    if extra:
        meta.update(extra)
    return meta


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_safe)
                    + "\n")


def _json_safe(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj)}")


# ----- link-level CDF ------------------------------------------------------------


def write_link_cdf(out_dir: Path, series: dict[str, tuple[np.ndarray, np.ndarray]],
                   render: bool = True) -> list[Path]:
    """Column pair (power gain, CDF) per series, padded to equal length.

    Power gains are the normalized element-user channel power |xi'|^2
    (dimensionless, linear).
    """
    names = list(series)
    depth = max(len(series[n][0]) for n in names)
    header = []
    for n in names:
        header += [f"{n}_power_gain_linear", f"{n}_cdf"]
    rows = []
    for i in range(depth):
        row = []
        for n in names:
            x, c = series[n]
            row += [float(x[i]), float(c[i])] if i < len(x) else [None, None]
        rows.append(row)
    csv_path = out_dir / "link_cdf.csv"
    write_csv(csv_path, header, rows)
    written = [csv_path]
    if render:
        fig, ax = plt.subplots(figsize=(7, 5))
        for n in names:
            x, c = series[n]
            style = "-" if n.startswith("analytic") else "--"
            ax.plot(x, c, style, lw=1.4, label=n)
        ax.set_xlabel("normalized channel power gain (linear)")
        ax.set_ylabel("CDF")
        ax.set_ylim(0, 1)
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        png = out_dir / "link_cdf.png"
        fig.savefig(png, dpi=130)
        plt.close(fig)
        written.append(png)
    return written


# ----- coverage maps -------------------------------------------------------------


def _db(x: float) -> float | None:
    return 10.0 * np.log10(x) if x > 0.0 else None


def write_coverage(out_dir: Path, tag: str, grid: np.ndarray, results: dict,
                   summaries: dict, cfg: ScenarioConfig,
                   render: bool = True) -> list[Path]:
    """Per-scheme grid CSVs, a summary JSON, and a heatmap figure."""
    written = []
    for scheme, points in results.items():
        rows = [(grid[i, 0], grid[i, 1], p.throughput,
                 _db(p.mean_signal_w), _db(p.mean_interference_w))
                for i, p in enumerate(points)]
        path = out_dir / f"coverage_{scheme}_{tag}.csv"
        write_csv(path, ["x_m", "y_m", "throughput_bps_hz",
                         "mean_signal_db", "mean_interference_db"], rows)
        written.append(path)

    summary = {
        "labels": {s: TABLE_SCHEME_LABELS[s] for s in summaries},
        "per_scheme": {s: v.as_dict() for s, v in summaries.items()},
    }
    spath = out_dir / f"summary_{tag}.json"
    write_json(spath, {**summary, "meta": run_metadata(cfg, f"coverage:{tag}")})
    written.append(spath)

    if render:
        schemes = list(results)
        fig, axes = plt.subplots(1, len(schemes), figsize=(4.2 * len(schemes), 4),
                                 squeeze=False)
        vals = np.concatenate([[p.throughput for p in results[s]] for s in schemes])
        vmin, vmax = float(vals.min()), float(vals.max())
        for ax, scheme in zip(axes[0], schemes):
            r = np.array([p.throughput for p in results[scheme]])
            im = ax.scatter(grid[:, 0], grid[:, 1], c=r, s=14, marker="s",
                            vmin=vmin, vmax=vmax, cmap="viridis")
            ax.set_title(f"{TABLE_SCHEME_LABELS[scheme]}\n"
                         f"mean {summaries[scheme].r_bar:.2f} bps/Hz", fontsize=9)
            ax.set_xlabel("x (m)")
            ax.set_aspect("equal")
        axes[0][0].set_ylabel("y (m)")
        fig.colorbar(im, ax=axes[0], label="ergodic throughput (bps/Hz)",
                     fraction=0.03)
        png = out_dir / f"coverage_{tag}.png"
        fig.savefig(png, dpi=130)
        plt.close(fig)
        written.append(png)
    return written


# ----- bounds report -------------------------------------------------------------


def write_bounds(out_dir: Path, report: dict, cfg: ScenarioConfig,
                 render: bool = True) -> list[Path]:
    rows = []
    for height, quantities in report.items():
        for quantity, vals in quantities.items():
            rows.append((height, quantity, vals["lb_db"], vals["ub_db"],
                         vals["mc_db"], "inside" if vals["inside"] else "outside"))
    csv_path = out_dir / "bounds.csv"
    write_csv(csv_path, ["regime", "quantity", "analytic_lb_db", "analytic_ub_db",
                         "mc_cell_average_db", "mc_within_bounds"], rows)
    jpath = out_dir / "bounds.json"
    write_json(jpath, {"bounds": report, "meta": run_metadata(cfg, "bounds")})
    written = [csv_path, jpath]
    if render:
        fig, ax = plt.subplots(figsize=(7, 4.2))
        labels, lbs, ubs, mcs = [], [], [], []
        for height, quantities in report.items():
            for quantity, vals in quantities.items():
                labels.append(f"{height}\n{quantity}")
                lbs.append(vals["lb_db"])
                ubs.append(vals["ub_db"])
                mcs.append(vals["mc_db"])
        xs = np.arange(len(labels))
        for x, lo, hi in zip(xs, lbs, ubs):
            ax.plot([x, x], [lo, hi], color="tab:blue", lw=6, alpha=0.4)
        ax.plot(xs, mcs, "k_", ms=18, label="MC cell average")
        ax.set_xticks(xs, labels, fontsize=8)
        ax.set_ylabel("mean power (dB re 1 W)")
        ax.grid(alpha=0.3, axis="y")
        ax.legend()
        fig.tight_layout()
        png = out_dir / "bounds.png"
        fig.savefig(png, dpi=130)
        plt.close(fig)
        written.append(png)
    return written
