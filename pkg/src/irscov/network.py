"""Scenario assembly and Monte-Carlo coverage analysis.

A site carries three sectors 120 degrees apart; sites sit on a triangular
lattice. Every sector is either a reflecting-panel cell (one feed + passive
panel) or a benchmark active array with the same number of elements. The
serving cell beamforms to the probed grid point; non-serving panels appear
as randomly scattered interference, non-serving arrays transmit toward
their own in-cell targets.

Reproducibility: each (grid point, scheme, height) owns two RNG substreams
(serving, interference) derived from the master seed, so results are
identical for any worker count and single-cell runs share the serving
draws of multi-cell runs.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import config as cfgmod
from .config import ScenarioConfig
from .fading import (
    aerial_rician_k,
    erp_modified_stats,
    ground_rician_k,
    pattern_spectrum_average,
)
from .link import element_weights, mean_signal_bounds, rician_sum_moments
from .pathloss import reference_gain

SCHEME_IDS = {"fixed": 0, "mrt": 1, "irs-cos": 2, "irs-cos3": 3}
HEIGHT_IDS = {"ground": 0, "aerial": 1}
IRS_SCHEMES = ("irs-cos", "irs-cos3")


@dataclass(frozen=True)
class Cell:
    index: int
    site_xy: tuple[float, float]
    azimuth: float  # sector boresight, radians


def hexagonal_layout(rings: int, isd: float) -> list[Cell]:
    """Sites on a triangular lattice (center + `rings` hex rings), 3 cells each."""
    sites = [(0.0, 0.0)]
    a1 = np.array([isd, 0.0])
    a2 = np.array([isd * 0.5, isd * np.sqrt(3.0) / 2.0])
    for i in range(-rings, rings + 1):
        for j in range(-rings, rings + 1):
            if i == j == 0 or abs(i + j) > rings:
                continue
            p = i * a1 + j * a2
            sites.append((float(p[0]), float(p[1])))
    cells = []
    for s_idx, xy in enumerate(sites):
        for k in range(3):
            cells.append(Cell(index=3 * s_idx + k, site_xy=xy,
                              azimuth=2.0 * np.pi * k / 3.0))
    return cells


def cell_footprint_center(cell: Cell, isd: float) -> np.ndarray:
    r = isd / 3.0
    return np.array([cell.site_xy[0] + r * np.cos(cell.azimuth),
                     cell.site_xy[1] + r * np.sin(cell.azimuth)])


def hexagon_contains(local_xy: np.ndarray, circumradius: float) -> np.ndarray:
    """Point-in-hexagon test; vertices on the local x axis (one at the site)."""
    x, y = local_xy[..., 0], local_xy[..., 1]
    h = np.sqrt(3.0) / 2.0 * circumradius
    eps = 1e-9 * circumradius
    return ((np.abs(y) <= h + eps)
            & (np.abs(0.5 * np.sqrt(3.0) * x + 0.5 * y) <= h + eps)
            & (np.abs(0.5 * np.sqrt(3.0) * x - 0.5 * y) <= h + eps))


def coverage_grid(cfg: ScenarioConfig) -> np.ndarray:
    """Lattice of probe positions covering the serving cell's hexagon, (U, 2)."""
    lay = cfg.layout
    cells = hexagonal_layout(lay.site_rings, lay.intersite_distance_m)
    cell = cells[lay.serving_cell]
    center = cell_footprint_center(cell, lay.intersite_distance_m)
    r = lay.intersite_distance_m / 3.0
    ca, sa = np.cos(cell.azimuth), np.sin(cell.azimuth)
    xs = np.linspace(-r, r, cfg.grid.nx)
    ys = np.linspace(-np.sqrt(3.0) / 2.0 * r, np.sqrt(3.0) / 2.0 * r, cfg.grid.ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    local = np.stack([gx.ravel(), gy.ravel()], axis=-1)
    keep = hexagon_contains(local, r)
    local = local[keep]
    world = np.empty_like(local)
    world[:, 0] = center[0] + ca * local[:, 0] - sa * local[:, 1]
    world[:, 1] = center[1] + sa * local[:, 0] + ca * local[:, 1]
    return world


def _sample_in_hexagon(rng: np.random.Generator, cell: Cell, isd: float) -> np.ndarray:
    """Uniform position in a cell's hexagonal footprint (world frame)."""
    r = isd / 3.0
    center = cell_footprint_center(cell, isd)
    ca, sa = np.cos(cell.azimuth), np.sin(cell.azimuth)
    while True:
        p = rng.uniform([-r, -np.sqrt(3.0) / 2.0 * r], [r, np.sqrt(3.0) / 2.0 * r])
        if hexagon_contains(p, r):
            return center + np.array([ca * p[0] - sa * p[1], sa * p[0] + ca * p[1]])


def snr(received_w, noise_w: float):
    """Instantaneous SNR (linear ratio)."""
    if noise_w <= 0.0:
        raise ValueError("noise power must be positive watts")
    return np.asarray(received_w) / noise_w


def sinr_multicell(signal_w, interference_w, noise_w: float):
    """Per-draw SINR; interference powers add incoherently."""
    if noise_w <= 0.0:
        raise ValueError("noise power must be positive watts")
    return np.asarray(signal_w) / (np.asarray(interference_w) + noise_w)


def ergodic_throughput(snr_samples) -> float:
    """Sample-mean spectral efficiency E[log2(1 + snr)], bps/Hz."""
    arr = np.asarray(snr_samples, dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one SNR sample")
    return float(np.log2(1.0 + arr).mean())


@dataclass
class PointResult:
    throughput: float  # bps/Hz
    mean_signal_w: float
    mean_interference_w: float  # 0 in single-cell runs


@dataclass
class SummaryStats:
    r_bar: float  # mean ergodic throughput, bps/Hz
    jain: float
    mean_signal_db: float  # 10 log10 of the cell-average mean signal, watts
    mean_interference_db: float | None  # None without interferers

    def as_dict(self) -> dict:
        return {"r_bar_bps_hz": self.r_bar, "jain_index": self.jain,
                "mean_signal_db": self.mean_signal_db,
                "mean_interference_db": self.mean_interference_db}


def summarize(results: list[PointResult]) -> SummaryStats:
    r = np.array([p.throughput for p in results])
    s = np.array([p.mean_signal_w for p in results])
    i = np.array([p.mean_interference_w for p in results])
    jain = float(r.sum() ** 2 / (r.size * np.sum(r ** 2))) if np.any(r > 0) else 0.0
    mean_i = float(i.mean())
    return SummaryStats(
        r_bar=float(r.mean()), jain=jain,
        mean_signal_db=float(10.0 * np.log10(s.mean())),
        mean_interference_db=(10.0 * np.log10(mean_i) if mean_i > 0.0 else None))


# ----- per-link statistics cache ------------------------------------------------


@dataclass
class _CellLink:
    """UE-side quantities for one (probe point, cell) pair, both LoS states."""

    p_los: float
    gain: tuple[float, float]  # linear pathloss gain, (nlos, los)
    stats: tuple  # FadingStats per state, (nlos, los)
    steering: np.ndarray | None = None  # (N,) unit-mod phases for array schemes

    def ups(self, los: int) -> float:
        return self.stats[los].upsilon_prime

    def sig(self, los: int) -> float:
        return self.stats[los].sigma_prime

    def rho(self, los: int) -> float:
        return self.stats[los].rho


class CoverageEngine:
    """Precomputed scenario state; `point_result` is pure given the seed."""

    def __init__(self, cfg: ScenarioConfig, height: str, multicell: bool):
        if height not in HEIGHT_IDS:
            raise ValueError(f"height must be one of {tuple(HEIGHT_IDS)}")
        self.cfg = cfg
        self.height = height
        self.h_ue = (cfg.grid.ground_height_m if height == "ground"
                     else cfg.grid.aerial_height_m)
        self.multicell = multicell
        lay = cfg.layout
        self.cells = hexagonal_layout(lay.site_rings, lay.intersite_distance_m)
        self.serving = self.cells[lay.serving_cell]
        self.model = cfg.pathloss_model()
        self.spectrum = cfg.spectrum()
        self.grid = coverage_grid(cfg)
        self.noise_w = cfg.noise_power_w
        self.k_min, self.k_max = cfg.rician_k_bounds()
        self.h_panel = cfg.geometry.panel_height_m
        self.wavenumber = 2.0 * np.pi / cfg.wavelength_m

        feed = cfg.feed_pattern()
        beta0 = reference_gain(cfg.channel.carrier_hz)
        self.n_elements = cfg.n_elements
        self.patterns: dict[str, object] = {}
        self.weights: dict[str, object] = {}
        self.budget_prefactor: dict[str, float] = {}
        self.spec_avg: dict[str, float] = {}
        ref_panel = cfg.panel()
        for scheme in IRS_SCHEMES:
            pat = cfg.irs_pattern(scheme)
            self.patterns[scheme] = pat
            self.weights[scheme] = element_weights(
                ref_panel.tx_position(cfg.geometry.feed_standoff_m), feed,
                ref_panel, pat, beta0, pattern_power=cfg.geometry.pattern_power)
            self.budget_prefactor[scheme] = (cfg.tx_power_w * feed.gain * pat.gain
                                             * cfg.radio.reflection_amplitude ** 2)
            self.spec_avg[scheme] = pattern_spectrum_average(pat, self.spectrum)
        bench = cfg.benchmark_pattern()
        self.patterns["bench"] = bench
        self.spec_avg["bench"] = pattern_spectrum_average(bench, self.spectrum)

        # per-cell frame vectors and element offsets (benchmark steering)
        self.cell_normal = []
        self.cell_horiz = []
        self.cell_offsets = []
        for cell in self.cells:
            panel = cfg.panel(center_xy=cell.site_xy, boresight_azimuth=cell.azimuth)
            self.cell_normal.append(panel.normal)
            self.cell_horiz.append(panel.in_plane_horizontal)
            self.cell_offsets.append(panel.element_positions() - panel.center[None, :])
        tilt = np.deg2rad(cfg.radio.benchmark_downtilt_deg)
        self.tilt_dirs = [np.array([np.cos(c.azimuth) * np.cos(tilt),
                                    np.sin(c.azimuth) * np.cos(tilt),
                                    -np.sin(tilt)]) for c in self.cells]

    # -- geometry/statistics for one probe point --------------------------------

    def _rician_k(self, los: bool, d3d: float) -> float:
        if not los:
            return 0.0
        if self.h_ue > self.h_panel:
            elev = np.arcsin(abs(self.h_ue - self.h_panel) / d3d)
            return aerial_rician_k(elev, self.k_min, self.k_max)
        k = ground_rician_k(d3d)
        icpt = self.cfg.channel.ground_k_intercept_db
        slope = self.cfg.channel.ground_k_slope_db_per_m
        if (icpt, slope) != (13.0, 0.03):
            k = 10.0 ** ((icpt - slope * d3d) / 10.0)
        return k

    def _link_stats(self, point: np.ndarray, cell: Cell, scheme_key: str,
                    with_steering: bool) -> _CellLink:
        ue = np.array([point[0], point[1], self.h_ue])
        center = np.array([cell.site_xy[0], cell.site_xy[1], self.h_panel])
        v = ue - center
        d3d = float(np.linalg.norm(v))
        d2d = float(np.hypot(v[0], v[1]))
        normal = self.cell_normal[cell.index]
        horiz = self.cell_horiz[cell.index]
        pat = self.patterns[scheme_key]
        if scheme_key == "bench":
            # vertical-polar pattern frame of the sector
            theta = np.arccos(np.clip(v[2] / d3d, -1.0, 1.0))
            phi = np.arctan2(v @ np.cross([0.0, 0.0, 1.0], normal), v @ normal)
            glos = pat.gain * float(pat.f(theta, phi))
        else:
            cos_t = np.clip(v @ normal / d3d, -1.0, 1.0)
            theta_r = np.arccos(cos_t)
            phi_r = np.arctan2(v[2], v @ horiz)
            glos = pat.gain * float(pat.f(theta_r, phi_r))

        p_los = self.model.los_probability(d2d, self.h_ue)
        stats, gain = [], []
        for los in (False, True):
            g = 10.0 ** (-self.model.pathloss_db(d2d, self.h_ue, los) / 10.0)
            k = self._rician_k(los, d3d)
            enlos = pat.gain * self.spec_avg[scheme_key] / (k + 1.0)
            stats.append(erp_modified_stats(k, glos, enlos))
            gain.append(g)
        steering = None
        if with_steering:
            offs = self.cell_offsets[cell.index]
            steering = np.exp(-1j * self.wavenumber * (offs @ (v / d3d)))
        return _CellLink(p_los=p_los, gain=tuple(gain), stats=tuple(stats),
                         steering=steering)

    def _streams(self, point_idx: int, scheme: str) -> tuple[np.random.Generator,
                                                             np.random.Generator]:
        ss = np.random.SeedSequence(
            entropy=self.cfg.seed,
            spawn_key=(point_idx, SCHEME_IDS[scheme], HEIGHT_IDS[self.height]))
        serving, interference = ss.spawn(2)
        return (np.random.default_rng(serving), np.random.default_rng(interference))

    # -- Monte-Carlo kernels -----------------------------------------------------

    def point_result(self, scheme: str, point_idx: int) -> PointResult:
        if scheme in IRS_SCHEMES:
            return self._point_irs(scheme, point_idx)
        return self._point_bench(scheme, point_idx)

    def _point_irs(self, scheme: str, point_idx: int) -> PointResult:
        cfg = self.cfg
        point = self.grid[point_idx]
        rng_s, rng_i = self._streams(point_idx, scheme)
        w = self.weights[scheme].values
        sum_w2 = float(np.sum(w ** 2))
        pref = self.budget_prefactor[scheme]
        n = self.n_elements
        n_inst = cfg.budgets.channel_instances
        n_fad = cfg.budgets.fading_per_instance

        serv = self._link_stats(point, self.serving, scheme, with_steering=False)
        others = [c for c in self.cells if c.index != self.serving.index] \
            if self.multicell else []
        olinks = [self._link_stats(point, c, scheme, with_steering=False)
                  for c in others]

        acc_rate = 0.0
        acc_sig = 0.0
        acc_itf = 0.0
        for _ in range(n_inst):
            los = int(rng_s.random() < serv.p_los)
            b0 = pref * serv.gain[los]
            g = rng_s.standard_normal((2, n_fad, n))
            amp = np.abs(serv.ups(los) + serv.sig(los) * (g[0] + 1j * g[1]))
            s = b0 * (amp @ w) ** 2  # (n_fad,)

            itf = np.zeros(n_fad)
            if olinks:
                states = (rng_i.random(len(olinks)) < np.array(
                    [o.p_los for o in olinks])).astype(int)
                ups = np.array([o.ups(st) for o, st in zip(olinks, states)])
                sig = np.array([o.sig(st) for o, st in zip(olinks, states)])
                b0v = pref * np.array([o.gain[st] for o, st in zip(olinks, states)])
                c = len(olinks)
                # exact-in-law split of sum_n w_n xi'_n e^(j eps_n): a uniform
                # phasor sum for the deterministic part plus one complex normal
                # with variance sigma'^2 sum(w^2) for the diffuse part
                los_sum = np.zeros((c, n_fad), dtype=complex)
                live = ups > 0.0
                if np.any(live):
                    eps = rng_i.uniform(0.0, 2.0 * np.pi,
                                        size=(int(live.sum()), n_fad, n))
                    los_sum[live] = np.exp(1j * eps) @ w
                gz = rng_i.standard_normal((2, c, n_fad))
                diffuse = np.sqrt(sum_w2) * (gz[0] + 1j * gz[1])
                tot = ups[:, None] * los_sum + sig[:, None] * diffuse
                itf = (b0v[:, None] * np.abs(tot) ** 2).sum(axis=0)

            sinr = s / (itf + self.noise_w)
            acc_rate += np.log2(1.0 + sinr).sum()
            acc_sig += s.sum()
            acc_itf += itf.sum()

        m = n_inst * n_fad
        return PointResult(acc_rate / m, acc_sig / m, acc_itf / m)

    def _bench_channel(self, rng, link: _CellLink, los: int, n_fad: int) -> np.ndarray:
        """Per-element channels (n_fad, N) for an active-array cell."""
        n = self.n_elements
        g = rng.standard_normal((2, n_fad, n))
        return np.sqrt(link.gain[los]) * (
            link.ups(los) * link.steering[None, :]
            + link.sig(los) * (g[0] + 1j * g[1]))

    def _point_bench(self, scheme: str, point_idx: int) -> PointResult:
        cfg = self.cfg
        point = self.grid[point_idx]
        rng_s, rng_i = self._streams(point_idx, scheme)
        p_t = cfg.tx_power_w
        n = self.n_elements
        n_inst = cfg.budgets.channel_instances
        n_fad = cfg.budgets.fading_per_instance

        serv = self._link_stats(point, self.serving, "bench", with_steering=True)
        others = [c for c in self.cells if c.index != self.serving.index] \
            if self.multicell else []
        olinks = [self._link_stats(point, c, "bench", with_steering=True)
                  for c in others]

        fixed_taper = {}
        if scheme == "fixed":
            for cell in [self.serving] + others:
                offs = self.cell_offsets[cell.index]
                ph = np.exp(-1j * self.wavenumber * (offs @ self.tilt_dirs[cell.index]))
                fixed_taper[cell.index] = np.conj(ph) / np.sqrt(n)

        acc_rate = acc_sig = acc_itf = 0.0
        for _ in range(n_inst):
            los = int(rng_s.random() < serv.p_los)
            if scheme == "mrt":
                # conjugate beamforming: received power P_t ||h||^2
                h = self._bench_channel(rng_s, serv, los, n_fad)
                s = p_t * np.sum(np.abs(h) ** 2, axis=1)
            else:
                h = self._bench_channel(rng_s, serv, los, n_fad)
                s = p_t * np.abs(h @ fixed_taper[self.serving.index]) ** 2

            itf = np.zeros(n_fad)
            if olinks:
                states = (rng_i.random(len(olinks)) < np.array(
                    [o.p_los for o in olinks])).astype(int)
                conjugate = (scheme == "mrt"
                             and cfg.radio.mrt_interference == "conjugate")
                for o_cell, o_link, st in zip(others, olinks, states):
                    h_v = self._bench_channel(rng_i, o_link, st, n_fad)
                    if conjugate:
                        # full array gain onto the victim channel
                        itf += p_t * np.sum(np.abs(h_v) ** 2, axis=1)
                        continue
                    if scheme == "mrt":
                        target = _sample_in_hexagon(
                            rng_i, o_cell, cfg.layout.intersite_distance_m)
                        own = self._link_stats(target, o_cell, "bench",
                                               with_steering=True)
                        own_los = int(rng_i.random() < own.p_los)
                        h_own = self._bench_channel(rng_i, own, own_los, 1)[0]
                        beam = np.conj(h_own) / np.linalg.norm(h_own)
                    else:
                        beam = fixed_taper[o_cell.index]
                    itf += p_t * np.abs(h_v @ beam) ** 2

            sinr = s / (itf + self.noise_w)
            acc_rate += np.log2(1.0 + sinr).sum()
            acc_sig += s.sum()
            acc_itf += itf.sum()

        m = n_inst * n_fad
        return PointResult(acc_rate / m, acc_sig / m, acc_itf / m)

    # -- analytic bounds ---------------------------------------------------------

    def point_bounds(self, scheme: str, point_idx: int) -> tuple[float, float, float, float]:
        """(s_lb, s_ub, i_lb, i_ub) in watts, expectation over LoS states."""
        if scheme not in IRS_SCHEMES:
            raise ValueError("closed-form bounds apply to reflecting-panel schemes")
        point = self.grid[point_idx]
        w = self.weights[scheme]
        pref = self.budget_prefactor[scheme]
        n = self.n_elements
        serv = self._link_stats(point, self.serving, scheme, with_steering=False)
        s_lb = s_ub = 0.0
        for los, p in ((0, 1.0 - serv.p_los), (1, serv.p_los)):
            if p == 0.0:
                continue
            moments = rician_sum_moments(serv.stats[los])
            lb, ub = mean_signal_bounds(pref * serv.gain[los], w.w_min, w.w_max,
                                        n, moments)
            s_lb += p * lb
            s_ub += p * ub
        i_lb = i_ub = 0.0
        if self.multicell:
            for cell in self.cells:
                if cell.index == self.serving.index:
                    continue
                link = self._link_stats(point, cell, scheme, with_steering=False)
                for los, p in ((0, 1.0 - link.p_los), (1, link.p_los)):
                    if p == 0.0:
                        continue
                    b0 = pref * link.gain[los]
                    i_lb += p * b0 * link.rho(los) * n * w.w_min ** 2
                    i_ub += p * b0 * link.rho(los) * n * w.w_max ** 2
        return s_lb, s_ub, i_lb, i_ub


# ----- drivers ------------------------------------------------------------------


_WORKER_ENGINE: CoverageEngine | None = None
_WORKER_SCHEMES: tuple[str, ...] = ()


def _init_worker(cfg_json: str, height: str, multicell: bool, schemes):
    global _WORKER_ENGINE, _WORKER_SCHEMES
    _WORKER_ENGINE = CoverageEngine(cfgmod.parse_config(json.loads(cfg_json)),
                                    height, multicell)
    _WORKER_SCHEMES = tuple(schemes)


def _worker_point(args):
    idx = args
    return [_WORKER_ENGINE.point_result(s, idx) for s in _WORKER_SCHEMES]


def run_coverage(cfg: ScenarioConfig, height: str, schemes: tuple[str, ...],
                 multicell: bool, workers: int = 1):
    """Coverage maps and summaries for each scheme.

    Returns (grid (U,2), {scheme: [PointResult]}, {scheme: SummaryStats}).
    """
    for s in schemes:
        if s not in SCHEME_IDS:
            raise ValueError(f"unknown scheme {s!r}")
    engine = CoverageEngine(cfg, height, multicell)
    n_pts = engine.grid.shape[0]
    if workers <= 1:
        rows = [[engine.point_result(s, i) for s in schemes] for i in range(n_pts)]
    else:
        with ProcessPoolExecutor(
                max_workers=workers, initializer=_init_worker,
                initargs=(cfgmod.serialize(cfg), height, multicell, schemes)) as pool:
            rows = list(pool.map(_worker_point, range(n_pts),
                                 chunksize=max(1, n_pts // (8 * workers))))
    results = {s: [row[k] for row in rows] for k, s in enumerate(schemes)}
    summaries = {s: summarize(results[s]) for s in schemes}
    return engine.grid, results, summaries


def bounds_report(cfg: ScenarioConfig, scheme: str = "irs-cos",
                  workers: int = 1) -> dict:
    """Cell-average analytic bounds vs Monte-Carlo means, both heights.

    dB values are 10*log10 of linear watts.
    """
    out = {}
    for height in ("ground", "aerial"):
        engine = CoverageEngine(cfg, height, multicell=True)
        n_pts = engine.grid.shape[0]
        acc = np.zeros(4)
        for i in range(n_pts):
            acc += np.array(engine.point_bounds(scheme, i))
        s_lb, s_ub, i_lb, i_ub = acc / n_pts
        _, _, summaries = run_coverage(cfg, height, (scheme,), multicell=True,
                                       workers=workers)
        s_mc = 10.0 ** (summaries[scheme].mean_signal_db / 10.0)
        i_mc = 10.0 ** (summaries[scheme].mean_interference_db / 10.0)
        out[height] = {
            "signal": {"lb_db": 10 * np.log10(s_lb), "ub_db": 10 * np.log10(s_ub),
                       "mc_db": 10 * np.log10(s_mc),
                       "inside": bool(s_lb <= s_mc <= s_ub)},
            "interference": {"lb_db": 10 * np.log10(i_lb),
                             "ub_db": 10 * np.log10(i_ub),
                             "mc_db": 10 * np.log10(i_mc),
                             "inside": bool(i_lb <= i_mc <= i_ub)},
        }
    return out
