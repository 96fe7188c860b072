"""Large-scale pathloss with LoS/NLoS states (urban-macro tables).

Coefficients follow the 3GPP urban-macro models for terrestrial users and
their aerial extension (heights up to 300 m). They are plain data on the
model object so a scenario file can override any of them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0


def reference_gain(carrier_hz: float) -> float:
    """Free-space channel power gain at 1 m, (4*pi*f/c)^-2."""
    return (4.0 * np.pi * carrier_hz / SPEED_OF_LIGHT) ** -2


@dataclass(frozen=True)
class PathlossModel:
    """Urban-macro LoS/NLoS pathloss and LoS-probability tables."""

    carrier_hz: float
    bs_height: float = 25.0
    # terrestrial users up to this height use the ground tables
    aerial_boundary_m: float = 22.5
    ue_height_range: tuple[float, float] = (1.5, 300.0)
    # ground LoS probability: d0/d + exp(-d/decay)(1 - d0/d), plus the
    # elevated-user correction ((h-13)/10)^1.5 * 1.25 (d/100)^3 exp(-d/150)
    ground_los_d0: float = 18.0
    ground_los_decay: float = 63.0
    # ground LoS pathloss 28 + 22 log10 d3d + 20 log10 f, steeper past the
    # breakpoint 4 (h_bs - 1)(h_ut - 1) f / c
    ground_los_coeffs: tuple[float, float, float] = (28.0, 22.0, 20.0)
    ground_los_bp_coeffs: tuple[float, float, float, float] = (28.0, 40.0, 20.0, -9.0)
    # ground NLoS 13.54 + 39.08 log10 d3d + 20 log10 f - 0.6 (h_ut - 1.5)
    ground_nlos_coeffs: tuple[float, float, float, float] = (13.54, 39.08, 20.0, 0.6)
    # aerial LoS probability: full LoS above 100 m; below, d1/d + exp(-d/p1)(1 - d1/d)
    aerial_full_los_height: float = 100.0
    aerial_p1_coeffs: tuple[float, float] = (4300.0, -3800.0)
    aerial_d1_coeffs: tuple[float, float, float] = (460.0, -700.0, 18.0)
    # aerial LoS 28 + 22 log10 d3d + 20 log10 f
    aerial_los_coeffs: tuple[float, float, float] = (28.0, 22.0, 20.0)
    # aerial NLoS -17.5 + (46 - 7 log10 h) log10 d3d + 20 log10(40 pi f / 3)
    aerial_nlos_coeffs: tuple[float, float, float, float] = (-17.5, 46.0, 7.0, 20.0)

    def _check_height(self, h_ut: float) -> None:
        lo, hi = self.ue_height_range
        if not lo <= h_ut <= hi:
            raise ValueError(f"UE height {h_ut} m outside model validity {lo}-{hi} m")

    def los_probability(self, d2d: float, h_ut: float) -> float:
        self._check_height(h_ut)
        if h_ut > self.aerial_boundary_m:
            if h_ut > self.aerial_full_los_height:
                return 1.0
            p1 = self.aerial_p1_coeffs[0] * np.log10(h_ut) + self.aerial_p1_coeffs[1]
            d1 = max(self.aerial_d1_coeffs[0] * np.log10(h_ut)
                     + self.aerial_d1_coeffs[1], self.aerial_d1_coeffs[2])
            if d2d <= d1:
                return 1.0
            return d1 / d2d + np.exp(-d2d / p1) * (1.0 - d1 / d2d)
        if d2d <= self.ground_los_d0:
            return 1.0
        base = (self.ground_los_d0 / d2d
                + np.exp(-d2d / self.ground_los_decay) * (1.0 - self.ground_los_d0 / d2d))
        if h_ut > 13.0:
            c = ((h_ut - 13.0) / 10.0) ** 1.5
            base *= 1.0 + c * 1.25 * (d2d / 100.0) ** 3 * np.exp(-d2d / 150.0)
        return float(min(base, 1.0))

    def pathloss_db(self, d2d: float, h_ut: float, los: bool) -> float:
        """Pathloss in dB for the given 2D distance and UE height."""
        self._check_height(h_ut)
        f_ghz = self.carrier_hz / 1e9
        dz = self.bs_height - h_ut
        d3d = max(np.hypot(d2d, dz), 1.0)
        if h_ut > self.aerial_boundary_m:
            a, b, c = self.aerial_los_coeffs
            pl_los = a + b * np.log10(d3d) + c * np.log10(f_ghz)
            if los:
                return float(pl_los)
            a, b, c, d = self.aerial_nlos_coeffs
            pl = a + (b - c * np.log10(h_ut)) * np.log10(d3d) \
                + d * np.log10(40.0 * np.pi * f_ghz / 3.0)
            return float(max(pl, pl_los))
        # ground: dual-slope LoS around the breakpoint distance
        h_bs_eff = self.bs_height - 1.0
        h_ut_eff = h_ut - 1.0
        d_bp = 4.0 * h_bs_eff * h_ut_eff * self.carrier_hz / SPEED_OF_LIGHT
        a1, b1, c1 = self.ground_los_coeffs
        pl1 = a1 + b1 * np.log10(d3d) + c1 * np.log10(f_ghz)
        if d2d <= d_bp:
            pl_los = pl1
        else:
            a2, b2, c2, e2 = self.ground_los_bp_coeffs
            pl_los = (a2 + b2 * np.log10(d3d) + c2 * np.log10(f_ghz)
                      + e2 * np.log10(d_bp ** 2 + dz ** 2))
        if los:
            return float(pl_los)
        a, b, c, d = self.ground_nlos_coeffs
        pl_nlos = a + b * np.log10(d3d) + c * np.log10(f_ghz) - d * (h_ut - 1.5)
        return float(max(pl_nlos, pl_los))


@dataclass(frozen=True)
class LinkState:
    """One LoS/NLoS draw for a BS-UE link."""

    los: bool
    pathloss_db: float

    @property
    def gain(self) -> float:
        """Linear channel power gain, reciprocal of the pathloss."""
        return 10.0 ** (-self.pathloss_db / 10.0)


def sample_link_state(rng: np.random.Generator, ue_xy_distance: float,
                      h_ut: float, model: PathlossModel) -> LinkState:
    """Draw the LoS/NLoS condition and evaluate the matching pathloss."""
    p = model.los_probability(ue_xy_distance, h_ut)
    los = bool(rng.random() < p)
    return LinkState(los, model.pathloss_db(ue_xy_distance, h_ut, los))
