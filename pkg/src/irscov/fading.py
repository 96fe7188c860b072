"""Small-scale fading: Rician K models, scatterer spectrum, and the impact
of a directional element pattern on the fading statistics.

The pre-pattern fading term has unit mean power. Weighting the line-of-sight
ray and the scattered power spectrum by the element pattern rescales both the
Rician K factor and the mean fading power; `erp_modified_stats` returns the
resulting Rice(v', s') parameters. Two samplers are provided: the analytic
Rician draw and a brute-force multipath synthesis used as its oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import i0

from .quadrature import integrate_2d


def ground_rician_k(distance_m: float) -> float:
    """Distance-dependent K for terrestrial users: 13 - 0.03 d (dB), linear out."""
    if distance_m <= 0:
        raise ValueError("distance must be positive")
    return 10.0 ** ((13.0 - 0.03 * distance_m) / 10.0)


def aerial_rician_k(elevation_rad: float, k_min: float, k_max: float) -> float:
    """Elevation-dependent K for users above the array height.

    K = A1 * exp(A2 * elevation) with A1 = k_min and A2 chosen so the zenith
    value equals k_max; clamped into [k_min, k_max]. Gains are linear.
    """
    if not 0.0 < k_min <= k_max:
        raise ValueError("need 0 < k_min <= k_max")
    a2 = 0.0 if k_max == k_min else np.log(k_max / k_min) / (np.pi / 2.0)
    k = k_min * np.exp(a2 * elevation_rad)
    return float(np.clip(k, k_min, k_max))


class SpectrumSupportError(ValueError):
    pass


@dataclass(frozen=True)
class ScattererSpectrum:
    """Angular density of scattered-path departure directions.

    Elevation-like coordinate: cosine-shaped density with mean `theta_g`
    and half-spread `theta_m`. Azimuth: von Mises with mean `phi_g` and
    concentration `kappa`, truncated to the support box and renormalized.
    Azimuths follow the panel convention (measured around the boresight
    from the in-plane horizontal axis, range [0, 2*pi); below-horizon
    directions fall in (pi, 2*pi)).

    `theta_convention` resolves which variable the elevation parameters and
    the box bounds refer to:

    * "boresight"   -- directly the off-boresight polar angle theta_r
                       (the angle the element pattern sees);
    * "substituted" -- the complement pi/2 - theta_r.

    Both are exposed because published parameter sets are ambiguous between
    them; see the scenario config documentation.
    """

    theta_g: float
    theta_m: float
    kappa: float
    phi_g: float
    box_theta: tuple[float, float] = (0.0, np.pi / 2.0)
    box_phi: tuple[float, float] = (0.0, 2.0 * np.pi)
    theta_convention: str = "boresight"

    def __post_init__(self):
        if not 0.0 < self.theta_m <= np.pi / 2.0:
            raise ValueError("theta_m must lie in (0, pi/2]")
        if self.kappa < 0.0:
            raise ValueError("kappa must be nonnegative")
        if self.theta_convention not in ("boresight", "substituted"):
            raise ValueError(f"unknown theta convention {self.theta_convention!r}")
        if self.box_phi[1] <= self.box_phi[0] or self.box_phi[1] - self.box_phi[0] > 2 * np.pi:
            raise ValueError("azimuth box must be a nonempty interval of width <= 2*pi")
        lo, hi = self.polar_support()
        if hi <= lo:
            raise SpectrumSupportError(
                "elevation density support does not intersect the box")

    # -- elevation marginal, canonicalized to the off-boresight angle -------

    def _to_polar(self, s):
        """Map the convention variable to the off-boresight angle."""
        return s if self.theta_convention == "boresight" else np.pi / 2.0 - s

    def polar_support(self) -> tuple[float, float]:
        """Support interval of the off-boresight angle after box clipping."""
        a = max(self.theta_g - self.theta_m, self.box_theta[0])
        b = min(self.theta_g + self.theta_m, self.box_theta[1])
        if self.theta_convention == "boresight":
            lo, hi = max(a, 0.0), min(b, np.pi)
        else:
            lo, hi = np.pi / 2.0 - min(b, np.pi / 2.0), np.pi / 2.0 - max(a, -np.pi / 2.0)
        return lo, hi

    def _cdf_raw(self, s):
        # CDF of the un-truncated cosine density in the convention variable
        u = np.clip((s - self.theta_g) / self.theta_m, -1.0, 1.0)
        return 0.5 * (1.0 + np.sin(0.5 * np.pi * u))

    def _theta_norm(self) -> float:
        a = max(self.theta_g - self.theta_m, self.box_theta[0])
        b = min(self.theta_g + self.theta_m, self.box_theta[1])
        return float(self._cdf_raw(b) - self._cdf_raw(a))

    def elevation_density(self, theta_r):
        """Density of the off-boresight angle theta_r (box-truncated)."""
        theta_r = np.asarray(theta_r, dtype=float)
        s = self._to_polar(theta_r)  # involution: same map both ways
        inside = np.abs(s - self.theta_g) <= self.theta_m
        lo, hi = self.polar_support()
        inside &= (theta_r >= lo) & (theta_r <= hi)
        dens = (np.pi / (4.0 * self.theta_m)) * np.cos(
            0.5 * np.pi * (s - self.theta_g) / self.theta_m)
        return np.where(inside, dens / self._theta_norm(), 0.0)

    def sample_elevation(self, rng: np.random.Generator, size: int) -> np.ndarray:
        a = max(self.theta_g - self.theta_m, self.box_theta[0])
        b = min(self.theta_g + self.theta_m, self.box_theta[1])
        ca, cb = self._cdf_raw(a), self._cdf_raw(b)
        u = ca + (cb - ca) * rng.random(size)
        s = self.theta_g + (2.0 * self.theta_m / np.pi) * np.arcsin(2.0 * u - 1.0)
        return self._to_polar(s)

    # -- azimuth marginal ----------------------------------------------------

    def _vonmises_raw(self, phi):
        return np.exp(self.kappa * np.cos(phi - self.phi_g)) / (2.0 * np.pi * i0(self.kappa))

    def _phi_norm(self) -> float:
        from scipy.integrate import quad

        val, _ = quad(self._vonmises_raw, self.box_phi[0], self.box_phi[1],
                      epsabs=1e-12, epsrel=1e-12)
        return float(val)

    def azimuth_density(self, phi):
        """Density of the azimuth (panel convention), box-truncated."""
        phi = np.asarray(phi, dtype=float)
        lo, hi = self.box_phi
        wrapped = lo + np.mod(phi - lo, 2.0 * np.pi)
        inside = wrapped <= hi
        return np.where(inside, self._vonmises_raw(wrapped) / self._phi_norm(), 0.0)

    def sample_azimuth(self, rng: np.random.Generator, size: int) -> np.ndarray:
        lo, hi = self.box_phi
        out = np.empty(size)
        have = 0
        while have < size:
            batch = rng.vonmises(self.phi_g, self.kappa, size=max(size - have, 16) * 2)
            batch = lo + np.mod(batch - lo, 2.0 * np.pi)
            batch = batch[batch <= hi]
            take = min(batch.size, size - have)
            out[have:have + take] = batch[:take]
            have += take
        return out

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Draw departure directions (theta_r, phi_r) in the panel frame."""
        return self.sample_elevation(rng, size), self.sample_azimuth(rng, size)

    def power_density(self, theta_r, phi, k: float):
        """Scattered power angular density; integrates to 1/(k+1)."""
        return self.elevation_density(theta_r) * self.azimuth_density(phi) / (k + 1.0)


def _shape_in_panel_frame(pattern):
    """Adapt pattern.f to panel-frame angles (theta off boresight, phi around it)."""
    frame = getattr(pattern, "frame", "boresight")
    if frame == "boresight":
        return lambda t, p: pattern.f(t, p)

    def shape(theta_r, phi_r):
        st = np.sin(theta_r)
        v_up = st * np.sin(phi_r)
        v_bore = np.cos(theta_r)
        v_side = st * np.cos(phi_r)
        theta_vp = np.arccos(np.clip(v_up, -1.0, 1.0))
        phi_vp = np.arctan2(v_side, v_bore)
        return pattern.f(theta_vp, phi_vp)

    return shape


def pattern_spectrum_average(pattern, spectrum: ScattererSpectrum,
                             rtol: float = 1e-8) -> float:
    """Expected pattern shape F over the spectrum's departure directions."""
    lo, hi = spectrum.polar_support()
    shape = _shape_in_panel_frame(pattern)

    def integrand(t, p):
        return spectrum.elevation_density(t) * spectrum.azimuth_density(p) * shape(t, p)

    return integrate_2d(integrand, lo, hi, spectrum.box_phi[0], spectrum.box_phi[1],
                        rtol=rtol)


def e_nlos(spectrum: ScattererSpectrum, pattern, k: float,
           rtol: float = 1e-8) -> float:
    """Mean scattered power after pattern weighting: G * Int(P_S * F)."""
    return pattern.gain * pattern_spectrum_average(pattern, spectrum, rtol=rtol) / (k + 1.0)


@dataclass(frozen=True)
class FadingStats:
    """Rician fading statistics before/after pattern weighting."""

    k: float  # pre-pattern Rician factor, linear
    k_prime: float  # post-pattern Rician factor
    rho: float  # post-pattern mean fading power E[(xi')^2]
    e_nlos: float  # scattered mean power after pattern weighting

    @property
    def g_k(self) -> float:
        """Gain on the Rician factor (1 when k = k' = 0)."""
        return self.k_prime / self.k if self.k > 0 else 1.0

    @property
    def upsilon_prime(self) -> float:
        return np.sqrt(self.rho * self.k_prime / (self.k_prime + 1.0))

    @property
    def sigma_prime(self) -> float:
        return np.sqrt(self.rho / (2.0 * (self.k_prime + 1.0)))


def erp_modified_stats(k: float, los_pattern_gain: float, e_nlos_value: float) -> FadingStats:
    """Fading statistics with the element pattern folded in.

    `los_pattern_gain` is G*F evaluated along the direct direction,
    `e_nlos_value` the pattern-weighted scattered power. k = 0 keeps the
    Rayleigh branch (k' = 0, rho = e_nlos).
    """
    if k < 0:
        raise ValueError("Rician factor must be nonnegative")
    if e_nlos_value <= 0:
        raise ValueError("scattered mean power must be positive")
    if k == 0.0:
        return FadingStats(0.0, 0.0, e_nlos_value, e_nlos_value)
    los_power = los_pattern_gain * k / (k + 1.0)
    k_prime = los_power / e_nlos_value
    rho = e_nlos_value + los_power
    return FadingStats(k, k_prime, rho, e_nlos_value)


def sample_fading_analytic(rng: np.random.Generator, stats: FadingStats,
                           size: int | tuple[int, ...] = 1) -> np.ndarray:
    """I.i.d. Rician amplitude draws with E[(xi')^2] = rho."""
    g = rng.standard_normal(size=(2,) + (tuple(size) if isinstance(size, tuple) else (size,)))
    return np.hypot(stats.upsilon_prime + stats.sigma_prime * g[0],
                    stats.sigma_prime * g[1])


def multipath_channel_samples(rng: np.random.Generator, k: float, pattern,
                              spectrum: ScattererSpectrum, los_pattern_gain: float,
                              los_phase: float, n_paths: int,
                              n_angle_instances: int, n_phase_draws: int) -> np.ndarray:
    """Brute-force multipath synthesis of the normalized element-UE channel.

    Draws `n_angle_instances` sets of `n_paths` departure directions from the
    spectrum; for each set, `n_phase_draws` realizations of i.i.d. uniform
    path phases. Paths carry equal mean power 1/((k+1) n_paths); the direct
    ray carries k/(k+1) weighted by the pattern. Returns complex samples of
    shape (n_angle_instances * n_phase_draws,); |.|^2 has mean rho.
    """
    if n_paths < 1:
        raise ValueError("need at least one scattered path")
    shape = _shape_in_panel_frame(pattern)
    los = np.sqrt(k / (k + 1.0) * los_pattern_gain) * np.exp(1j * los_phase)
    amp = 1.0 / np.sqrt((k + 1.0) * n_paths)
    out = np.empty((n_angle_instances, n_phase_draws), dtype=complex)
    for i in range(n_angle_instances):
        theta_r, phi_r = spectrum.sample(rng, n_paths)
        ray_amp = amp * np.sqrt(pattern.gain * shape(theta_r, phi_r))  # (n_paths,)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=(n_phase_draws, n_paths))
        out[i] = np.exp(-1j * phases) @ ray_amp
    return (los + out).ravel()
