"""Directional power patterns and beam design helpers.

Every pattern is a pair (G, F): a linear maximum gain G and a normalized
power shape F(theta, phi) in [0, 1]. A lossless pattern conserves energy,
i.e. the solid-angle integral of G*F over the sphere equals 4*pi.

Two angle conventions coexist and each pattern documents its own:

* vertical-polar -- theta measured from up, azimuth from the boresight;
  the beam peak of the feed antenna sits at theta = pi/2, phi = 0
  (support is deliberately NOT re-centered on the peak).
* boresight-polar -- theta measured off the panel normal; the reflecting
  element pattern peaks at theta = 0 and is zero behind the panel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import erf, gammaln

from .geometry import LocalAngles
from .quadrature import sphere_integral


def hpbw(q: float) -> float:
    """Half-power beamwidth (rad) of a cos^2q / sin^2q principal cut."""
    if q <= 0:
        raise ValueError("pattern exponent must be positive")
    return 2.0 * np.arccos(2.0 ** (-1.0 / (2.0 * q)))


def exponent_for_hpbw(mu: float) -> float:
    """Invert hpbw(): exponent q giving half-power beamwidth mu (rad)."""
    if not 0.0 < mu < np.pi:
        raise ValueError("beamwidth must lie in (0, pi)")
    return np.log(2.0) / (-2.0 * np.log(np.cos(mu / 2.0)))


def footprint_design(mu_y: float, mu_z: float, standoff: float) -> tuple[float, float, float]:
    """Elliptic beam footprint on a plane `standoff` meters ahead.

    Returns (alpha, beta, area): the semi-axes spanned by the two principal
    half-power beamwidths and the ellipse area.
    """
    if not (0.0 < mu_y < np.pi and 0.0 < mu_z < np.pi):
        raise ValueError("degenerate beamwidth")
    if standoff <= 0.0:
        raise ValueError("standoff must be positive")
    alpha = standoff * np.tan(mu_y / 2.0)
    beta = standoff * np.tan(mu_z / 2.0)
    return alpha, beta, np.pi * alpha * beta


def standoff_for_panel(side: float, mu: float) -> float:
    """Feed distance so a panel of physical side `side` (m) is inscribed in
    the footprint ellipse with maximum rectangular area: side = sqrt(2) * D * tan(mu/2)."""
    if side <= 0.0:
        raise ValueError("panel side must be positive")
    return side / (np.sqrt(2.0) * np.tan(mu / 2.0))


@dataclass(frozen=True)
class CosinePattern:
    """Feed-antenna beam sin^2qz(theta) * cos^2qy(phi), vertical-polar.

    Support theta in [0, pi], phi in [-pi/2, pi/2]; zero in the back
    half-space. The peak is on the horizon (theta = pi/2, phi = 0).
    Exponents are positive reals so arbitrary half-power beamwidths are
    representable. gain is the exact lossless maximum gain.
    """

    q_y: float
    q_z: float

    support = (0.0, np.pi, -np.pi / 2.0, np.pi / 2.0)

    def __post_init__(self):
        if self.q_y <= 0 or self.q_z <= 0:
            raise ValueError("pattern exponents must be positive")

    @property
    def gain(self) -> float:
        # 4*pi divided by the closed-form shape integral
        # Int sin^(2qz+1) dtheta = sqrt(pi) G(qz+1)/G(qz+3/2),
        # Int cos^(2qy) dphi    = sqrt(pi) G(qy+1/2)/G(qy+1).
        log_i = (np.log(np.pi)
                 + gammaln(self.q_z + 1.0) - gammaln(self.q_z + 1.5)
                 + gammaln(self.q_y + 0.5) - gammaln(self.q_y + 1.0))
        return float(4.0 * np.pi * np.exp(-log_i))

    def f(self, theta, phi):
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        inside = (np.abs(phi) <= np.pi / 2.0) & (theta >= 0.0) & (theta <= np.pi)
        val = np.sin(theta) ** (2.0 * self.q_z) * np.where(
            inside, np.abs(np.cos(phi)) ** (2.0 * self.q_y), 0.0)
        return np.where(inside, val, 0.0)


@dataclass(frozen=True)
class IrsElementPattern:
    """Reflecting-element pattern cos^(g/2-1)(theta), boresight-polar.

    Zero for theta > pi/2 (behind the panel). Energy conservation holds in
    closed form for any linear gain g >= 2: the shape integral is exactly
    4*pi/g.
    """

    gain: float

    support = (0.0, np.pi / 2.0, -np.pi, np.pi)

    def __post_init__(self):
        if self.gain < 2.0:
            raise ValueError("element gain must be >= 2 (linear)")

    @property
    def exponent(self) -> float:
        return self.gain / 2.0 - 1.0

    def f(self, theta, phi=None):
        theta = np.asarray(theta, dtype=float)
        front = theta <= np.pi / 2.0
        c = np.where(front, np.cos(theta), 0.0)
        if self.exponent == 0.0:
            return np.where(front, 1.0, 0.0)
        return np.where(front, c ** self.exponent, 0.0)


@dataclass(frozen=True)
class ThreeGppElementPattern:
    """Sector-antenna element, parabolic-in-dB cuts, vertical-polar.

    A(theta, phi) = -min(-(Av + Ah), floor_db) with
    Av = -min(12 ((theta - 90deg)/hpbw)^2, sla_db) and
    Ah = -min(12 (phi/hpbw)^2, floor_db); F = 10^(A/10).

    max_gain_dbi = None derives the energy-conserving gain numerically at
    construction; a finite value models a lossy element at that gain.
    """

    hpbw_deg: float = 65.0
    sla_db: float = 30.0
    floor_db: float = 30.0
    max_gain_dbi: float | None = None
    _gain: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.max_gain_dbi is None:
            g = 4.0 * np.pi / self.shape_integral()
        else:
            g = 10.0 ** (self.max_gain_dbi / 10.0)
        object.__setattr__(self, "_gain", float(g))

    @property
    def gain(self) -> float:
        return self._gain

    def shape_integral(self) -> float:
        """Solid-angle integral of F, azimuth cut reduced in closed form.

        For each theta the azimuth integral splits into a Gaussian core
        (parabolic dB taper) out to the radius where the overall floor
        binds, plus the constant floor over the rest of the circle.
        """
        b = self.hpbw_deg * np.pi / 180.0
        c = 12.0 * np.log(10.0) / (10.0 * b * b)
        floor_lin = 10.0 ** (-self.floor_db / 10.0)

        def ring(theta):
            att_v = np.minimum(12.0 * ((theta - np.pi / 2.0) / b) ** 2, self.sla_db)
            phi_k = np.minimum(
                b * np.sqrt(np.maximum(self.floor_db - att_v, 0.0) / 12.0), np.pi)
            core = 10.0 ** (-att_v / 10.0) * np.sqrt(np.pi / c) * erf(np.sqrt(c) * phi_k)
            return core + floor_lin * (2.0 * np.pi - 2.0 * phi_k)

        val, _ = quad(lambda t: ring(t) * np.sin(t), 0.0, np.pi,
                      epsabs=1e-13, epsrel=1e-13, limit=200)
        return float(val)

    def f(self, theta, phi):
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        b = self.hpbw_deg * np.pi / 180.0
        att_v = np.minimum(12.0 * ((theta - np.pi / 2.0) / b) ** 2, self.sla_db)
        att_h = np.minimum(12.0 * (phi / b) ** 2, self.floor_db)
        att = np.minimum(att_v + att_h, self.floor_db)
        return 10.0 ** (-att / 10.0)


def _support_of(pattern) -> tuple[float, float, float, float]:
    # quadrature restricted to the support box keeps the integrand smooth
    return getattr(pattern, "support", (0.0, np.pi, -np.pi, np.pi))


def max_gain_numeric(pattern, rtol: float = 1e-8) -> float:
    """Lossless maximum gain 4*pi / integral(F dOmega) by adaptive quadrature."""
    t0, t1, p0, p1 = _support_of(pattern)
    shape = sphere_integral(lambda t, p: pattern.f(t, p), t0, t1, p0, p1, rtol=rtol)
    return 4.0 * np.pi / shape


def pattern_gain(pattern, angles: LocalAngles) -> float:
    """Directional power gain G * F at the given local angles."""
    return float(pattern.gain * pattern.f(angles.theta, angles.phi))


def radiated_power_integral(pattern, rtol: float = 1e-8) -> float:
    """Solid-angle integral of G*F; equals 4*pi for a lossless pattern."""
    t0, t1, p0, p1 = _support_of(pattern)
    return sphere_integral(lambda t, p: pattern.gain * pattern.f(t, p),
                           t0, t1, p0, p1, rtol=rtol)
