"""Coordinate frames, panel element placement, and local angle extraction.

Global frame: right-handed Cartesian, z up, positions in meters. A reflecting
panel is a uniform planar array standing vertically; its boresight (outward
surface normal) is horizontal and points into the served sector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Vec3 = np.ndarray  # shape (3,), float64


def vec3(x: float, y: float, z: float) -> Vec3:
    v = np.array([x, y, z], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite position {v}")
    return v


@dataclass(frozen=True)
class LocalAngles:
    """Elevation/azimuth pair in some local frame, radians.

    theta in [0, pi], phi in [-pi, pi).
    """

    theta: float
    phi: float


@dataclass(frozen=True)
class IrsPanel:
    """Uniform planar array of passive reflecting elements.

    The panel lies in a vertical plane; element (m_y, m_z) indices run over
    [1 - M/2, M/2] (both counts must be even) and are flattened to
    n = (m_y + M_y/2 - 1) * M_z + (m_z + M_z/2), n = 1..N.
    """

    m_y: int
    m_z: int
    d_y: float  # element spacing along the in-plane horizontal axis, m
    d_z: float  # element spacing along z, m
    height: float  # center height above ground, m
    center_xy: tuple[float, float] = (0.0, 0.0)
    boresight_azimuth: float = 0.0  # radians, 0 = +x

    def __post_init__(self):
        if self.m_y <= 0 or self.m_z <= 0 or self.m_y % 2 or self.m_z % 2:
            raise ValueError("element counts must be positive even integers")
        if self.d_y <= 0 or self.d_z <= 0:
            raise ValueError("element spacing must be positive")

    @property
    def n_elements(self) -> int:
        return self.m_y * self.m_z

    @property
    def center(self) -> Vec3:
        return vec3(self.center_xy[0], self.center_xy[1], self.height)

    @property
    def normal(self) -> Vec3:
        a = self.boresight_azimuth
        return np.array([np.cos(a), np.sin(a), 0.0])

    @property
    def in_plane_horizontal(self) -> Vec3:
        """Unit vector along the panel's horizontal axis (z_hat x normal)."""
        a = self.boresight_azimuth
        return np.array([-np.sin(a), np.cos(a), 0.0])

    def grid_indices(self, n: int) -> tuple[int, int]:
        """Invert the flattened element index (1-based) to (m_y, m_z)."""
        if not 1 <= n <= self.n_elements:
            raise IndexError(f"element index {n} outside 1..{self.n_elements}")
        q, r = divmod(n - 1, self.m_z)
        return q + 1 - self.m_y // 2, r + 1 - self.m_z // 2

    def element_position(self, n: int) -> Vec3:
        m_y, m_z = self.grid_indices(n)
        off_y = (m_y - 0.5) * self.d_y
        off_z = (m_z - 0.5) * self.d_z
        return self.center + off_y * self.in_plane_horizontal + off_z * np.array([0.0, 0.0, 1.0])

    def element_positions(self) -> np.ndarray:
        """All element centers, shape (N, 3), in flattened-index order."""
        my = np.arange(1 - self.m_y // 2, self.m_y // 2 + 1)
        mz = np.arange(1 - self.m_z // 2, self.m_z // 2 + 1)
        off_y = ((my - 0.5) * self.d_y)[:, None]  # (M_y, 1)
        off_z = ((mz - 0.5) * self.d_z)[None, :]  # (1, M_z)
        pos = (self.center[None, None, :]
               + off_y[..., None] * self.in_plane_horizontal[None, None, :]
               + off_z[..., None] * np.array([0.0, 0.0, 1.0])[None, None, :])
        return pos.reshape(self.n_elements, 3)

    def tx_position(self, standoff: float) -> Vec3:
        """Feed antenna position, `standoff` meters in front of the center."""
        return self.center + standoff * self.normal


def boresight_angles(origin: Vec3, boresight: Vec3, target: Vec3) -> LocalAngles:
    """Angles of `target` in a frame whose polar axis is `boresight`.

    theta is measured off the boresight axis; phi is measured around it,
    from the horizontal in-plane axis (z_hat x boresight), with phi < 0 for
    targets below the horizontal plane through `origin`. This is the panel
    (reflecting-surface) convention: theta = 0 on boresight.
    """
    d = np.asarray(target, dtype=float) - np.asarray(origin, dtype=float)
    r = np.linalg.norm(d)
    if r == 0.0:
        raise ValueError("target coincides with frame origin")
    b = np.asarray(boresight, dtype=float)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        raise ValueError("zero-length boresight")
    b = b / nb
    z_hat = np.array([0.0, 0.0, 1.0])
    y_loc = np.cross(z_hat, b)
    ny = np.linalg.norm(y_loc)
    if ny < 1e-12:
        raise ValueError("boresight must not be vertical")
    y_loc /= ny
    z_loc = np.cross(b, y_loc)
    theta = np.arccos(np.clip(d @ b / r, -1.0, 1.0))
    phi = np.arctan2(d @ z_loc, d @ y_loc)
    if phi >= np.pi:  # keep phi in [-pi, pi)
        phi -= 2.0 * np.pi
    return LocalAngles(float(theta), float(phi))


def vertical_frame_angles(origin: Vec3, boresight: Vec3, target: Vec3) -> LocalAngles:
    """Angles of `target` in a frame with vertical polar axis.

    theta is the polar angle from z_hat (up); phi is the azimuth from the
    horizontal projection of `boresight`. This is the feed-antenna and
    sector-element convention: the boresight sits at theta = pi/2, phi = 0.
    """
    d = np.asarray(target, dtype=float) - np.asarray(origin, dtype=float)
    r = np.linalg.norm(d)
    if r == 0.0:
        raise ValueError("target coincides with frame origin")
    b = np.asarray(boresight, dtype=float).copy()
    b[2] = 0.0
    nb = np.linalg.norm(b)
    if nb == 0.0:
        raise ValueError("boresight must have a horizontal component")
    x_loc = b / nb
    z_hat = np.array([0.0, 0.0, 1.0])
    y_loc = np.cross(z_hat, x_loc)
    theta = np.arccos(np.clip(d[2] / r, -1.0, 1.0))
    phi = np.arctan2(d @ y_loc, d @ x_loc)
    if phi >= np.pi:
        phi -= 2.0 * np.pi
    return LocalAngles(float(theta), float(phi))
