"""Geometry and the pointwise line-of-sight field model.

A spherical LIS of radius R sits centered at the origin; a terminal at
Cartesian (x, y, z).  By the isotropy of the sphere every terminal is
equivalent to one on the +z axis at distance sqrt(x^2+y^2+z^2), so the
canonical frame puts the terminal on the axis and measures the polar angle
theta from it.  tau = distance/R is the normalized range; the surface can
see the terminal only inside the cap theta <= theta0 = arccos(1/tau).

All lengths are meters and all angles radians.  Degree conversion, if any,
belongs at the CLI boundary.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import VisibilityError

SPEED_OF_LIGHT = 299_792_458.0

# slack on visibility tests so boundary points do not flap in float math
VISIBILITY_SLACK = 1e-12


@dataclass(frozen=True)
class LisGeometry:
    """Shape of the surface: a full sphere or a flat disk, radius in meters."""

    kind: str  # "sphere" or "disk"
    radius: float

    def __post_init__(self):
        if self.kind not in ("sphere", "disk"):
            raise ValueError(f"unknown LIS kind {self.kind!r}")
        if not self.radius > 0.0:
            raise ValueError("LIS radius must be positive")

    @classmethod
    def sphere(cls, radius: float) -> "LisGeometry":
        return cls("sphere", float(radius))

    @classmethod
    def disk(cls, radius: float) -> "LisGeometry":
        return cls("disk", float(radius))

    @property
    def area(self) -> float:
        if self.kind == "sphere":
            return 4.0 * math.pi * self.radius**2
        return math.pi * self.radius**2


@dataclass(frozen=True)
class TerminalPose:
    """Terminal position in Cartesian meters."""

    x: float
    y: float
    z: float

    @classmethod
    def from_xyz(cls, x: float, y: float, z: float) -> "TerminalPose":
        return cls(float(x), float(y), float(z))

    @classmethod
    def on_axis(cls, distance: float) -> "TerminalPose":
        return cls(0.0, 0.0, float(distance))

    @property
    def distance(self) -> float:
        """Range from the LIS center."""
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @property
    def direction(self) -> np.ndarray:
        """Unit vector from the center toward the terminal."""
        d = self.distance
        if d == 0.0:
            raise ValueError("terminal at the center has no direction")
        return np.array([self.x, self.y, self.z]) / d

    def tau(self, radius: float) -> float:
        """Normalized range distance/R."""
        return self.distance / radius

    def canonical(self) -> "TerminalPose":
        """Equivalent on-axis pose (same range, direction rotated to +z)."""
        return TerminalPose.on_axis(self.distance)

    def rotation_from_canonical(self) -> np.ndarray:
        """3x3 rotation taking the +z axis onto this pose's direction.

        Columns form an orthonormal frame whose third axis points at the
        terminal; apply it to canonical-frame points to express them in the
        original frame.
        """
        d = self.direction
        zhat = np.array([0.0, 0.0, 1.0])
        c = float(np.dot(zhat, d))
        if c > 1.0 - 1e-14:
            return np.eye(3)
        if c < -1.0 + 1e-14:
            # antipodal: rotate by pi about x
            return np.diag([1.0, -1.0, -1.0])
        axis = np.cross(zhat, d)
        s = np.linalg.norm(axis)
        axis = axis / s
        k = np.array(
            [
                [0.0, -axis[2], axis[1]],
                [axis[2], 0.0, -axis[0]],
                [-axis[1], axis[0], 0.0],
            ]
        )
        return np.eye(3) + s * k + (1.0 - c) * (k @ k)


@dataclass(frozen=True)
class RadioConfig:
    """Narrow-band carrier; only the wavelength enters the phase model."""

    wavelength: float
    frequency: Optional[float] = None

    def __post_init__(self):
        if not self.wavelength > 0.0:
            raise ValueError("wavelength must be positive")
        if self.frequency is None:
            object.__setattr__(self, "frequency", SPEED_OF_LIGHT / self.wavelength)
        elif not self.frequency > 0.0:
            raise ValueError("frequency must be positive")

    @classmethod
    def from_frequency(cls, frequency: float) -> "RadioConfig":
        return cls(SPEED_OF_LIGHT / float(frequency), float(frequency))


@dataclass(frozen=True)
class FieldSample:
    """Complex field at one surface point: amplitude >= 0, phase in [0, 2pi)."""

    amplitude: float
    phase: float

    @property
    def value(self) -> complex:
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class SurfacePoint:
    """Point on the LIS surface.

    Spherical surfaces use (theta, phi); disks use polar (r, phi) in the
    z=0 plane.  Exactly one of theta/r must be set.
    """

    theta: Optional[float] = None
    r: Optional[float] = None
    phi: float = 0.0

    def __post_init__(self):
        if (self.theta is None) == (self.r is None):
            raise ValueError("set exactly one of theta (sphere) or r (disk)")
        if self.theta is not None and not 0.0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")
        if self.r is not None and self.r < 0.0:
            raise ValueError("r must be nonnegative")

    @classmethod
    def sphere_point(cls, theta: float, phi: float = 0.0) -> "SurfacePoint":
        return cls(theta=float(theta), phi=float(phi))

    @classmethod
    def disk_point(cls, r: float, phi: float = 0.0) -> "SurfacePoint":
        return cls(r=float(r), phi=float(phi))

    def cartesian(self, geom: LisGeometry) -> np.ndarray:
        if geom.kind == "sphere":
            if self.theta is None:
                raise ValueError("spherical geometry needs a (theta, phi) point")
            st = math.sin(self.theta)
            return geom.radius * np.array(
                [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
            )
        if self.r is None:
            raise ValueError("disk geometry needs an (r, phi) point")
        if self.r > geom.radius * (1.0 + 1e-12):
            raise ValueError("point lies outside the disk")
        return np.array(
            [self.r * math.cos(self.phi), self.r * math.sin(self.phi), 0.0]
        )

    @classmethod
    def from_cartesian(cls, xyz, geom: LisGeometry) -> "SurfacePoint":
        x, y, z = (float(v) for v in xyz)
        if geom.kind == "sphere":
            rho = math.sqrt(x * x + y * y + z * z)
            if abs(rho - geom.radius) > 1e-9 * geom.radius:
                raise ValueError("point is not on the sphere")
            theta = math.acos(min(1.0, max(-1.0, z / rho)))
            phi = math.atan2(y, x) % (2.0 * math.pi)
            return cls(theta=theta, phi=phi)
        if abs(z) > 1e-9 * geom.radius:
            raise ValueError("point is not in the disk plane")
        return cls(r=math.hypot(x, y), phi=math.atan2(y, x) % (2.0 * math.pi))


def visibility_angle(tau: float) -> float:
    """Largest polar angle arccos(1/tau) that can see a terminal at tau.

    tau < 1 (terminal inside the sphere) is rejected; the result is clamped
    to [0, pi/2].
    """
    if tau < 1.0:
        raise ValueError(f"tau={tau} < 1: terminal inside the sphere")
    return math.acos(min(1.0, 1.0 / tau))


def distance_eta(point: SurfacePoint, terminal: TerminalPose, geom: LisGeometry) -> float:
    """Propagation distance from the terminal to a surface point.

    For a sphere the terminal is taken in canonical (on-axis) form, giving
    R*sqrt(1 - 2*tau*cos(theta) + tau^2); for a disk the plain Cartesian
    distance to the terminal's actual position.
    """
    if geom.kind == "sphere":
        if point.theta is None:
            raise ValueError("spherical geometry needs a (theta, phi) point")
        tau = terminal.tau(geom.radius)
        return geom.radius * math.sqrt(
            1.0 - 2.0 * tau * math.cos(point.theta) + tau * tau
        )
    p = point.cartesian(geom)
    dx, dy, dz = p[0] - terminal.x, p[1] - terminal.y, p[2] - terminal.z
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def cos_aoa(point: SurfacePoint, terminal: TerminalPose, geom: LisGeometry) -> float:
    """Cosine of the arrival angle against the outward surface normal.

    Sphere form (law of cosines): (z_k^2 - eta^2 - R^2) / (2*R*eta), which
    equals R*(tau*cos(theta) - 1)/eta.  Points beyond the visibility cap
    raise VisibilityError.
    """
    if geom.kind != "sphere":
        raise ValueError("cos_aoa is defined for spherical geometry")
    tau = terminal.tau(geom.radius)
    theta0 = visibility_angle(tau)
    if point.theta > theta0 + VISIBILITY_SLACK:
        raise VisibilityError(
            f"theta={point.theta:.6g} beyond visibility angle {theta0:.6g}"
        )
    zk = terminal.distance
    eta = distance_eta(point, terminal, geom)
    r = geom.radius
    c = (zk * zk - eta * eta - r * r) / (2.0 * r * eta)
    return min(1.0, max(0.0, c))


def field_sample(
    point: SurfacePoint,
    terminal: TerminalPose,
    geom: LisGeometry,
    radio: RadioConfig,
) -> FieldSample:
    """Complex field radiated by a unit-power terminal at a surface point.

    Power density is cos(psi)/(4*pi*eta^2) per unit area (units 1/m^2), and
    the carrier phase is -2*pi*eta/wavelength, wrapped into [0, 2pi).
    """
    eta = distance_eta(point, terminal, geom)
    if geom.kind == "sphere":
        c = cos_aoa(point, terminal, geom)
    else:
        # disk normal is +z; the terminal must sit above the plane
        if terminal.z <= 0.0:
            raise VisibilityError("terminal below the disk plane")
        c = terminal.z / eta
    magnitude_sq = c / (4.0 * math.pi * eta * eta)
    phase = (-2.0 * math.pi * eta / radio.wavelength) % (2.0 * math.pi)
    return FieldSample(amplitude=math.sqrt(magnitude_sq), phase=phase)
