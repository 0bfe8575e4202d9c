"""Closed-form received signal strength (RSS) for unit transmit power.

Spherical surfaces integrate the field over the cap theta in [0, theta_hat];
disks over their full face.  Every value is a power fraction in [0, 1/2]:
at most the half of the radiated power heading toward the surface arrives.

The spherical/planar comparison ratio uses a disk of radius scale*R; the
default scale sqrt(2) makes the disk area equal to the sphere's maximal
receiving hemisphere (2*pi*R^2).
"""

import math

from .geometry import visibility_angle, VISIBILITY_SLACK

ROOT2 = math.sqrt(2.0)


def rss_sphere_cap(tau: float, theta_hat: float) -> float:
    """Power collected by the spherical cap theta <= theta_hat.

    Closed form (1 - (tau - c)/sqrt(tau^2 - 2*tau*c + 1))/2 with
    c = cos(theta_hat).  Evaluated through h = 1 - c = 2*sin(theta_hat/2)^2
    as h*(2-h) / (2*D*(D + tau - 1 + h)), D^2 = (tau-1)^2 + 2*tau*h, which
    stays accurate at large tau and all the way down to the tau -> 1
    boundary where the direct expression cancels catastrophically.  Caps
    beyond the visibility angle are rejected: the field is zero there.
    """
    if tau < 1.0:
        raise ValueError(f"tau={tau} < 1: terminal inside the sphere")
    theta0 = visibility_angle(tau)
    if not 0.0 <= theta_hat <= theta0 + VISIBILITY_SLACK:
        raise ValueError(
            f"theta_hat={theta_hat:.6g} outside [0, theta0={theta0:.6g}]"
        )
    if theta_hat == 0.0:
        return 0.0
    h = 2.0 * math.sin(0.5 * theta_hat) ** 2
    t1 = tau - 1.0
    d = math.sqrt(t1 * t1 + 2.0 * tau * h)
    return h * (2.0 - h) / (2.0 * d * (d + t1 + h))


def rss_sphere_full(tau: float) -> float:
    """Power over the whole visible cap, (1 - sqrt(tau^2-1)/tau)/2.

    Equals rss_sphere_cap at theta_hat = theta0; computed as
    1/(2*tau*(tau + sqrt(tau^2-1))), which is exact at tau=1 (-> 1/2) and
    stable at large tau (-> 1/(4*tau^2)).
    """
    if tau < 1.0:
        raise ValueError(f"tau={tau} < 1: terminal inside the sphere")
    return 1.0 / (2.0 * tau * (tau + math.sqrt(tau * tau - 1.0)))


def rss_disk_approx(tau: float, theta: float) -> float:
    """Far-field power on a disk, (cos(theta)/2)*(1 - tau/sqrt(tau^2+1)).

    tau is the terminal range over the disk radius; theta the terminal's
    polar angle off the disk axis.  Exact at theta = 0 for any tau; for
    theta > 0 it is the tau >> 1 approximation of the true surface
    integral.  Any tau > 0 is allowed (a disk has no minimum range).
    """
    if not tau > 0.0:
        raise ValueError("tau must be positive for a disk")
    if not 0.0 <= theta < math.pi / 2.0:
        raise ValueError("theta must lie in [0, pi/2)")
    root = math.sqrt(tau * tau + 1.0)
    return math.cos(theta) / (2.0 * root * (root + tau))


def gamma_ratio(tau: float, planar_radius_scale: float = ROOT2) -> float:
    """RSS ratio of a sphere of radius R over a disk of radius scale*R.

    The sphere sees the terminal at normalized range tau from any
    direction; the disk's power is averaged over terminal angles
    theta in [0, pi/2).  Closed form:

        (pi/2) * (1 - sqrt(tau^2-1)/tau) / (1 - tau/sqrt(tau^2+s^2))

    computed cancellation-free.  Limits: pi*(3+sqrt(3))/4 ~ 3.716 as
    tau -> 1 and pi/(2*s^2) as tau -> inf (pi/4 for the equal-area
    default s = sqrt(2)).
    """
    if tau < 1.0:
        raise ValueError(f"tau={tau} < 1: spherical LIS requires tau >= 1")
    s = float(planar_radius_scale)
    if not s > 0.0:
        raise ValueError("planar_radius_scale must be positive")
    root = math.sqrt(tau * tau + s * s)
    numerator = math.pi / 2.0 * root * (root + tau)
    return numerator / (s * s * tau * (tau + math.sqrt(tau * tau - 1.0)))


def gamma_ratio_near_surface(planar_radius_scale: float = ROOT2) -> float:
    """Limit of gamma_ratio as tau -> 1 (terminal touching the sphere)."""
    return gamma_ratio(1.0, planar_radius_scale)


def drss_sphere_full_dtau(tau: float) -> float:
    """d/dtau of rss_sphere_full: -1/(2*tau^2*sqrt(tau^2-1))."""
    if tau <= 1.0:
        raise ValueError("derivative defined for tau > 1")
    return -1.0 / (2.0 * tau * tau * math.sqrt(tau * tau - 1.0))


def drss_disk_axis_dtau(tau: float) -> float:
    """d/dtau of the on-axis disk power: -(tau^2+1)^(-3/2)/2."""
    if tau < 0.0:
        raise ValueError("tau must be nonnegative")
    return -0.5 * (tau * tau + 1.0) ** -1.5
