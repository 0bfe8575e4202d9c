"""Pure-numpy implementations of the hot numeric kernels.

These mirror the compiled versions in ``_core.pyx`` one to one; the package
selects whichever backend is importable (see ``sphlis._kernels``).  All
functions take 1-D float64 arrays and return float64 results.
"""

import numpy as np


def cap_integrand(tau, u):
    """Received power density over a spherical cap, in u = cos(theta).

    Evaluates (tau*u - 1) / (1 - 2*tau*u + tau**2)**1.5 elementwise,
    through the regrouping (t1 - tau*h) / ((t1*t1 + 2*tau*h)**1.5) with
    t1 = tau - 1 and h = 1 - u, which cannot go negative under the radical
    as tau -> 1.  Integrating this over u in [cos(theta_hat), 1] and
    halving gives the cap power fraction.
    """
    u = np.asarray(u, dtype=np.float64)
    t1 = tau - 1.0
    h = 1.0 - u
    d = t1 * t1 + 2.0 * tau * h
    return (t1 - tau * h) / (d * np.sqrt(d))


def cap_integrand_clamped(tau, u):
    """Same as cap_integrand but clamped to zero outside the visible cap."""
    u = np.asarray(u, dtype=np.float64)
    t1 = tau - 1.0
    h = 1.0 - u
    d = t1 * t1 + 2.0 * tau * h
    return np.maximum(t1 - tau * h, 0.0) / (d * np.sqrt(d))


def disk_density(zk, sin_theta, cos_theta, r, phi):
    """Power density |s|^2 on a disk at height 0, terminal at distance zk.

    The terminal sits at (0, zk*sin_theta, zk*cos_theta); the evaluation
    point at polar (r, phi) on the disk.  Returns
    zk*cos_theta / (4*pi*d^3) with d^2 = zk^2 - 2*r*zk*sin_theta*sin(phi) + r^2.
    ``r`` and ``phi`` must have matching shapes (pair per sample).
    """
    r = np.asarray(r, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    d2 = zk * zk - 2.0 * r * zk * sin_theta * np.sin(phi) + r * r
    return zk * cos_theta / (4.0 * np.pi * d2 * np.sqrt(d2))


def coherent_power(amp, phase):
    """|sum_n amp_n * exp(j*phase_n)|^2 for real amplitudes and phases."""
    amp = np.asarray(amp, dtype=np.float64)
    phase = np.asarray(phase, dtype=np.float64)
    re = float(np.sum(amp * np.cos(phase)))
    im = float(np.sum(amp * np.sin(phase)))
    return re * re + im * im
