"""Terminal ranging from the visibility boundary and from cap power series.

A spherical surface localizes a terminal from geometry alone: the measured
boundary angle theta0 of the illuminated cap gives the range z = R/cos(theta0)
directly.  Alternatively, received powers on nested caps at angles
theta_n = theta0/n invert to the normalized range tau through the closed cap
formula.  Both estimators come with the (d P/d tau)^-2 proportionality
factors that set their variance floor under additive white Gaussian noise:
multiply a factor by the measurement noise variance to get the bound.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import _kernels as kernels
from .errors import DetectionError, EstimationError
from .geometry import visibility_angle
from .rss import rss_sphere_cap, rss_sphere_full

TAU_MAX_DEFAULT = 1e6

# measured powers are pushed inside the physical open interval (0, 1/2)
_POWER_FLOOR = 1e-12


@dataclass(frozen=True)
class AngleMeasurement:
    """Measured visibility-boundary angle and its noise level (radians)."""

    theta0_hat: float
    sigma_theta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta0_hat <= math.pi / 2.0:
            raise ValueError("theta0_hat must lie in [0, pi/2]")
        if self.sigma_theta < 0.0:
            raise ValueError("sigma_theta must be nonnegative")


@dataclass(frozen=True)
class RssSeries:
    """Cap powers measured at shrinking angles theta_n = theta0/n.

    ``angles`` must be strictly decreasing; ``sigma_p`` is the AWGN standard
    deviation of each power measurement.
    """

    angles: Tuple[float, ...]
    powers: Tuple[float, ...]
    sigma_p: float = 0.0

    def __post_init__(self):
        if len(self.angles) < 1 or len(self.angles) != len(self.powers):
            raise ValueError("need matching, nonempty angle/power sequences")
        if any(b >= a for a, b in zip(self.angles, self.angles[1:])):
            raise ValueError("angles must be strictly decreasing")
        if any(not 0.0 < a <= math.pi / 2.0 for a in self.angles):
            raise ValueError("angles must lie in (0, pi/2]")

    @classmethod
    def from_boundary_angle(
        cls, theta0_hat: float, powers: Sequence[float], sigma_p: float = 0.0
    ) -> "RssSeries":
        n = len(powers)
        angles = tuple(theta0_hat / k for k in range(1, n + 1))
        return cls(angles, tuple(float(p) for p in powers), sigma_p)


def estimate_z_from_angle(measurement: AngleMeasurement, radius: float) -> float:
    """Range estimate R / cos(theta0_hat) from the boundary angle."""
    if measurement.theta0_hat >= math.pi / 2.0:
        raise ValueError("theta0_hat at pi/2 gives an unbounded range")
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    return radius / math.cos(measurement.theta0_hat)


def _cap_power_model(tau: float, theta: float) -> float:
    """Cap power at angle theta for a terminal at tau, any theta.

    Beyond the visibility boundary no extra power arrives, so the model
    saturates at the full-cap value; this keeps the fit objective defined
    for every candidate tau.
    """
    theta0 = visibility_angle(tau)
    if theta >= theta0:
        return rss_sphere_full(tau)
    return rss_sphere_cap(tau, theta)


def _cap_power_model_vec(taus: np.ndarray, theta: float) -> np.ndarray:
    """_cap_power_model over an array of tau > 1 candidates."""
    taus = np.asarray(taus, dtype=np.float64)
    c = math.cos(theta)
    full = 1.0 / (2.0 * taus * (taus + np.sqrt(taus * taus - 1.0)))
    if c <= 0.0:
        return full
    h = 2.0 * math.sin(0.5 * theta) ** 2
    t1 = taus - 1.0
    d = np.sqrt(t1 * t1 + 2.0 * taus * h)
    cap = h * (2.0 - h) / (2.0 * d * (d + t1 + h))
    return np.where(taus <= 1.0 / c, full, cap)


def _cap_power_model_dtau(tau: float, theta: float) -> float:
    """Analytic tau-derivative of _cap_power_model (continuous at the
    visibility branch point)."""
    c = math.cos(theta)
    if c <= 0.0 or tau <= 1.0 / c:
        return -1.0 / (2.0 * tau * tau * math.sqrt(tau * tau - 1.0))
    d2 = tau * tau - 2.0 * tau * c + 1.0
    return -(1.0 - c) * (1.0 + c) / (2.0 * d2 * math.sqrt(d2))


def _clamp_power(p: float) -> float:
    return min(max(p, _POWER_FLOOR), 0.5 - _POWER_FLOOR)


def estimate_tau_from_rss_series(
    series: RssSeries, tau_max: float = TAU_MAX_DEFAULT
) -> float:
    """Least-squares inversion of measured cap powers to the range tau.

    Powers are clamped into (0, 1/2) first.  A single measurement inverts
    exactly through the strict monotonicity of the cap power in tau; more
    measurements are fit jointly by bracketed scalar minimization.  Raises
    EstimationError when the measurements fall below what any tau within
    [1, tau_max] can produce.
    """
    if tau_max <= 1.0:
        raise ValueError("tau_max must exceed 1")
    tau_lo = 1.0 + 1e-9
    powers = [_clamp_power(p) for p in series.powers]
    angles = list(series.angles)

    if len(powers) == 1:
        theta, p = angles[0], powers[0]
        if p >= _cap_power_model(tau_lo, theta):
            return tau_lo
        if p <= _cap_power_model(tau_max, theta):
            raise EstimationError(
                "measured power below the attainable range for tau <= tau_max"
            )
        return brentq(
            lambda t: _cap_power_model(t, theta) - p,
            tau_lo,
            tau_max,
            xtol=1e-13,
            rtol=8.9e-16,
        )

    def objective(tau):
        return sum((p - _cap_power_model(tau, th)) ** 2 for th, p in zip(angles, powers))

    # bracket around the single-angle inversion of the widest cap, falling
    # back to a global scan when that inversion is itself degenerate
    grid = np.geomspace(tau_lo, tau_max, 600)
    try:
        anchor = estimate_tau_from_rss_series(
            RssSeries((angles[0],), (powers[0],), series.sigma_p), tau_max
        )
        local = np.geomspace(max(tau_lo, anchor / 8.0), min(tau_max, anchor * 8.0), 200)
        grid = np.unique(np.concatenate([grid, local]))
    except EstimationError:
        pass
    values = np.zeros(grid.size)
    for th, p in zip(angles, powers):
        values += (p - _cap_power_model_vec(grid, th)) ** 2
    best = int(np.argmin(values))
    if best == len(grid) - 1:
        raise EstimationError(
            "measurements below the attainable range for tau <= tau_max"
        )
    if best == 0:
        return tau_lo

    def gradient(tau):
        return sum(
            -2.0 * (p - _cap_power_model(tau, th)) * _cap_power_model_dtau(tau, th)
            for th, p in zip(angles, powers)
        )

    lo, hi = grid[best - 1], grid[best + 1]
    if gradient(lo) < 0.0 < gradient(hi):
        return brentq(gradient, lo, hi, xtol=1e-13, rtol=8.9e-16)
    res = minimize_scalar(
        objective,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12 * grid[best]},
    )
    return float(res.x)


def crlb_sphere(tau: float) -> float:
    """Variance proportionality 4*tau^4*(tau^2-1) of full-cap ranging.

    Inverse-square of the cap power's tau sensitivity; zero at tau=1 where
    the power responds infinitely steeply.
    """
    if tau < 1.0:
        raise ValueError(f"tau={tau} < 1: terminal inside the sphere")
    if tau == 1.0:
        return 0.0
    return 4.0 * tau**4 * (tau * tau - 1.0)


def crlb_plane(tau: float) -> float:
    """Variance proportionality 4*(tau^2+1)^3 of on-axis disk ranging."""
    if tau < 0.0:
        raise ValueError("tau must be nonnegative")
    if tau == 0.0:
        return 4.0
    return 4.0 * (tau * tau + 1.0) ** 3


def simulate_angle_measurement(
    true_tau: float,
    radius: float,
    sigma_p: float = 0.0,
    element_count: int = 10_000,
    threshold_mult: float = 3.0,
    seed: int = 0,
) -> AngleMeasurement:
    """Detect the visibility boundary on a discretized noisy surface.

    The sphere is split into ``element_count`` equal-area cells on a
    deterministic spiral lattice; each cell reports its received power plus
    AWGN of deviation sigma_p.  Cells are grouped into equal-area polar
    rings, and the boundary estimate is the lower edge of the deepest ring
    whose mean power exceeds threshold_mult * sigma_p.  Deterministic for a
    given seed.
    """
    if true_tau <= 1.0:
        raise ValueError("true_tau must exceed 1")
    if element_count < 100:
        raise ValueError("element_count must be at least 100")
    if sigma_p < 0.0:
        raise ValueError("sigma_p must be nonnegative")
    if not radius > 0.0:
        raise ValueError("radius must be positive")

    n = int(element_count)
    i = np.arange(n)
    u = 1.0 - (2.0 * i + 1.0) / n  # area-uniform cos(theta), descending
    powers = kernels.cap_integrand_clamped(true_tau, u) / n
    if sigma_p > 0.0:
        rng = np.random.default_rng(seed)
        powers = powers + sigma_p * rng.standard_normal(n)

    n_rings = max(16, int(math.sqrt(n)))
    du = 2.0 / n_rings
    ring = np.minimum((1.0 - u) / du, n_rings - 1).astype(int)
    sums = np.bincount(ring, weights=powers, minlength=n_rings)
    counts = np.bincount(ring, minlength=n_rings)
    means = np.divide(sums, counts, out=np.zeros(n_rings), where=counts > 0)

    threshold = threshold_mult * sigma_p
    lit = np.nonzero((means > threshold) & (counts > 0))[0]
    if lit.size == 0:
        raise DetectionError("no ring rises above the detection threshold")
    deepest = int(lit[-1])
    u_edge = 1.0 - (deepest + 1) * du
    theta_edge = math.acos(max(-1.0, min(1.0, u_edge)))
    theta_hat = min(theta_edge, math.pi / 2.0)
    # resolution: polar width of the detected ring
    theta_top = math.acos(max(-1.0, min(1.0, 1.0 - deepest * du)))
    return AngleMeasurement(theta0_hat=theta_hat, sigma_theta=theta_edge - theta_top)


def simulate_rss_series(
    true_tau: float,
    theta0_hat: float,
    n_measurements: int = 3,
    sigma_p: float = 0.0,
    seed: int = 0,
) -> RssSeries:
    """Noisy cap-power series at angles theta0_hat/n for n = 1..N."""
    if true_tau <= 1.0:
        raise ValueError("true_tau must exceed 1")
    if n_measurements < 1:
        raise ValueError("need at least one measurement")
    angles = [theta0_hat / k for k in range(1, n_measurements + 1)]
    powers = np.array([_cap_power_model(true_tau, th) for th in angles])
    if sigma_p > 0.0:
        rng = np.random.default_rng(seed)
        powers = powers + sigma_p * rng.standard_normal(len(angles))
    return RssSeries(tuple(angles), tuple(float(p) for p in powers), sigma_p)
