"""Reflect mode: receive on one cap, re-radiate from another.

Part of the sphere faces a base station and collects its signal; a disjoint
cap faces a terminal the base station cannot reach and re-emits toward it.
Elements are equal-area lattice cells; receive cells pair with transmit
cells one to one (by closeness to their cap axis) and each pair applies a
phase shift.  Setting the shift to +2*pi*(eta_in + eta_out)/lambda cancels
the end-to-end path phase, so all pairs add coherently at the terminal:
against an uncompensated surface that is roughly an N-fold power gain.

Elements are lossless phase shifters with the cosine-projected aperture of
the receive model on both hops; no amplitude control or quantization.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import _kernels as kernels
from .errors import LayoutError, VisibilityError
from .geometry import RadioConfig, TerminalPose, visibility_angle
from .lattice import fibonacci_sphere


@dataclass(frozen=True)
class ReflectorLayout:
    """Receive/transmit caps on an equal-area element lattice.

    ``n_elements`` counts lattice cells over the whole sphere; each cell
    covers area 4*pi*R^2/n_elements.  Cap membership is by angular distance
    to the cap axis; the two caps must not share an element.
    """

    radius: float
    n_elements: int
    rx_axis: Tuple[float, float, float]
    rx_half_angle: float
    tx_axis: Tuple[float, float, float]
    tx_half_angle: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")
        if self.n_elements < 2:
            raise ValueError("need at least two lattice elements")
        for name in ("rx_half_angle", "tx_half_angle"):
            half = getattr(self, name)
            if not 0.0 < half < math.pi / 2.0:
                raise LayoutError(f"{name} must lie in (0, pi/2)")
        object.__setattr__(self, "rx_axis", _unit(self.rx_axis))
        object.__setattr__(self, "tx_axis", _unit(self.tx_axis))
        separation = math.acos(
            max(-1.0, min(1.0, float(np.dot(self.rx_axis, self.tx_axis))))
        )
        if separation < self.rx_half_angle + self.tx_half_angle:
            raise LayoutError(
                "receive and transmit caps overlap: axis separation "
                f"{separation:.4f} < {self.rx_half_angle + self.tx_half_angle:.4f}"
            )

    @property
    def element_area(self) -> float:
        return 4.0 * math.pi * self.radius**2 / self.n_elements

    def element_positions(self) -> np.ndarray:
        """Lattice cell centers in Cartesian meters, shape (n_elements, 3)."""
        return self.radius * fibonacci_sphere(self.n_elements)

    def pair_indices(self) -> Tuple[np.ndarray, np.ndarray]:
        """Paired (rx, tx) element indices, each sorted by axis closeness.

        The caps rarely hold exactly equal counts on a shared lattice, so
        the larger side drops its outermost elements; pairing k-th closest
        with k-th closest keeps the assignment symmetric under swapping the
        two caps.
        """
        unit = fibonacci_sphere(self.n_elements)
        cos_rx = unit @ np.asarray(self.rx_axis)
        cos_tx = unit @ np.asarray(self.tx_axis)
        rx = np.nonzero(cos_rx >= math.cos(self.rx_half_angle))[0]
        tx = np.nonzero(cos_tx >= math.cos(self.tx_half_angle))[0]
        if rx.size == 0 or tx.size == 0:
            raise LayoutError("a cap contains no lattice elements")
        rx = rx[np.argsort(-cos_rx[rx], kind="stable")]
        tx = tx[np.argsort(-cos_tx[tx], kind="stable")]
        n = min(rx.size, tx.size)
        return rx[:n], tx[:n]


def auto_layout(
    radius: float,
    n_elements: int,
    bs_pose: TerminalPose,
    ue_pose: TerminalPose,
    cap_fraction: float = 0.9,
    margin: float = 0.01,
) -> ReflectorLayout:
    """Caps centered on the base station and terminal directions.

    Half-angles take ``cap_fraction`` of what fits: the smaller of each
    side's visibility angle and half the axis separation less a margin.
    """
    bs_dir = bs_pose.direction
    ue_dir = ue_pose.direction
    separation = math.acos(max(-1.0, min(1.0, float(np.dot(bs_dir, ue_dir)))))
    theta_bs = visibility_angle(bs_pose.tau(radius))
    theta_ue = visibility_angle(ue_pose.tau(radius))
    room = (separation - margin) / 2.0
    if room <= 0.0:
        raise LayoutError("base station and terminal directions too close")
    rx_half = cap_fraction * min(theta_bs, room)
    tx_half = cap_fraction * min(theta_ue, room)
    return ReflectorLayout(
        radius, n_elements, tuple(bs_dir), rx_half, tuple(ue_dir), tx_half
    )


def _unit(v):
    arr = np.asarray(v, dtype=np.float64)
    n = float(np.linalg.norm(arr))
    if n == 0.0:
        raise ValueError("zero direction vector")
    return tuple(arr / n)


def _hop(points: np.ndarray, pose: TerminalPose, radius: float, area: float):
    """Distance, per-element amplitude and phase slope for one hop.

    Amplitude follows the receive model scaled by the element aperture:
    sqrt(area * cos(psi) / (4*pi*eta^2)); raises VisibilityError when any
    element faces away from the endpoint.
    """
    target = np.array([pose.x, pose.y, pose.z])
    zk = pose.distance
    diff = target[None, :] - points
    eta = np.linalg.norm(diff, axis=1)
    cos_psi = (zk * zk - eta * eta - radius * radius) / (2.0 * radius * eta)
    if np.any(cos_psi <= 0.0):
        raise VisibilityError("an element cannot see its link endpoint")
    amp = np.sqrt(area * cos_psi / (4.0 * math.pi * eta * eta))
    return eta, amp


def _link_terms(layout: ReflectorLayout, bs_pose: TerminalPose, ue_pose: TerminalPose):
    rx_idx, tx_idx = layout.pair_indices()
    points = layout.element_positions()
    area = layout.element_area
    eta_in, amp_in = _hop(points[rx_idx], bs_pose, layout.radius, area)
    eta_out, amp_out = _hop(points[tx_idx], ue_pose, layout.radius, area)
    return eta_in + eta_out, amp_in * amp_out


def design_phase_profile(
    layout: ReflectorLayout,
    bs_pose: TerminalPose,
    ue_pose: TerminalPose,
    radio: RadioConfig,
) -> np.ndarray:
    """Per-pair shifts +2*pi*(eta_in + eta_out)/lambda, wrapped to [0, 2pi).

    With exact poses every pair's end-to-end phase cancels; estimated poses
    leave a residual spread that shrinks continuously with the pose error.
    """
    path, _ = _link_terms(layout, bs_pose, ue_pose)
    return np.mod(2.0 * math.pi * path / radio.wavelength, 2.0 * math.pi)


def evaluate_reflected_power(
    layout: ReflectorLayout,
    profile: np.ndarray,
    bs_pose: TerminalPose,
    ue_pose: TerminalPose,
    radio: RadioConfig,
) -> float:
    """Power |sum_n a_n * exp(j*(chi_n - 2*pi*path_n/lambda))|^2 at the
    terminal, for true poses and a given phase profile."""
    path, amp = _link_terms(layout, bs_pose, ue_pose)
    profile = np.asarray(profile, dtype=np.float64)
    if profile.shape != path.shape:
        raise ValueError(
            f"profile has {profile.size} entries, layout pairs {path.size}"
        )
    phase = profile - 2.0 * math.pi * path / radio.wavelength
    return kernels.coherent_power(amp, phase)


def residual_phases(
    layout: ReflectorLayout,
    profile: np.ndarray,
    bs_pose: TerminalPose,
    ue_pose: TerminalPose,
    radio: RadioConfig,
) -> np.ndarray:
    """End-to-end per-pair phases wrapped to (-pi, pi]; zero when the
    profile compensates the true geometry exactly."""
    path, _ = _link_terms(layout, bs_pose, ue_pose)
    phase = np.asarray(profile) - 2.0 * math.pi * path / radio.wavelength
    return np.pi - np.mod(np.pi - phase, 2.0 * math.pi)
