import math

import numpy as np
import pytest

from sphlis.errors import LayoutError, VisibilityError
from sphlis.geometry import RadioConfig, TerminalPose
from sphlis.lattice import fibonacci_sphere
from sphlis.reflector import (
    ReflectorLayout,
    auto_layout,
    design_phase_profile,
    evaluate_reflected_power,
    residual_phases,
)

RADIO = RadioConfig(wavelength=0.05)


def standard_setup(n_elements=20_000, radius=1.0):
    bs = TerminalPose.from_xyz(0.0, 0.6, 3.2)
    ue = TerminalPose.from_xyz(2.4, -1.1, -2.2)
    layout = auto_layout(radius, n_elements, bs, ue)
    return layout, bs, ue


class TestLattice:
    def test_unit_norm(self):
        pts = fibonacci_sphere(5000)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_area_uniform_bands(self):
        # equal-area z bands should hold nearly equal point counts
        pts = fibonacci_sphere(10_000)
        counts, _ = np.histogram(pts[:, 2], bins=np.linspace(-1, 1, 21))
        assert counts.min() >= 480 and counts.max() <= 520

    def test_validation(self):
        with pytest.raises(ValueError):
            fibonacci_sphere(0)


class TestLayout:
    def test_overlap_rejected(self):
        with pytest.raises(LayoutError):
            ReflectorLayout(1.0, 1000, (0.0, 0.0, 1.0), 0.4, (0.0, 0.5, 0.9), 0.4)

    def test_half_angle_range(self):
        with pytest.raises(LayoutError):
            ReflectorLayout(1.0, 1000, (0.0, 0.0, 1.0), 0.0, (0.0, 0.0, -1.0), 0.4)

    def test_pairs_symmetric_under_swap(self):
        layout, bs, ue = standard_setup()
        swapped = ReflectorLayout(
            layout.radius,
            layout.n_elements,
            layout.tx_axis,
            layout.tx_half_angle,
            layout.rx_axis,
            layout.rx_half_angle,
        )
        rx, tx = layout.pair_indices()
        rx2, tx2 = swapped.pair_indices()
        assert np.array_equal(rx, tx2) and np.array_equal(tx, rx2)

    def test_element_area_totals_sphere(self):
        layout, _, _ = standard_setup()
        assert layout.element_area * layout.n_elements == pytest.approx(
            4.0 * math.pi * layout.radius**2, rel=1e-12
        )

    def test_auto_layout_too_close(self):
        bs = TerminalPose.on_axis(3.0)
        ue = TerminalPose.from_xyz(0.0, 0.01, 3.0)
        with pytest.raises(LayoutError):
            auto_layout(1.0, 1000, bs, ue)


class TestPhaseDesign:
    def test_exact_poses_cancel_phases(self):
        layout, bs, ue = standard_setup()
        profile = design_phase_profile(layout, bs, ue, RADIO)
        res = residual_phases(layout, profile, bs, ue, RADIO)
        assert np.abs(res).max() < 1e-9

    def test_single_pair_power_equals_uncompensated(self):
        # shrink the caps until exactly one pair remains: phase cannot
        # change a single term's magnitude
        bs = TerminalPose.on_axis(4.0)
        ue = TerminalPose.from_xyz(0.0, 0.0, -4.0)
        layout = ReflectorLayout(
            1.0, 4000, (0.0, 0.0, 1.0), 0.035, (0.0, 0.0, -1.0), 0.035
        )
        profile = design_phase_profile(layout, bs, ue, RADIO)
        assert profile.size == 1
        comp = evaluate_reflected_power(layout, profile, bs, ue, RADIO)
        unc = evaluate_reflected_power(layout, np.zeros(1), bs, ue, RADIO)
        assert comp == pytest.approx(unc, rel=1e-12)

    def test_pose_error_residual_shrinks(self):
        layout, bs, ue = standard_setup(4000)
        spreads = []
        for delta in (0.2, 0.05, 0.0125, 0.0):
            ue_est = TerminalPose.from_xyz(ue.x, ue.y, ue.z + delta)
            profile = design_phase_profile(layout, bs, ue_est, RADIO)
            res = residual_phases(layout, profile, bs, ue, RADIO)
            spreads.append(float(np.abs(res).max()))
        assert all(b < a for a, b in zip(spreads, spreads[1:]))
        assert spreads[-1] < 1e-9

    def test_profile_wrapped(self):
        layout, bs, ue = standard_setup(2000)
        profile = design_phase_profile(layout, bs, ue, RADIO)
        assert np.all((profile >= 0.0) & (profile < 2.0 * math.pi))


class TestReflectedPower:
    def test_compensated_is_maximum(self):
        layout, bs, ue = standard_setup(4000)
        profile = design_phase_profile(layout, bs, ue, RADIO)
        best = evaluate_reflected_power(layout, profile, bs, ue, RADIO)
        rng = np.random.default_rng(2)
        for _ in range(20):
            k = int(rng.integers(profile.size))
            delta = float(rng.uniform(1e-3, math.pi))
            perturbed = profile.copy()
            perturbed[k] = (perturbed[k] + delta) % (2.0 * math.pi)
            assert evaluate_reflected_power(layout, perturbed, bs, ue, RADIO) < best

    def test_pi_flip_strictly_decreases_everywhere(self):
        layout, bs, ue = standard_setup(3000)
        profile = design_phase_profile(layout, bs, ue, RADIO)
        best = evaluate_reflected_power(layout, profile, bs, ue, RADIO)
        for k in range(0, profile.size, 29):
            perturbed = profile.copy()
            perturbed[k] = (perturbed[k] + math.pi) % (2.0 * math.pi)
            assert evaluate_reflected_power(layout, perturbed, bs, ue, RADIO) < best

    def test_reciprocity(self):
        layout, bs, ue = standard_setup()
        swapped = ReflectorLayout(
            layout.radius,
            layout.n_elements,
            layout.tx_axis,
            layout.tx_half_angle,
            layout.rx_axis,
            layout.rx_half_angle,
        )
        p1 = evaluate_reflected_power(
            layout, design_phase_profile(layout, bs, ue, RADIO), bs, ue, RADIO
        )
        p2 = evaluate_reflected_power(
            swapped, design_phase_profile(swapped, ue, bs, RADIO), ue, bs, RADIO
        )
        assert p2 == pytest.approx(p1, rel=1e-12)

    def test_long_wavelength_limit(self):
        layout, bs, ue = standard_setup(2000)
        radio = RadioConfig(wavelength=1e9)
        profile = design_phase_profile(layout, bs, ue, radio)
        comp = evaluate_reflected_power(layout, profile, bs, ue, radio)
        unc = evaluate_reflected_power(layout, np.zeros_like(profile), bs, ue, radio)
        assert comp == pytest.approx(unc, rel=1e-6)

    def test_coherent_gain_scale(self):
        layout, bs, ue = standard_setup(30_000)
        profile = design_phase_profile(layout, bs, ue, RADIO)
        n = profile.size
        comp = evaluate_reflected_power(layout, profile, bs, ue, RADIO)
        unc = evaluate_reflected_power(layout, np.zeros_like(profile), bs, ue, RADIO)
        assert 0.05 * n < comp / unc < 20.0 * n

    def test_lattice_refinement_converges(self):
        _, bs, ue = standard_setup()
        powers = []
        for n in (8000, 16000, 32000):
            layout = auto_layout(1.0, n, bs, ue)
            profile = design_phase_profile(layout, bs, ue, RADIO)
            powers.append(evaluate_reflected_power(layout, profile, bs, ue, RADIO))
        assert abs(powers[1] - powers[0]) / powers[0] < 0.01
        assert abs(powers[2] - powers[1]) / powers[1] < 0.01

    def test_visibility_enforced(self):
        # cap wider than what the nearby endpoint can illuminate
        bs = TerminalPose.on_axis(1.05)
        ue = TerminalPose.from_xyz(0.0, 0.0, -4.0)
        layout = ReflectorLayout(
            1.0, 8000, (0.0, 0.0, 1.0), 0.8, (0.0, 0.0, -1.0), 0.8
        )
        with pytest.raises(VisibilityError):
            design_phase_profile(layout, bs, ue, RADIO)

    def test_profile_length_checked(self):
        layout, bs, ue = standard_setup(2000)
        with pytest.raises(ValueError):
            evaluate_reflected_power(layout, np.zeros(3), bs, ue, RADIO)
