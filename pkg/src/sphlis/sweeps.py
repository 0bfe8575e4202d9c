"""Experiment sweeps: deterministic CSV emitters for every model surface.

Each runner takes a SweepSpec and returns a SweepResult holding metadata
lines, a fixed column header, data rows, and optional footer notes; the
CSV writer renders floats at 17 significant digits so a rerun of the same
spec is byte-identical and downstream plots lose nothing.
"""

import math
from dataclasses import dataclass, field, fields
from typing import List, Optional

import numpy as np

from . import __version__, oracle, positioning, reflector, rss
from ._kernels import cap_integrand_clamped
from .errors import DetectionError, EstimationError
from .geometry import RadioConfig, TerminalPose, visibility_angle

EXPERIMENTS = (
    "rss-sweep",
    "gamma-sweep",
    "crlb-sweep",
    "position-sim",
    "reflector-sim",
    "field-map",
)


@dataclass(frozen=True)
class SweepSpec:
    """Parameter grid and knobs for one experiment run."""

    experiment: str
    zk: float = 4.0
    r_min: float = 0.1
    r_max: float = 2.0
    points: int = 50
    log_spacing: bool = False
    seed: int = 0
    sigma: float = 0.0
    elements: int = 1000
    trials: int = 50
    series_n: int = 3
    threshold_mult: float = 3.0
    planar_radius_scale: float = rss.ROOT2
    wavelength: float = 0.1
    radius: float = 1.0
    cap_separation: Optional[float] = None
    cap_half_angle: Optional[float] = None
    out: Optional[str] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.points < 1:
            raise ValueError("points must be >= 1")
        if self.points == 1:
            if self.r_min != self.r_max:
                raise ValueError("a single-point sweep needs r_min == r_max")
        elif not self.r_min < self.r_max:
            raise ValueError("r_min must be below r_max")
        if not self.r_min > 0.0:
            raise ValueError("r_min must be positive")
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.series_n < 1:
            raise ValueError("series_n must be >= 1")
        if not self.wavelength > 0.0:
            raise ValueError("wavelength must be positive")
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")
        if not self.planar_radius_scale > 0.0:
            raise ValueError("planar_radius_scale must be positive")


@dataclass
class SweepResult:
    experiment: str
    metadata: List[str]
    header: List[str]
    rows: List[list]
    footer: List[str] = field(default_factory=list)


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(result: SweepResult, stream) -> None:
    for line in result.metadata:
        stream.write(f"# {line}\n")
    stream.write(",".join(result.header) + "\n")
    for row in result.rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")
    for line in result.footer:
        stream.write(f"# {line}\n")


def _metadata(spec: SweepSpec) -> List[str]:
    lines = [f"sphlis {__version__} {spec.experiment}"]
    for f in fields(spec):
        value = getattr(spec, f.name)
        if value is None or f.name in ("experiment", "out"):
            continue
        lines.append(f"{f.name} = {_fmt(value)}")
    return lines


def _radius_grid(spec: SweepSpec) -> np.ndarray:
    if spec.points == 1:
        return np.array([spec.r_min])
    if spec.log_spacing:
        return np.geomspace(spec.r_min, spec.r_max, spec.points)
    return np.linspace(spec.r_min, spec.r_max, spec.points)


def _check_sphere_range(spec: SweepSpec) -> None:
    if spec.zk / spec.r_max < 1.0:
        raise ValueError(
            "zk/r_max below 1: the terminal would sit inside the sphere"
        )


def _trial_seed(spec_seed: int, *path) -> int:
    return int(np.random.SeedSequence([spec_seed, *path]).generate_state(1)[0])


def run_rss_sweep(spec: SweepSpec) -> SweepResult:
    """Spherical vs planar received power as the radius grows."""
    _check_sphere_range(spec)
    rows = []
    scale = spec.planar_radius_scale
    for r in _radius_grid(spec):
        tau = spec.zk / r
        p_sp = rss.rss_sphere_full(tau)
        p_sp_oracle = oracle.integrate_sphere_power(tau, visibility_angle(tau)).value
        tau_pl = spec.zk / (scale * r)
        approx_avg = _disk_approx_avg(tau_pl)
        exact_avg = oracle.integrate_disk_power_theta_avg(tau_pl).value
        gap = abs(approx_avg - exact_avg) / exact_avg
        rows.append([r, tau, p_sp, p_sp_oracle, approx_avg, exact_avg, gap])
    return SweepResult(
        spec.experiment,
        _metadata(spec),
        [
            "R",
            "tau",
            "P_sp_closed",
            "P_sp_oracle",
            "P_pl_approx_avg",
            "P_pl_exact_avg",
            "rel_gap_approx",
        ],
        rows,
    )


def _disk_approx_avg(tau_pl: float) -> float:
    budget = oracle._Budget(100_000)

    def f(thetas):
        return np.array([rss.rss_disk_approx(tau_pl, t) for t in thetas])

    value, _ = oracle._adaptive_gk(f, 0.0, math.pi / 2.0 - 1e-15, 1e-14, 1e-12, budget)
    return value * 2.0 / math.pi


def run_gamma_sweep(spec: SweepSpec) -> SweepResult:
    """Closed-form vs numeric sphere/disk power ratio."""
    _check_sphere_range(spec)
    rows = []
    for r in _radius_grid(spec):
        tau = spec.zk / r
        rows.append(
            [
                tau,
                rss.gamma_ratio(tau, spec.planar_radius_scale),
                oracle.gamma_ratio_numeric(tau, spec.planar_radius_scale),
            ]
        )
    s = spec.planar_radius_scale
    taus = [row[0] for row in rows]
    top = int(np.argmax(taus))
    footer = [
        f"largest tau swept: tau = {_fmt(taus[top])}, "
        f"gamma_closed = {_fmt(rows[top][1])}, gamma_numeric = {_fmt(rows[top][2])}",
        f"closed-form large-tau limit pi/(2*s^2) = {_fmt(math.pi / (2.0 * s * s))} "
        f"for planar_radius_scale s = {_fmt(s)}",
        f"equal-radius (s=1) large-tau limit pi/2 = {_fmt(math.pi / 2.0)}",
    ]
    return SweepResult(
        spec.experiment,
        _metadata(spec),
        ["tau", "gamma_closed", "gamma_numeric"],
        rows,
        footer,
    )


def run_crlb_sweep(spec: SweepSpec) -> SweepResult:
    """Ranging variance factors against the radius, with local slopes."""
    _check_sphere_range(spec)
    grid = _radius_grid(spec)
    taus = spec.zk / grid
    sp = np.array([positioning.crlb_sphere(t) for t in taus])
    pl = np.array([positioning.crlb_plane(t) for t in taus])
    slope_sp = _loglog_slopes(grid, sp)
    slope_pl = _loglog_slopes(grid, pl)
    rows = [
        [grid[i], taus[i], sp[i], pl[i], slope_sp[i], slope_pl[i]]
        for i in range(grid.size)
    ]
    return SweepResult(
        spec.experiment,
        _metadata(spec),
        ["R", "tau", "crlb_sp_factor", "crlb_pl_factor", "slope_sp", "slope_pl"],
        rows,
    )


def _loglog_slopes(x, y) -> np.ndarray:
    if x.size == 1:
        return np.array([math.nan])
    lx = np.log(x)
    with np.errstate(divide="ignore"):
        ly = np.log(y)
    return np.gradient(ly, lx)


def run_position_sim(spec: SweepSpec) -> SweepResult:
    """Monte Carlo ranging trials with per-trial and summary rows."""
    _check_sphere_range(spec)
    header = [
        "kind",
        "R",
        "tau",
        "trial",
        "theta0_hat",
        "z_hat_angle",
        "tau_hat_series",
        "err_z_angle",
        "err_tau_series",
        "mse_z_angle",
        "mse_tau_series",
    ]
    nan = math.nan
    rows = []
    for i_r, r in enumerate(_radius_grid(spec)):
        tau = spec.zk / r
        if tau <= 1.0:
            raise ValueError("position-sim needs zk strictly above every radius")
        z_errs, tau_errs = [], []
        for trial in range(spec.trials):
            seed_angle = _trial_seed(spec.seed, i_r, trial, 0)
            seed_series = _trial_seed(spec.seed, i_r, trial, 1)
            try:
                meas = positioning.simulate_angle_measurement(
                    tau,
                    r,
                    sigma_p=spec.sigma,
                    element_count=spec.elements,
                    threshold_mult=spec.threshold_mult,
                    seed=seed_angle,
                )
                z_hat = positioning.estimate_z_from_angle(meas, r)
                series = positioning.simulate_rss_series(
                    tau, meas.theta0_hat, spec.series_n, spec.sigma, seed_series
                )
                tau_hat = positioning.estimate_tau_from_rss_series(series)
            except (DetectionError, EstimationError, ValueError):
                rows.append(["trial", r, tau, trial] + [nan] * 7)
                continue
            err_z = z_hat - spec.zk
            err_tau = tau_hat - tau
            z_errs.append(err_z)
            tau_errs.append(err_tau)
            rows.append(
                [
                    "trial",
                    r,
                    tau,
                    trial,
                    meas.theta0_hat,
                    z_hat,
                    tau_hat,
                    err_z,
                    err_tau,
                    nan,
                    nan,
                ]
            )
        mse_z = float(np.mean(np.square(z_errs))) if z_errs else nan
        mse_tau = float(np.mean(np.square(tau_errs))) if tau_errs else nan
        rows.append(
            ["summary", r, tau, -1, nan, nan, nan, nan, nan, mse_z, mse_tau]
        )
    return SweepResult(spec.experiment, _metadata(spec), header, rows)


def _reflector_geometry(spec: SweepSpec, seed: int):
    """One seeded reflect-mode geometry sized for ~spec.elements pairs."""
    rng = np.random.default_rng(seed)
    radius = spec.radius
    if spec.cap_separation is None:
        while True:
            a = rng.standard_normal(3)
            a /= np.linalg.norm(a)
            b = rng.standard_normal(3)
            b /= np.linalg.norm(b)
            separation = math.acos(max(-1.0, min(1.0, float(a @ b))))
            if separation > 1.2:
                break
    else:
        separation = spec.cap_separation
        a = np.array([0.0, 0.0, 1.0])
        b = np.array([math.sin(separation), 0.0, math.cos(separation)])
    tau_bs = rng.uniform(2.0, 6.0)
    tau_ue = rng.uniform(2.0, 6.0)
    bs = TerminalPose.from_xyz(*(tau_bs * radius * a))
    ue = TerminalPose.from_xyz(*(tau_ue * radius * b))
    if spec.cap_half_angle is not None:
        half = spec.cap_half_angle
        n_total = max(2, int(round(2.0 * spec.elements / (1.0 - math.cos(half)))))
        layout = reflector.ReflectorLayout(
            radius, n_total, tuple(a), half, tuple(b), half
        )
    else:
        probe = reflector.auto_layout(radius, 1000, bs, ue)
        half = min(probe.rx_half_angle, probe.tx_half_angle)
        n_total = max(2, int(round(2.0 * spec.elements / (1.0 - math.cos(half)))))
        layout = reflector.auto_layout(radius, n_total, bs, ue)
    return layout, bs, ue


def run_reflector_sim(spec: SweepSpec) -> SweepResult:
    """Compensated vs uncompensated reflected power over seeded geometries."""
    radio = RadioConfig(wavelength=spec.wavelength)
    rows = []
    for trial in range(spec.trials):
        seed = _trial_seed(spec.seed, trial)
        layout, bs, ue = _reflector_geometry(spec, seed)
        profile = reflector.design_phase_profile(layout, bs, ue, radio)
        p_comp = reflector.evaluate_reflected_power(layout, profile, bs, ue, radio)
        p_unc = reflector.evaluate_reflected_power(
            layout, np.zeros_like(profile), bs, ue, radio
        )
        rows.append([trial, seed, profile.size, p_comp, p_unc, p_comp / p_unc])
    comp = np.array([row[3] for row in rows])
    unc = np.array([row[4] for row in rows])
    pairs = np.array([row[2] for row in rows])
    footer = [
        f"mean compensated / mean uncompensated = {_fmt(comp.mean() / unc.mean())}",
        f"mean pair count = {_fmt(pairs.mean())}",
    ]
    return SweepResult(
        spec.experiment,
        _metadata(spec),
        [
            "trial",
            "seed",
            "n_pairs",
            "power_compensated",
            "power_uncompensated",
            "ratio",
        ],
        rows,
        footer,
    )


def run_field_map(spec: SweepSpec) -> SweepResult:
    """Power density and phase over the full sphere for one terminal."""
    tau = spec.zk / spec.radius
    if tau < 1.0:
        raise ValueError("zk must be at least the sphere radius")
    thetas = np.linspace(0.0, math.pi, spec.points)
    phis = np.linspace(0.0, 2.0 * math.pi, 2 * spec.points, endpoint=False)
    r2 = spec.radius * spec.radius
    rows = []
    for theta in thetas:
        mag_sq = cap_integrand_clamped(tau, math.cos(theta)) / (4.0 * math.pi * r2)
        eta = spec.radius * math.sqrt(1.0 - 2.0 * tau * math.cos(theta) + tau * tau)
        phase = (-2.0 * math.pi * eta / spec.wavelength) % (2.0 * math.pi)
        for phi in phis:
            rows.append([theta, phi, mag_sq, phase])
    return SweepResult(
        spec.experiment,
        _metadata(spec),
        ["theta", "phi", "magnitude_sq", "phase"],
        rows,
    )


_RUNNERS = {
    "rss-sweep": run_rss_sweep,
    "gamma-sweep": run_gamma_sweep,
    "crlb-sweep": run_crlb_sweep,
    "position-sim": run_position_sim,
    "reflector-sim": run_reflector_sim,
    "field-map": run_field_map,
}


def run(spec: SweepSpec) -> SweepResult:
    return _RUNNERS[spec.experiment](spec)
