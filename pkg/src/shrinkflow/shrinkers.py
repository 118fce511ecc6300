"""Exact closed shrinkers: multiply-covered circles and Abresch-Langer curves.

The curvature of a closed plane shrinker, written as a function of the tangent
angle theta, satisfies  k'' + k - 1/(2k) = 0.  Multiplying by k' and
integrating gives the conserved quantity

    E = k'^2 + k^2 - log k,

whose potential k^2 - log k has its minimum at k = 1/sqrt(2), the circle value.
A closed non-circular shrinker with turning number m and 2n curvature critical
points exists iff gcd(m, n) = 1 and 1/2 < m/n < sqrt(2)/2; it is found by
shooting on E so that the angle between consecutive curvature extrema equals
pi*m/n, then extending one lobe by reflection and integrating the unit tangent
(cos theta, sin theta)/k(theta) to recover the immersion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .config import LabConfig, default_config
from .curves import Curve
from .errors import (NoSuchShrinkerError, ProfileClosureError, ShootingError,
                     SubcriticalEnergyError)

CIRCLE_K = 1.0 / math.sqrt(2.0)
ENERGY_MIN = CIRCLE_K ** 2 - math.log(CIRCLE_K)  # = 1/2 + (1/2) log 2


def profile_energy(k, k_theta):
    """First integral along the curvature profile."""
    return np.asarray(k_theta) ** 2 + np.asarray(k) ** 2 - np.log(np.asarray(k))


def _potential(k):
    return k * k - math.log(k)


def curvature_bounds(energy: float) -> tuple[float, float]:
    """(k_min, k_max) roots of k^2 - log k = E on either side of 1/sqrt(2)."""
    if energy <= ENERGY_MIN:
        raise SubcriticalEnergyError(
            f"subcritical energy: E = {energy} <= E_min = {ENERGY_MIN}")
    hi = max(2.0, math.sqrt(energy) + 1.0)
    while _potential(hi) < energy:
        hi *= 2.0
    k_max = brentq(lambda k: _potential(k) - energy, CIRCLE_K, hi, xtol=1e-15)
    lo = min(0.25, CIRCLE_K / 2)
    while _potential(lo) < energy:
        lo *= 0.5
    k_min = brentq(lambda k: _potential(k) - energy, lo, CIRCLE_K, xtol=1e-15)
    return float(k_min), float(k_max)


def _ode(_theta, y):
    k, p = y
    return (p, 0.5 / k - k)


@dataclass(frozen=True)
class ProfileArc:
    """Samples of the curvature ODE solution k(theta)."""
    theta: np.ndarray
    k: np.ndarray
    k_theta: np.ndarray
    energy: float


def integrate_profile(energy: float, theta_span: float, step: float) -> ProfileArc:
    """Integrate the curvature ODE from k(0) = k_max, k'(0) = 0.

    Adaptive RK45 at tight tolerance; samples every `step` in theta.
    """
    _, k_max = curvature_bounds(energy)
    thetas = np.arange(0.0, theta_span + 0.5 * step, step)
    sol = solve_ivp(_ode, (0.0, thetas[-1]), (k_max, 0.0), method="RK45",
                    rtol=1e-12, atol=1e-14, dense_output=True)
    if not sol.success:
        raise ShootingError(f"profile integration failed: {sol.message}")
    vals = sol.sol(thetas)
    return ProfileArc(theta=thetas, k=vals[0], k_theta=vals[1], energy=energy)


def lobe_angle(energy: float) -> float:
    """Angle between consecutive zeros of k' (one curvature lobe).

    Detected by integrating from the curvature maximum until k' returns to 0,
    which happens at the curvature minimum.
    """
    _, k_max = curvature_bounds(energy)

    def hit_extremum(_theta, y):
        return y[1]

    hit_extremum.terminal = True
    hit_extremum.direction = 1.0   # k' crosses upward at the minimum

    sol = solve_ivp(_ode, (0.0, 4.0 * math.pi), (k_max, 0.0), method="RK45",
                    rtol=1e-12, atol=1e-14, events=hit_extremum)
    if not sol.success or len(sol.t_events[0]) == 0:
        raise ShootingError(f"no curvature extremum found for E = {energy}")
    return float(sol.t_events[0][0])


def periodic_antiderivative(values: np.ndarray, period: float):
    """Cumulative integral at the sample nodes of a smooth periodic function.

    values are samples on the uniform grid theta_j = j*period/M, j = 0..M-1.
    Returns (antiderivative at nodes with F(0) = 0, total integral over the
    period). Spectrally accurate via the Fourier series.
    """
    values = np.asarray(values, dtype=float)
    m = len(values)
    coef = np.fft.fft(values)
    freq = np.fft.fftfreq(m, d=1.0 / m)          # integer wave numbers
    omega = 2.0 * np.pi * freq / period
    mean = coef[0].real / m
    with np.errstate(divide="ignore", invalid="ignore"):
        cint = np.where(freq == 0, 0.0, coef / (1j * omega))
    periodic_part = np.fft.ifft(cint).real
    theta = np.arange(m) * (period / m)
    anti = mean * theta + periodic_part - periodic_part[0]
    return anti, mean * period


@dataclass
class Reconstruction:
    curve: Curve
    points: np.ndarray          # dense theta-grid positions after recentering
    closure_gap: float
    residual_sup: float
    center_shift: np.ndarray
    length: float


def reconstruct_from_k(k_of_theta: np.ndarray, m: int) -> Reconstruction:
    """Rebuild the immersion from curvature samples on the uniform theta grid
    over [0, 2*pi*m).

    x(theta) integrates the unit tangent (cos, sin)/k; the curve is then
    recentered by least squares on the shrinker relation k = (1/2)<x - c, n>.
    """
    k = np.asarray(k_of_theta, dtype=float)
    if np.any(k <= 0.0):
        raise ProfileClosureError("curvature samples must be positive")
    big = len(k)
    period = 2.0 * math.pi * m
    theta = np.arange(big) * (period / big)

    length = float(np.mean(1.0 / k) * period)
    fx, gap_x = periodic_antiderivative(np.cos(theta) / k, period)
    fy, gap_y = periodic_antiderivative(np.sin(theta) / k, period)
    gap = math.hypot(gap_x, gap_y)
    if gap > 1e-5 * length:
        raise ProfileClosureError(
            f"profile does not close: gap {gap:.3e} vs length {length:.3e}")

    pts = np.stack([fx, fy], axis=1)
    normal = np.stack([np.sin(theta), -np.cos(theta)], axis=1)
    mismatch = k - 0.5 * (pts * normal).sum(axis=1)
    gram = normal.T @ normal
    rhs = -2.0 * normal.T @ mismatch
    shift = np.linalg.solve(gram, rhs)
    pts = pts - shift
    residual = float(np.max(np.abs(k - 0.5 * (pts * normal).sum(axis=1))))
    return Reconstruction(curve=Curve(pts), points=pts, closure_gap=gap,
                          residual_sup=residual, center_shift=shift,
                          length=length)


@dataclass
class ShrinkerProfile:
    """A constructed closed shrinker with node-aligned analytic geometry.

    `curve` has n_nodes uniform-arclength nodes; the *_nodes arrays carry the
    analytic curvature, tangent angle and outward normal at those nodes, which
    downstream spectral/variational code uses instead of discrete frames.
    """
    kind: str                   # "circle" | "abresch_langer"
    m: int
    n: int | None
    energy: float | None
    cover: int
    length: float
    closure_gap: float
    residual_sup: float
    curve: Curve
    theta_dense: np.ndarray = field(repr=False)
    k_dense: np.ndarray = field(repr=False)
    ktheta_dense: np.ndarray = field(repr=False)
    points_dense: np.ndarray = field(repr=False)
    theta_nodes: np.ndarray = field(repr=False)
    k_nodes: np.ndarray = field(repr=False)
    ktheta_nodes: np.ndarray = field(repr=False)
    normal_nodes: np.ndarray = field(repr=False)
    tangent_nodes: np.ndarray = field(repr=False)
    spacing: float = 0.0

    @property
    def turning(self) -> int:
        return self.m

    def kind_label(self) -> str:
        if self.kind == "circle":
            return f"circle({self.m})"
        base = f"abresch_langer({self.m // self.cover},{self.n // self.cover})"
        return base if self.cover == 1 else f"{self.cover}x{base}"

    def at_resolution(self, m_nodes: int) -> dict:
        """Geometry arrays at m_nodes uniform-arclength nodes."""
        if self.kind == "circle":
            return _circle_node_data(self.m, m_nodes)
        return _al_node_data(self.theta_dense, self.k_dense, self.ktheta_dense,
                             self.points_dense, self.m, m_nodes)

    def gaussian_area_unit(self) -> float:
        """F at center 0, scale 1 by spectrally-accurate theta quadrature."""
        ds = (2.0 * math.pi * self.m * self.cover) / len(self.k_dense) / self.k_dense
        w = np.exp(-0.25 * (self.points_dense ** 2).sum(axis=1))
        return float((w * ds).sum() / math.sqrt(4.0 * math.pi))


def _circle_node_data(m: int, big: int) -> dict:
    length = 2.0 * math.pi * m * math.sqrt(2.0)
    phi = 2.0 * math.pi * m * np.arange(big) / big
    pts = math.sqrt(2.0) * np.stack([np.cos(phi), np.sin(phi)], axis=1)
    theta = phi + 0.5 * math.pi
    return {
        "points": pts,
        "k": np.full(big, CIRCLE_K),
        "ktheta": np.zeros(big),
        "theta": theta,
        "normal": np.stack([np.sin(theta), -np.cos(theta)], axis=1),
        "tangent": np.stack([np.cos(theta), np.sin(theta)], axis=1),
        "h": length / big,
        "length": length,
    }


def _al_node_data(theta_dense, k_dense, ktheta_dense, points_dense,
                  m: int, big: int) -> dict:
    period = 2.0 * math.pi * m
    theta_ext = np.concatenate([theta_dense, [period]])

    def periodic_spline(vals):
        return CubicSpline(theta_ext, np.concatenate([vals, [vals[0]]]),
                           bc_type="periodic")

    sp_k = periodic_spline(k_dense)
    sp_kt = periodic_spline(ktheta_dense)
    sp_x = periodic_spline(points_dense[:, 0])
    sp_y = periodic_spline(points_dense[:, 1])

    s_dense, total = periodic_antiderivative(1.0 / k_dense, period)
    slope = total / period
    sp_s = periodic_spline(s_dense - slope * theta_dense)

    def arclength_of(th):
        return sp_s(np.mod(th, period)) + slope * th

    targets = np.arange(big) * (total / big)
    # s(theta) is strictly increasing; seed the Newton polish from monotone
    # interpolation on the dense grid so every node stays in its own cell.
    s_ext = np.concatenate([s_dense, [total]])
    th_ext = np.concatenate([theta_dense, [period]])
    th = np.interp(targets, s_ext, th_ext)
    for _ in range(4):
        th = th - (arclength_of(th) - targets) * sp_k(np.mod(th, period))
    thw = np.mod(th, period)
    pts = np.stack([sp_x(thw), sp_y(thw)], axis=1)
    return {
        "points": pts,
        "k": sp_k(thw),
        "ktheta": sp_kt(thw),
        "theta": th,
        "normal": np.stack([np.sin(th), -np.cos(th)], axis=1),
        "tangent": np.stack([np.cos(th), np.sin(th)], axis=1),
        "h": total / big,
        "length": total,
    }


def _profile_from_node_data(kind, m, n, energy, cover, gap, residual,
                            theta_dense, k_dense, ktheta_dense, points_dense,
                            data) -> ShrinkerProfile:
    return ShrinkerProfile(
        kind=kind, m=m, n=n, energy=energy, cover=cover,
        length=data["length"], closure_gap=gap, residual_sup=residual,
        curve=Curve(data["points"]),
        theta_dense=theta_dense, k_dense=k_dense, ktheta_dense=ktheta_dense,
        points_dense=points_dense,
        theta_nodes=data["theta"], k_nodes=data["k"],
        ktheta_nodes=data["ktheta"], normal_nodes=data["normal"],
        tangent_nodes=data["tangent"], spacing=data["h"])


def circle_shrinker(m: int, n_nodes: int = 512) -> ShrinkerProfile:
    """The m-covered circle of radius sqrt(2)."""
    if m < 1:
        raise NoSuchShrinkerError("circle multiplicity must be >= 1")
    dense = _circle_node_data(m, 4096)
    data = _circle_node_data(m, n_nodes)
    return _profile_from_node_data(
        "circle", m, None, None, 1, 0.0, 0.0,
        dense["theta"] - 0.5 * math.pi, dense["k"], dense["ktheta"],
        dense["points"], data)


def admissible(m: int, n: int) -> bool:
    return math.gcd(m, n) == 1 and 0.5 < m / n < math.sqrt(2.0) / 2.0


def shoot_energy(m: int, n: int, cfg: LabConfig | None = None) -> float:
    """Find E such that the lobe angle equals pi*m/n."""
    cfg = cfg or default_config()
    target = math.pi * m / n
    e_lo = ENERGY_MIN + 1e-9
    f_lo = lobe_angle(e_lo) - target
    if f_lo <= 0.0:
        raise ShootingError(
            f"lobe angle at E_min side already below target {target}")
    e_hi, f_hi, trace = e_lo, f_lo, []
    for j in range(40):
        e_hi = ENERGY_MIN + 0.5 * (4.0 ** j) * 1e-3
        f_hi = lobe_angle(e_hi) - target
        trace.append((e_hi, f_hi + target))
        if f_hi < 0.0:
            break
    if f_hi >= 0.0:
        raise ShootingError(f"shooting non-bracketing; scan trace: {trace}")
    energy = brentq(lambda e: lobe_angle(e) - target, e_lo, e_hi,
                    xtol=1e-14, rtol=8.9e-16, maxiter=200)
    achieved = lobe_angle(energy)
    if abs(achieved - target) > cfg.shoot_angle_tol:
        raise ShootingError(
            f"shooting stalled: |lobe - target| = {abs(achieved - target):.2e}; "
            f"scan trace: {trace}")
    return float(energy)


def abresch_langer(m: int, n: int, n_nodes: int = 1024,
                   cfg: LabConfig | None = None) -> ShrinkerProfile:
    """Construct the closed shrinker with turning number m and 2n curvature
    critical points."""
    cfg = cfg or default_config()
    if not admissible(m, n):
        raise NoSuchShrinkerError(
            f"no such shrinker: need gcd(m,n)=1 and 1/2 < m/n < sqrt(2)/2, "
            f"got m/n = {m}/{n}")
    energy = shoot_energy(m, n, cfg)
    lobe = math.pi * m / n

    # High-energy profiles have large k_max/k_min contrast; 1/k then needs a
    # denser grid for the Fourier reconstruction to stay spectrally clean.
    k_min, k_max = curvature_bounds(energy)
    contrast = int(math.ceil(6.0 * k_max / k_min))
    per_lobe = max(64, int(math.ceil(cfg.profile_dense_nodes / (2 * n))), contrast)
    big = 2 * n * per_lobe
    sol = solve_ivp(_ode, (0.0, lobe), (k_max, 0.0), method="RK45",
                    rtol=1e-12, atol=1e-14, dense_output=True)
    loc = np.linspace(0.0, lobe, per_lobe + 1)
    vals = sol.sol(loc)
    k_lobe, p_lobe = vals[0], vals[1]

    k_dense = np.empty(big)
    p_dense = np.empty(big)
    idx = np.arange(per_lobe)
    for ell in range(2 * n):
        sl = slice(ell * per_lobe, (ell + 1) * per_lobe)
        if ell % 2 == 0:
            k_dense[sl] = k_lobe[idx]
            p_dense[sl] = p_lobe[idx]
        else:
            k_dense[sl] = k_lobe[per_lobe - idx]
            p_dense[sl] = -p_lobe[per_lobe - idx]

    drift = np.max(np.abs(profile_energy(k_dense, p_dense) - energy))
    if drift > 1e-8 * abs(energy):
        raise ShootingError(f"energy drift {drift:.2e} on assembled profile")

    rec = reconstruct_from_k(k_dense, m)
    if rec.residual_sup > 1e-6:
        raise ShootingError(
            f"shrinker residual {rec.residual_sup:.2e} exceeds 1e-6")

    theta_dense = np.arange(big) * (2.0 * math.pi * m / big)
    data = _al_node_data(theta_dense, k_dense, p_dense, rec.points, m, n_nodes)
    return _profile_from_node_data(
        "abresch_langer", m, n, energy, 1, rec.closure_gap, rec.residual_sup,
        theta_dense, k_dense, p_dense, rec.points, data)


def covered(profile: ShrinkerProfile, times: int) -> ShrinkerProfile:
    """Traverse an Abresch-Langer profile `times` times (turning m*times)."""
    if profile.kind != "abresch_langer" or times < 2:
        raise NoSuchShrinkerError("covering applies to AL profiles, times >= 2")
    big = len(profile.theta_dense)
    period = 2.0 * math.pi * profile.m
    shifts = np.arange(times) * period
    theta_dense = np.concatenate([profile.theta_dense + s for s in shifts])
    tile = lambda a: np.concatenate([a] * times)
    pts_dense = np.vstack([profile.points_dense] * times)
    curve_pts = np.vstack([profile.curve.points] * times)
    return ShrinkerProfile(
        kind="abresch_langer", m=profile.m * times, n=profile.n * times,
        energy=profile.energy, cover=times,
        length=profile.length * times, closure_gap=profile.closure_gap,
        residual_sup=profile.residual_sup, curve=Curve(curve_pts),
        theta_dense=theta_dense, k_dense=tile(profile.k_dense),
        ktheta_dense=tile(profile.ktheta_dense), points_dense=pts_dense,
        theta_nodes=np.concatenate([profile.theta_nodes + s for s in shifts]),
        k_nodes=tile(profile.k_nodes), ktheta_nodes=tile(profile.ktheta_nodes),
        normal_nodes=np.vstack([profile.normal_nodes] * times),
        tangent_nodes=np.vstack([profile.tangent_nodes] * times),
        spacing=profile.spacing)


def enumerate_closed_shrinker_kinds(turning: int) -> list[tuple]:
    """All closed shrinkers with the given turning number, as kind tuples
    ("circle", m) or ("abresch_langer", p, q, cover)."""
    kinds: list[tuple] = [("circle", turning)]
    for cover in range(1, turning + 1):
        if turning % cover != 0:
            continue
        p = turning // cover
        lo = int(math.floor(math.sqrt(2.0) * p)) + 1
        for q in range(lo, 2 * p):
            if admissible(p, q):
                kinds.append(("abresch_langer", p, q, cover))
    return kinds
