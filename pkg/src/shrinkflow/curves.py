"""Closed immersed plane curves as cyclic polylines.

Orientation convention used everywhere in this package: a counterclockwise
convex curve has positive curvature, and the unit normal is the tangent
rotated by -90 degrees, i.e. the *outward* normal on a counterclockwise
circle.  With that choice the self-shrinking circle of radius sqrt(2)
satisfies k = (1/2)<x, n> with k = 1/sqrt(2) > 0, and the curvature vector
(the velocity of curve shortening flow) is -k*n.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCurveError, IllResolvedTurningError

MIN_NODES = 16


@dataclass(frozen=True)
class Curve:
    """Cyclic sample of a closed plane curve. Immutable after construction."""

    points: np.ndarray  # (N, 2)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DegenerateCurveError("curve points must be an (N, 2) array")
        if not np.all(np.isfinite(pts)):
            raise DegenerateCurveError("curve has non-finite coordinates")
        pts = _collapse_degenerate(pts)
        if len(pts) < MIN_NODES:
            raise DegenerateCurveError(f"curve needs >= {MIN_NODES} distinct nodes")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_nodes(self) -> int:
        return len(self.points)

    def segment_lengths(self) -> np.ndarray:
        d = np.roll(self.points, -1, axis=0) - self.points
        return np.hypot(d[:, 0], d[:, 1])

    def length(self) -> float:
        return float(self.segment_lengths().sum())

    def translated(self, v) -> "Curve":
        return Curve(self.points + np.asarray(v, dtype=float))

    def scaled(self, a: float) -> "Curve":
        return Curve(self.points * float(a))

    def rotated(self, angle: float) -> "Curve":
        c, s = np.cos(angle), np.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return Curve(self.points @ rot.T)


@dataclass(frozen=True)
class CurveFrame:
    tangent: np.ndarray        # (N, 2) unit
    normal: np.ndarray         # (N, 2) unit, outward on a CCW convex curve
    curvature: np.ndarray      # (N,) signed, exterior-angle formula
    arclength: np.ndarray      # (N,) cumulative, arclength[0] = 0
    total_length: float
    spacing: float             # mean node spacing (uniform curves: the spacing)
    exterior_angles: np.ndarray  # (N,) signed turn at each node


def _collapse_degenerate(pts: np.ndarray) -> np.ndarray:
    """Drop nodes whose segment to the predecessor is shorter than 1e-12 * length."""
    d = np.roll(pts, -1, axis=0) - pts
    seg = np.hypot(d[:, 0], d[:, 1])
    total = seg.sum()
    if total <= 0.0:
        raise DegenerateCurveError("degenerate curve")
    keep = seg > 1e-12 * total
    if not np.all(keep):
        pts = pts[np.roll(keep, 1)]  # node i survives if segment (i-1 -> i) is real
        if len(pts) == 0:
            raise DegenerateCurveError("degenerate curve")
    return pts


def sample_circle(radius: float, n: int, turns: int = 1, center=(0.0, 0.0),
                  clockwise: bool = False, phase: float = 0.0) -> Curve:
    sgn = -1.0 if clockwise else 1.0
    ang = phase + sgn * 2.0 * np.pi * turns * np.arange(n) / n
    pts = np.stack([radius * np.cos(ang), radius * np.sin(ang)], axis=1)
    return Curve(pts + np.asarray(center, dtype=float))


def sample_ellipse(a: float, b: float, n: int) -> Curve:
    ang = 2.0 * np.pi * np.arange(n) / n
    return Curve(np.stack([a * np.cos(ang), b * np.sin(ang)], axis=1))


def sample_figure_eight(n: int, scale: float = 1.0) -> Curve:
    """Lemniscate-of-Gerono polyline; turning number 0."""
    t = 2.0 * np.pi * np.arange(n) / n
    return Curve(scale * np.stack([np.sin(t), np.sin(t) * np.cos(t)], axis=1))


def resample_uniform(curve: Curve, n: int) -> Curve:
    """Place n nodes equally spaced in arclength along the closed polyline.

    Node 0 of the output coincides with node 0 of the input; all output nodes
    lie on the input polyline.
    """
    if n < MIN_NODES:
        raise DegenerateCurveError(f"resample target must be >= {MIN_NODES}")
    pts = curve.points
    seg = curve.segment_lengths()
    total = seg.sum()
    if total <= 0.0:
        raise DegenerateCurveError("degenerate curve")
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.arange(n) * (total / n)
    idx = np.searchsorted(cum, targets, side="right") - 1
    idx = np.clip(idx, 0, len(pts) - 1)
    frac = (targets - cum[idx]) / seg[idx]
    ext = np.vstack([pts, pts[:1]])
    new = ext[idx] + frac[:, None] * (ext[idx + 1] - ext[idx])
    return Curve(new)


def frame(curve: Curve) -> CurveFrame:
    """Discrete tangent/normal/curvature.

    Curvature uses the signed exterior-angle formula k_i = theta_i / h, which
    makes sum(theta_i) = 2*pi*turning exact at polyline level.
    """
    pts = curve.points
    edges = np.roll(pts, -1, axis=0) - pts           # edge i: node i -> i+1
    seg = np.hypot(edges[:, 0], edges[:, 1])
    total = float(seg.sum())
    h = total / len(pts)

    chord = np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)
    tnorm = np.hypot(chord[:, 0], chord[:, 1])
    if np.any(tnorm <= 0.0):
        raise DegenerateCurveError("tangent undefined at a node")
    tangent = chord / tnorm[:, None]
    normal = np.stack([tangent[:, 1], -tangent[:, 0]], axis=1)

    prev_e = np.roll(edges, 1, axis=0)               # edge arriving at node i
    cross = prev_e[:, 0] * edges[:, 1] - prev_e[:, 1] * edges[:, 0]
    dot = (prev_e * edges).sum(axis=1)
    angles = np.arctan2(cross, dot)
    curvature = angles / h

    arclength = np.concatenate([[0.0], np.cumsum(seg[:-1])])
    return CurveFrame(tangent=tangent, normal=normal, curvature=curvature,
                      arclength=arclength, total_length=total, spacing=h,
                      exterior_angles=angles)


def turning_number(curve: Curve) -> tuple[int, float]:
    """(rounded turning number, raw real value). Raises if the raw value is
    farther than 0.1 from an integer."""
    raw = float(frame(curve).exterior_angles.sum() / (2.0 * np.pi))
    nearest = int(np.rint(raw))
    if abs(raw - nearest) > 0.1:
        raise IllResolvedTurningError(
            f"ill-resolved turning number: raw value {raw:.6f}")
    return nearest, raw


def node_weights(curve: Curve) -> np.ndarray:
    """Trapezoid weights on the closed polyline: half the adjacent segment sum."""
    seg = curve.segment_lengths()
    return 0.5 * (seg + np.roll(seg, 1))


def gaussian_node_weight(points: np.ndarray) -> np.ndarray:
    """exp(-|x|^2 / 4) per node."""
    return np.exp(-0.25 * (points ** 2).sum(axis=1))


def weighted_inner(curve: Curve, f, g) -> float:
    """Trapezoid quadrature of the Gaussian-weighted product integral of f, g."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    w = gaussian_node_weight(curve.points) * node_weights(curve)
    return float(np.sum(f * g * w))
