"""Spectrum of the stability (Jacobi) operator of a closed plane shrinker.

The operator is L = d^2/ds^2 - (k_s/k) d/ds + k^2 + 1/2, self-adjoint in the
Gaussian-weighted L^2 space on the curve.  Eigenvalues are reported in the
"negative = unstable" convention, i.e. L u = -mu u: the curvature function
reports mu = -1, the normal components report mu = -1/2, and the Morse index
is the number of reported eigenvalues below zero.

The discrete eigenproblem comes from the weighted quadratic form
Q(f) = integral (f_s^2 - (k^2 + 1/2) f^2) w ds with w = exp(-|x|^2/4),
assembled as A = h D1' diag(w) D1 - diag((k^2+1/2) w h) against the diagonal
mass diag(w h); D1 is a 4th-order periodic first-derivative stencil (a plain
3-point form misses the 1e-3 eigenvalue target at M = 512).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import LabConfig, default_config
from .errors import ShrinkFlowError
from .shrinkers import ShrinkerProfile


def apply_stability_operator(f, k, ktheta, h):
    """Centered-difference application of L to a periodic node field.

    k_s / k equals k_theta (chain rule through ds = d theta / k).
    """
    f = np.asarray(f, dtype=float)
    fp = (np.roll(f, -1) - np.roll(f, 1)) / (2.0 * h)
    fpp = (np.roll(f, -1) - 2.0 * f + np.roll(f, 1)) / (h * h)
    return fpp - np.asarray(ktheta) * fp + (np.asarray(k) ** 2 + 0.5) * f


def apply_L(profile: ShrinkerProfile, f) -> np.ndarray:
    """Apply L on the profile's own node grid."""
    return apply_stability_operator(f, profile.k_nodes, profile.ktheta_nodes,
                                    profile.spacing)


def _circulant(col: np.ndarray) -> np.ndarray:
    m = len(col)
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    return col[idx]


def _derivative_stencil(m: int, h: float) -> np.ndarray:
    """Dense periodic 4th-order first-derivative matrix."""
    col = np.zeros(m)
    col[1] = -8.0
    col[2] = 1.0
    col[m - 1] = 8.0
    col[m - 2] = -1.0
    return _circulant(col / (12.0 * h))


def _second_difference(m: int, h: float) -> np.ndarray:
    col = np.zeros(m)
    col[0] = -2.0
    col[1] = 1.0
    col[m - 1] = 1.0
    return _circulant(col / (h * h))


# The centered 4th-order first derivative annihilates the grid checkerboard
# (its symbol vanishes at the Nyquist frequency), which would fold spurious
# low eigenvalues into the spectrum.  A second-difference penalty scaled by
# h^2 lifts those modes by ~NYQUIST_LIFT while perturbing smooth modes only
# at O(h^4).
NYQUIST_LIFT = 100.0


def count_sign_changes(values, rel_tol: float = 1e-8) -> int:
    """Cyclic sign changes, ignoring samples below rel_tol * max|values|."""
    v = np.asarray(values, dtype=float)
    amp = np.max(np.abs(v))
    if amp <= 0.0:
        return 0
    s = np.sign(v[np.abs(v) > rel_tol * amp])
    if len(s) == 0:
        return 0
    return int((s != np.roll(s, 1)).sum())


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray                  # ascending, reported convention
    eigenfunctions: np.ndarray = field(repr=False)  # columns, weighted-orthonormal
    morse_index: int = 0
    entropy_index: int = 0
    stable_span_check: dict = field(default_factory=dict)
    unstable_basis: list = field(default_factory=list, repr=False)
    weights: np.ndarray = field(default=None, repr=False)  # w_j * h quadrature
    node_data: dict = field(default_factory=dict, repr=False)
    resolution: int = 0


def _weighted_dot(weights, a, b):
    return float(np.sum(weights * a * b))


def _cosine_to_span(weights, vec, basis):
    """Cosine of the angle between vec and span(basis) in the weighted inner."""
    ortho = []
    for b in basis:
        u = b.copy()
        for o in ortho:
            u = u - _weighted_dot(weights, u, o) * o
        nrm = math.sqrt(_weighted_dot(weights, u, u))
        if nrm > 0.0:
            ortho.append(u / nrm)
    proj = np.zeros_like(vec)
    for o in ortho:
        proj = proj + _weighted_dot(weights, vec, o) * o
    denom = math.sqrt(_weighted_dot(weights, vec, vec))
    return math.sqrt(max(_weighted_dot(weights, proj, proj), 0.0)) / denom


def stability_spectrum(profile: ShrinkerProfile, m_nodes: int = 512,
                       cfg: LabConfig | None = None) -> SpectrumResult:
    """Assemble and solve the weighted eigenproblem at m_nodes grid points."""
    cfg = cfg or default_config()
    if m_nodes < 128:
        raise ShrinkFlowError("spectral resolution must be >= 128")
    data = profile.at_resolution(m_nodes)
    pts, k, h = data["points"], data["k"], data["h"]
    w = np.exp(-0.25 * (pts ** 2).sum(axis=1))
    if np.any(w <= 0.0):
        raise ShrinkFlowError("non-positive Gaussian weight (cannot happen)")

    d1 = _derivative_stencil(m_nodes, h)
    stiff = h * d1.T @ (w[:, None] * d1)
    d2 = _second_difference(m_nodes, h)
    stiff += (NYQUIST_LIFT * h * h / 16.0) * h * d2.T @ (w[:, None] * d2)
    stiff -= np.diag((k ** 2 + 0.5) * w * h)
    stiff = 0.5 * (stiff + stiff.T)
    mass = w * h
    scale = 1.0 / np.sqrt(mass)
    sym = stiff * scale[:, None] * scale[None, :]
    mu, vecs = np.linalg.eigh(sym)
    funcs = vecs * scale[:, None]            # weighted-orthonormal columns

    morse = int(np.sum(mu < -cfg.spectral_zero_tol))
    entropy_index = morse - 3
    if entropy_index < 0:
        raise ShrinkFlowError(
            f"entropy index {entropy_index} < 0: spectrum inconsistent")

    span_check = _stable_span_check(mu, funcs, mass, data, cfg)
    result = SpectrumResult(eigenvalues=mu, eigenfunctions=funcs,
                            morse_index=morse, entropy_index=entropy_index,
                            stable_span_check=span_check, weights=mass,
                            node_data=data, resolution=m_nodes)
    result.unstable_basis = unstable_directions(result, profile, cfg)
    return result


def _stable_span_check(mu, funcs, mass, data, cfg):
    """Project the curvature function and normal components onto the
    eigenspaces where L pins them (reported -1 and -1/2)."""
    out = {}
    fields = {
        "H": (data["k"], -1.0),
        "n1": (data["normal"][:, 0], -0.5),
        "n2": (data["normal"][:, 1], -0.5),
    }
    for name, (vec, target) in fields.items():
        sel = np.abs(mu - target) < cfg.eigen_cluster_tol
        if not np.any(sel):
            out[name] = 0.0
            continue
        basis = [funcs[:, j] for j in np.nonzero(sel)[0]]
        out[name] = _cosine_to_span(mass, vec, basis)
    norm = [data["k"], data["normal"][:, 0], data["normal"][:, 1]]
    gram = np.array([[_weighted_dot(mass, a / math.sqrt(_weighted_dot(mass, a, a)),
                                    b / math.sqrt(_weighted_dot(mass, b, b)))
                      for b in norm] for a in norm])
    out["gram_det"] = float(np.linalg.det(gram))
    return out


def unstable_directions(result: SpectrumResult, profile: ShrinkerProfile,
                        cfg: LabConfig | None = None) -> list:
    """Negative-eigenvalue eigenfunctions, weighted-orthogonal to the span of
    the curvature function and the normal components; count = entropy index."""
    cfg = cfg or default_config()
    mass = result.weights
    data = result.node_data
    stable = []
    for vec in (data["k"], data["normal"][:, 0], data["normal"][:, 1]):
        u = vec.astype(float).copy()
        for o in stable:
            u = u - _weighted_dot(mass, u, o) * o
        u /= math.sqrt(_weighted_dot(mass, u, u))
        stable.append(u)

    out = []
    for j in np.nonzero(result.eigenvalues < -cfg.spectral_zero_tol)[0]:
        u = result.eigenfunctions[:, j].copy()
        for o in stable + out:
            u = u - _weighted_dot(mass, u, o) * o
        nrm = math.sqrt(max(_weighted_dot(mass, u, u), 0.0))
        if nrm > cfg.gs_drop_tol:
            out.append(u / nrm)
    if len(out) != result.entropy_index:
        raise ShrinkFlowError(
            f"unstable basis count {len(out)} != entropy index "
            f"{result.entropy_index} for {profile.kind_label()}")
    return out


def sturm_zero_count(result: SpectrumResult, index: int) -> int:
    """Sign changes of eigenfunction `index` (0-based, ascending order) along
    the closed grid."""
    u = result.eigenfunctions[:, index]
    if np.max(np.abs(u)) < 1e-12:
        raise ShrinkFlowError("eigenfunction magnitude below noise floor")
    return count_sign_changes(u, rel_tol=1e-7)


def rayleigh_quotient(result: SpectrumResult, f) -> float:
    """Q(f) / <f, f>_w with the same discrete form used for assembly."""
    d1 = _derivative_stencil(result.resolution, result.node_data["h"])
    w = result.weights / result.node_data["h"]
    h = result.node_data["h"]
    k = result.node_data["k"]
    fs = d1 @ f
    q = h * float(np.sum(w * fs * fs)) - float(
        np.sum((k ** 2 + 0.5) * w * h * f * f))
    return q / float(np.sum(result.weights * f * f))
