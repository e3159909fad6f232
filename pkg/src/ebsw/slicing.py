"""Directions on the unit hypersphere: sampling and projection.

Uniform sampling normalizes standard-normal draws. Von Mises-Fisher sampling
uses the classic rejection scheme: a beta-distributed cosine component along
the location, a uniform tangent, and a Householder reflection that carries the
canonical axis onto the location.
"""

from __future__ import annotations

import numpy as np

from .measures import EmpiricalMeasure

UNIT_NORM_TOL = 1e-12


def sample_uniform_sphere(d: int, L: int, rng: np.random.Generator) -> np.ndarray:
    """Draw L directions uniformly on S^{d-1}, returned as an (L, d) array."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if L < 1:
        raise ValueError(f"sample count must be >= 1, got {L}")
    g = rng.standard_normal((L, d))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # a zero draw has probability zero; redraw defensively rather than divide by 0
    while np.any(norms == 0.0):
        bad = norms[:, 0] == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
    return g / norms


def _vmf_cosine(kappa: float, d: int, rng: np.random.Generator) -> float:
    # rejection sampler for the cosine of the angle to the location
    dim = d - 1
    b = dim / (np.sqrt(4.0 * kappa**2 + dim**2) + 2.0 * kappa)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + dim * np.log(1.0 - x0**2)
    while True:
        z = rng.beta(dim / 2.0, dim / 2.0)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.random()
        if kappa * w + dim * np.log(1.0 - x0 * w) - c >= np.log(u):
            return float(w)


def _reflect_to(location: np.ndarray, x: np.ndarray) -> np.ndarray:
    # Householder reflection mapping e_1 onto location, applied to x
    d = location.shape[0]
    u = np.zeros(d)
    u[0] = 1.0
    u = u - location
    nrm2 = float(u @ u)
    if nrm2 < 1e-24:  # location is e_1 itself
        return x
    return x - (2.0 * (u @ x) / nrm2) * u


def sample_vmf(location: np.ndarray, kappa: float, rng: np.random.Generator) -> np.ndarray:
    """Draw one unit vector from vMF(location, kappa).

    kappa = 0 degenerates to the uniform distribution and bypasses rejection.
    """
    loc = np.asarray(location, dtype=np.float64)
    if loc.ndim != 1:
        raise ValueError("location must be a 1-d unit vector")
    d = loc.shape[0]
    if abs(np.linalg.norm(loc) - 1.0) > UNIT_NORM_TOL:
        raise ValueError("location must have unit norm")
    if kappa < 0:
        raise ValueError(f"concentration must be >= 0, got {kappa}")
    if kappa == 0.0:
        return sample_uniform_sphere(d, 1, rng)[0]
    if d == 1:
        # S^0 = {+1, -1} with mass proportional to exp(+-kappa * loc)
        p_plus = 1.0 / (1.0 + np.exp(-2.0 * kappa * loc[0]))
        return np.array([1.0 if rng.random() < p_plus else -1.0])
    w = _vmf_cosine(kappa, d, rng)
    tangent = rng.standard_normal(d - 1)
    tnorm = np.linalg.norm(tangent)
    while tnorm == 0.0:
        tangent = rng.standard_normal(d - 1)
        tnorm = np.linalg.norm(tangent)
    canonical = np.empty(d)
    canonical[0] = w
    canonical[1:] = np.sqrt(max(0.0, 1.0 - w * w)) * tangent / tnorm
    out = _reflect_to(loc, canonical)
    return out / np.linalg.norm(out)


def project(m: EmpiricalMeasure, theta: np.ndarray) -> np.ndarray:
    """Project the support points onto a direction: value i is <theta, x_i>."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (m.d,):
        raise ValueError(f"direction has shape {theta.shape}, measure has d={m.d}")
    return m.points @ theta
