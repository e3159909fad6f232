"""Ground-truth references: exact W2, brute-force 1D transport, finite
differences, and density grids over directions in the plane.

These are deliberately independent of the estimator code paths so they can
serve as oracles in tests and evaluations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .energy import EnergyFunction, EXPONENTIAL, eval_energy
from .errors import DegenerateWeightsError
from .measures import EmpiricalMeasure

MAX_ASSIGNMENT_SIZE = 2000
MAX_BRUTE_FORCE_SIZE = 8


def exact_w2(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """Exact Wasserstein-2 distance between equal-count uniform measures.

    Solves the minimum-cost assignment on the squared-Euclidean cost matrix;
    cubic in n, so the support count is capped at 2000.
    """
    if mu.d != nu.d:
        raise ValueError(f"dimension mismatch: {mu.d} vs {nu.d}")
    if mu.n != nu.n:
        raise ValueError(f"support counts must match, got {mu.n} vs {nu.n}")
    if mu.n > MAX_ASSIGNMENT_SIZE:
        raise ValueError(f"assignment solver capped at n={MAX_ASSIGNMENT_SIZE}, got {mu.n}")
    cost = cdist(mu.points, nu.points, metric="sqeuclidean")
    rows, cols = linear_sum_assignment(cost)
    return float(np.sqrt(cost[rows, cols].sum() / mu.n))


def brute_force_1d(xs, ys, p: float) -> float:
    """Minimum of the mean p-power matching cost over all permutations.

    Exhaustive oracle for the sorted closed form; restricted to n = m <= 8.
    """
    xs = np.asarray(xs, dtype=np.float64).ravel()
    ys = np.asarray(ys, dtype=np.float64).ravel()
    if xs.size != ys.size:
        raise ValueError(f"sizes must match, got {xs.size} vs {ys.size}")
    if xs.size > MAX_BRUTE_FORCE_SIZE:
        raise ValueError(f"brute force capped at n={MAX_BRUTE_FORCE_SIZE}, got {xs.size}")
    n = xs.size
    best = np.inf
    for perm in itertools.permutations(range(n)):
        cost = float(np.mean(np.abs(xs - ys[list(perm)]) ** p))
        if cost < best:
            best = cost
    return best


def finite_diff_grad(objective, m: EmpiricalMeasure, h: float) -> np.ndarray:
    """Central finite differences of a deterministic measure objective.

    The objective must be a pure function of the measure (freeze any
    randomness before calling); returns an (n, d) array.
    """
    if h <= 0:
        raise ValueError(f"step must be > 0, got {h}")
    base = np.array(m.points, copy=True)
    grad = np.zeros_like(base)
    for idx in np.ndindex(base.shape):
        bump = np.zeros_like(base)
        bump[idx] = h
        hi = objective(EmpiricalMeasure(base + bump))
        lo = objective(EmpiricalMeasure(base - bump))
        if not (np.isfinite(hi) and np.isfinite(lo)):
            raise ValueError(f"objective non-finite near coordinate {idx}")
        grad[idx] = (hi - lo) / (2.0 * h)
    return grad


@dataclass(frozen=True)
class DensityGrid:
    """Energy-based slicing density evaluated on an angular grid (d = 2 only)."""

    angles: np.ndarray  # K angles in [0, 2*pi)
    unnormalized: np.ndarray  # raw energy values
    normalized: np.ndarray  # density integrating to 1 over the circle

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("angle,unnormalized,normalized\n")
            for a, u, s in zip(self.angles, self.unnormalized, self.normalized):
                fh.write(f"{repr(float(a))},{repr(float(u))},{repr(float(s))}\n")


def slicing_density_grid(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    f: EnergyFunction,
    p: float,
    K: int,
) -> DensityGrid:
    """Evaluate the energy-based slicing density on K equally spaced angles.

    Normalization divides by the periodic trapezoid quadrature, which on an
    even circular grid is delta * sum of the values.
    """
    from .estimators import slice_values  # local import to avoid a cycle

    if mu.d != 2 or nu.d != 2:
        raise ValueError("density grids are defined for d = 2 only")
    if K < 8:
        raise ValueError(f"need K >= 8 grid angles, got {K}")
    angles = 2.0 * np.pi * np.arange(K) / K
    thetas = np.column_stack([np.cos(angles), np.sin(angles)])
    values = slice_values(mu, nu, thetas, p).values
    unnormalized = eval_energy(f, values)
    if f.kind == EXPONENTIAL:
        scaled = np.exp(values - values.max())  # overflow-safe, max cancels
    else:
        scaled = unnormalized
    total = scaled.sum()
    if total == 0.0:
        raise DegenerateWeightsError("slicing density vanishes on the whole grid")
    delta = 2.0 * np.pi / K
    normalized = scaled / (total * delta)
    return DensityGrid(angles, unnormalized, normalized)
