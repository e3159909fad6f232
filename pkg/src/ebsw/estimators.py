"""Sliced distance estimators between uniform empirical measures.

Six methods share one kernel, the per-direction p-power 1D Wasserstein value:

* ``sw``        -- plain Monte Carlo average over uniform directions,
* ``max_sw``    -- projected gradient ascent to the best single direction,
* ``is_ebsw``   -- importance-weighted average, weights from an energy function,
* ``sir_ebsw``  -- resample directions from the normalized weights, then average,
* ``imh_ebsw``  -- Metropolis chain with uniform proposals,
* ``rmh_ebsw``  -- Metropolis chain with von Mises-Fisher random-walk proposals.

Every estimator is a pure function of (mu, nu, config): the seed fully
determines the direction stream and therefore the returned value.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .energy import EnergyFunction, acceptance_ratio, exponential, normalized_weights
from .measures import EmpiricalMeasure
from .onedim import wasserstein_1d_pp
from .slicing import sample_uniform_sphere, sample_vmf

METHODS = ("sw", "max_sw", "is_ebsw", "sir_ebsw", "imh_ebsw", "rmh_ebsw")

# fixed chunk width for threaded evaluation; independent of the thread count
# so that results are bit-identical however many workers run
_CHUNK = 64


@dataclass(frozen=True)
class SliceBatch:
    """L directions with their p-power 1D Wasserstein values."""

    directions: np.ndarray  # (L, d)
    values: np.ndarray  # (L,)

    def __post_init__(self):
        if self.directions.shape[0] != self.values.shape[0]:
            raise ValueError("directions and values lengths differ")
        if np.any(self.values < 0):
            raise ValueError("slice values must be nonnegative")

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class EstimatorConfig:
    """Everything a distance estimate depends on besides the two measures.

    ``num_projections`` doubles as the Metropolis chain length; the chains run
    with no burn-in so all methods consume the same number of directions.
    """

    method: str = "is_ebsw"
    p: float = 2.0
    num_projections: int = 100
    energy: EnergyFunction = field(default_factory=exponential)
    max_sw_iters: int = 100
    max_sw_step: float = 0.1
    rmh_kappa: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.p < 1:
            raise ValueError(f"order p must be >= 1, got {self.p}")
        if self.num_projections < 1:
            raise ValueError("num_projections must be >= 1")
        if self.max_sw_iters < 1:
            raise ValueError("max_sw_iters must be >= 1")
        if self.max_sw_step <= 0:
            raise ValueError("max_sw_step must be > 0")
        if self.rmh_kappa <= 0:
            raise ValueError("rmh_kappa must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")

    def with_method(self, method: str) -> "EstimatorConfig":
        return replace(self, method=method)


def _check_dims(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> None:
    if mu.d != nu.d:
        raise ValueError(f"dimension mismatch: {mu.d} vs {nu.d}")


def _rng_for(cfg: EstimatorConfig, rng: np.random.Generator | None) -> np.random.Generator:
    return np.random.default_rng(cfg.seed) if rng is None else rng


def slice_values(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    thetas: np.ndarray,
    p: float,
    threads: int = 1,
) -> SliceBatch:
    """Evaluate the p-power 1D Wasserstein value along each direction.

    Directions are processed in fixed-size chunks; with ``threads > 1`` the
    chunks run on a thread pool but land in the output by index, so the batch
    is identical for any thread count.
    """
    _check_dims(mu, nu)
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    if thetas.shape[1] != mu.d:
        raise ValueError(f"directions have d={thetas.shape[1]}, measures have d={mu.d}")
    L = thetas.shape[0]
    out = np.empty(L)

    def work(a: int, b: int) -> None:
        proj_mu = mu.points @ thetas[a:b].T
        proj_nu = nu.points @ thetas[a:b].T
        for j in range(b - a):
            out[a + j] = wasserstein_1d_pp(proj_mu[:, j], proj_nu[:, j], p)

    spans = [(a, min(a + _CHUNK, L)) for a in range(0, L, _CHUNK)]
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda s: work(*s), spans))
    else:
        for a, b in spans:
            work(a, b)
    return SliceBatch(thetas, out)


def _slice_pp_single(mu: EmpiricalMeasure, nu: EmpiricalMeasure, theta: np.ndarray, p: float) -> float:
    return wasserstein_1d_pp(mu.points @ theta, nu.points @ theta, p)


def sw_from_values(values: np.ndarray, p: float) -> float:
    """Root of the uniform average of a value batch."""
    L = values.shape[0]
    return float(values @ np.full(L, 1.0 / L)) ** (1.0 / p)


def is_ebsw_from_values(values: np.ndarray, f: EnergyFunction, p: float) -> float:
    """Root of the energy-weighted average of a value batch."""
    w = normalized_weights(f, values)
    weighted = float(values @ w)
    # increasing weights pair the larger values with the larger mass, so the
    # weighted mean can never drop below the plain mean (up to roundoff)
    assert weighted >= np.mean(values) - 1e-12 * (1.0 + np.mean(values))
    return weighted ** (1.0 / p)


def sw(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    cfg: EstimatorConfig,
    rng: np.random.Generator | None = None,
    threads: int = 1,
) -> float:
    """Monte Carlo sliced Wasserstein estimate with uniform directions."""
    rng = _rng_for(cfg, rng)
    thetas = sample_uniform_sphere(mu.d, cfg.num_projections, rng)
    batch = slice_values(mu, nu, thetas, cfg.p, threads)
    return sw_from_values(batch.values, cfg.p)


def max_sw(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    cfg: EstimatorConfig,
    rng: np.random.Generator | None = None,
) -> tuple[float, np.ndarray]:
    """Best-direction estimate via projected gradient ascent.

    Runs ``max_sw_iters`` ascent steps of size ``max_sw_step`` from a uniform
    random start, renormalizing after each step, and returns the distance at
    the final direction together with that direction. The ascent uses the
    analytic subgradient of the projected distance under the sorted pairing.
    """
    from .gradients import grad_theta_wp  # local import to avoid a cycle

    _check_dims(mu, nu)
    rng = _rng_for(cfg, rng)
    theta = sample_uniform_sphere(mu.d, 1, rng)[0]
    for _ in range(cfg.max_sw_iters):
        g = grad_theta_wp(mu, nu, theta, cfg.p)
        cand = theta + cfg.max_sw_step * g
        nrm = np.linalg.norm(cand)
        if nrm > 0:
            theta = cand / nrm
    value = _slice_pp_single(mu, nu, theta, cfg.p) ** (1.0 / cfg.p)
    return value, theta


def is_ebsw(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    cfg: EstimatorConfig,
    rng: np.random.Generator | None = None,
    threads: int = 1,
) -> float:
    """Importance-weighted estimate under the energy-based slicing density.

    With a uniform proposal the proposal density cancels from the normalized
    weights, which reduce to f(v_l) / sum f(v_i).
    """
    rng = _rng_for(cfg, rng)
    thetas = sample_uniform_sphere(mu.d, cfg.num_projections, rng)
    batch = slice_values(mu, nu, thetas, cfg.p, threads)
    return is_ebsw_from_values(batch.values, cfg.energy, cfg.p)


def _sir_draw(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    cfg: EstimatorConfig,
    rng: np.random.Generator,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Propose uniformly, then resample directions from the weight categorical."""
    thetas = sample_uniform_sphere(mu.d, cfg.num_projections, rng)
    batch = slice_values(mu, nu, thetas, cfg.p, threads)
    w = normalized_weights(cfg.energy, batch.values)
    idx = rng.choice(len(batch), size=len(batch), replace=True, p=w)
    return thetas[idx], batch.values[idx]


def sir_ebsw(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    cfg: EstimatorConfig,
    rng: np.random.Generator | None = None,
    threads: int = 1,
) -> float:
    """Sampling-importance-resampling estimate of the energy-based distance."""
    rng = _rng_for(cfg, rng)
    _, values = _sir_draw(mu, nu, cfg, rng, threads)
    return sw_from_values(values, cfg.p)


def _mh_chain(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    cfg: EstimatorConfig,
    rng: np.random.Generator,
    random_walk: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Metropolis chain over directions; returns the visited states and values.

    Both proposal kernels are symmetric, so the acceptance probability is just
    the capped energy ratio of the proposed and current slice values.
    """
    _check_dims(mu, nu)
    L, d = cfg.num_projections, mu.d
    thetas = np.empty((L, d))
    values = np.empty(L)
    theta = sample_uniform_sphere(d, 1, rng)[0]
    v = _slice_pp_single(mu, nu, theta, cfg.p)
    thetas[0], values[0] = theta, v
    for t in range(1, L):
        if random_walk:
            prop = sample_vmf(theta, cfg.rmh_kappa, rng)
        else:
            prop = sample_uniform_sphere(d, 1, rng)[0]
        v_prop = _slice_pp_single(mu, nu, prop, cfg.p)
        alpha = acceptance_ratio(cfg.energy, v_prop, v)
        if alpha >= rng.random():
            theta, v = prop, v_prop
        thetas[t], values[t] = theta, v
    return thetas, values


def imh_ebsw(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    cfg: EstimatorConfig,
    rng: np.random.Generator | None = None,
) -> float:
    """Independent Metropolis estimate: uniform proposals along the chain."""
    rng = _rng_for(cfg, rng)
    _, values = _mh_chain(mu, nu, cfg, rng, random_walk=False)
    return sw_from_values(values, cfg.p)


def rmh_ebsw(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    cfg: EstimatorConfig,
    rng: np.random.Generator | None = None,
) -> float:
    """Random-walk Metropolis estimate: vMF proposals centered at the state."""
    rng = _rng_for(cfg, rng)
    _, values = _mh_chain(mu, nu, cfg, rng, random_walk=True)
    return sw_from_values(values, cfg.p)


def estimate(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    cfg: EstimatorConfig,
    rng: np.random.Generator | None = None,
    threads: int = 1,
) -> float:
    """Dispatch on cfg.method and return the scalar distance estimate."""
    if cfg.method == "sw":
        return sw(mu, nu, cfg, rng, threads)
    if cfg.method == "max_sw":
        return max_sw(mu, nu, cfg, rng)[0]
    if cfg.method == "is_ebsw":
        return is_ebsw(mu, nu, cfg, rng, threads)
    if cfg.method == "sir_ebsw":
        return sir_ebsw(mu, nu, cfg, rng, threads)
    if cfg.method == "imh_ebsw":
        return imh_ebsw(mu, nu, cfg, rng)
    if cfg.method == "rmh_ebsw":
        return rmh_ebsw(mu, nu, cfg, rng)
    raise ValueError(f"unknown method {cfg.method!r}")
