"""Analytic gradients of the estimators with respect to the support points.

All gradients differentiate the closed 1D form under the *fixed* sorted
pairing (a Danskin-style subgradient): the optimal pairing is locally constant
almost everywhere, so away from ties these are exact derivatives. Ties use the
convention sign(0) = 0.
"""

from __future__ import annotations

import numpy as np

from .energy import EnergyFunction, EXPONENTIAL, normalized_weights
from .measures import EmpiricalMeasure


def _check_pair(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> None:
    if mu.d != nu.d:
        raise ValueError(f"dimension mismatch: {mu.d} vs {nu.d}")
    if mu.n != nu.n:
        raise ValueError(
            f"support gradients need matched cardinalities, got {mu.n} vs {nu.n}"
        )


def _slice_grads(
    mu: EmpiricalMeasure, nu: EmpiricalMeasure, thetas: np.ndarray, p: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-direction values and gradient coefficients.

    Returns ``(values, coeffs)`` where ``values[l]`` is the p-power cost along
    direction l and ``coeffs[j, l]`` is the scalar such that the gradient of
    ``values[l]`` with respect to support point j equals coeffs[j, l] * theta_l.
    """
    _check_pair(mu, nu)
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    n = mu.n
    proj_mu = mu.points @ thetas.T  # (n, L)
    proj_nu = nu.points @ thetas.T
    ix = np.argsort(proj_mu, axis=0, kind="stable")
    iy = np.argsort(proj_nu, axis=0, kind="stable")
    diff = np.take_along_axis(proj_mu, ix, axis=0) - np.take_along_axis(proj_nu, iy, axis=0)
    values = np.mean(np.abs(diff) ** p, axis=0)
    psi = (p / n) * np.abs(diff) ** (p - 1.0) * np.sign(diff)
    coeffs = np.empty_like(psi)
    np.put_along_axis(coeffs, ix, psi, axis=0)
    return values, coeffs


def _combine(coeffs: np.ndarray, per_value_weights: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    # sum_l w_l * coeffs[:, l] * theta_l as one matmul
    return coeffs @ (per_value_weights[:, None] * thetas)


def _root_chain(total_pp: float, p: float) -> float:
    # d/dt t^{1/p} evaluated at the accumulated p-power value
    return (1.0 / p) * total_pp ** ((1.0 - p) / p)


def grad_slice_pp(
    mu: EmpiricalMeasure, nu: EmpiricalMeasure, theta: np.ndarray, p: float
) -> np.ndarray:
    """Gradient of the p-power cost along one direction, shape (n, d).

    Row j is (p/n) |t_j|^{p-1} sign(t_j) theta with t_j the gap between the
    projection of point j and its sorted match.
    """
    theta = np.asarray(theta, dtype=np.float64)
    _, coeffs = _slice_grads(mu, nu, theta[None, :], p)
    return coeffs[:, [0]] * theta[None, :]


def sw_value_and_grad(
    mu: EmpiricalMeasure, nu: EmpiricalMeasure, thetas: np.ndarray, p: float
) -> tuple[float, np.ndarray]:
    """Estimate and support gradient of the uniform-average estimator."""
    values, coeffs = _slice_grads(mu, nu, thetas, p)
    L = values.shape[0]
    uniform = np.full(L, 1.0 / L)
    mean_pp = float(values @ uniform)
    value = mean_pp ** (1.0 / p)
    if mean_pp == 0.0:
        return value, np.zeros_like(mu.points)
    grad = _root_chain(mean_pp, p) * _combine(coeffs, uniform, np.atleast_2d(thetas))
    return value, grad


def grad_sw(
    mu: EmpiricalMeasure, nu: EmpiricalMeasure, thetas: np.ndarray, p: float
) -> np.ndarray:
    """Support gradient of the uniform-average estimator over fixed directions."""
    return sw_value_and_grad(mu, nu, thetas, p)[1]


def grad_resampled(
    mu: EmpiricalMeasure, nu: EmpiricalMeasure, resampled_thetas: np.ndarray, p: float
) -> np.ndarray:
    """Weight-free support gradient over resampled or chain directions.

    The resampling machinery already encoded the slicing weights in which
    directions appear, so the gradient is the uniform-average one evaluated on
    that direction set.
    """
    return sw_value_and_grad(mu, nu, resampled_thetas, p)[1]


def is_ebsw_value_and_grad(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    thetas: np.ndarray,
    p: float,
    f: EnergyFunction,
    mode: str = "conventional",
) -> tuple[float, np.ndarray]:
    """Estimate and support gradient of the importance-weighted estimator.

    ``conventional`` differentiates the full weighted ratio, including how the
    weights move with the points; ``parameter_copy`` freezes the weights, as if
    they came from an independent value-copy of the optimized measure. Both
    modes return the identical estimate.
    """
    if mode not in ("conventional", "parameter_copy"):
        raise ValueError(f"unknown gradient mode {mode!r}")
    values, coeffs = _slice_grads(mu, nu, thetas, p)
    w = normalized_weights(f, values)
    ratio = float(values @ w)
    value = ratio ** (1.0 / p)
    if ratio == 0.0:
        return value, np.zeros_like(mu.points)
    if mode == "parameter_copy":
        dratio_dv = w
    elif f.kind == EXPONENTIAL:
        # softmax derivative folded in: d ratio / d v_l = w_l (1 + v_l - ratio)
        dratio_dv = w * (1.0 + values - ratio)
    else:
        raw_total = float(np.sum(values**f.q + f.epsilon))
        slope = f.q * values ** (f.q - 1.0)
        dratio_dv = w + (values - ratio) * slope / raw_total
    grad = _root_chain(ratio, p) * _combine(coeffs, dratio_dv, np.atleast_2d(thetas))
    return value, grad


def grad_is_ebsw(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    thetas: np.ndarray,
    p: float,
    f: EnergyFunction,
    mode: str = "conventional",
) -> np.ndarray:
    """Support gradient of the importance-weighted estimator over fixed directions."""
    return is_ebsw_value_and_grad(mu, nu, thetas, p, f, mode)[1]


def grad_theta_wp(
    mu: EmpiricalMeasure, nu: EmpiricalMeasure, theta: np.ndarray, p: float
) -> np.ndarray:
    """Gradient of the projected distance with respect to the direction itself.

    Used by the best-direction ascent. Zero by convention when the projected
    distance vanishes.
    """
    _check_pair(mu, nu)
    theta = np.asarray(theta, dtype=np.float64)
    n = mu.n
    proj_mu = mu.points @ theta
    proj_nu = nu.points @ theta
    ix = np.argsort(proj_mu, kind="stable")
    iy = np.argsort(proj_nu, kind="stable")
    diff = proj_mu[ix] - proj_nu[iy]
    total_pp = float(np.mean(np.abs(diff) ** p))
    if total_pp == 0.0:
        return np.zeros_like(theta)
    psi = (p / n) * np.abs(diff) ** (p - 1.0) * np.sign(diff)
    grad_pp = psi @ (mu.points[ix] - nu.points[iy])
    return _root_chain(total_pp, p) * grad_pp
