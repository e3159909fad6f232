"""Energy functions over projected transport costs, and their normalized weights.

An energy function is positive and monotonically increasing; applied to the
per-direction p-power Wasserstein values it defines an unnormalized density
over projection directions. Two families are shipped: the exponential e^x and
the shifted polynomial x^q + eps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeightsError

EXPONENTIAL = "exponential"
SHIFTED_POLYNOMIAL = "shifted_polynomial"


@dataclass(frozen=True)
class EnergyFunction:
    kind: str
    q: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in (EXPONENTIAL, SHIFTED_POLYNOMIAL):
            raise ValueError(f"unknown energy kind: {self.kind!r}")
        if self.kind == SHIFTED_POLYNOMIAL:
            if self.q <= 0:
                raise ValueError(f"polynomial exponent must be > 0, got {self.q}")
            if self.epsilon < 0:
                raise ValueError(f"shift must be >= 0, got {self.epsilon}")

    def label(self) -> str:
        if self.kind == EXPONENTIAL:
            return "e"
        if self.epsilon:
            return f"q:{self.q:g}:{self.epsilon:g}"
        return f"q:{self.q:g}"


def exponential() -> EnergyFunction:
    return EnergyFunction(EXPONENTIAL)


def polynomial(q: float, epsilon: float = 0.0) -> EnergyFunction:
    return EnergyFunction(SHIFTED_POLYNOMIAL, q=q, epsilon=epsilon)


def parse_energy(text: str) -> EnergyFunction:
    """Parse the CLI grammar: "e" or "q:<q>[:<eps>]"."""
    text = text.strip()
    if text == "e":
        return exponential()
    parts = text.split(":")
    if parts[0] == "q" and len(parts) in (2, 3):
        try:
            q = float(parts[1])
            eps = float(parts[2]) if len(parts) == 3 else 0.0
        except ValueError as exc:
            raise ValueError(f"bad energy spec {text!r}") from exc
        return polynomial(q, eps)
    raise ValueError(f"bad energy spec {text!r}; expected 'e' or 'q:<q>[:<eps>]'")


def eval_energy(f: EnergyFunction, v):
    """Evaluate the energy at nonnegative value(s) v."""
    v = np.asarray(v, dtype=np.float64)
    if np.any(v < 0):
        raise ValueError("energy argument must be nonnegative")
    if f.kind == EXPONENTIAL:
        out = np.exp(v)
    else:
        out = v**f.q + f.epsilon
    return float(out) if out.ndim == 0 else out


def eval_energy_slope(f: EnergyFunction, v):
    """Derivative of the energy at nonnegative value(s) v."""
    v = np.asarray(v, dtype=np.float64)
    if np.any(v < 0):
        raise ValueError("energy argument must be nonnegative")
    if f.kind == EXPONENTIAL:
        out = np.exp(v)
    else:
        out = f.q * v ** (f.q - 1.0)
    return float(out) if out.ndim == 0 else out


def normalize_raw_weights(raw) -> np.ndarray:
    """Normalize nonnegative raw weights to sum to one.

    This is the extension point for energy functions beyond the two shipped
    families: evaluate any positive f yourself and normalize here.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.size == 0:
        raise ValueError("need at least one weight")
    if np.any(raw < 0) or not np.isfinite(raw).all():
        raise ValueError("raw weights must be finite and nonnegative")
    total = raw.sum()
    if total == 0.0:
        raise DegenerateWeightsError(
            "all raw weights are zero; the measures coincide along every sampled direction"
        )
    if np.all(raw == raw[0]):
        # a flat batch must give exactly uniform mass; the direct ratio can
        # miss 1/L by an ulp when L * raw rounds
        return np.full(raw.size, 1.0 / raw.size)
    return raw / total


def normalized_weights(f: EnergyFunction, values) -> np.ndarray:
    """Importance weights f(v_l) / sum_i f(v_i) for a batch of slice values.

    The exponential family is evaluated in log space (subtract the max before
    exponentiating): projected costs can exceed 700 on far-apart clouds, where
    a naive exp overflows.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("values must be a nonempty 1-d array")
    if np.any(values < 0):
        raise ValueError("slice values must be nonnegative")
    if f.kind == EXPONENTIAL:
        shifted = np.exp(values - values.max())
        return shifted / shifted.sum()
    return normalize_raw_weights(values**f.q + f.epsilon)


def acceptance_ratio(f: EnergyFunction, v_new: float, v_old: float) -> float:
    """Metropolis acceptance probability min(1, f(v_new) / f(v_old)).

    A zero denominator (polynomial energy with zero shift at v_old = 0) counts
    as certain acceptance.
    """
    if v_new < 0 or v_old < 0:
        raise ValueError("slice values must be nonnegative")
    if f.kind == EXPONENTIAL:
        return float(np.exp(min(0.0, v_new - v_old)))
    den = v_old**f.q + f.epsilon
    if den == 0.0:
        return 1.0
    return min(1.0, (v_new**f.q + f.epsilon) / den)
