"""Gaussian-pointer model of an indirect (von Neumann) measurement.

The system couples impulsively to a pointer with a Gaussian position
amplitude of width ``sigma``; the eigenspace with eigenvalue ``o_k`` shifts
the pointer by ``g * o_k``.  After post-selection the pointer amplitude is

    phi(x) = sum_k c_k G(x - g o_k),    c_k = <f|U P_k|in>

Every moment below comes from closed-form Gaussian overlaps, so no position
grid is involved.  With ``G`` of unit norm and ``|G|^2`` of variance
``sigma^2``, the product ``G_a G_b`` equals ``exp(-(a-b)^2 / 8 sigma^2)``
times a normal density centred at ``(a+b)/2`` with variance ``sigma^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import NoConsistentHistory
from .measure import EPS, PrePost, SpectralData, branch_amplitudes


@dataclass(frozen=True)
class PointerModel:
    g: float
    sigma: float

    def __post_init__(self):
        for name in ("g", "sigma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")


@dataclass(frozen=True)
class MeterOutcome:
    post_selection_probability: float
    pointer_mean: float
    pointer_variance: float
    components: tuple[tuple[float, float, complex], ...]  # (eigenvalue, center, amplitude)

    def component_weights(self) -> dict[float, float]:
        """``|c_k|^2`` normalized over components, keyed by eigenvalue."""
        w = np.array([abs(c) ** 2 for _, _, c in self.components])
        return {o: float(x) for (o, _, _), x in zip(self.components, w / w.sum())}


def _kernels(centers: np.ndarray, sigma: float):
    a = centers[:, None]
    b = centers[None, :]
    overlap = np.exp(-((a - b) ** 2) / (8.0 * sigma**2))
    mid = 0.5 * (a + b)
    return overlap, mid


def _mixture(spec: SpectralData, pp: PrePost, model: PointerModel):
    amps = branch_amplitudes(spec, pp)
    centers = model.g * np.array(spec.eigenvalues)
    overlap, mid = _kernels(centers, model.sigma)
    # real part of conj(c_j) c_k, weighted by the Gaussian overlap
    cross = (np.conj(amps)[:, None] * amps[None, :]).real * overlap
    norm = float(cross.sum())
    if norm < EPS**2:
        raise NoConsistentHistory("post-selection never succeeds for this pointer")
    return amps, centers, cross, mid, norm


def simulate_pointer(spec: SpectralData, pp: PrePost, model: PointerModel) -> MeterOutcome:
    """Post-selection probability and pointer position moments.

    Raises
    ------
    NoConsistentHistory
        When the post-selected pointer amplitude has norm below ``EPS``.
    """
    amps, centers, cross, mid, norm = _mixture(spec, pp, model)
    mean = float((cross * mid).sum()) / norm
    second = float((cross * (mid**2 + model.sigma**2)).sum()) / norm
    components = tuple(
        (o, float(c), complex(a)) for o, c, a in zip(spec.eigenvalues, centers, amps))
    return MeterOutcome(norm, mean, max(second - mean**2, 0.0), components)


def weak_shift_ratio(spec: SpectralData, pp: PrePost, model: PointerModel) -> float:
    """Pointer mean divided by ``g``; tends to Re(weak value) as ``g/sigma -> 0``."""
    return simulate_pointer(spec, pp, model).pointer_mean / model.g


def peak_weights(spec: SpectralData, pp: PrePost, model: PointerModel) -> dict[float, float]:
    """Fraction of pointer probability lying nearest to each eigenvalue's center.

    The position axis is split at midpoints between adjacent centers.  In the
    strong limit the peaks separate and these fractions approach the ABL
    distribution.
    """
    amps, centers, cross, mid, norm = _mixture(spec, pp, model)
    order = np.argsort(centers)
    cuts = [-math.inf]
    cuts += [0.5 * (centers[order[i]] + centers[order[i + 1]]) for i in range(len(order) - 1)]
    cuts.append(math.inf)
    out = {}
    for rank, k in enumerate(order):
        lo, hi = cuts[rank], cuts[rank + 1]
        mass = ndtr((hi - mid) / model.sigma) - ndtr((lo - mid) / model.sigma)
        out[spec.eigenvalues[k]] = float((cross * mass).sum()) / norm
    return out
