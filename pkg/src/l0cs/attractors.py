"""Zero attractors.

Two surrogates of the l0 norm give two attraction functions ``g``:

* exponential, ``sum(1 - exp(-alpha |w|))`` after a first-order Taylor
  expansion, which yields the piecewise-linear

  .. math::
     g(x) = \\alpha^2 x + \\alpha \\;\\; (-1/\\alpha \\le x < 0), \\quad
     g(x) = \\alpha^2 x - \\alpha \\;\\; (0 < x \\le 1/\\alpha), \\quad
     0 \\text{ elsewhere};

* reciprocal, ``sum(|w| / (|w| + delta))``, whose gradient is
  ``delta sgn(x) / (|x| + delta)^2``.  The attraction is the descent
  direction, so here ``g(x) = -delta sgn(x) / (|x| + delta)^2``.

Both return exactly 0 at ``x = 0``, so exact zeros are fixed points, and both
satisfy ``x g(x) <= 0``.  The solvers add ``kappa * g(w)``; the functions here
return ``g`` alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class AttractorKind(str, enum.Enum):
    EXPONENTIAL = "exponential"
    RECIPROCAL = "reciprocal"


@dataclass(frozen=True)
class AttractorParams:
    """Which attractor to use and how hard it pulls.

    ``kappa`` is the product of step size and l0 penalty weight; the
    penalty weight itself never appears on its own.
    """

    kind: AttractorKind = AttractorKind.EXPONENTIAL
    alpha: float = 10.0
    delta: float = 0.01
    kappa: float = 2e-6

    def __post_init__(self):
        object.__setattr__(self, "kind", AttractorKind(self.kind))
        if self.kind is AttractorKind.EXPONENTIAL and not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.kind is AttractorKind.RECIPROCAL and not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not self.kappa >= 0:
            raise ValueError(f"kappa must be nonnegative, got {self.kappa}")

    @property
    def shape_param(self) -> float:
        return self.alpha if self.kind is AttractorKind.EXPONENTIAL else self.delta


def attract_exponential(x: float, alpha: float) -> float:
    if -1.0 / alpha <= x < 0:
        return alpha * alpha * x + alpha
    if 0 < x <= 1.0 / alpha:
        return alpha * alpha * x - alpha
    return 0.0


def attract_reciprocal(x: float, delta: float) -> float:
    if x == 0:
        return 0.0
    return -delta * np.sign(x) / (abs(x) + delta) ** 2


def exponential_vec(w: np.ndarray, alpha: float) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    inv = 1.0 / alpha
    out = alpha * alpha * w - alpha * np.sign(w)
    out[(w == 0) | (w < -inv) | (w > inv)] = 0.0
    return out


def reciprocal_vec(w: np.ndarray, delta: float) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    return -delta * np.sign(w) / (np.abs(w) + delta) ** 2 + 0.0  # no -0.0 at w = 0


def attract_vector(w: np.ndarray, params: AttractorParams) -> np.ndarray:
    """Apply the selected scalar attractor componentwise (unscaled by kappa)."""
    if params.kind is AttractorKind.EXPONENTIAL:
        return exponential_vec(w, params.alpha)
    return reciprocal_vec(w, params.delta)
