"""Probability-versus-iteration traces shared by the walk and the oracle search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["PredictionRecord", "SearchTrace", "first_argmax"]


def first_argmax(values) -> int:
    """Index of the maximum, smallest index on ties."""
    values = np.asarray(values)
    if values.size == 0:
        raise ValueError("empty sequence")
    return int(np.flatnonzero(values == values.max())[0])


@dataclass(frozen=True)
class PredictionRecord:
    """Closed-form success curve P_k = (3/(d+1)) sin^2(2k theta).

    ``theta`` solves sin(theta) = sqrt(3M / (N(d+1))); the first peak sits at
    k_max_pred = pi / (4 theta), approximated as (pi/4) sqrt(N(d+1)/(3M)).
    """

    N: int
    d: int
    M: int
    theta: float
    p_max_pred: float
    k_max_pred: float

    @classmethod
    def from_parameters(cls, N: int, d: int, M: int = 1) -> "PredictionRecord":
        s = math.sqrt(3 * M / (N * (d + 1)))
        theta = math.asin(s) if s <= 1 else math.pi / 2
        return cls(
            N=N,
            d=d,
            M=M,
            theta=theta,
            p_max_pred=3 / (d + 1),
            k_max_pred=(math.pi / 4) * math.sqrt(N * (d + 1) / (3 * M)),
        )

    def probability(self, k):
        """Predicted P_k; accepts scalars or arrays."""
        return self.p_max_pred * np.sin(2 * np.asarray(k, dtype=float) * self.theta) ** 2


@dataclass(frozen=True)
class SearchTrace:
    """Sampled success probability ``probabilities[i]`` after ``steps[i]`` iterations.

    For walks the iteration is one application of U; for the oracle search it is
    one application of G = DO.
    """

    steps: np.ndarray
    probabilities: np.ndarray
    prediction: PredictionRecord | None = None
    predicted: np.ndarray | None = None
    queries_per_iteration: int | None = None
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        steps = np.asarray(self.steps, dtype=np.int64)
        probs = np.asarray(self.probabilities, dtype=np.float64)
        if steps.shape != probs.shape:
            raise ValueError("steps and probabilities differ in length")
        steps.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "probabilities", probs)
        if self.predicted is not None:
            pred = np.asarray(self.predicted, dtype=np.float64)
            pred.setflags(write=False)
            object.__setattr__(self, "predicted", pred)

    def __len__(self):
        return len(self.steps)

    @property
    def k_max(self) -> int:
        return int(self.steps[first_argmax(self.probabilities)])

    @property
    def p_max(self) -> float:
        return float(self.probabilities.max())

    def rows(self):
        """Yield ``(k, P_k, P_pred)`` tuples; P_pred is None when absent."""
        pred = self.predicted
        for i, (k, p) in enumerate(zip(self.steps, self.probabilities)):
            yield int(k), float(p), (None if pred is None else float(pred[i]))
