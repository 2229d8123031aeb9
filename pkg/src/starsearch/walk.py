"""Scattering quantum walk on a star graph.

The particle lives on the N edges of a star graph, each carrying two directed
states: ``|j,0>`` (moving from rim vertex j toward the hub) with amplitude
``alpha[j]`` and ``|0,j>`` (moving from the hub toward rim vertex j) with
amplitude ``beta[j]``. One step of the walk is

    alpha'[j] = exp(i phi_j) * beta[j]
    beta'[j]  = t * S - alpha[j],     S = sum_k alpha[k],  t = 2/N

so a step costs O(N): the hub scattering only needs the shared sum S.

Arrays are 0-indexed; vertex ``j`` in the 1..N labelling is index ``j - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidDimensionError
from .phases import phase_factor, wrap_phase
from .trace import SearchTrace

__all__ = [
    "PhaseProfile",
    "WalkState",
    "EdgeDistribution",
    "uniform_initial",
    "step",
    "evolve",
    "edge_probabilities",
    "localization_curve",
    "grover_profile",
    "three_phase_profile",
    "NORM_TOL",
]

NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PhaseProfile:
    """Reflection phases of the N rim vertices, grouped into phase classes.

    ``classes`` lists ``(phase, count)`` pairs with distinct phases in (-pi, pi].
    ``vertex_class[j]`` gives the class of vertex index j. The default layout
    puts the classes in contiguous blocks in the listed order; use
    :meth:`from_vertex_phases` for an arbitrary layout.
    """

    classes: tuple[tuple[float, int], ...]
    vertex_class: np.ndarray

    def __init__(self, classes: Sequence[tuple[float, int]], vertex_class=None):
        cls_list = []
        for phase, count in classes:
            count = int(count)
            if count < 1:
                raise InvalidArgumentError(f"class count must be positive, got {count}")
            cls_list.append((wrap_phase(float(phase)), count))
        if not cls_list:
            raise InvalidDimensionError("a phase profile needs at least one class")
        phases = [p for p, _ in cls_list]
        for a in range(len(phases)):
            for b in range(a):
                if abs(phases[a] - phases[b]) < 1e-15:
                    raise InvalidArgumentError(
                        f"classes {b} and {a} share the phase {phases[a]:.6g}"
                    )
        counts = np.array([c for _, c in cls_list])
        n = int(counts.sum())
        if vertex_class is None:
            vc = np.repeat(np.arange(len(cls_list)), counts)
        else:
            vc = np.asarray(vertex_class, dtype=np.int64).copy()
            if vc.shape != (n,):
                raise InvalidDimensionError(
                    f"vertex_class has shape {vc.shape}, expected ({n},)"
                )
            if vc.min() < 0 or vc.max() >= len(cls_list):
                raise InvalidArgumentError("vertex_class refers to an unknown class")
            if not np.array_equal(np.bincount(vc, minlength=len(cls_list)), counts):
                raise InvalidArgumentError("vertex_class disagrees with class counts")
        vc.setflags(write=False)
        object.__setattr__(self, "classes", tuple(cls_list))
        object.__setattr__(self, "vertex_class", vc)

    @classmethod
    def from_vertex_phases(cls, phases, class_order: Sequence[float] | None = None):
        """Build a profile from one phase per vertex (any layout).

        Classes appear in order of first occurrence unless ``class_order`` is given.
        """
        wrapped = [wrap_phase(float(p)) for p in phases]
        if not wrapped:
            raise InvalidDimensionError("need at least one vertex")
        order = [wrap_phase(float(p)) for p in class_order] if class_order else []
        for p in wrapped:
            if not any(abs(p - q) < 1e-15 for q in order):
                order.append(p)
        index = []
        for p in wrapped:
            index.append(next(i for i, q in enumerate(order) if abs(p - q) < 1e-15))
        counts = np.bincount(index, minlength=len(order))
        if np.any(counts == 0):
            raise InvalidArgumentError("class_order lists a phase no vertex uses")
        return cls(list(zip(order, counts.tolist())), vertex_class=index)

    @property
    def N(self) -> int:
        return len(self.vertex_class)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def class_phases(self) -> np.ndarray:
        return np.array([p for p, _ in self.classes])

    @property
    def counts(self) -> np.ndarray:
        return np.array([c for _, c in self.classes])

    @property
    def fractions(self) -> np.ndarray:
        return self.counts / self.N

    @cached_property
    def class_factors(self) -> np.ndarray:
        # exp(i phi_c), computed once per class
        return np.array([phase_factor(p) for p, _ in self.classes])

    @cached_property
    def vertex_factors(self) -> np.ndarray:
        f = self.class_factors[self.vertex_class]
        f.setflags(write=False)
        return f

    @property
    def vertex_phases(self) -> np.ndarray:
        return self.class_phases[self.vertex_class]

    def class_of(self, j: int) -> int:
        """Class index of vertex ``j`` (1-based vertex label)."""
        if not 1 <= j <= self.N:
            raise InvalidArgumentError(f"vertex {j} outside 1..{self.N}")
        return int(self.vertex_class[j - 1])

    def members(self, c: int) -> np.ndarray:
        """0-based vertex indices belonging to class ``c``."""
        self.check_class(c)
        return np.flatnonzero(self.vertex_class == c)

    def permuted(self, perm) -> "PhaseProfile":
        """Relabel vertices: new vertex i carries the phase of old vertex perm[i]."""
        perm = np.asarray(perm)
        return PhaseProfile(self.classes, vertex_class=self.vertex_class[perm])

    def check_class(self, c: int):
        if not isinstance(c, (int, np.integer)) or not 0 <= c < self.num_classes:
            raise InvalidArgumentError(
                f"unknown class index {c!r}; profile has {self.num_classes} classes"
            )

    def __eq__(self, other):
        if not isinstance(other, PhaseProfile):
            return NotImplemented
        return self.classes == other.classes and np.array_equal(
            self.vertex_class, other.vertex_class
        )

    def __hash__(self):
        return hash((self.classes, self.vertex_class.tobytes()))

    def __repr__(self):
        body = ", ".join(f"({p:.6g}, {n})" for p, n in self.classes)
        return f"PhaseProfile(N={self.N}, classes=[{body}])"


def grover_profile(N: int, marked: int = 1) -> PhaseProfile:
    """One vertex (label ``marked``) with phase pi, all others 0."""
    if N < 2:
        raise InvalidDimensionError("the Grover profile needs N >= 2")
    phases = np.zeros(N)
    phases[marked - 1] = math.pi
    return PhaseProfile.from_vertex_phases(phases, class_order=[math.pi, 0.0])


def three_phase_profile(N: int, n3: int = 1, split: tuple[int, int] | None = None):
    """Phases 2pi/3, -2pi/3 on the two halves of the rim with ``n3`` zeros mixed in.

    Zeros occupy vertices 1..n31 of the first half and the first n32 vertices of
    the second half. The first half has ceil(N/2) vertices, so odd N with
    ``n3=1`` gives counts ((N-1)/2, (N-1)/2, 1). Class order is
    (2pi/3, -2pi/3, 0).
    """
    if split is None:
        split = ((n3 + 1) // 2, n3 // 2)
    n31, n32 = split
    if n31 + n32 != n3 or n31 < 0 or n32 < 0:
        raise InvalidArgumentError(f"split {split} does not add up to n3={n3}")
    half = (N + 1) // 2
    if n3 < 1 or n31 >= half or n32 >= N - half:
        raise InvalidArgumentError(f"cannot place n3={n3} zeros in N={N} edges")
    a = 2 * math.pi / 3
    phases = np.empty(N)
    phases[:half] = a
    phases[half:] = -a
    phases[:n31] = 0.0
    phases[half : half + n32] = 0.0
    return PhaseProfile.from_vertex_phases(phases, class_order=[a, -a, 0.0])


@dataclass(frozen=True, eq=False)
class WalkState:
    """Amplitudes ``alpha`` on ``|j,0>`` and ``beta`` on ``|0,j>``; read-only arrays."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a = np.array(self.alpha, dtype=np.complex128)
        b = np.array(self.beta, dtype=np.complex128)
        if a.ndim != 1 or a.shape != b.shape:
            raise InvalidDimensionError(
                f"alpha and beta must be 1-D of equal length, got {a.shape}, {b.shape}"
            )
        if a.size == 0:
            raise InvalidDimensionError("a walk state needs N >= 1 edges")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def from_amplitudes(cls, alpha, beta, *, normalize=False, tol=NORM_TOL):
        """Build a state, checking unit norm (or rescaling when ``normalize``)."""
        state = cls(alpha, beta)
        nrm = state.norm()
        if normalize:
            if nrm == 0:
                raise InvalidArgumentError("cannot normalize the zero vector")
            return cls(state.alpha / nrm, state.beta / nrm)
        if abs(nrm - 1) > tol:
            raise InvalidArgumentError(f"state norm is {nrm!r}, expected 1")
        return state

    @classmethod
    def from_vector(cls, vec):
        """Split a 2N vector ordered (alpha_1..alpha_N, beta_1..beta_N)."""
        vec = np.asarray(vec)
        if vec.ndim != 1 or vec.size % 2:
            raise InvalidDimensionError("expected a 1-D vector of even length")
        n = vec.size // 2
        return cls(vec[:n], vec[n:])

    @property
    def N(self) -> int:
        return self.alpha.size

    def to_vector(self) -> np.ndarray:
        """Concatenate (alpha, beta); the basis order used by dense_unitary."""
        return np.concatenate([self.alpha, self.beta])

    def norm(self) -> float:
        return math.sqrt(float(np.vdot(self.alpha, self.alpha).real + np.vdot(self.beta, self.beta).real))

    def permuted(self, perm) -> "WalkState":
        perm = np.asarray(perm)
        return WalkState(self.alpha[perm], self.beta[perm])

    def __eq__(self, other):
        if not isinstance(other, WalkState):
            return NotImplemented
        return np.array_equal(self.alpha, other.alpha) and np.array_equal(self.beta, other.beta)

    __hash__ = None


@dataclass(frozen=True)
class EdgeDistribution:
    """Probability of finding the particle on each edge, p_j = |alpha_j|^2 + |beta_j|^2."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def __len__(self):
        return self.p.size

    def __getitem__(self, j):
        return self.p[j]

    def class_probability(self, profile: PhaseProfile, c: int) -> float:
        return float(self.p[profile.members(c)].sum())

    def total(self) -> float:
        return float(self.p.sum())


def uniform_initial(N: int, kind: str = "rim-to-hub") -> WalkState:
    """Uniform superposition over edges.

    ``"rim-to-hub"``: (1/sqrt N) sum_j |j,0>.
    ``"both-directions"``: (1/sqrt 2N) sum_j (|j,0> + |0,j>).
    """
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidDimensionError(f"N must be a positive integer, got {N!r}")
    if kind == "rim-to-hub":
        return WalkState(np.full(N, 1 / math.sqrt(N)), np.zeros(N))
    if kind == "both-directions":
        amp = 1 / math.sqrt(2 * N)
        return WalkState(np.full(N, amp), np.full(N, amp))
    raise InvalidArgumentError(f"unknown initial-state kind {kind!r}")


def _check_dims(state: WalkState, profile: PhaseProfile):
    if state.N != profile.N:
        raise InvalidDimensionError(
            f"state has N={state.N} edges but the profile has N={profile.N}"
        )


def _step_arrays(alpha, beta, factors, t):
    s = alpha.sum()
    return factors * beta, t * s - alpha


def step(state: WalkState, profile: PhaseProfile) -> WalkState:
    """Advance the walk by one application of U (O(N))."""
    _check_dims(state, profile)
    a, b = _step_arrays(state.alpha, state.beta, profile.vertex_factors, 2.0 / profile.N)
    return WalkState(a, b)


def _evolve_arrays(state, profile, m):
    factors = profile.vertex_factors
    t = 2.0 / profile.N
    a, b = state.alpha, state.beta
    for _ in range(m):
        a, b = _step_arrays(a, b, factors, t)
    return a, b


def evolve(state: WalkState, profile: PhaseProfile, m: int) -> WalkState:
    """Apply ``m`` steps. The state is not renormalized along the way."""
    _check_dims(state, profile)
    if m < 0:
        raise InvalidArgumentError(f"step count must be nonnegative, got {m}")
    if m == 0:
        return state
    return WalkState(*_evolve_arrays(state, profile, m))


def edge_probabilities(state: WalkState) -> EdgeDistribution:
    return EdgeDistribution(np.abs(state.alpha) ** 2 + np.abs(state.beta) ** 2)


def default_window(profile: PhaseProfile, target_class: int) -> int:
    """2 * ceil(pi / (2 theta0)) from the predicted localization angle.

    theta0 is half the angle between the zeroth-order double root and its
    nearest exact root. Profiles with no double root, or whose target class is
    too large for the expansion, get a window of max(32, 2N).
    """
    from .spectral import NoSpeedupError, localization_angle

    profile.check_class(target_class)
    try:
        theta0 = localization_angle(profile, target_class)
    except (NoSpeedupError, InvalidArgumentError):
        return max(32, 2 * profile.N)
    return 2 * math.ceil(math.pi / (2 * theta0))


def localization_curve(
    profile: PhaseProfile, target_class: int, m_max: int | None = None
) -> SearchTrace:
    """Probability on the edges of ``target_class`` after m = 0..m_max steps.

    Starts from the uniform rim-to-hub state. ``m_max=None`` sizes the window
    from the predicted localization angle so the first peak is included.
    """
    profile.check_class(target_class)
    if m_max is None:
        m_max = default_window(profile, target_class)
    if m_max < 1:
        raise InvalidArgumentError(f"m_max must be >= 1, got {m_max}")
    members = profile.members(target_class)
    factors = profile.vertex_factors
    t = 2.0 / profile.N
    init = uniform_initial(profile.N, "rim-to-hub")
    a, b = init.alpha, init.beta
    probs = np.empty(m_max + 1)
    for m in range(m_max + 1):
        probs[m] = np.sum(np.abs(a[members]) ** 2 + np.abs(b[members]) ** 2)
        a, b = _step_arrays(a, b, factors, t)
    return SearchTrace(steps=np.arange(m_max + 1), probabilities=probs)
