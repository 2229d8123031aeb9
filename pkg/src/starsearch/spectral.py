"""Eigenvalues of the star-graph walk operator.

Writing z = lambda^2 for an eigenvalue lambda of U, the spectrum splits into

* the principal branch (nonzero amplitude sum S), where z solves
  (2/N) sum_j 1 / (z exp(-i phi_j) + 1) = 1. Grouping vertices by phase
  class and clearing denominators turns this into a degree-m polynomial for
  m distinct phases;
* the degenerate branch (S = 0), z = -exp(i phi_c) for every class with
  n_c >= 2, carrying n_c - 1 independent eigenvectors per sign of lambda.

The dense 2N x 2N matrix of U and its numerical eigendecomposition are kept
as an independent check of both branches.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import (
    InvalidArgumentError,
    NoSpeedupError,
    NumericalError,
    PoleError,
    ResourceError,
)
from .phases import phase_factor, wrap_phase
from .roots import cluster_roots, solve_polynomial
from .walk import PhaseProfile

__all__ = [
    "GroupedPhaseSpec",
    "EigenSolution",
    "PerturbativeRoot",
    "Eigenpairs",
    "NoSpeedupError",
    "cleared_polynomial",
    "eigen_residual",
    "grouped_polynomial",
    "zeroth_order_polynomial",
    "principal_eigenvalues",
    "degenerate_eigenvalues",
    "analytic_spectrum",
    "perturbative_double_root",
    "localization_angle",
    "dense_unitary",
    "dense_spectrum",
    "match_spectra",
    "principal_eigenvector",
    "degenerate_eigenvectors",
    "DEFAULT_TOLERANCES",
]

DEFAULT_TOLERANCES = {
    "pole": 1e-14,
    "residual": 1e-9,
    "unit_circle": 1e-9,
    "double_root_value": 1e-10,
    "double_root_slope": 1e-8,
    "double_root_cluster": 1e-6,
    "near_double_ratio": 4.0,
    "small_fraction": 0.1,
    "dense_cap": 2048,
}


@dataclass(frozen=True)
class GroupedPhaseSpec:
    """Distinct phases with multiplicities; x_c = n_c / N."""

    phases: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        phases = tuple(wrap_phase(float(p)) for p in self.phases)
        counts = tuple(int(c) for c in self.counts)
        if len(phases) != len(counts) or not phases:
            raise InvalidArgumentError("phases and counts must be nonempty and equal length")
        if any(c < 1 for c in counts):
            raise InvalidArgumentError("multiplicities must be positive")
        for a in range(len(phases)):
            for b in range(a):
                if abs(phases[a] - phases[b]) < 1e-15:
                    raise InvalidArgumentError(f"repeated phase {phases[a]:.6g}")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_profile(cls, profile: PhaseProfile) -> "GroupedPhaseSpec":
        return cls(tuple(p for p, _ in profile.classes), tuple(n for _, n in profile.classes))

    @classmethod
    def from_classes(cls, classes: Iterable[tuple[float, int]]) -> "GroupedPhaseSpec":
        classes = list(classes)
        return cls(tuple(p for p, _ in classes), tuple(n for _, n in classes))

    def to_profile(self) -> PhaseProfile:
        return PhaseProfile(list(zip(self.phases, self.counts)))

    @property
    def N(self) -> int:
        return sum(self.counts)

    @property
    def m(self) -> int:
        return len(self.phases)

    @property
    def fractions(self) -> np.ndarray:
        return np.array(self.counts, dtype=float) / self.N

    @property
    def factors(self) -> np.ndarray:
        return np.array([phase_factor(p) for p in self.phases])


@dataclass(frozen=True)
class EigenSolution:
    """One value of z = lambda^2 with its two eigenvalues of U.

    ``degeneracy`` counts independent eigenvectors per eigenvalue in the pair.
    """

    z: complex
    lambda_pair: tuple[complex, complex]
    branch: str
    residual: float
    degeneracy: int = 1
    class_index: int | None = None


@dataclass(frozen=True)
class PerturbativeRoot:
    """Splitting of a double root z0 of the N -> infinity polynomial.

    ``delta_z`` is the leading-order pair +/- sqrt(-2 f(z0) / f0''(z0)), with
    the + entry having the larger imaginary part. ``delta_z_refined`` solves
    the full quadratic f(z0) + f'(z0) dz + f''(z0) dz^2 / 2 = 0 instead.
    ``theta0`` is |delta_z| / 2, so z ~ z0 exp(+/- 2i theta0).
    """

    z0: complex
    delta_z: tuple[complex, complex]
    delta_z_refined: tuple[complex, complex]
    theta0: float
    order_estimate: str
    small_classes: tuple[int, ...]
    f0_value: float
    f0_slope: float

    @property
    def roots(self) -> tuple[complex, complex]:
        return (self.z0 + self.delta_z[0], self.z0 + self.delta_z[1])

    @property
    def refined_roots(self) -> tuple[complex, complex]:
        return (self.z0 + self.delta_z_refined[0], self.z0 + self.delta_z_refined[1])

    @property
    def eigenvalues(self) -> tuple[complex, ...]:
        """The four eigenvalues +/- sqrt(z0 + dz) of U, leading order."""
        out = []
        for z in self.roots:
            lam = cmath.sqrt(z)
            out.extend([lam, -lam])
        return tuple(out)


class Eigenpairs(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def _as_spec(spec) -> GroupedPhaseSpec:
    if isinstance(spec, GroupedPhaseSpec):
        return spec
    if isinstance(spec, PhaseProfile):
        return GroupedPhaseSpec.from_profile(spec)
    raise InvalidArgumentError(f"expected GroupedPhaseSpec or PhaseProfile, got {type(spec).__name__}")


def eigen_residual(z: complex, spec, *, pole_tol: float = DEFAULT_TOLERANCES["pole"]) -> float:
    """|(2/N) sum_c n_c / (z exp(-i phi_c) + 1) - 1|; zero exactly on the principal branch."""
    spec = _as_spec(spec)
    total = 0j
    for c, (e, n) in enumerate(zip(spec.factors, spec.counts)):
        denom = z / e + 1
        if abs(denom) < pole_tol:
            raise PoleError(c, spec.phases[c], abs(denom))
        total += n / denom
    return abs(2 * total / spec.N - 1)


def cleared_polynomial(factors: Sequence[complex], fractions: Sequence[float]) -> np.ndarray:
    """Clear denominators in (2/N) sum_c n_c / (z/e_c + 1) = 1.

    Returns prod_c (z + e_c) - 2 sum_c x_c e_c prod_{c' != c} (z + e_c'),
    highest degree first, for unit factors ``e_c`` and fractions ``x_c``.
    """
    factors = np.asarray(factors, dtype=np.complex128)
    poly = np.poly(-factors) if len(factors) else np.array([1.0 + 0j])
    poly = np.asarray(poly, dtype=np.complex128)
    for c, (e, x) in enumerate(zip(factors, fractions)):
        if x == 0:
            continue
        others = np.delete(factors, c)
        rest = np.asarray(np.poly(-others), dtype=np.complex128) if others.size else np.array([1.0 + 0j])
        poly[1:] -= 2 * x * e * rest
    return poly


def grouped_polynomial(spec) -> np.ndarray:
    """Monic degree-m polynomial in z whose roots are the principal-branch z values.

    Obtained by multiplying the eigenvalue sum by prod_c (z + exp(i phi_c)).
    Coefficients are highest degree first.
    """
    spec = _as_spec(spec)
    return cleared_polynomial(spec.factors, spec.fractions)


def _small_set(spec: GroupedPhaseSpec, small_classes) -> tuple[int, ...]:
    small = tuple(sorted(set(int(c) for c in small_classes)))
    if not small:
        raise InvalidArgumentError("need at least one small class")
    for c in small:
        if not 0 <= c < spec.m:
            raise InvalidArgumentError(f"unknown class index {c}")
    if len(small) == spec.m:
        raise InvalidArgumentError("every class is marked small; nothing is left at zeroth order")
    return small


def zeroth_order_polynomial(spec, small_classes) -> np.ndarray:
    """N -> infinity limit f0: small classes get x = 0, the rest are rescaled to sum to 1."""
    spec = _as_spec(spec)
    small = _small_set(spec, small_classes)
    x = spec.fractions.copy()
    x_small = x[list(small)].sum()
    x[list(small)] = 0.0
    x /= 1.0 - x_small
    return cleared_polynomial(spec.factors, x)


def principal_eigenvalues(spec, *, max_iter: int = 1000) -> list[EigenSolution]:
    """Solve the grouped polynomial; one EigenSolution per root z."""
    spec = _as_spec(spec)
    roots = solve_polynomial(grouped_polynomial(spec), max_iter=max_iter)
    out = []
    for z in roots:
        z = complex(z)
        lam = cmath.sqrt(z)
        out.append(
            EigenSolution(
                z=z,
                lambda_pair=(lam, -lam),
                branch="principal",
                residual=eigen_residual(z, spec),
            )
        )
    return out


def degenerate_eigenvalues(spec) -> list[EigenSolution]:
    """z = -exp(i phi_c) with degeneracy n_c - 1 for every class with n_c >= 2."""
    spec = _as_spec(spec)
    out = []
    for c, (phi, n) in enumerate(zip(spec.phases, spec.counts)):
        if n < 2:
            continue
        z = -phase_factor(phi)
        lam = phase_factor(wrap_phase(phi / 2 + math.pi / 2))
        out.append(
            EigenSolution(
                z=z,
                lambda_pair=(lam, -lam),
                branch="degenerate",
                residual=0.0,
                degeneracy=n - 1,
                class_index=c,
            )
        )
    return out


def analytic_spectrum(spec) -> np.ndarray:
    """All 2N eigenvalues of U from both branches, with multiplicity."""
    spec = _as_spec(spec)
    vals = []
    for sol in principal_eigenvalues(spec) + degenerate_eigenvalues(spec):
        vals.extend(list(sol.lambda_pair) * sol.degeneracy)
    return np.array(vals, dtype=np.complex128)


def _refine_double_root(f0, z, iters=20):
    # Newton on f0' lands on the critical point that the double root sits on
    d1 = np.polyder(f0)
    d2 = np.polyder(d1)
    for _ in range(iters):
        slope2 = np.polyval(d2, z)
        if slope2 == 0:
            break
        dz = np.polyval(d1, z) / slope2
        z = z - dz
        if abs(dz) <= 4 * np.finfo(float).eps * max(1.0, abs(z)):
            break
    return complex(z)


def _double_roots(f0, tol, f=None):
    roots = solve_polynomial(f0)
    found = []
    d1 = np.polyder(f0)
    for center, mult in cluster_roots(roots, tol["double_root_cluster"]):
        if mult < 2:
            continue
        z = _refine_double_root(f0, center)
        if abs(np.polyval(f0, z)) <= tol["double_root_value"] and abs(np.polyval(d1, z)) <= tol["double_root_slope"]:
            found.append(z)
    if found or f is None or len(d1) < 2:
        return found, roots
    # near-double roots: critical points of f0 where f0 is no larger than the
    # finite-N correction, e.g. unequal halves that only balance as N -> inf
    for w in solve_polynomial(d1):
        offset = abs(np.polyval(f, w) - np.polyval(f0, w))
        if abs(np.polyval(f0, w)) <= tol["near_double_ratio"] * offset:
            found.append(complex(w))
    return found, roots


def perturbative_double_root(spec, small_classes, *, tolerances: dict | None = None) -> PerturbativeRoot:
    """Split the double root of the N -> infinity polynomial at finite N.

    Setting the small classes' fractions to zero gives f0. When f0 has a double
    root z0, f(z0 + dz) ~ f(z0) + f0''(z0) dz^2 / 2 = 0 so dz = O(N^-1/2),
    the regime with a quadratic speedup. If several double roots exist the
    one nearest a small class's pole -exp(i phi_c) is used.

    Without an exact double root, a critical point w of f0 with
    |f0(w)| <= near_double_ratio * |f(w) - f0(w)| is used instead; this covers
    class sizes such as 150/149 that only balance in the limit.

    Raises
    ------
    NoSpeedupError
        If f0 has no double root; simple roots then only move by O(1/N).
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    spec = _as_spec(spec)
    small = _small_set(spec, small_classes)
    x_small = float(spec.fractions[list(small)].sum())
    if x_small > tol["small_fraction"]:
        raise InvalidArgumentError(
            f"small classes carry fraction {x_small:.3g} > {tol['small_fraction']}"
        )
    f = grouped_polynomial(spec)
    f0 = zeroth_order_polynomial(spec, small)
    doubles, simple = _double_roots(f0, tol, f)
    if not doubles:
        d0 = np.polyder(f0)
        first = {complex(z): complex(-np.polyval(f, z) / np.polyval(d0, z)) for z in simple}
        raise NoSpeedupError(
            "zeroth-order polynomial has no double root; corrections are O(1/N)",
            first_order=first,
        )
    poles = [-spec.factors[c] for c in small]
    z0 = min(doubles, key=lambda z: min(abs(z - p) for p in poles))

    f_val = complex(np.polyval(f, z0))
    f0_curv = complex(np.polyval(np.polyder(f0, 2), z0))
    lead = cmath.sqrt(-2 * f_val / f0_curv)
    lead_pair = _order_pair(lead, -lead)

    a2 = complex(np.polyval(np.polyder(f, 2), z0)) / 2
    a1 = complex(np.polyval(np.polyder(f, 1), z0))
    disc = cmath.sqrt(a1 * a1 - 4 * a2 * f_val)
    refined = _order_pair((-a1 + disc) / (2 * a2), (-a1 - disc) / (2 * a2))

    return PerturbativeRoot(
        z0=z0,
        delta_z=lead_pair,
        delta_z_refined=refined,
        theta0=abs(lead) / (2 * abs(z0)),
        order_estimate="N^-1/2",
        small_classes=small,
        f0_value=float(abs(np.polyval(f0, z0))),
        f0_slope=float(abs(np.polyval(np.polyder(f0), z0))),
    )


def _order_pair(a: complex, b: complex) -> tuple[complex, complex]:
    return (a, b) if a.imag >= b.imag else (b, a)


def localization_angle(profile, target_class: int) -> float:
    """theta0 such that the target class localizes after about pi/(2 theta0) steps.

    Uses the exact principal root nearest the perturbative estimate, and
    returns half its angular distance from the double root z0.
    """
    spec = _as_spec(profile)
    pert = perturbative_double_root(spec, [target_class])
    exact = np.array([s.z for s in principal_eigenvalues(spec)])
    z_plus = exact[np.argmin(np.abs(exact - pert.roots[0]))]
    return abs(cmath.phase(z_plus / pert.z0)) / 2


def dense_unitary(profile: PhaseProfile, *, cap: int = DEFAULT_TOLERANCES["dense_cap"]) -> np.ndarray:
    """Matrix of U in the basis (|1,0>..|N,0>, |0,1>..|0,N>).

    Block form [[0, diag(exp(i phi))], [t J - I, 0]] with t = 2/N.
    """
    N = profile.N
    if N > cap:
        raise ResourceError(f"N={N} exceeds the dense cap of {cap}")
    U = np.zeros((2 * N, 2 * N), dtype=np.complex128)
    idx = np.arange(N)
    U[idx, N + idx] = profile.vertex_factors
    U[N:, :N] = 2.0 / N
    U[N + idx, idx] -= 1.0
    return U


def dense_spectrum(matrix, *, cap: int = 2 * DEFAULT_TOLERANCES["dense_cap"], normal_tol: float = 1e-9) -> Eigenpairs:
    """Eigenvalues and eigenvectors (as columns) of a square matrix.

    Uses the complex Schur form; for a normal matrix (e.g. unitary) the Schur
    vectors are an orthonormal eigenbasis, including inside degenerate
    eigenspaces. Non-normal input falls back to :func:`numpy.linalg.eig`.
    """
    A = np.asarray(matrix, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] > cap:
        raise ResourceError(f"dimension {A.shape[0]} exceeds the cap of {cap}")
    try:
        T, Z = scipy.linalg.schur(A, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Schur decomposition failed: {exc}") from exc
    values = np.diag(T).copy()
    off = T - np.diag(values)
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)
    if A.size and np.max(np.abs(off)) > normal_tol * scale:
        try:
            values, Z = np.linalg.eig(A)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    return Eigenpairs(values, Z)


def match_spectra(a, b) -> tuple[float, np.ndarray]:
    """Optimal one-to-one matching of two eigenvalue multisets.

    Returns the largest matched distance and the permutation ``perm`` with
    a[i] paired to b[perm[i]].
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"spectra differ in size: {a.size} vs {b.size}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty_like(cols)
    perm[rows] = cols
    return float(cost[rows, cols].max()) if a.size else 0.0, perm


def principal_eigenvector(profile: PhaseProfile, lam: complex):
    """Eigenvector for a principal-branch eigenvalue ``lam`` and its normalization.

    alpha_j = eta / (lam^2 exp(-i phi_j) + 1), beta_j = lam exp(-i phi_j) alpha_j,
    with eta > 0 fixed numerically so the vector has unit norm.
    """
    from .walk import WalkState

    e = profile.vertex_factors
    alpha = 1.0 / (lam * lam / e + 1.0)
    beta = lam / e * alpha
    norm = math.sqrt(float(np.sum(np.abs(alpha) ** 2 + np.abs(beta) ** 2)))
    eta = 1.0 / norm
    return WalkState(alpha * eta, beta * eta), eta


def degenerate_eigenvectors(profile: PhaseProfile, c: int, sign: int = +1) -> np.ndarray:
    """Orthonormal basis of the S = 0 eigenspace of class ``c``.

    Rows are 2N vectors in the (alpha, beta) ordering. The eigenvalue is
    sign * i * exp(i phi_c / 2). Amplitudes on the class members follow the
    discrete Fourier modes m = 1..n_c-1, which sum to zero.
    """
    profile.check_class(c)
    members = profile.members(c)
    n = members.size
    if n < 2:
        return np.zeros((0, 2 * profile.N), dtype=np.complex128)
    phi = profile.classes[c][0]
    lam = sign * phase_factor(wrap_phase(phi / 2 + math.pi / 2))
    q = np.arange(n)
    out = np.zeros((n - 1, 2 * profile.N), dtype=np.complex128)
    ef = profile.class_factors[c]
    for m in range(1, n):
        a = np.exp(2j * np.pi * q * m / n)
        out[m - 1, members] = a
        out[m - 1, profile.N + members] = lam / ef * a
    return out / math.sqrt(2 * n)
