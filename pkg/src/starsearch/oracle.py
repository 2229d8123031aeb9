"""Grover search with an oracle for a multivalued function f: {1..N} -> {0..d-1}.

Two ways of using the oracle are modelled:

``multi-phase``
    The ancilla sits in H_d|1>, so one query multiplies |j> by beta^{-f(j)}
    with beta = exp(2 pi i / d). Each value of f gets its own phase, which is
    the oracle analogue of the star-graph walk with d reflection phases.
``sign-flip``
    O^{-1} (I - 2 I x |0><0|) O with the ancilla in |0> flips the sign of
    exactly the marked inputs; O^{-1} = O^{d-1}, so one iteration costs d
    queries and the search reduces to standard Grover.

Only the N-dimensional main register is simulated. The ancilla's effect is
the diagonal phase table, which :func:`joint_oracle_diagonal` checks against
an explicit (N d)-dimensional simulation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    InvalidArgumentError,
    InvalidDimensionError,
    InvalidInstanceError,
    RegimeWarning,
)
from .phases import phase_factors
from .roots import solve_polynomial
from .spectral import cleared_polynomial
from .trace import PredictionRecord, SearchTrace

__all__ = [
    "MODES",
    "OracleInstance",
    "RegisterState",
    "GroverOperator",
    "Verification",
    "OracleEigensystem",
    "build_oracle",
    "hadamard_d",
    "uniform_register",
    "grover_iterate",
    "run_search",
    "predicted_trace",
    "verify_solution",
    "oracle_polynomial",
    "oracle_eigensystem",
    "dense_grover",
    "joint_oracle_diagonal",
    "regime_warnings",
    "auto_window",
]

MODES = ("multi-phase", "sign-flip")


def regime_warnings(N: int, d: int, M: int) -> list[str]:
    """Reasons (N, d, M) lies outside N >> d, M << N; empty when inside."""
    out = []
    if M / N > 0.1:
        out.append(f"M/N = {M / N:.3g} > 0.1")
    if d >= N:
        out.append(f"d = {d} >= N = {N}")
    return out


@dataclass(frozen=True, eq=False)
class OracleInstance:
    """Function table ``f`` (0-based array, f[j-1] = f(j)) with values in 0..d-1.

    ``even`` asserts that every nonzero value occurs exactly (N - M)/(d - 1)
    times, and is checked on construction.
    """

    d: int
    f: np.ndarray
    mode: str = "multi-phase"
    even: bool = False

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 2:
            raise InvalidArgumentError(f"d must be an integer >= 2, got {self.d!r}")
        f = np.array(self.f, dtype=np.int64)
        if f.ndim != 1 or f.size == 0:
            raise InvalidDimensionError("f must be a nonempty 1-D table")
        if f.min() < 0 or f.max() >= self.d:
            raise InvalidArgumentError(f"f values must lie in 0..{self.d - 1}")
        if self.mode not in MODES:
            raise InvalidArgumentError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        f.setflags(write=False)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "f", f)
        if self.M == 0:
            raise InvalidInstanceError("f has no zero, so nothing is marked")
        if self.even:
            share, rem = divmod(self.N - self.M, self.d - 1)
            counts = self.value_counts()
            if rem or any(counts[v] != share for v in range(1, self.d)):
                raise InvalidInstanceError(
                    f"value counts {counts} are not even ({self.N - self.M} over {self.d - 1} values)"
                )

    @property
    def N(self) -> int:
        return self.f.size

    @property
    def marked(self) -> np.ndarray:
        """1-based labels j with f(j) = 0."""
        return np.flatnonzero(self.f == 0) + 1

    @property
    def M(self) -> int:
        return int(np.count_nonzero(self.f == 0))

    def value_counts(self) -> dict[int, int]:
        counts = np.bincount(self.f, minlength=self.d)
        return {v: int(counts[v]) for v in range(self.d)}

    def evaluate(self, j: int) -> int:
        """f(j) for a 1-based label."""
        if not 1 <= j <= self.N:
            raise InvalidArgumentError(f"j={j} outside 1..{self.N}")
        return int(self.f[j - 1])

    def with_mode(self, mode: str) -> "OracleInstance":
        return OracleInstance(self.d, self.f, mode=mode, even=self.even)

    def permuted(self, perm) -> "OracleInstance":
        return OracleInstance(self.d, self.f[np.asarray(perm)], mode=self.mode, even=self.even)

    def regime_warnings(self) -> list[str]:
        return regime_warnings(self.N, self.d, self.M)


@dataclass(frozen=True, eq=False)
class RegisterState:
    """Amplitudes of the main register over |1>..|N>."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128)
        if a.ndim != 1 or a.size == 0:
            raise InvalidDimensionError("register amplitudes must be a nonempty 1-D array")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def N(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def uniform_register(N: int) -> RegisterState:
    """(1/sqrt N) sum_j |j>, i.e. (H_d |0>)^n when N = d^n."""
    if N < 1:
        raise InvalidDimensionError(f"N must be positive, got {N}")
    return RegisterState(np.full(N, 1 / math.sqrt(N), dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class GroverOperator:
    """G = D O as an action: diagonal oracle phases, then inversion about the mean."""

    phases: np.ndarray
    mode: str
    queries_per_iteration: int

    @property
    def N(self) -> int:
        return self.phases.size

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        psi = self.phases * amplitudes
        return 2 * psi.mean() - psi

    def matrix(self) -> np.ndarray:
        """Dense N x N matrix (2/N) J O - O, for cross-checks at small N."""
        N = self.N
        return (2.0 / N) * np.ones((N, 1)) * self.phases[None, :] - np.diag(self.phases)


def build_oracle(instance: OracleInstance, mode: str | None = None) -> GroverOperator:
    """Grover operator for ``instance`` in its own mode (or ``mode`` if given)."""
    mode = instance.mode if mode is None else mode
    if instance.d < 2:
        raise InvalidArgumentError("d must be >= 2")
    if instance.M == 0:
        raise InvalidInstanceError("empty marked set")
    if mode == "multi-phase":
        # beta^{-v} for each value v
        table = phase_factors(-2 * math.pi * np.arange(instance.d) / instance.d)
        phases = table[instance.f]
        queries = 1
    elif mode == "sign-flip":
        phases = np.where(instance.f == 0, -1.0, 1.0).astype(np.complex128)
        queries = instance.d
    else:
        raise InvalidArgumentError(f"unknown mode {mode!r}; expected one of {MODES}")
    phases.setflags(write=False)
    return GroverOperator(phases=phases, mode=mode, queries_per_iteration=queries)


def hadamard_d(d: int) -> np.ndarray:
    """Normalized d-dimensional Fourier 'Hadamard': entries beta^{jk} / sqrt(d)."""
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidArgumentError(f"d must be an integer >= 2, got {d!r}")
    jk = np.outer(np.arange(d), np.arange(d)) % d
    return np.exp(2j * np.pi * jk / d) / math.sqrt(d)


def grover_iterate(state: RegisterState, op: GroverOperator, k: int) -> RegisterState:
    """Apply G exactly ``k`` times, O(N) per iteration."""
    if state.N != op.N:
        raise InvalidDimensionError(f"state has N={state.N}, operator has N={op.N}")
    if k < 0:
        raise InvalidArgumentError(f"k must be nonnegative, got {k}")
    psi = state.amplitudes
    for _ in range(k):
        psi = op.apply(psi)
    return RegisterState(psi) if k else state


def auto_window(N: int, d: int, M: int) -> int:
    return math.ceil(2 * PredictionRecord.from_parameters(N, d, M).k_max_pred)


def run_search(instance: OracleInstance, window: int | str = "auto", *, warn: bool = True) -> SearchTrace:
    """Success probability on the marked set for k = 0..window iterations.

    ``window="auto"`` scans up to ceil(2 k_max_pred). The returned trace carries
    the closed-form prediction alongside the simulated values.
    """
    N, d, M = instance.N, instance.d, instance.M
    if window == "auto":
        window = auto_window(N, d, M)
    if not isinstance(window, (int, np.integer)) or window < 0:
        raise InvalidArgumentError(f"window must be a nonnegative integer or 'auto', got {window!r}")
    notes = instance.regime_warnings()
    if warn:
        for note in notes:
            warnings.warn(f"outside the analysed regime: {note}", RegimeWarning, stacklevel=2)
    op = build_oracle(instance)
    marked = instance.f == 0
    psi = uniform_register(N).amplitudes
    probs = np.empty(window + 1)
    for k in range(window + 1):
        probs[k] = np.sum(np.abs(psi[marked]) ** 2)
        psi = op.apply(psi)
    prediction = PredictionRecord.from_parameters(N, d, M)
    steps = np.arange(window + 1)
    return SearchTrace(
        steps=steps,
        probabilities=probs,
        prediction=prediction,
        predicted=prediction.probability(steps),
        queries_per_iteration=op.queries_per_iteration,
        warnings=tuple(notes),
    )


def predicted_trace(N: int, d: int, M: int = 1, window: int | str = "auto"):
    """Closed-form record and the sequence (3/(d+1)) sin^2(2 k theta), k = 0..window."""
    notes = regime_warnings(N, d, M)
    if N < 10 * d:
        notes.append(f"N = {N} is not much larger than d = {d}")
    for note in notes:
        warnings.warn(f"outside the analysed regime: {note}", RegimeWarning, stacklevel=2)
    record = PredictionRecord.from_parameters(N, d, M)
    if window == "auto":
        window = math.ceil(2 * record.k_max_pred)
    return record, record.probability(np.arange(window + 1))


class Verification(NamedTuple):
    """Outcome of classically checking a measured candidate."""

    correct: bool
    expected_repetitions: float

    def __bool__(self):
        return self.correct


def verify_solution(instance: OracleInstance, j: int) -> Verification:
    """Check f(j) = 0; also report the expected number of searches, 1 / P_max_pred."""
    value = instance.evaluate(j)
    record = PredictionRecord.from_parameters(instance.N, instance.d, instance.M)
    return Verification(value == 0, 1.0 / record.p_max_pred)


def oracle_polynomial(N: int, d: int) -> np.ndarray:
    """Coefficients in z of (-z)^d - (2/(d-1)) ((N-d)/N) sum_{j=1}^{d-1} (-z)^j + 1.

    Valid for the even single-match instance; highest degree first.
    """
    if d < 2:
        raise InvalidArgumentError("d must be >= 2")
    w = (2.0 / (d - 1)) * (N - d) / N
    # ascending powers of z, then reversed
    asc = np.zeros(d + 1)
    asc[0] = 1.0
    for j in range(1, d):
        asc[j] = -w * (-1) ** j
    asc[d] = (-1) ** d
    return asc[::-1].astype(np.complex128)


def dense_grover(instance: OracleInstance) -> np.ndarray:
    return build_oracle(instance).matrix()


@dataclass(frozen=True)
class OracleEigensystem:
    """Principal eigenpairs of G for an even single-match instance.

    ``z1 = -exp(-2i theta)`` and ``z2 = -exp(2i theta)`` are the roots split off
    the double root -1. ``chi1``/``chi2`` are unit eigenvectors with
    coefficients eta / (beta^{-f(j)} + z) and eta > 0.
    """

    z1: complex
    z2: complex
    theta: float
    sin2theta: float
    sin2theta_pred: float
    eta1: float
    eta2: float
    eta_pred: float
    chi1: np.ndarray
    chi2: np.ndarray
    marked_overlap1: complex
    marked_overlap2: complex
    initial_overlap1: complex
    initial_overlap2: complex
    marked_overlap_pred: complex
    initial_overlap_pred: float
    other_roots: tuple[complex, ...]
    other_etas: tuple[float, ...]
    eta_bound: float
    warnings: tuple[str, ...] = field(default=())



def _eigvec(phases: np.ndarray, z: complex):
    c = 1.0 / (phases + z)
    eta = 1.0 / float(np.linalg.norm(c))
    return c * eta, eta


def oracle_eigensystem(instance: OracleInstance) -> OracleEigensystem:
    """Eigenvalues z1, z2 of G nearest -1 with eigenvectors and overlap scalars.

    Overlaps reported: <j0|chi> for the (first) marked input, and <chi|psi0>
    with the uniform start. The other principal roots' normalizations are
    compared with the bound 2/sqrt(N).
    """
    N, d, M = instance.N, instance.d, instance.M
    notes = list(instance.regime_warnings())
    if M != 1:
        notes.append(f"analysis assumes a single match, got M={M}")
    if not instance.even:
        notes.append("value distribution is not flagged even")
    for note in notes:
        warnings.warn(f"outside the analysed regime: {note}", RegimeWarning, stacklevel=2)

    op = build_oracle(instance, "multi-phase")
    counts = np.bincount(instance.f, minlength=d)
    present = np.flatnonzero(counts)
    # sum_j 1/(1 + beta^{f(j)} z) = N/2 is the walk condition with
    # exp(i phi) = beta^{-f}; clear it over the values that occur
    poly = cleared_polynomial(np.exp(-2j * np.pi * present / d), counts[present] / N)
    roots = solve_polynomial(poly)
    order = np.argsort(np.abs(roots + 1))
    pair = roots[order[:2]]
    z1 = complex(pair[np.argmax(pair.imag)])  # -1 + i * ...
    z2 = complex(pair[np.argmin(pair.imag)])
    rest = tuple(complex(z) for z in roots[order[2:]])

    chi1, eta1 = _eigvec(op.phases, z1)
    chi2, eta2 = _eigvec(op.phases, z2)
    j0 = int(instance.marked[0]) - 1
    psi0 = uniform_register(N).amplitudes
    theta = _theta_from_z1(z1)
    sin2 = math.sin(2 * theta)
    other_etas = tuple(_eigvec(op.phases, z)[1] for z in rest)
    return OracleEigensystem(
        z1=z1,
        z2=z2,
        theta=theta,
        sin2theta=sin2,
        sin2theta_pred=math.sqrt(12 / (N * (d + 1))),
        eta1=eta1,
        eta2=eta2,
        eta_pred=math.sqrt(6 / (N * (d + 1))),
        chi1=chi1,
        chi2=chi2,
        marked_overlap1=complex(chi1[j0]),
        marked_overlap2=complex(chi2[j0]),
        initial_overlap1=complex(np.vdot(chi1, psi0)),
        initial_overlap2=complex(np.vdot(chi2, psi0)),
        marked_overlap_pred=-1j / math.sqrt(2),
        initial_overlap_pred=-math.sqrt(3 / (2 * (d + 1))),
        other_roots=rest,
        other_etas=other_etas,
        eta_bound=2 / math.sqrt(N),
        warnings=tuple(notes),
    )


def _theta_from_z1(z1: complex) -> float:
    # z1 = -exp(-2i theta)  =>  exp(-2i theta) = -z1
    return -math.atan2((-z1).imag, (-z1).real) / 2


def joint_oracle_diagonal(instance: OracleInstance, mode: str | None = None):
    """Brute-force the oracle on the (N d)-dimensional register+ancilla space.

    The query is the permutation |j>|k> -> |j>|k + f(j) mod d>. Multi-phase
    mode feeds the ancilla H_d|1>; sign-flip mode feeds |0> and applies
    O^{d-1} (I - 2 I x |0><0|) O. Returns the effective diagonal on the main
    register and the largest deviation of the ancilla from its input state.
    """
    mode = instance.mode if mode is None else mode
    N, d = instance.N, instance.d
    dim = N * d
    src = np.arange(dim)
    j, k = np.divmod(src, d)
    dst = j * d + (k + instance.f[j]) % d
    O = np.zeros((dim, dim))
    O[dst, src] = 1.0
    if mode == "multi-phase":
        anc = hadamard_d(d)[:, 1]
        composite = O
    elif mode == "sign-flip":
        anc = np.zeros(d, dtype=np.complex128)
        anc[0] = 1.0
        reflect = np.ones(dim)
        reflect[k == 0] = -1.0
        composite = np.linalg.matrix_power(O, d - 1) @ (reflect[:, None] * O)
    else:
        raise InvalidArgumentError(f"unknown mode {mode!r}")
    diag = np.empty(N, dtype=np.complex128)
    leak = 0.0
    for jj in range(N):
        vec = np.zeros(dim, dtype=np.complex128)
        vec[jj * d : (jj + 1) * d] = anc
        out = composite @ vec
        block = out[jj * d : (jj + 1) * d]
        diag[jj] = np.vdot(anc, block)
        residual = out.copy()
        residual[jj * d : (jj + 1) * d] -= diag[jj] * anc
        leak = max(leak, float(np.max(np.abs(residual))))
    return diag, leak
