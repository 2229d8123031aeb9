"""Simultaneous polynomial root finding (Aberth-Ehrlich iteration).

Coefficients are ordered highest degree first, as in :func:`numpy.polyval`.
Every root is updated at once, which keeps the iteration stable on the nearly
coincident root pairs that appear when a double root splits at finite N.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError, InvalidArgumentError

__all__ = ["solve_polynomial", "cluster_roots", "polynomial_residuals"]

_EPS = np.finfo(float).eps


def _horner_with_bound(coeffs, z):
    """p(z), p'(z) and a running rounding-error bound for p(z), vectorized in z."""
    p = np.full_like(z, coeffs[0])
    dp = np.zeros_like(z)
    absz = np.abs(z)
    bound = np.full(z.shape, abs(coeffs[0]), dtype=float)
    for a in coeffs[1:]:
        dp = dp * z + p
        p = p * z + a
        bound = bound * absz + np.abs(p)
    return p, dp, bound


def polynomial_residuals(coeffs, roots) -> np.ndarray:
    """|p(z)| at each root, divided by the coefficient scale sum |a_k| |z|^k."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    roots = np.atleast_1d(np.asarray(roots, dtype=np.complex128))
    val = np.polyval(coeffs, roots)
    scale = np.polyval(np.abs(coeffs), np.abs(roots))
    return np.abs(val) / np.where(scale > 0, scale, 1.0)


def _initial_guesses(coeffs):
    n = len(coeffs) - 1
    radius = abs(coeffs[-1] / coeffs[0]) ** (1.0 / n)
    # slightly off the circle through the roots' geometric mean, rotated off
    # the real axis so conjugate pairs are not started symmetrically
    radius *= 1.0 + 1e-2
    angles = 2 * np.pi * np.arange(n) / n + 0.4 / n + 0.1
    return radius * np.exp(1j * angles)


def solve_polynomial(coeffs, *, max_iter: int = 1000, initial=None) -> np.ndarray:
    """All complex roots of a polynomial, repeated according to multiplicity.

    Parameters
    ----------
    coeffs : array_like
        Coefficients, highest degree first. The leading coefficient must be
        nonzero and the degree at least 1.
    max_iter : int
        Iteration cap for the Aberth sweep.
    initial : array_like, optional
        Starting approximations; defaults to points on a slightly enlarged
        circle of radius |a_n / a_0|^(1/n).

    Returns
    -------
    numpy.ndarray
        Roots sorted by (angle, modulus).

    Raises
    ------
    ConvergenceError
        If some root has not reached rounding-level residual after ``max_iter``
        sweeps. The exception's ``best`` attribute holds the last iterate.
    """
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
    if coeffs.ndim != 1 or coeffs.size < 2:
        raise InvalidArgumentError("polynomial degree must be at least 1")
    if coeffs[0] == 0:
        raise InvalidArgumentError("leading coefficient is zero")
    if not np.all(np.isfinite(coeffs)):
        raise InvalidArgumentError("coefficients must be finite")

    # roots at the origin
    nz = 0
    while coeffs.size - nz > 1 and coeffs[coeffs.size - 1 - nz] == 0:
        nz += 1
    core = coeffs[: coeffs.size - nz] / coeffs[0]
    zeros = np.zeros(nz, dtype=np.complex128)
    n = core.size - 1
    if n == 0:
        return zeros
    if n == 1:
        return _sorted(np.concatenate([[-core[1]], zeros]))

    z = np.asarray(initial, dtype=np.complex128) if initial is not None else _initial_guesses(core)
    if z.shape != (n,):
        raise InvalidArgumentError(f"expected {n} initial guesses, got {z.shape}")
    z = z.copy()
    active = np.ones(n, dtype=bool)
    for it in range(max_iter):
        p, dp, bound = _horner_with_bound(core, z)
        done = np.abs(p) <= 4 * _EPS * bound
        active &= ~done
        if not active.any():
            return _sorted(np.concatenate([z, zeros]))
        idx = np.flatnonzero(active)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p[idx] / dp[idx]
            diff = z[idx, None] - z[None, :]
            diff[np.arange(idx.size), idx] = np.inf
            repulsion = np.sum(1.0 / diff, axis=1)
            delta = ratio / (1.0 - ratio * repulsion)
        bad = ~np.isfinite(delta)
        if bad.any():
            # p'(z) = 0 or colliding iterates: nudge off the critical point
            delta[bad] = 1e-8 * (1 + np.abs(z[idx][bad])) * np.exp(1j * (it + 1.0))
        z[idx] -= delta
        # a root that stopped moving at rounding scale is as good as it gets
        tiny = np.abs(delta) <= 2 * _EPS * np.abs(z[idx])
        active[idx[tiny]] = False
    raise ConvergenceError(
        f"Aberth iteration did not converge in {max_iter} sweeps",
        best=_sorted(np.concatenate([z, zeros])),
        iterations=max_iter,
    )


def _sorted(roots):
    roots = np.asarray(roots, dtype=np.complex128)
    order = np.lexsort((np.abs(roots), np.round(np.angle(roots), 12)))
    return roots[order]


def cluster_roots(roots, tol: float = 1e-6) -> list[tuple[complex, int]]:
    """Group roots closer than ``tol`` (single linkage); return (mean, multiplicity)."""
    roots = list(np.asarray(roots, dtype=np.complex128))
    parent = list(range(len(roots)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(roots)):
        for j in range(i):
            if abs(roots[i] - roots[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i, r in enumerate(roots):
        groups.setdefault(find(i), []).append(r)
    out = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    out.sort(key=lambda item: (round(math.atan2(item[0].imag, item[0].real), 12), abs(item[0])))
    return out
