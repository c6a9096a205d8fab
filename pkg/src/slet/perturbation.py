"""Rayleigh-Schrodinger series for a polynomially perturbed oscillator level.

The shifted-l expansion reduces the radial problem to a one-dimensional
harmonic oscillator (mass mu, scaled frequency omega) perturbed by
polynomial terms that enter at four successive orders of the formal
expansion parameter lambda:

    h(lambda) = p^2/(2 mu) + mu omega^2 x^2 / 2
                + lambda   (eps1 x + eps3 x^3)
                + lambda^2 (eps2 x^2 + eps4 x^4)
                + lambda^3 (delta1 x + delta3 x^3 + delta5 x^5)
                + lambda^4 (delta2 x^2 + delta4 x^4 + delta6 x^6)

The energy corrections alpha1 and alpha2 consumed by the radial solver
are the lambda^2 and lambda^4 coefficients of the eigenvalue series of a
single level n.  They are computed here by the standard order-by-order
recursion in a truncated oscillator matrix basis.  All perturbation
matrices are banded (x^p couples states at most p quanta apart), so the
recursion terminates exactly: once the basis extends a dozen states past
the target level the coefficients are independent of its size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isfinite

import numpy as np

from .errors import BasisConvergenceError, ParityViolationError

# powers of x allowed at each lambda order (parity fixed by the expansion)
ALLOWED_POWERS = {1: (1, 3), 2: (2, 4), 3: (1, 3, 5), 4: (2, 4, 6)}

DEFAULT_BASIS_MARGIN = 40


def position_matrix(mu: float, omega: float, basis_size: int) -> np.ndarray:
    """Coordinate operator in the oscillator eigenbasis.

    Element (k, k+1) equals sqrt((k+1) / (2 mu omega)); the matrix is
    symmetric and zero elsewhere.
    """
    if basis_size < 2:
        raise ValueError("basis_size must be at least 2")
    if not mu * omega > 0.0:
        raise ValueError("mu * omega must be positive")
    k = np.arange(basis_size - 1, dtype=float)
    off = np.sqrt((k + 1.0) / (2.0 * mu * omega))
    return np.diag(off, 1) + np.diag(off, -1)


def position_power_matrix(mu: float, omega: float, basis_size: int,
                          power: int) -> np.ndarray:
    """Exact x**power in the truncated basis.

    Built by repeated multiplication in a basis padded by ``power``
    states and then cut back, so every retained element equals the
    untruncated value and the result is exactly (power)-banded.
    """
    if power < 0:
        raise ValueError("power must be non-negative")
    if power == 0:
        return np.eye(basis_size)
    x = position_matrix(mu, omega, basis_size + power)
    out = x
    for _ in range(power - 1):
        out = out @ x
    return np.ascontiguousarray(out[:basis_size, :basis_size])


@dataclass(frozen=True)
class AnharmonicProblem:
    """One perturbed oscillator level and its terms grouped by order.

    ``terms_by_order`` maps a lambda order in {1, 2, 3, 4} to a sequence
    of (power, coefficient) pairs; the powers must follow the parity
    pattern of :data:`ALLOWED_POWERS`.
    """

    mu: float
    omega: float
    level: int
    terms_by_order: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be a non-negative integer")
        if not self.mu * self.omega > 0.0:
            raise ValueError("mu * omega must be positive")
        for order, terms in self.terms_by_order.items():
            if order not in ALLOWED_POWERS:
                raise ValueError(f"unsupported perturbation order {order}")
            for power, coeff in terms:
                if power not in ALLOWED_POWERS[order]:
                    raise ValueError(
                        f"x^{power} is not admissible at order {order}; "
                        f"allowed powers are {ALLOWED_POWERS[order]}")
                if not isfinite(coeff):
                    raise ValueError("perturbation coefficients must be finite")


@dataclass(frozen=True)
class SeriesCoefficients:
    """Coefficients of lambda^1..lambda^4 in the eigenvalue series."""

    c1: float
    c2: float
    c3: float
    c4: float


def _run_recursion(problem: AnharmonicProblem, max_order: int, size: int):
    mu, omega, n = problem.mu, problem.omega, problem.level
    powers = sorted({p for terms in problem.terms_by_order.values()
                     for p, _ in terms})
    xpow = {p: position_power_matrix(mu, omega, size, p) for p in powers}
    w = {}
    for order, terms in problem.terms_by_order.items():
        mat = np.zeros((size, size))
        for power, coeff in terms:
            if coeff != 0.0:
                mat += coeff * xpow[power]
        w[order] = mat

    e0 = (np.arange(size) + 0.5) * omega
    gap = e0 - e0[n]
    green = np.zeros(size)
    mask = np.arange(size) != n
    green[mask] = 1.0 / gap[mask]

    psi = [np.zeros(size)]
    psi[0][n] = 1.0
    energies = []
    for k in range(1, max_order + 1):
        applied = [w[j] @ psi[k - j] for j in w if j <= k]
        ek = float(sum(vec[n] for vec in applied)) if applied else 0.0
        energies.append(ek)
        rhs = -sum(applied) if applied else np.zeros(size)
        for m in range(1, k + 1):
            rhs = rhs + energies[m - 1] * psi[k - m]
        psi.append(green * rhs)
    return energies


def rspt_coefficients(problem: AnharmonicProblem, max_order: int = 4,
                      basis_size: int | None = None,
                      check_convergence: bool = True) -> SeriesCoefficients:
    """Eigenvalue series coefficients of level n through lambda^max_order.

    Parameters
    ----------
    problem : AnharmonicProblem
        The level and the perturbation terms grouped by lambda order.
    max_order : int
        Highest lambda order to evaluate (1..4); higher coefficients of
        the returned record are zero.
    basis_size : int, optional
        Truncated basis dimension, default ``level + 40``.  Must be at
        least ``level + 20``.
    check_convergence : bool
        Re-run with a doubled basis and require every coefficient to be
        reproduced to 1e-9 relative; the doubled-basis values are the
        ones returned.

    Raises
    ------
    BasisConvergenceError
        If doubling the basis still moves a coefficient.
    """
    if max_order not in (1, 2, 3, 4):
        raise ValueError("max_order must be in 1..4")
    if basis_size is None:
        basis_size = problem.level + DEFAULT_BASIS_MARGIN
    if basis_size < problem.level + 20:
        raise ValueError("basis_size must be at least level + 20")

    coeffs = _run_recursion(problem, max_order, basis_size)
    if check_convergence:
        doubled = _run_recursion(problem, max_order, 2 * basis_size)
        # floor keeps rounding noise around exact zeros from tripping the check
        scale = (problem.level + 0.5) * abs(problem.omega)
        for mat in (problem.terms_by_order or {}).values():
            scale += sum(abs(c) for _, c in mat)
        floor = 1e-12 * max(scale, 1e-30)
        for a, b in zip(coeffs, doubled):
            if abs(b - a) > 1e-9 * max(abs(b), floor):
                raise BasisConvergenceError(
                    f"series coefficient moved from {a!r} to {b!r} when the "
                    f"basis grew from {basis_size} to {2 * basis_size}")
        coeffs = doubled
    padded = list(coeffs) + [0.0] * (4 - len(coeffs))
    return SeriesCoefficients(*padded)


def alpha_from_series(coeffs: SeriesCoefficients,
                      parity_tolerance: float = 1e-10):
    """Extract (alpha1, alpha2) = (c2, c4) after checking parity zeros.

    The odd-order coefficients vanish for any admissible problem; a
    large c1 or c3 means the terms were assembled at the wrong orders.
    """
    for name, value in (("c1", coeffs.c1), ("c3", coeffs.c3)):
        if abs(value) > parity_tolerance:
            raise ParityViolationError(
                f"odd-order coefficient {name} = {value!r} is not zero; "
                "perturbation terms are mis-assigned")
    return coeffs.c2, coeffs.c4
