"""Shifted-l expansion solver for the reduced semi-relativistic radial problem.

The radial equation carries the relativistically corrected potential
gamma(r) = V - V^2/(2 eta) plus an energy-dependent coupling E V / eta.
Expanding around the point r0 where the leading effective potential is
extremal turns it into a perturbed oscillator in the shifted angular
momentum lbar = l - beta, with the shift beta chosen so the first
subleading energy term vanishes.  The pipeline is:

    solve_r0 -> geometry (xi, Q, omega) -> beta, lbar -> leading energy E0
    -> Taylor coefficients eps1..4 -> alpha1 -> E2 -> delta1..6 -> alpha2
    -> E3 -> binding energy and total mass

Q is treated as a continuous function Q(r0) while iterating and is
identified with lbar^2 only at the converged point, where the root
equation makes sqrt(Q) = lbar hold automatically.  The correction
coefficients alpha1 and alpha2 are defined by the perturbation module's
order-by-order series; a closed form for alpha1 is kept as a cross-check.
"""

from __future__ import annotations

import math
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import perturbation as pt
from .errors import (
    BracketingError,
    InternalInconsistencyError,
    MultipleRootsWarning,
    NoHarmonicRegimeError,
    NonMonotonePointError,
    SequencingError,
    SletError,
    UnphysicalCouplingError,
)
from .potentials import ParticlePair, PotentialModel

R0_SCAN_PANELS = 200


@dataclass(frozen=True)
class QuantumNumbers:
    """Radial quantum number n and orbital angular momentum l."""

    n: int
    l: int

    def __post_init__(self):
        if self.n < 0 or self.l < 0:
            raise ValueError("quantum numbers must be non-negative")


@dataclass(frozen=True)
class SolverSettings:
    """Knobs for the r0 root search and the perturbation series."""

    r0_bracket: tuple = (1e-3, 1e3)
    r0_tolerance: float = 1e-12
    max_iterations: int = 200
    pt_basis_size: int | None = None
    pt_enabled: bool = True

    def __post_init__(self):
        lo, hi = self.r0_bracket
        if not (0.0 < lo < hi):
            raise ValueError("r0_bracket bounds must be positive and ordered")
        if not 0.0 < self.r0_tolerance < 1.0:
            raise ValueError("r0_tolerance must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True)
class Geometry:
    """Expansion-point quantities xi, Q and the scaled frequency omega."""

    xi: float
    Q: float
    omega: float


@dataclass(frozen=True)
class TaylorCoefficients:
    """Perturbation inputs eps1..4, delta1..6 and their scaled versions.

    delta1 and delta2 need the second-order energy E2 and stay None
    until it is supplied.  Bars divide eps_i by (2 mu omega)^(i/2) and
    delta_j by (2 mu omega)^(j/2).
    """

    eps: tuple
    delta: tuple
    eps_bar: tuple
    delta_bar: tuple

    @property
    def complete(self) -> bool:
        return self.delta[0] is not None


@dataclass
class SolveDiagnostics:
    """Residuals and bookkeeping recorded along a solve."""

    r0_residual: float = math.nan
    r0_function_calls: int = 0
    r0_iterations: int = 0
    r0_root_count: int = 1
    q_lbar_gap: float = math.nan
    denominator_gap: float = math.nan
    alpha1_closed_form: float = math.nan
    alpha1_path_gap: float = math.nan
    pt_basis_size: int | None = None


@dataclass
class SletSolution:
    """Complete record of one shifted-l expansion solve."""

    n: int
    l: int
    r0: float
    omega: float
    xi: float
    Q: float
    beta: float
    lbar: float
    E0: float
    eps: tuple
    delta: tuple
    eps_bar: tuple
    delta_bar: tuple
    alpha1: float
    alpha2: float
    E2_term: float
    E3_term: float
    binding_energy: float
    mass: float
    diagnostics: SolveDiagnostics = field(default_factory=SolveDiagnostics)


@contextmanager
def _stage(name: str):
    """Label solver errors with the pipeline stage that raised them."""
    try:
        yield
    except SletError as exc:
        exc.stage = name
        if not str(exc).startswith(f"{name}:"):
            exc.args = (f"{name}: {exc}",) + exc.args[1:]
        raise


def geometry_at(potential: PotentialModel, pair: ParticlePair,
                r0: float) -> Geometry:
    """xi, Q and omega evaluated at a trial expansion point.

    Requires V'(r0) > 0.  With a nonrelativistic pair, xi is reported as
    inf and Q collapses to its limit mu r0^3 V'(r0).
    """
    v1 = potential.derivative(r0, 1)
    if not v1 > 0.0:
        raise NonMonotonePointError(
            f"V'(r0) = {v1:g} at r0 = {r0:g}; the expansion needs an "
            "increasing potential at the expansion point")
    mu, eta = pair.mu, pair.eta
    if math.isinf(eta):
        xi = math.inf
        q = mu * r0**3 * v1
        bracket = 3.0 + r0 * potential.derivative(r0, 2) / v1
    else:
        xi = math.sqrt(1.0 + (2.0 * eta / (r0 * v1)) ** 2)
        q = (mu / (2.0 * eta)) * (r0**2 * v1) ** 2 * (1.0 + xi)
        bracket = (3.0 + r0 * potential.derivative(r0, 2) / v1
                   - mu * r0**4 * v1**2 / (q * eta))
    if bracket < 0.0:
        raise NoHarmonicRegimeError(
            f"squared frequency bracket is {bracket:g} at r0 = {r0:g}")
    return Geometry(xi=xi, Q=q, omega=math.sqrt(bracket) / mu)


def shift_and_lbar(pair: ParticlePair, n: int, omega: float, l: int):
    """Shift beta = -1/2 - mu (n + 1/2) omega and lbar = l - beta."""
    beta = -0.5 - pair.mu * (n + 0.5) * omega
    return beta, l - beta


def leading_energy(potential: PotentialModel, pair: ParticlePair,
                   r0: float, Q: float) -> float:
    """Leading eigenvalue E0 = V(r0) - eta + sqrt(eta^2 + eta Q/(mu r0^2)).

    Evaluated in the cancellation-free form
    V + Q / (mu r0^2 (1 + sqrt(1 + Q/(mu eta r0^2)))), which also covers
    the nonrelativistic eta -> inf limit V + Q / (2 mu r0^2) exactly.
    """
    mu, eta = pair.mu, pair.eta
    x = 0.0 if math.isinf(eta) else Q / (mu * eta * r0**2)
    return potential.evaluate(r0) + Q / (mu * r0**2 * (1.0 + math.sqrt(1.0 + x)))


def energy_denominator(pair: ParticlePair, r0: float, Q: float) -> float:
    """sqrt(1 + Q / (mu eta r0^2)), the factor 1 + (E0 - V(r0))/eta."""
    if math.isinf(pair.eta):
        return 1.0
    return math.sqrt(1.0 + Q / (pair.mu * pair.eta * r0**2))


def r0_residual(potential: PotentialModel, pair: ParticlePair,
                qn: QuantumNumbers, r0: float) -> float:
    """Root function F(r0) = 2 (sqrt(Q(r0)) - lbar(r0)).

    Equivalent to r0^2 V'(r0) sqrt(2 mu (1 + xi)/eta) minus
    1 + 2l + mu (2n + 1) omega; the root makes sqrt(Q) = lbar.
    """
    geo = geometry_at(potential, pair, r0)
    _, lbar = shift_and_lbar(pair, qn.n, geo.omega, qn.l)
    return 2.0 * (math.sqrt(geo.Q) - lbar)


def solve_r0(potential: PotentialModel, pair: ParticlePair,
             qn: QuantumNumbers, settings: SolverSettings = SolverSettings(),
             full_output: bool = False):
    """Locate the expansion point by a log scan plus bracketed root finding.

    The bracket is scanned on a logarithmic grid (R0_SCAN_PANELS panels);
    points where the potential is not increasing or the frequency
    bracket turns negative are skipped.  Every sign change is polished
    with Brent's method; if several roots survive, the one with the
    lowest leading energy wins and a MultipleRootsWarning is issued.
    """
    calls = 0

    def func(r):
        nonlocal calls
        calls += 1
        return r0_residual(potential, pair, qn, r)

    lo, hi = settings.r0_bracket
    grid = np.geomspace(lo, hi, R0_SCAN_PANELS + 1)
    values = np.full(grid.shape, np.nan)
    for i, r in enumerate(grid):
        try:
            values[i] = func(r)
        except (NonMonotonePointError, NoHarmonicRegimeError, OverflowError):
            pass

    roots = []
    iterations = 0
    for i in range(len(grid) - 1):
        fa, fb = values[i], values[i + 1]
        if np.isnan(fa) or np.isnan(fb):
            continue
        if fa == 0.0:
            roots.append(float(grid[i]))
            continue
        if fa * fb < 0.0:
            root, info = brentq(func, grid[i], grid[i + 1],
                                xtol=1e-300, rtol=settings.r0_tolerance,
                                maxiter=settings.max_iterations,
                                full_output=True, disp=False)
            if not info.converged:
                raise BracketingError(
                    f"root polish did not converge in panel "
                    f"[{grid[i]:g}, {grid[i + 1]:g}]")
            iterations += info.iterations
            roots.append(float(root))
    if not np.isnan(values[-1]) and values[-1] == 0.0:
        roots.append(float(grid[-1]))

    # collapse near-duplicates from adjacent panels
    unique = []
    for r in sorted(roots):
        if not unique or abs(r - unique[-1]) > 1e-9 * unique[-1]:
            unique.append(r)
    if not unique:
        raise BracketingError(
            f"no sign change of the r0 equation inside [{lo:g}, {hi:g}] "
            f"({int(np.sum(~np.isnan(values)))} of {len(grid)} scan points "
            "were usable)")

    if len(unique) > 1:
        energies = []
        for r in unique:
            geo = geometry_at(potential, pair, r)
            energies.append(leading_energy(potential, pair, r, geo.Q))
        best = int(np.argmin(energies))
        warnings.warn(
            f"{len(unique)} expansion points satisfy the root equation; "
            f"keeping the one with the lowest leading energy (r0 = "
            f"{unique[best]:g})", MultipleRootsWarning)
        r0 = unique[best]
    else:
        r0 = unique[0]

    if full_output:
        diag = SolveDiagnostics(
            r0_residual=r0_residual(potential, pair, qn, r0),
            r0_function_calls=calls,
            r0_iterations=iterations,
            r0_root_count=len(unique),
        )
        return r0, diag
    return r0


def taylor_coefficients(potential: PotentialModel, pair: ParticlePair,
                        r0: float, Q: float, beta: float, E0: float,
                        omega: float, e2: float | None = None,
                        complete: bool | None = None) -> TaylorCoefficients:
    """Perturbation coefficients from the derivative stacks at r0.

    delta1 and delta2 contain the second-order energy E2, so they are
    only available in complete mode (``e2`` supplied); the partial mode
    returns eps1..4 and delta3..6 with the two E2-dependent slots None.
    """
    if complete is None:
        complete = e2 is not None
    if complete and e2 is None:
        raise SequencingError(
            "delta1/delta2 need the second-order energy; compute alpha1 "
            "and E2 first or request the partial set")

    mu, eta = pair.mu, pair.eta
    inv_eta = 0.0 if math.isinf(eta) else 1.0 / eta
    two_b1 = 2.0 * beta + 1.0
    d = {k: potential.derivative(r0, k) for k in (1, 2, 3, 4, 5, 6)}
    g = {k: potential.gamma_derivative(pair, r0, k) for k in (3, 4, 5, 6)}

    eps = (
        -two_b1 / mu,
        3.0 * two_b1 / (2.0 * mu),
        -2.0 / mu + r0**5 / (6.0 * Q) * (g[3] + d[3] * E0 * inv_eta),
        5.0 / (2.0 * mu) + r0**6 / (24.0 * Q) * (g[4] + d[4] * E0 * inv_eta),
    )
    if complete:
        delta12 = (
            -beta * (beta + 1.0) / mu + r0**3 * d[1] * e2 * inv_eta / Q,
            3.0 * beta * (beta + 1.0) / (2.0 * mu)
            + r0**4 * d[2] * e2 * inv_eta / (2.0 * Q),
        )
    else:
        delta12 = (None, None)
    delta = delta12 + (
        -2.0 * two_b1 / mu,
        5.0 * two_b1 / (2.0 * mu),
        -3.0 / mu + r0**7 / (120.0 * Q) * (g[5] + d[5] * E0 * inv_eta),
        7.0 / (2.0 * mu) + r0**8 / (720.0 * Q) * (g[6] + d[6] * E0 * inv_eta),
    )

    scale = 2.0 * mu * omega
    eps_bar = tuple(e / scale ** ((i + 1) / 2.0) for i, e in enumerate(eps))
    delta_bar = tuple(
        None if dj is None else dj / scale ** ((j + 1) / 2.0)
        for j, dj in enumerate(delta))
    return TaylorCoefficients(eps=eps, delta=delta,
                              eps_bar=eps_bar, delta_bar=delta_bar)


def alpha1_closed_form(n: int, omega: float, eps_bar) -> float:
    """Closed form for the first correction coefficient.

    Standard shifted-expansion result in the scaled coefficients; used
    as an independent cross-check of the series path.
    """
    e1, e2, e3, e4 = eps_bar
    return ((1 + 2 * n) * e2 + 3.0 * (1 + 2 * n + 2 * n * n) * e4
            - (e1 * e1 + 6.0 * (1 + 2 * n) * e1 * e3
               + (11 + 30 * n + 30 * n * n) * e3 * e3) / omega)


def _series_alpha(pair, omega, n, coeffs: TaylorCoefficients, max_order,
                  basis_size):
    terms = {
        1: ((1, coeffs.eps[0]), (3, coeffs.eps[2])),
        2: ((2, coeffs.eps[1]), (4, coeffs.eps[3])),
    }
    if max_order == 4:
        terms[3] = ((1, coeffs.delta[0]), (3, coeffs.delta[2]),
                    (5, coeffs.delta[4]))
        terms[4] = ((2, coeffs.delta[1]), (4, coeffs.delta[3]),
                    (6, coeffs.delta[5]))
    problem = pt.AnharmonicProblem(mu=pair.mu, omega=omega, level=n,
                                   terms_by_order=terms)
    series = pt.rspt_coefficients(problem, max_order=max_order,
                                  basis_size=basis_size)
    return pt.alpha_from_series(series)


def alpha_corrections(pair: ParticlePair, n: int, omega: float,
                      coeffs: TaylorCoefficients,
                      basis_size: int | None = None):
    """(alpha1, alpha2) from the perturbation series.

    Needs a complete coefficient set (delta1/delta2 filled in); alpha1
    alone can be had from a partial set via the closed form or a
    second-order series run.
    """
    if not coeffs.complete:
        raise SequencingError("alpha2 needs the complete delta set")
    return _series_alpha(pair, omega, n, coeffs, 4, basis_size)


def correction_energies(r0: float, Q: float, E0: float, v_at_r0: float,
                        eta: float, alpha1: float, alpha2: float,
                        lbar: float, mu: float, beta: float):
    """Second and third correction terms of the assembled eigenvalue.

    Matching the eigenvalue series order by order gives

        E2 = Q [alpha1 + beta (beta + 1)/(2 mu)] / (r0^2 D)
        E3 = Q  alpha2                           / (r0^2 D)

    with the positive denominator D = 1 + (E0 - V(r0))/eta.  The
    centrifugal-shift constant beta(beta+1)/(2 mu) rides along with the
    series coefficient alpha1; without it the construction would lose
    its exactness for the nonrelativistic oscillator, where the two
    pieces cancel identically.  The returned terms are the assembled
    corrections E2/lbar^2 and E3/lbar^3 with Q identified as lbar^2.
    """
    d = 1.0 if math.isinf(eta) else 1.0 + (E0 - v_at_r0) / eta
    if not d > 0.0:
        raise InternalInconsistencyError(
            f"energy denominator {d:g} is not positive at r0 = {r0:g}")
    first = alpha1 + beta * (beta + 1.0) / (2.0 * mu)
    return first / (r0**2 * d), alpha2 / (r0**2 * d * lbar)


def solve(potential: PotentialModel, pair: ParticlePair, qn: QuantumNumbers,
          settings: SolverSettings = SolverSettings()) -> SletSolution:
    """Run the full shifted-l expansion pipeline for one (n, l) level.

    With ``settings.pt_enabled`` false the series is skipped: alpha1
    comes from the closed form and the order-1/lbar correction (alpha2)
    is dropped.
    """
    n, l = qn.n, qn.l
    with _stage("solve_r0"):
        r0, diag = solve_r0(potential, pair, qn, settings, full_output=True)
    with _stage("geometry"):
        geo = geometry_at(potential, pair, r0)
    beta, lbar = shift_and_lbar(pair, n, geo.omega, l)
    with _stage("leading_energy"):
        e0 = leading_energy(potential, pair, r0, geo.Q)
    v0 = potential.evaluate(r0)
    denom = energy_denominator(pair, r0, geo.Q)

    with _stage("taylor_coefficients"):
        partial = taylor_coefficients(potential, pair, r0, geo.Q, beta, e0,
                                      geo.omega)
    basis = settings.pt_basis_size
    closed1 = alpha1_closed_form(n, geo.omega, partial.eps_bar)
    if settings.pt_enabled:
        with _stage("alpha1"):
            alpha1, _ = _series_alpha(pair, geo.omega, n, partial, 2, basis)
    else:
        alpha1 = closed1

    shift_const = beta * (beta + 1.0) / (2.0 * pair.mu)
    e2 = geo.Q * (alpha1 + shift_const) / (r0**2 * denom)
    with _stage("taylor_coefficients"):
        coeffs = taylor_coefficients(potential, pair, r0, geo.Q, beta, e0,
                                     geo.omega, e2=e2)
    if settings.pt_enabled:
        with _stage("alpha2"):
            alpha1_full, alpha2 = alpha_corrections(pair, n, geo.omega,
                                                    coeffs, basis)
            alpha1 = alpha1_full
    else:
        alpha2 = 0.0

    with _stage("correction_energies"):
        e2_term, e3_term = correction_energies(r0, geo.Q, e0, v0, pair.eta,
                                               alpha1, alpha2, lbar,
                                               pair.mu, beta)
    binding = e0 + e2_term + e3_term

    diag.q_lbar_gap = abs(math.sqrt(geo.Q) - lbar) / lbar
    diag.denominator_gap = abs(denom - (1.0 if math.isinf(pair.eta)
                                        else 1.0 + (e0 - v0) / pair.eta))
    diag.alpha1_closed_form = closed1
    diag.alpha1_path_gap = (abs(alpha1 - closed1) / abs(alpha1)
                            if abs(alpha1) > 1e-12 else abs(alpha1 - closed1))
    diag.pt_basis_size = (basis if basis is not None
                          else n + pt.DEFAULT_BASIS_MARGIN)

    return SletSolution(
        n=n, l=l, r0=r0, omega=geo.omega, xi=geo.xi, Q=geo.Q, beta=beta,
        lbar=lbar, E0=e0, eps=coeffs.eps, delta=coeffs.delta,
        eps_bar=coeffs.eps_bar, delta_bar=coeffs.delta_bar,
        alpha1=alpha1, alpha2=alpha2, E2_term=e2_term, E3_term=e3_term,
        binding_energy=binding, mass=binding + pair.total_mass,
        diagnostics=diag)


@dataclass(frozen=True)
class CoulombClosedForm:
    """Closed-form S-wave quantities for the equal-mass Coulomb problem."""

    Q: float
    r0: float
    E0: float
    M: float


def coulomb_closed_form(m: float, alpha: float, n: int) -> CoulombClosedForm:
    """Closed-form S-wave solution for V = -alpha/r with equal masses m.

    Valid for alpha < 2n + 2, where the expansion point is real:

        Q  = (2n + 2)^2 / 4
        r0 = ((2n + 2)^2 / 2m) sqrt(1/alpha^2 - 1/(2n + 2)^2)
        E0 = 2m sqrt(1 - alpha^2/(2n + 2)^2) - 2m
    """
    if m <= 0.0 or alpha <= 0.0 or n < 0:
        raise ValueError("need m > 0, alpha > 0 and n >= 0")
    big_n = 2.0 * n + 2.0
    if alpha >= big_n:
        raise UnphysicalCouplingError(
            f"alpha = {alpha:g} >= 2n + 2 = {big_n:g} leaves no real "
            "expansion point")
    e0 = 2.0 * m * math.sqrt(1.0 - (alpha / big_n) ** 2) - 2.0 * m
    return CoulombClosedForm(
        Q=big_n**2 / 4.0,
        r0=big_n**2 / (2.0 * m) * math.sqrt(1.0 / alpha**2 - 1.0 / big_n**2),
        E0=e0,
        M=e0 + 2.0 * m,
    )


@dataclass(frozen=True)
class CoulombReference:
    """Known equal-mass Coulomb S-wave masses used for validation."""

    m: float
    exact_mass: float
    upper_bound_mass: float

    @property
    def exact_binding(self):
        return self.exact_mass - 2.0 * self.m

    @property
    def upper_bound_binding(self):
        return self.upper_bound_mass - 2.0 * self.m


def coulomb_reference(m: float, alpha: float, n: int) -> CoulombReference:
    """Exact mass 2m / sqrt(1 + a^2) and variational bound 2m sqrt(1 - a^2).

    Here a = alpha / (2n + 2).  The bound expression coincides with the
    closed-form mass of :func:`coulomb_closed_form`.
    """
    if m <= 0.0 or alpha <= 0.0 or n < 0:
        raise ValueError("need m > 0, alpha > 0 and n >= 0")
    a = alpha / (2.0 * n + 2.0)
    if a >= 1.0:
        raise UnphysicalCouplingError(
            f"alpha = {alpha:g} >= 2n + 2 = {2 * n + 2:g}")
    return CoulombReference(
        m=m,
        exact_mass=2.0 * m / math.sqrt(1.0 + a * a),
        upper_bound_mass=2.0 * m * math.sqrt(1.0 - a * a),
    )
