"""Spherically symmetric potentials built from power-law terms.

Every model is a finite sum of monomials c * r**p with real exponents, so
every radial derivative up to order six is available in closed form (the
sixth order is the highest one the correction coefficients consume).
Units follow hbar = c = 1: masses and energies in GeV, lengths in 1/GeV.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import PotentialParseError, UnsupportedOrderError

MAX_DERIVATIVE_ORDER = 6


@dataclass(frozen=True)
class ParticlePair:
    """Constituent masses and the derived kinematic parameters.

    ``mu`` is the reduced mass, ``nu = m1^3 m2^3 / (m1^3 + m2^3)`` and
    ``eta = nu / mu^2`` sets the size of the relativistic correction
    terms.  A pair built with ``relativistic=False`` reports an infinite
    eta, which switches every correction term off exactly and makes the
    solvers reproduce plain nonrelativistic spectra.
    """

    m1: float
    m2: float
    relativistic: bool = True

    def __post_init__(self):
        if not (self.m1 > 0.0 and self.m2 > 0.0):
            raise ValueError("constituent masses must be positive")

    @property
    def mu(self) -> float:
        return self.m1 * self.m2 / (self.m1 + self.m2)

    @property
    def nu(self) -> float:
        if not self.relativistic:
            return math.inf
        return (self.m1**3 * self.m2**3) / (self.m1**3 + self.m2**3)

    @property
    def eta(self) -> float:
        if not self.relativistic:
            return math.inf
        return self.nu / self.mu**2

    @property
    def total_mass(self) -> float:
        return self.m1 + self.m2

    @classmethod
    def equal(cls, m: float, relativistic: bool = True) -> "ParticlePair":
        return cls(m, m, relativistic)

    def as_nonrelativistic(self) -> "ParticlePair":
        return ParticlePair(self.m1, self.m2, relativistic=False)


def _require_positive(name, value):
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class PotentialModel:
    """Potential V(r) = sum over terms of c * r**p.

    Instances are immutable and safe to share between workers.  Use the
    ``coulomb`` / ``oscillator`` / ``linear`` / ``coulomb_plus_linear`` /
    ``custom`` constructors or :func:`parse_potential`.
    """

    kind: str
    terms: tuple
    label: str

    @classmethod
    def coulomb(cls, alpha: float) -> "PotentialModel":
        """V(r) = -alpha / r with alpha > 0 (attractive)."""
        _require_positive("alpha", alpha)
        return cls("coulomb", ((-alpha, -1.0),), f"coulomb:alpha={alpha:g}")

    @classmethod
    def oscillator(cls, k: float) -> "PotentialModel":
        """V(r) = k r^2 / 2 with stiffness k > 0 (GeV^3)."""
        _require_positive("k", k)
        return cls("oscillator", ((0.5 * k, 2.0),), f"oscillator:k={k:g}")

    @classmethod
    def linear(cls, b: float) -> "PotentialModel":
        """V(r) = b r with slope b > 0 (GeV^2)."""
        _require_positive("b", b)
        return cls("linear", ((b, 1.0),), f"linear:b={b:g}")

    @classmethod
    def coulomb_plus_linear(cls, alpha: float, b: float) -> "PotentialModel":
        """V(r) = -alpha/r + b r, the Coulomb-plus-linear (Cornell) form."""
        _require_positive("alpha", alpha)
        _require_positive("b", b)
        return cls("cornell", ((-alpha, -1.0), (b, 1.0)),
                   f"cornell:alpha={alpha:g},b={b:g}")

    cornell = coulomb_plus_linear

    @classmethod
    def custom(cls, terms) -> "PotentialModel":
        """Arbitrary finite sum of (coefficient, power) monomials."""
        clean = tuple((float(c), float(p)) for c, p in terms)
        for c, p in clean:
            if not (math.isfinite(c) and math.isfinite(p)):
                raise ValueError("custom potential terms must be finite")
        body = "+".join(f"{c:g}*r^{p:g}" for c, p in clean) or "0*r^0"
        return cls("custom", clean, "custom:" + body.replace("+-", "-"))

    # -- evaluation ------------------------------------------------------

    def _check_radius(self, rr):
        if np.any(rr <= 0.0):
            raise ValueError("r must be positive")

    def evaluate(self, r):
        """V(r) for scalar or array r > 0."""
        rr = np.asarray(r, dtype=float)
        self._check_radius(rr)
        out = np.zeros_like(rr)
        for c, p in self.terms:
            out = out + c * rr**p
        return float(out) if out.ndim == 0 else out

    def derivative(self, r, order: int):
        """Exact d^order V / dr^order for 0 <= order <= 6.

        Each monomial c * r**p contributes its falling-factorial
        prefactor c * p (p-1) ... (p-order+1); for non-negative integer
        p the prefactor vanishes identically once order exceeds p.
        """
        if not 0 <= order <= MAX_DERIVATIVE_ORDER:
            raise UnsupportedOrderError(
                f"derivative order must be in 0..{MAX_DERIVATIVE_ORDER}, got {order}")
        rr = np.asarray(r, dtype=float)
        self._check_radius(rr)
        out = np.zeros_like(rr)
        for c, p in self.terms:
            fac = c
            for i in range(order):
                fac *= p - i
            if fac != 0.0:
                out = out + fac * rr ** (p - order)
        return float(out) if out.ndim == 0 else out

    def gamma_derivative(self, pair: ParticlePair, r, order: int):
        """Exact derivative of gamma(r) = V(r) - V(r)^2 / (2 eta).

        The V^2 part is differentiated with the Leibniz rule on the
        exact V-derivative stack.  With a nonrelativistic pair this
        returns ``derivative`` unchanged (same float, not a copy of the
        formula), so the two stacks agree bitwise in that mode.
        """
        dv = self.derivative(r, order)
        eta = pair.eta
        if math.isinf(eta):
            return dv
        stack = [self.derivative(r, k) for k in range(order + 1)]
        vsq = stack[0] * 0.0
        for k in range(order + 1):
            vsq = vsq + comb(order, k) * stack[k] * stack[order - k]
        return dv - vsq / (2.0 * eta)

    # -- introspection ---------------------------------------------------

    def coulomb_strength(self) -> float:
        """alpha of an attractive -alpha/r term, 0.0 when absent."""
        for c, p in self.terms:
            if p == -1.0 and c < 0.0:
                return -c
        return 0.0

    def singular_powers(self) -> tuple:
        """Powers p < -1 present in the model (inverse-square or worse)."""
        return tuple(p for c, p in self.terms if p < -1.0 and c != 0.0)

    def increasing_domain(self, lo: float = 1e-6, hi: float = 1e6,
                          samples: int = 241):
        """Probed (r_lo, r_hi) interval where V'(r) > 0, or None.

        For the built-in attractive/confining variants this spans the
        whole probe range; custom sums may be increasing only on part of
        it.  The endpoints come from a logarithmic scan, so they are
        indicative rather than exact.
        """
        rs = np.geomspace(lo, hi, samples)
        pos = self.derivative(rs, 1) > 0.0
        if not np.any(pos):
            return None
        idx = np.nonzero(pos)[0]
        return float(rs[idx[0]]), float(rs[idx[-1]])


_KIND_PARAMS = {
    "coulomb": ("alpha",),
    "oscillator": ("k",),
    "linear": ("b",),
    "cornell": ("alpha", "b"),
    "coulomb_plus_linear": ("alpha", "b"),
}

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TERM_RE = re.compile(rf"\s*(?P<sign>[+-]?)\s*(?P<coef>{_NUMBER})\s*\*\s*r\s*"
                      rf"\^\s*(?P<power>{_NUMBER})\s*")


def _parse_custom_terms(body: str):
    terms = []
    pos = 0
    while pos < len(body):
        m = _TERM_RE.match(body, pos)
        if m is None:
            raise PotentialParseError(
                f"cannot parse custom potential near {body[pos:]!r}; "
                "expected terms like '0.5*r^2-0.25*r^-1'")
        coef = float(m.group("coef"))
        if m.group("sign") == "-":
            coef = -coef
        terms.append((coef, float(m.group("power"))))
        pos = m.end()
        if pos < len(body) and body[pos] == "+":
            pos += 1
    if not terms:
        raise PotentialParseError("custom potential needs at least one term")
    return terms


def parse_potential(spec: str) -> PotentialModel:
    """Build a model from a spec string.

    Grammar: ``coulomb:alpha=0.25``, ``oscillator:k=1.0``,
    ``linear:b=0.18``, ``cornell:alpha=0.25,b=0.18`` and
    ``custom:<c>*r^<p>+...`` with signed real coefficients and powers.
    """
    if not isinstance(spec, str) or ":" not in spec:
        raise PotentialParseError(
            f"potential spec {spec!r} must look like 'kind:param=value,...'")
    kind, _, body = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "custom":
        return PotentialModel.custom(_parse_custom_terms(body.strip()))
    if kind not in _KIND_PARAMS:
        raise PotentialParseError(
            f"unknown potential kind {kind!r}; expected one of "
            f"{sorted(set(_KIND_PARAMS))} or custom")
    wanted = _KIND_PARAMS[kind]
    params = {}
    for item in body.split(","):
        name, eq, value = item.partition("=")
        name = name.strip()
        if not eq or name not in wanted:
            raise PotentialParseError(
                f"bad parameter {item.strip()!r} for {kind}; expected {wanted}")
        try:
            params[name] = float(value)
        except ValueError as exc:
            raise PotentialParseError(
                f"non-numeric value in {item.strip()!r}") from exc
    missing = [w for w in wanted if w not in params]
    if missing:
        raise PotentialParseError(f"{kind} is missing parameters {missing}")
    try:
        if kind == "coulomb":
            return PotentialModel.coulomb(params["alpha"])
        if kind == "oscillator":
            return PotentialModel.oscillator(params["k"])
        if kind == "linear":
            return PotentialModel.linear(params["b"])
        return PotentialModel.coulomb_plus_linear(params["alpha"], params["b"])
    except ValueError as exc:
        raise PotentialParseError(str(exc)) from exc
