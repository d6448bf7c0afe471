"""Conditional expectation along the level sets of an analytic self-map.

For a non-constant analytic self-map phi of the disk with finite multiplicity,
the conditional expectation of f relative to the sigma-algebra generated by
phi averages f over the level set c_z = {zeta : phi(zeta) = phi(z)} away from
critical points, with weights inversely proportional to |phi'|^2:

    E(f)(z) = sum_j f(zeta_j) / |phi'(zeta_j)|^2  /  sum_j 1 / |phi'(zeta_j)|^2.

Supported map families: the identity, monomials z^n (level sets are exact
root-of-unity orbits with uniform weights), and finite Blaschke products
(level sets solved as polynomial root-finding with residual verification).

The point z = 0 is a critical point of every monomial z^n with n >= 2; the
expectation is defined off the critical set only, and callers evaluating on
grids are expected to use grids that avoid it (the quadrature nodes do).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import CriticalPointError, RootFindingError
from .geometry import SpaceParams
from .measures import DEFAULT_QUAD, Polynomial, bergman_norm

RESIDUAL_TOL = 1e-10
CRITICAL_TOL = 1e-12


class AnalyticSelfMap:
    """Base class for the supported self-map families."""

    multiplicity: int

    def __call__(self, z):
        raise NotImplementedError

    def derivative(self, z):
        raise NotImplementedError

    def spec(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(AnalyticSelfMap):
    @property
    def multiplicity(self):
        return 1

    def __call__(self, z):
        return np.asarray(z, dtype=complex)

    def derivative(self, z):
        return np.ones_like(np.asarray(z, dtype=complex))

    def spec(self):
        return {"type": "identity"}


@dataclass(frozen=True)
class Monomial(AnalyticSelfMap):
    """phi(z) = z^n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"monomial exponent must be >= 1, got {self.n}")

    @property
    def multiplicity(self):
        return self.n

    def __call__(self, z):
        return np.asarray(z, dtype=complex) ** self.n

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return self.n * z ** (self.n - 1)

    def spec(self):
        return {"type": "monomial", "n": self.n}


@dataclass(frozen=True)
class BlaschkeProduct(AnalyticSelfMap):
    """Finite product of the factors (a_i - z)/(1 - conj(a_i) z)."""

    zeros: tuple

    def __post_init__(self):
        if not self.zeros:
            raise ValueError("Blaschke product needs at least one zero")
        if any(abs(a) >= 1 for a in self.zeros):
            raise ValueError("Blaschke zeros must lie in the open unit disk")

    @property
    def multiplicity(self):
        return len(self.zeros)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for a in self.zeros:
            out = out * (a - z) / (1.0 - np.conj(a) * z)
        return out

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        total = np.zeros_like(z)
        for i, ai in enumerate(self.zeros):
            term = (abs(ai) ** 2 - 1.0) / (1.0 - np.conj(ai) * z) ** 2
            for j, aj in enumerate(self.zeros):
                if j != i:
                    term = term * (aj - z) / (1.0 - np.conj(aj) * z)
            total = total + term
        return total

    def numerator_coeffs(self):
        """Ascending coefficients of prod(a_i - z) and prod(1 - conj(a_i) z)."""
        num = np.array([1.0 + 0j])
        den = np.array([1.0 + 0j])
        for a in self.zeros:
            num = npoly.polymul(num, np.array([a, -1.0]))
            den = npoly.polymul(den, np.array([1.0, -np.conj(a)]))
        return num, den

    def spec(self):
        return {"type": "blaschke", "zeros": [[a.real, a.imag] for a in map(complex, self.zeros)]}


def selfmap_from_config(cfg, pointer="/phi"):
    """Parse the self-map wire format: identity | monomial{n} | blaschke{zeros}."""
    from .errors import ConfigurationError

    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ConfigurationError("self-map spec must be an object with a 'type'", pointer)
    mtype = cfg["type"]
    known = {"identity": (), "monomial": ("n",), "blaschke": ("zeros",)}
    if mtype not in known:
        raise ConfigurationError(f"unknown self-map type '{mtype}'", f"{pointer}/type")
    for key in cfg:
        if key != "type" and key not in known[mtype]:
            raise ConfigurationError(f"unknown field '{key}'", pointer)
    try:
        if mtype == "identity":
            return Identity()
        if mtype == "monomial":
            return Monomial(int(cfg["n"]))
        return BlaschkeProduct(tuple(complex(re, im) for re, im in cfg["zeros"]))
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigurationError(f"invalid self-map spec: {exc}", pointer) from exc


@dataclass(frozen=True, eq=False)
class LevelSet:
    """Level set of phi through ``base`` with its averaging weights."""

    base: complex
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise RootFindingError(
                f"level-set weights sum to {self.weights.sum()}, expected 1"
            )
        if np.any(self.weights <= 0):
            raise RootFindingError("level-set weights must be positive")

    def average(self, f):
        return complex(np.sum(self.weights * f(self.points)))

    def max_distance_to_base(self):
        from .geometry import bergman_distance

        return float(np.max(bergman_distance(self.base, self.points)))


def _blaschke_preimages(phi: BlaschkeProduct, w):
    """All preimages of w (array-shaped) as stacked polynomial roots.

    Returns (roots, valid) with shape (..., n); invalid entries are roots
    rejected for lying outside the disk or at critical points.
    """
    w = np.asarray(w, dtype=complex)
    num, den = phi.numerator_coeffs()
    n = phi.multiplicity
    coeffs = num.reshape((1,) * w.ndim + (-1,)) - w[..., None] * den.reshape((1,) * w.ndim + (-1,))
    lead = coeffs[..., -1]
    monic = coeffs[..., :-1] / lead[..., None]
    comp = np.zeros(w.shape + (n, n), dtype=complex)
    idx = np.arange(n - 1)
    comp[..., idx + 1, idx] = 1.0
    comp[..., :, -1] = -monic
    roots = np.linalg.eigvals(comp)
    residual = np.abs(phi(roots) - w[..., None])
    inside = np.abs(roots) < 1.0
    bad = inside & (residual > RESIDUAL_TOL)
    if np.any(bad):
        worst = float(residual[bad].max())
        raise RootFindingError(
            f"preimage root failed verification with residual {worst:.3e} "
            f"(tolerance {RESIDUAL_TOL:g})"
        )
    not_critical = np.abs(phi.derivative(roots)) > CRITICAL_TOL
    return roots, inside & not_critical


def level_set(phi: AnalyticSelfMap, z) -> LevelSet:
    """Level set of phi through z with the |phi'|^-2 averaging weights."""
    z = complex(z)
    if abs(phi.derivative(z)) <= CRITICAL_TOL:
        raise CriticalPointError(
            f"z = {z} is a critical point of the self-map; the expectation "
            "is defined off the critical set only"
        )
    if isinstance(phi, Identity):
        return LevelSet(base=z, points=np.array([z]), weights=np.array([1.0]))
    if isinstance(phi, Monomial):
        # |phi'| is constant on |zeta| = |z|, so the weights are exactly uniform.
        k = np.arange(phi.n)
        pts = z * np.exp(2j * np.pi * k / phi.n)
        return LevelSet(base=z, points=pts, weights=np.full(phi.n, 1.0 / phi.n))
    roots, valid = _blaschke_preimages(phi, np.asarray(phi(z)))
    pts = roots[valid]
    if len(pts) == 0:
        raise RootFindingError(f"no valid preimages found for z = {z}")
    inv = 1.0 / np.abs(phi.derivative(pts)) ** 2
    return LevelSet(base=z, points=pts, weights=inv / inv.sum())


def cond_expect(phi: AnalyticSelfMap, f, z):
    """E(f)(z): the weighted level-set average of f at z."""
    if isinstance(phi, Identity):
        return complex(np.asarray(f(complex(z))))
    return level_set(phi, z).average(f)


def cond_expect_poly(n, f: Polynomial) -> Polynomial:
    """Closed form of the expectation under z^n on polynomials.

    Averaging over the n-th root-of-unity orbit kills every coefficient whose
    power is not a multiple of n, so the result keeps exactly those terms.
    """
    if n < 1:
        raise ValueError(f"monomial exponent must be >= 1, got {n}")
    kept = [c if m % n == 0 else 0j for m, c in enumerate(f.coeffs)]
    return Polynomial.from_coeffs(kept)


def cond_expect_values(phi: AnalyticSelfMap, f, zs):
    """Vectorized E(f) on an array of points (critical points excluded by caller)."""
    zs = np.asarray(zs, dtype=complex)
    if isinstance(phi, Identity):
        return np.asarray(f(zs), dtype=complex)
    if isinstance(phi, Monomial):
        rot = np.exp(2j * np.pi * np.arange(phi.n) / phi.n)
        vals = f(zs[..., None] * rot)
        return np.mean(np.asarray(vals, dtype=complex), axis=-1)
    roots, valid = _blaschke_preimages(phi, phi(zs))
    inv = np.where(valid, 1.0 / np.abs(phi.derivative(roots)) ** 2, 0.0)
    total = inv.sum(axis=-1)
    if np.any(total == 0):
        raise RootFindingError("a sample point produced an empty level set")
    fvals = np.where(valid, np.asarray(f(np.where(valid, roots, 0.0)), dtype=complex), 0.0)
    return np.sum(inv * fvals, axis=-1) / total


def evaluation_bound_probe(phi, f, z, params: SpaceParams, quad=DEFAULT_QUAD):
    """Scaled evaluation ratio |E(f)(z)| (1 - |z|^2)^((2+alpha)/p) / ||f||.

    When the level set of z stays inside a fixed metric disk around z, this
    ratio admits a finite bound uniform over f; it is returned raw so sweeps
    can estimate that bound empirically.
    """
    z = complex(z)
    norm = bergman_norm(f, params, quad)
    if norm == 0:
        raise ValueError("probe requires a function with positive norm")
    ev = abs(cond_expect(phi, f, z))
    return float(ev * (1.0 - abs(z) ** 2) ** params.kernel_exponent / norm)
