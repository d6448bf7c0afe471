"""Weighted conditional-expectation operators and the Bergman projection.

The operator T = M_u E multiplies the conditional expectation of f by an
analytic symbol u: T(f)(z) = u(z) E(f)(z). Its boundedness from the (p, alpha)
space into the (p, beta) space is equivalent to boundedness in a of the
kernel-power transform of the measure |u|^p dA_beta, which is what
``boundedness_criterion`` evaluates; ``opnorm_estimate`` produces a certified
lower bound on the operator norm by sweeping a test family. The true norm is
not claimed: the two sides agree only up to constants, and the pair is
reported together.

The multiplication operator M_u between spaces with different integrability
exponents p <= q has the analogous criterion with kernel exponent
(2 + alpha) q / p against |u|^q dA_beta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .carleson import (
    FamilySpec,
    PsiGridSpec,
    SupResult,
    _expectation_callable,
    build_family,
    member_norm,
    psi_sup,
)
from .condexp import AnalyticSelfMap, BlaschkeProduct, cond_expect, cond_expect_values
from .errors import ConfigurationError
from .geometry import SpaceParams, weighted_kernel
from .measures import (
    DEFAULT_QUAD,
    Polynomial,
    PolyWeighted,
    QuadConfig,
    build_quadrature,
)


@dataclass(frozen=True)
class WeightedCondExpOperator:
    """T = M_u E acting from the (p, alpha) space into the (p, beta) space."""

    u: Polynomial
    phi: AnalyticSelfMap
    p: float
    alpha: float
    beta: float

    def __post_init__(self):
        SpaceParams(p=self.p, alpha=self.alpha)
        SpaceParams(p=self.p, alpha=self.beta)

    @property
    def source(self):
        return SpaceParams(p=self.p, alpha=self.alpha)

    @property
    def target(self):
        return SpaceParams(p=self.p, alpha=self.beta)

    @property
    def expectation_analytic(self):
        """Whether E maps the polynomial test family to analytic functions.

        True for the identity and monomial families; for Blaschke maps the
        pointwise expectation need not be analytic and output carries a flag.
        """
        return not isinstance(self.phi, BlaschkeProduct)

    def symbol_measure(self):
        """The measure |u|^p dA_beta whose transform controls boundedness."""
        return PolyWeighted(self.u, self.p, self.beta)

    def spec(self):
        return {"u": self.u.to_pairs(), "phi": self.phi.spec(),
                "p": self.p, "alpha": self.alpha, "beta": self.beta}


def apply(op: WeightedCondExpOperator, f, z):
    """T(f)(z) = u(z) E(f)(z); linear in f."""
    z = complex(z)
    return complex(op.u(z)) * cond_expect(op.phi, f, z)


@dataclass
class OpNormResult:
    lower_bound: float
    worst_label: str
    ratios: dict


def opnorm_estimate(op: WeightedCondExpOperator, family: FamilySpec = FamilySpec(),
                    quad: QuadConfig = DEFAULT_QUAD) -> OpNormResult:
    """Certified lower bound sup_family ||u E(f)||_{p,beta} / ||f||_{p,alpha}."""
    if op.u.is_zero:
        return OpNormResult(lower_bound=0.0, worst_label="", ratios={})
    members = build_family(family, op.source)
    target_rule = build_quadrature(op.beta, quad.n_radial, quad.n_angular)
    best = -np.inf
    worst = members[0].label
    ratios = {}
    for member in members:
        ef = _expectation_callable(op.phi, member)
        vals = np.abs(op.u(target_rule.nodes) * ef(target_rule.nodes)) ** op.p
        num = float(np.sum(target_rule.weights * vals)) ** (1.0 / op.p)
        den = member_norm(member, op.source, quad)
        if den == 0:
            raise ConfigurationError(f"family member {member.label} has zero norm")
        ratios[member.label] = num / den
        if ratios[member.label] > best:
            best = ratios[member.label]
            worst = member.label
    return OpNormResult(lower_bound=float(best), worst_label=worst, ratios=ratios)


def boundedness_criterion(op: WeightedCondExpOperator,
                          grid: PsiGridSpec = PsiGridSpec(),
                          quad: QuadConfig = DEFAULT_QUAD) -> SupResult:
    """Transform criterion: sup_a Psi_a(|u|^p dA_beta) with exponent 2 + alpha."""
    return psi_sup(op.symbol_measure(), op.alpha, None, grid, quad)


def multiplication_criterion(u: Polynomial, p, q, alpha, beta,
                             grid: PsiGridSpec = PsiGridSpec(),
                             quad: QuadConfig = DEFAULT_QUAD) -> SupResult:
    """Criterion for M_u from the (p, alpha) into the (q, beta) space.

    Evaluates sup_a of the transform of |u|^q dA_beta with kernel exponent
    (2 + alpha) q / p; boundedness of the sup is the boundedness criterion.
    """
    if not 0 < p <= q:
        raise ConfigurationError(f"need 0 < p <= q, got p={p}, q={q}")
    SpaceParams(p=p, alpha=alpha)
    SpaceParams(p=q, alpha=beta)
    if u.is_zero:
        return SupResult(sup=0.0, argmax=0j, level_maxima=[], slope=0.0, verdict="bounded")
    t = (2.0 + alpha) * q / p
    return psi_sup(PolyWeighted(u, q, beta), alpha, t, grid, quad)


def bergman_projection(f, alpha, w, quad: QuadConfig = DEFAULT_QUAD):
    """Weighted projection P_alpha(f)(w) = int f(z) (1 - w conj(z))^-(2+alpha) dA_alpha(z).

    Fixes analytic polynomials. ``f`` is any callable finite at the
    quadrature nodes; ``w`` may be a scalar or an array of interior points.
    """
    rule = build_quadrature(alpha, quad.n_radial, quad.n_angular)
    fw = rule.weights * np.asarray(f(rule.nodes), dtype=complex)
    w = np.asarray(w, dtype=complex)
    scalar = w.ndim == 0
    wflat = np.atleast_1d(w).ravel()
    out = np.empty(wflat.shape, dtype=complex)
    for i, wi in enumerate(wflat):
        out[i] = np.sum(fw * weighted_kernel(wi, rule.nodes, alpha))
    out = out.reshape(np.atleast_1d(w).shape)
    return complex(out[0]) if scalar else out


def projection_commutator_probe(phi: AnalyticSelfMap, f, alpha, points,
                                quad: QuadConfig = DEFAULT_QUAD):
    """Compare E(P_alpha f) with P_alpha(E f) at sample points.

    The commutation of the expectation with the projection is a structural
    hypothesis, not a consequence of anything computed here, so the deviation
    is reported and never assumed.
    """
    points = np.asarray(points, dtype=complex)
    proj_f = bergman_projection(f, alpha, points, quad)
    e_then_p = bergman_projection(lambda z: cond_expect_values(phi, f, z), alpha, points, quad)

    def pf_callable(z):
        return bergman_projection(f, alpha, z, quad)

    p_then_e = cond_expect_values(phi, pf_callable, points)
    dev = float(np.max(np.abs(e_then_p - p_then_e)))
    return {
        "max_deviation": dev,
        "projection_values": proj_f,
        "e_after_p": p_then_e,
        "p_after_e": e_then_p,
    }
