"""Finite positive Borel measures on the disk and quadrature against them.

The reference weight is the probability measure

    dA_alpha(z) = (alpha + 1) (1 - |z|^2)^alpha dA(z),   alpha > -1,

with dA the normalized area measure. Integration uses a tensor rule that is
Gauss-Jacobi in the radial direction, with the boundary factor (1 - rho^2)^alpha
absorbed analytically into the Jacobi weight, and uniform (trapezoidal) in
angle. The radial substitution t = rho^2 gives

    int_D f dA_alpha = (alpha+1)/(2 pi) int_0^{2pi} int_0^1 f(sqrt(t) e^{i th}) (1-t)^alpha dt dth,

so a Jacobi rule with weight (1-x)^alpha on [-1, 1] integrates the radial
factor exactly for polynomial data regardless of how close alpha is to -1.

Measure variants:

    WeightedArea(alpha)              dA_alpha
    RadialDensity(gamma, scale)      scale * (1 - |z|^2)^gamma dA
    PolyWeighted(u, p, beta)         |u(z)|^p dA_beta for polynomial u
    Atomic(points, masses)           finite sum of point masses (never quadrature)
    SumMeasure(parts)                finite sum of the above
    GridDensity(rule, values)        nonnegative samples on a rule's own nodes

Atomic and GridDensity measures are discrete: every integral against them is
a finite sum and is evaluated exactly for the measure they represent.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import ConfigurationError, EvaluationError
from .geometry import SpaceParams, as_disk_point, bergman_disk, pseudo_distance

logger = logging.getLogger(__name__)

DEFAULT_N_RADIAL = 256
DEFAULT_N_ANGULAR = 512


@dataclass(frozen=True)
class QuadConfig:
    """Grid sizes for the disk rule. All quoted tolerances assume the defaults."""

    n_radial: int = DEFAULT_N_RADIAL
    n_angular: int = DEFAULT_N_ANGULAR

    def __post_init__(self):
        if self.n_radial < 4 or self.n_angular < 4:
            raise ConfigurationError(
                f"node counts must be at least 4, got ({self.n_radial}, {self.n_angular})"
            )

    def doubled(self):
        return QuadConfig(2 * self.n_radial, 2 * self.n_angular)


DEFAULT_QUAD = QuadConfig()


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Tensor rule integrating f against dA_alpha over the disk.

    ``radial_sq`` holds the nodes t_i = rho_i^2 and ``radial_weights`` the
    weights v_i of the 1-d rule  int_0^1 g(t) (1-t)^alpha dt ~= sum v_i g(t_i),
    from which the full 2-d weights are assembled.
    """

    alpha: float
    nodes: np.ndarray          # (n_radial, n_angular) complex
    weights: np.ndarray        # (n_radial, n_angular) positive, sums to 1
    radial_sq: np.ndarray      # (n_radial,) nodes in t = rho^2
    radial_weights: np.ndarray  # (n_radial,) weights for (1-t)^alpha dt on [0, 1]

    @property
    def n_radial(self):
        return self.nodes.shape[0]

    @property
    def n_angular(self):
        return self.nodes.shape[1]

    def integrate(self, g):
        """Integrate a callable (or constant) against dA_alpha."""
        vals = g(self.nodes) if callable(g) else g * np.ones_like(self.weights)
        vals = np.asarray(vals)
        _check_finite(vals, self.nodes)
        total = np.sum(self.weights * vals)
        return _as_scalar(total)


def _check_finite(vals, nodes):
    finite = np.isfinite(vals)
    if not np.all(finite):
        idx = np.argwhere(~np.atleast_1d(finite))
        first = tuple(idx[0])
        node = np.atleast_1d(nodes)[first] if np.ndim(nodes) else nodes
        raise EvaluationError(
            f"integrand is not finite at quadrature node z = {node} (index {first})"
        )


def _as_scalar(x):
    x = complex(x)
    if abs(x.imag) <= 1e-15 * max(1.0, abs(x.real)):
        return x.real
    return x


@lru_cache(maxsize=128)
def build_quadrature(alpha, n_radial=DEFAULT_N_RADIAL, n_angular=DEFAULT_N_ANGULAR):
    """Build (and cache) the tensor rule for dA_alpha."""
    if not alpha > -1:
        raise ConfigurationError(f"alpha must exceed -1, got {alpha}")
    if n_radial < 4 or n_angular < 4:
        raise ConfigurationError(
            f"node counts must be at least 4, got ({n_radial}, {n_angular})"
        )
    x, w = roots_jacobi(n_radial, alpha, 0.0)
    t = (x + 1.0) / 2.0
    v = w * 2.0 ** (-(1.0 + alpha))
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    nodes = np.outer(np.sqrt(t), np.exp(1j * theta))
    weights = (alpha + 1.0) * np.outer(v, np.ones(n_angular)) / n_angular
    rule = QuadratureRule(
        alpha=float(alpha),
        nodes=nodes,
        weights=weights,
        radial_sq=t,
        radial_weights=v,
    )
    for arr in (rule.nodes, rule.weights, rule.radial_sq, rule.radial_weights):
        arr.setflags(write=False)
    return rule


def _rule(alpha, quad: QuadConfig):
    return build_quadrature(float(alpha), quad.n_radial, quad.n_angular)


@lru_cache(maxsize=128)
def _euclid_disk_base(n_radial, n_angular):
    """Gauss-Legendre polar rule on the unit disk against normalized area."""
    x, w = roots_jacobi(n_radial, 0.0, 0.0)
    t = (x + 1.0) / 2.0
    base = np.outer(np.sqrt(t), np.exp(2j * np.pi * np.arange(n_angular) / n_angular))
    weights = np.outer(w / 2.0, np.ones(n_angular)) / n_angular
    return base, weights


def euclid_disk_rule(center, radius, n_radial=64, n_angular=128):
    """Nodes and weights for int over a Euclidean disk against normalized area dA."""
    base, weights = _euclid_disk_base(n_radial, n_angular)
    return center + radius * base, radius**2 * weights


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in z with complex coefficients, ascending powers."""

    coeffs: tuple

    @classmethod
    def from_coeffs(cls, seq):
        c = [complex(x) for x in seq]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0j]
        return cls(tuple(c))

    @classmethod
    def from_pairs(cls, pairs):
        """Build from [re, im] coefficient pairs (the wire format)."""
        return cls.from_coeffs([complex(re, im) for re, im in pairs])

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), np.asarray(self.coeffs))

    def __mul__(self, c):
        return Polynomial.from_coeffs([c * x for x in self.coeffs])

    __rmul__ = __mul__

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_constant(self):
        return self.degree == 0

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def to_pairs(self):
        return [[c.real, c.imag] for c in self.coeffs]


# ---------------------------------------------------------------------------
# measures


class Measure:
    """Base class; subclasses are immutable after construction."""

    def integrate(self, g, quad: QuadConfig = DEFAULT_QUAD):
        raise NotImplementedError

    def disk_measure(self, a, r, quad: QuadConfig = DEFAULT_QUAD):
        """Mass of the metric disk D(a, r)."""
        raise NotImplementedError

    def total_mass(self, quad: QuadConfig = DEFAULT_QUAD):
        return float(self.integrate(1.0, quad))

    def scaled(self, c):
        raise NotImplementedError

    def radial_profile(self):
        """(gamma, scale) with density scale*(1-|z|^2)^gamma dA, or None."""
        return None

    def spec(self):
        """Round-trippable dict form (the wire format)."""
        raise NotImplementedError


def _density_disk_measure(density, a, r, quad):
    disk = bergman_disk(a, r)
    nodes, weights = euclid_disk_rule(
        disk.center, disk.radius,
        max(16, quad.n_radial // 4), max(32, quad.n_angular // 4),
    )
    vals = density(nodes)
    _check_finite(vals, nodes)
    return float(np.sum(weights * vals))


@dataclass(frozen=True)
class WeightedArea(Measure):
    """The reference probability measure dA_alpha."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > -1:
            raise ConfigurationError(f"alpha must exceed -1, got {self.alpha}")

    def integrate(self, g, quad=DEFAULT_QUAD):
        return _rule(self.alpha, quad).integrate(g)

    def density(self, z):
        return (self.alpha + 1.0) * (1.0 - np.abs(z) ** 2) ** self.alpha

    def disk_measure(self, a, r, quad=DEFAULT_QUAD):
        return _density_disk_measure(self.density, a, r, quad)

    def radial_profile(self):
        return self.alpha, self.alpha + 1.0

    def scaled(self, c):
        return RadialDensity(self.alpha, c * (self.alpha + 1.0))

    def spec(self):
        return {"type": "area", "alpha": self.alpha}


@dataclass(frozen=True)
class RadialDensity(Measure):
    """scale * (1 - |z|^2)^gamma dA; total mass scale/(gamma+1)."""

    gamma: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.gamma > -1:
            raise ConfigurationError(f"gamma must exceed -1, got {self.gamma}")
        if self.scale < 0:
            raise ConfigurationError(f"scale must be nonnegative, got {self.scale}")

    def integrate(self, g, quad=DEFAULT_QUAD):
        out = _rule(self.gamma, quad).integrate(g)
        return out * self.scale / (self.gamma + 1.0)

    def density(self, z):
        return self.scale * (1.0 - np.abs(z) ** 2) ** self.gamma

    def disk_measure(self, a, r, quad=DEFAULT_QUAD):
        return _density_disk_measure(self.density, a, r, quad)

    def radial_profile(self):
        return self.gamma, self.scale

    def scaled(self, c):
        return RadialDensity(self.gamma, c * self.scale)

    def spec(self):
        return {"type": "radial", "gamma": self.gamma, "scale": self.scale}


@dataclass(frozen=True)
class PolyWeighted(Measure):
    """|u(z)|^p dA_beta for a polynomial symbol u."""

    u: Polynomial
    p: float
    beta: float

    def __post_init__(self):
        if not self.p > 0:
            raise ConfigurationError(f"p must be positive, got {self.p}")
        if not self.beta > -1:
            raise ConfigurationError(f"beta must exceed -1, got {self.beta}")

    def integrate(self, g, quad=DEFAULT_QUAD):
        rule = _rule(self.beta, quad)
        uvals = np.abs(self.u(rule.nodes)) ** self.p
        if callable(g):
            vals = uvals * np.asarray(g(rule.nodes))
        else:
            vals = uvals * g
        _check_finite(vals, rule.nodes)
        return _as_scalar(np.sum(rule.weights * vals))

    def density(self, z):
        return np.abs(self.u(z)) ** self.p * (self.beta + 1.0) * (1.0 - np.abs(z) ** 2) ** self.beta

    def disk_measure(self, a, r, quad=DEFAULT_QUAD):
        return _density_disk_measure(self.density, a, r, quad)

    def radial_profile(self):
        if self.u.is_constant:
            c = abs(self.u.coeffs[0]) ** self.p
            return self.beta, c * (self.beta + 1.0)
        return None

    def scaled(self, c):
        if c < 0:
            raise ConfigurationError("measures scale by nonnegative factors only")
        return PolyWeighted(self.u * (c ** (1.0 / self.p)), self.p, self.beta)

    def spec(self):
        return {"type": "polyweighted", "u": self.u.to_pairs(), "p": self.p, "beta": self.beta}


@dataclass(frozen=True, eq=False)
class Atomic(Measure):
    """Finite sum of point masses; all integrals are exact finite sums."""

    points: np.ndarray
    masses: np.ndarray

    @classmethod
    def from_atoms(cls, atoms):
        """atoms: iterable of (point, mass)."""
        pts = as_disk_point(np.array([p for p, _ in atoms], dtype=complex))
        ms = np.array([m for _, m in atoms], dtype=float)
        if np.any(ms <= 0):
            raise ConfigurationError("atom masses must be positive")
        pts = np.atleast_1d(pts)
        pts.setflags(write=False)
        ms.setflags(write=False)
        return cls(points=pts, masses=ms)

    def integrate(self, g, quad=DEFAULT_QUAD):
        vals = g(self.points) if callable(g) else g * np.ones_like(self.masses)
        _check_finite(vals, self.points)
        return _as_scalar(np.sum(self.masses * np.asarray(vals)))

    def disk_measure(self, a, r, quad=DEFAULT_QUAD):
        inside = pseudo_distance(a, self.points) < np.tanh(r)
        return float(np.sum(self.masses[inside]))

    def scaled(self, c):
        return Atomic(points=self.points, masses=c * self.masses)

    def spec(self):
        return {
            "type": "atomic",
            "atoms": [
                {"re": p.real, "im": p.imag, "mass": float(m)}
                for p, m in zip(self.points, self.masses)
            ],
        }


@dataclass(frozen=True)
class SumMeasure(Measure):
    """Finite sum of component measures."""

    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise ConfigurationError("sum measure needs at least one part")

    def integrate(self, g, quad=DEFAULT_QUAD):
        return sum(part.integrate(g, quad) for part in self.parts)

    def disk_measure(self, a, r, quad=DEFAULT_QUAD):
        return sum(part.disk_measure(a, r, quad) for part in self.parts)

    def scaled(self, c):
        return SumMeasure(tuple(part.scaled(c) for part in self.parts))

    def spec(self):
        return {"type": "sum", "parts": [part.spec() for part in self.parts]}


@dataclass(frozen=True, eq=False)
class GridDensity(Measure):
    """Nonnegative density sampled on a rule's own nodes (no interpolation).

    The represented measure is the discrete one with mass weight*value at
    each node, so integration against it is exact by construction.
    """

    rule: QuadratureRule
    values: np.ndarray

    @classmethod
    def from_values(cls, rule, values):
        vals = np.asarray(values, dtype=float).reshape(rule.nodes.shape)
        if np.any(vals < 0):
            raise ConfigurationError("grid density values must be nonnegative")
        vals = vals.copy()
        vals.setflags(write=False)
        return cls(rule=rule, values=vals)

    @classmethod
    def from_function(cls, rule, fn):
        return cls.from_values(rule, np.asarray(fn(rule.nodes), dtype=float))

    @property
    def node_masses(self):
        return self.rule.weights * self.values

    def integrate(self, g, quad=DEFAULT_QUAD):
        vals = g(self.rule.nodes) if callable(g) else g * np.ones_like(self.values)
        _check_finite(vals, self.rule.nodes)
        return _as_scalar(np.sum(self.node_masses * np.asarray(vals)))

    def disk_measure(self, a, r, quad=DEFAULT_QUAD):
        inside = pseudo_distance(a, self.rule.nodes) < np.tanh(r)
        return float(np.sum(self.node_masses[inside]))

    def scaled(self, c):
        return GridDensity.from_values(self.rule, c * self.values)

    def resample(self, new_rule):
        """Move the samples to another rule's nodes by nearest polar neighbor.

        Explicit and logged: values are known only at the original nodes, so
        resampling is a lossy operation the caller must opt into.
        """
        logger.info(
            "resampling grid density from %dx%d to %dx%d nodes (nearest neighbor)",
            self.rule.n_radial, self.rule.n_angular,
            new_rule.n_radial, new_rule.n_angular,
        )
        old_t = self.rule.radial_sq
        new_t = new_rule.radial_sq
        ri = np.abs(new_t[:, None] - old_t[None, :]).argmin(axis=1)
        n_old, n_new = self.rule.n_angular, new_rule.n_angular
        ai = np.rint(np.arange(n_new) * n_old / n_new).astype(int) % n_old
        return GridDensity.from_values(new_rule, self.values[np.ix_(ri, ai)])

    def spec(self):
        return {
            "type": "grid",
            "alpha": self.rule.alpha,
            "n_radial": self.rule.n_radial,
            "n_angular": self.rule.n_angular,
            "values": [float(v) for v in self.values.ravel()],
        }


# ---------------------------------------------------------------------------
# top-level operations


def integrate(mu: Measure, g, quad: QuadConfig = DEFAULT_QUAD):
    """Integral of ``g`` against ``mu``; linear in both arguments."""
    return mu.integrate(g, quad)


def measure_of_disk(mu: Measure, a, r, quad: QuadConfig = DEFAULT_QUAD):
    """mu(D(a, r)) for the metric disk; monotone in r."""
    if r <= 0:
        raise ValueError(f"radius must be positive, got {r}")
    return mu.disk_measure(complex(a), r, quad)


def bergman_norm(f, params: SpaceParams, quad: QuadConfig = DEFAULT_QUAD):
    """Norm of ``f`` in the (p, alpha) space: (int |f|^p dA_alpha)^(1/p)."""
    rule = _rule(params.alpha, quad)
    vals = np.abs(f(rule.nodes)) ** params.p
    _check_finite(vals, rule.nodes)
    return float(np.sum(rule.weights * vals) ** (1.0 / params.p))


def holder_embedding_probe(f, mu: Measure, p, q, alpha, quad: QuadConfig = DEFAULT_QUAD):
    """Diagnostic for the Holder-type embedding inequality

        int |f|^q dmu <= ||f||_{p,alpha}^q * mu(D)^((p-q)/p),   0 < p <= q.

    The exponent bookkeeping of the underlying estimate is not airtight, so
    this records the two sides and a pass flag rather than asserting.
    """
    lhs = float(mu.integrate(lambda z: np.abs(f(z)) ** q, quad))
    norm = bergman_norm(f, SpaceParams(p=p, alpha=alpha), quad)
    mass = mu.total_mass(quad)
    rhs = norm**q * mass ** ((p - q) / p) if mass > 0 else np.inf
    return {"lhs": lhs, "rhs": rhs, "ratio": lhs / rhs if rhs > 0 else np.inf,
            "satisfied": bool(lhs <= rhs * (1 + 1e-9))}


# ---------------------------------------------------------------------------
# wire format


def measure_from_config(cfg, pointer="/measure", quad: QuadConfig = DEFAULT_QUAD):
    """Parse the measure wire format into a Measure.

    Schema: {"type": "area"|"radial"|"polyweighted"|"atomic"|"sum"|"grid", ...}
    with the variant fields documented in the package schema file. Unknown
    fields are rejected; errors carry a JSON pointer to the offending field.
    """
    if not isinstance(cfg, dict):
        raise ConfigurationError("measure spec must be an object", pointer)
    if "type" not in cfg:
        raise ConfigurationError("missing required field 'type'", pointer)
    mtype = cfg["type"]

    def require(fields, optional=()):
        known = set(fields) | set(optional) | {"type"}
        for key in cfg:
            if key not in known:
                raise ConfigurationError(f"unknown field '{key}'", pointer)
        for key in fields:
            if key not in cfg:
                raise ConfigurationError(f"missing required field '{key}'", f"{pointer}/{key}")

    try:
        if mtype == "area":
            require(["alpha"])
            return WeightedArea(float(cfg["alpha"]))
        if mtype == "radial":
            require(["gamma"], optional=["scale"])
            return RadialDensity(float(cfg["gamma"]), float(cfg.get("scale", 1.0)))
        if mtype == "polyweighted":
            require(["u", "p", "beta"])
            return PolyWeighted(Polynomial.from_pairs(cfg["u"]), float(cfg["p"]), float(cfg["beta"]))
        if mtype == "atomic":
            require(["atoms"])
            atoms = [
                (complex(atom["re"], atom["im"]), float(atom["mass"]))
                for atom in cfg["atoms"]
            ]
            return Atomic.from_atoms(atoms)
        if mtype == "sum":
            require(["parts"])
            parts = tuple(
                measure_from_config(part, f"{pointer}/parts/{i}", quad)
                for i, part in enumerate(cfg["parts"])
            )
            return SumMeasure(parts)
        if mtype == "grid":
            require(["alpha", "n_radial", "n_angular", "values"])
            rule = build_quadrature(float(cfg["alpha"]), int(cfg["n_radial"]), int(cfg["n_angular"]))
            return GridDensity.from_values(rule, cfg["values"])
    except ConfigurationError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigurationError(f"invalid measure spec: {exc}", pointer) from exc
    raise ConfigurationError(f"unknown measure type '{mtype}'", f"{pointer}/type")
