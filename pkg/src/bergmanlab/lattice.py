"""Covering lattices for the hyperbolic metric on the disk.

A radius-r lattice is a point set {a_k} whose metric disks D(a_k, r) cover
the disk, whose pairwise metric distances stay above r/2 (so the r/4-disks
are disjoint), and for which any point lies in a bounded number N of the
doubled disks D(a_k, 2r).

Construction: concentric circles at hyperbolic radii m*(r/2) carry points
equally spaced in angle, with the count per circle chosen as the largest
for which the adjacent-point metric chord still reaches r/2. That keeps the
pairwise separation at exactly r/2 in the worst case while the cover radius
stays below r. The infinite lattice is truncated at 1 - |a| >= epsilon,
which every exported point satisfies.

Verification is sampled: cover and overlap statistics are measured on a
deterministic low-discrepancy (Halton) stream of disk points, filtered to
the requested truncation so that sample sets for coarser truncations are
subsets of finer ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .errors import ConfigurationError

DEFAULT_OVERLAP_SAMPLES = 20000


def _chord(rho, n):
    """Pseudo-hyperbolic distance between adjacent n-th roots scaled to |z| = rho."""
    e = np.exp(2j * np.pi / n)
    return abs(rho * (1.0 - e) / (1.0 - rho**2 * e))


def _ring_count(rho, target):
    """Largest n so that adjacent points on |z| = rho keep pseudo-chord >= target."""
    if _chord(rho, 2) < target:
        return 1
    n = 2
    while _chord(rho, n) >= target:
        n *= 2
    lo, hi = n // 2, n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _chord(rho, mid) >= target:
            lo = mid
        else:
            hi = mid
    return lo


def halton_disk_samples(count, epsilon=0.0, batch=None):
    """First ``count`` Halton points, area-uniform over {z : 1 - |z| >= epsilon}.

    Points are drawn from a fixed unscrambled stream over the whole disk and
    filtered, so the sample set for a larger epsilon is a subset of the one
    for a smaller epsilon.
    """
    sampler = qmc.Halton(d=2, scramble=False)
    kept = []
    total = 0
    if batch is None:
        batch = max(1024, count)
    while total < count:
        u = sampler.random(batch)
        z = np.sqrt(u[:, 0]) * np.exp(2j * np.pi * u[:, 1])
        z = z[1.0 - np.abs(z) >= epsilon]
        kept.append(z)
        total += len(z)
    return np.concatenate(kept)[:count]


@dataclass(frozen=True, eq=False)
class HyperbolicLattice:
    r: float
    epsilon: float
    points: np.ndarray          # complex, origin first, then rings outward
    ring_index: np.ndarray      # int ring number per point (0 = origin)
    N: int                      # measured overlap bound for the doubled disks

    @property
    def size(self):
        return len(self.points)

    @property
    def ring_radii(self):
        """Euclidean radius of each ring present in the lattice."""
        rings = np.unique(self.ring_index)
        return np.array([np.abs(self.points[self.ring_index == m]).max() if m else 0.0
                         for m in rings])

    def pairwise_pseudo(self):
        a = self.points[:, None]
        z = self.points[None, :]
        return np.abs((a - z) / (1.0 - np.conj(a) * z))

    def min_separation(self):
        """Minimum pairwise hyperbolic distance."""
        p = self.pairwise_pseudo()
        np.fill_diagonal(p, 1.0)
        return float(np.arctanh(p.min()))

    def kernel_sum(self):
        """Truncated sum_k 1/(1 - tanh(r) |a_k|)^2.

        Summability of the full series is hypothesized by the certification
        theorem but fails for a genuine lattice as epsilon -> 0; the value is
        surfaced as a diagnostic so reports can show the tension.
        """
        s = np.tanh(self.r)
        return float(np.sum(1.0 / (1.0 - s * np.abs(self.points)) ** 2))

    def to_json(self):
        return [[p.real, p.imag] for p in self.points]


def build_lattice(r, epsilon) -> HyperbolicLattice:
    """Deterministic radius-r lattice truncated at 1 - |a| >= epsilon."""
    if not 0 < r <= 1:
        raise ConfigurationError(f"lattice radius must satisfy 0 < r <= 1, got {r}")
    if not 0 < epsilon < 1:
        raise ConfigurationError(f"epsilon must lie in (0, 1), got {epsilon}")
    sep_target = np.tanh(r / 2.0)
    pts = [0.0 + 0.0j]
    ring = [0]
    m = 1
    while True:
        rho = np.tanh(m * r / 2.0)
        if 1.0 - rho < epsilon:
            break
        n = _ring_count(rho, sep_target)
        offset = np.pi / n if m % 2 == 0 else 0.0
        angles = 2.0 * np.pi * np.arange(n) / n + offset
        pts.extend(rho * np.exp(1j * angles))
        ring.extend([m] * n)
        m += 1
    points = np.array(pts, dtype=complex)
    ring_index = np.array(ring, dtype=int)
    points.setflags(write=False)
    ring_index.setflags(write=False)
    lat = HyperbolicLattice(r=float(r), epsilon=float(epsilon), points=points,
                            ring_index=ring_index, N=0)
    n_meas = overlap_bound(lat, DEFAULT_OVERLAP_SAMPLES)
    object.__setattr__(lat, "N", n_meas)
    return lat


@dataclass
class CoverReport:
    samples: int
    uncovered: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))
    max_min_distance: float = 0.0

    @property
    def covered(self):
        return len(self.uncovered) == 0


def _min_distances(points, zs, chunk=4096):
    """Min hyperbolic distance from each sample to the point set, plus counts helper."""
    out = np.empty(len(zs))
    for lo in range(0, len(zs), chunk):
        z = zs[lo:lo + chunk, None]
        p = np.abs((z - points[None, :]) / (1.0 - z * np.conj(points[None, :])))
        out[lo:lo + chunk] = np.arctanh(np.minimum(p.min(axis=1), 1.0 - 1e-15))
    return out


def verify_cover(lat: HyperbolicLattice, samples) -> CoverReport:
    """Check that every sampled z with 1 - |z| >= epsilon lies in some D(a_k, r)."""
    if samples < 1:
        raise ConfigurationError(f"need at least one sample, got {samples}")
    zs = halton_disk_samples(samples, lat.epsilon)
    dmin = _min_distances(lat.points, zs)
    uncovered = zs[dmin >= lat.r]
    return CoverReport(samples=samples, uncovered=uncovered,
                       max_min_distance=float(dmin.max()))


def overlap_count(lat: HyperbolicLattice, z, factor=2.0) -> int:
    """Number of lattice disks D(a_k, factor*r) containing z."""
    if factor not in (1, 2, 1.0, 2.0):
        raise ConfigurationError(f"overlap factor must be 1 or 2, got {factor}")
    z = complex(z)
    p = np.abs((z - lat.points) / (1.0 - z * np.conj(lat.points)))
    return int(np.sum(p < np.tanh(factor * lat.r)))


def overlap_bound(lat: HyperbolicLattice, samples=DEFAULT_OVERLAP_SAMPLES,
                  factor=2.0, sample_epsilon=None, chunk=4096) -> int:
    """Measured overlap bound: max over sampled z of overlap_count.

    ``sample_epsilon`` restricts the sampled region to 1 - |z| >= sample_epsilon
    (default: the lattice's own truncation). Because sample streams are nested
    across truncations, the measured bound is stable under refining the
    sampled region once the maximizer is interior.
    """
    if factor not in (1, 2, 1.0, 2.0):
        raise ConfigurationError(f"overlap factor must be 1 or 2, got {factor}")
    eps = lat.epsilon if sample_epsilon is None else sample_epsilon
    zs = halton_disk_samples(samples, eps)
    thr = np.tanh(factor * lat.r)
    best = 0
    for lo in range(0, len(zs), chunk):
        z = zs[lo:lo + chunk, None]
        p = np.abs((z - lat.points[None, :]) / (1.0 - z * np.conj(lat.points[None, :])))
        best = max(best, int((p < thr).sum(axis=1).max()))
    return best
