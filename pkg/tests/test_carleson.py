"""Transform identities, sup diagnostics, and the three-constant certification."""

import numpy as np
import pytest

from bergmanlab.carleson import (
    CertifyConfig,
    FamilySpec,
    PsiGridSpec,
    build_family,
    certify,
    disk_bound,
    disk_constant,
    cached_lattice,
    psi_heatmap,
    psi_sup,
    psi_transform,
)
from bergmanlab.carleson import test_constant as family_constant
from bergmanlab.condexp import Identity, Monomial
from bergmanlab.errors import ConfigurationError
from bergmanlab.geometry import SpaceParams
from bergmanlab.geometry import test_function as kernel_power
from bergmanlab.measures import (
    Atomic,
    Polynomial,
    PolyWeighted,
    QuadConfig,
    RadialDensity,
    SumMeasure,
    WeightedArea,
    integrate,
)

from conftest import sample_disk

# reduced sizes for unit tests: the kernel grid is capped to what the reduced
# angular resolution integrates to full accuracy
CHEAP = CertifyConfig(
    quad=QuadConfig(96, 192),
    psi_grid=PsiGridSpec(4, 9, 8),
    family=FamilySpec(kernel_radii=(0.0, 0.5, 0.75, 0.875), n_dirs=4, random_count=8),
    lattice_epsilon=0.01,
)


class TestPsiTransform:
    def test_at_origin_gives_total_mass(self, small_quad):
        for mu in (WeightedArea(0.5), RadialDensity(1.0), Atomic.from_atoms([(0.3, 2.0)]),
                   PolyWeighted(Polynomial.from_coeffs([1, 0.5]), 2.0, 0.0)):
            got = psi_transform(mu, 0.0, 0.7, quad=small_quad)
            assert abs(got - mu.total_mass(small_quad)) < 1e-10

    @pytest.mark.parametrize("alpha", (-0.5, 0.0, 1.0))
    def test_reference_measure_is_flat(self, alpha, rng):
        for a in sample_disk(rng, 12, rmax=0.97):
            assert abs(psi_transform(WeightedArea(alpha), a, alpha) - 1.0) < 1e-8

    def test_atomic_closed_form(self):
        mu = Atomic.from_atoms([(0.9, 1.0)])
        # ((1 - 0.81)/(1 - 0.81)^2)^2 = (1/0.19)^2
        got = psi_transform(mu, 0.9, 0.0)
        assert abs(got - 1.0 / 0.19**2) < 1e-12

    def test_two_code_paths_agree(self, rng):
        # closed-form / pullback path vs direct integration of the test function
        quad = QuadConfig(128, 256)
        measures = [
            WeightedArea(0.5),
            RadialDensity(0.25, 1.3),
            PolyWeighted(Polynomial.from_coeffs([1.0, 0.5]), 2.0, 0.0),
            Atomic.from_atoms([(0.4, 1.0), (-0.2j, 0.5)]),
            SumMeasure((WeightedArea(0.0), Atomic.from_atoms([(0.1, 1.0)]))),
        ]
        params = SpaceParams(p=2.0, alpha=0.5)
        for mu in measures:
            for a in sample_disk(rng, 6, rmax=0.8):
                a = complex(a)
                smart = psi_transform(mu, a, params.alpha, quad=quad)
                direct = integrate(
                    mu, lambda z: np.abs(kernel_power(a, z, params)) ** params.p, quad)
                assert abs(smart - direct) < 1e-9

    def test_general_exponent(self, small_quad):
        # t = 1: int (1-|a|^2)/|1-conj(a) z|^2 dA(z) has closed form
        # (1-|a|^2) * sum_k |a|^(2k)/(k+1) = ((1-x)/x) * (-log(1-x)), x = |a|^2
        a = 0.6
        x = a * a
        expected = (1 - x) / x * (-np.log1p(-x))
        got = psi_transform(WeightedArea(0.0), a, 0.0, t=1.0, quad=small_quad)
        assert abs(got - expected) < 1e-12

    def test_invalid_exponent(self):
        with pytest.raises(ConfigurationError):
            psi_transform(WeightedArea(0.0), 0.1, 0.0, t=-1.0)


class TestPsiSup:
    def test_flat_reference(self):
        res = psi_sup(WeightedArea(0.0), 0.0, grid=PsiGridSpec(4, 9, 8))
        assert abs(res.sup - 1.0) < 1e-7
        assert abs(res.slope) < 0.01
        assert res.verdict == "bounded"

    def test_divergent_radial(self):
        res = psi_sup(RadialDensity(-0.5), 0.0, grid=PsiGridSpec(4, 10, 8))
        assert res.verdict == "divergent"
        assert -0.7 < res.slope < -0.3

    def test_atomic_sup_near_atom(self):
        mu = Atomic.from_atoms([(0.9, 1.0)])
        res = psi_sup(mu, 0.0, grid=PsiGridSpec(4, 10, 12))
        # the grid does not contain the atom exactly; the sup lands nearby
        assert 25.0 < res.sup < 1.0 / 0.19**2 + 1e-9
        assert abs(res.argmax - 0.9) < 0.05
        assert res.verdict == "bounded"

    def test_level_maxima_monotone(self):
        res = psi_sup(RadialDensity(-0.25), 0.0, grid=PsiGridSpec(4, 9, 4))
        vals = [v for _, v in res.level_maxima]
        assert all(x <= y + 1e-15 for x, y in zip(vals, vals[1:]))

    def test_zero_measure(self):
        res = psi_sup(RadialDensity(0.0, scale=0.0), 0.0, grid=PsiGridSpec(4, 6, 4))
        assert res.sup == 0.0
        assert res.verdict == "bounded"

    def test_heatmap_rows(self, small_quad):
        rows = psi_heatmap(WeightedArea(0.0), 0.0, n_radial=5, n_angular=8,
                           quad=small_quad)
        assert len(rows) == 1 + 4 * 8
        assert all(abs(psi - 1.0) < 1e-8 for _, _, psi in rows)


class TestDiskConstant:
    def test_reference_measure_value(self, small_quad):
        # ratio at the origin is exactly tanh(r)^2 and is the maximum
        lat = cached_lattice(1.0, 0.03)
        res = disk_constant(WeightedArea(0.0), 0.0, 1.0, lat, small_quad)
        assert abs(res.c2 - np.tanh(1.0) ** 2) < 1e-9
        assert res.argmax_index == 0
        assert res.verdict == "bounded"

    def test_linear_in_measure(self, small_quad):
        lat = cached_lattice(1.0, 0.03)
        mu = RadialDensity(0.5)
        a = disk_constant(mu, 0.0, 1.0, lat, small_quad).c2
        b = disk_constant(mu.scaled(2.0), 0.0, 1.0, lat, small_quad).c2
        assert b == 2.0 * a

    def test_atom_outside_every_disk(self, small_quad):
        lat = cached_lattice(1.0, 0.03)
        mu = Atomic.from_atoms([(0.9999, 1.0)])
        res = disk_constant(mu, 0.0, 1.0, lat, small_quad)
        assert res.c2 == 0.0

    def test_mismatched_radius_rejected(self, small_quad):
        lat = cached_lattice(1.0, 0.03)
        with pytest.raises(ConfigurationError):
            disk_constant(WeightedArea(0.0), 0.0, 0.5, lat, small_quad)

    def test_bound_formula(self):
        assert abs(disk_bound(0.0, 1.0, 0.0) - 1.0) < 1e-15
        s = np.tanh(1.0)
        expected = ((1 - 0.25) / (1 - 0.5 * s) ** 2) ** 2
        assert abs(disk_bound(0.5, 1.0, 0.0) - expected) < 1e-12


class TestTestConstant:
    def test_reference_measure_gives_one(self, small_quad):
        params = SpaceParams(2.0, 0.0)
        res = family_constant(WeightedArea(0.0), params, Identity(),
                            FamilySpec(kernel_radii=(0.0, 0.5, 0.75), n_dirs=4,
                                       random_count=6), small_quad)
        assert abs(res.c1 - 1.0) < 1e-9

    def test_zero_measure(self, small_quad):
        params = SpaceParams(2.0, 0.0)
        res = family_constant(RadialDensity(0.0, scale=0.0), params, Identity(),
                            FamilySpec(n_dirs=4, random_count=4), small_quad)
        assert res.c1 == 0.0

    def test_expectation_annihilates_odd_monomials(self, small_quad):
        params = SpaceParams(2.0, 0.0)
        res = family_constant(WeightedArea(0.0), params, Monomial(2),
                            FamilySpec(kernel_radii=(), random_count=0,
                                       monomial_degree=5), small_quad)
        for m in (1, 3, 5):
            assert res.ratios[f"monomial:z^{m}"] < 1e-20
        for m in (0, 2, 4):
            assert res.ratios[f"monomial:z^{m}"] > 0.1

    def test_empty_family_rejected(self, small_quad):
        with pytest.raises(ConfigurationError):
            build_family(FamilySpec(kernel_radii=(), random_count=0), SpaceParams(2.0, 0.0))

    def test_kernel_family_matches_psi(self, small_quad):
        # for the identity map the kernel-member ratios are transform values
        params = SpaceParams(2.0, 0.0)
        mu = RadialDensity(0.5)
        fam = FamilySpec(kernel_radii=(0.0, 0.5, 0.75), n_dirs=4, random_count=0)
        res = family_constant(mu, params, Identity(), fam, small_quad)
        centers = [m.kernel_center for m in build_family(fam, params)]
        sup_psi = max(psi_transform(mu, a, params.alpha, quad=small_quad) for a in centers)
        assert abs(res.c1 - sup_psi) < 1e-6


class TestCertify:
    def test_reference_measure(self):
        rep = certify(WeightedArea(0.0), SpaceParams(2.0, 0.0), 1.0, Identity(), CHEAP)
        assert rep.verdict == "carleson"
        assert rep.failure is None
        for key, val in rep.ratios.items():
            assert abs(val - 1.0) < 1e-6, key
        assert abs(rep.c2_normalized - 1.0) < 1e-9

    def test_growth_side_bounded(self):
        rep = certify(RadialDensity(1.0), SpaceParams(2.0, 0.0), 1.0, Identity(), CHEAP)
        assert rep.verdict == "carleson"
        assert np.isfinite(rep.c1) and np.isfinite(rep.c3)

    def test_divergent_radial(self):
        rep = certify(RadialDensity(-0.5), SpaceParams(2.0, 0.0), 1.0, Identity(), CHEAP)
        assert rep.verdict == "not-carleson"
        assert rep.psi_verdict == "divergent"
        assert rep.c2_verdict == "divergent"

    def test_scaling_by_two_is_exact(self):
        mu = RadialDensity(0.5)
        a = certify(mu, SpaceParams(2.0, 0.0), 1.0, Identity(), CHEAP)
        b = certify(mu.scaled(2.0), SpaceParams(2.0, 0.0), 1.0, Identity(), CHEAP)
        assert b.c1 == 2.0 * a.c1
        assert b.c2 == 2.0 * a.c2
        assert b.c3 == 2.0 * a.c3
        for key in a.ratios:
            assert b.ratios[key] == pytest.approx(a.ratios[key], rel=1e-12)

    def test_monotone_in_measure(self):
        mu = RadialDensity(0.5)
        nu = SumMeasure((mu, Atomic.from_atoms([(0.5, 0.3)])))
        a = certify(mu, SpaceParams(2.0, 0.0), 1.0, Identity(), CHEAP)
        b = certify(nu, SpaceParams(2.0, 0.0), 1.0, Identity(), CHEAP)
        assert b.c1 >= a.c1 and b.c2 >= a.c2 and b.c3 >= a.c3

    def test_deterministic(self):
        a = certify(WeightedArea(1.0), SpaceParams(2.0, 1.0), 1.0, Identity(), CHEAP)
        b = certify(WeightedArea(1.0), SpaceParams(2.0, 1.0), 1.0, Identity(), CHEAP)
        assert a.to_dict() == b.to_dict()

    def test_symmetrized_mode(self):
        from dataclasses import replace

        config = replace(CHEAP, mode="symmetrized")
        rep = certify(WeightedArea(0.0), SpaceParams(2.0, 0.0), 1.0, Monomial(2), config)
        assert rep.mode == "symmetrized"
        assert rep.verdict == "carleson"
        assert rep.config["mode"] == "symmetrized"

    def test_partial_report_on_failure(self):
        from dataclasses import replace

        # an impossible lattice radius surfaces as a failure record, not a crash
        config = replace(CHEAP, mode="symmetrized")
        rep = certify(WeightedArea(0.0), SpaceParams(2.0, 0.0), 1.0, Identity(), config)
        assert rep.verdict == "error"
        assert rep.failure["stage"] == "disk_constant"

    def test_report_dict_structure(self):
        rep = certify(WeightedArea(0.0), SpaceParams(2.0, 0.0), 1.0, Identity(), CHEAP)
        d = rep.to_dict()
        assert set(d) >= {"constants", "ratios", "divergence", "verdict", "config", "mode"}
        assert d["config"]["measure"] == {"type": "area", "alpha": 0.0}
