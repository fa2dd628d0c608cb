"""Mass-variation formulas checked against the deformed-family oracle."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hardstars import DomainError
from hardstars.variation import (
    AuditPerturbation,
    audit_perturbations,
    criticality_audit,
    detuned_profile,
    equivalence_ratio,
    first_variation,
    integrating_factor,
    mass_aspect_bound_ratio,
    mass_aspect_rate,
    second_variation,
    tov_defect,
    variation_energy,
)

from family_oracle import DeformedFamily

FOUR_PI = 4.0 * math.pi


def _quarter_wave(profile, k: int):
    c = (k - 0.5) * math.pi / profile.N_total
    shape = lambda chi: math.sin(c * chi)  # noqa: E731
    slope = lambda chi: c * math.cos(c * chi)  # noqa: E731
    rdot = np.sin(c * profile.chi)
    return shape, slope, rdot


@pytest.fixture(scope="module")
def detuned_r01(star_r01):
    return detuned_profile(star_r01, 1.01)


# ---------------------------------------------------------- solved-star side


def test_integrating_factor_shape(star_r01):
    I = integrating_factor(star_r01)
    assert I[0] == 0.0
    assert np.all(np.diff(I) > 0.0)
    lead = 2.0 * math.pi * star_r01.R**2
    assert 1.0 < I[-1] / lead < 1.2


def test_tov_defect_vanishes_on_solved_star(star_r01):
    assert np.max(np.abs(tov_defect(star_r01))) < 1e-6


def test_first_variation_vanishes_on_solved_star(star_r01):
    for k in (1, 2, 3):
        _, _, rdot = _quarter_wave(star_r01, k)
        assert abs(first_variation(star_r01, rdot)) < 1e-9
    linear = star_r01.chi / star_r01.N_total
    assert abs(first_variation(star_r01, linear)) < 1e-9


def test_second_variation_matches_family(star_r01):
    shape, slope, rdot = _quarter_wave(star_r01, 1)
    fam = DeformedFamily(star_r01, shape, slope)
    coarse = fam.second_derivative(5e-3)
    fine = fam.second_derivative(2.5e-3)
    richardson = (4.0 * fine - coarse) / 3.0
    formula = second_variation(star_r01, rdot)
    assert formula == pytest.approx(richardson, rel=1e-4)
    assert formula > 0.0


def test_second_variation_quadratic_scaling(star_r01):
    _, _, rdot = _quarter_wave(star_r01, 2)
    dphi = np.cos(math.pi * star_r01.chi / star_r01.N_total) - 1.0
    base = second_variation(star_r01, rdot, dphi)
    scaled = second_variation(star_r01, 3.0 * rdot, 3.0 * dphi)
    assert scaled == pytest.approx(9.0 * base, rel=1e-12)


def test_variation_energy_is_a_quadratic_norm(star_r01):
    _, _, rdot = _quarter_wave(star_r01, 1)
    dphi = np.sin(math.pi * star_r01.chi / star_r01.N_total)
    e = variation_energy(star_r01, rdot, dphi)
    assert e > 0.0
    assert variation_energy(star_r01, 2.0 * rdot, 2.0 * dphi) == pytest.approx(4.0 * e, rel=1e-12)
    # angular term only adds energy
    assert variation_energy(star_r01, rdot, dphi) > variation_energy(star_r01, rdot)


# -------------------------------------------------------------- detuned side


def test_detuned_profile_keeps_mass_density_relation(star_r01, detuned_r01):
    det = detuned_r01
    slope = np.gradient(det.m, det.dr, edge_order=2)
    target = FOUR_PI * det.r**2 * det.rho
    assert np.max(np.abs(slope - target)) < 1e-6 * np.max(target)
    assert det.rho[-1] == pytest.approx(1.01, abs=1e-12)
    with pytest.raises(DomainError):
        detuned_profile(star_r01, 0.99)


def test_first_variation_matches_family_on_detuned(detuned_r01):
    shape, slope, rdot = _quarter_wave(detuned_r01, 1)
    fam = DeformedFamily(detuned_r01, shape, slope)
    coarse = fam.first_derivative(5e-4)
    fine = fam.first_derivative(2.5e-4)
    richardson = (4.0 * fine - coarse) / 3.0
    formula = first_variation(detuned_r01, rdot)
    assert formula == pytest.approx(richardson, rel=1e-5)
    assert abs(formula) > 1e-3


def test_first_variation_is_linear(detuned_r01):
    _, _, a = _quarter_wave(detuned_r01, 1)
    _, _, b = _quarter_wave(detuned_r01, 2)
    lhs = first_variation(detuned_r01, 2.0 * a - 0.5 * b)
    rhs = 2.0 * first_variation(detuned_r01, a) - 0.5 * first_variation(detuned_r01, b)
    assert lhs == pytest.approx(rhs, rel=1e-12)


# --------------------------------------------------------------- mass aspect


@pytest.mark.parametrize("exponent", [0.0, 0.25, 0.5])
def test_mass_aspect_rate_matches_family(star_r01, exponent):
    shape, slope, rdot = _quarter_wave(star_r01, 1)
    fam = DeformedFamily(star_r01, shape, slope)
    coarse = fam.aspect_rate_fd(exponent, 1e-3)
    fine = fam.aspect_rate_fd(exponent, 5e-4)
    richardson = (4.0 * fine - coarse) / 3.0
    rate = mass_aspect_rate(star_r01, rdot, exponent)
    probes = [100, 500, 1000, 1500, 2000]
    assert np.max(np.abs(rate[probes] / richardson[probes] - 1.0)) < 1e-5
    assert rate[0] == 0.0


def test_mass_aspect_rate_rejects_bad_exponent(star_r01):
    _, _, rdot = _quarter_wave(star_r01, 1)
    with pytest.raises(DomainError):
        mass_aspect_rate(star_r01, rdot, 0.75)


def test_mass_aspect_squared_ratio_is_scale_invariant(star_r01):
    _, _, rdot = _quarter_wave(star_r01, 1)
    base = mass_aspect_bound_ratio(star_r01, rdot, 0.25, squared=True)
    scaled = mass_aspect_bound_ratio(star_r01, 3.0 * rdot, 0.25, squared=True)
    assert scaled == pytest.approx(base, rel=1e-12)
    # the unsquared variant is not scale invariant: it shrinks with amplitude
    plain = mass_aspect_bound_ratio(star_r01, rdot, 0.25, squared=False)
    plain_scaled = mass_aspect_bound_ratio(star_r01, 3.0 * rdot, 0.25, squared=False)
    assert plain_scaled == pytest.approx(plain / 3.0, rel=1e-12)


# -------------------------------------------------------------------- audit


def test_audit_perturbations_reproducible(star_r01):
    a = audit_perturbations(star_r01, count=5, seed=7)
    b = audit_perturbations(star_r01, count=5, seed=7)
    for pa, pb in zip(a, b):
        assert np.array_equal(pa.rdot, pb.rdot)
        assert np.array_equal(pa.dphi_rdot, pb.dphi_rdot)
    c = audit_perturbations(star_r01, count=5, seed=8)
    assert not np.array_equal(a[0].rdot, c[0].rdot)
    for pert in a:
        assert pert.rdot[-1] == pytest.approx(1.0, rel=1e-12)


def test_criticality_audit_separates_solved_from_detuned(star_r01, detuned_r01):
    perts = audit_perturbations(star_r01, count=12)
    solved = criticality_audit(star_r01, perts)
    assert solved.max_abs_first < 1e-6
    assert np.all(solved.second_variations > 0.0)
    assert np.all(solved.ratios > 0.0)

    det_perts = audit_perturbations(detuned_r01, count=12)
    det = criticality_audit(detuned_r01, det_perts)
    assert np.min(np.abs(det.first_variations)) > 1e-3


def test_equivalence_ratio_consistency(star_r01):
    _, _, rdot = _quarter_wave(star_r01, 1)
    r = equivalence_ratio(star_r01, rdot)
    assert r == pytest.approx(
        second_variation(star_r01, rdot) / variation_energy(star_r01, rdot), rel=1e-14
    )


def test_audit_perturbation_arrays_frozen(star_r01):
    pert = audit_perturbations(star_r01, count=1)[0]
    assert isinstance(pert, AuditPerturbation)
    with pytest.raises(ValueError):
        pert.rdot[0] = 5.0
