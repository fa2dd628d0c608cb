"""Variations of the total mass along fixed-particle-number deformations.

A deformation moves each fluid shell, labelled by its interior particle
count chi, from the background radius r0(chi) to r0 + lambda rdot(chi).
``first_variation`` and ``second_variation`` evaluate dM/dlambda and
d^2M/dlambda^2 at lambda = 0 in closed form, as weighted radial integrals of
the background profile.  A solved star is a critical point (dM/dlambda = 0
for every rdot), and the second variation is positive there; comparing it
against the quadratic deformation norm ``variation_energy`` quantifies how
coercive that minimum is.

All integrals are written in the background areal radius r with regular
integrands; the chi-line-element factors are absorbed analytically so no
quantity in this module is singular at the centre.

``audit_perturbations`` draws a reproducible randomized family of deformation
shapes, normalised to unit surface displacement so that surface-weighted
criticality defects are comparable across draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .background import BackgroundProfile, _readonly, derive_metric_fields, psi_radial_gradient
from .errors import DomainError
from .numerics import cumulative_simpson_uniform, derivative_uniform, simpson_uniform

FOUR_PI = 4.0 * math.pi

DEFAULT_AUDIT_SEED = 20260823
DEFAULT_AUDIT_MODES = 8


def integrating_factor(profile: BackgroundProfile) -> np.ndarray:
    """I(r) = integral_0^r 4 pi s n^2 / (1 - 2m/s) ds; regular, ~ 2 pi r^2."""
    r = profile.r
    n2 = 2.0 * profile.rho - 1.0
    two_m_over_r = 2.0 * profile.m_over_r3 * r * r
    integrand = FOUR_PI * r * n2 / (1.0 - two_m_over_r)
    return cumulative_simpson_uniform(integrand, profile.dr)


def tov_defect(profile: BackgroundProfile) -> np.ndarray:
    """Pointwise hydrostatic defect 4 pi r^2 (rho' - rho'_eq).

    rho' is the finite-difference slope of the stored density and rho'_eq the
    equilibrium slope implied by (m, rho) at the same point.  Vanishes to
    truncation error exactly when the profile solves the static system.
    """
    r = profile.r
    rho = profile.rho
    n2 = 2.0 * rho - 1.0
    two_m_over_r = 2.0 * profile.m_over_r3 * r * r
    rho_eq_slope = -n2 * (FOUR_PI * r * (rho - 1.0) + profile.m_over_r3 * r) / (1.0 - two_m_over_r)
    rho_data_slope = np.gradient(rho, profile.dr, edge_order=2)
    return FOUR_PI * r * r * (rho_data_slope - rho_eq_slope)


def first_variation(profile: BackgroundProfile, rdot: np.ndarray) -> float:
    """dM/dlambda for the shell displacement rdot (given on the radial grid).

    Vanishes (to truncation error) on a solved star for every rdot; for
    off-equilibrium data the surface term -4 pi R^2 (rho(R) - 1) rdot(R)
    and the bulk hydrostatic defect both contribute.
    """
    profile.require_metric()
    rdot = np.asarray(rdot, dtype=float)
    I = integrating_factor(profile)
    k = tov_defect(profile)
    bulk = simpson_uniform(k * rdot * np.exp(I), profile.dr)
    surface = FOUR_PI * profile.R**2 * (profile.rho[-1] - 1.0) * rdot[-1]
    return float(math.exp(-I[-1]) * bulk - surface)


def _quadratic_coefficients(profile: BackgroundProfile):
    r = profile.r
    rho = profile.rho
    n2 = 2.0 * rho - 1.0
    two_m_over_r = 2.0 * profile.m_over_r3 * r * r
    q = psi_radial_gradient(profile)
    A = 8.0 * math.pi * rho + 8.0 * math.pi * n2 - 24.0 * math.pi * r * n2 * q
    B = 16.0 * math.pi * r * rho - 8.0 * math.pi * r * r * n2 * q
    C = FOUR_PI * r * r * n2
    D = FOUR_PI * r * r * n2 * n2 / (1.0 - two_m_over_r)
    return A, B, C, D


def second_variation(
    profile: BackgroundProfile,
    rdot: np.ndarray,
    dphi_rdot: np.ndarray | None = None,
) -> float:
    """d^2M/dlambda^2 at a solved star, as a quadratic form in the deformation.

    ``dphi_rdot`` carries the angular derivative of the displacement for
    non-spherical deformations; omit it for spherical ones.
    """
    profile.require_metric()
    rdot = np.asarray(rdot, dtype=float)
    A, B, C, D = _quadratic_coefficients(profile)
    rdot_prime = derivative_uniform(rdot, profile.dr, order=2)
    integrand = A * rdot * rdot + B * rdot * rdot_prime + C * rdot_prime * rdot_prime
    if dphi_rdot is not None:
        dphi = np.asarray(dphi_rdot, dtype=float)
        integrand = integrand + D * dphi * dphi
    I = integrating_factor(profile)
    total = simpson_uniform(integrand * np.exp(I), profile.dr)
    return float(math.exp(-I[-1]) * total)


def variation_energy(
    profile: BackgroundProfile,
    rdot: np.ndarray,
    dphi_rdot: np.ndarray | None = None,
) -> float:
    """Quadratic deformation norm: shells weighted by vol., slope and angle terms.

    This is the integral of (rdot/r)^2 + (d_phi rdot)^2 + r^4 (d_chi rdot)^2
    against the particle measure dchi, rewritten in r with regular weights.
    """
    profile.require_metric()
    rdot = np.asarray(rdot, dtype=float)
    r = profile.r
    n = profile.n
    root = np.sqrt(1.0 - 2.0 * profile.m_over_r3 * r * r)
    rdot_prime = derivative_uniform(rdot, profile.dr, order=2)
    w_amp = FOUR_PI * n / root
    w_slope = r * r * root / (FOUR_PI * n)
    integrand = w_amp * rdot * rdot + w_slope * rdot_prime * rdot_prime
    if dphi_rdot is not None:
        dphi = np.asarray(dphi_rdot, dtype=float)
        integrand = integrand + FOUR_PI * r * r * n / root * dphi * dphi
    return float(simpson_uniform(integrand, profile.dr))


def equivalence_ratio(
    profile: BackgroundProfile,
    rdot: np.ndarray,
    dphi_rdot: np.ndarray | None = None,
) -> float:
    """second_variation / variation_energy; bounded windows certify coercivity."""
    return second_variation(profile, rdot, dphi_rdot) / variation_energy(profile, rdot, dphi_rdot)


# ------------------------------------------------------------- mass aspect


def mass_aspect_rate(profile: BackgroundProfile, rdot: np.ndarray, exponent: float) -> np.ndarray:
    """d/dlambda of m/r^(1+e) at fixed shell, for e = ``exponent`` in [0, 1/2].

    Uses the linearized constraint mdot = -4 pi r^2 (rho - 1) rdot.  The rate
    vanishes at the centre like r^(1-e).
    """
    if not (0.0 <= exponent <= 0.5):
        raise DomainError(f"mass-aspect exponent must lie in [0, 1/2], got {exponent}")
    rdot = np.asarray(rdot, dtype=float)
    r = profile.r
    rate = np.zeros_like(r)
    rpow = r[1:] ** (1.0 - exponent)
    rate[1:] = (
        -rpow
        * (FOUR_PI * (profile.rho[1:] - 1.0) + (1.0 + exponent) * profile.m_over_r3[1:])
        * rdot[1:]
    )
    return rate


def mass_aspect_bound_ratio(
    profile: BackgroundProfile,
    rdot: np.ndarray,
    exponent: float,
    dphi_rdot: np.ndarray | None = None,
    squared: bool = False,
) -> float:
    """Peak weighted mass-aspect rate over the second variation.

    Plain form:    sup_r r^(e - 1/2) |rate|   / d2M
    Squared form:  sup_r r^(e - 1/2) rate^2   / d2M

    Only the squared form is invariant under rescaling the deformation; the
    plain form is kept because its peak value is a useful fixed diagnostic
    for the unit-surface-displacement audit family.
    """
    rate = mass_aspect_rate(profile, rdot, exponent)
    r = profile.r[1:]
    weighted = r ** (exponent - 0.5) * (rate[1:] ** 2 if squared else np.abs(rate[1:]))
    d2m = second_variation(profile, rdot, dphi_rdot)
    if d2m <= 0.0:
        raise DomainError("second variation not positive; mass-aspect bound undefined")
    return float(np.max(weighted) / d2m)


# ------------------------------------------------------------------ controls


def detuned_profile(profile: BackgroundProfile, factor: float = 1.01) -> BackgroundProfile:
    """Scale density and mass function by ``factor``, re-deriving metric fields.

    Scaling both keeps the integral mass-density relation intact (it is
    linear), so the result is admissible initial data, but it is not a solved
    star: criticality diagnostics must flag it.  Serves as the negative
    control.
    """
    if factor < 1.0:
        raise DomainError("detuning factor below 1 would cross the stiff floor")
    bare = replace(
        profile,
        rho=_readonly(factor * profile.rho),
        p=_readonly(factor * profile.rho - 1.0),
        m=_readonly(factor * profile.m),
        m_over_r3=_readonly(factor * profile.m_over_r3),
        n=None,
        psi=None,
        omega=None,
        chi=None,
        drdchi=None,
        dpsidchi=None,
        M_total=None,
        N_total=None,
        provenance={**profile.provenance, "detuned": factor},
    )
    return derive_metric_fields(bare)


# -------------------------------------------------------------------- audit


@dataclass(frozen=True)
class AuditPerturbation:
    """One randomized deformation; rdot is normalised to rdot(surface) = 1."""

    rdot: np.ndarray
    dphi_rdot: np.ndarray
    seed: int


def _sine_shape(xi: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(xi)
    for k, a in enumerate(coeffs, start=1):
        out += a * np.sin((k - 0.5) * math.pi * xi)
    return out


def audit_perturbations(
    profile: BackgroundProfile,
    count: int = 50,
    seed: int = DEFAULT_AUDIT_SEED,
    modes: int = DEFAULT_AUDIT_MODES,
) -> list[AuditPerturbation]:
    """Reproducible random deformations built from quarter-wave sines of chi.

    Coefficients fall off like 1/k^2 so the shapes stay slope-dominated
    rather than oscillation-dominated; each rdot is rescaled to unit surface
    displacement (draws whose surface value is accidentally tiny are
    redrawn).  The angular-derivative field is an independent draw in the
    same basis.
    """
    profile.require_metric()
    xi = profile.chi / profile.N_total
    rng = np.random.default_rng(seed)
    signs = np.array([(-1.0) ** (k - 1) for k in range(1, modes + 1)])
    decay = 1.0 / np.arange(1, modes + 1) ** 2
    out: list[AuditPerturbation] = []
    for i in range(count):
        while True:
            coeffs = rng.standard_normal(modes) * decay
            surface = float(coeffs @ signs)
            if abs(surface) >= 1e-3:
                break
        coeffs = coeffs / surface
        dphi_coeffs = rng.standard_normal(modes) * decay
        out.append(
            AuditPerturbation(
                rdot=_readonly(_sine_shape(xi, coeffs)),
                dphi_rdot=_readonly(_sine_shape(xi, dphi_coeffs)),
                seed=seed + i,
            )
        )
    return out


@dataclass(frozen=True)
class AuditReport:
    """Summary of criticality and coercivity over a deformation family."""

    first_variations: np.ndarray
    second_variations: np.ndarray
    energies: np.ndarray
    ratios: np.ndarray

    @property
    def max_abs_first(self) -> float:
        return float(np.max(np.abs(self.first_variations)))

    @property
    def ratio_window(self) -> tuple[float, float]:
        return float(np.min(self.ratios)), float(np.max(self.ratios))


def criticality_audit(
    profile: BackgroundProfile,
    perturbations: Sequence[AuditPerturbation] | None = None,
) -> AuditReport:
    """Evaluate first/second variation and energy over the audit family."""
    if perturbations is None:
        perturbations = audit_perturbations(profile)
    firsts, seconds, energies = [], [], []
    for pert in perturbations:
        firsts.append(first_variation(profile, pert.rdot))
        seconds.append(second_variation(profile, pert.rdot, pert.dphi_rdot))
        energies.append(variation_energy(profile, pert.rdot, pert.dphi_rdot))
    firsts = np.array(firsts)
    seconds = np.array(seconds)
    energies = np.array(energies)
    return AuditReport(
        first_variations=_readonly(firsts),
        second_variations=_readonly(seconds),
        energies=_readonly(energies),
        ratios=_readonly(seconds / energies),
    )
