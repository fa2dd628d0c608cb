"""Linear radial waves on a static star, in the shell coordinate.

The dynamical field u(chi, t) is the first-order displacement of the fluid
shell labelled by interior particle count chi; t is the clock of the comoving
frame.  The equation of motion is

    mass(chi) d2u/dt2 = d/dchi ( flux(chi) du/dchi ) + V(chi) u,

with  mass = e^F n^2,  flux = 16 pi^2 r0^4 n^2 e^F,  and a potential V < 0
that diverges like -2/r0^2 at the centre.  F is a regular radial integral of
the background; remarkably flux/mass = (4 pi r0^2)^2 exactly, so the
characteristic speed in chi equals the shell surface area.

Boundary conditions: u = 0 at the centre (strongly), and at the surface the
Robin condition du/dchi = alpha u with alpha = q(R) - 2/R < 0.

The discretisation is a node-centred second-order finite-volume scheme on a
uniform chi grid with velocity-Verlet time stepping.  The surface node owns a
half cell, which makes the semi-discrete energy

    E = 1/2 sum mass v^2 w + 1/2 sum flux_half (Du)^2/dchi
        - 1/2 sum V u^2 w - 1/2 flux_B alpha u_B^2

an exact invariant (all four terms are nonnegative); the time stepper then
conserves it to O(dt^2) uniformly.  ``reconstruct`` maps a displacement field
to the remaining linearized metric and matter fields, and
``constraint_residual`` measures how well a state satisfies the linearized
mass constraint; its meaningful norm is over a fixed interior fraction, since
chi-stencils lose accuracy at the centre where r0 ~ chi^(1/3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .background import BackgroundProfile, _readonly
from .errors import CflViolationError, DomainError, InstabilityError
from .numerics import cumulative_simpson_uniform, derivative_uniform

FOUR_PI = 4.0 * math.pi


# ------------------------------------------------------------- coefficients


@dataclass(frozen=True)
class WaveCoefficients:
    """Background data sampled on the uniform chi grid of the wave solver."""

    profile: BackgroundProfile
    n_chi: int
    dchi: float
    chi: np.ndarray
    r0: np.ndarray
    rho0: np.ndarray
    n0: np.ndarray
    m0: np.ndarray
    q: np.ndarray          # radial gradient of the lapse potential
    w: np.ndarray          # dchi/dr0 at the nodes (0 at the centre)
    drdchi: np.ndarray     # dr0/dchi at the nodes (inf at the centre)
    r0_half: np.ndarray    # shell radii at the half nodes
    F: np.ndarray
    mass: np.ndarray
    V: np.ndarray          # potential; node 0 stored as 0 and never used
    flux_half: np.ndarray  # flux at the n_chi - 1 half nodes
    flux_surface: float
    alpha: float
    cmax: float

    @property
    def B(self) -> float:
        return float(self.chi[-1])


def _invert_chi(chi_spline: CubicSpline, targets: np.ndarray, R: float) -> np.ndarray:
    out = np.empty_like(targets)
    lo = 0.0
    for i, t in enumerate(targets):
        if t <= 0.0:
            out[i] = 0.0
            lo = 0.0
            continue
        out[i] = brentq(lambda r: chi_spline(r) - t, lo, R, xtol=1e-15, rtol=8.9e-16)
        lo = max(0.0, out[i] - 1e-12)
    return out


def _fields_at(r0, rho_sp, mor3_sp, F_sp):
    rho = rho_sp(r0)
    mor3 = mor3_sp(r0)
    F = F_sp(r0)
    n2 = 2.0 * rho - 1.0
    D = 1.0 - 2.0 * mor3 * r0 * r0
    return rho, mor3, F, n2, D


def potential_bracket(r0, rho, mor3):
    """Zeroth-order stability bracket and lapse gradient q at radius r0.

    The bracket is the potential stripped of its e^F weight:
    2 q^2 D + 2 m/r^3 + 4 pi r n^2 (2/r - q) - D (2/r^2 + q') with
    D = 1 - 2m/r.  It diverges like -2/r^2 at the centre.
    """
    n2 = 2.0 * rho - 1.0
    D = 1.0 - 2.0 * mor3 * r0 * r0
    N = mor3 * r0 + FOUR_PI * r0 * (rho - 1.0)
    q = N / D
    rho_eq_slope = -n2 * N / D
    N_prime = FOUR_PI * rho - 2.0 * mor3 + FOUR_PI * (rho - 1.0) + FOUR_PI * r0 * rho_eq_slope
    D_prime = -8.0 * math.pi * r0 * rho + 2.0 * mor3 * r0
    q_prime = (N_prime * D - N * D_prime) / (D * D)
    with np.errstate(divide="ignore", invalid="ignore"):
        bracket = (
            2.0 * q * q * D
            + 2.0 * mor3
            + 8.0 * math.pi * n2
            - FOUR_PI * r0 * n2 * q
            - 2.0 * D / (r0 * r0)
            - D * q_prime
        )
    return bracket, q


def assemble_coefficients(profile: BackgroundProfile, n_chi: int = 1001) -> WaveCoefficients:
    """Sample the wave-equation coefficients on a uniform chi grid.

    The radius of each shell is found by inverting the background chi(r)
    map (root-finding in r, where everything is smooth); the coefficient
    formulas are then evaluated pointwise from splines of the regular
    background fields.
    """
    profile.require_metric()
    if n_chi < 16:
        raise DomainError(f"n_chi must be at least 16, got {n_chi}")
    B = profile.N_total
    R = profile.R
    n = n_chi
    dchi = B / (n - 1)
    chi = np.linspace(0.0, B, n)

    chi_sp = CubicSpline(profile.r, profile.chi)
    rho_sp = CubicSpline(profile.r, profile.rho)
    mor3_sp = CubicSpline(profile.r, profile.m_over_r3)

    # regular radial integral entering the mass and flux weights
    r_bg = profile.r
    denom_bg = 1.0 - 2.0 * profile.m_over_r3 * r_bg * r_bg
    f_bg = r_bg * (8.0 * math.pi * profile.rho - 2.0 * profile.m_over_r3) / denom_bg
    F_bg = cumulative_simpson_uniform(f_bg, profile.dr)
    F_sp = CubicSpline(r_bg, F_bg)

    r0 = _invert_chi(chi_sp, chi, R)
    r0[-1] = R
    r0_half = _invert_chi(chi_sp, chi[:-1] + 0.5 * dchi, R)

    rho0, mor3, F, n2, D = _fields_at(r0, rho_sp, mor3_sp, F_sp)
    if np.any(D <= 0.0) or np.any(n2 <= 0.0):
        raise DomainError("coefficient assembly left the regular domain")
    bracket, q = potential_bracket(r0, rho0, mor3)
    V = np.exp(F) * bracket
    V[0] = 0.0
    eF = np.exp(F)
    mass = eF * n2
    with np.errstate(divide="ignore"):
        w = FOUR_PI * r0 * r0 * np.sqrt(n2) / np.sqrt(D)
        drdchi = np.where(w > 0.0, 1.0 / np.maximum(w, 1e-300), np.inf)
        drdchi[0] = np.inf

    rho_h, mor3_h, F_h, n2_h, D_h = _fields_at(r0_half, rho_sp, mor3_sp, F_sp)
    flux_half = 16.0 * math.pi**2 * r0_half**4 * n2_h * np.exp(F_h)
    flux_surface = float(16.0 * math.pi**2 * R**4 * n2[-1] * eF[-1])
    alpha = float(q[-1] - 2.0 / R)

    return WaveCoefficients(
        profile=profile,
        n_chi=n,
        dchi=dchi,
        chi=_readonly(chi),
        r0=_readonly(r0),
        rho0=_readonly(rho0),
        n0=_readonly(np.sqrt(n2)),
        m0=_readonly(mor3 * r0**3),
        q=_readonly(q),
        w=_readonly(w),
        drdchi=_readonly(drdchi),
        r0_half=_readonly(r0_half),
        F=_readonly(F),
        mass=_readonly(mass),
        V=_readonly(V),
        flux_half=_readonly(flux_half),
        flux_surface=flux_surface,
        alpha=alpha,
        cmax=FOUR_PI * R * R,
    )


# ------------------------------------------------------------------ dynamics


def acceleration(coeffs: WaveCoefficients, u: np.ndarray) -> np.ndarray:
    """Spatial operator: (d/dchi(flux du/dchi) + V u)/mass with both BCs."""
    dchi = coeffs.dchi
    D = coeffs.flux_half * np.diff(u) / dchi
    acc = np.empty_like(u)
    acc[0] = 0.0
    acc[1:-1] = (D[1:] - D[:-1]) / (dchi * coeffs.mass[1:-1]) + (
        coeffs.V[1:-1] / coeffs.mass[1:-1]
    ) * u[1:-1]
    acc[-1] = (2.0 / (dchi * coeffs.mass[-1])) * (
        coeffs.flux_surface * coeffs.alpha * u[-1] - D[-1]
    ) + (coeffs.V[-1] / coeffs.mass[-1]) * u[-1]
    return acc


def discrete_energy(coeffs: WaveCoefficients, u: np.ndarray, v: np.ndarray) -> float:
    """The exact invariant of the semi-discrete system (sum of four
    nonnegative pieces: kinetic, gradient, potential, surface)."""
    dchi = coeffs.dchi
    wgt = np.full(coeffs.n_chi, dchi)
    wgt[0] = 0.0
    wgt[-1] = 0.5 * dchi
    kinetic = 0.5 * float(np.sum(coeffs.mass * v * v * wgt))
    gradient = 0.5 * float(np.sum(coeffs.flux_half * np.diff(u) ** 2)) / dchi
    potential = -0.5 * float(np.sum(coeffs.V * u * u * wgt))
    surface = -0.5 * coeffs.flux_surface * coeffs.alpha * u[-1] ** 2
    return kinetic + gradient + potential + surface


def energy_norms(coeffs: WaveCoefficients, u: np.ndarray, v: np.ndarray) -> dict[str, float]:
    """Weighted field norms (trapezoid in chi; centre values by shell ratio).

    "norm"   : integral of u^2/r0^2 + v^2 + r0^4 (du/dchi)^2
    "first"  : integral of u^2/r0^2 + v^2/r0^2 + r0^4 (du/dchi)^2
    "second" : integral of (Lu)^2/r0^2 + r0^4 (dv/dchi)^2 + r0^10 (d2u/dchi2)^2
    where L is the spatial operator.  These are diagnostics of boundedness,
    not invariants.
    """
    dchi = coeffs.dchi
    r0 = coeffs.r0

    def ratio_sq(f: np.ndarray) -> np.ndarray:
        out = np.empty_like(f)
        out[1:] = (f[1:] / r0[1:]) ** 2
        out[0] = (f[1] / r0[1]) ** 2
        return out

    du = derivative_uniform(u, dchi, order=2)
    dv = derivative_uniform(v, dchi, order=2)
    d2u = derivative_uniform(du, dchi, order=2)
    r4 = r0**4
    norm = np.trapezoid(ratio_sq(u) + v * v + r4 * du * du, dx=dchi)
    first = np.trapezoid(ratio_sq(u) + ratio_sq(v) + r4 * du * du, dx=dchi)
    lu = acceleration(coeffs, u)
    second = np.trapezoid(ratio_sq(lu) + r4 * dv * dv + r0**10 * d2u * d2u, dx=dchi)
    return {"norm": float(norm), "first": float(first), "second": float(second)}


def cfl_timestep(coeffs: WaveCoefficients, cfl: float) -> float:
    if not (0.0 < cfl <= 0.5):
        raise CflViolationError(
            f"cfl must lie in (0, 0.5] for the explicit stepper, got {cfl}"
        )
    return cfl * coeffs.dchi / coeffs.cmax


@dataclass(frozen=True)
class EvolutionResult:
    """Final state plus sampled diagnostics of one evolution run."""

    dt: float
    n_steps: int
    u: np.ndarray
    v: np.ndarray
    times: np.ndarray
    energies: np.ndarray
    norm_series: dict[str, np.ndarray]
    residuals: np.ndarray
    probe_times: np.ndarray
    probe_values: np.ndarray
    initial_energy: float
    provenance: dict = field(default_factory=dict)

    @property
    def max_energy_drift(self) -> float:
        return float(np.max(np.abs(self.energies / self.initial_energy - 1.0)))


def evolve(
    coeffs: WaveCoefficients,
    u0: np.ndarray,
    v0: np.ndarray,
    T: float,
    cfl: float = 0.4,
    samples: int = 200,
    instability_factor: float = 100.0,
    progress: Callable[[int, int], None] | None = None,
) -> EvolutionResult:
    """Velocity-Verlet evolution for duration T (landing on T exactly).

    The time step is the CFL step shrunk so that n_steps * dt == T.  Raises
    ``InstabilityError`` if the discrete energy grows past
    ``instability_factor`` times its initial value at any sample point.
    """
    if T <= 0.0:
        raise DomainError(f"evolution duration must be positive, got {T}")
    dt_cfl = cfl_timestep(coeffs, cfl)
    n_steps = max(1, math.ceil(T / dt_cfl))
    dt = T / n_steps

    u = np.array(u0, dtype=float)
    v = np.array(v0, dtype=float)
    if u.shape != (coeffs.n_chi,) or v.shape != (coeffs.n_chi,):
        raise DomainError("initial data shape does not match the chi grid")
    u[0] = 0.0
    v[0] = 0.0

    e0 = discrete_energy(coeffs, u, v)
    stride = max(1, n_steps // max(1, samples))
    times = [0.0]
    energies = [e0]
    norms0 = energy_norms(coeffs, u, v)
    norm_series = {k: [val] for k, val in norms0.items()}
    residuals = [residual_norm(coeffs, u)]
    probe = np.empty(n_steps + 1)
    probe[0] = u[-1]

    a = acceleration(coeffs, u)
    for step in range(1, n_steps + 1):
        v += 0.5 * dt * a
        u += dt * v
        u[0] = 0.0
        a = acceleration(coeffs, u)
        v += 0.5 * dt * a
        v[0] = 0.0
        probe[step] = u[-1]
        if step % stride == 0 or step == n_steps:
            e = discrete_energy(coeffs, u, v)
            times.append(step * dt)
            energies.append(e)
            for k, val in energy_norms(coeffs, u, v).items():
                norm_series[k].append(val)
            residuals.append(residual_norm(coeffs, u))
            if e0 > 0.0 and (not math.isfinite(e) or e > instability_factor * e0):
                raise InstabilityError(
                    f"discrete energy grew by {e / e0:.3g} at t={step * dt:.6g}",
                    step=step,
                    energy_ratio=e / e0,
                )
            if progress is not None:
                progress(step, n_steps)

    return EvolutionResult(
        dt=dt,
        n_steps=n_steps,
        u=_readonly(u),
        v=_readonly(v),
        times=_readonly(np.array(times)),
        energies=_readonly(np.array(energies)),
        norm_series={k: _readonly(np.array(vals)) for k, vals in norm_series.items()},
        residuals=_readonly(np.array(residuals)),
        probe_times=_readonly(dt * np.arange(n_steps + 1)),
        probe_values=_readonly(probe),
        initial_energy=e0,
        provenance={"cfl": cfl, "samples": samples},
    )


# ------------------------------------------------------- initial data presets


def gaussian_pulse(
    coeffs: WaveCoefficients,
    amplitude: float = 1e-6,
    center: float = 0.5,
    width: float = 0.1,
) -> tuple[np.ndarray, np.ndarray]:
    """Static Gaussian bump in chi (center and width as fractions of B)."""
    xi = coeffs.chi / coeffs.B
    u0 = amplitude * np.exp(-(((xi - center) / width) ** 2))
    u0[0] = 0.0
    return u0, np.zeros_like(u0)


# ------------------------------------------------- linearized reconstruction


@dataclass(frozen=True)
class LinearizedFields:
    """First-order metric and matter fields implied by a displacement u."""

    psi1: np.ndarray
    omega1: np.ndarray
    m1: np.ndarray
    rho1: np.ndarray
    n1: np.ndarray


def reconstruct(coeffs: WaveCoefficients, u: np.ndarray) -> LinearizedFields:
    """Algebraic first-order fields from the shell displacement.

    psi1 = (2/r0 - q) u + du/dr0,  omega1 = du/dr0 - q u,
    m1 = -4 pi r0^2 (rho0 - 1) u,  rho1 = -(2 rho0 - 1) psi1,  n1 = rho1/n0.

    Centre values are the regular limits for an r-linear displacement,
    estimated from the first interior node.
    """
    u = np.asarray(u, dtype=float)
    r0 = coeffs.r0
    du_dchi = derivative_uniform(u, coeffs.dchi, order=2)
    du_dr0 = du_dchi * coeffs.w  # = (du/dchi)/(dr0/dchi)

    psi1 = np.empty_like(u)
    omega1 = np.empty_like(u)
    slope0 = u[1] / r0[1]
    psi1[1:] = (2.0 / r0[1:] - coeffs.q[1:]) * u[1:] + du_dr0[1:]
    psi1[0] = 3.0 * slope0
    omega1[1:] = du_dr0[1:] - coeffs.q[1:] * u[1:]
    omega1[0] = slope0
    m1 = -FOUR_PI * r0 * r0 * (coeffs.rho0 - 1.0) * u
    rho1 = -(2.0 * coeffs.rho0 - 1.0) * psi1
    n1 = rho1 / coeffs.n0
    return LinearizedFields(
        psi1=_readonly(psi1),
        omega1=_readonly(omega1),
        m1=_readonly(m1),
        rho1=_readonly(rho1),
        n1=_readonly(n1),
    )


def constraint_residual(coeffs: WaveCoefficients, u: np.ndarray) -> np.ndarray:
    """Defect of the linearized mass constraint for the state u.

    Compares the chi-derivative of the algebraic m1 (wide stencil) against
    the linearized constraint flux (which itself uses the narrow stencil of
    ``reconstruct``); the mismatch is pure discretisation defect and shrinks
    at second order away from the centre.  Node 0 is reported as 0.
    """
    u = np.asarray(u, dtype=float)
    fields = reconstruct(coeffs, u)
    dchi = coeffs.dchi
    lhs = derivative_uniform(fields.m1, dchi, order=4)
    du_dchi = derivative_uniform(u, dchi, order=2)
    r0 = coeffs.r0
    with np.errstate(invalid="ignore"):
        rhs = FOUR_PI * (
            (2.0 * r0 * coeffs.rho0 * u + r0 * r0 * fields.rho1) * coeffs.drdchi
            + r0 * r0 * coeffs.rho0 * du_dchi
        )
    out = lhs - rhs
    out[0] = 0.0
    return out


def residual_norm(coeffs: WaveCoefficients, u: np.ndarray, interior: float = 0.1) -> float:
    """Sup of the constraint residual over chi >= interior * B."""
    res = constraint_residual(coeffs, u)
    mask = coeffs.chi >= interior * coeffs.B
    return float(np.max(np.abs(res[mask])))
