"""SI-unit pipeline: CPW resonator geometry and Rydberg atomic constants to
the dimensionless simulation parameters, plus the direct (free-space)
dipole-dipole interaction and its crossover radius.

Unit conventions: quantities quoted as "2 pi x X" are angular frequencies
(rad/s) throughout.  Bare-quoted rates (intrinsic Rydberg decay, optical
coherence relaxation) are ambiguous in the literature; they carry an
explicit {ordinary, angular} flag and both readings are reported where they
diverge.  The shipped defaults use the ordinary reading (Gamma_r = 1e3 1/s),
which reproduces the strong-coupling bound f_max ~ 40.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .cavity import RegimeRecipe, SystemParams, apply_recipe, strong_coupling_f_max

C_LIGHT = 299_792_458.0          # m/s
HBAR = 1.054_571_817e-34         # J s
EPS0 = 8.854_187_8128e-12        # F/m
BOHR_RADIUS = 5.291_772_109_03e-11  # m
E_CHARGE = 1.602_176_634e-19     # C

TWO_PI = 2 * math.pi

CONVENTIONS = ("ordinary", "angular")


def rate_in_si(value: float, convention: str) -> float:
    """A quoted rate as an s^-1 value: 'ordinary' uses it as-is, 'angular'
    multiplies by 2 pi (the value was a frequency)."""
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    return value * TWO_PI if convention == "angular" else value


@dataclass(frozen=True)
class DeviceParams:
    """CPW geometry and atomic inputs (SI).

    g_r_nominal is the rounded literature value of the coupling that all the
    quoted interaction rates (exchange 2pi x 1 MHz, pair shift 2pi x 40 kHz,
    f_max ~ 40) are built on; the dipole-based estimate is derived and
    reported alongside it.  Set g_r_override to force a different working
    value.
    """

    L: float = 1e-2              # strip-line length (m)
    d: float = 15e-6             # electrode distance (m)
    eps_r: float = 6.0           # effective dielectric constant
    m: int = 5                   # mode index
    Q: float = 1e6               # quality factor
    n_principal: int = 50        # Rydberg principal quantum number
    Gamma_r: float = 1e3         # intrinsic Rydberg decay, in `Gamma_r_convention`
    Gamma_r_convention: str = "ordinary"
    g_r_nominal: float = TWO_PI * 1e7  # rad/s
    g_r_override: float | None = None  # rad/s; bypasses g_r_nominal

    def __post_init__(self):
        for name in ("L", "d", "eps_r", "Q", "Gamma_r"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.m < 1:
            raise ValueError("mode index m must be >= 1")
        if self.n_principal < 1:
            raise ValueError("n_principal must be >= 1")
        if self.Gamma_r_convention not in CONVENTIONS:
            raise ValueError(f"unknown rate convention {self.Gamma_r_convention!r}")


@dataclass(frozen=True)
class DerivedDevice:
    """Mode and coupling numbers derived from DeviceParams (SI)."""

    lambda_c: float      # mode wavelength (m)
    omega_c: float       # mode frequency (rad/s)
    V_c: float           # effective cavity volume (m^3)
    eps_c: float         # vacuum field per photon (V/m)
    dipole: float        # Rydberg transition dipole estimate n^2 a0 e (C m)
    g_r: float           # working coupling rate (rad/s)
    g_r_estimate: float  # dipole-based estimate `dipole * eps_c / hbar` (rad/s)
    kappa: float         # cavity linewidth omega_c / Q (rad/s)
    Gamma_r: float       # intrinsic decay (s^-1, resolved convention)
    f_max: float         # strong-coupling bound min(cbrt(g/Gamma), g/kappa)


def derive(dev: DeviceParams) -> DerivedDevice:
    """lambda_c = 2L/m, omega_c = 2 pi c / (lambda_c sqrt(eps_r)),
    V_c = 2 pi d^2 L, eps_c = sqrt(hbar omega_c / (eps0 V_c)),
    g_r estimated as dipole * eps_c / hbar with dipole = n^2 a0 e,
    kappa = omega_c / Q."""
    lambda_c = 2 * dev.L / dev.m
    omega_c = TWO_PI * C_LIGHT / (lambda_c * math.sqrt(dev.eps_r))
    V_c = TWO_PI * dev.d**2 * dev.L
    eps_c = math.sqrt(HBAR * omega_c / (EPS0 * V_c))
    dipole = dev.n_principal**2 * BOHR_RADIUS * E_CHARGE
    g_r_estimate = dipole * eps_c / HBAR
    g_r = dev.g_r_override if dev.g_r_override is not None else dev.g_r_nominal
    kappa = omega_c / dev.Q
    Gamma_r = rate_in_si(dev.Gamma_r, dev.Gamma_r_convention)
    return DerivedDevice(
        lambda_c=lambda_c,
        omega_c=omega_c,
        V_c=V_c,
        eps_c=eps_c,
        dipole=dipole,
        g_r=g_r,
        g_r_estimate=g_r_estimate,
        kappa=kappa,
        Gamma_r=Gamma_r,
        f_max=strong_coupling_f_max(g_r, Gamma_r, kappa),
    )


def mode_function(z: float, L: float, m: int) -> float:
    """Standing-wave amplitude at position z in [-L/2, L/2]:
    cos(m pi z / L) for even mode index, sin(m pi z / L) for odd."""
    if not -L / 2 <= z <= L / 2:
        raise ValueError(f"z = {z} outside the strip line [-L/2, L/2]")
    x = m * math.pi * z / L
    return math.cos(x) if m % 2 == 0 else math.sin(x)


def direct_ddi(wp_rb: float, wp_ra: float, r: float) -> float:
    """Free-space dipole-dipole rate wp_rb wp_ra / (4 pi eps0 hbar r^3) (rad/s)."""
    if r <= 0:
        raise ValueError("separation r must be > 0")
    return wp_rb * wp_ra / (4 * math.pi * EPS0 * HBAR * r**3)


def ddi_crossover(wp: float, d_cavity: float) -> float:
    """Separation r* where the free-space rate drops to the cavity-mediated one."""
    if d_cavity <= 0:
        raise ValueError("d_cavity must be > 0")
    return (wp**2 / (4 * math.pi * EPS0 * HBAR * d_cavity)) ** (1.0 / 3.0)


def to_system_params(
    derived: DerivedDevice,
    recipe: RegimeRecipe,
) -> tuple[SystemParams, float]:
    """Dimensionless SystemParams for the recipe plus the unit scale.

    Returns (params, g_r) where g_r (rad/s) converts dimensionless times to
    seconds via t_seconds = t / g_r.  All intrinsic decays Gamma_mu are set
    to the device Gamma_r.
    """
    p = apply_recipe(recipe)
    gamma = derived.Gamma_r / derived.g_r
    p = replace(
        p,
        kappa=derived.kappa / derived.g_r,
        gamma_r=gamma,
        gamma_a=gamma,
        gamma_b=gamma,
    )
    return p, derived.g_r
