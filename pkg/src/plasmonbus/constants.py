"""Physical constants and the meV/ps unit regime used by the gate dynamics.

Geometry and electromagnetics are evaluated in SI; everything downstream of
the coupling strength works in meV (energies) and ps (times).
"""

import math

# CODATA 2018 exact / recommended values
C_LIGHT = 299_792_458.0  # m/s
E_CHARGE = 1.602_176_634e-19  # C
HBAR = 1.054_571_817e-34  # J s
M_E = 9.109_383_7015e-31  # kg
EPS0 = 8.854_187_8128e-12  # F/m
EULER_GAMMA = 0.577_215_664_901_532_860_6

JOULE_PER_MEV = E_CHARGE * 1e-3
HBAR_MEV_PS = HBAR / JOULE_PER_MEV * 1e12  # 0.6582119569... meV ps


def angular_frequency_from_wavelength(lambda0):
    """Vacuum angular frequency (rad/s) for a wavelength in meters."""
    return 2.0 * math.pi * C_LIGHT / lambda0


def energy_mev_from_wavelength(lambda0):
    """Photon energy (meV) for a vacuum wavelength in meters."""
    return HBAR * angular_frequency_from_wavelength(lambda0) / JOULE_PER_MEV


def rate_per_ps(omega):
    """Convert an angular frequency in rad/s to ps^-1."""
    return omega * 1e-12
