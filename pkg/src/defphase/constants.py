"""Compiled-in physical constants (SI), overridable per run through the
config; every value a run uses is echoed into its manifest."""

G = 6.67430e-11  # m^3 kg^-1 s^-2
C_LIGHT = 2.99792458e8  # m / s
H_BAR = 1.054571817e-34  # J s
PLANCK_MASS = 2.176434e-8  # kg
PLANCK_LENGTH = 1.616255e-35  # m
AU = 1.495978707e11  # m
M_SUN = 1.98892e30  # kg
M_EARTH = 5.9722e24  # kg
M_MOON = 7.342e22  # kg
R_EARTH_MOON = 3.844e8  # m
V_EARTH_ORBIT = 2.978e4  # m / s
V_MOON_ORBIT = 1.022e3  # m / s
G_STANDARD = 9.80665  # m / s^2

DEFAULTS = {
    "G": G,
    "c": C_LIGHT,
    "hbar": H_BAR,
    "m_planck": PLANCK_MASS,
    "l_planck": PLANCK_LENGTH,
    "au": AU,
    "m_sun": M_SUN,
    "m_earth": M_EARTH,
    "m_moon": M_MOON,
    "r_earth_moon": R_EARTH_MOON,
    "v_earth": V_EARTH_ORBIT,
    "v_moon": V_MOON_ORBIT,
    "g_standard": G_STANDARD,
}
