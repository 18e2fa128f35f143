"""Quadrature oracles written straight from the defining integrals.

These use scipy only, never the package's E1 / root finder / quadrature,
so they stay independent of the code they check.
"""

import math

from scipy import integrate, optimize


def pdf(g, avg):
    return math.exp(-g / avg) / avg


def quad_inf(f, a, avg):
    # split at a + avg so quad sees the bulk of the exponential mass
    v1, _ = integrate.quad(f, a, a + avg, epsabs=1e-14, epsrel=1e-13, limit=200)
    v2, _ = integrate.quad(f, a + avg, math.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
    return v1 + v2


def power_constraint(g0, avg):
    return quad_inf(lambda g: (1 / g0 - 1 / g) * pdf(g, avg), g0, avg)


def cutoff(avg):
    return optimize.brentq(lambda g0: power_constraint(g0, avg) - 1.0, 1e-6, 1.0, xtol=1e-15)


def capacity(avg, g0):
    return quad_inf(lambda g: math.log2(g / g0) * pdf(g, avg), g0, avg)
