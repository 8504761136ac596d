"""Conventions and tolerances shared by every symbol computation.

Fourier convention, fixed once for the whole project:

    u_hat(xi) = integral of exp(i <xi, x>) u(x) dx
    u(x)      = (2 pi)^(-d) integral of exp(-i <xi, x>) u_hat(xi) dxi

so the characteristic function of L_t is mu_hat_t(xi) = exp(-t A(-xi)) and the
symbol is A(xi) = -theta(-xi) with theta(u) = log E exp(i u L_1).
With this convention ||u||_0 (the unweighted Sobolev norm) equals
(2 pi)^(d/2) times the spatial L2 norm.
"""
import enum

import numpy as np


class Family(str, enum.Enum):
    BROWNIAN = "brownian"
    NIG = "nig"
    CAUCHY = "cauchy"
    STUDENT_T = "student_t"
    CGMY = "cgmy"
    GH = "gh"
    STABLE = "stable"
    FROM_DENSITY = "density"
    SUM = "sum"


class Truncation(str, enum.Enum):
    IDENTITY = "identity"      # h(x) = x
    UNIT_BALL = "unit_ball"    # h(x) = x 1{|x| < 1}


class DriftConvention(str, enum.Enum):
    FINITE_VARIATION = "finite_variation"   # b = integral of x F(dx)
    ZERO = "zero"


SYMMETRY_RTOL = 1e-10
REAL_PART_FLOOR = 1e-10
SEMISTABLE_TOL = 1e-12

# |Y - 1| or |Y| below this switches CGMY to the logarithmic limit forms.
CGMY_LIMIT_EPS = 1e-8

SANITY_SEED = 0
SANITY_POINTS = 64
# Radii for the frozen quadratic-bound constant.
GROWTH_RADII = np.logspace(-2.0, 6.0, 33)


def sanity_grid(dimension):
    """Fixed 64-point grid used to validate freshly built symbols."""
    half = SANITY_POINTS // 2
    radii = np.logspace(-2.0, 3.0, half)
    if dimension == 1:
        pts = np.concatenate([radii, -radii])
        return pts.reshape(-1, 1)
    rng = np.random.default_rng(SANITY_SEED)
    directions = rng.standard_normal((half, dimension))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    pts = directions * radii[:, None]
    return np.concatenate([pts, -pts])
