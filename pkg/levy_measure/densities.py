"""
Levy densities on the real line.

Every density carries an optional singularity hint (f_s(x) ~ C/|x|^(1+Y) near 0),
a finite-variation tag and a cutoff R beyond which it is numerically zero
(``None`` for heavy tails that must be integrated to infinity).
"""
import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy import special

from symbol_core.utils import InvalidParams

logger = logging.getLogger(__name__)

# e^-50 is below double precision relative to any density value we compare against.
TAIL_DECAY = 50.0


@dataclass(frozen=True)
class LevyDensity:
    evaluator: Callable = field(repr=False, compare=False)
    hint_Y: Optional[float] = None
    hint_C: Optional[float] = None
    finite_variation: Optional[bool] = None
    cutoff: Optional[float] = None
    label: str = "density"
    dimension: int = 1
    breakpoints: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if (self.hint_Y is None) != (self.hint_C is None):
            raise InvalidParams("singularity hint needs both Y and C")
        if self.hint_Y is not None and not (0.0 <= self.hint_Y < 2.0):
            raise InvalidParams(f"singularity exponent must lie in [0, 2) (got {self.hint_Y})")
        if self.cutoff is not None and not self.cutoff > 0:
            raise InvalidParams("support cutoff must be > 0")
        if self.dimension == 1:
            _check_nonnegative(self)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.evaluator(x), dtype=float)

    @property
    def has_hint(self) -> bool:
        return self.hint_Y is not None


def _check_nonnegative(density: LevyDensity):
    upper = np.log10(density.cutoff) if density.cutoff else 3.0
    x = np.logspace(-8.0, upper, 97)
    values = density(np.concatenate([x, -x]))
    if np.any(~np.isfinite(values)) or np.any(values < 0.0):
        raise InvalidParams(f"{density.label}: density must be finite and >= 0 on x != 0")


def cgmy_density(C: float, G: float, M: float, Y: float) -> LevyDensity:
    def evaluator(x):
        ax = np.abs(x)
        rate = np.where(x > 0.0, M, G)
        return C * np.exp(-rate * ax) / ax ** (1.0 + Y)

    return LevyDensity(
        evaluator=evaluator,
        hint_Y=Y,
        hint_C=C,
        finite_variation=Y < 1.0,
        cutoff=TAIL_DECAY / min(G, M),
        label=f"cgmy(C={C:g},G={G:g},M={M:g},Y={Y:g})",
    )


def nig_density(alpha: float, beta: float, delta: float) -> LevyDensity:
    """(delta alpha / pi) e^(beta x) K_1(alpha |x|) / |x|."""
    if not alpha > abs(beta):
        raise InvalidParams("NIG density requires alpha > |beta|")

    def evaluator(x):
        ax = np.abs(x)
        scaled = special.kve(1, alpha * ax)
        return delta * alpha / np.pi * scaled * np.exp(beta * x - alpha * ax) / ax

    return LevyDensity(
        evaluator=evaluator,
        hint_Y=1.0,
        hint_C=delta / np.pi,
        finite_variation=False,
        cutoff=TAIL_DECAY / (alpha - abs(beta)),
        label=f"nig(alpha={alpha:g},beta={beta:g},delta={delta:g})",
    )


def cauchy_density(c: float) -> LevyDensity:
    """c / (pi x^2); its symbol is c|u|."""
    return power_law_density(c / np.pi, 1.0, label=f"cauchy(c={c:g})")


def stable_density(alpha: float, c: float) -> LevyDensity:
    """Symmetric alpha-stable Levy density whose symbol is c|u|^alpha."""
    if not (0.0 < alpha < 2.0):
        raise InvalidParams("stable Levy density needs alpha in (0, 2)")
    if alpha == 1.0:
        scale = c / np.pi
    else:
        scale = c * alpha / (2.0 * special.gamma(1.0 - alpha) * np.cos(np.pi * alpha / 2.0))
    return power_law_density(scale, alpha, label=f"stable(alpha={alpha:g},c={c:g})")


def power_law_density(C: float, Y: float, skew: float = 0.0, cutoff=None, label=None) -> LevyDensity:
    """C (1 + skew sign(x)) / |x|^(1+Y), optionally cut off at |x| = cutoff."""
    if abs(skew) > 1.0:
        raise InvalidParams("power-law skew must lie in [-1, 1]")

    def evaluator(x):
        ax = np.abs(x)
        values = C * (1.0 + skew * np.sign(x)) / ax ** (1.0 + Y)
        if cutoff is not None:
            values = np.where(ax <= cutoff, values, 0.0)
        return values

    return LevyDensity(
        evaluator=evaluator,
        hint_Y=Y,
        hint_C=C,
        finite_variation=Y < 1.0,
        cutoff=cutoff,
        label=label or f"power_law(C={C:g},Y={Y:g})",
    )


def _side_interpolator(xs: np.ndarray, fs: np.ndarray, hint_Y, hint_C):
    """Log-log interpolation on one side of the origin; zero beyond the table."""
    order = np.argsort(xs)
    log_x = np.log(xs[order])
    log_f = np.log(fs[order])
    if hint_Y is not None:
        inner_slope = -1.0 - hint_Y
    elif len(log_x) > 1:
        inner_slope = (log_f[1] - log_f[0]) / (log_x[1] - log_x[0])
    else:
        inner_slope = 0.0

    def evaluate(ax):
        lx = np.log(ax)
        values = np.exp(np.interp(lx, log_x, log_f))
        below = lx < log_x[0]
        values = np.where(below, np.exp(log_f[0] + inner_slope * (lx - log_x[0])), values)
        return np.where(lx > log_x[-1], 0.0, values)

    return evaluate


def tabulated_density(table_x, table_f, hint_Y=None, hint_C=None, label="table") -> LevyDensity:
    """
    Density from (x, f(x)) pairs, interpolated linearly in log|x| / log f on
    each side of the origin. Below the smallest |x| the table is continued as a
    power law (the hint exponent when given, else the first two points).
    """
    xs = np.asarray(table_x, dtype=float)
    fs = np.asarray(table_f, dtype=float)
    if xs.shape != fs.shape or xs.size == 0:
        raise InvalidParams("density table needs matching, nonempty x and f columns")
    if np.any(xs == 0.0) or np.any(fs <= 0.0):
        raise InvalidParams("density table needs x != 0 and f > 0")
    positive = xs > 0.0
    sides = {}
    for name, mask in (("right", positive), ("left", ~positive)):
        if np.any(mask):
            sides[name] = _side_interpolator(np.abs(xs[mask]), fs[mask], hint_Y, hint_C)

    def evaluator(x):
        ax = np.abs(x)
        out = np.zeros(np.shape(x))
        for name, sign in (("right", x > 0.0), ("left", x < 0.0)):
            if name in sides and np.any(sign):
                out = np.where(sign, sides[name](np.where(ax > 0.0, ax, 1.0)), out)
        return out

    finite_variation = None if hint_Y is None else hint_Y < 1.0
    return LevyDensity(
        evaluator=evaluator,
        hint_Y=hint_Y,
        hint_C=hint_C,
        finite_variation=finite_variation,
        cutoff=float(np.max(np.abs(xs))),
        label=label,
        breakpoints=tuple(float(x) for x in np.unique(np.abs(xs))),
    )


def gh_expansion_density(C1, C2, C3, table_x, table_f) -> LevyDensity:
    """
    Generalised hyperbolic Levy density: C1/x^2 + C2/|x| + C3/x inside the
    smallest tabulated |x|, the user table outside.
    """
    body = tabulated_density(table_x, table_f, hint_Y=1.0, hint_C=C1, label="gh-table")
    x_min = float(np.min(np.abs(np.asarray(table_x, dtype=float))))

    def evaluator(x):
        ax = np.abs(x)
        safe = np.where(ax > 0.0, ax, 1.0)
        expansion = C1 / safe ** 2 + C2 / safe + C3 * np.sign(x) / safe
        return np.where(ax < x_min, np.maximum(expansion, 0.0), body(x))

    return LevyDensity(
        evaluator=evaluator,
        hint_Y=1.0,
        hint_C=C1,
        finite_variation=False,
        cutoff=body.cutoff,
        label=f"gh(C1={C1:g},C2={C2:g},C3={C3:g})",
        breakpoints=body.breakpoints,
    )


def load_density_table(path):
    """Read a two-column CSV (x, f) with an optional header row."""
    path = Path(path)
    xs, fs = [], []
    with open(path, encoding="utf-8-sig", newline="") as f:
        for row in csv.reader(f):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                x, value = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if xs:
                    raise InvalidParams(f"{path}: malformed row {row!r}")
                continue
            xs.append(x)
            fs.append(value)
    if not xs:
        raise InvalidParams(f"{path}: no density rows")
    logger.debug("loaded %s density rows from %s", len(xs), path)
    return tuple(xs), tuple(fs)
