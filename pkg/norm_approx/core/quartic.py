"""Closed-form quartic roots by Ferrari's method, and a bisection oracle.

The quartic is reduced to its depressed form ``y^4 + p y^2 + q y + r``;
a positive root ``m`` of the resolvent cubic
``m^3 + p m^2 + (p^2/4 - r) m - q^2/8`` splits it into two quadratics.
"""
import cmath
import math
from dataclasses import dataclass
from typing import Callable, Tuple

from norm_approx.core.errors import NumericalError
from norm_approx.core.utils import _logger

# Relative size below which the cubic discriminant cannot be classified.
AMBIGUOUS_DISCRIMINANT = 1e-12

# Imaginary parts below this (relative) threshold are rounding noise.
REAL_ROOT_TOL = 1e-8


@dataclass(frozen=True)
class QuarticRoots:
    """The four roots of a quartic.

    Attributes
    ----------
    roots: Tuple[complex, complex, complex, complex]
        All roots, in the order produced by the two quadratic factors.
    discriminant: float
        Relative discriminant of the resolvent cubic; its sign tells
        three real resolvent roots (negative) from one (positive).
    """

    roots: Tuple[complex, complex, complex, complex]

    discriminant: float

    @property
    def ambiguous(self) -> bool:
        return abs(self.discriminant) < AMBIGUOUS_DISCRIMINANT

    def real_roots(self) -> Tuple[float, ...]:
        """Roots whose imaginary part is rounding noise, ascending."""
        out = [
            z.real
            for z in self.roots
            if abs(z.imag) <= REAL_ROOT_TOL * max(1.0, abs(z))
        ]
        return tuple(sorted(out))


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def largest_cubic_root(a: float, b: float, c: float) -> Tuple[float, float]:
    """Largest real root of the monic cubic ``m^3 + a m^2 + b m + c``.

    Returns
    -------
    root: float
        The largest real root.
    discriminant: float
        ``(Q/2)^2 + (P/3)^3`` of the depressed cubic ``t^3 + P t + Q``,
        divided by the magnitude of its two terms.
    """
    shift = a / 3.0
    P = b - a * a / 3.0
    Q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    half_q = Q / 2.0
    third_p = P / 3.0
    disc = half_q * half_q + third_p**3
    scale = half_q * half_q + abs(third_p) ** 3
    rel_disc = disc / scale if scale > 0.0 else 0.0
    if disc < 0.0:
        # three real roots, k = 0 of the trigonometric form is the largest
        rho = math.sqrt(-third_p)
        cos_phi = max(-1.0, min(1.0, -half_q / rho**3))
        t = 2.0 * rho * math.cos(math.acos(cos_phi) / 3.0)
    else:
        sq = math.sqrt(disc)
        t = _cbrt(-half_q + sq) + _cbrt(-half_q - sq)
    return t - shift, rel_disc


def _polish(coeffs: Tuple[float, ...], x: float, steps: int = 2) -> float:
    a, b, c, d, e = coeffs
    for _ in range(steps):
        f = (((a * x + b) * x + c) * x + d) * x + e
        df = ((4.0 * a * x + 3.0 * b) * x + 2.0 * c) * x + d
        if df == 0.0:
            break
        x -= f / df
    return x


def solve_quartic(
    a: float, b: float, c: float, d: float, e: float
) -> QuarticRoots:
    """Roots of ``a x^4 + b x^3 + c x^2 + d x + e = 0`` by Ferrari's method.

    Every root with a negligible imaginary part is refined with two Newton
    steps on the original polynomial.

    Parameters
    ----------
    a, b, c, d, e: float
        Coefficients, highest degree first; `a` must be nonzero.

    Returns
    -------
    roots: QuarticRoots
        The four roots and the resolvent discriminant.
    """
    if a == 0.0:
        raise NumericalError("a quartic needs a nonzero leading coefficient")
    B, C, D, E = b / a, c / a, d / a, e / a
    qb = B / 4.0
    p = C - 6.0 * qb * qb
    q = D - 2.0 * C * qb + 8.0 * qb**3
    r = E - D * qb + C * qb * qb - 3.0 * qb**4

    if abs(q) < 1e-14 * max(1.0, abs(p), abs(r)):
        # biquadratic: y^2 = (-p +- sqrt(p^2 - 4r)) / 2
        root = cmath.sqrt(p * p - 4.0 * r)
        z1, z2 = (-p + root) / 2.0, (-p - root) / 2.0
        y = (cmath.sqrt(z1), -cmath.sqrt(z1), cmath.sqrt(z2), -cmath.sqrt(z2))
        rel_disc = 1.0
    else:
        m, rel_disc = largest_cubic_root(p, p * p / 4.0 - r, -q * q / 8.0)
        # m > 0 because the cubic is -q^2/8 < 0 at zero
        s = math.sqrt(2.0 * m)
        disc1 = cmath.sqrt(s * s - 4.0 * (p / 2.0 + m + q / (2.0 * s)))
        disc2 = cmath.sqrt(s * s - 4.0 * (p / 2.0 + m - q / (2.0 * s)))
        y = (
            (s + disc1) / 2.0,
            (s - disc1) / 2.0,
            (-s + disc2) / 2.0,
            (-s - disc2) / 2.0,
        )

    coeffs = (a, b, c, d, e)
    roots = []
    for yi in y:
        xi = complex(yi) - qb
        if abs(xi.imag) <= REAL_ROOT_TOL * max(1.0, abs(xi)):
            xi = complex(_polish(coeffs, xi.real), 0.0)
        roots.append(xi)
    _logger.debug("quartic %s roots %s", coeffs, roots)
    return QuarticRoots(
        roots=(roots[0], roots[1], roots[2], roots[3]),
        discriminant=rel_disc,
    )


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Root of `f` in ``[lo, hi]`` by bisection.

    Raises
    ------
    NumericalError
        If `f` does not change sign over the interval.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise NumericalError(f"no sign change of f over [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0 or hi - lo < tol:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
