"""
The head-probability map of the extension towers and its fixed points.

    g(x) = 1 / (1 + (d - 1) x^(k-1)),    f = g o g

g has a unique fixed point alpha in (0, 1). For k > 2 and d large enough, f
has two more, gamma < alpha < beta, which attract the trajectories that
start below and above alpha respectively.

Fixed points are certified by bisection on integer-cleared polynomials with
exact rational sign evaluation:

    phi_alpha(x) = (d - 1) x^k + x - 1
    phi_f(x)     = x A^(k-1) + (d - 1) x - A^(k-1),   A = 1 + (d - 1) x^(k-1)

and sign(f(x) - x) = -sign(phi_f(x)) on [0, 1].
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath
from sympy import Poly, Symbol

from .conf import resolve
from .exceptions import DomainError, NoThreeFixedPointsError

logger = logging.getLogger(__name__)

x = Symbol('x')

Number = Union[int, Fraction]

# Extra sample points placed on an even grid when looking for the beta bracket.
GRID_POINTS = 64


@dataclass(frozen=True)
class DynParams:
    k: int
    d: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 2:
            raise DomainError(f"Uniformity must be an integer >= 2, got {self.k!r}")
        if not isinstance(self.d, int) or self.d < 2:
            raise DomainError(f"Degree must be an integer >= 2, got {self.d!r}")

    def require_three_point_structure(self):
        if self.k < 3:
            raise NoThreeFixedPointsError(
                f"f has a single fixed point for k = {self.k}; three need k > 2", d=self.d
            )


@dataclass(frozen=True)
class Enclosure:
    """
    Rational interval [lo, hi] holding a root, with the signs of its defining
    polynomial at both ends as certificate. ``exact`` marks a rational root
    found exactly (lo == hi, both signs 0).
    """

    lo: Fraction
    hi: Fraction
    sign_lo: int
    sign_hi: int
    exact: bool = False

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, value: Number) -> bool:
        return self.lo <= value <= self.hi

    def as_dict(self, digits: int = 40) -> dict:
        return {
            'lo': to_decimal(self.lo, digits),
            'hi': to_decimal(self.hi, digits),
            'sign_lo': self.sign_lo,
            'sign_hi': self.sign_hi,
            'exact': self.exact,
        }


class FixedPoints(tuple):
    """(beta, gamma) enclosures, addressable by name."""

    def __new__(cls, beta: Enclosure, gamma: Enclosure):
        return super().__new__(cls, (beta, gamma))

    @property
    def beta(self) -> Enclosure:
        return self[0]

    @property
    def gamma(self) -> Enclosure:
        return self[1]


@dataclass
class Trajectory:
    """
    Iterates p_0, f(p_0), f(f(p_0)), ... of one starting point.

    Values are exact Fractions up to index ``switched_at`` (exclusive) and
    mpmath floats from there on; ``switched_at`` is None when the whole run
    stayed exact.
    """

    params: DynParams
    p0: Fraction
    values: List[Union[Fraction, mpmath.mpf]]
    classification: str
    converged: bool
    switched_at: Optional[int] = None
    float_bits: int = 256
    monotone: bool = field(default=True)

    @property
    def iterations(self) -> int:
        return len(self.values) - 1

    @property
    def last(self):
        return self.values[-1]

    def as_dict(self, digits: int = 30) -> dict:
        with mpmath.workprec(self.float_bits):
            return {
                'k': self.params.k,
                'd': self.params.d,
                'p0': {'num': str(self.p0.numerator), 'den': str(self.p0.denominator)},
                'iterations': self.iterations,
                'converged': self.converged,
                'classification': self.classification,
                'switched_at': self.switched_at,
                'monotone': self.monotone,
                'last': to_decimal(self.last, digits),
            }


def to_decimal(value, digits: int = 30) -> str:
    """Decimal string of a Fraction or mpf, correct to ``digits`` significant digits."""
    if isinstance(value, Fraction):
        with mpmath.workdps(digits + 10):
            return mpmath.nstr(mpmath.mpf(value.numerator) / value.denominator, digits)
    return mpmath.nstr(value, digits)


def mpf_to_fraction(value: mpmath.mpf) -> Fraction:
    """The exact binary rational held by an mpf."""
    mantissa, exponent = int(value.man), int(value.exp)
    if exponent >= 0:
        return Fraction(mantissa * 2 ** exponent)
    return Fraction(mantissa, 2 ** -exponent)


def _to_mpf(value):
    # Fractions convert at the caller's working precision.
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return value


def _as_fraction(value: Number, what: str = 'x') -> Fraction:
    value = Fraction(value)
    if not 0 <= value <= 1:
        raise DomainError(f"{what} must lie in [0, 1], got {value}")
    return value


def g(params: DynParams, value: Number) -> Fraction:
    value = _as_fraction(value)
    return 1 / (1 + (params.d - 1) * value ** (params.k - 1))


def f(params: DynParams, value: Number) -> Fraction:
    return g(params, g(params, value))


def _g_float(params: DynParams, value):
    return 1 / (1 + (params.d - 1) * value ** (params.k - 1))


@lru_cache(maxsize=256)
def phi_alpha(k: int, d: int) -> Tuple[int, ...]:
    """Integer coefficients (constant term first) of (d - 1) x^k + x - 1."""
    return _coefficients(Poly((d - 1) * x ** k + x - 1, x))


@lru_cache(maxsize=256)
def phi_f(k: int, d: int) -> Tuple[int, ...]:
    """Integer coefficients (constant term first) of the cleared form of f(x) = x."""
    a = 1 + (d - 1) * x ** (k - 1)
    return _coefficients(Poly(x * a ** (k - 1) + (d - 1) * x - a ** (k - 1), x))


@lru_cache(maxsize=256)
def phi_kahn(k: int, d: int) -> Tuple[int, ...]:
    """Integer coefficients of d x^k + x - 1, whose root solves x = 1 / (1 + d x^(k-1))."""
    return _coefficients(Poly(d * x ** k + x - 1, x))


def _coefficients(poly: Poly) -> Tuple[int, ...]:
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


@lru_cache(maxsize=256)
def _rational_roots(coefficients: Tuple[int, ...]) -> Tuple[Fraction, ...]:
    poly = Poly(list(reversed(coefficients)), x, domain='ZZ')
    roots = []
    for factor, _ in poly.factor_list()[1]:
        if factor.degree() == 1:
            a, b = (int(c) for c in factor.all_coeffs())
            roots.append(Fraction(-b, a))
    return tuple(sorted(roots))


def sign_at(coefficients: Sequence[int], value: Fraction) -> int:
    """
    Exact sign of the integer polynomial at a rational point.

    Evaluates the homogenized numerator sum c_i a^i b^(n-i) for value = a/b,
    b > 0, which has the polynomial's sign.
    """
    a, b = value.numerator, value.denominator
    degree = len(coefficients) - 1
    total = 0
    power_a = 1
    for i, c in enumerate(coefficients):
        if c:
            total += c * power_a * b ** (degree - i)
        power_a *= a
    return (total > 0) - (total < 0)


def _bisect(coefficients: Tuple[int, ...], lo: Fraction, hi: Fraction, prec: int) -> Enclosure:
    """Shrink a sign-change bracket to width 2^-prec, stopping early on an exact root."""
    for root in _rational_roots(coefficients):
        if lo <= root <= hi:
            return Enclosure(root, root, 0, 0, exact=True)

    sign_lo = sign_at(coefficients, lo)
    sign_hi = sign_at(coefficients, hi)
    if sign_lo * sign_hi >= 0:
        raise DomainError(f"No sign change on [{lo}, {hi}]")

    width = Fraction(1, 2 ** prec)
    while hi - lo > width:
        mid = (lo + hi) / 2
        sign_mid = sign_at(coefficients, mid)
        if sign_mid == sign_lo:
            lo = mid
        else:
            hi = mid
    return Enclosure(lo, hi, sign_lo, sign_hi)


def alpha(params: DynParams, prec: Optional[int] = None) -> Enclosure:
    """
    Certified enclosure of the unique fixed point of g in (0, 1).

    phi_alpha(0) = -1 and phi_alpha(1) = d - 1, so [0, 1] always brackets it.
    """
    prec = resolve(prec, 'PRECISION_BITS')
    return _bisect(phi_alpha(params.k, params.d), Fraction(0), Fraction(1), prec)


def kahn_value(params: DynParams, prec: Optional[int] = None) -> Enclosure:
    """Certified enclosure of the root of x = 1 / (1 + d x^(k-1))."""
    prec = resolve(prec, 'PRECISION_BITS')
    return _bisect(phi_kahn(params.k, params.d), Fraction(0), Fraction(1), prec)


def _beta_bracket(params: DynParams, alpha_hi: Fraction, prec: int) -> Optional[Fraction]:
    """Largest sample point in (alpha, 1) where f(x) > x, or None."""
    coefficients = phi_f(params.k, params.d)
    gap = 1 - alpha_hi
    candidates = {alpha_hi + gap * Fraction(i, GRID_POINTS) for i in range(1, GRID_POINTS)}
    candidates.update(alpha_hi + gap / 2 ** j for j in range(1, prec + 1))
    for point in sorted(candidates, reverse=True):
        if sign_at(coefficients, point) < 0:
            return point
    return None


def beta_gamma(params: DynParams, prec: Optional[int] = None,
               alpha_enclosure: Optional[Enclosure] = None) -> FixedPoints:
    """
    Certified enclosures of the two fixed points of f other than alpha.

    beta comes from bisecting phi_f between a sample point above alpha (where
    f(x) > x) and 1 (where f(1) < 1). gamma = g(beta) lies in the image of the
    beta enclosure under the decreasing map g, which is then refined by
    bisection on phi_f.

    Raises:
        NoThreeFixedPointsError: If k = 2 or no sample point above alpha has f(x) > x
    """
    params.require_three_point_structure()
    prec = resolve(prec, 'PRECISION_BITS')
    a = alpha_enclosure or alpha(params, prec)
    coefficients = phi_f(params.k, params.d)

    start = _beta_bracket(params, a.hi, prec)
    if start is None:
        raise NoThreeFixedPointsError(
            f"f has no fixed point above alpha for k={params.k}, d={params.d}", d=params.d
        )
    beta = _bisect(coefficients, start, Fraction(1), prec)
    gamma = _bisect(coefficients, g(params, beta.hi), g(params, beta.lo), prec)

    if not (gamma.hi < a.lo and a.hi < beta.lo):
        raise NoThreeFixedPointsError(
            f"Enclosures do not separate gamma < alpha < beta for k={params.k}, d={params.d}",
            d=params.d,
        )
    logger.debug(f"Certified beta and gamma for k={params.k}, d={params.d} at {prec} bits")
    return FixedPoints(beta, gamma)


def smallest_three_point_degree(k: int, d_max: int, prec: Optional[int] = None, d_min: int = 2) -> int:
    """
    Smallest d in [d_min, d_max] for which beta_gamma certifies three fixed points.

    Raises:
        NoThreeFixedPointsError: If none does
    """
    for d in range(d_min, d_max + 1):
        try:
            beta_gamma(DynParams(k, d), prec)
        except NoThreeFixedPointsError:
            continue
        logger.info(f"Three fixed points first certified at d={d} for k={k}")
        return d
    raise NoThreeFixedPointsError(f"No d in [{d_min}, {d_max}] has three fixed points for k={k}", d=d_max)


def classify_start(p0: Fraction, alpha_enclosure: Enclosure, three_points: bool) -> str:
    """Which attractor a starting point belongs to, judged against the alpha enclosure."""
    if alpha_enclosure.exact and p0 == alpha_enclosure.lo:
        return 'at-alpha'
    if alpha_enclosure.lo <= p0 <= alpha_enclosure.hi:
        return 'undetermined-near-alpha'
    if not three_points:
        return 'converging-to-alpha'
    return 'beta-side' if p0 > alpha_enclosure.hi else 'gamma-side'


def _bits(value: Fraction) -> int:
    return max(value.numerator.bit_length(), value.denominator.bit_length())


def _is_eventually_monotone(values: Sequence, burn_in: int = 1) -> bool:
    tail = list(values[burn_in:])
    if len(tail) < 3:
        return True
    steps = [b - a for a, b in zip(tail, tail[1:])]
    return all(s >= 0 for s in steps) or all(s <= 0 for s in steps)


def iterate(params: DynParams, p0: Number, max_iters: int = 10_000, tol: Optional[Number] = None,
            prec: Optional[int] = None, switch_bits: Optional[int] = None,
            float_bits: Optional[int] = None) -> Trajectory:
    """
    Iterate f from p0 until successive values differ by at most ``tol``.

    Arithmetic is exact until a denominator passes ``switch_bits`` bits, then
    continues in ``float_bits``-bit mpmath floats; the switch index is kept in
    the trajectory.
    """
    p0 = _as_fraction(p0, 'p0')
    prec = resolve(prec, 'PRECISION_BITS')
    switch_bits = resolve(switch_bits, 'RATIONAL_SWITCH_BITS')
    float_bits = resolve(float_bits, 'FLOAT_PRECISION_BITS')
    tol = Fraction(1, 2 ** 64) if tol is None else Fraction(tol)

    a = alpha(params, prec)
    three_points = False
    if params.k > 2:
        try:
            beta_gamma(params, prec, alpha_enclosure=a)
            three_points = True
        except NoThreeFixedPointsError:
            pass
    classification = classify_start(p0, a, three_points)

    values: List = [p0]
    switched_at = None
    converged = False
    with mpmath.workprec(float_bits):
        tol_float = _to_mpf(tol)
        for _ in range(max_iters):
            current = values[-1]
            if switched_at is None:
                following = f(params, current)
                if _bits(following) <= switch_bits:
                    values.append(following)
                    if abs(following - current) <= tol:
                        converged = True
                        break
                    continue
                switched_at = len(values)
                logger.warning(
                    f"Switching to {float_bits}-bit floats at iterate {switched_at} "
                    f"(denominator over {switch_bits} bits)"
                )
                current = _to_mpf(current)
            following = _g_float(params, _g_float(params, current))
            values.append(following)
            if abs(following - current) <= tol_float:
                converged = True
                break

        monotone = _is_eventually_monotone([_to_mpf(v) for v in values])

    if not monotone:
        logger.warning(f"Trajectory from {p0} is not eventually monotone")
    return Trajectory(
        params=params,
        p0=p0,
        values=values,
        classification=classification,
        converged=converged,
        switched_at=switched_at,
        float_bits=float_bits,
        monotone=monotone,
    )


@dataclass(frozen=True)
class SignPatternReport:
    params: DynParams
    rows: Tuple[dict, ...]

    @property
    def violations(self) -> int:
        return sum(len(row['violations']) for row in self.rows)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {
            'k': self.params.k,
            'd': self.params.d,
            'ok': self.ok,
            'violations': self.violations,
            'intervals': list(self.rows),
        }


def sign_pattern_check(params: DynParams, samples: int = 5, prec: Optional[int] = None) -> SignPatternReport:
    """
    Evaluate sign(f(x) - x) at ``samples`` interior points of each of
    [0, gamma), (gamma, alpha), (alpha, beta), (beta, 1], plus x = 0 and x = 1.

    Expected signs are +, -, +, - in that order.

    Raises:
        NoThreeFixedPointsError: If the three fixed points cannot be certified
    """
    prec = resolve(prec, 'PRECISION_BITS')
    a = alpha(params, prec)
    beta, gamma = beta_gamma(params, prec, alpha_enclosure=a)

    intervals = [
        ('[0,gamma)', Fraction(0), gamma.lo, 1, [Fraction(0)]),
        ('(gamma,alpha)', gamma.hi, a.lo, -1, []),
        ('(alpha,beta)', a.hi, beta.lo, 1, []),
        ('(beta,1]', beta.hi, Fraction(1), -1, [Fraction(1)]),
    ]
    rows = []
    for name, lo, hi, expected, extra in intervals:
        points = [lo + (hi - lo) * Fraction(i + 1, samples + 1) for i in range(samples)] + extra
        violations = []
        for point in points:
            difference = f(params, point) - point
            sign = (difference > 0) - (difference < 0)
            if sign != expected:
                violations.append(to_decimal(point))
        rows.append({
            'interval': name,
            'expected': '+' if expected > 0 else '-',
            'points': len(points),
            'violations': violations,
        })
    report = SignPatternReport(params, tuple(rows))
    if not report.ok:
        logger.warning(f"Sign pattern of f - x violated at {report.violations} points for d={params.d}")
    return report


SCAN_COLUMNS = (
    'd', 'alpha_lo', 'alpha_hi', 'beta_lo', 'beta_hi', 'gamma_lo', 'gamma_hi',
    'beta_scaled', 'gamma_scaled',
)


def scan_row(params: DynParams, prec: Optional[int] = None, digits: int = 30) -> Dict[str, str]:
    """
    One scan record: the three enclosures, (1 - beta) d^(k-2) and gamma (d + 1).

    beta and gamma columns stay empty when f has a single fixed point.
    """
    prec = resolve(prec, 'PRECISION_BITS')
    a = alpha(params, prec)
    row = dict.fromkeys(SCAN_COLUMNS, '')
    row.update(d=str(params.d), alpha_lo=to_decimal(a.lo, digits), alpha_hi=to_decimal(a.hi, digits))
    try:
        beta, gamma = beta_gamma(params, prec, alpha_enclosure=a)
    except NoThreeFixedPointsError:
        return row
    row.update(
        beta_lo=to_decimal(beta.lo, digits),
        beta_hi=to_decimal(beta.hi, digits),
        gamma_lo=to_decimal(gamma.lo, digits),
        gamma_hi=to_decimal(gamma.hi, digits),
        beta_scaled=to_decimal((1 - beta.midpoint) * params.d ** (params.k - 2), digits),
        gamma_scaled=to_decimal(gamma.midpoint * (params.d + 1), digits),
    )
    return row


def scan(k: int, degrees: Sequence[int], prec: Optional[int] = None, digits: int = 30) -> List[Dict[str, str]]:
    """Scan rows for each d, in the order given."""
    rows = [scan_row(DynParams(k, d), prec, digits) for d in degrees]
    logger.info(f"Scanned {len(rows)} degrees for k={k}")
    return rows
