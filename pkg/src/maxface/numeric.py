"""Complex numeric kernel: tolerances, truncated power series, simple-pole
rational functions, and residues of their powers.

Everything here is immutable and pure; the residue engine tracks the largest
intermediate term so callers can build cancellation-aware zero tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import DomainError, UsageError


@dataclass(frozen=True)
class TolerancePolicy:
    """Zero tests and Newton stopping thresholds.

    is_zero uses zero_abs + zero_rel * scale, where scale should be the
    magnitude of the largest intermediate term of the computation that
    produced the value (catastrophic cancellation is the expected regime).
    """

    zero_abs: float = 1e-10
    zero_rel: float = 1e-9
    newton_resid: float = 1e-12

    def __post_init__(self):
        if not (self.zero_abs > 0 and self.zero_rel > 0 and self.newton_resid > 0):
            raise UsageError("tolerance values must be strictly positive")

    def threshold(self, scale: float = 0.0) -> float:
        return self.zero_abs + self.zero_rel * abs(scale)

    def is_zero(self, value: complex, scale: float = 0.0) -> bool:
        return abs(value) <= self.threshold(scale)


DEFAULT_TOLERANCE = TolerancePolicy()


def require_finite(z: complex, what: str = "value") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{what} is not finite: {z!r}")
    return z


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series in (z - center), truncated at a fixed order.

    coefficients[s] is the coefficient of (z - center)**s; len == order + 1.
    Arithmetic never reads beyond the retained order.
    """

    center: complex
    coefficients: tuple[complex, ...]

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise UsageError("a truncated series needs at least the constant term")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "coefficients", tuple(complex(c) for c in self.coefficients))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def constant(cls, value: complex, center: complex = 0.0, order: int = 0) -> "TruncatedSeries":
        coeffs = [complex(value)] + [0j] * order
        return cls(center, tuple(coeffs))

    def coefficient(self, s: int) -> complex:
        if not 0 <= s <= self.order:
            raise UsageError(f"coefficient index {s} outside retained order {self.order}")
        return self.coefficients[s]

    def _check_center(self, other: "TruncatedSeries") -> None:
        if self.center != other.center:
            raise UsageError(
                f"series centers differ: {self.center} vs {other.center}"
            )


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check_center(b)
    order = min(a.order, b.order)
    coeffs = tuple(a.coefficients[s] + b.coefficients[s] for s in range(order + 1))
    return TruncatedSeries(a.center, coeffs)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check_center(b)
    order = min(a.order, b.order)
    coeffs = [0j] * (order + 1)
    for s in range(order + 1):
        acc = 0j
        for t in range(s + 1):
            acc += a.coefficients[t] * b.coefficients[s - t]
        coeffs[s] = acc
    return TruncatedSeries(a.center, tuple(coeffs))


def series_pow(a: TruncatedSeries, exponent: int) -> TruncatedSeries:
    if exponent < 1:
        raise UsageError("series_pow requires exponent >= 1")
    result = a
    for _ in range(exponent - 1):
        result = series_mul(result, a)
    return result


@dataclass(frozen=True)
class SimplePoleFunction:
    """Finite sum of simple poles sum_i c_i / (z - p_i).

    Pole locations must be pairwise distinct and coefficients nonzero.
    """

    poles: tuple[tuple[complex, complex], ...]

    def __post_init__(self):
        poles = tuple((complex(p), complex(c)) for p, c in self.poles)
        for p, c in poles:
            require_finite(p, "pole location")
            require_finite(c, "pole coefficient")
            if c == 0:
                raise UsageError(f"pole at {p} has zero coefficient")
        locs = [p for p, _ in poles]
        for i in range(len(locs)):
            for j in range(i + 1, len(locs)):
                if locs[i] == locs[j]:
                    raise UsageError(f"duplicate pole location {locs[i]}")
        object.__setattr__(self, "poles", poles)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[complex, complex]]) -> "SimplePoleFunction":
        return cls(tuple(pairs))

    @property
    def locations(self) -> tuple[complex, ...]:
        return tuple(p for p, _ in self.poles)

    @property
    def coefficients(self) -> tuple[complex, ...]:
        return tuple(c for _, c in self.poles)

    def coefficient_sum(self) -> complex:
        return sum(self.coefficients, 0j)

    def min_pole_gap(self) -> float:
        locs = self.locations
        if len(locs) < 2:
            return math.inf
        return min(
            abs(locs[i] - locs[j])
            for i in range(len(locs))
            for j in range(i + 1, len(locs))
        )

    def translated(self, shift: complex) -> "SimplePoleFunction":
        return SimplePoleFunction(tuple((p + shift, c) for p, c in self.poles))

    def pole_index_at(self, location: complex, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> int:
        """Index of the pole at `location` (within zero_abs); UsageError if absent."""
        for idx, (p, _) in enumerate(self.poles):
            if abs(p - location) <= tol.zero_abs:
                return idx
        raise UsageError(f"no pole at {location}")


class ResidueValue(NamedTuple):
    """Residue plus the magnitude of the largest term that was summed.

    `scale` is the right yardstick for deciding whether the residue is a
    cancellation-zero rather than a genuine value.
    """

    value: complex
    scale: float


def evaluate(f: SimplePoleFunction, z: complex, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> complex:
    z = complex(z)
    for p, _ in f.poles:
        if abs(z - p) <= tol.zero_abs:
            raise DomainError(f"evaluation at (or too near) the pole {p}")
    return sum(c / (z - p) for p, c in f.poles)


def local_expansion(f: SimplePoleFunction, pole_index: int, order: int) -> tuple[complex, TruncatedSeries]:
    """Split f = c/(z - p) + regular near pole `pole_index`.

    Returns (c, Taylor series of the regular part about p up to `order`).
    The regular part of c_q/(z - q) about p is -sum_s c_q (z-p)^s/(q-p)^(s+1).
    """
    if not 0 <= pole_index < len(f.poles):
        raise UsageError(f"pole_index {pole_index} out of range")
    if order < 0:
        raise UsageError("order must be >= 0")
    p, c = f.poles[pole_index]
    coeffs = [0j] * (order + 1)
    for q, d in f.poles:
        if q == p:
            continue
        inv = 1.0 / (q - p)
        power = inv
        for s in range(order + 1):
            coeffs[s] -= d * power
            power *= inv
    return c, TruncatedSeries(p, tuple(coeffs))


def _residue_terms(f: SimplePoleFunction, pole_index: int, m: int) -> list[complex]:
    """The m-1 terms C(m,j) c^(m-j) [A^j]_(m-1-j) whose sum is Res_p f^m."""
    c, regular = local_expansion(f, pole_index, max(m - 2, 0))
    terms = []
    power = regular
    for j in range(1, m):
        # power == regular**j, truncated at order m-2 >= m-1-j
        terms.append(math.comb(m, j) * c ** (m - j) * power.coefficients[m - 1 - j])
        if j + 1 < m:
            power = series_mul(power, regular)
    return terms


def _residue_terms_extended(f: SimplePoleFunction, pole_index: int, m: int, precision_bits: int) -> list[complex]:
    import mpmath

    with mpmath.workprec(precision_bits):
        p, c = f.poles[pole_index]
        p = mpmath.mpc(p)
        c = mpmath.mpc(c)
        order = max(m - 2, 0)
        coeffs = [mpmath.mpc(0)] * (order + 1)
        for q, d in f.poles:
            q = mpmath.mpc(q)
            d = mpmath.mpc(d)
            if q == p:
                continue
            inv = 1 / (q - p)
            power = inv
            for s in range(order + 1):
                coeffs[s] -= d * power
                power *= inv
        terms = []
        power = list(coeffs)
        for j in range(1, m):
            terms.append(mpmath.binomial(m, j) * c ** (m - j) * power[m - 1 - j])
            if j + 1 < m:
                nxt = [mpmath.mpc(0)] * (order + 1)
                for s in range(order + 1):
                    nxt[s] = mpmath.fsum(power[t] * coeffs[s - t] for t in range(s + 1))
                power = nxt
        return [complex(t) for t in terms]


def residue_of_power_scaled(
    f: SimplePoleFunction,
    pole_index: int,
    m: int,
    precision_bits: int | None = None,
) -> ResidueValue:
    """Res_p f^m together with the magnitude of the largest summed term.

    With f = c/(z-p) + A(z) near p, f^m = sum_j C(m,j) c^(m-j) (z-p)^(j-m) A^j
    and the residue collects the (z-p)^(m-j-1) coefficient of A^j for
    j = 1..m-1 (for m = 1 the residue is just c). The series order is
    allocated at exactly m-2 so nothing is silently truncated.
    """
    if m < 1:
        raise UsageError("exponent m must be >= 1")
    if not 0 <= pole_index < len(f.poles):
        raise UsageError(f"pole_index {pole_index} out of range")
    if m == 1:
        c = f.poles[pole_index][1]
        return ResidueValue(c, abs(c))
    if precision_bits is None:
        terms = _residue_terms(f, pole_index, m)
    else:
        if precision_bits < 53:
            raise UsageError("precision_bits must be >= 53")
        terms = _residue_terms_extended(f, pole_index, m, precision_bits)
    value = sum(terms, 0j)
    scale = max((abs(t) for t in terms), default=0.0)
    return ResidueValue(require_finite(value, "residue"), scale)


def residue_of_power(
    f: SimplePoleFunction,
    pole_index: int,
    m: int,
    precision_bits: int | None = None,
) -> complex:
    return residue_of_power_scaled(f, pole_index, m, precision_bits).value
