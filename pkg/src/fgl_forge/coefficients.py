"""Exact coefficient domains.

Rationals (exact, gmpy2-backed when available), 2-local integers Z_(2),
finite fields F_{2^d} in polynomial-basis form, and truncated Witt vectors
W(F_{2^d}) modeled as Z_2[x]/(f~) with coefficients reduced mod 2^N, where f~
is the {0,1}-lift of the chosen irreducible modulus.  Teichmuller lifts are
computed by the fixed-point iteration z -> z^(2^d); the Frobenius is evaluated
through a Hensel-lifted root of f~.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import ConsistencyFailure, InverseOfNonUnit, NonIntegralCoefficient

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as QQ

QQ_ZERO = QQ(0)
QQ_ONE = QQ(1)


def two_valuation(q) -> int:
    """2-adic valuation of a nonzero rational."""
    n, d = int(q.numerator), int(q.denominator)
    if n == 0:
        raise ValueError("two_valuation(0) is undefined")
    return ((n & -n).bit_length() - 1) - ((d & -d).bit_length() - 1)


def is_two_local(q) -> bool:
    """True when q lies in Z_(2), i.e. its reduced denominator is odd."""
    return int(q.denominator) & 1 == 1


def rational_mod2(q) -> int:
    """Reduction of a 2-local rational to F_2 (odd denominators are units)."""
    if not is_two_local(q):
        raise NonIntegralCoefficient(f"{q} has even denominator")
    return int(q.numerator) & 1


def qq_to_string(q) -> str:
    n, d = int(q.numerator), int(q.denominator)
    return str(n) if d == 1 else f"{n}/{d}"


def qq_from_string(s: str):
    return QQ(s)


# ---------------------------------------------------------------------------
# 2-local integers
# ---------------------------------------------------------------------------

class TwoLocalInt:
    """An element of Z_(2): a rational whose reduced denominator is odd.

    The odd-denominator invariant is checked on every construction, so any
    arithmetic that silently leaves Z_(2) raises immediately.
    """

    __slots__ = ("value",)

    def __init__(self, value, den=None):
        q = QQ(value, den) if den is not None else QQ(value)
        if not is_two_local(q):
            raise NonIntegralCoefficient(f"{q} is not 2-locally integral")
        object.__setattr__(self, "value", q)

    def __add__(self, other):
        return TwoLocalInt(self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return TwoLocalInt(self.value - self._coerce(other))

    def __mul__(self, other):
        return TwoLocalInt(self.value * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return TwoLocalInt(-self.value)

    def inverse(self) -> "TwoLocalInt":
        if self.value == 0 or int(self.value.numerator) % 2 == 0:
            raise InverseOfNonUnit(f"{self.value} is not a unit in Z_(2)")
        return TwoLocalInt(1 / self.value)

    def is_unit(self) -> bool:
        return self.value != 0 and int(self.value.numerator) % 2 == 1

    def mod2(self) -> int:
        return rational_mod2(self.value)

    @staticmethod
    def _coerce(other):
        if isinstance(other, TwoLocalInt):
            return other.value
        return QQ(other)

    def __eq__(self, other):
        return self.value == self._coerce(other)

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return f"TwoLocalInt({qq_to_string(self.value)})"


# ---------------------------------------------------------------------------
# F_{2^d}: bit-packed polynomial basis
# ---------------------------------------------------------------------------

def _gf2_mulmod(a: int, b: int, modbits: int, d: int) -> int:
    # carry-less multiply then reduce by the degree-d modulus
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> d & 1:
            a ^= modbits
    # a may have grown one bit past d between reductions; the loop above keeps
    # it reduced because we fold immediately after each shift
    return r


def _gf2_powmod(a, e, modbits, d):
    r = 1
    while e:
        if e & 1:
            r = _gf2_mulmod(r, a, modbits, d)
        a = _gf2_mulmod(a, a, modbits, d)
        e >>= 1
    return r


DEFAULT_MODULI = {1: (1, 1), 2: (1, 1, 1), 3: (1, 1, 0, 1)}


@dataclass(frozen=True)
class FiniteFieldSpec:
    """The field F_{2^d} presented as F_2[x]/(modulus).

    modulus is a bit tuple low-to-high of length d+1 with leading bit 1;
    irreducibility is checked at construction (Rabin test, fine for small d).
    """

    d: int
    modulus: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("extension degree must be >= 1")
        mod = tuple(int(b) & 1 for b in self.modulus)
        object.__setattr__(self, "modulus", mod)
        if len(mod) != self.d + 1 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree d")
        if not self._irreducible():
            raise ValueError(f"modulus {list(mod)} is reducible over F_2")

    @staticmethod
    def default(d: int) -> "FiniteFieldSpec":
        if d not in DEFAULT_MODULI:
            raise ValueError(f"no default modulus for d={d}")
        return FiniteFieldSpec(d, DEFAULT_MODULI[d])

    @property
    def modbits(self) -> int:
        return sum(b << i for i, b in enumerate(self.modulus))

    def _irreducible(self) -> bool:
        # Rabin test: f irreducible over F_2 iff x^(2^d) == x mod f and
        # x^(2^(d/p)) != x for every prime p dividing d.
        mb, d = self.modbits, self.d
        if d == 1:
            return True  # both degree-1 polynomials x, x+1 are irreducible
        if _gf2_powmod(2, 1 << d, mb, d) != 2:
            return False
        n, p, primes = d, 2, []
        while p * p <= n:
            if n % p == 0:
                primes.append(p)
                while n % p == 0:
                    n //= p
            p += 1
        if n > 1:
            primes.append(n)
        return all(_gf2_powmod(2, 1 << (d // p), mb, d) != 2 for p in primes)

    def element(self, coeffs) -> "GFElement":
        return GFElement(self, coeffs)

    def from_bits(self, bits: int) -> "GFElement":
        return GFElement(self, [(bits >> i) & 1 for i in range(self.d)])

    @property
    def zero(self):
        return self.from_bits(0)

    @property
    def one(self):
        return self.from_bits(1)

    @property
    def omega(self):
        """The class of x (a generator of the polynomial basis)."""
        if self.d == 1:
            return self.one
        return self.from_bits(2)

    def elements(self):
        for bits in range(1 << self.d):
            yield self.from_bits(bits)

    def to_json(self):
        return {"d": self.d, "modulus": list(self.modulus)}

    @staticmethod
    def from_json(obj):
        return FiniteFieldSpec(obj["d"], tuple(obj["modulus"]))


class GFElement:
    """Element of F_{2^d} in polynomial-basis coordinates (d bits)."""

    __slots__ = ("spec", "bits")

    def __init__(self, spec, coeffs):
        self.spec = spec
        if isinstance(coeffs, int):
            bits = coeffs
        else:
            coeffs = list(coeffs)
            if len(coeffs) != spec.d:
                raise ValueError(f"need exactly {spec.d} coefficients")
            bits = sum((int(c) & 1) << i for i, c in enumerate(coeffs))
        if bits >> spec.d:
            raise ValueError("coefficients out of range")
        self.bits = bits

    @property
    def coeffs(self):
        return [(self.bits >> i) & 1 for i in range(self.spec.d)]

    def _check(self, other):
        if not isinstance(other, GFElement) or other.spec != self.spec:
            raise ValueError("mixed-field arithmetic")

    def __add__(self, other):
        self._check(other)
        return GFElement(self.spec, self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other):
        self._check(other)
        return GFElement(
            self.spec, _gf2_mulmod(self.bits, other.bits, self.spec.modbits, self.spec.d)
        )

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return GFElement(self.spec, _gf2_powmod(self.bits, e, self.spec.modbits, self.spec.d))

    def inverse(self):
        if self.bits == 0:
            raise InverseOfNonUnit("0 has no inverse in a field")
        return self ** ((1 << self.spec.d) - 2)

    def frobenius(self):
        return self * self

    def is_zero(self):
        return self.bits == 0

    def __eq__(self, other):
        return (
            isinstance(other, GFElement)
            and other.spec == self.spec
            and other.bits == self.bits
        )

    def __hash__(self):
        return hash((self.spec, self.bits))

    def __repr__(self):
        return f"GF({self.spec.d}):{self.coeffs}"


# ---------------------------------------------------------------------------
# Truncated Witt vectors W(F_{2^d}) = Z_2[x]/(f~) mod 2^N
# ---------------------------------------------------------------------------

class WittElement:
    """Element of Z_2[x]/(f~) with coefficients reduced mod 2^N.

    f~ is the {0,1}-coefficient integer lift of the field modulus, so reduction
    mod 2 of the coefficient vector is exactly the residue map W(k) -> k.
    """

    __slots__ = ("spec", "precision", "coeffs")

    def __init__(self, spec, precision, coeffs):
        if precision < 1:
            raise ValueError("precision must be >= 1")
        coeffs = [int(c) % (1 << precision) for c in coeffs]
        if len(coeffs) != spec.d:
            raise ValueError(f"need exactly {spec.d} coefficients")
        self.spec = spec
        self.precision = precision
        self.coeffs = tuple(coeffs)

    # -- constructors --

    @staticmethod
    def from_int(spec, precision, c) -> "WittElement":
        return WittElement(spec, precision, [c] + [0] * (spec.d - 1))

    @staticmethod
    def zero(spec, precision):
        return WittElement.from_int(spec, precision, 0)

    def mod_two_power(self, j: int) -> "WittElement":
        """The image in W(k)/2^j, re-embedded by masking each coordinate.

        The ideal (2^j) is exactly the set of elements all of whose basis
        coordinates are divisible by 2^j, so this is a canonical section.
        """
        if j >= self.precision:
            return self
        if j <= 0:
            return WittElement.zero(self.spec, self.precision)
        mask = (1 << j) - 1
        return WittElement(self.spec, self.precision, [c & mask for c in self.coeffs])

    @staticmethod
    def one(spec, precision):
        return WittElement.from_int(spec, precision, 1)

    # -- structure --

    def _check(self, other):
        if (
            not isinstance(other, WittElement)
            or other.spec != self.spec
            or other.precision != self.precision
        ):
            raise ValueError("mixed Witt-ring arithmetic")

    def _coerce(self, other):
        if isinstance(other, WittElement):
            self._check(other)
            return other
        if isinstance(other, int):
            return WittElement.from_int(self.spec, self.precision, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return WittElement(
            self.spec, self.precision, [a + b for a, b in zip(self.coeffs, o.coeffs)]
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return WittElement(
            self.spec, self.precision, [a - b for a, b in zip(self.coeffs, o.coeffs)]
        )

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return WittElement(self.spec, self.precision, [-a for a in self.coeffs])

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self.spec.d
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    prod[i + j] += a * b
        fb = self.spec.modulus
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            if c:
                for i, f in enumerate(fb):
                    if f:
                        prod[k - d + i] -= c
                prod[k] = 0
        return WittElement(self.spec, self.precision, prod[:d])

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        r = WittElement.one(self.spec, self.precision)
        base = self
        while e:
            if e & 1:
                r = r * base
            base = base * base
            e >>= 1
        return r

    def residue(self) -> GFElement:
        """Reduction mod 2 down to F_{2^d}."""
        return GFElement(self.spec, [c & 1 for c in self.coeffs])

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_unit(self):
        return not self.residue().is_zero()

    def two_valuation(self):
        """Largest e with self in 2^e * W; equals precision when self is 0."""
        v = self.precision
        for c in self.coeffs:
            if c:
                v = min(v, (c & -c).bit_length() - 1)
        return v

    def inverse(self) -> "WittElement":
        if not self.is_unit():
            raise InverseOfNonUnit(f"{self} reduces to 0 mod 2")
        # lift the residue inverse, then Newton: v <- v(2 - wv)
        r = self.residue().inverse()
        v = WittElement(self.spec, self.precision, r.coeffs)
        two = WittElement.from_int(self.spec, self.precision, 2)
        for _ in range(self.precision.bit_length() + 1):
            v = v * (two - self * v)
        if not (self * v - 1).is_zero():
            raise ConsistencyFailure("Newton inversion failed to converge")
        return v

    def __eq__(self, other):
        if isinstance(other, int):
            other = WittElement.from_int(self.spec, self.precision, other)
        return (
            isinstance(other, WittElement)
            and other.spec == self.spec
            and other.precision == self.precision
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.spec, self.precision, self.coeffs))

    def __repr__(self):
        return f"W({self.spec.d},N={self.precision}):{list(self.coeffs)}"

    def to_json(self):
        return {"precision": self.precision, "coeffs": list(self.coeffs)}

    @staticmethod
    def from_json(spec, obj):
        return WittElement(spec, obj["precision"], obj["coeffs"])


def teichmuller(a: GFElement, N: int) -> WittElement:
    """The Teichmuller lift of a to precision N.

    Iterates z -> z^(2^d) from the naive {0,1} lift; quadratic 2-adic
    convergence makes this stable within N steps (hard cap 4N).
    """
    spec = a.spec
    z = WittElement(spec, N, a.coeffs)
    q = 1 << spec.d
    for _ in range(4 * N):
        z_next = z**q
        if z_next == z:
            return z
        z = z_next
    raise ConsistencyFailure("Teichmuller iteration did not stabilize within 4N steps")


@functools.cache
def _frobenius_root(spec: FiniteFieldSpec, N: int) -> WittElement:
    # Hensel-lift the root of f~ congruent to x^2 mod 2; f~ is separable mod 2
    # (irreducible), so f~'(r) is a unit and Newton converges quadratically.
    if spec.d == 1:
        x = WittElement(spec, N, [-spec.modulus[0]])
    else:
        x = WittElement(spec, N, [0, 1] + [0] * (spec.d - 2))
    r = x * x
    fb = spec.modulus

    def f_of(w):
        acc = WittElement.zero(spec, N)
        p = WittElement.one(spec, N)
        for b in fb:
            if b:
                acc = acc + p
            p = p * w
        return acc

    def fprime_of(w):
        acc = WittElement.zero(spec, N)
        p = WittElement.one(spec, N)
        for i, b in enumerate(fb[1:], start=1):
            if b:
                acc = acc + p * i
            p = p * w
        return acc

    for _ in range(4 * N):
        fr = f_of(r)
        if fr.is_zero():
            return r
        r = r - fr * fprime_of(r).inverse()
    if f_of(r).is_zero():
        return r
    raise ConsistencyFailure("Hensel lift for the Frobenius root did not converge")


def frobenius_lift(w: WittElement) -> WittElement:
    """The lift of Frobenius to W(F_{2^d}): substitute the Hensel root for x."""
    r = _frobenius_root(w.spec, w.precision)
    acc = WittElement.zero(w.spec, w.precision)
    p = WittElement.one(w.spec, w.precision)
    for c in w.coeffs:
        if c:
            acc = acc + p * c
        p = p * r
    return acc
