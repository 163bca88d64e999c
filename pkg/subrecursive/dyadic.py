"""Exact binary fractions in [0, 1].

A Dyadic keeps its (numerator, exponent) pair as given, so a padded
representation stays distinguishable from the canonical one, while equality,
ordering and hashing go by value.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from subrecursive.errors import DecodeError, DomainError


@total_ordering
@dataclass(frozen=True, eq=False)
class Dyadic:
    numerator: int
    exponent: int

    def __post_init__(self):
        if self.exponent < 0 or self.numerator < 0:
            raise DomainError(f"negative dyadic component: {self.numerator}/2^{self.exponent}")
        if self.numerator > (1 << self.exponent):
            raise DomainError(f"dyadic above 1: {self.numerator}/2^{self.exponent}")

    @classmethod
    def zero(cls):
        return cls(0, 0)

    @classmethod
    def one(cls):
        return cls(1, 0)

    @classmethod
    def unit(cls, size):
        """The algorithmic weight 2^-size of one program."""
        return cls(1, size)

    @classmethod
    def from_mantissa(cls, bits):
        """Read ``bits`` as the digits after the binary point."""
        if any(b not in "01" for b in bits):
            raise DecodeError(f"not a binary mantissa: {bits!r}")
        return cls(int(bits, 2) if bits else 0, len(bits))

    @classmethod
    def parse(cls, text):
        """Parse ``0``, ``1``, ``0.b1b2..``, ``1.00..`` or a bare mantissa ``b1b2..``."""
        text = text.strip()
        if text == "1":
            return cls.one()
        if "." in text:
            whole, _, frac = text.partition(".")
            if whole not in ("0", "1", ""):
                raise DecodeError(f"not a binary fraction in [0,1]: {text!r}")
            value = cls.from_mantissa(frac)
            if whole == "1":
                if value.numerator:
                    raise DecodeError(f"binary fraction above 1: {text!r}")
                return cls(1 << value.exponent, value.exponent)
            return value
        return cls.from_mantissa(text)

    def as_fraction(self):
        return Fraction(self.numerator, 1 << self.exponent)

    def normalized(self):
        n, e = self.numerator, self.exponent
        if n == 0:
            return Dyadic(0, 0)
        while e and not n & 1:
            n >>= 1
            e -= 1
        return Dyadic(n, e)

    @property
    def width(self):
        """Width of the canonical mantissa (no trailing zeros)."""
        return self.normalized().exponent

    def mantissa(self, width=None):
        """Digits after the binary point, padded with trailing zeros to ``width``."""
        if self >= Dyadic.one() and self.numerator:
            raise DomainError("the value 1 has no finite mantissa below the point")
        canon = self.normalized()
        if width is None:
            width = canon.exponent
        if width < canon.exponent:
            raise DomainError(f"width {width} below canonical width {canon.exponent}")
        if width == 0:
            return ""
        return format(canon.numerator << (width - canon.exponent), f"0{width}b")

    def __add__(self, other):
        e = max(self.exponent, other.exponent)
        n = (self.numerator << (e - self.exponent)) + (other.numerator << (e - other.exponent))
        return Dyadic(n, e)

    def _scaled(self, other):
        e = max(self.exponent, other.exponent)
        return (self.numerator << (e - self.exponent), other.numerator << (e - other.exponent))

    def __eq__(self, other):
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b = self._scaled(other)
        return a == b

    def __lt__(self, other):
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b = self._scaled(other)
        return a < b

    def __hash__(self):
        canon = self.normalized()
        return hash((canon.numerator, canon.exponent))

    def __str__(self):
        if self.numerator == 0:
            return "0"
        if self >= Dyadic.one():
            return "1"
        return "0." + self.mantissa()

    def __repr__(self):
        return f"Dyadic({self.numerator}/2^{self.exponent})"
