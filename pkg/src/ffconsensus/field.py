"""Exact arithmetic in the prime field F_p.

Elements are canonical residues in [0, p-1].  Inversion uses Fermat's
little theorem (a^(p-2) mod p), so it is exact for any prime modulus.
Moduli up to 2**31 - 1 are supported; all intermediates fit in 64-bit
integers (Python ints are unbounded anyway, the bound matters for the
numpy-backed matrix code).
"""

from __future__ import annotations

from .errors import FieldMismatchError, PreconditionError

MAX_MODULUS = 2**31 - 1


def is_prime(n: int) -> bool:
    """Deterministic primality test by trial division up to sqrt(n)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class PrimeField:
    """The field F_p for a prime modulus p.

    Instances are immutable and act as element factories: ``F(7)``
    returns the canonical residue of 7 as an :class:`FpElement`.
    """

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or not is_prime(p):
            raise PreconditionError(f"modulus must be prime, got {p!r}")
        if p > MAX_MODULUS:
            raise PreconditionError(f"modulus {p} exceeds supported bound {MAX_MODULUS}")
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("PrimeField is immutable")

    def __call__(self, value: int) -> "FpElement":
        return FpElement(value, self)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def zero(self) -> "FpElement":
        return FpElement(0, self)

    def one(self) -> "FpElement":
        return FpElement(1, self)

    def elements(self):
        """Iterate over all p field elements in canonical order."""
        for v in range(self.p):
            yield FpElement(v, self)


class FpElement:
    """A residue in [0, p-1] tagged with its field.

    Arithmetic is defined only between elements of the same field;
    mixing fields raises :class:`FieldMismatchError`.  Values are
    immutable and hashable.
    """

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        # Python's % already yields the mathematical (nonnegative) residue.
        object.__setattr__(self, "value", value % field.p)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("FpElement is immutable")

    def _coerce(self, other) -> "FpElement":
        if isinstance(other, FpElement):
            if other.field != self.field:
                raise FieldMismatchError(
                    f"operands in F_{self.field.p} and F_{other.field.p}"
                )
            return other
        if isinstance(other, int):
            return FpElement(other, self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElement(self.value + other.value, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElement(self.value - other.value, self.field)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElement(other.value - self.value, self.field)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElement(self.value * other.value, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElement(-self.value, self.field)

    def __pow__(self, e: int):
        """a**e with e a nonnegative integer; 0**0 == 1 by convention."""
        if e < 0:
            raise PreconditionError("exponent must be nonnegative; use inv() first")
        return FpElement(pow(self.value, e, self.field.p), self.field)

    def inv(self) -> "FpElement":
        """Multiplicative inverse via Fermat: a^(p-2) mod p."""
        if self.value == 0:
            raise PreconditionError(f"0 has no inverse in F_{self.field.p}")
        return FpElement(pow(self.value, self.field.p - 2, self.field.p), self.field)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"F{self.field.p}({self.value})"

    def __bool__(self):
        return self.value != 0
