"""Prime fields F_p and symbolic values of additive characters.

Character values are never complex numbers.  A value of the additive
character psi is stored as the residue ``x`` standing for ``zeta_p ** x``,
together with a sign in {+1, -1} for the sign-extended characters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import FieldError


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    """The prime field F_p."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2:
            raise FieldError(f"modulus must be an integer >= 2, got {self.p!r}")
        if not is_prime(self.p):
            raise FieldError(f"{self.p} is not prime")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value % self.p, self)

    def __iter__(self):
        return (FieldElement(v, self) for v in range(self.p))

    def __len__(self):
        return self.p

    @property
    def zero(self):
        return FieldElement(0, self)

    @property
    def one(self):
        return FieldElement(1, self)

    def primitive_root(self) -> int:
        return primitive_root(self.p)


@lru_cache(maxsize=None)
def make_field(p: int) -> Field:
    return Field(p)


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    order = p - 1
    factors = set()
    m, d = order, 2
    while d * d <= m:
        while m % d == 0:
            factors.add(d)
            m //= d
        d += 1
    if m > 1:
        factors.add(m)
    for g in range(2, p):
        if all(pow(g, order // f, p) != 1 for f in factors):
            return g
    raise FieldError(f"no primitive root mod {p}")  # unreachable for primes


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: Field

    def __post_init__(self):
        if not 0 <= self.value < self.field.p:
            raise FieldError(f"residue {self.value} out of range for F_{self.field.p}")

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return self.field(other)
        if other.field != self.field:
            raise FieldError(
                f"mixed fields: F_{self.field.p} and F_{other.field.p}"
            )
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement((self.value + other.value) % self.field.p, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return FieldElement((self.value - other.value) % self.field.p, self.field)

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement((self.value * other.value) % self.field.p, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement((-self.value) % self.field.p, self.field)

    def inverse(self):
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.field.p}")
        return FieldElement(pow(self.value, -1, self.field.p), self.field)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"


def field_arith(op: str, a: FieldElement, b: FieldElement | None = None) -> FieldElement:
    """Dispatch one of add, sub, mul, inv, neg."""
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    if b is None:
        raise FieldError(f"operation {op!r} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise FieldError(f"unknown field operation {op!r}")


@dataclass(frozen=True)
class CharacterValue:
    """``sign * zeta_p ** exponent`` for a fixed primitive p-th root zeta_p.

    Over F_2 one has zeta_2 = -1, so the sign is folded into the exponent;
    the stored pair is therefore canonical and ``(0, +1)`` is the only
    trivial value for every p.
    """

    p: int
    exponent: int = 0
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise FieldError(f"sign must be +1 or -1, got {self.sign!r}")
        e = self.exponent % self.p
        s = self.sign
        if self.p == 2 and s == -1:
            e, s = (e + 1) % 2, 1
        object.__setattr__(self, "exponent", e)
        object.__setattr__(self, "sign", s)

    def __mul__(self, other: "CharacterValue") -> "CharacterValue":
        if other.p != self.p:
            raise FieldError("character values over different fields")
        return CharacterValue(self.p, self.exponent + other.exponent, self.sign * other.sign)

    def inverse(self) -> "CharacterValue":
        return CharacterValue(self.p, -self.exponent, self.sign)

    def with_sign(self, eps: int) -> "CharacterValue":
        return CharacterValue(self.p, self.exponent, self.sign * eps)

    @property
    def is_trivial(self) -> bool:
        return self.exponent == 0 and self.sign == 1

    def __str__(self):
        s = "+" if self.sign == 1 else "-"
        return f"({self.exponent}, {s}1)"


def additive_character(x: FieldElement | int, p: int | None = None) -> CharacterValue:
    """psi(x), encoded as the exponent x."""
    if isinstance(x, FieldElement):
        return CharacterValue(x.field.p, x.value)
    if p is None:
        raise FieldError("an integer argument needs the modulus p")
    return CharacterValue(p, x)
