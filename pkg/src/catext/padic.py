"""p-adic units truncated at an explicit precision ``p^k``.

Every value carries its level; asking a question that needs more precision
than is available raises PrecisionError instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import PrecisionError


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, int(p ** 0.5) + 1))


@dataclass(frozen=True, order=True)
class UnitModPk:
    p: int
    k: int
    residue: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.k < 1:
            raise ValueError("precision must be at least 1")
        r = self.residue % self.p ** self.k
        if gcd(r, self.p) != 1:
            raise ValueError(f"{self.residue} is not a unit mod {self.p}")
        object.__setattr__(self, "residue", r)

    @property
    def modulus(self) -> int:
        return self.p ** self.k

    def _same(self, other: UnitModPk) -> None:
        if (self.p, self.k) != (other.p, other.k):
            raise ValueError("units live at different primes or precisions")

    def __mul__(self, other: UnitModPk) -> UnitModPk:
        self._same(other)
        return UnitModPk(self.p, self.k, self.residue * other.residue)

    def __pow__(self, n: int) -> UnitModPk:
        return UnitModPk(self.p, self.k, pow(self.residue, n, self.modulus))

    def inverse(self) -> UnitModPk:
        return UnitModPk(self.p, self.k, pow(self.residue, -1, self.modulus))

    def reduce_to(self, m: int) -> UnitModPk:
        """The image at the lower precision ``m``."""
        if m > self.k:
            raise PrecisionError(f"cannot raise precision from {self.k} to {m}")
        return UnitModPk(self.p, m, self.residue)

    def is_one(self) -> bool:
        return self.residue == 1

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "residue": self.residue}

    @classmethod
    def from_json(cls, data: dict) -> UnitModPk:
        return cls(int(data["p"]), int(data["k"]), int(data["residue"]))


def _check_level(u: UnitModPk, m: int) -> None:
    if m < 0:
        raise ValueError("level must be nonnegative")
    if m > u.k:
        raise PrecisionError(f"level {m} exceeds the available precision {u.k}")


def gamma_membership(u: UnitModPk, m: int) -> bool:
    """Whether ``u ≡ 1 mod p^m``; level 0 holds for every unit."""
    _check_level(u, m)
    return (u.residue - 1) % u.p ** m == 0


def gamma_level(u: UnitModPk) -> int:
    """The largest ``m <= k`` with ``u ≡ 1 mod p^m``."""
    m = 0
    while m < u.k and gamma_membership(u, m + 1):
        m += 1
    return m


def teichmuller(a: int, p: int, k: int) -> UnitModPk:
    """The root of unity congruent to ``a`` mod ``p``, computed as ``a^(p^(k-1))``."""
    if p == 2:
        raise ValueError("Teichmüller lifts are for odd p; use torsion_units(2, k) for ±1")
    if a % p == 0:
        raise ValueError(f"{a} is not a unit mod {p}")
    return UnitModPk(p, k, pow(a, p ** (k - 1), p ** k))


def torsion_units(p: int, k: int) -> list[UnitModPk]:
    """The roots of unity of the p-adic units, reduced mod ``p^k``."""
    if p == 2:
        return sorted({UnitModPk(2, k, 1), UnitModPk(2, k, -1)})
    return sorted({teichmuller(a, p, k) for a in range(1, p)})


def class_order(u: UnitModPk, m: int | None = None) -> int:
    """Multiplicative order of ``u`` mod ``p^m`` (default: the full precision)."""
    m = u.k if m is None else m
    _check_level(u, m)
    mod = u.p ** m
    x, n = u.residue % mod, 1
    while x != 1 % mod:
        x, n = x * u.residue % mod, n + 1
    return n


def units(p: int, k: int) -> list[UnitModPk]:
    """All units mod ``p^k`` in increasing residue order."""
    return [UnitModPk(p, k, r) for r in range(1, p ** k) if r % p]
