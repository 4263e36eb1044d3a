"""Phase-exact algebra of N-spin Pauli strings and complex-weighted Pauli sums.

Conventions (used everywhere in this package):
  - letters are written spin-1-first: "XZ" means X on spin 1, Z on spin 2;
  - spin i (1-based) maps to bit i-1, so basis index = sum bit_i * 2**(i-1)
    and spin 1 is the least significant bit;
  - |up> = |0> is the +1 eigenstate of sigma_z;
  - string phases are exact fourth roots of unity, stored as a power of i.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import CapacityError, DimensionError, UnsupportedGeneratorError

COEFF_EPS = 1e-14  # canonicalization threshold for PauliSum coefficients

_LETTERS = "IXYZ"
_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

# single-site products: (a, b) -> (power of i, letter)
_SITE_MUL = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("Y", "I"): (0, "Y"), ("Z", "I"): (0, "Z"),
    ("X", "X"): (0, "I"), ("Y", "Y"): (0, "I"), ("Z", "Z"): (0, "I"),
    ("X", "Y"): (1, "Z"), ("Y", "Z"): (1, "X"), ("Z", "X"): (1, "Y"),
    ("Y", "X"): (3, "Z"), ("Z", "Y"): (3, "X"), ("X", "Z"): (3, "Y"),
}

_SITE_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def max_spins() -> int:
    """Dense-matrix spin cap, overridable via RECOUPLER_MAX_SPINS."""
    return int(os.environ.get("RECOUPLER_MAX_SPINS", "12"))


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-spin Paulis with an exact i**power phase."""

    letters: str
    power: int = 0  # phase = i**power

    def __post_init__(self):
        if any(c not in _LETTERS for c in self.letters):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        object.__setattr__(self, "power", self.power % 4)

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def phase(self) -> complex:
        return _PHASES[self.power]

    def __mul__(self, other: "PauliString") -> "PauliString":
        return mul(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.letters, self.power + 2)

    def __repr__(self):
        sign = {0: "+1", 1: "+i", 2: "-1", 3: "-i"}[self.power]
        return f"{sign}*{self.letters}"


def identity_string(n: int) -> PauliString:
    return PauliString("I" * n)


def single(n: int, site: int, letter: str) -> PauliString:
    """Pauli `letter` on 1-based `site` of an n-spin register."""
    if not 1 <= site <= n:
        raise DimensionError(f"site {site} outside 1..{n}")
    return PauliString("I" * (site - 1) + letter + "I" * (n - site))


def mul(p: PauliString, q: PauliString) -> PauliString:
    """Exact product p*q, accumulating the i**k phase sitewise (XY = iZ etc.)."""
    if p.n != q.n:
        raise DimensionError(f"length mismatch: {p.n} vs {q.n}")
    power = p.power + q.power
    out = []
    for a, b in zip(p.letters, q.letters):
        k, c = _SITE_MUL[(a, b)]
        power += k
        out.append(c)
    return PauliString("".join(out), power)


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff pq = qp; counts anticommuting sites, no matrices built."""
    if p.n != q.n:
        raise DimensionError(f"length mismatch: {p.n} vs {q.n}")
    odd = sum(
        1 for a, b in zip(p.letters, q.letters) if a != "I" and b != "I" and a != b
    )
    return odd % 2 == 0


class PauliSum:
    """Finite complex-weighted sum of Pauli strings on a fixed spin count.

    Immutable by convention: all operations return new sums. Coefficients below
    COEFF_EPS are dropped and duplicate letter-sequences merged on construction.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[str, complex] | None = None):
        self.n = int(n)
        canon: dict[str, complex] = {}
        for letters, coeff in (terms or {}).items():
            if len(letters) != self.n:
                raise DimensionError(
                    f"term {letters!r} has length {len(letters)}, expected {self.n}"
                )
            c = canon.get(letters, 0.0) + complex(coeff)
            if abs(c) < COEFF_EPS:
                canon.pop(letters, None)
            else:
                canon[letters] = c
        self._terms = canon

    @classmethod
    def from_string(cls, s: PauliString, coeff: complex = 1.0) -> "PauliSum":
        return cls(s.n, {s.letters: coeff * s.phase})

    @classmethod
    def zero(cls, n: int) -> "PauliSum":
        return cls(n, {})

    @property
    def terms(self) -> dict[str, complex]:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def coeff(self, letters: str) -> complex:
        return self._terms.get(letters, 0.0)

    def _check(self, other: "PauliSum"):
        if self.n != other.n:
            raise DimensionError(f"spin counts differ: {self.n} vs {other.n}")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check(other)
        merged = dict(self._terms)
        for k, v in other._terms.items():
            merged[k] = merged.get(k, 0.0) + v
        return PauliSum(self.n, merged)

    def __radd__(self, other):
        if other == 0:  # lets builtin sum() start from 0
            return self
        return NotImplemented

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(self.n, {k: v * scalar for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self * -1.0

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, expanded term by term with exact phases."""
        self._check(other)
        out: dict[str, complex] = {}
        for la, ca in self._terms.items():
            pa = PauliString(la)
            for lb, cb in other._terms.items():
                prod = mul(pa, PauliString(lb))
                key = prod.letters
                out[key] = out.get(key, 0.0) + ca * cb * prod.phase
        return PauliSum(self.n, out)

    def commutator(self, other: "PauliSum") -> "PauliSum":
        return self @ other - other @ self

    def is_hermitian(self, tol: float = COEFF_EPS) -> bool:
        """Hermitian iff every coefficient is real in the canonical Pauli basis."""
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def norm(self) -> float:
        """Frobenius norm divided by sqrt(2**n) (Pauli strings are orthonormal)."""
        return float(np.sqrt(sum(abs(c) ** 2 for c in self._terms.values())))

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n == other.n and (self - other).norm() < 1e-12

    def __repr__(self):
        if not self._terms:
            return f"PauliSum(n={self.n}, 0)"
        parts = [f"({c:.6g})*{k}" for k, c in sorted(self._terms.items())]
        return " + ".join(parts)


def conjugate(a: PauliSum, theta: float, b: PauliSum) -> PauliSum:
    """exp(-i*a*theta) . b . exp(+i*a*theta), computed symbolically.

    Requires `a` to be a single Pauli string with coefficient +/-1, so a^2 = I.
    Terms of `b` commuting with `a` pass through; anticommuting terms map to
    cos(2 theta) t - i sin(2 theta) a t. At theta = pi/2 that is a sign flip.
    Multi-string generators must go through dense conjugation instead.
    """
    if len(a) != 1:
        raise UnsupportedGeneratorError(
            "conjugation generator must be a single Pauli string"
        )
    (letters, coeff), = a
    if abs(coeff - 1.0) > 1e-12 and abs(coeff + 1.0) > 1e-12:
        raise UnsupportedGeneratorError(
            f"generator coefficient must be +/-1, got {coeff}"
        )
    sign = 1.0 if coeff.real > 0 else -1.0
    a_str = PauliString(letters)
    if a.n != b.n:
        raise DimensionError(f"spin counts differ: {a.n} vs {b.n}")

    cos2, sin2 = np.cos(2 * theta), np.sin(2 * theta)
    out: dict[str, complex] = {}

    def add(key: str, val: complex):
        out[key] = out.get(key, 0.0) + val

    for lt, ct in b:
        t = PauliString(lt)
        if commutes(a_str, t):
            add(lt, ct)
        else:
            add(lt, ct * cos2)
            at = mul(a_str, t)
            add(at.letters, ct * (-1j) * sin2 * sign * at.phase)
    return PauliSum(b.n, out)


def to_matrix(s: PauliSum | PauliString, n: int | None = None) -> np.ndarray:
    """Dense matrix in the computational basis (spin 1 = least significant bit)."""
    if isinstance(s, PauliString):
        s = PauliSum.from_string(s)
    n = s.n if n is None else n
    if n != s.n:
        raise DimensionError(f"operator on {s.n} spins, requested {n}")
    cap = max_spins()
    if n > cap:
        raise CapacityError(f"{n} spins exceeds dense cap {cap} (RECOUPLER_MAX_SPINS)")
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for letters, coeff in s:
        m = np.array([[1.0 + 0.0j]])
        for letter in letters:  # spin 1 first; kron on the left keeps it least significant
            m = np.kron(_SITE_MATS[letter], m)
        out += coeff * m
    return out


def sum_of(parts: Iterable[tuple[complex, PauliString]], n: int) -> PauliSum:
    """Build a PauliSum from (coefficient, string) pairs."""
    total = PauliSum.zero(n)
    for coeff, s in parts:
        total = total + PauliSum.from_string(s, coeff)
    return total
