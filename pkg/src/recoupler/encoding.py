"""Two-spin logical codes, encoded T/R generators, and leakage bookkeeping.

Logical qubit m (1-based) lives on physical spins (2m-1, 2m). The axially
symmetric code is |0_L> = |ud>, |1_L> = |du>; the antisymmetric code is
|0_L> = |uu>, |1_L> = |dd>. Logical basis ordering mirrors the physical bit
convention: logical qubit 1 is the least significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SectorError, ValidationError
from .model import build_R, build_T
from .pauli import PauliSum, single, to_matrix

SYMMETRIC = "axial_symmetric"
ANTISYMMETRIC = "axial_antisymmetric"

# per-qubit physical bit patterns (bit of spin 2m-1, bit of spin 2m); up = 0
_PATTERNS = {SYMMETRIC: ((0, 1), (1, 0)), ANTISYMMETRIC: ((0, 0), (1, 1))}


@dataclass(frozen=True)
class CodeSpec:
    sector: str = SYMMETRIC
    n_spins: int = 4

    def __post_init__(self):
        if self.sector not in _PATTERNS:
            raise ValidationError(f"unknown sector {self.sector!r}")
        if self.n_spins <= 0 or self.n_spins % 2:
            raise ValidationError("n_spins must be even and positive")

    @property
    def n_logical(self) -> int:
        return self.n_spins // 2

    @property
    def family(self) -> str:
        """Logical-operator family acting on this sector: T or R."""
        return "T" if self.sector == SYMMETRIC else "R"


def t_z(n: int, m: int) -> PauliSum:
    """T_m^z = (sigma_{2m-1}^z - sigma_{2m}^z)/2."""
    a, b = 2 * m - 1, 2 * m
    return 0.5 * (PauliSum.from_string(single(n, a, "Z")) - PauliSum.from_string(single(n, b, "Z")))


def r_z(n: int, m: int) -> PauliSum:
    """R_m^z = (sigma_{2m-1}^z + sigma_{2m}^z)/2."""
    a, b = 2 * m - 1, 2 * m
    return 0.5 * (PauliSum.from_string(single(n, a, "Z")) + PauliSum.from_string(single(n, b, "Z")))


def t_x(n: int, m: int) -> PauliSum:
    return build_T(n, 2 * m - 1, 2 * m)


def r_x(n: int, m: int) -> PauliSum:
    return build_R(n, 2 * m - 1, 2 * m)


@dataclass(frozen=True)
class LogicalOperator:
    """Encoded generator: family T acts on the symmetric sector, R on the antisymmetric."""

    family: str  # T | R
    axis: str  # x | z
    m: int

    def __post_init__(self):
        if self.family not in ("T", "R") or self.axis not in ("x", "z"):
            raise ValidationError(f"bad logical operator {self.family}{self.axis}")
        if self.m < 1:
            raise ValidationError("logical index is 1-based")

    def to_sum(self, n_spins: int) -> PauliSum:
        if 2 * self.m > n_spins:
            raise DimensionError(f"logical qubit {self.m} does not fit in {n_spins} spins")
        table = {("T", "x"): t_x, ("T", "z"): t_z, ("R", "x"): r_x, ("R", "z"): r_z}
        return table[(self.family, self.axis)](n_spins, self.m)


def code_index(spec: CodeSpec, logical: int) -> int:
    """Physical basis index of logical computational state |logical>."""
    pats = _PATTERNS[spec.sector]
    idx = 0
    for m in range(spec.n_logical):
        b1, b2 = pats[(logical >> m) & 1]
        idx |= b1 << (2 * m)
        idx |= b2 << (2 * m + 1)
    return idx


def code_isometry(spec: CodeSpec) -> np.ndarray:
    """2^n x 2^k isometry whose columns are the logical basis states."""
    dim, k = 2**spec.n_spins, 2**spec.n_logical
    v = np.zeros((dim, k), dtype=complex)
    for logical in range(k):
        v[code_index(spec, logical), logical] = 1.0
    return v


def code_projector(spec: CodeSpec) -> np.ndarray:
    """Orthogonal projector of rank 2^{n_logical} onto the code space."""
    v = code_isometry(spec)
    return v @ v.conj().T


def encode(spec: CodeSpec, logical_state: np.ndarray) -> np.ndarray:
    """Isometric embedding of a logical state vector into the physical register."""
    psi = np.asarray(logical_state, dtype=complex)
    if psi.shape != (2**spec.n_logical,):
        raise DimensionError(
            f"logical state has shape {psi.shape}, expected ({2**spec.n_logical},)"
        )
    return code_isometry(spec) @ psi


def decode(spec: CodeSpec, physical_state: np.ndarray):
    """Project back to the code space.

    Returns (logical_state, leakage_norm) where leakage_norm = ||(I-P) psi||
    for a normalized input and the logical part is renormalized. A state with
    no in-code component returns (None, 1.0).
    """
    psi = np.asarray(physical_state, dtype=complex)
    if psi.shape != (2**spec.n_spins,):
        raise DimensionError(
            f"physical state has shape {psi.shape}, expected ({2**spec.n_spins},)"
        )
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValidationError("cannot decode the zero vector")
    psi = psi / norm
    amps = code_isometry(spec).conj().T @ psi
    in_norm = np.linalg.norm(amps)
    leakage = float(np.sqrt(max(0.0, 1.0 - in_norm**2)))
    if in_norm < 1e-12:
        return None, 1.0
    return amps / in_norm, leakage


def logical_matrix(op, spec: CodeSpec) -> np.ndarray:
    """Compress an operator to the logical basis: V^dag M V.

    Accepts a LogicalOperator (whose family must match the sector), a PauliSum,
    or a dense matrix on the full register.
    """
    if isinstance(op, LogicalOperator):
        if op.family != spec.family:
            raise SectorError(
                f"{op.family}-family operators act on the "
                f"{'symmetric' if op.family == 'T' else 'antisymmetric'} sector, "
                f"code is {spec.sector}"
            )
        mat = to_matrix(op.to_sum(spec.n_spins))
    elif isinstance(op, PauliSum):
        mat = to_matrix(op)
    else:
        mat = np.asarray(op, dtype=complex)
    dim = 2**spec.n_spins
    if mat.shape != (dim, dim):
        raise DimensionError(f"operator shape {mat.shape}, expected ({dim},{dim})")
    v = code_isometry(spec)
    return v.conj().T @ mat @ v
