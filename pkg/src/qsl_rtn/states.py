"""Qubit state algebra: Bloch vectors, density matrices, purity, overlap,
and the l1 coherence of a single qubit.

States are immutable and are only created through the validating
constructors (:class:`BlochVector`, :func:`make_state`,
:meth:`DensityMatrix.from_matrix`), so the invariants are checked at a
single choke point.  Every operation here is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlochOutOfBall

# Loose enough for accumulated float error, tight enough to catch real bugs.
STATE_TOL = 1e-12


@dataclass(frozen=True)
class BlochVector:
    """Dimensionless Bloch components (rx, ry, rz) inside the unit ball."""

    rx: float
    ry: float
    rz: float

    def __post_init__(self):
        object.__setattr__(self, "rx", float(self.rx))
        object.__setattr__(self, "ry", float(self.ry))
        object.__setattr__(self, "rz", float(self.rz))
        n2 = self.rx * self.rx + self.ry * self.ry + self.rz * self.rz
        if n2 > 1.0 + STATE_TOL:
            raise BlochOutOfBall(f"|r|^2 = {n2!r} exceeds 1 by more than {STATE_TOL}")

    @property
    def norm(self) -> float:
        return math.sqrt(self.rx**2 + self.ry**2 + self.rz**2)

    @property
    def r_perp(self) -> float:
        """Transverse magnitude sqrt(rx^2 + ry^2); always derived, never stored."""
        return math.hypot(self.rx, self.ry)

    def as_array(self) -> np.ndarray:
        return np.array([self.rx, self.ry, self.rz])


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 qubit density matrix, entry-wise immutable.

    Construct through :func:`make_state` or :meth:`from_matrix`; both enforce
    hermiticity, unit trace and positive semidefiniteness to ``STATE_TOL``.
    """

    rho00: complex
    rho01: complex
    rho10: complex
    rho11: complex

    @classmethod
    def from_matrix(cls, m) -> "DensityMatrix":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got shape {m.shape}")
        if abs(m[1, 0] - np.conj(m[0, 1])) > STATE_TOL:
            raise ValueError("matrix is not Hermitian: rho10 != conj(rho01)")
        if abs(m[0, 0].imag) > STATE_TOL or abs(m[1, 1].imag) > STATE_TOL:
            raise ValueError("diagonal entries must be real")
        if abs(m[0, 0] + m[1, 1] - 1.0) > STATE_TOL:
            raise ValueError(f"trace is {m[0, 0] + m[1, 1]!r}, expected 1")
        det = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]).real
        if det < -STATE_TOL:
            raise ValueError(f"matrix is not positive semidefinite: det = {det!r}")
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]])


def make_state(r: BlochVector) -> DensityMatrix:
    """Density matrix (I + r.sigma)/2 for a Bloch vector in the closed ball."""
    return DensityMatrix(
        rho00=complex(0.5 * (1.0 + r.rz)),
        rho01=complex(0.5 * r.rx, -0.5 * r.ry),
        rho10=complex(0.5 * r.rx, 0.5 * r.ry),
        rho11=complex(0.5 * (1.0 - r.rz)),
    )


def to_bloch(rho: DensityMatrix) -> BlochVector:
    """Inverse of :func:`make_state`; exact on the closed Bloch ball."""
    return BlochVector(
        rx=2.0 * rho.rho01.real,
        ry=-2.0 * rho.rho01.imag,
        rz=(rho.rho00 - rho.rho11).real,
    )


def purity(rho: DensityMatrix) -> float:
    """tr[rho^2] = (1 + |r|^2)/2, in [1/2, 1] for a qubit."""
    return (
        rho.rho00 * rho.rho00
        + rho.rho01 * rho.rho10
        + rho.rho10 * rho.rho01
        + rho.rho11 * rho.rho11
    ).real


def overlap(rho_a: DensityMatrix, rho_b: DensityMatrix) -> float:
    """tr[rho_a rho_b] = (1 + r_a . r_b)/2; symmetric in its arguments."""
    return (
        rho_a.rho00 * rho_b.rho00
        + rho_a.rho01 * rho_b.rho10
        + rho_a.rho10 * rho_b.rho01
        + rho_a.rho11 * rho_b.rho11
    ).real


def coherence_l1(rho: DensityMatrix) -> float:
    """Sum of off-diagonal moduli: 2|rho01| = sqrt(rx^2 + ry^2)."""
    return abs(rho.rho01) + abs(rho.rho10)
