"""Weak values, postselection, and the post-measurement pointer state.

The measured system is a polarization qubit preselected to
|psi_i> = cos(phi/2)|H> + e^{i delta} sin(phi/2)|V>, coupled impulsively
to the pointer through sigma_x (x) momentum with strength s, and
postselected onto |H>.  Because sigma_x squares to the identity the
joint unitary splits into two displaced branches, so the conditioned
pointer state is

    |Phi> ~ (1 + w) D(s/2)|Psi> + (1 - w) D(-s/2)|Psi>

with w the weak value of sigma_x.  The shipped builder normalizes
numerically; the closed-form normalization is kept as a cross-check.
An independent dense-matrix-exponential oracle evolves the full
qubit (x) pointer space for validation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import fock
from .errors import (
    DegeneratePostselectionError,
    InvalidParameterError,
    OracleDimensionError,
    UndefinedWeakValueError,
)
from .fock import CoherentParams, StateVector, displacement_matrix, quadrature_ops

#: largest pointer dimension the dense-exponential oracle will accept
ORACLE_DIM_LIMIT = 512

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


@dataclass(frozen=True)
class SelectionConfig:
    """Pre/postselection angles: polar angle phi_pre and relative phase delta.

    phi_pre = pi makes the preselection orthogonal to the postselected
    |H> and is rejected.
    """

    phi_pre: float
    delta: float = 0.0

    def __post_init__(self):
        if self.phi_pre == math.pi:
            raise UndefinedWeakValueError(
                "phi_pre = pi: pre- and postselection are orthogonal"
            )
        if not 0.0 <= self.phi_pre < math.pi:
            raise InvalidParameterError(
                f"phi_pre must lie in [0, pi), got {self.phi_pre}"
            )

    @property
    def preselected(self) -> np.ndarray:
        """|psi_i> as a 2-vector in the (|H>, |V>) basis."""
        half = 0.5 * self.phi_pre
        return np.array(
            [math.cos(half), cmath.exp(1j * self.delta) * math.sin(half)],
            dtype=np.complex128,
        )


@dataclass(frozen=True)
class MeasurementConfig:
    """Coupling strength s = g/sigma plus the truncation policy."""

    s: float
    tol: float = 1e-9
    max_dim: int = fock.DIM_CAP
    fixed_dim: int | None = None

    def __post_init__(self):
        if self.s < 0:
            raise InvalidParameterError(f"coupling strength must be >= 0, got {self.s}")
        if not 0.0 < self.tol <= 1e-4:
            raise InvalidParameterError(f"truncation tol must be in (0, 1e-4], got {self.tol}")

    def resolve_dim(self, alpha: CoherentParams) -> int:
        if self.fixed_dim is not None:
            return self.fixed_dim
        return fock.adaptive_dim(alpha, self.s, tol=self.tol, cap=self.max_dim)


def weak_value(sel: SelectionConfig) -> complex:
    """Weak value of sigma_x: e^{i delta} tan(phi_pre / 2)."""
    return cmath.exp(1j * sel.delta) * math.tan(0.5 * sel.phi_pre)


def naive_postselection_probability(sel: SelectionConfig) -> float:
    """|<psi_f|psi_i>|^2 = cos^2(phi_pre / 2), ignoring the interaction."""
    return math.cos(0.5 * sel.phi_pre) ** 2


def branch_superposition(pointer: StateVector, w: complex, s: float) -> StateVector:
    """(1+w) D(s/2)|pointer> + (1-w) D(-s/2)|pointer>, unnormalized."""
    plus = fock.apply(fock._displacement_readonly(complex(0.5 * s), pointer.dim), pointer)
    minus = fock.apply(fock._displacement_readonly(complex(-0.5 * s), pointer.dim), pointer)
    amps = (1.0 + w) * plus.amplitudes + (1.0 - w) * minus.amplitudes
    return StateVector(amps, normalized=False)


def postselected_pointer(
    pointer: StateVector, sel: SelectionConfig, m: MeasurementConfig
) -> tuple[StateVector, float]:
    """Conditioned pointer state and exact postselection probability.

    Builds the branch superposition once; final_pointer_state and
    true_postselection_probability are views of the same computation.
    """
    if not pointer.normalized:
        raise InvalidParameterError("pointer state must be normalized")
    w = weak_value(sel)
    superposed = branch_superposition(pointer, w, m.s)
    superposed_norm = fock.norm(superposed)
    scale = (abs(1.0 + w) + abs(1.0 - w)) or 1.0
    if superposed_norm < 1e-12 * scale:
        raise DegeneratePostselectionError(
            f"displaced branches cancel for weak value {w!r} at s={m.s}"
        )
    final = StateVector(superposed.amplitudes / superposed_norm, normalized=True)
    probability = naive_postselection_probability(sel) * 0.25 * superposed_norm**2
    return final, probability


def final_pointer_state(pointer: StateVector, w: complex, m: MeasurementConfig) -> StateVector:
    """Normalized pointer state after the postselected measurement."""
    if not pointer.normalized:
        raise InvalidParameterError("pointer state must be normalized")
    superposed = branch_superposition(pointer, w, m.s)
    scale = (abs(1.0 + w) + abs(1.0 - w)) or 1.0
    if fock.norm(superposed) < 1e-12 * scale:
        raise DegeneratePostselectionError(
            f"displaced branches cancel for weak value {w!r} at s={m.s}"
        )
    return fock.normalize(superposed)


def analytic_beta(alpha: CoherentParams, w: complex, s: float) -> float:
    """Closed-form normalization of the two-branch pointer superposition.

    Equals the reciprocal norm of (1+w) D(s/2)|Psi> + (1-w) D(-s/2)|Psi>
    for the photon-added coherent pointer: the branch overlap is
    <Psi|D(-s)|Psi> = gamma^2 e^{-s^2/2} e^{2 i s Im(alpha)}
    (1 + (alpha* + s)(alpha - s)), and |1+w|^2 + |1-w|^2 = 2(1 + |w|^2)
    supplies the leading 1/sqrt(2).
    """
    if s < 0:
        raise InvalidParameterError(f"coupling strength must be >= 0, got {s}")
    a = alpha.alpha
    overlap = (
        fock.spacs_gamma_sq(alpha.mod_sq)
        * math.exp(-0.5 * s * s)
        * cmath.exp(2j * s * a.imag)
        * (1.0 + (a.conjugate() + s) * (a - s))
    )
    bracket = 1.0 + abs(w) ** 2 + ((1.0 + w).conjugate() * (1.0 - w) * overlap).real
    return 1.0 / math.sqrt(2.0 * bracket)


def true_postselection_probability(
    pointer: StateVector, sel: SelectionConfig, m: MeasurementConfig
) -> float:
    """Exact postselection probability including the interaction.

    ||(<psi_f| (x) I) U |psi_i>|Psi>||^2; reduces to cos^2(phi_pre/2) at s=0.
    """
    if not pointer.normalized:
        raise InvalidParameterError("pointer state must be normalized")
    w = weak_value(sel)
    superposed = branch_superposition(pointer, w, m.s)
    return naive_postselection_probability(sel) * 0.25 * fock.norm(superposed) ** 2


def joint_unitary_dense(dim: int, s: float) -> np.ndarray:
    """exp(-i g sigma_x (x) P) on the 2*dim joint space via scaling-and-squaring.

    With sigma = 1 the strength g equals s.  This path shares no code
    with the analytic displacement matrices.
    """
    _, p = quadrature_ops(dim, sigma=1.0)
    return expm(-1j * s * np.kron(SIGMA_X, p))


def joint_unitary_branches(dim: int, s: float) -> np.ndarray:
    """Two-branch decomposition (I+sigma_x)/2 (x) D(s/2) + (I-sigma_x)/2 (x) D(-s/2)."""
    eye2 = np.eye(2, dtype=np.complex128)
    return 0.5 * np.kron(eye2 + SIGMA_X, displacement_matrix(0.5 * s, dim)) + 0.5 * np.kron(
        eye2 - SIGMA_X, displacement_matrix(-0.5 * s, dim)
    )


def joint_evolution_project(
    pointer: StateVector, sel: SelectionConfig, m: MeasurementConfig
) -> tuple[StateVector, float]:
    """Independent oracle: dense joint evolution, then projection onto |H>.

    Returns the normalized projected pointer and the postselection
    probability.  Limited to pointer dimensions <= ORACLE_DIM_LIMIT.
    """
    if pointer.dim > ORACLE_DIM_LIMIT:
        raise OracleDimensionError(
            f"oracle limited to dim <= {ORACLE_DIM_LIMIT}, got {pointer.dim}"
        )
    if not pointer.normalized:
        raise InvalidParameterError("pointer state must be normalized")
    unitary = joint_unitary_dense(pointer.dim, m.s)
    joint = unitary @ np.kron(sel.preselected, pointer.amplitudes)
    block = joint[: pointer.dim]  # <H| component in the system (x) pointer ordering
    probability = float(np.vdot(block, block).real)
    if probability < 1e-24:
        raise DegeneratePostselectionError(
            f"oracle postselection probability vanished at s={m.s}"
        )
    projected = StateVector(block / math.sqrt(probability), normalized=True)
    return projected, probability
