"""Truncated Fock-space core: states, ladder/quadrature operators,
displacement matrices, and adaptive truncation control.

Conventions: basis states are |0>..|dim-1>, amplitudes are complex128
ndarrays, operators are dense complex (dim, dim) ndarrays.  All values
are immutable after construction and every function is pure, so
everything here is safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    InvalidDimensionError,
    InvalidParameterError,
    TruncationError,
)

TWO_PI = 2.0 * math.pi

#: default cap for adaptive truncation; dense matrices stay desk-sized
DIM_CAP = 4096

#: default pre-normalization tail mass tolerated by state constructors
TAIL_TOL = 1e-9


def _check_dim(dim: int) -> int:
    if not isinstance(dim, (int, np.integer)) or dim < 2:
        raise InvalidDimensionError(f"Fock dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


@dataclass(frozen=True)
class CoherentParams:
    """Coherent amplitude alpha = r * exp(i*theta), stored in polar form.

    r must be nonnegative; theta is reduced to [0, 2*pi).
    """

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise InvalidParameterError(f"coherent modulus must be >= 0, got {self.r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @property
    def alpha(self) -> complex:
        return self.r * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def mod_sq(self) -> float:
        return self.r * self.r


@dataclass(frozen=True)
class StateVector:
    """Finite complex amplitude list over the Fock basis.

    The ``normalized`` flag is a promise checked at construction:
    if set, the squared amplitudes must sum to 1 within 1e-12.
    """

    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if amps.ndim != 1:
            raise InvalidParameterError("state amplitudes must be one-dimensional")
        _check_dim(amps.shape[0])
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized:
            total = float(np.sum(np.abs(amps) ** 2))
            if abs(total - 1.0) > 1e-12:
                raise InvalidParameterError(
                    f"state flagged normalized but sum |c_n|^2 = {total!r}"
                )

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


def fock_state(n: int, dim: int) -> StateVector:
    """Number state |n> in a dim-dimensional basis."""
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidParameterError(f"Fock index {n} outside basis of dimension {dim}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[n] = 1.0
    return StateVector(amps, normalized=True)


def ladder_ops(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation matrices (a, a_dagger) with a[n-1, n] = sqrt(n)."""
    dim = _check_dim(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=np.float64)), k=1).astype(np.complex128)
    return a, a.conj().T


def number_op(dim: int) -> np.ndarray:
    """Number operator a_dagger @ a (diagonal, exact)."""
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=np.float64)).astype(np.complex128)


def quadrature_ops(dim: int, sigma: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Position and momentum quadratures X = sigma*(a_dag + a), P = i/(2 sigma)*(a_dag - a)."""
    if sigma <= 0:
        raise InvalidParameterError(f"beam width sigma must be > 0, got {sigma}")
    a, adag = ladder_ops(dim)
    x = sigma * (adag + a)
    p = (0.5j / sigma) * (adag - a)
    return x, p


def phase_quadrature(dim: int, phi: float) -> np.ndarray:
    """Rotated quadrature X_phi = (a e^{-i phi} + a_dag e^{i phi}) / sqrt(2)."""
    a, adag = ladder_ops(dim)
    ph = complex(math.cos(phi), math.sin(phi))
    return (a * ph.conjugate() + adag * ph) / math.sqrt(2.0)


def spacs_gamma_sq(mod_sq: float) -> float:
    """Squared normalization constant of a_dag|alpha>: 1 / (1 + |alpha|^2)."""
    return 1.0 / (1.0 + mod_sq)


def _coherent_amplitudes(alpha: CoherentParams, dim: int) -> np.ndarray:
    """Raw truncated amplitudes exp(-r^2/2) alpha^n / sqrt(n!), in log space."""
    if alpha.r == 0.0:
        amps = np.zeros(dim, dtype=np.complex128)
        amps[0] = 1.0
        return amps
    n = np.arange(dim, dtype=np.float64)
    logmag = -0.5 * alpha.r * alpha.r + n * math.log(alpha.r) - 0.5 * gammaln(n + 1.0)
    return np.exp(logmag) * np.exp(1j * n * alpha.theta)


def coherent_state(
    alpha: CoherentParams, dim: int, tail_tol: float | None = TAIL_TOL
) -> StateVector:
    """Coherent state |alpha>, renormalized over the truncated basis.

    Raises TruncationError when the discarded tail mass exceeds tail_tol;
    pass tail_tol=None to skip the check.
    """
    dim = _check_dim(dim)
    raw = _coherent_amplitudes(alpha, dim)
    kept = float(np.sum(np.abs(raw) ** 2))
    tail = max(0.0, 1.0 - kept)
    if tail_tol is not None and tail > tail_tol:
        raise TruncationError(
            f"coherent state r={alpha.r} keeps tail mass {tail:.3e} at dim={dim} "
            f"(tolerance {tail_tol:.3e})"
        )
    return StateVector(raw / math.sqrt(kept), normalized=True)


def spacs_state(
    alpha: CoherentParams, dim: int, tail_tol: float | None = TAIL_TOL
) -> StateVector:
    """Normalized single-photon-added coherent state a_dag|alpha>.

    The exact normalization constant is (1 + |alpha|^2)^(-1/2); the
    returned amplitudes are normalized numerically over the truncated
    basis, so that constant never enters the numerics.  c_0 = 0 always.
    """
    dim = _check_dim(dim)
    raw = _coherent_amplitudes(alpha, dim)
    added = np.zeros(dim, dtype=np.complex128)
    added[1:] = np.sqrt(np.arange(1, dim, dtype=np.float64)) * raw[:-1]
    kept = float(np.sum(np.abs(added) ** 2))
    # exact norm^2 of a_dag|alpha> is 1 + |alpha|^2
    tail = max(0.0, 1.0 - kept / (1.0 + alpha.mod_sq))
    if tail_tol is not None and tail > tail_tol:
        raise TruncationError(
            f"photon-added coherent state r={alpha.r} keeps tail mass {tail:.3e} "
            f"at dim={dim} (tolerance {tail_tol:.3e})"
        )
    return StateVector(added / math.sqrt(kept), normalized=True)


def _fill_displacement_band(out: np.ndarray, beta: complex, lower: bool) -> None:
    """Fill one triangle of <m|D(beta)|n> via the scaled Laguerre recurrence.

    Matrix elements on the k-th diagonal are E_n = sqrt(n!/(n+k)!) beta^k
    e^{-x/2} L_n^{(k)}(x) with x = |beta|^2.  Folding the log-factorial
    prefactor into the three-term Laguerre recurrence keeps every
    intermediate bounded by 1, so no overflow or underflow-to-nan occurs
    at any dimension.
    """
    dim = out.shape[0]
    x = abs(beta) ** 2
    k = np.arange(dim, dtype=np.float64)
    logmag = -0.5 * x - 0.5 * gammaln(k + 1.0) + k * math.log(abs(beta))
    m_prev = np.exp(logmag) * np.exp(1j * k * np.angle(beta))  # E_0 over diagonals
    m_prevprev = np.zeros(dim, dtype=np.complex128)
    if lower:
        out[:, 0] = m_prev
    else:
        out[0, 1:] = m_prev[1:]
    for j in range(1, dim):
        coeff1 = 2.0 * j - 1.0 + k - x
        coeff2 = math.sqrt(j - 1.0) * np.sqrt(j + k - 1.0)
        denom = math.sqrt(j) * np.sqrt(j + k)
        m_new = (coeff1 * m_prev - coeff2 * m_prevprev) / denom
        m_prevprev, m_prev = m_prev, m_new
        if lower:
            out[j:, j] = m_new[: dim - j]
        elif j + 1 < dim:
            out[j, j + 1 :] = m_new[1 : dim - j]


@lru_cache(maxsize=128)
def _displacement_readonly(beta: complex, dim: int) -> np.ndarray:
    """Cached, write-protected displacement matrix shared by hot paths."""
    if beta == 0:
        out = np.eye(dim, dtype=np.complex128)
    else:
        out = np.zeros((dim, dim), dtype=np.complex128)
        _fill_displacement_band(out, beta, lower=True)
        # upper triangle: <m|D(beta)|n> for m < n equals the lower-triangle
        # formula evaluated at -conj(beta) with the roles of m, n swapped
        _fill_displacement_band(out, -beta.conjugate(), lower=False)
    out.setflags(write=False)
    return out


def displacement_matrix(beta: complex, dim: int) -> np.ndarray:
    """Dense matrix of D(beta) = exp(beta a_dag - beta* a) on the truncated basis.

    Built from the analytic matrix-element formula, never from a matrix
    exponential.  D(0) is the exact identity.  Accuracy degrades
    gracefully with truncation; gate with unitarity_defect when in doubt.
    """
    dim = _check_dim(dim)
    return _displacement_readonly(complex(beta), dim).copy()


def unitarity_defect(matrix: np.ndarray) -> float:
    """max |U^dag U - I| over the upper-left half block.

    Truncation artifacts concentrate near the basis edge; the retained
    half block of an adequately dimensioned displacement matrix is
    unitary to near machine precision.
    """
    dim = matrix.shape[0]
    half = dim // 2
    defect = matrix.conj().T @ matrix - np.eye(dim, dtype=np.complex128)
    return float(np.max(np.abs(defect[:half, :half])))


def _displaced_spacs_profile(alpha: CoherentParams, s: float, dim: int) -> tuple[float, float]:
    """(retained mass, mean photon number) of D(s) a_dag|alpha> at this truncation."""
    psi = spacs_state(alpha, dim, tail_tol=None)
    shifted = np.einsum("ij,j->i", _displacement_readonly(complex(s), dim), psi.amplitudes)
    probs = np.abs(shifted) ** 2
    mass = float(np.sum(probs))
    mean = float(np.sum(np.arange(dim) * probs)) / mass
    return mass, mean


@lru_cache(maxsize=4096)
def adaptive_dim(
    alpha: CoherentParams, s: float, tol: float = 1e-9, cap: int = DIM_CAP
) -> int:
    """Smallest probed dimension whose doubling moves the displaced-state
    observables (retained mass and mean photon number) by less than tol.

    Starts from floor((|alpha|+s)^2 + 10(|alpha|+s) + 20) and doubles.
    The probe displaces by the full s, which over-covers the two +-s/2
    branches used downstream.
    """
    if tol <= 0:
        raise InvalidParameterError(f"tolerance must be > 0, got {tol}")
    if s < 0:
        raise InvalidParameterError(f"coupling strength must be >= 0, got {s}")
    reach = alpha.r + s
    dim = int(math.floor(reach * reach + 10.0 * reach + 20.0))
    while True:
        if dim > cap:
            raise ConvergenceError(
                f"adaptive truncation for r={alpha.r}, s={s} exceeded cap {cap}"
            )
        mass_lo, mean_lo = _displaced_spacs_profile(alpha, s, dim)
        mass_hi, mean_hi = _displaced_spacs_profile(alpha, s, 2 * dim)
        if abs(mass_hi - mass_lo) <= tol and abs(mean_hi - mean_lo) <= tol * max(1.0, mean_hi):
            return dim
        dim *= 2


def inner_product(bra: StateVector, ket: StateVector) -> complex:
    """<bra|ket>, conjugate-linear in the first argument."""
    if bra.dim != ket.dim:
        raise DimensionMismatchError(f"dimensions differ: {bra.dim} vs {ket.dim}")
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def norm(state: StateVector) -> float:
    return float(np.linalg.norm(state.amplitudes))


def normalize(state: StateVector) -> StateVector:
    n = norm(state)
    if n < 1e-150:
        raise InvalidParameterError("cannot normalize a zero state vector")
    return StateVector(state.amplitudes / n, normalized=True)


def apply(op: np.ndarray, state: StateVector) -> StateVector:
    """op @ state as a new (unnormalized) StateVector.

    Uses einsum rather than BLAS so results are bit-identical across
    thread counts.
    """
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionMismatchError(f"operator must be square, got shape {op.shape}")
    if op.shape[1] != state.dim:
        raise DimensionMismatchError(
            f"operator dimension {op.shape[1]} does not match state dimension {state.dim}"
        )
    amps = np.einsum("ij,j->i", np.asarray(op, dtype=np.complex128), state.amplitudes)
    return StateVector(amps, normalized=False)


def expectation(op: np.ndarray, state: StateVector) -> complex:
    """<state|op|state>."""
    return complex(np.vdot(state.amplitudes, apply(op, state).amplitudes))
