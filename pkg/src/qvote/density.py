"""Exact density-operator algebra for small qubit registers.

Everything is a dense ``complex128`` matrix.  Qubits are numbered 1..k in
public arguments, and qubit 1 owns the most significant bit of a basis
index, so the basis ket |x1 x2 ... xk> sits at index
``x1*2**(k-1) + x2*2**(k-2) + ... + xk``.

Tolerance ledger, shared by the whole package:

* structural checks (hermiticity, unit trace, normalization, unitarity,
  projector idempotence): 1e-9
* positive semidefiniteness: eigenvalue floor -1e-8, checked only by
  :meth:`DensityOperator.validate_psd` because it costs an
  eigendecomposition
* probabilities: an imaginary residue above 1e-6 aborts with
  :class:`NumericalCorruptionError`; anything smaller is discarded and the
  real part is clamped to [0, 1]

All values are immutable after construction and all operations are pure
functions, so instances may be shared freely between threads.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapacityError,
    DomainError,
    NormalizationError,
    NumericalCorruptionError,
    ShapeError,
    ValidationError,
)

STRUCTURAL_TOL = 1e-9
PSD_TOL = 1e-8
IMAG_ABORT_TOL = 1e-6

DEFAULT_QUBIT_CAP = 12

_qubit_cap = DEFAULT_QUBIT_CAP


def qubit_cap() -> int:
    """Current cap on the width of any constructed register."""
    return _qubit_cap


def set_qubit_cap(cap: int) -> None:
    """Set the register-width cap.  Process-wide; configure before use."""
    global _qubit_cap
    cap = int(cap)
    if cap < 1:
        raise DomainError("qubit cap must be a positive integer")
    _qubit_cap = cap


def _qubits_for_dim(dim: int, what: str) -> int:
    k = (dim - 1).bit_length()
    if dim < 2 or (1 << k) != dim:
        raise ShapeError(f"{what} dimension {dim} is not a power of two >= 2")
    return k


def _as_complex_matrix(value, what: str) -> np.ndarray:
    mat = np.array(value, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ShapeError(f"{what} must be a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValidationError(f"{what} contains non-finite entries")
    return mat


class PureState:
    """Normalized amplitude vector over one or more qubits."""

    __slots__ = ("_amplitudes",)

    def __init__(self, amplitudes) -> None:
        vec = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        _qubits_for_dim(vec.size, "state vector")
        if not np.all(np.isfinite(vec)):
            raise ValidationError("state vector contains non-finite entries")
        norm_sq = float(np.real(np.vdot(vec, vec)))
        if abs(norm_sq - 1.0) > STRUCTURAL_TOL:
            raise NormalizationError(
                f"state vector has squared norm {norm_sq!r}, expected 1"
            )
        vec.setflags(write=False)
        self._amplitudes = vec

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amplitudes

    @property
    def num_qubits(self) -> int:
        return self._amplitudes.size.bit_length() - 1

    def __repr__(self) -> str:
        return f"PureState({self._amplitudes.tolist()!r})"


class DensityOperator:
    """Hermitian, unit-trace matrix over k qubits.

    Positive semidefiniteness is not verified on construction (see module
    docstring); call :meth:`validate_psd` in verification paths.
    """

    __slots__ = ("_matrix", "_num_qubits")

    def __init__(self, matrix) -> None:
        mat = _as_complex_matrix(matrix, "density operator")
        self._num_qubits = _qubits_for_dim(mat.shape[0], "density operator")
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > STRUCTURAL_TOL:
            raise ValidationError(f"matrix is not Hermitian (residue {herm:.3e})")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > STRUCTURAL_TOL:
            raise ValidationError(f"matrix trace is {tr!r}, expected 1")
        mat.setflags(write=False)
        self._matrix = mat

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def num_qubits(self) -> int:
        return self._num_qubits

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self._matrix)[0])

    def validate_psd(self, tol: float = PSD_TOL) -> None:
        """Raise unless the minimum eigenvalue is >= -tol."""
        low = self.min_eigenvalue()
        if low < -tol:
            raise ValidationError(
                f"matrix is not positive semidefinite (minimum eigenvalue {low:.3e})"
            )

    def __repr__(self) -> str:
        return f"DensityOperator(<{self._num_qubits} qubit(s)>)"


class Projector:
    """Hermitian idempotent measurement operator."""

    __slots__ = ("_matrix", "_num_qubits")

    def __init__(self, matrix) -> None:
        mat = _as_complex_matrix(matrix, "projector")
        self._num_qubits = _qubits_for_dim(mat.shape[0], "projector")
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > STRUCTURAL_TOL:
            raise ValidationError(f"projector is not Hermitian (residue {herm:.3e})")
        idem = float(np.max(np.abs(mat @ mat - mat)))
        if idem > STRUCTURAL_TOL:
            raise ValidationError(f"projector is not idempotent (residue {idem:.3e})")
        mat.setflags(write=False)
        self._matrix = mat

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def num_qubits(self) -> int:
        return self._num_qubits

    def __repr__(self) -> str:
        return f"Projector(<{self._num_qubits} qubit(s)>)"


#: Single-qubit projectors onto |0> ("disagree") and |1> ("agree").
P0 = Projector([[1.0, 0.0], [0.0, 0.0]])
P1 = Projector([[0.0, 0.0], [0.0, 1.0]])


def basis_state(num_qubits: int, index: int) -> PureState:
    """Computational basis ket |index> on a register of the given width."""
    if num_qubits < 1:
        raise ShapeError("register needs at least one qubit")
    dim = 1 << num_qubits
    if not 0 <= index < dim:
        raise ShapeError(f"basis index {index} out of range for {num_qubits} qubit(s)")
    vec = np.zeros(dim, dtype=np.complex128)
    vec[index] = 1.0
    return PureState(vec)


def hermitize(matrix: np.ndarray) -> np.ndarray:
    """Average a matrix with its conjugate transpose."""
    return (matrix + matrix.conj().T) / 2.0


def pure_to_density(psi: PureState) -> DensityOperator:
    """Rank-1 density operator |psi><psi|."""
    vec = psi.amplitudes
    return DensityOperator(np.outer(vec, vec.conj()))


def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """Kronecker product; the qubits of ``a`` come first (most significant)."""
    total = a.num_qubits + b.num_qubits
    if total > qubit_cap():
        raise CapacityError(
            f"tensor result needs {total} qubits, cap is {qubit_cap()}"
        )
    return DensityOperator(np.kron(a.matrix, b.matrix))


def apply_unitary(rho: DensityOperator, unitary) -> DensityOperator:
    """Conjugate: U rho U+.  The result is re-hermitized to absorb rounding."""
    u = _as_complex_matrix(unitary, "unitary")
    if u.shape[0] != rho.matrix.shape[0]:
        raise ShapeError(
            f"unitary dimension {u.shape[0]} does not match state dimension "
            f"{rho.matrix.shape[0]}"
        )
    residue = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if residue > STRUCTURAL_TOL:
        raise ValidationError(f"matrix is not unitary (residue {residue:.3e})")
    return DensityOperator(hermitize(u @ rho.matrix @ u.conj().T))


def partial_trace_matrix(
    matrix: np.ndarray, num_qubits: int, traced_zero_based: Sequence[int]
) -> np.ndarray:
    """Partial trace on a raw matrix; remaining qubits keep their order.

    Indices are 0-based here; this is the arithmetic core shared by
    :func:`partial_trace` and the channel implementations, and it makes no
    hermiticity assumptions, so it can also be fed the non-Hermitian pieces
    of a linear decomposition.
    """
    dims = (2,) * num_qubits
    tensor_form = matrix.reshape(dims + dims)
    live = num_qubits
    for q in sorted(traced_zero_based, reverse=True):
        tensor_form = np.trace(tensor_form, axis1=q, axis2=q + live)
        live -= 1
    dim = 1 << live
    return tensor_form.reshape(dim, dim)


def partial_trace(rho: DensityOperator, traced_qubits: Iterable[int]) -> DensityOperator:
    """Discard the listed qubits (1-based; qubit 1 is the most significant)."""
    traced = sorted({int(q) for q in traced_qubits})
    k = rho.num_qubits
    for q in traced:
        if q < 1 or q > k:
            raise ShapeError(f"qubit index {q} out of range 1..{k}")
    if len(traced) == k:
        raise ShapeError("cannot trace out every qubit")
    if not traced:
        return rho
    reduced = partial_trace_matrix(rho.matrix, k, [q - 1 for q in traced])
    return DensityOperator(hermitize(reduced))


def projector_probability(rho: DensityOperator, projector: Projector) -> float:
    """Tr(P rho) as a real probability.

    Imaginary residue above 1e-6 raises :class:`NumericalCorruptionError`;
    smaller residue is discarded and the real part clamped to [0, 1].
    """
    if projector.matrix.shape != rho.matrix.shape:
        raise ShapeError(
            f"projector dimension {projector.matrix.shape[0]} does not match "
            f"state dimension {rho.matrix.shape[0]}"
        )
    value = complex(np.trace(projector.matrix @ rho.matrix))
    if abs(value.imag) > IMAG_ABORT_TOL:
        raise NumericalCorruptionError(
            f"probability has imaginary residue {value.imag:.3e}"
        )
    return min(1.0, max(0.0, float(value.real)))


def winning_probability(rho: DensityOperator) -> float:
    """Probability that a single-qubit state measures to "agree" (P1)."""
    if rho.num_qubits != 1:
        raise ShapeError("winning probability is defined on single-qubit states")
    return projector_probability(rho, P1)


def sample_outcome(rho: DensityOperator, projector: Projector, rng) -> int:
    """Draw one projective-measurement outcome: 1 with probability Tr(P rho).

    ``rng`` is a ``numpy.random.Generator``; exactly one uniform variate is
    consumed, so the outcome is a deterministic function of the rng state.
    """
    return int(rng.random() < projector_probability(rho, projector))


def random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-ish random unitary: QR of a complex Gaussian with phase-fixed R."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_pure_state(num_qubits: int, rng) -> PureState:
    """Uniform random pure state (normalized complex Gaussian vector)."""
    dim = 1 << num_qubits
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    vec /= np.linalg.norm(vec)
    return PureState(vec)


def random_density_operator(num_qubits: int, rng) -> DensityOperator:
    """Random mixed state: a random probability diagonal conjugated by a
    random unitary.  Reproducible for a seeded ``rng``."""
    dim = 1 << num_qubits
    probs = rng.random(dim)
    probs /= probs.sum()
    u = random_unitary(dim, rng)
    return DensityOperator(hermitize((u * probs) @ u.conj().T))
