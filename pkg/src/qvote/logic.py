"""Quantum logical connectives as channels on density operators.

The conjunction of two qubits adjoins a |0> ancilla, conjugates by the
Toffoli permutation, and traces out both inputs; the ancilla carries the
result.  Negation conjugates by Pauli X.  Disjunction is the De Morgan
dual: flip both inputs, conjoin, flip the result.  Defined this way the
connectives accept entangled two-qubit inputs, not just products.

``and_fold`` / ``or_fold`` extend the binary connectives to any number of
operands by folding left to right.  An operand may itself span several
qubits (an entangled group); the fold keeps a group's unconsumed qubits
live in its workspace and applies each channel step to the two designated
qubits only, so the workspace never holds more than the accumulator, the
pending group qubits, and one ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .density import (
    DensityOperator,
    apply_unitary,
    hermitize,
    partial_trace_matrix,
    qubit_cap,
)
from .errors import ArityError, CapacityError, DomainError, ShapeError, ValidationError

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)

_KET0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=np.complex128)


def _toffoli_permutation(n: int, c1: int, c2: int, t: int) -> np.ndarray:
    """Basis permutation of the Toffoli gate on qubits (c1, c2, t), 0-based,
    embedded in an n-qubit register: flips bit t where bits c1 and c2 are 1."""
    idx = np.arange(1 << n)
    b1 = (idx >> (n - 1 - c1)) & 1
    b2 = (idx >> (n - 1 - c2)) & 1
    return idx ^ ((b1 & b2) << (n - 1 - t))


def _x_permutation(n: int, q: int) -> np.ndarray:
    return np.arange(1 << n) ^ (1 << (n - 1 - q))


def _permute_state(matrix: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """Conjugate a matrix by the permutation unitary U|b> = |perm[b]>."""
    out = np.empty_like(matrix)
    out[np.ix_(perm, perm)] = matrix
    return out


def _permutation_matrix(perm: np.ndarray) -> np.ndarray:
    mat = np.zeros((perm.size, perm.size), dtype=np.complex128)
    mat[perm, np.arange(perm.size)] = 1.0
    return mat


#: The 8x8 Toffoli permutation unitary: |x1,x2,x3> -> |x1, x2, x1*x2 XOR x3>.
TOFFOLI = _permutation_matrix(_toffoli_permutation(3, 0, 1, 2))
TOFFOLI.setflags(write=False)


def and_channel_matrix(matrix: np.ndarray) -> np.ndarray:
    """Raw conjunction channel on a 4x4 matrix: adjoin the |0><0| ancilla,
    conjugate by Toffoli, trace out the two inputs.

    Works on arbitrary (not necessarily Hermitian) 4x4 matrices so the
    channel's linear extension can be probed term by term.
    """
    if matrix.shape != (4, 4):
        raise ShapeError(f"conjunction channel needs a 4x4 matrix, got {matrix.shape}")
    work = np.kron(matrix, _KET0)
    work = _permute_state(work, _toffoli_permutation(3, 0, 1, 2))
    return partial_trace_matrix(work, 3, (0, 1))


def quantum_and(joint: DensityOperator) -> DensityOperator:
    """Conjunction of a two-qubit state (product or entangled), one qubit out."""
    if joint.num_qubits != 2:
        raise ShapeError(f"conjunction takes a 2-qubit state, got {joint.num_qubits}")
    return DensityOperator(hermitize(and_channel_matrix(joint.matrix)))


def quantum_not(rho: DensityOperator) -> DensityOperator:
    """Negation of a single-qubit state: X rho X."""
    if rho.num_qubits != 1:
        raise ShapeError(f"negation takes a 1-qubit state, got {rho.num_qubits}")
    return apply_unitary(rho, PAULI_X)


def quantum_or(joint: DensityOperator) -> DensityOperator:
    """Disjunction via De Morgan: flip both inputs, conjoin, flip the result."""
    if joint.num_qubits != 2:
        raise ShapeError(f"disjunction takes a 2-qubit state, got {joint.num_qubits}")
    flipped = apply_unitary(joint, np.kron(PAULI_X, PAULI_X))
    return quantum_not(quantum_and(flipped))


@dataclass(frozen=True)
class GroupSlot:
    """Reference to one qubit of a multi-qubit operand group in a fold.

    ``key`` identifies the group in the fold's group mapping and
    ``position`` is the 0-based qubit within that group.
    """

    key: object
    position: int


FoldElement = Union[DensityOperator, GroupSlot]

_ACC = "acc"


class _Workspace:
    """Mutable fold state: the live matrix plus a label per live qubit."""

    def __init__(self, connective: str) -> None:
        self.connective = connective
        self.matrix: np.ndarray | None = None
        self.labels: list[object] = []

    def attach(self, matrix: np.ndarray, labels: list[object]) -> None:
        new_total = len(self.labels) + len(labels)
        if new_total > qubit_cap():
            raise CapacityError(
                f"fold workspace needs {new_total} qubits, cap is {qubit_cap()}"
            )
        if self.matrix is None:
            self.matrix = np.array(matrix, dtype=np.complex128)
        else:
            self.matrix = np.kron(self.matrix, matrix)
        self.labels.extend(labels)

    def merge(self, label: object) -> None:
        """Fold the labelled qubit into the accumulator (or make it the
        accumulator when none exists yet)."""
        j = self.labels.index(label)
        if _ACC not in self.labels:
            self.labels[j] = _ACC
            return
        i = self.labels.index(_ACC)
        n = len(self.labels)
        mat = self.matrix
        if self.connective == "or":
            mat = _permute_state(mat, _x_permutation(n, i))
            mat = _permute_state(mat, _x_permutation(n, j))
        mat = np.kron(mat, _KET0)
        mat = _permute_state(mat, _toffoli_permutation(n + 1, i, j, n))
        mat = partial_trace_matrix(mat, n + 1, (i, j))
        # the ancilla survives as the last qubit and becomes the accumulator
        self.labels = [l for k, l in enumerate(self.labels) if k not in (i, j)]
        self.labels.append(_ACC)
        if self.connective == "or":
            mat = _permute_state(mat, _x_permutation(len(self.labels), len(self.labels) - 1))
        self.matrix = hermitize(mat)

    def result(self) -> DensityOperator:
        if self.matrix is None:
            raise ArityError("fold needs at least one operand")
        leftovers = [l for l in self.labels if l is not _ACC]
        if leftovers:
            raise ValidationError(
                f"fold left {len(leftovers)} group qubit(s) unconsumed: {leftovers!r}"
            )
        return DensityOperator(self.matrix)


def fold_connective(
    connective: str,
    elements: Sequence[FoldElement],
    groups: Mapping[object, DensityOperator] | None = None,
) -> DensityOperator:
    """Left-fold a connective over ordered elements.

    ``elements`` mixes single-qubit :class:`DensityOperator` operands with
    :class:`GroupSlot` references into ``groups``.  A group's state is
    tensored into the workspace when its first slot is consumed; its other
    slots may be consumed at any later position, so entangled ballots whose
    qubits are not adjacent in the fold order still work.  Every slot of an
    opened group must be consumed exactly once.
    """
    if connective not in ("and", "or"):
        raise DomainError(f"unknown connective {connective!r}")
    groups = dict(groups or {})
    if not elements:
        raise ArityError("fold needs at least one operand")
    ws = _Workspace(connective)
    fresh = 0
    opened: set[object] = set()
    for element in elements:
        if isinstance(element, GroupSlot):
            if element.key not in groups:
                raise ValidationError(f"fold references unknown group {element.key!r}")
            group = groups[element.key]
            if not 0 <= element.position < group.num_qubits:
                raise ShapeError(
                    f"group {element.key!r} has {group.num_qubits} qubit(s), "
                    f"position {element.position} is invalid"
                )
            if element.key not in opened:
                opened.add(element.key)
                ws.attach(
                    group.matrix,
                    [(element.key, p) for p in range(group.num_qubits)],
                )
            label = (element.key, element.position)
            if label not in ws.labels:
                raise ValidationError(
                    f"qubit {element.position} of group {element.key!r} "
                    "was already consumed"
                )
            ws.merge(label)
        else:
            if element.num_qubits != 1:
                raise ShapeError(
                    "inline fold operands must be single-qubit; pass wider "
                    "states through the group mapping"
                )
            token = ("fresh", fresh)
            fresh += 1
            ws.attach(element.matrix, [token])
            ws.merge(token)
    return ws.result()


def _fold_sequence(connective: str, operands: Sequence[DensityOperator]) -> DensityOperator:
    ops = list(operands)
    if not ops:
        raise ArityError("fold needs at least one operand")
    if len(ops) == 1 and ops[0].num_qubits == 1:
        return ops[0]
    elements: list[FoldElement] = []
    groups: dict[object, DensityOperator] = {}
    for op in ops:
        if op.num_qubits == 1:
            elements.append(op)
        else:
            key = len(groups)
            groups[key] = op
            elements.extend(GroupSlot(key, p) for p in range(op.num_qubits))
    return fold_connective(connective, elements, groups)


def and_fold(operands: Sequence[DensityOperator]) -> DensityOperator:
    """Left fold of the conjunction over ordered operands.

    A single operand is returned unchanged.  Multi-qubit operands are
    treated as entangled groups whose qubits are consumed consecutively.
    """
    return _fold_sequence("and", operands)


def or_fold(operands: Sequence[DensityOperator]) -> DensityOperator:
    """Left fold of the disjunction over ordered operands; see ``and_fold``."""
    return _fold_sequence("or", operands)
