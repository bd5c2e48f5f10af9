"""Dense Hermitian linear algebra: partial transpose, eigensolves, projectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import Ket, Register, RegisterMismatchError

HERMITICITY_TOL = 1e-10
# Eigenvalues within +/- this of zero never enter the negative subspace,
# so exact structural zeros (e.g. GHZ partial transposes) stay out of it.
NEG_EIGENSPACE_TOL = 1e-9
PSD_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class HermOp:
    """Dense Hermitian operator over a register."""

    register: Register
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        d = self.register.size
        if m.shape != (d, d):
            raise ValueError(
                f"matrix shape {m.shape} does not match register size {d}"
            )
        dev = float(np.max(np.abs(m - m.conj().T))) if d else 0.0
        if dev > HERMITICITY_TOL:
            raise ValueError(
                f"matrix is not Hermitian: max |M - M^dag| = {dev:.3e}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class Partition:
    """Subset of subsystem indices to transpose (the A side of a bipartition)."""

    transposed: frozenset[int]

    def __post_init__(self):
        object.__setattr__(
            self, "transposed", frozenset(int(i) for i in self.transposed)
        )

    def validate(self, register: Register, proper: bool = False) -> None:
        for i in self.transposed:
            if not 0 <= i < register.nsub:
                raise ValueError(
                    f"subsystem index {i} invalid for a {register.nsub}-part register"
                )
        if proper and (
            not self.transposed or len(self.transposed) == register.nsub
        ):
            raise ValueError(
                "entanglement tests need a nonempty proper subset of subsystems"
            )

    def complement(self, register: Register) -> "Partition":
        return Partition(frozenset(range(register.nsub)) - self.transposed)


def part(*indices: int) -> Partition:
    """Shorthand constructor for a partition."""
    return Partition(frozenset(indices))


def single_cut_partitions(register: Register) -> list[Partition]:
    """All single-subsystem-vs-rest bipartitions."""
    return [Partition(frozenset({i})) for i in range(register.nsub)]


@dataclass(frozen=True, eq=False)
class EigDecomp:
    """Ascending eigenvalues with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def identity(register: Register) -> HermOp:
    return HermOp(register, np.eye(register.size, dtype=np.complex128))


def partial_transpose(op: HermOp, partition: Partition) -> HermOp:
    """Transpose the subsystems in ``partition``, leaving the rest alone."""
    partition.validate(op.register)
    dims = op.register.dims
    n = op.register.nsub
    d = op.register.size
    tens = op.matrix.reshape(dims + dims)
    axes = list(range(2 * n))
    for i in partition.transposed:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    return HermOp(op.register, tens.transpose(axes).reshape(d, d))


def eig_hermitian(op: HermOp) -> EigDecomp:
    """Full eigendecomposition; eigenvalues ascend, eigenvectors are orthonormal."""
    w, v = np.linalg.eigh(op.matrix)
    return EigDecomp(w, v)


def operator_norm(op: HermOp) -> float:
    """Largest singular value; for Hermitian input this is max |eigenvalue|."""
    w = np.linalg.eigvalsh(op.matrix)
    return float(np.max(np.abs(w))) if w.size else 0.0


def is_psd(op: HermOp, tol: float = PSD_TOL) -> bool:
    """True when the smallest eigenvalue is >= -tol."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return bool(np.linalg.eigvalsh(op.matrix)[0] >= -tol)


def neg_eigenspace_projector(op: HermOp, tol: float = NEG_EIGENSPACE_TOL) -> HermOp:
    """Projector onto the span of eigenvectors with eigenvalue < -tol."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    w, v = np.linalg.eigh(op.matrix)
    cols = v[:, w < -tol]
    return HermOp(op.register, cols @ cols.conj().T)


def schmidt_decomposition(
    psi: Ket, partition: Partition
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Schmidt data of a pure state across a bipartition.

    Returns ``(coeffs, a_vectors, b_vectors)``: nonincreasing Schmidt
    coefficients and orthonormal vectors, columns of a_vectors living on the
    transposed side and columns of b_vectors on the rest, chosen so that
    ``psi == sum_i coeffs[i] * embed_product_vector(..., a_i, b_i)``.
    """
    partition.validate(psi.register, proper=True)
    perm, d_a, d_b = _split_axes(psi.register, partition)
    tens = psi.amplitudes.reshape(psi.register.dims).transpose(perm)
    mat = tens.reshape(d_a, d_b)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    return s, u, vh.T


def embed_product_vector(
    register: Register, partition: Partition, a_vec: np.ndarray, b_vec: np.ndarray
) -> np.ndarray:
    """Amplitudes of (a_vec on partition) x (b_vec on the rest) in register order."""
    perm, d_a, d_b = _split_axes(register, partition)
    prod = np.outer(np.asarray(a_vec), np.asarray(b_vec)).reshape(
        [register.dims[i] for i in perm]
    )
    inverse = np.argsort(perm)
    return prod.transpose(inverse).reshape(register.size)


def _split_axes(register: Register, partition: Partition):
    a_axes = sorted(partition.transposed)
    b_axes = [i for i in range(register.nsub) if i not in partition.transposed]
    d_a = int(np.prod([register.dims[i] for i in a_axes])) if a_axes else 1
    d_b = int(np.prod([register.dims[i] for i in b_axes])) if b_axes else 1
    return a_axes + b_axes, d_a, d_b


def expectation(op: HermOp, psi: Ket) -> complex:
    """Matrix element <psi|M|psi>."""
    if op.register != psi.register:
        raise RegisterMismatchError("operator and ket live on different registers")
    return complex(np.vdot(psi.amplitudes, op.matrix @ psi.amplitudes))


def matrix_element(op: HermOp, bra: Ket, ket: Ket) -> complex:
    """Matrix element <bra|M|ket>."""
    if not (op.register == bra.register == ket.register):
        raise RegisterMismatchError("operator and kets live on different registers")
    return complex(np.vdot(bra.amplitudes, op.matrix @ ket.amplitudes))
