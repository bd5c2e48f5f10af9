"""Multi-qubit pure states: registers, basis kets, tensor products, superpositions."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

# A ket counts as normalized when |<v|v> - 1| stays below this.
NORMALIZATION_TOL = 1e-12


class RegisterMismatchError(ValueError):
    """Raised when two states or operators live on different registers."""


@dataclass(frozen=True)
class Register:
    """Ordered list of subsystem dimensions.

    Subsystem 0 is the most significant digit of the flat index: the basis
    state |i0 i1 ... i_{N-1}> sits at row-major position
    ``i0*d1*...*d_{N-1} + ... + i_{N-1}``.
    """

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise ValueError("a register needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise ValueError(f"subsystem dimensions must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def nsub(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return math.prod(self.dims)


def qubit_register(n: int) -> Register:
    """Register of n qubits."""
    if n < 1:
        raise ValueError(f"need at least one qubit, got {n}")
    return Register((2,) * n)


@dataclass(frozen=True, eq=False)
class Ket:
    """Dense complex amplitude vector over a register."""

    register: Register
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=np.complex128)
        if amp.ndim != 1:
            raise ValueError("amplitudes must be a flat vector")
        if amp.size != self.register.size:
            raise ValueError(
                f"amplitude count {amp.size} does not match register size "
                f"{self.register.size}"
            )
        if not np.all(np.isfinite(amp.real)) or not np.all(np.isfinite(amp.imag)):
            raise ValueError("amplitudes must be finite")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= NORMALIZATION_TOL

    def normalized(self) -> "Ket":
        n = self.norm()
        if n**2 < 1e-12:
            raise ValueError("cannot normalize a (near-)zero vector")
        return Ket(self.register, self.amplitudes / n)


@dataclass(frozen=True)
class SuperposCoeffs:
    """Coefficient pair (a, b) of a two-branch superposition a|psi> + b|phi>."""

    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if not (cmath.isfinite(a) and cmath.isfinite(b)):
            raise ValueError("superposition coefficients must be finite")
        if a == 0 and b == 0:
            raise ValueError("superposition coefficients cannot both vanish")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def abs_product(self) -> float:
        return abs(self.a) * abs(self.b)


def basis_ket(register: Register, indices: Sequence[int]) -> Ket:
    """Computational basis ket |i0 i1 ... i_{N-1}> with one label per subsystem."""
    labels = tuple(int(i) for i in indices)
    if len(labels) != register.nsub:
        raise ValueError(
            f"expected {register.nsub} basis labels, got {len(labels)}"
        )
    flat = 0
    for label, dim in zip(labels, register.dims):
        if not 0 <= label < dim:
            raise ValueError(f"basis label {label} out of range for dimension {dim}")
        flat = flat * dim + label
    amp = np.zeros(register.size, dtype=np.complex128)
    amp[flat] = 1.0
    return Ket(register, amp)


def tensor(left: Ket, right: Ket) -> Ket:
    """Tensor product; the result's register is the concatenation of the inputs'."""
    reg = Register(left.register.dims + right.register.dims)
    return Ket(reg, np.kron(left.amplitudes, right.amplitudes))


def superpose(
    coeffs: SuperposCoeffs,
    psi: Ket,
    phi: Ket,
    mode: Literal["raw", "renormalize"] = "raw",
) -> Ket:
    """Superposition a*psi + b*phi of two kets on the same register.

    Inputs are assumed unit-norm. In ``raw`` mode the result keeps its natural
    norm |a|^2 + |b|^2 + 2 Re(a* b <psi|phi>); ``renormalize`` rescales it to
    unit norm and fails when the branches cancel.
    """
    if psi.register != phi.register:
        raise RegisterMismatchError("superposed kets live on different registers")
    out = Ket(psi.register, coeffs.a * psi.amplitudes + coeffs.b * phi.amplitudes)
    if mode == "raw":
        return out
    if mode == "renormalize":
        if out.norm() ** 2 < 1e-12:
            raise ValueError("superposition has (near-)zero norm; cannot renormalize")
        return out.normalized()
    raise ValueError(f"unknown superposition mode {mode!r}")


def ghz(n: int, phi: float = 0.0, orthogonal: bool = False) -> Ket:
    """GHZ-type state (|0...0> + e^{i phi} |1...1>)/sqrt(2) on n qubits.

    With ``orthogonal`` set, the relative sign flips, giving the state
    orthogonal to the plain one for every n and phi.
    """
    if n < 2:
        raise ValueError(f"GHZ states need at least 2 qubits, got {n}")
    reg = qubit_register(n)
    zeros = basis_ket(reg, (0,) * n)
    ones = basis_ket(reg, (1,) * n)
    sign = -1.0 if orthogonal else 1.0
    coeffs = SuperposCoeffs(1 / math.sqrt(2), sign * cmath.exp(1j * phi) / math.sqrt(2))
    return superpose(coeffs, zeros, ones, mode="raw")


def overlap(psi: Ket, phi: Ket) -> complex:
    """Inner product <psi|phi>, conjugating the first argument."""
    if psi.register != phi.register:
        raise RegisterMismatchError("overlap of kets on different registers")
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def density(psi: Ket):
    """Outer product |psi><psi| as a Hermitian operator."""
    from .linops import HermOp

    amp = psi.amplitudes
    return HermOp(psi.register, np.outer(amp, amp.conj()))
