"""Finite-dimensional Hilbert spaces with labeled orthonormal bases.

Kets and operators are small dense numpy arrays tagged with a :class:`Basis`.
Two bases are the same when their label tuples are equal, so independently
built bases interoperate.

An :class:`OperatorMatrix` maps kets over ``basis`` (its domain) to kets over
``out_basis`` (its codomain).  For observables and projectors the two
coincide; a beam splitter uses them to take arm labels to detector-port
labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BasisMismatch, ZeroVector

TOL = 1e-10
TENSOR_SEP = "⊗"


@dataclass(frozen=True)
class Basis:
    labels: tuple[str, ...]

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise ValueError("a basis needs at least one label")
        if any(not isinstance(lab, str) or not lab for lab in labels):
            raise ValueError(f"basis labels must be non-empty strings: {labels!r}")
        if len(set(labels)) != len(labels):
            raise ValueError(f"basis labels must be unique: {labels!r}")
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"label {label!r} not in basis {self.labels}") from None

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes and matrix entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """A ket: complex amplitudes over a labeled basis.  Normalization is not assumed."""

    basis: Basis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.basis.dim,):
            raise ValueError(
                f"expected {self.basis.dim} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_dict(cls, basis: Basis, coeffs: Mapping[str, complex]) -> StateVector:
        amps = np.zeros(basis.dim, dtype=complex)
        for label, c in coeffs.items():
            amps[basis.index(label)] += c
        return cls(basis, amps)

    @classmethod
    def basis_ket(cls, basis: Basis, label: str) -> StateVector:
        return cls.from_dict(basis, {label: 1.0})

    def __getitem__(self, label: str) -> complex:
        return complex(self.amplitudes[self.basis.index(label)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_dict(self) -> dict[str, complex]:
        return {lab: complex(a) for lab, a in zip(self.basis.labels, self.amplitudes)}

    def __mul__(self, c: complex) -> StateVector:
        return StateVector(self.basis, self.amplitudes * c)

    __rmul__ = __mul__

    def __add__(self, other: StateVector) -> StateVector:
        _check_same(self.basis, other.basis)
        return StateVector(self.basis, self.amplitudes + other.amplitudes)

    def __sub__(self, other: StateVector) -> StateVector:
        return self + (-1.0) * other


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A square complex matrix from kets over ``basis`` to kets over ``out_basis``."""

    basis: Basis
    entries: np.ndarray
    out_basis: Basis = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.out_basis is None:
            object.__setattr__(self, "out_basis", self.basis)
        if self.out_basis.dim != self.basis.dim:
            raise ValueError("operator domain and codomain must have equal dimension")
        m = _frozen(self.entries)
        n = self.basis.dim
        if m.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got shape {m.shape}")
        object.__setattr__(self, "entries", m)

    @classmethod
    def identity(cls, basis: Basis) -> OperatorMatrix:
        return cls(basis, np.eye(basis.dim))

    @classmethod
    def from_map(cls, basis: Basis, out_basis: Basis,
                 images: Mapping[str, Mapping[str, complex]]) -> OperatorMatrix:
        """Build an operator column by column: ``images[x]`` is the image of ``|x>``."""
        m = np.zeros((out_basis.dim, basis.dim), dtype=complex)
        for src, image in images.items():
            j = basis.index(src)
            for dst, c in image.items():
                m[out_basis.index(dst), j] += c
        return cls(basis, m, out_basis)

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def is_endomorphism(self) -> bool:
        return self.basis == self.out_basis

    def element(self, row: str, col: str) -> complex:
        return complex(self.entries[self.out_basis.index(row), self.basis.index(col)])

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return apply(self, other)
        return compose(self, other)

    def __add__(self, other: OperatorMatrix) -> OperatorMatrix:
        return add(self, other)

    def __sub__(self, other: OperatorMatrix) -> OperatorMatrix:
        return add(self, scale(other, -1.0))

    def __mul__(self, c: complex) -> OperatorMatrix:
        return scale(self, c)

    __rmul__ = __mul__

    @property
    def H(self) -> OperatorMatrix:
        return adjoint(self)


def _check_same(a: Basis, b: Basis) -> None:
    if a != b:
        raise BasisMismatch(f"basis {a.labels} does not match {b.labels}")


def inner(bra: StateVector, ket: StateVector) -> complex:
    """Return <bra|ket>, conjugate-linear in ``bra``."""
    _check_same(bra.basis, ket.basis)
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def normalize(s: StateVector, tol: float = TOL) -> StateVector:
    n = s.norm()
    if n < tol:
        raise ZeroVector(f"cannot normalize a vector of norm {n:.3g}")
    return StateVector(s.basis, s.amplitudes / n)


def tensor_label(a: str, b: str) -> str:
    return f"{a}{TENSOR_SEP}{b}"


def tensor_basis(a: Basis, b: Basis) -> Basis:
    return Basis(tensor_label(x, y) for x in a.labels for y in b.labels)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product ket with labels ``"x⊗y"`` in row-major (a-label, b-label) order."""
    return StateVector(tensor_basis(a.basis, b.basis), np.kron(a.amplitudes, b.amplitudes))


def tensor_op(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(tensor_basis(a.basis, b.basis),
                          np.kron(a.entries, b.entries),
                          tensor_basis(a.out_basis, b.out_basis))


def apply(u: OperatorMatrix, s: StateVector) -> StateVector:
    _check_same(u.basis, s.basis)
    return StateVector(u.out_basis, u.entries @ s.amplitudes)


def adjoint(a: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(a.out_basis, a.entries.conj().T, a.basis)


def compose(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """Return the product ``a·b`` (apply ``b`` first)."""
    _check_same(a.basis, b.out_basis)
    return OperatorMatrix(b.basis, a.entries @ b.entries, a.out_basis)


def add(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    _check_same(a.basis, b.basis)
    _check_same(a.out_basis, b.out_basis)
    return OperatorMatrix(a.basis, a.entries + b.entries, a.out_basis)


def scale(a: OperatorMatrix, c: complex) -> OperatorMatrix:
    return OperatorMatrix(a.basis, a.entries * c, a.out_basis)


def outer(ket: StateVector, bra: StateVector) -> OperatorMatrix:
    """Return |ket><bra| as an operator from ``bra.basis`` to ``ket.basis``."""
    return OperatorMatrix(bra.basis, np.outer(ket.amplitudes, bra.amplitudes.conj()), ket.basis)


def projector_onto(s: StateVector, tol: float = TOL) -> OperatorMatrix:
    """Return |s><s| / <s|s>."""
    u = normalize(s, tol)
    return outer(u, u)


def projector(basis: Basis, labels: str | Sequence[str]) -> OperatorMatrix:
    """Number operator summing |x><x| over the given basis labels."""
    if isinstance(labels, str):
        labels = [labels]
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    for lab in labels:
        i = basis.index(lab)
        m[i, i] = 1.0
    return OperatorMatrix(basis, m)


def max_deviation(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) if np.size(a) else 0.0


def is_unitary(u: OperatorMatrix, tol: float = TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = u.entries
    return max_deviation(m.conj().T @ m, np.eye(u.dim)) <= tol


def is_hermitian(a: OperatorMatrix, tol: float = TOL) -> bool:
    return a.is_endomorphism and max_deviation(a.entries, a.entries.conj().T) <= tol


def is_projector(a: OperatorMatrix, tol: float = TOL) -> bool:
    return is_hermitian(a, tol) and max_deviation(a.entries @ a.entries, a.entries) <= tol
