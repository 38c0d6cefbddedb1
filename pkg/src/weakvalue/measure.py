"""Pre/post-selected measurement quantities.

Weak values, Born-rule statistics, ABL conditional probabilities for a strong
intermediate measurement, and the algebraic conversions between a projector's
weak value and its ABL probability.

All functions accept unnormalized kets; pre- and post-selected states are
normalized internally before any threshold is applied, so results are
invariant under rescaling either state by a nonzero complex number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import (DegenerateInput, InvalidSpectrum, NoConsistentHistory,
                     NotHermitian, NotUnitary, PostSelectionOrthogonal)
from .hilbert import (TOL, Basis, OperatorMatrix, StateVector, apply, inner,
                      is_hermitian, is_unitary, max_deviation, normalize)
from .jacobi import jacobi_eigh

# threshold on |<f|U|in>| for unit-normalized pre/post states
EPS = 1e-12
EIGEN_MERGE_GAP = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Spectral decomposition ``O = sum_k o_k P_k`` of a Hermitian observable.

    Construction validates that the projectors are Hermitian, idempotent,
    mutually orthogonal and complete, and that eigenvalues are distinct.
    """

    pairs: tuple[tuple[float, OperatorMatrix], ...]
    tol: float = TOL

    def __post_init__(self):
        pairs = tuple((float(o), p) for o, p in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise InvalidSpectrum("spectral data needs at least one eigenvalue")
        basis = pairs[0][1].basis
        tol = self.tol
        total = np.zeros((basis.dim, basis.dim), dtype=complex)
        for i, (o, p) in enumerate(pairs):
            if p.basis != basis or not p.is_endomorphism:
                raise InvalidSpectrum("all projectors must act on one basis")
            m = p.entries
            if max_deviation(m, m.conj().T) > tol or max_deviation(m @ m, m) > tol:
                raise InvalidSpectrum(f"entry for eigenvalue {o} is not a projector")
            if np.trace(m).real < 0.5:
                raise InvalidSpectrum(f"projector for eigenvalue {o} is zero")
            for o2, p2 in pairs[i + 1:]:
                if o2 == o:
                    raise InvalidSpectrum(f"eigenvalue {o} listed twice")
                if max_deviation(m @ p2.entries, 0.0) > tol:
                    raise InvalidSpectrum(f"projectors for {o} and {o2} overlap")
            total += m
        if max_deviation(total, np.eye(basis.dim)) > tol:
            raise InvalidSpectrum("projectors do not sum to the identity")

    @classmethod
    def for_projector(cls, p: OperatorMatrix) -> SpectralData:
        """Two-outcome data ``{1: P, 0: 1 - P}``; an empty branch is dropped."""
        pairs = [(1.0, p)]
        rest = OperatorMatrix.identity(p.basis) - p
        if np.trace(rest.entries).real > 0.5:
            pairs.append((0.0, rest))
        return cls(tuple(pairs))

    @property
    def basis(self) -> Basis:
        return self.pairs[0][1].basis

    @property
    def eigenvalues(self) -> tuple[float, ...]:
        return tuple(o for o, _ in self.pairs)

    @property
    def projectors(self) -> tuple[OperatorMatrix, ...]:
        return tuple(p for _, p in self.pairs)

    def observable(self) -> OperatorMatrix:
        m = sum(o * p.entries for o, p in self.pairs)
        return OperatorMatrix(self.basis, m)


@dataclass(frozen=True, eq=False)
class PrePost:
    """Pre-selected state, post-selected state and the evolution between them.

    ``evolution`` runs from the intermediate measurement to post-selection.
    It maps kets over ``pre.basis`` to kets over ``post.basis`` and defaults
    to the identity.
    """

    pre: StateVector
    post: StateVector
    evolution: OperatorMatrix = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.evolution is None:
            object.__setattr__(self, "evolution", OperatorMatrix.identity(self.pre.basis))
        u = self.evolution
        if u.basis != self.pre.basis or u.out_basis != self.post.basis:
            raise NotUnitary(
                f"evolution {u.basis.labels} -> {u.out_basis.labels} does not connect "
                f"pre {self.pre.basis.labels} to post {self.post.basis.labels}")
        if not is_unitary(u, TOL):
            raise NotUnitary("evolution is not unitary within 1e-10")

    @property
    def basis(self) -> Basis:
        return self.pre.basis

    def amplitude(self, op: OperatorMatrix | None = None) -> complex:
        """Return ``<f|U·op|in>`` for unit-normalized pre and post states."""
        pre = normalize(self.pre)
        if op is not None:
            pre = apply(op, pre)
        return inner(normalize(self.post), apply(self.evolution, pre))


@dataclass(frozen=True)
class ABLDistribution:
    entries: tuple[tuple[float, float], ...]

    def prob(self, eigenvalue: float, tol: float = 1e-9) -> float:
        """Probability of ``eigenvalue``; 0 when it is not in the spectrum."""
        for o, p in self.entries:
            if abs(o - eigenvalue) <= tol:
                return p
        return 0.0

    def as_dict(self) -> dict[float, float]:
        return dict(self.entries)

    def total(self) -> float:
        return math.fsum(p for _, p in self.entries)


class WeakRoots(NamedTuple):
    """The two real weak values consistent with an ABL probability.

    ``minus`` is NaN, and ``minus_valid`` False, when ``p == 1/2``.
    """

    plus: float
    minus: float

    @property
    def minus_valid(self) -> bool:
        return math.isfinite(self.minus)


def weak_value(op: OperatorMatrix, pp: PrePost) -> complex:
    """Weak value ``<f|U·O|in> / <f|U|in>`` of ``op`` at the intermediate time.

    Raises
    ------
    PostSelectionOrthogonal
        If ``|<f|U|in>| < EPS`` after normalizing both states.
    """
    denom = pp.amplitude()
    if abs(denom) < EPS:
        raise PostSelectionOrthogonal(
            f"|<f|U|in>| = {abs(denom):.3g} is below {EPS:g}; weak value undefined")
    return pp.amplitude(op) / denom


def branch_amplitudes(spec: SpectralData, pp: PrePost) -> np.ndarray:
    """Amplitudes ``<f|U·P_k|in>`` for each eigenspace, in spectrum order."""
    if spec.basis != pp.basis:
        raise InvalidSpectrum("spectral data and pre-selected state use different bases")
    return np.array([pp.amplitude(p) for p in spec.projectors])


def born_probabilities(spec: SpectralData, s: StateVector) -> ABLDistribution:
    u = normalize(s)
    probs = [inner(u, apply(p, u)).real for p in spec.projectors]
    return ABLDistribution(tuple(zip(spec.eigenvalues, probs)))


def mean_value(op: OperatorMatrix, s: StateVector) -> float:
    if not is_hermitian(op, TOL):
        raise NotHermitian("mean value requires a Hermitian operator")
    u = normalize(s)
    return inner(u, apply(op, u)).real


def abl_probability(spec: SpectralData, pp: PrePost) -> ABLDistribution:
    """ABL probabilities ``|<f|U P_i|in>|^2 / sum_j |<f|U P_j|in>|^2``.

    Written with projectors, so degenerate eigenvalues are handled too.
    """
    weights = np.abs(branch_amplitudes(spec, pp)) ** 2
    denom = math.fsum(weights)
    if denom < EPS**2:
        raise NoConsistentHistory(
            "no intermediate outcome connects the pre- and post-selected states")
    return ABLDistribution(tuple(zip(spec.eigenvalues, (float(w / denom) for w in weights))))


def abl_from_weak(aw: complex, complement_aw: complex) -> float:
    """ABL probability of outcome 1 for a projector, from its weak value and
    the weak value of its complement (same pre/post pair)."""
    a2, b2 = abs(aw) ** 2, abs(complement_aw) ** 2
    if max(abs(aw), abs(complement_aw)) < EPS:
        raise DegenerateInput("both weak values vanish")
    return a2 / (a2 + b2)


def weak_from_abl(p: float) -> WeakRoots:
    """Solve for a real projector weak value given its ABL probability ``p``.

    Returns ``sqrt(p)/(sqrt(p) + sqrt(1-p))`` and ``sqrt(p)/(sqrt(p) - sqrt(1-p))``;
    the caller decides which root applies.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    a, b = math.sqrt(p), math.sqrt(1.0 - p)
    minus = a / (a - b) if abs(a - b) > EPS else math.nan
    return WeakRoots(a / (a + b), minus)


def eigendecompose_hermitian(op: OperatorMatrix, gap: float = EIGEN_MERGE_GAP) -> SpectralData:
    """Spectral data of a Hermitian operator via cyclic Jacobi rotations.

    Eigenvalues closer than ``gap`` are merged into one eigenspace, whose
    eigenvalue is the group mean.
    """
    if not is_hermitian(op, TOL):
        raise NotHermitian("eigendecomposition requires a Hermitian operator")
    if op.dim > 16:
        raise ValueError("dense Jacobi is limited to dimension 16")
    w, v = jacobi_eigh(op.entries)
    groups: list[list[int]] = []
    for k in range(len(w)):
        if groups and w[k] - w[groups[-1][-1]] < gap:
            groups[-1].append(k)
        else:
            groups.append([k])
    pairs = []
    for g in groups:
        vecs = v[:, g]
        pairs.append((float(np.mean(w[g])), OperatorMatrix(op.basis, vecs @ vecs.conj().T)))
    return SpectralData(tuple(pairs))


def spectral_data(op: OperatorMatrix) -> SpectralData:
    """Best spectral data for ``op``: exact two-outcome form for projectors."""
    m = op.entries
    if is_hermitian(op, TOL) and max_deviation(m @ m, m) <= TOL:
        return SpectralData.for_projector(op)
    return eigendecompose_hermitian(op)


def weak_values(ops: Iterable[tuple[str, OperatorMatrix]], pp: PrePost) -> dict[str, complex]:
    return {name: weak_value(op, pp) for name, op in ops}
