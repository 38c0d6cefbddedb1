"""Built-in case studies: the three-box setup, Hardy's double interferometer,
and a single Mach-Zehnder interferometer with a general second beam splitter.

Each constructor returns a :class:`ScenarioReport`.  Queries that are
undefined for the chosen post-selection (a dark detector port, say) are
stored as :class:`QueryFailure` markers rather than raised, so sweeps can
pass through singular points.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import WeakValueError
from .hilbert import (TOL, Basis, OperatorMatrix, StateVector, apply, normalize,
                      projector, tensor, tensor_basis, tensor_label, tensor_op)
from .measure import (ABLDistribution, PrePost, SpectralData, abl_from_weak,
                      abl_probability, weak_value)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class QueryFailure:
    code: str
    message: str = ""

    @classmethod
    def from_exc(cls, exc: WeakValueError) -> QueryFailure:
        return cls(exc.code, str(exc))


WeakEntry = Union[complex, QueryFailure]
ABLEntry = Union[ABLDistribution, QueryFailure]


@dataclass
class ScenarioReport:
    name: str
    weak_values: dict[str, WeakEntry] = field(default_factory=dict)
    abl: dict[str, ABLEntry] = field(default_factory=dict)
    amplitudes: dict[str, complex] = field(default_factory=dict)
    post_selection_probability: float = 0.0
    notes: list[str] = field(default_factory=list)

    def failures(self) -> dict[str, QueryFailure]:
        out = {k: v for k, v in self.weak_values.items() if isinstance(v, QueryFailure)}
        out.update({k: v for k, v in self.abl.items() if isinstance(v, QueryFailure)})
        return out

    def query(self, op_name: str, spec: SpectralData, op: OperatorMatrix, pp: PrePost) -> None:
        """Record weak value and ABL distribution of ``op`` under ``pp``."""
        try:
            self.weak_values[op_name] = weak_value(op, pp)
        except WeakValueError as exc:
            self.weak_values[op_name] = QueryFailure.from_exc(exc)
        try:
            self.abl[op_name] = abl_probability(spec, pp)
        except WeakValueError as exc:
            self.abl[op_name] = QueryFailure.from_exc(exc)

    def check(self, what: str, deviation: float, tol: float) -> None:
        status = "ok" if deviation <= tol else "FAILED"
        self.notes.append(f"{what}: deviation {deviation:.3e} (tol {tol:.1e}) {status}")


@dataclass(frozen=True)
class BeamSplitter:
    """Lossless two-port splitter, ``q^2 + r^2 = 1``, phase ``beta`` in radians.

    With arm kets ``(I, N)`` expressed in port kets ``(B, D)``::

        |I> = q |B> + i r e^{+i beta} |D>
        |N> = i r e^{-i beta} |B> + q |D>
    """

    q: float
    r: float
    beta: float = 0.0

    def __post_init__(self):
        if abs(self.q**2 + self.r**2 - 1.0) > TOL:
            raise ValueError(f"q^2 + r^2 = {self.q**2 + self.r**2!r}, expected 1")

    @classmethod
    def from_q(cls, q: float, beta: float = 0.0) -> BeamSplitter:
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {q}")
        return cls(q, math.sqrt(1.0 - q * q), beta)

    def unitary(self, arms: Basis | None = None, ports: Basis | None = None) -> OperatorMatrix:
        """Operator from the arm basis (first label plays ``I``) to the port
        basis (first label plays ``B``)."""
        arms = arms or ARMS
        ports = ports or PORTS
        q, r, b = self.q, self.r, self.beta
        m = np.array([[q, 1j * r * cmath.exp(-1j * b)],
                      [1j * r * cmath.exp(1j * b), q]])
        return OperatorMatrix(arms, m, ports)


ARMS = Basis(["I", "N"])
PORTS = Basis(["B", "D"])
BOXES = Basis(["A", "B", "C"])
FIFTY_FIFTY = BeamSplitter(1 / SQRT2, 1 / SQRT2, 0.0)


def _sum_check(report: ScenarioReport, names: Sequence[str], what: str, tol: float) -> None:
    vals = [report.weak_values[n] for n in names]
    if any(isinstance(v, QueryFailure) for v in vals):
        return
    report.check(what, abs(sum(vals) - 1.0), tol)


# ---------------------------------------------------------------- three boxes

def three_box_prepost() -> PrePost:
    pre = normalize(StateVector.from_dict(BOXES, {"A": 1, "B": 1, "C": 1}))
    post = normalize(StateVector.from_dict(BOXES, {"A": 1, "B": 1, "C": -1}))
    return PrePost(pre, post)


def three_box_operators() -> dict[str, OperatorMatrix]:
    return {lab: projector(BOXES, lab) for lab in BOXES.labels}


def three_box(tol: float = TOL) -> ScenarioReport:
    pp = three_box_prepost()
    report = ScenarioReport("threebox")
    ops = three_box_operators()
    for name, op in ops.items():
        report.query(name, SpectralData.for_projector(op), op, pp)
    report.amplitudes = {f"in:{k}": v for k, v in pp.pre.as_dict().items()}
    report.amplitudes.update({f"f:{k}": v for k, v in pp.post.as_dict().items()})
    report.post_selection_probability = abs(pp.amplitude()) ** 2
    _sum_check(report, list(ops), "weak values A+B+C sum to 1", tol)
    identity = OperatorMatrix.identity(BOXES)
    for name, op in ops.items():
        via_weak = abl_from_weak(report.weak_values[name], weak_value(identity - op, pp))
        report.check(f"ABL({name}) from weak values", abs(via_weak - report.abl[name].prob(1.0)), tol)
    return report


# ---------------------------------------------------------------------- Hardy

def _particle_bases(tag: str) -> tuple[Basis, Basis, Basis]:
    """(input ports, arms, detector ports) for one particle; ``tag`` is p or e."""
    return (Basis([f"{tag}'", tag]),
            Basis([f"I{tag}", f"N{tag}"]),
            Basis([f"B{tag}", f"D{tag}"]))


def hardy_second_splitter(tag: str) -> OperatorMatrix:
    """Fixed 50-50 convention |N> -> (|D> + i|B>)/sqrt2, |I> -> (|B> + i|D>)/sqrt2."""
    _, arms, ports = _particle_bases(tag)
    s = 1 / SQRT2
    return OperatorMatrix.from_map(arms, ports, {
        f"N{tag}": {f"D{tag}": s, f"B{tag}": 1j * s},
        f"I{tag}": {f"B{tag}": s, f"D{tag}": 1j * s},
    })


def hardy_intermediate_state() -> StateVector:
    """Pair state between the two beam-splitter layers, after annihilation.

    Both particles pass a 50-50 splitter taking ``|p> -> (|N> + i|I>)/sqrt2``;
    the ``I_p ⊗ I_e`` component then annihilates with certainty and the
    remainder is renormalized.
    """
    kets = []
    splitters = []
    for tag in ("p", "e"):
        inputs, arms, _ = _particle_bases(tag)
        kets.append(StateVector.basis_ket(inputs, tag))
        splitters.append(FIFTY_FIFTY.unitary(inputs, arms))
    state = apply(tensor_op(*splitters), tensor(*kets))
    amps = state.amplitudes.copy()
    amps[state.basis.index(tensor_label("Ip", "Ie"))] = 0.0
    return normalize(StateVector(state.basis, amps))


def hardy_operators() -> dict[str, OperatorMatrix]:
    _, arms_p, _ = _particle_bases("p")
    _, arms_e, _ = _particle_bases("e")
    one_p, one_e = OperatorMatrix.identity(arms_p), OperatorMatrix.identity(arms_e)
    ops = {}
    for a in ("N", "I"):
        for b in ("N", "I"):
            ops[tensor_label(f"{a}p", f"{b}e")] = tensor_op(
                projector(arms_p, f"{a}p"), projector(arms_e, f"{b}e"))
    for a in ("N", "I"):
        ops[f"{a}p"] = tensor_op(projector(arms_p, f"{a}p"), one_e)
        ops[f"{a}e"] = tensor_op(one_p, projector(arms_e, f"{a}e"))
    return ops


PAIR_OPERATORS = tuple(tensor_label(f"{a}p", f"{b}e") for a in "NI" for b in "NI")


def hardy_prepost(bs2: BeamSplitter | None = None) -> PrePost:
    if bs2 is None:
        u = tensor_op(hardy_second_splitter("p"), hardy_second_splitter("e"))
    else:
        us = []
        for tag in ("p", "e"):
            _, arms, ports = _particle_bases(tag)
            us.append(bs2.unitary(arms, ports))
        u = tensor_op(*us)
    post = StateVector.basis_ket(u.out_basis, tensor_label("Dp", "De"))
    return PrePost(hardy_intermediate_state(), post, u)


def hardy(bs2: BeamSplitter | None = None, tol: float = TOL) -> ScenarioReport:
    """Hardy's setup post-selected on simultaneous D_p and D_e clicks.

    ``bs2`` replaces the fixed second-layer convention with a general splitter.
    """
    pp = hardy_prepost(bs2)
    report = ScenarioReport("hardy")
    for name, op in hardy_operators().items():
        report.query(name, SpectralData.for_projector(op), op, pp)
    report.amplitudes = pp.pre.as_dict()
    evolved = apply(pp.evolution, pp.pre)
    report.amplitudes.update(evolved.as_dict())
    report.post_selection_probability = abs(pp.amplitude()) ** 2
    _sum_check(report, PAIR_OPERATORS, "pair weak values sum to 1", tol)
    report.check("evolved state norm", abs(evolved.norm() ** 2 - 1.0), tol)
    return report


# -------------------------------------------------------------- Mach-Zehnder

def mzi_pre_state() -> StateVector:
    return StateVector.from_dict(ARMS, {"N": 1 / SQRT2, "I": 1j / SQRT2})


def closed_form_weak_n(bs: BeamSplitter, port: str) -> complex:
    """Closed-form weak value of the N-arm occupation for post-selection on ``port``."""
    phase = cmath.exp(1j * bs.beta)
    if port == "D":
        return bs.q / (bs.q - bs.r * phase)
    if port == "B":
        return bs.r / (bs.r + bs.q * phase)
    raise ValueError(f"unknown port {port!r}")


def closed_form_re_weak_n_dark(bs: BeamSplitter) -> float:
    """Real part of the N-arm weak value at port D, written with cos(beta)."""
    c = math.cos(bs.beta)
    return bs.q * (bs.q - bs.r * c) / (1.0 - 2.0 * bs.q * bs.r * c)


def mzi(bs: BeamSplitter, tol: float = TOL) -> ScenarioReport:
    """Single interferometer: pre-selection just before ``bs``, post-selection on
    each detector port in turn.  Keys are ``"<arm>@<port>"``."""
    u = bs.unitary()
    pre = mzi_pre_state()
    report = ScenarioReport("mzi")
    ops = {arm: projector(ARMS, arm) for arm in ("N", "I")}
    for port in ("D", "B"):
        pp = PrePost(pre, StateVector.basis_ket(PORTS, port), u)
        for arm, op in ops.items():
            report.query(f"{arm}@{port}", SpectralData.for_projector(op), op, pp)
        if port == "D":
            report.post_selection_probability = abs(pp.amplitude()) ** 2
        _sum_check(report, [f"N@{port}", f"I@{port}"], f"N+I weak values at {port} sum to 1", tol)
        wn = report.weak_values[f"N@{port}"]
        if not isinstance(wn, QueryFailure):
            report.check(f"N@{port} against closed form",
                         abs(wn - closed_form_weak_n(bs, port)), tol)
            if port == "D":
                report.check("Re N@D against cosine form",
                             abs(wn.real - closed_form_re_weak_n_dark(bs)), tol)
    report.amplitudes = apply(u, pre).as_dict()
    return report


def mzi_sweep(q_values: Sequence[float], beta_values: Sequence[float],
              tol: float = TOL) -> list[ScenarioReport]:
    """One report per ``(q, beta)``, ``q`` varying slowest."""
    reports = []
    for q in q_values:
        if not 0.0 < q < 1.0:
            raise ValueError(f"sweep values of q must lie in (0, 1), got {q}")
        for beta in beta_values:
            rep = mzi(BeamSplitter.from_q(q, beta), tol)
            rep.name = f"mzi q={q!r} beta={beta!r}"
            reports.append(rep)
    return reports


def open_grid(steps: int) -> list[float]:
    """``steps`` points in (0, 1), offset half a step from both ends."""
    return [(i + 0.5) / steps for i in range(steps)]


def phase_grid(steps: int) -> list[float]:
    """``steps`` phases covering [0, 2 pi)."""
    return [2.0 * math.pi * j / steps for j in range(steps)]
