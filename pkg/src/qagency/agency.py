"""Quantum agency circuits ``Q_A = C_U (U_1 x ... x U_{N-1} x I)``.

The first ``N - 1`` qubits are deliberation slots: slot ``i`` receives a copy
(or clone) of the environment state and has ``U_i`` applied to it. The slots
then act as controls of ``C_U = sum_b |b><b| (x) V_b`` on the last qubit, the
target. Bit ``i`` of a control string refers to slot ``i`` (leftmost bit is
slot 0); a ``0`` means ``U_i`` brought its copy to the target state ``|0>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .cloning import symmetric_clone
from .gates import H, I, X, pauli_vector
from .qstate import (
    DensityMatrix,
    PureState,
    ZERO_LENGTH,
    fidelity,
    purity,
    test_bloch_vectors,
    test_states,
    to_bloch,
)

REGIMES = ("copies", "clones")
METRICS = ("fidelity", "bloch_length", "angle_error")


@dataclass(frozen=True, eq=False)
class AgencyCircuitSpec:
    name: str
    deliberation_unitaries: tuple
    control_table: Mapping[str, np.ndarray]
    target_state: PureState = field(default_factory=lambda: PureState([1, 0]))

    def __post_init__(self):
        delib = tuple(linalg.as_matrix(u) for u in self.deliberation_unitaries)
        if not delib:
            raise ValueError("an agency circuit needs at least one deliberation unitary")
        for i, u in enumerate(delib):
            if u.shape != (2, 2):
                raise ValueError(f"deliberation unitary {i} is not 2x2")
            if not linalg.is_unitary(u):
                raise ValueError(f"deliberation unitary {i} is not unitary")
        k = len(delib)
        table = {str(b): linalg.as_matrix(v) for b, v in self.control_table.items()}
        expected = {format(i, f"0{k}b") for i in range(2 ** k)}
        if set(table) != expected:
            missing = sorted(expected - set(table))
            extra = sorted(set(table) - expected)
            raise ValueError(
                f"control table for {k} controls must have {2 ** k} entries "
                f"(missing {missing}, unexpected {extra})")
        for bits in sorted(table):
            v = table[bits]
            if v.shape != (2, 2):
                raise ValueError(f"control table entry {bits} is not 2x2")
            if not linalg.is_unitary(v):
                raise ValueError(f"control table entry {bits} is not unitary")
        for m in (*delib, *table.values()):
            m.setflags(write=False)
        if self.target_state.num_qubits != 1:
            raise ValueError("target state must be a single qubit")
        object.__setattr__(self, "deliberation_unitaries", delib)
        object.__setattr__(self, "control_table", dict(sorted(table.items())))

    @property
    def num_controls(self) -> int:
        return len(self.deliberation_unitaries)

    @property
    def num_qubits(self) -> int:
        return self.num_controls + 1

    def with_table(self, updates: Mapping[str, np.ndarray], name: str | None = None):
        table = dict(self.control_table)
        table.update(updates)
        return AgencyCircuitSpec(name or self.name, self.deliberation_unitaries,
                                 table, self.target_state)


def rotation_to_z(axis) -> np.ndarray:
    """Minimal rotation taking unit vector ``axis`` onto +z (Rodrigues form)."""
    u = np.asarray(axis, dtype=float)
    u = u / np.linalg.norm(u)
    z = np.array([0.0, 0.0, 1.0])
    v = np.cross(u, z)
    c = float(u @ z)
    if np.linalg.norm(v) < 1e-15:
        if c > 0:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])
    k = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + k + k @ k / (1 + c)


def rotated_pauli_axes() -> np.ndarray:
    """Columns are the Bloch axes of X', Y', Z'.

    The frame is the image of x, y, z under the minimal rotation taking
    (1, 1, 1)/sqrt(3) onto +z, so every axis has z-component 1/sqrt(3).
    """
    return rotation_to_z(np.ones(3))


def rotated_paulis() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    axes = rotated_pauli_axes()
    return tuple(pauli_vector(axes[:, i]) for i in range(3))


def _circuit(name, delib, rows) -> AgencyCircuitSpec:
    return AgencyCircuitSpec(name, tuple(delib), dict(rows))


def builtin_circuits() -> list[AgencyCircuitSpec]:
    """The four example circuits, control tables transcribed literally."""
    r2, r3 = math.sqrt(2), math.sqrt(3)
    j = 1j
    q_ix_proto = _circuit("Q_(I)X", [X], {"0": X, "1": I})
    q_ix = _circuit("Q_IX", [I, X], {
        "00": (I + j * X) / r2,
        "01": I,
        "10": X,
        "11": (I - j * X) / r2,
    })
    q_ihx = _circuit("Q_IHX", [I, H, X], {
        "000": (I + j * H + j * X) / math.sqrt(3 + r2),
        "001": (I - j * H) / r2,
        "010": (I + j * X) / r2,
        "011": I,
        "100": (H + X) / math.sqrt(2 + r2),
        "101": H,
        "110": X,
        "111": (I + j * H - j * X) / math.sqrt(3 - r2),
    })
    xp, yp, zp = rotated_paulis()
    q_ixyz = _circuit("Q_IX'Y'Z'", [I, xp, yp, zp], {
        "0000": (I + j * xp + j * yp + j * zp) / 2,
        "0001": (I + j * xp + j * yp) / r3,
        "0010": (I - j * xp + j * zp) / r3,
        "0011": (I + j * xp) / r2,
        "0100": (I - j * yp - j * zp) / r3,
        "0101": (I + j * yp) / r2,
        "0110": (I + j * zp) / r2,
        "0111": I,
        "1000": (xp + yp + zp) / r3,
        "1001": (xp - yp) / r2,
        "1010": (zp - xp) / r2,
        "1011": xp,
        "1100": (yp - zp) / r2,
        "1101": yp,
        "1110": zp,
        "1111": (I - j * xp - j * yp - j * zp) / 2,
    })
    return [q_ix_proto, q_ix, q_ihx, q_ixyz]


BUILTIN_NAMES = ("Q_(I)X", "Q_IX", "Q_IHX", "Q_IX'Y'Z'")
_ALIASES = {"q_pix": "Q_(I)X", "q_ixpypzp": "Q_IX'Y'Z'"}


def resolve_builtin_name(name: str) -> str:
    """Canonical built-in name for ``name`` or an ASCII alias; KeyError if unknown."""
    for canon in BUILTIN_NAMES:
        if name == canon or name.lower() == canon.lower():
            return canon
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise KeyError(f"unknown built-in circuit {name!r}; choose from "
                       f"{', '.join(BUILTIN_NAMES)} (aliases: Q_pIX, Q_IXpYpZp)") from None


def get_builtin(name: str) -> AgencyCircuitSpec:
    canon = resolve_builtin_name(name)
    return next(c for c in builtin_circuits() if c.name == canon)


def build_cu(spec: AgencyCircuitSpec) -> np.ndarray:
    """Block-diagonal ``C_U`` on (controls (x) target)."""
    k = spec.num_controls
    dim = 2 ** k
    cu = np.zeros((2 * dim, 2 * dim), dtype=complex)
    for bits, v in spec.control_table.items():
        if not linalg.is_unitary(v):
            raise ValueError(f"control table entry {bits} is not unitary")
        b = int(bits, 2)
        cu[2 * b:2 * b + 2, 2 * b:2 * b + 2] = v
    return cu


def deliberation_layer(spec: AgencyCircuitSpec) -> np.ndarray:
    return linalg.kron(*spec.deliberation_unitaries, I)


def circuit_unitary(spec: AgencyCircuitSpec) -> np.ndarray:
    """Full ``Q_A``: deliberation first, then ``C_U``."""
    return linalg.matmul_chain([deliberation_layer(spec), build_cu(spec)])


def _check_input(psi: PureState):
    if psi.num_qubits != 1:
        raise ValueError("environment state must be a single qubit")


def joint_output_copies(spec: AgencyCircuitSpec, psi: PureState,
                        q: np.ndarray | None = None) -> np.ndarray:
    """Output ket of ``Q_A`` on ``psi^(x)N`` (controls and target together)."""
    _check_input(psi)
    q = circuit_unitary(spec) if q is None else q
    inp = linalg.kron(*([psi.ket] * spec.num_qubits))
    return (q @ inp).ravel()


def _target_of_pure(spec, vec) -> np.ndarray:
    return linalg.reduce_pure(vec, [2] * spec.num_qubits, [spec.num_controls])


def run_on_copies(spec: AgencyCircuitSpec, psi: PureState) -> DensityMatrix:
    """Target state after running ``Q_A`` on N perfect copies of ``psi``."""
    return DensityMatrix(_target_of_pure(spec, joint_output_copies(spec, psi)))


@lru_cache(maxsize=256)
def _clone_input(m: int, amps: tuple) -> np.ndarray:
    rho = symmetric_clone(PureState(np.array(amps)), m).state.matrix
    return rho


def clone_input(psi: PureState, m: int) -> np.ndarray:
    """Cached m-qubit symmetric clone register for ``psi``."""
    return _clone_input(m, tuple(complex(a) for a in psi.amplitudes))


def _target_of_mixed(spec, q, rho) -> np.ndarray:
    out = q @ rho @ q.conj().T
    return linalg.partial_trace(out, [2] * spec.num_qubits, [spec.num_controls])


def run_on_clones(spec: AgencyCircuitSpec, psi: PureState) -> DensityMatrix:
    """Target state after running ``Q_A`` on the N-clone register of ``psi``.

    The clone register is exchange-symmetric, so which clone feeds which
    slot does not change the result; slots take clones 0..N-2 and the target
    takes clone N-1.
    """
    _check_input(psi)
    rho = clone_input(psi, spec.num_qubits)
    return DensityMatrix(_target_of_mixed(spec, circuit_unitary(spec), rho))


@dataclass(frozen=True)
class StateRecord:
    index: int
    bloch: tuple[float, float, float]
    fidelity: float
    bloch_length: float
    angle_error: float

    def metric(self, name: str) -> float:
        return getattr(self, name)


@dataclass(frozen=True)
class Aggregate:
    worst: float
    average: float
    best: float


def aggregate(records: Sequence[StateRecord]) -> dict[str, Aggregate]:
    """Per-metric extremes and arithmetic mean.

    Worst/best are picked independently per metric; for the angle error the
    worst value is the largest.
    """
    out = {}
    for name in METRICS:
        vals = [r.metric(name) for r in records]
        avg = math.fsum(vals) / len(vals)
        if name == "angle_error":
            out[name] = Aggregate(max(vals), avg, min(vals))
        else:
            out[name] = Aggregate(min(vals), avg, max(vals))
    return out


@dataclass(frozen=True)
class EvaluationReport:
    circuit_name: str
    regime: str
    records: tuple[StateRecord, ...]
    aggregates: dict

    def cell(self, metric: str, stat: str) -> float:
        return getattr(self.aggregates[metric], stat)


@lru_cache(maxsize=16)
def _input_batch(regime: str, n: int) -> np.ndarray:
    """Stacked register inputs for the test states: kets (copies) or
    density matrices (clones)."""
    states = test_states()
    if regime == "copies":
        batch = np.stack([linalg.kron(*([s.ket] * n)).ravel() for s in states])
    else:
        batch = np.stack([clone_input(s, n) for s in states])
    batch.setflags(write=False)
    return batch


def target_states(spec: AgencyCircuitSpec, regime: str) -> np.ndarray:
    """Target density matrices, shape ``(26, 2, 2)``, for the test states."""
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    q = circuit_unitary(spec)
    n, dim = spec.num_qubits, 2 ** spec.num_controls
    batch = _input_batch(regime, n)
    if regime == "copies":
        out = (batch @ q.T).reshape(-1, dim, 2)
        return np.einsum("sci,scj->sij", out, out.conj())
    out = (q @ batch @ q.conj().T).reshape(-1, dim, 2, dim, 2)
    return np.einsum("scicj->sij", out)


def batch_metrics(rhos: np.ndarray, target: PureState):
    """Bloch vectors, fidelities, lengths and angle errors for stacked qubit states.

    Same conventions as :func:`fidelity` (pure target) and
    :func:`bloch_metrics`.
    """
    t = target.amplitudes
    fid = np.clip(np.real(np.einsum("i,sij,j->s", t.conj(), rhos, t)), 0.0, 1.0)
    bloch = np.stack([2 * np.real(rhos[:, 0, 1]),
                      -2 * np.imag(rhos[:, 0, 1]),
                      np.real(rhos[:, 0, 0] - rhos[:, 1, 1])], axis=1)
    length = np.linalg.norm(bloch, axis=1)
    ref = to_bloch(target).as_array()
    safe = np.where(length < ZERO_LENGTH, 1.0, length)
    cos = np.clip(bloch @ ref / (safe * np.linalg.norm(ref)), -1.0, 1.0)
    angle = np.where(length < ZERO_LENGTH, 0.0, np.arccos(cos))
    return bloch, fid, length, angle


def evaluate(spec: AgencyCircuitSpec, regime: str) -> EvaluationReport:
    """Run ``spec`` over the 26 canonical test states and aggregate metrics."""
    _, fid, length, angle = batch_metrics(target_states(spec, regime), spec.target_state)
    records = tuple(
        StateRecord(i, v, float(fid[i]), float(length[i]), float(angle[i]))
        for i, v in enumerate(test_bloch_vectors())
    )
    return EvaluationReport(spec.name, regime, records, aggregate(records))


def classical_limit_check(spec: AgencyCircuitSpec, basis: Sequence[PureState],
                          tol: float = 1e-9) -> bool:
    """True iff every state of the orthonormal ``basis`` is driven to the
    target with fidelity 1 and the target ends unentangled with the controls.
    """
    if len(basis) != 2:
        raise ValueError("basis must be a pair of qubit states")
    a, b = (np.asarray(s.amplitudes) for s in basis)
    gram = np.array([[np.vdot(a, a), np.vdot(a, b)], [np.vdot(b, a), np.vdot(b, b)]])
    if np.max(np.abs(gram - np.eye(2))) > 1e-10:
        raise ValueError("basis is not orthonormal")
    q = circuit_unitary(spec)
    for s in basis:
        rho = _target_of_pure(spec, joint_output_copies(spec, s, q))
        if fidelity(rho, spec.target_state) < 1 - tol or purity(rho) < 1 - tol:
            return False
    return True

