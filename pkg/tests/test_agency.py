import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qagency import agency, linalg
from qagency.gates import H, I, X
from qagency.qstate import PureState, basis_state, bloch_metrics, fidelity, test_states

from conftest import random_ket, random_spec, random_unitary, seeds

R2 = math.sqrt(2)
PLUS = PureState(np.array([1, 1]) / R2)
MINUS = PureState(np.array([1, -1]) / R2)
SKEWED = PureState([math.sqrt(3 / 4), math.sqrt(1 / 4)])


def projector_circuit(spec):
    # sum_b |b><b| (x) V_b after the deliberation layer, built from projectors
    k = spec.num_controls
    cu = np.zeros((2 ** (k + 1),) * 2, dtype=complex)
    for bits, v in spec.control_table.items():
        b = basis_state(bits).amplitudes
        cu += np.kron(np.outer(b, b.conj()), v)
    layer = np.eye(1)
    for u in spec.deliberation_unitaries:
        layer = np.kron(layer, u)
    return cu @ np.kron(layer, I)


@pytest.fixture(scope="module")
def builtins():
    return {c.name: c for c in agency.builtin_circuits()}


def test_builtin_names(builtins):
    assert tuple(builtins) == agency.BUILTIN_NAMES
    assert [c.num_controls for c in builtins.values()] == [1, 2, 3, 4]


@pytest.mark.parametrize("alias, canon", [
    ("Q_IX", "Q_IX"), ("q_ihx", "Q_IHX"), ("Q_pIX", "Q_(I)X"), ("Q_IXpYpZp", "Q_IX'Y'Z'"),
])
def test_aliases(alias, canon):
    assert agency.resolve_builtin_name(alias) == canon


def test_unknown_name():
    with pytest.raises(KeyError, match="unknown built-in"):
        agency.get_builtin("Q_XYZ")


def test_table_entries(builtins):
    assert np.array_equal(builtins["Q_IX"].control_table["01"], I)
    expected = (I + 1j * H - 1j * X) / math.sqrt(3 - R2)
    assert np.allclose(builtins["Q_IHX"].control_table["111"], expected)


def test_all_table_entries_and_cu_unitary(builtins):
    for spec in builtins.values():
        for v in spec.control_table.values():
            assert linalg.is_unitary(v, 1e-10)
        assert linalg.is_unitary(agency.build_cu(spec), 1e-10)
        assert linalg.is_unitary(agency.circuit_unitary(spec), 1e-10)


def test_rotated_paulis():
    xp, yp, zp = agency.rotated_paulis()
    zero = np.array([1, 0])
    for p in (xp, yp, zp):
        assert np.vdot(zero, p @ zero).real == pytest.approx(1 / math.sqrt(3), abs=1e-12)
        assert np.allclose(p @ p, I)
        assert np.allclose(p, p.conj().T)
    for a, b in ((xp, yp), (yp, zp), (xp, zp)):
        assert abs(np.trace(a @ b)) < 1e-12
        assert np.max(np.abs(a @ b + b @ a)) < 1e-10
    # right-handed, as the Pauli algebra requires: X'Y' = iZ'
    assert np.allclose(xp @ yp, 1j * zp)


@given(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: np.linalg.norm(v) > 1e-3))
def test_rotation_to_z(v):
    r = agency.rotation_to_z(v)
    assert np.allclose(r.T @ r, np.eye(3), atol=1e-12)
    assert np.linalg.det(r) == pytest.approx(1)
    assert np.allclose(r @ (np.asarray(v) / np.linalg.norm(v)), [0, 0, 1], atol=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError, match="entry 01 is not unitary"):
        agency.AgencyCircuitSpec("bad", (I, X), {"00": I, "01": (I + X) / R2, "10": X, "11": I})
    with pytest.raises(ValueError, match="missing"):
        agency.AgencyCircuitSpec("bad", (I, X), {"00": I, "01": I, "10": X})
    with pytest.raises(ValueError, match="deliberation unitary 0"):
        agency.AgencyCircuitSpec("bad", ((I + X) / R2,), {"0": I, "1": I})


def test_build_cu_names_bad_entry(builtins):
    spec = builtins["Q_IX"].with_table({})
    spec.control_table["10"] = (I + X) / R2
    with pytest.raises(ValueError, match="10"):
        agency.build_cu(spec)


def test_spec_arrays_read_only(builtins):
    with pytest.raises(ValueError):
        builtins["Q_IX"].control_table["00"][0, 0] = 0


def test_cu_decisive_example(builtins):
    cu = agency.build_cu(builtins["Q_IX"])
    inp = linalg.kron(basis_state("10").ket, basis_state("1").ket)
    assert np.allclose(cu @ inp, linalg.kron(basis_state("10").ket, X @ basis_state("1").ket))


@pytest.mark.parametrize("name", agency.BUILTIN_NAMES)
def test_circuit_unitary_matches_projector_oracle(builtins, name):
    spec = builtins[name]
    assert np.allclose(agency.circuit_unitary(spec), projector_circuit(spec), atol=1e-13)


@given(seeds, st.integers(1, 3))
def test_random_circuit_matches_projector_oracle(seed, k):
    spec = random_spec(np.random.Generator(np.random.PCG64(seed)), k)
    assert np.allclose(agency.circuit_unitary(spec), projector_circuit(spec), atol=1e-12)


def test_worked_examples(builtins):
    q_ix = builtins["Q_IX"]
    rho = agency.run_on_copies(q_ix, basis_state("1"))
    assert fidelity(rho, basis_state("0")) == pytest.approx(1, abs=1e-12)
    assert rho.purity() == pytest.approx(1, abs=1e-12)
    assert fidelity(agency.run_on_copies(q_ix, basis_state("0")), basis_state("0")) == (
        pytest.approx(1, abs=1e-12))
    f = fidelity(agency.run_on_copies(q_ix, SKEWED), basis_state("0"))
    assert f == pytest.approx(0.625, abs=1e-3)


def test_skewed_example_oracle(builtins):
    # hand expansion: controls (sqrt3|0>+|1>)(|0>+sqrt3|1>)/4 then V_b on the target
    a, b = math.sqrt(3) / 2, 1 / 2
    amps = {"00": a * b, "01": a * a, "10": b * b, "11": b * a}
    out = sum(np.kron(basis_state(k).amplitudes, c * (builtins["Q_IX"].control_table[k] @ [a, b]))
              for k, c in amps.items())
    rho = linalg.reduce_pure(out, [2, 2, 2], [2])
    assert np.allclose(agency.run_on_copies(builtins["Q_IX"], SKEWED).matrix, rho)


def test_clones_fidelity_two_thirds(builtins):
    for psi in test_states():
        rho = agency.run_on_clones(builtins["Q_(I)X"], psi)
        assert fidelity(rho, basis_state("0")) == pytest.approx(2 / 3, abs=1e-6)


def test_clones_register_overflow():
    k = 6
    spec = agency.AgencyCircuitSpec("wide", (I,) * k, {format(i, f"0{k}b"): I for i in range(2 ** k)})
    with pytest.raises(ValueError, match="register too large"):
        agency.run_on_clones(spec, basis_state("0"))


@pytest.mark.parametrize("regime", agency.REGIMES)
@pytest.mark.parametrize("name", agency.BUILTIN_NAMES)
def test_batched_evaluate_matches_per_state_route(builtins, name, regime):
    spec = builtins[name]
    run = agency.run_on_copies if regime == "copies" else agency.run_on_clones
    rep = agency.evaluate(spec, regime)
    for rec, psi in zip(rep.records, test_states()):
        rho = run(spec, psi)
        length, angle = bloch_metrics(rho)
        assert rec.fidelity == pytest.approx(fidelity(rho, spec.target_state), abs=1e-12)
        assert rec.bloch_length == pytest.approx(length, abs=1e-12)
        assert rec.angle_error == pytest.approx(angle, abs=1e-9)


def test_evaluate_paper_cells(builtins):
    rep = agency.evaluate(builtins["Q_IX"], "copies")
    assert (rep.cell("fidelity", "worst"), rep.cell("fidelity", "average"),
            rep.cell("fidelity", "best")) == pytest.approx((0.5, 2 / 3, 1), abs=1e-4)
    assert agency.evaluate(builtins["Q_IHX"], "copies").cell("fidelity", "average") == (
        pytest.approx(0.69372, abs=1e-4))
    assert agency.evaluate(builtins["Q_IX'Y'Z'"], "copies").cell("angle_error", "best") == (
        pytest.approx(0, abs=1e-6))


def test_proto_and_ix_copies_identical(builtins):
    a = agency.evaluate(builtins["Q_(I)X"], "copies")
    b = agency.evaluate(builtins["Q_IX"], "copies")
    for ra, rb in zip(a.records, b.records):
        for m in agency.METRICS:
            assert ra.metric(m) == pytest.approx(rb.metric(m), abs=1e-9)


def test_aggregate_rules():
    recs = [agency.StateRecord(i, (0, 0, 1), f, f, a)
            for i, (f, a) in enumerate([(0.2, 0.1), (0.6, 0.9), (1.0, 0.5)])]
    agg = agency.aggregate(recs)
    assert agg["fidelity"] == agency.Aggregate(0.2, 0.6, 1.0)
    assert agg["angle_error"] == agency.Aggregate(0.9, 0.5, 0.1)


def test_unknown_regime(builtins):
    with pytest.raises(ValueError, match="regime"):
        agency.evaluate(builtins["Q_IX"], "teleport")


def test_classical_limit(builtins):
    basis = [basis_state("0"), basis_state("1")]
    assert agency.classical_limit_check(builtins["Q_IX"], basis)
    assert not agency.classical_limit_check(builtins["Q_IX"], [PLUS, MINUS])
    assert agency.classical_limit_check(builtins["Q_(I)X"], basis)
    with pytest.raises(ValueError, match="orthonormal"):
        agency.classical_limit_check(builtins["Q_IX"], [basis_state("0"), PLUS])


def test_decisive_only_table_on_design_basis():
    # rows decisive on |0>,|1>: V_b fixes the target whatever the ambiguous rows hold
    spec = agency.AgencyCircuitSpec("decisive", (I, X), {"00": I, "01": I, "10": X, "11": X})
    assert agency.classical_limit_check(spec, [basis_state("0"), basis_state("1")])


@given(seeds, st.integers(1, 3), st.sampled_from(agency.REGIMES))
def test_random_runs_preserve_trace_and_positivity(seed, k, regime):
    rng = np.random.Generator(np.random.PCG64(seed))
    spec = random_spec(rng, k)
    psi = PureState(random_ket(rng, 2))
    run = agency.run_on_copies if regime == "copies" else agency.run_on_clones
    rho = run(spec, psi).matrix
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(rho).min() > -1e-12


@given(seeds)
def test_target_state_is_respected(seed):
    # with target |1>, fidelities flip relative to target |0>
    rng = np.random.Generator(np.random.PCG64(seed))
    spec = random_spec(rng, 2)
    flipped = agency.AgencyCircuitSpec("t1", spec.deliberation_unitaries, spec.control_table,
                                       basis_state("1"))
    a = agency.evaluate(spec, "copies")
    b = agency.evaluate(flipped, "copies")
    for ra, rb in zip(a.records, b.records):
        assert ra.fidelity + rb.fidelity == pytest.approx(1, abs=1e-12)
        assert ra.angle_error + rb.angle_error == pytest.approx(math.pi, abs=1e-6)


@given(seeds)
def test_global_phase_on_table_entry_is_irrelevant(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    spec = random_spec(rng, 2)
    phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
    # a phase on every entry is global; on one entry it is not, so use all
    rotated = spec.with_table({b: phase * v for b, v in spec.control_table.items()})
    a, b = agency.evaluate(spec, "clones"), agency.evaluate(rotated, "clones")
    assert a.cell("fidelity", "average") == pytest.approx(b.cell("fidelity", "average"), abs=1e-12)


def test_random_unitary_helper_is_unitary():
    assert linalg.is_unitary(random_unitary(np.random.Generator(np.random.PCG64(0)), 4))
