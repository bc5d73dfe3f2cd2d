import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qagency import linalg
from qagency.gates import H, I, X, Y, Z

from conftest import random_density, random_ket, random_unitary, seeds


def ket(bits):
    v = np.zeros((2 ** len(bits), 1), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def brute_partial_trace(rho, dims, keep):
    # loop over basis labels; independent of the einsum route
    n = len(dims)
    drop = [i for i in range(n) if i not in keep]
    kd = int(np.prod([dims[i] for i in keep]))
    out = np.zeros((kd, kd), dtype=complex)
    strides = [int(np.prod(dims[i + 1:])) for i in range(n)]
    for kr in itertools.product(*(range(dims[i]) for i in keep)):
        for kc in itertools.product(*(range(dims[i]) for i in keep)):
            for d in itertools.product(*(range(dims[i]) for i in drop)):
                r = c = 0
                for i, v in zip(keep, kr):
                    r += v * strides[i]
                for i, v in zip(keep, kc):
                    c += v * strides[i]
                for i, v in zip(drop, d):
                    r += v * strides[i]
                    c += v * strides[i]
                a = int(np.ravel_multi_index(kr, [dims[i] for i in keep]))
                b = int(np.ravel_multi_index(kc, [dims[i] for i in keep]))
                out[a, b] += rho[r, c]
    return out


def test_kron_identities():
    assert np.array_equal(linalg.kron(I, I), np.eye(4))
    assert np.array_equal(linalg.kron(X, I) @ ket("10"), ket("00"))
    assert np.array_equal(linalg.kron(ket("0"), ket("1")), ket("01"))


def test_kron_register_cap():
    big = np.eye(2 ** 6)
    assert linalg.kron(big, big).shape == (4096, 4096)
    with pytest.raises(ValueError, match="register too large"):
        linalg.kron(big, big, I)


def test_kron_needs_operands():
    with pytest.raises(ValueError):
        linalg.kron()


def test_dagger():
    assert np.array_equal(linalg.dagger(I), I)
    assert np.allclose(linalg.dagger(1j * X), -1j * X)
    psi = np.array([1, 1j]) / math.sqrt(2)
    assert linalg.dagger(psi).shape == (1, 2)
    assert np.allclose(linalg.dagger(psi), psi.conj().reshape(1, 2))


@pytest.mark.parametrize("m, expected", [
    ((I + 1j * X) / math.sqrt(2), True),
    ((I + X) / math.sqrt(2), False),
    (I, True),
    (H, True),
    (np.diag([1, 1.1]), False),
])
def test_is_unitary(m, expected):
    assert linalg.is_unitary(m, 1e-10) is expected


def test_is_unitary_oracle_for_i_plus_x():
    # (I+X)(I+X)^dag / 2 = I + X, so the deviation is exactly X
    m = (I + X) / math.sqrt(2)
    assert np.allclose(m @ m.conj().T, I + X)


def test_is_unitary_rejects_non_square():
    with pytest.raises(ValueError):
        linalg.is_unitary(np.ones((2, 3)))


def test_partial_trace_bell():
    bell = (ket("00") + ket("11")) / math.sqrt(2)
    rho = bell @ bell.conj().T
    for k in (0, 1):
        assert np.allclose(linalg.partial_trace(rho, [2, 2], [k]), I / 2)


def test_partial_trace_product_keeps_second():
    rho = np.kron(np.diag([1, 0]), np.diag([0, 1]))
    assert np.allclose(linalg.partial_trace(rho, [2, 2], [1]), np.diag([0, 1]))


def test_decisive_controls_traced_out():
    v = linalg.kron(ket("10"), X @ ket("1"))
    rho = v @ v.conj().T
    assert np.allclose(linalg.partial_trace(rho, [2, 2, 2], [2]), np.diag([1, 0]))


@pytest.mark.parametrize("dims, keep", [([2, 3], [0]), ([3, 2], [1]), ([2, 2, 2], [0, 2]),
                                        ([2, 3, 2], [1]), ([2, 2, 2, 2], [3, 1])])
def test_partial_trace_matches_brute_force(dims, keep):
    rng = np.random.Generator(np.random.PCG64(7))
    rho = random_density(rng, int(np.prod(dims)))
    got = linalg.partial_trace(rho, dims, keep)
    assert np.allclose(got, brute_partial_trace(rho, dims, sorted(keep)), atol=1e-12)


def test_partial_trace_errors():
    rho = np.eye(4) / 4
    with pytest.raises(ValueError):
        linalg.partial_trace(rho, [2, 3], [0])
    with pytest.raises(ValueError):
        linalg.partial_trace(rho, [2, 2], [])
    with pytest.raises(ValueError):
        linalg.partial_trace(rho, [2, 2], [2])


def test_matmul_chain():
    assert np.allclose(linalg.matmul_chain([X, X]), I)
    # first listed op acts first
    assert np.allclose(linalg.matmul_chain([X, Z]), Z @ X)


def test_matmul_chain_mismatch_names_pair():
    with pytest.raises(ValueError, match=r"ops\[1\].*ops\[2\]"):
        linalg.matmul_chain([I, X, np.eye(4)])


@given(seeds, st.integers(1, 4))
def test_chain_with_adjoint_is_identity(seed, n):
    u = random_unitary(np.random.Generator(np.random.PCG64(seed)), 2 ** n)
    assert np.allclose(linalg.matmul_chain([u, linalg.dagger(u)]), np.eye(2 ** n), atol=1e-12)


@given(seeds, st.lists(st.sampled_from([2, 3]), min_size=2, max_size=4), st.data())
def test_partial_trace_preserves_trace_and_positivity(seed, dims, data):
    keep = data.draw(st.lists(st.integers(0, len(dims) - 1), min_size=1, unique=True))
    rho = random_density(np.random.Generator(np.random.PCG64(seed)), int(np.prod(dims)))
    red = linalg.partial_trace(rho, dims, keep)
    assert abs(np.trace(red) - 1) < linalg.TRACE_TOL
    assert np.allclose(red, red.conj().T)
    assert np.linalg.eigvalsh(red).min() > -1e-12


@given(seeds, st.lists(st.sampled_from([2, 3]), min_size=2, max_size=4), st.data())
def test_reduce_pure_matches_partial_trace(seed, dims, data):
    keep = data.draw(st.lists(st.integers(0, len(dims) - 1), min_size=1, unique=True))
    v = random_ket(np.random.Generator(np.random.PCG64(seed)), int(np.prod(dims)))
    full = np.outer(v, v.conj())
    assert np.allclose(linalg.reduce_pure(v, dims, keep),
                       linalg.partial_trace(full, dims, keep), atol=1e-12)


@given(seeds)
def test_partial_trace_of_product_recovers_factor(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    a, b = random_density(rng, 2), random_density(rng, 3)
    rho = linalg.kron(a, b)
    assert np.allclose(linalg.partial_trace(rho, [2, 3], [0]), a, atol=1e-12)
    assert np.allclose(linalg.partial_trace(rho, [2, 3], [1]), b, atol=1e-12)


@given(seeds)
def test_kron_mixed_product(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    a, b, c, d = (random_unitary(rng, 2) for _ in range(4))
    assert np.allclose(linalg.kron(a, b) @ linalg.kron(c, d), linalg.kron(a @ c, b @ d))


@pytest.mark.parametrize("p", [X, Y, Z, H])
def test_paulis_and_hadamard_unitary_hermitian(p):
    assert linalg.is_unitary(p)
    assert np.allclose(p, p.conj().T)
