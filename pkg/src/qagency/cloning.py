"""Universal symmetric cloning and cloning-fidelity bounds."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .qstate import BlochVector, DensityMatrix, PureState, to_bloch

MAX_CLONES = (linalg.MAX_QUBITS + 1) // 2  # m clones + (m - 1) ancillae


@dataclass(frozen=True, eq=False)
class CloneEnsemble:
    """Joint state of ``m`` clone qubits with the cloner ancillae traced out."""

    state: DensityMatrix
    m: int
    source_bloch: BlochVector

    def marginal(self, k: int) -> np.ndarray:
        """Reduced state of clone ``k``."""
        return linalg.partial_trace(self.state.matrix, [2] * self.m, [k])


def orthogonal_complement(psi: PureState) -> np.ndarray:
    """``|psi_perp> = -b*|0> + a*|1>`` for ``|psi> = a|0> + b|1>``."""
    a, b = psi.amplitudes
    return np.array([-np.conj(b), np.conj(a)])


def symmetric_state(n: int, k: int, one: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Normalized symmetrization of ``one^(n-k) other^k`` over qubit positions."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    out = np.zeros(2 ** n, dtype=complex)
    for pos in itertools.combinations(range(n), k):
        factors = [other if q in pos else one for q in range(n)]
        out += linalg.kron(*factors).ravel()
    return out / math.sqrt(math.comb(n, k))


def cloner_output(psi: PureState, m: int) -> np.ndarray:
    """Pure output of the optimal universal 1 -> m cloner.

    Qubits 0..m-1 hold the clones and m..2m-2 the ancillae. The expansion is

        sum_j alpha_j |(m-j) psi, j psi_perp>_sym (x) |(m-1-j) psi_perp, j psi>_sym

    with ``alpha_j = sqrt(2 (m - j) / (m (m + 1)))``. The ancilla register ends
    in the anti-clone states, which are mutually orthogonal.
    """
    if m < 2:
        raise ValueError(f"need at least 2 clones, got m={m}")
    if m > MAX_CLONES:
        raise ValueError("register too large")
    if psi.num_qubits != 1:
        raise ValueError("cloner input must be a single qubit")
    a = psi.amplitudes
    perp = orthogonal_complement(psi)
    out = np.zeros(2 ** (2 * m - 1), dtype=complex)
    for j in range(m):
        alpha = math.sqrt(2 * (m - j) / (m * (m + 1)))
        clones = symmetric_state(m, j, a, perp)
        ancilla = symmetric_state(m - 1, j, perp, a)
        out += alpha * np.kron(clones, ancilla)
    return out


def symmetric_clone(psi: PureState, m: int) -> CloneEnsemble:
    vec = cloner_output(psi, m)
    rho = linalg.reduce_pure(vec, [2] * (2 * m - 1), range(m))
    return CloneEnsemble(DensityMatrix(rho), m, to_bloch(psi))


def universal_clone_fidelity(m: int) -> float:
    """Single-clone fidelity ``(2m + 1) / (3m)`` of the optimal 1 -> m cloner."""
    return nm_fidelity_bound(1, m)


def nm_fidelity_bound(n: int, m: int) -> float:
    """Optimal single-copy fidelity of a symmetric universal n -> m cloner."""
    if n < 1 or m < 1:
        raise ValueError("copy counts must be positive")
    if m < n:
        raise ValueError("cloning cannot reduce copy count")
    return (m * n + m + n) / (m * (n + 2))


def asymmetric_bound_check(fa: float, fb: float, tol: float = 1e-12) -> bool:
    """Whether fidelities (fa, fb) are reachable by an asymmetric 1 -> 2 cloner.

    Tests ``sqrt((1 - fa)(1 - fb)) >= 1/2 - (1 - fa) - (1 - fb)``. Equality
    traces the optimal trade-off curve through (5/6, 5/6) and (1, 1/2);
    pairs above it, such as (1, 1), are out of reach.
    """
    for f in (fa, fb):
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"fidelity {f!r} outside [0, 1]")
    ea, eb = 1.0 - fa, 1.0 - fb
    return math.sqrt(ea * eb) >= 0.5 - ea - eb - tol


def haar_states(num: int, rng: np.random.Generator) -> np.ndarray:
    """``num`` Haar-random qubit kets as rows of a ``(num, 2)`` array."""
    z = rng.standard_normal((num, 2)) + 1j * rng.standard_normal((num, 2))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_baseline(num_samples: int, seed: int, m: int = 1,
                  keep_original: bool = False,
                  reference: PureState | None = None) -> float:
    """Monte Carlo mean fidelity of guessing copies at random.

    Each sample produces ``m`` "copies" of the reference state. With
    ``keep_original`` the first copy is the original itself (fidelity 1) and
    the remaining ``m - 1`` are Haar-random guesses; otherwise all ``m`` are
    guesses. Sampling uses ``numpy.random.Generator(PCG64(seed))``.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    if m < 1 or (keep_original and m < 2):
        raise ValueError("need m >= 1 (m >= 2 when keeping the original)")
    ref = np.array([1, 0], dtype=complex) if reference is None else reference.amplitudes
    rng = np.random.Generator(np.random.PCG64(seed))
    guesses = m - 1 if keep_original else m
    kets = haar_states(num_samples * guesses, rng).reshape(num_samples, guesses, 2)
    fid = np.abs(kets @ ref.conj()) ** 2
    total = fid.sum(axis=1) + (1.0 if keep_original else 0.0)
    return float(np.mean(total / m))
