"""Dense complex linear algebra for small qubit registers.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Column vectors
(kets) are ``(d, 1)`` arrays; 1-d arrays are accepted where a ket is
expected and promoted.
"""
from __future__ import annotations

import string
from typing import Sequence

import numpy as np

MAX_QUBITS = 12
MAX_DIM = 2 ** MAX_QUBITS

STRUCTURAL_TOL = 1e-10
TRACE_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-d complex array, promoting 1-d input to a column."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(*mats) -> np.ndarray:
    """Tensor product of one or more matrices, leftmost factor most significant.

    Raises ``ValueError("register too large")`` if either output dimension
    would exceed ``MAX_DIM``.
    """
    if not mats:
        raise ValueError("kron needs at least one operand")
    out = as_matrix(mats[0])
    for m in mats[1:]:
        m = as_matrix(m)
        rows, cols = out.shape[0] * m.shape[0], out.shape[1] * m.shape[1]
        if rows > MAX_DIM or cols > MAX_DIM:
            raise ValueError("register too large")
        out = np.kron(out, m)
    return out


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def is_unitary(a, tol: float = STRUCTURAL_TOL) -> bool:
    """True iff ``max |A A^dag - I| <= tol``."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"unitarity check needs a square matrix, got {m.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    dev = m @ m.conj().T - np.eye(m.shape[0])
    return bool(np.max(np.abs(dev)) <= tol)


def matmul_chain(ops: Sequence) -> np.ndarray:
    """Compose operators given in application order.

    ``matmul_chain([A, B, C])`` returns ``C @ B @ A``: the first listed
    operator acts first on a state.
    """
    if not ops:
        raise ValueError("empty operator chain")
    mats = [as_matrix(o) for o in ops]
    out = mats[0]
    for i in range(1, len(mats)):
        nxt = mats[i]
        if nxt.shape[1] != out.shape[0]:
            raise ValueError(
                f"dimension mismatch between ops[{i - 1}] (shape {mats[i - 1].shape}) "
                f"and ops[{i}] (shape {nxt.shape})"
            )
        out = nxt @ out
    return out


def _check_dims(total: int, dims: Sequence[int], keep) -> tuple[list[int], list[int]]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise ValueError("subsystem dimensions must be positive")
    if int(np.prod(dims)) != total:
        raise ValueError(f"product of dims {dims} != matrix dimension {total}")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"subsystem index out of range for dims {dims}: {keep}")
    return dims, keep


def partial_trace(rho, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not in ``keep``.

    ``dims`` lists subsystem dimensions, leftmost most significant (the
    ``kron`` convention). Kept subsystems appear in ascending index order.
    """
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError("partial trace needs a square matrix")
    dims, keep = _check_dims(rho.shape[0], dims, keep)
    n = len(dims)
    letters = string.ascii_letters
    row = list(letters[:n])
    col = [letters[n + i] if i in keep else row[i] for i in range(n)]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    expr = f"{''.join(row)}{''.join(col)}->{''.join(out)}"
    kd = int(np.prod([dims[i] for i in keep]))
    return np.einsum(expr, rho.reshape(dims + dims)).reshape(kd, kd)


def reduce_pure(vec, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced density matrix of the pure state ``vec`` on ``keep``.

    Same result as ``partial_trace(vec vec^dag, dims, keep)`` without forming
    the full projector.
    """
    v = np.asarray(vec, dtype=complex).reshape(-1)
    dims, keep = _check_dims(v.size, dims, keep)
    rest = [i for i in range(len(dims)) if i not in keep]
    t = v.reshape(dims).transpose(keep + rest)
    kd = int(np.prod([dims[i] for i in keep]))
    m = t.reshape(kd, -1)
    return m @ m.conj().T
