"""Numerical certificates for the no-go results on purely unitary agents."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import linalg
from .gates import I, X
from .qstate import PureState

CERTIFICATE_TOL = 1e-6


class DecisiveInputError(ValueError):
    """The deliberation outcome is a basis state, so a selector does exist."""


@dataclass(frozen=True)
class NoGoCertificate:
    claim_id: str
    witness: str
    violation_magnitude: float
    tolerance: float
    kind: str = "violation"  # "violation" or "symmetry"
    details: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        if self.kind == "symmetry":
            return self.violation_magnitude <= self.tolerance
        return self.violation_magnitude > self.tolerance

    @property
    def status(self) -> str:
        if self.kind == "symmetry":
            return "symmetry holds" if self.valid else "symmetry broken"
        if self.valid:
            return "violation"
        if self.details.get("boundary"):
            return "boundary case, not a violation"
        return "no violation found"

    @property
    def passed(self) -> bool:
        """Valid, or a recognised boundary case where no violation is expected."""
        return self.valid or bool(self.details.get("boundary"))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["valid"] = self.valid
        d["status"] = self.status
        d["passed"] = self.passed
        return d


def _ket(v) -> str:
    return "[" + ", ".join(f"{complex(c):.6g}" for c in np.ravel(v)) + "]"


def basis_cloner() -> np.ndarray:
    """CNOT completion of |0>|R> -> |0>|0>, |1>|R> -> |1>|1> with |R> = |0>."""
    return np.array([[1, 0, 0, 0],
                     [0, 1, 0, 0],
                     [0, 0, 0, 1],
                     [0, 0, 1, 0]], dtype=complex)


def no_cloning_witness(alpha: complex, beta: complex,
                       tol: float = 1e-10) -> NoGoCertificate:
    """Distance between the basis cloner's output and ``|psi>|psi>``.

    The distance is minimized over a global phase,
    ``sqrt(2 - 2 |<out|psi psi>|)``, so only a physical difference counts.
    """
    alpha, beta = complex(alpha), complex(beta)
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1) > 1e-10:
        raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")
    psi = np.array([alpha, beta])
    ready = np.array([1, 0], dtype=complex)
    out = basis_cloner() @ np.kron(psi, ready)
    ideal = np.kron(psi, psi)
    ov = np.vdot(ideal, out)
    phase = ov / abs(ov) if abs(ov) > 1e-15 else 1.0
    mag = float(np.linalg.norm(out - phase * ideal))
    return NoGoCertificate(
        "no-cloning",
        f"alpha={alpha:.6g}, beta={beta:.6g}",
        mag, tol,
        details={"cloner_output": _ket(out), "ideal_copy": _ket(ideal),
                 # the basis cloner copies |0> and |1> exactly
                 "boundary": bool(min(abs(alpha), abs(beta)) < tol)},
    )


def superposed_action_symmetry(psi: PureState, u0, u1, *,
                               require_unitary: bool = True,
                               tol: float = 1e-12) -> NoGoCertificate:
    """Applying ``(U0 + U1)/c`` cannot tell which branch came from which label.

    The certificate records ``||(U0 psi + U1 psi) - (U1 psi + U0 psi)||``,
    which is zero: swapping the labels leaves the output unchanged. Details
    carry the branch overlap and the normalized output.
    """
    u0, u1 = linalg.as_matrix(u0), linalg.as_matrix(u1)
    s = u0 + u1
    c = math.sqrt(float(np.real(np.trace(s.conj().T @ s))) / s.shape[0])
    unitary = c > 1e-12 and linalg.is_unitary(s / c)
    if require_unitary and not unitary:
        raise ValueError("superposition not unitary")
    v = psi.amplitudes
    x, y = u0 @ v, u1 @ v
    mag = float(np.linalg.norm((x + y) - (y + x)))
    out = x + y
    out_norm = float(np.linalg.norm(out))
    details = {
        "branch_overlap": float(abs(np.vdot(x, y))),
        "superposition_unitary": bool(unitary),
        "normalized_output": ([[float(z.real), float(z.imag)] for z in out / out_norm]
                              if out_norm > 1e-12 else None),
    }
    return NoGoCertificate("superposed-action", f"psi={_ket(v)}", mag, tol,
                           kind="symmetry", details=details)


def _ray(theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def _selector_amplitudes(u1, u2, psi: PureState):
    u1, u2 = linalg.as_matrix(u1), linalg.as_matrix(u2)
    for name, u in (("u1", u1), ("u2", u2)):
        if u.shape != (2, 2) or not linalg.is_unitary(u):
            raise ValueError(f"{name} must be a single-qubit unitary")
    out1, out2 = u1 @ psi.amplitudes, u2 @ psi.amplitudes
    (a, b), (c, d) = out1, out2
    if min(abs(a), abs(b), abs(c), abs(d)) < 1e-12:
        raise DecisiveInputError("decisive input: selector exists here")
    return out1, out2, (a, b, c, d)


def product_deviation(omega: np.ndarray, candidates) -> np.ndarray:
    """Distance of (batched) control (x) target kets from ``|z> (x) |u_i>``.

    ``1 - s_max^2`` (largest Schmidt coefficient) plus the trace distance
    between the leading target Schmidt vector and the nearest candidate.
    """
    m = np.asarray(omega).reshape(*np.shape(omega)[:-1], -1, 2)
    _, s, vh = np.linalg.svd(m)
    # rows of vh are the target Schmidt vectors, since omega = sum_k s_k |z_k> (x) vh_k
    lead = vh[..., 0, :]
    dist = np.min(np.stack([
        np.sqrt(np.clip(1 - np.abs(lead @ np.conj(u)) ** 2, 0, None)) for u in candidates
    ]), axis=0)
    return (1 - s[..., 0] ** 2) + dist


def selector_impossibility(u1, u2, psi: PureState, grid: int = 8,
                           tol: float = CERTIFICATE_TOL) -> NoGoCertificate:
    """Best achievable closeness to "apply the single best action" for ``psi``.

    The selector is a controlled unitary that applies ``u1`` on control
    ``|01>`` and ``u2`` on ``|10>``. Its free rows act on the target as
    ``|00>|psi> -> |00> V00|psi>`` and ``|11>|psi> -> |11> V11|psi>``; only
    the rays ``V00|psi>`` and ``V11|psi>`` affect the output, so each is
    gridded on the Bloch sphere with ``grid + 1`` polar and ``grid``
    azimuthal points. The returned magnitude is the minimum of
    :func:`product_deviation` over the grid. Grids whose sizes divide one
    another are nested, so refining never raises the minimum.
    """
    if grid < 1:
        raise ValueError("grid must be >= 1")
    out1, out2, (a, b, c, d) = _selector_amplitudes(u1, u2, psi)
    theta = math.pi * np.arange(grid + 1) / grid
    phi = 2 * math.pi * np.arange(grid) / grid
    t0, p0, t1, p1 = (g.ravel() for g in np.meshgrid(theta, phi, theta, phi, indexing="ij"))
    r00, r11 = _ray(t0, p0), _ray(t1, p1)
    e = np.eye(2)
    omega = np.zeros((t0.size, 8), dtype=complex)
    omega += a * d * np.kron(np.kron(e[0], e[1]), out1)
    omega += b * c * np.kron(np.kron(e[1], e[0]), out2)
    omega[:, 0:2] += a * c * r00  # |00> block
    omega[:, 6:8] += b * d * r11  # |11> block
    dev = product_deviation(omega, (out1, out2))
    k = int(np.argmin(dev))
    return NoGoCertificate(
        "best-action-selector",
        f"psi={_ket(psi.amplitudes)}, U1 psi={_ket(out1)}, U2 psi={_ket(out2)}",
        float(dev[k]), tol,
        details={
            "grid": grid,
            "grid_points": int(dev.size),
            "control_amplitudes": [_ket([a, b]), _ket([c, d])],
            "argmin_v00_psi": _ket(r00[k]),
            "argmin_v11_psi": _ket(r11[k]),
        },
    )


def single_input_completion(u1, u2, psi: PureState):
    """Completion rows making the output exactly ``|z> (x) U1|psi>`` for one input.

    Returns ``(q00, q11, deviation)`` or ``None`` when the construction does
    not apply. It tailors the images of ``|00>|psi>`` and ``|11>|psi>`` to a
    single ``psi``; such rows are not a controlled unitary and do not work
    for other inputs, which is why :func:`selector_impossibility` searches
    over controlled rows only.
    """
    out1, out2, (a, b, c, d) = _selector_amplitudes(u1, u2, psi)
    perp = lambda v: np.array([-np.conj(v[1]), np.conj(v[0])])
    p1, p2 = perp(out1), perp(out2)
    e = np.eye(2)
    k3 = lambda x, y, z: np.kron(np.kron(x, y), z)
    overlap = np.vdot(p1, p2)
    if abs(overlap) < 1e-12:
        return None
    r = math.sqrt(abs(a * c) ** 2 + abs(b * d) ** 2)
    # cancel the |10>|u1_perp> component left by bc|10>|u2>
    t = -b * c * np.vdot(p1, out2) / overlap
    if abs(t) > r:
        return None
    w = t * k3(e[1], e[0], p2) + math.sqrt(r ** 2 - abs(t) ** 2) * k3(e[0], e[0], out1)
    w_hat = w / np.linalg.norm(w)
    f = k3(e[1], e[1], out1)
    coeff = np.array([a * c, b * d]) / r
    q00 = np.conj(coeff[0]) * w_hat - coeff[1] * f
    q11 = np.conj(coeff[1]) * w_hat + coeff[0] * f
    omega = a * d * k3(e[0], e[1], out1) + b * c * k3(e[1], e[0], out2) + a * c * q00 + b * d * q11
    return q00, q11, float(product_deviation(omega, (out1,)))


def default_certificates(alpha: complex = 1 / math.sqrt(2), beta: complex = 1 / math.sqrt(2),
                         grid: int = 8) -> list[NoGoCertificate]:
    """The three certificates with their documented default inputs."""
    psi = PureState([math.sqrt(3 / 4), math.sqrt(1 / 4)])
    return [
        no_cloning_witness(alpha, beta),
        superposed_action_symmetry(PureState([1, 0]), I, 1j * X),
        selector_impossibility(I, X, psi, grid),
    ]
