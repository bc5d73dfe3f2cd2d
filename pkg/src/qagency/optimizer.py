"""Search over the free coefficients of superposed control-table entries.

An entry ``V_b = sum_i alpha_i U_i`` over two or more deliberation
unitaries is *free*; single-unitary (decisive) entries are never touched.
Each free entry keeps the unit phases of its reference coefficients and
varies their magnitudes, written as hyperspherical mixing angles:
``k`` components take ``k - 1`` angles. A candidate operator is rescaled to
unit Frobenius norm per dimension and kept only if it is then unitary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg
from .agency import AgencyCircuitSpec, evaluate

INVPHI = (math.sqrt(5) - 1) / 2
FEASIBILITY_TOL = 1e-10
STATISTICS = ("average", "worst")


class InfeasibleEntryError(ValueError):
    """No unitary superposition exists for a free entry."""


def decompose(v, unitaries, tol: float = 1e-9) -> np.ndarray | None:
    """Coefficients of ``v`` in the span of ``unitaries``, or None if outside it."""
    basis = np.stack([np.asarray(u).ravel() for u in unitaries], axis=1)
    target = np.asarray(v).ravel()
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    if np.max(np.abs(basis @ coef - target)) > tol:
        return None
    coef[np.abs(coef) < tol] = 0
    return coef


def mixing_weights(angles) -> np.ndarray:
    """Unit vector from hyperspherical angles (``len(angles) + 1`` entries)."""
    angles = np.asarray(angles, dtype=float)
    w = np.ones(angles.size + 1)
    for i, t in enumerate(angles):
        w[i] *= math.cos(t)
        w[i + 1:] *= math.sin(t)
    return w


def mixing_angles(weights) -> np.ndarray:
    """Inverse of :func:`mixing_weights` for a vector of positive weights."""
    w = np.asarray(weights, dtype=float)
    w = w / np.linalg.norm(w)
    return np.array([math.atan2(np.linalg.norm(w[i + 1:]), w[i]) for i in range(w.size - 1)])


@dataclass(frozen=True)
class FreeEntry:
    bits: str
    components: tuple[int, ...]
    phases: tuple[complex, ...]
    seed_angles: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.seed_angles)


def superpose(unitaries, phases, weights) -> np.ndarray | None:
    """Normalized ``sum_i w_i phase_i U_i``, or None when not unitary."""
    a = sum(w * p * np.asarray(u) for w, p, u in zip(weights, phases, unitaries))
    scale = math.sqrt(float(np.real(np.trace(a.conj().T @ a))) / a.shape[0])
    if scale < 1e-12:
        return None
    a = a / scale
    return a if linalg.is_unitary(a, FEASIBILITY_TOL) else None


@dataclass(frozen=True, eq=False)
class ParamSpace:
    base_spec: AgencyCircuitSpec
    free_entries: tuple[FreeEntry, ...]

    def __post_init__(self):
        for e in self.free_entries:
            if self.entry_operator(e, e.seed_angles) is None:
                raise InfeasibleEntryError(
                    f"entry {e.bits}: no unitary superposition at the seed point")

    @classmethod
    def from_spec(cls, spec: AgencyCircuitSpec) -> "ParamSpace":
        """Free entries are those spanned by two or more deliberation unitaries."""
        entries = []
        for bits, v in spec.control_table.items():
            coef = decompose(v, spec.deliberation_unitaries)
            if coef is None:
                continue
            comps = tuple(int(i) for i in np.flatnonzero(coef))
            if len(comps) < 2:
                continue
            mags = np.abs(coef[list(comps)])
            phases = tuple(complex(c / abs(c)) for c in coef[list(comps)])
            entries.append(FreeEntry(bits, comps, phases, tuple(mixing_angles(mags))))
        return cls(spec, tuple(entries))

    @property
    def dim(self) -> int:
        return sum(e.dim for e in self.free_entries)

    def seed_point(self) -> np.ndarray:
        return np.array([t for e in self.free_entries for t in e.seed_angles], dtype=float)

    def entry_operator(self, entry: FreeEntry, angles) -> np.ndarray | None:
        us = [self.base_spec.deliberation_unitaries[i] for i in entry.components]
        return superpose(us, entry.phases, mixing_weights(angles))

    def spec_at(self, params) -> AgencyCircuitSpec | None:
        """Circuit at ``params``, or None if any entry is infeasible there."""
        params = np.asarray(params, dtype=float)
        if params.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} parameters, got shape {params.shape}")
        updates, pos = {}, 0
        for e in self.free_entries:
            op = self.entry_operator(e, params[pos:pos + e.dim])
            if op is None:
                return None
            updates[e.bits] = op
            pos += e.dim
        return self.base_spec.with_table(updates)


def objective(spec: AgencyCircuitSpec, regime: str = "copies",
              statistic: str = "average") -> float:
    """Average (default) or worst-case fidelity over the test states."""
    if statistic not in STATISTICS:
        raise ValueError(f"statistic must be one of {STATISTICS}")
    agg = evaluate(spec, regime).aggregates["fidelity"]
    return agg.average if statistic == "average" else agg.worst


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       iters: int = 24) -> tuple[float, float]:
    """Golden-section search for a maximum of ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


@dataclass
class OptimizationResult:
    best_spec: AgencyCircuitSpec
    best_value: float
    baseline_value: float
    best_params: np.ndarray
    trace: list  # (params tuple, value), feasible points only, in evaluation order


def optimize(space: ParamSpace, regime: str = "copies", budget: int = 50, seed: int = 0,
             *, statistic: str = "average", sweeps: int = 1, golden_iters: int = 16,
             span: float = math.pi / 2) -> OptimizationResult:
    """Coordinate-wise golden-section refinement plus ``budget`` random restarts.

    The reference table is the first start; restart ``r`` draws its start
    point from ``PCG64(seed)`` in order, so a larger budget only adds
    restarts. A refinement step is kept only if it improves the value, and
    the overall best is replaced only on strict improvement (ties keep the
    earliest start).
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    if space.dim == 0:
        raise ValueError("nothing to optimize: no superposed control-table entries")
    trace: list = []

    def f(x) -> float:
        spec = space.spec_at(x)
        if spec is None:
            return -math.inf
        val = objective(spec, regime, statistic)
        trace.append((tuple(float(t) for t in x), val))
        return val

    def refine(x):
        x = np.array(x, dtype=float)
        val = f(x)
        for _ in range(sweeps):
            for c in range(x.size):
                def along(t, c=c):
                    y = x.copy()
                    y[c] = t
                    return f(y)
                t, v = golden_section_max(along, x[c] - span, x[c] + span, golden_iters)
                if v > val:
                    x[c], val = t, v
        return x, val

    baseline = objective(space.base_spec, regime, statistic)
    best_x, best_val = refine(space.seed_point())
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(budget):
        x0 = rng.uniform(0.0, 2 * math.pi, space.dim)
        x, val = refine(x0)
        if val > best_val:
            best_x, best_val = x, val
    best_spec = space.spec_at(best_x)
    if best_spec is None:  # pragma: no cover - best points are feasible by construction
        raise RuntimeError("optimizer returned an infeasible point")
    best_spec = best_spec.with_table({}, name=f"{space.base_spec.name}*")
    return OptimizationResult(best_spec, best_val, baseline, best_x, trace)
