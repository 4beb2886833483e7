"""Single-copy convertibility of bipartite pure states, with and without a catalyst."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .measures import first_majorization_violation, majorizes
from .qstate import DensityOperator, PureState, schmidt


@dataclass(frozen=True)
class ConvertibilityReport:
    direct: bool
    catalyzed: tuple[float, ...] | None = None
    violated_index: int | None = None


def schmidt_spectrum(state, cut=None) -> np.ndarray:
    """Squared Schmidt coefficients of a pure state, or a spectrum passed through."""
    if isinstance(state, DensityOperator):
        raise TypeError("convertibility is defined for pure states only")
    if isinstance(state, PureState):
        if cut is None:
            raise ValueError("a cut is required for PureState inputs")
        return schmidt(state, cut).spectrum
    p = np.asarray(state, dtype=float).ravel()
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError(f"not a probability vector: {p}")
    return np.clip(p, 0.0, None)


def nielsen_convertible(psi, phi, cut=None) -> ConvertibilityReport:
    """Whether ``psi -> phi`` is possible by LOCC on a single copy.

    ``psi`` and ``phi`` are pure states (with ``cut``) or their Schmidt spectra.
    When conversion is possible the trivial one-dimensional catalyst is reported.
    """
    p = schmidt_spectrum(psi, cut)
    q = schmidt_spectrum(phi, cut)
    k = first_majorization_violation(p, q)
    if k is None:
        return ConvertibilityReport(direct=True, catalyzed=(1.0,))
    return ConvertibilityReport(direct=False, violated_index=k)


def _catalyzed_spectra(p, q, catalyst) -> tuple[np.ndarray, np.ndarray]:
    c = np.asarray(catalyst, dtype=float).ravel()
    return np.outer(p, c).ravel(), np.outer(q, c).ravel()


def check_catalyzed(psi, phi, catalyst_spectrum, cut=None) -> bool:
    """Whether ``psi ⊗ c -> phi ⊗ c`` satisfies the majorization condition."""
    p = schmidt_spectrum(psi, cut)
    q = schmidt_spectrum(phi, cut)
    c = schmidt_spectrum(catalyst_spectrum)
    return majorizes(*_catalyzed_spectra(p, q, c))


def simplex_grid(dim: int, steps: int) -> Iterator[tuple[int, ...]]:
    """Descending compositions of ``steps`` into ``dim`` parts, lexicographically ascending."""

    def rec(remaining: int, parts: int, cap: int):
        if parts == 1:
            if remaining <= cap:
                yield (remaining,)
            return
        lo = -(-remaining // parts)  # first part can't be below the average
        for first in range(lo, min(cap, remaining) + 1):
            for tail in rec(remaining - first, parts - 1, first):
                yield (first,) + tail

    yield from rec(steps, dim, steps)


def catalyst_search(psi, phi, catalyst_dim: int, grid_steps: int, cut=None) -> tuple[float, ...] | None:
    """First catalyst spectrum on a simplex grid that enables ``psi -> phi``.

    Candidates are descending grid points ``i / grid_steps`` scanned in
    ascending lexicographic order of their integer indices, so the most
    uniform candidates come first. A directly convertible pair short-circuits
    to the pure spectrum ``(1, 0, ...)``.
    """
    if catalyst_dim < 2 or grid_steps < 2:
        raise ValueError("catalyst_dim and grid_steps must both be at least 2")
    p = schmidt_spectrum(psi, cut)
    q = schmidt_spectrum(phi, cut)
    if majorizes(p, q):
        return (1.0,) + (0.0,) * (catalyst_dim - 1)
    grid = np.array(list(simplex_grid(catalyst_dim, grid_steps)), dtype=float) / grid_steps
    # all candidates at once; the first True is the sequential scan's answer
    n = max(p.size, q.size)
    p = np.pad(p, (0, n - p.size))
    q = np.pad(q, (0, n - q.size))
    lhs = np.sort(np.einsum("i,cj->cij", p, grid).reshape(len(grid), -1), axis=1)[:, ::-1].cumsum(axis=1)
    rhs = np.sort(np.einsum("i,cj->cij", q, grid).reshape(len(grid), -1), axis=1)[:, ::-1].cumsum(axis=1)
    ok = np.all(lhs <= rhs + 1e-10, axis=1)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    return tuple(float(x) for x in grid[hits[0]])
