"""Entropies, distances and majorization. All entropies are in bits."""

from __future__ import annotations

import numpy as np

from .qstate import (
    DensityOperator,
    LayoutError,
    PureState,
    State,
    clamped_eigh,
    reduced,
    schmidt,
    split_cut,
)

MAJORIZATION_TOL = 1e-10
PURITY_TOL = 1e-8


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)) + 0.0)


def binary_entropy(p: float) -> float:
    return shannon_entropy([p, 1.0 - p])


def von_neumann_entropy(rho: State) -> float:
    if isinstance(rho, PureState):
        return 0.0
    w, _ = clamped_eigh(rho.matrix)
    return max(shannon_entropy(np.clip(w, 0.0, None)), 0.0)


def entanglement_entropy(psi: PureState, cut) -> float:
    """Entropy of either reduced state of a pure bipartite state."""
    if not isinstance(psi, PureState):
        raise TypeError("entanglement_entropy needs a PureState")
    return shannon_entropy(schmidt(psi, cut).spectrum)


def marginal_entropy(state: State, labels) -> float:
    """H of the marginal on ``labels``; an empty label set has entropy 0."""
    labels = list(labels)
    if not labels:
        return 0.0
    if sorted(labels) == sorted(state.layout.labels):
        return von_neumann_entropy(state)
    if isinstance(state, PureState):
        return entanglement_entropy(state, labels)
    return von_neumann_entropy(reduced(state, labels))


def conditional_entropy(rho: State, a_labels, b_labels) -> float:
    """H(A|B) = H(AB) - H(B); may be negative."""
    a, b = list(a_labels), list(b_labels)
    if set(a) & set(b):
        raise LayoutError(f"conditional entropy needs disjoint label sets, both contain {sorted(set(a) & set(b))}")
    rho.layout.indices(a + b)
    return marginal_entropy(rho, a + b) - marginal_entropy(rho, b)


def _check_same_layout(rho: State, sigma: State) -> None:
    if rho.layout != sigma.layout:
        raise LayoutError(f"states live on different layouts: {rho.layout.labels} vs {sigma.layout.labels}")


def trace_distance(rho: State, sigma: State) -> float:
    _check_same_layout(rho, sigma)
    delta = rho.density().matrix - sigma.density().matrix
    w = np.linalg.eigvalsh(0.5 * (delta + delta.conj().T))
    return float(min(max(0.5 * np.sum(np.abs(w)), 0.0), 1.0))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = clamped_eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho: State, sigma: State) -> float:
    """Root fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)) (not squared)."""
    _check_same_layout(rho, sigma)
    if isinstance(sigma, PureState) or isinstance(rho, PureState):
        pure, other = (sigma, rho) if isinstance(sigma, PureState) else (rho, sigma)
        v = pure.amplitudes
        overlap = np.real(np.vdot(v, other.density().matrix @ v))
        return float(min(np.sqrt(max(overlap, 0.0)), 1.0))
    # nuclear norm of sqrt(rho) sqrt(sigma); avoids square-rooting tiny eigenvalues
    sv = np.linalg.svd(_psd_sqrt(rho.matrix) @ _psd_sqrt(sigma.matrix), compute_uv=False)
    return float(min(np.sum(sv), 1.0))


def fuchs_van_de_graaf_gap(rho: State, sigma: State) -> float:
    """sqrt(1 - F^2) - D, which is nonnegative for all state pairs."""
    f = fidelity(rho, sigma)
    return float(np.sqrt(max(1.0 - f * f, 0.0)) - trace_distance(rho, sigma))


def _padded_sorted(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    n = max(p.size, q.size)
    p = np.sort(np.pad(p, (0, n - p.size)))[::-1]
    q = np.sort(np.pad(q, (0, n - q.size)))[::-1]
    return p, q


def first_majorization_violation(p, q, tol: float = MAJORIZATION_TOL) -> int | None:
    """Smallest k (1-based) with sum_{i<=k} p_i > sum_{i<=k} q_i + tol, else None."""
    p, q = _padded_sorted(p, q)
    bad = np.flatnonzero(np.cumsum(p) > np.cumsum(q) + tol)
    return int(bad[0]) + 1 if bad.size else None


def majorizes(p, q, tol: float = MAJORIZATION_TOL) -> bool:
    """True iff p ≺ q: q's sorted partial sums dominate p's.

    With p, q the squared Schmidt spectra of |psi>, |phi>, this is exactly the
    condition for converting |psi> into |phi> by LOCC.
    """
    return first_majorization_violation(p, q, tol) is None


def squashed_entanglement_pure(state: State, cut) -> float:
    """Squashed entanglement of a pure state, i.e. its entanglement entropy.

    Mixed inputs are rejected: the extension infimum is not evaluated here.
    """
    if isinstance(state, DensityOperator):
        purity = state.purity()
        if purity <= 1.0 - PURITY_TOL:
            raise ValueError(f"squashed entanglement only available for pure states (purity {purity:.10f})")
        split_cut(state.layout, cut)
        w, v = clamped_eigh(state.matrix)
        state = PureState.normalized(state.layout, v[:, int(np.argmax(w))])
    return entanglement_entropy(state, cut)
