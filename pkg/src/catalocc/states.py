"""Named states used by the command line and the tests."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .qstate import Party, PureState, SystemLayout, random_pure_state

JP_PSI = (0.4, 0.4, 0.1, 0.1)
JP_PHI = (0.5, 0.25, 0.25)

_DEFAULT_PARTIES = (Party.ALICE, Party.BOB, Party.CHARLIE)


def _layout(labels: Sequence[str], dims: Sequence[int], parties: Sequence[Party] | None) -> SystemLayout:
    parties = parties or _DEFAULT_PARTIES[: len(labels)]
    return SystemLayout.of(*zip(labels, dims, parties))


def schmidt_state(spectrum, dim: int | None = None, labels=("A", "B"), parties=None) -> PureState:
    """sum_i sqrt(p_i) |i>|i> on two dim-level systems."""
    p = np.asarray(spectrum, dtype=float)
    dim = dim or p.size
    amps = np.zeros(dim * dim, dtype=complex)
    amps[np.arange(p.size) * (dim + 1)] = np.sqrt(p)
    return PureState.normalized(_layout(labels, (dim, dim), parties), amps)


def bell(labels=("A", "B"), parties=None) -> PureState:
    return schmidt_state((0.5, 0.5), labels=labels, parties=parties)


def ghz(labels=("A", "B", "C"), parties=None) -> PureState:
    amps = np.zeros(8)
    amps[0] = amps[7] = 1.0
    return PureState.normalized(_layout(labels, (2, 2, 2), parties), amps)


def w_state(labels=("A", "B", "C"), parties=None) -> PureState:
    amps = np.zeros(8)
    amps[[1, 2, 4]] = 1.0
    return PureState.normalized(_layout(labels, (2, 2, 2), parties), amps)


def jp_psi(labels=("A", "B"), parties=None) -> PureState:
    return schmidt_state(JP_PSI, dim=4, labels=labels, parties=parties)


def jp_phi(labels=("A", "B"), parties=None) -> PureState:
    return schmidt_state(JP_PHI, dim=4, labels=labels, parties=parties)


BUILTINS = {
    "bell": bell,
    "ghz": ghz,
    "w": w_state,
    "jp-psi": jp_psi,
    "jp-phi": jp_phi,
}


def builtin(name: str, labels=None, parties=None, seed: int | None = None) -> PureState:
    """Look up a named state; ``haar`` draws a random two-qubit pure state from ``seed``."""
    if name == "haar":
        labels = labels or ("A", "B")
        layout = _layout(labels, (2,) * len(labels), parties)
        return random_pure_state(layout, np.random.default_rng(seed))
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown built-in state {name!r}; choose from {sorted(BUILTINS) + ['haar']}") from None
    kwargs = {}
    if labels is not None:
        kwargs["labels"] = labels
    if parties is not None:
        kwargs["parties"] = parties
    return factory(**kwargs)
