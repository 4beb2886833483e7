import numpy as np
import pytest

from catalocc.qstate import Party, PureState, SystemLayout


@pytest.fixture
def rng():
    return np.random.default_rng(20201019)


@pytest.fixture
def qubits():
    return SystemLayout.of(("A", 2, Party.ALICE), ("B", 2, Party.BOB))


@pytest.fixture
def bell_state(qubits):
    return PureState.normalized(qubits, [1, 0, 0, 1])


def rand_layout(rng, labels="ABC", max_dim=3, parties=None):
    parties = parties or [Party.ALICE, Party.BOB, Party.CHARLIE, Party.REFEREE]
    return SystemLayout.of(*[(l, int(rng.integers(1, max_dim + 1)), parties[i % len(parties)]) for i, l in enumerate(labels)])
