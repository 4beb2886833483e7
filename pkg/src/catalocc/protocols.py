"""Entropy ledgers for catalytic state merging and assisted distillation.

Merging Alice's share of |psi>^{RAB} to Bob is classified by H(A|B):
zero needs nothing, positive needs a pure state with entanglement H(A|B),
negative leaves Alice and Bob with a pure state of entanglement -H(A|B).
The audits check these numbers against squashed-entanglement bookkeeping,
which on pure states reduces to entanglement entropy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .measures import binary_entropy, marginal_entropy, shannon_entropy, squashed_entanglement_pure
from .qstate import LayoutError, Party, PureState, Subsystem, SystemLayout, tensor

DEAD_BAND = 1e-9
AUDIT_TOL = 1e-9


class MergingCase(str, Enum):
    ZERO = "zero"
    POSITIVE = "positive_needs_resource"
    NEGATIVE = "negative_yields_resource"


class Direction(str, Enum):
    MERGE_C_TO_A = "merge_C_to_A"
    MERGE_C_TO_B = "merge_C_to_B"


@dataclass(frozen=True)
class ResourceLedger:
    conditional_entropy: float
    case: MergingCase
    resource_spectrum: tuple[float, ...]
    resource_entropy: float
    direction: Direction | None = None

    def to_dict(self) -> dict:
        return {
            "conditional_entropy": self.conditional_entropy,
            "case": self.case.value,
            "resource_spectrum": list(self.resource_spectrum),
            "resource_entropy": self.resource_entropy,
            "direction": self.direction.value if self.direction else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "ResourceLedger":
        return cls(
            conditional_entropy=float(doc["conditional_entropy"]),
            case=MergingCase(doc["case"]),
            resource_spectrum=tuple(float(x) for x in doc["resource_spectrum"]),
            resource_entropy=float(doc["resource_entropy"]),
            direction=Direction(doc["direction"]) if doc.get("direction") else None,
        )


def classify(conditional_entropy: float) -> MergingCase:
    if abs(conditional_entropy) < DEAD_BAND:
        return MergingCase.ZERO
    return MergingCase.POSITIVE if conditional_entropy > 0 else MergingCase.NEGATIVE


def entropy_to_spectrum(target_entropy: float) -> tuple[float, ...]:
    """Shortest probability vector with the given Shannon entropy (bits).

    Up to one bit this is (p, 1 - p) with p >= 1/2. Above one bit it has
    d = ceil(2^H) entries: one leading entry p and d - 1 equal entries.
    """
    h = float(target_entropy)
    if h < 0:
        raise ValueError(f"entropy must be nonnegative, got {h}")
    if h < 1e-15:
        return (1.0,)
    if h <= 1.0:
        if h >= 1.0 - 1e-15:
            return (0.5, 0.5)
        p = brentq(lambda x: binary_entropy(x) - h, 0.5, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        return (p, 1.0 - p)
    d = math.ceil(2.0 ** h - 1e-12)
    if abs(math.log2(d) - h) < 1e-15:
        return (1.0 / d,) * d

    def entropy_of(p):
        rest = (1.0 - p) / (d - 1)
        return shannon_entropy([p] + [rest] * (d - 1))

    p = brentq(lambda x: entropy_of(x) - h, 1.0 / d, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return (p,) + ((1.0 - p) / (d - 1),) * (d - 1)


def resource_state(spectrum, labels=("A~", "B~")) -> PureState:
    """sum_i sqrt(p_i) |ii> shared between Alice and Bob."""
    p = np.asarray(spectrum, dtype=float)
    d = p.size
    layout = SystemLayout.of((labels[0], d, Party.ALICE), (labels[1], d, Party.BOB))
    amps = np.zeros(d * d, dtype=complex)
    amps[np.arange(d) * (d + 1)] = np.sqrt(np.clip(p, 0.0, None))
    return PureState.normalized(layout, amps)


def _resolve_roles(psi: PureState, parties: tuple[Party, ...], roles) -> list[list[str]]:
    if roles is not None:
        out = [[r] if isinstance(r, str) else list(r) for r in roles]
        psi.layout.indices([l for group in out for l in group])
        return out
    by_party = [list(psi.layout.labels_of(p)) for p in parties]
    covered = sum(len(g) for g in by_party)
    if all(by_party) and covered == len(psi.layout):
        return by_party
    if len(psi.layout) == 3:
        return [[l] for l in psi.layout.labels]
    names = "/".join(p.value for p in parties)
    raise LayoutError(f"cannot assign {names} roles to layout {list(psi.layout.labels)}; pass roles explicitly")


def _require_pure(psi) -> PureState:
    if not isinstance(psi, PureState):
        raise TypeError("ledgers are defined for pure tripartite states")
    return psi


def merging_ledger(psi: PureState, roles=None) -> ResourceLedger:
    """Ledger for merging A into B given |psi>^{RAB}.

    ``roles`` optionally gives the (R, A, B) labels; by default they are read
    from the Referee/Alice/Bob party tags, or taken positionally.
    """
    psi = _require_pure(psi)
    _, a, b = _resolve_roles(psi, (Party.REFEREE, Party.ALICE, Party.BOB), roles)
    h = marginal_entropy(psi, a + b) - marginal_entropy(psi, b)
    case = classify(h)
    if case is MergingCase.ZERO:
        return ResourceLedger(h, case, (1.0,), 0.0)
    amount = abs(h)
    return ResourceLedger(h, case, entropy_to_spectrum(amount), amount)


def gain_claim(ledger: ResourceLedger, gain: float) -> ResourceLedger:
    """Copy of ``ledger`` asserting that merging also yields ``gain`` ebits."""
    return replace(ledger, case=MergingCase.NEGATIVE, resource_spectrum=entropy_to_spectrum(gain), resource_entropy=gain)


def _merged(psi: PureState, a: list[str]) -> PureState:
    """|psi>^{RBB'}: Alice's subsystems handed to Bob under primed labels."""
    subs = tuple(
        Subsystem(s.label + "'", s.dim, Party.BOB) if s.label in a else s
        for s in psi.layout.subsystems
    )
    return PureState(SystemLayout(subs), psi.amplitudes)


def merging_optimality_audit(psi: PureState, ledger: ResourceLedger, roles=None) -> bool:
    """Check a merging ledger against squashed-entanglement monotonicity.

    Assembles the initial and final pure states of the merging task, evaluates
    Bob's squashed entanglement with everyone else in both, confirms those
    values equal the entropy expressions they should, and requires that Bob's
    entanglement does not grow.
    """
    psi = _require_pure(psi)
    r, a, b = _resolve_roles(psi, (Party.REFEREE, Party.ALICE, Party.BOB), roles)
    h_ab = marginal_entropy(psi, a + b)
    h_b = marginal_entropy(psi, b)
    merged = _merged(psi, a)
    a_primed = [l + "'" for l in a]
    resource = resource_state(ledger.resource_spectrum)
    e_res = ledger.resource_entropy
    if abs(shannon_entropy(ledger.resource_spectrum) - e_res) > AUDIT_TOL:
        return False

    if ledger.case is MergingCase.NEGATIVE:
        initial = squashed_entanglement_pure(psi, b)
        final = squashed_entanglement_pure(tensor(merged, resource), b + a_primed + ["B~"])
        expected = (h_b, h_ab + e_res)
    elif ledger.case is MergingCase.POSITIVE:
        initial = squashed_entanglement_pure(tensor(psi, resource), b + ["B~"])
        final = squashed_entanglement_pure(merged, b + a_primed) if r else 0.0
        expected = (h_b + e_res, h_ab)
    else:
        initial = squashed_entanglement_pure(psi, b)
        final = squashed_entanglement_pure(merged, b + a_primed) if r else 0.0
        expected = (h_b, h_ab)
    if abs(initial - expected[0]) > AUDIT_TOL or abs(final - expected[1]) > AUDIT_TOL:
        return False
    return final <= initial + AUDIT_TOL


def distillation_ledger(psi: PureState, roles=None) -> ResourceLedger:
    """Best entanglement Alice and Bob can end with when Charlie merges his share away.

    The reported conditional entropy is H(C|A) or H(C|B) for the chosen
    direction; ties go to Bob.
    """
    psi = _require_pure(psi)
    a, b, _ = _resolve_roles(psi, (Party.ALICE, Party.BOB, Party.CHARLIE), roles)
    h_a = marginal_entropy(psi, a)
    h_b = marginal_entropy(psi, b)
    if h_b < h_a - DEAD_BAND:
        direction, cond = Direction.MERGE_C_TO_A, h_b - h_a
    else:
        direction, cond = Direction.MERGE_C_TO_B, h_a - h_b
    amount = min(h_a, h_b)
    return ResourceLedger(cond, classify(cond), entropy_to_spectrum(amount), amount, direction)


def distillation_converse_audit(psi: PureState, claimed_entropy: float, roles=None, tol: float = AUDIT_TOL) -> bool:
    """Whether ``claimed_entropy`` respects both single-party squashed-entanglement caps.

    Claims are accepted up to ``tol`` above the cap. Values quoted to six
    decimals (0.918296 for the W state) need ``tol=1e-6``.
    """
    psi = _require_pure(psi)
    a, b, _ = _resolve_roles(psi, (Party.ALICE, Party.BOB, Party.CHARLIE), roles)
    cap = min(squashed_entanglement_pure(psi, a), squashed_entanglement_pure(psi, b))
    return claimed_entropy <= cap + tol
