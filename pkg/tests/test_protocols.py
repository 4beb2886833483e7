import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catalocc.measures import conditional_entropy, marginal_entropy, shannon_entropy
from catalocc.qstate import (
    LayoutError,
    PureState,
    SystemLayout,
    apply_local_unitary,
    basis_state,
    random_pure_state,
    random_unitary,
)
from catalocc.protocols import (
    DEAD_BAND,
    Direction,
    MergingCase,
    ResourceLedger,
    classify,
    distillation_converse_audit,
    distillation_ledger,
    entropy_to_spectrum,
    gain_claim,
    merging_ledger,
    merging_optimality_audit,
    resource_state,
)
from catalocc.states import ghz, w_state

RAB = ("R", "A", "B")
ROLES = (["R"], ["A"], ["B"])
# binary entropy of 1/3, from math.log2 in a separate script
H_THIRD = 0.9182958340544896


def rab_layout(dr, da, db):
    return SystemLayout.of(("R", dr, "Referee"), ("A", da, "Alice"), ("B", db, "Bob"))


def bell_on_ra():
    return PureState.normalized(rab_layout(2, 2, 1), [1, 0, 0, 1])


def bell_on_ab():
    return PureState.normalized(rab_layout(1, 2, 2), [1, 0, 0, 1])


def random_rab(rng):
    dims = rng.integers(1, 4, size=3)
    return random_pure_state(rab_layout(*map(int, dims)), rng)


class TestEntropyToSpectrum:
    def test_examples(self):
        assert entropy_to_spectrum(1.0) == pytest.approx((0.5, 0.5), abs=1e-12)
        assert entropy_to_spectrum(0.0) == (1.0,)
        p = entropy_to_spectrum(0.5)
        assert p == pytest.approx((0.8899721355616403, 0.11002786443835966), abs=1e-10)

    def test_two_bits_is_uniform(self):
        assert entropy_to_spectrum(2.0) == pytest.approx((0.25,) * 4, abs=1e-9)

    def test_minimal_length(self):
        assert len(entropy_to_spectrum(1.2)) == 3
        assert len(entropy_to_spectrum(2.5)) == 6

    @pytest.mark.parametrize("x", np.linspace(0, 3, 61))
    def test_faithful(self, x):
        p = entropy_to_spectrum(x)
        assert shannon_entropy(p) == pytest.approx(x, abs=1e-9)
        assert sum(p) == pytest.approx(1.0, abs=1e-12)
        assert list(p) == sorted(p, reverse=True)

    def test_negative(self):
        with pytest.raises(ValueError):
            entropy_to_spectrum(-0.1)

    def test_resource_state(self):
        psi = resource_state(entropy_to_spectrum(1.5))
        assert psi.layout.labels == ("A~", "B~")
        assert marginal_entropy(psi, ["A~"]) == pytest.approx(1.5, abs=1e-9)


class TestMergingLedger:
    def test_bell_on_ra(self):
        led = merging_ledger(bell_on_ra())
        assert led.case is MergingCase.POSITIVE
        assert led.conditional_entropy == pytest.approx(1.0)
        assert led.resource_entropy == pytest.approx(1.0)

    def test_bell_on_ab(self):
        led = merging_ledger(bell_on_ab())
        assert led.case is MergingCase.NEGATIVE
        assert led.conditional_entropy == pytest.approx(-1.0)
        assert led.resource_entropy == pytest.approx(1.0)

    def test_ghz(self):
        led = merging_ledger(ghz(labels=RAB), ROLES)
        assert led.case is MergingCase.ZERO
        assert led.resource_entropy == 0.0 and led.resource_spectrum == (1.0,)

    def test_mixed_rejected(self):
        with pytest.raises(TypeError):
            merging_ledger(bell_on_ab().density())

    def test_needs_three_parties(self, bell_state):
        with pytest.raises(LayoutError):
            merging_ledger(bell_state)

    def test_classify_dead_band(self):
        assert classify(0.5 * DEAD_BAND) is MergingCase.ZERO
        assert classify(-0.5 * DEAD_BAND) is MergingCase.ZERO
        assert classify(2 * DEAD_BAND) is MergingCase.POSITIVE
        assert classify(-2 * DEAD_BAND) is MergingCase.NEGATIVE

    def test_json_round_trip(self):
        led = merging_ledger(bell_on_ab())
        doc = json.loads(led.to_json())
        assert set(doc) == {"conditional_entropy", "case", "resource_spectrum", "resource_entropy", "direction"}
        assert doc["case"] == "negative_yields_resource"
        assert ResourceLedger.from_dict(doc) == led

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_trichotomy_and_consistency(self, seed):
        psi = random_rab(np.random.default_rng(seed))
        led = merging_ledger(psi)
        h = conditional_entropy(psi, ["A"], ["B"])
        assert led.conditional_entropy == pytest.approx(h, abs=1e-12)
        assert (led.case is MergingCase.ZERO) == (abs(h) < DEAD_BAND)
        if led.case is MergingCase.POSITIVE:
            assert led.resource_entropy == pytest.approx(h, abs=1e-9)
        if led.case is MergingCase.NEGATIVE:
            assert led.resource_entropy == pytest.approx(-h, abs=1e-9)
        assert shannon_entropy(led.resource_spectrum) == pytest.approx(led.resource_entropy, abs=1e-9)


class TestMergingAudit:
    def test_bell_on_ab_gain(self):
        psi = bell_on_ab()
        led = merging_ledger(psi)
        assert merging_optimality_audit(psi, led)
        assert not merging_optimality_audit(psi, gain_claim(led, 1.5))

    def test_case_zero(self):
        psi = ghz(labels=RAB)
        assert merging_optimality_audit(psi, merging_ledger(psi, ROLES), ROLES)

    def test_positive_case(self):
        psi = bell_on_ra()
        led = merging_ledger(psi)
        assert merging_optimality_audit(psi, led)
        # paying less than H(A|B) contradicts monotonicity
        cheap = dataclasses.replace(led, resource_spectrum=entropy_to_spectrum(0.5), resource_entropy=0.5)
        assert not merging_optimality_audit(psi, cheap)

    def test_inconsistent_spectrum(self):
        psi = bell_on_ab()
        led = dataclasses.replace(merging_ledger(psi), resource_spectrum=(1.0,))
        assert not merging_optimality_audit(psi, led)

    def test_soundness_random(self, rng):
        for _ in range(50):
            psi = random_rab(rng)
            led = merging_ledger(psi)
            assert merging_optimality_audit(psi, led)
            limit = max(-led.conditional_entropy, 0.0)
            assert not merging_optimality_audit(psi, gain_claim(led, limit + 1e-6 + rng.uniform(0, 1)))


class TestDistillation:
    def test_ghz(self):
        led = distillation_ledger(ghz())
        assert led.resource_entropy == pytest.approx(1.0, abs=1e-9)
        assert led.direction is Direction.MERGE_C_TO_B

    def test_w(self):
        led = distillation_ledger(w_state())
        assert led.resource_entropy == pytest.approx(H_THIRD, abs=1e-9)
        assert H_THIRD == pytest.approx(-(1 / 3) * math.log2(1 / 3) - (2 / 3) * math.log2(2 / 3), abs=1e-15)

    def test_product(self):
        layout = SystemLayout.of(("A", 2, "Alice"), ("B", 2, "Bob"), ("C", 2, "Charlie"))
        assert distillation_ledger(basis_state(layout, 5)).resource_entropy == pytest.approx(0.0, abs=1e-12)

    def test_direction(self):
        # A holds two qubits entangled with B and C, B only one
        layout = SystemLayout.of(("A", 4, "Alice"), ("B", 2, "Bob"), ("C", 2, "Charlie"))
        amps = np.zeros(16)
        amps[[0, 5, 10, 15]] = 0.5  # |a1 a2>|b>|c> with a1 = b, a2 = c
        psi = PureState(layout, amps)
        led = distillation_ledger(psi)
        assert led.resource_entropy == pytest.approx(1.0)
        assert led.direction is Direction.MERGE_C_TO_A

    def test_converse(self):
        assert distillation_converse_audit(ghz(), 1.0)
        assert not distillation_converse_audit(ghz(), 1.1)
        assert distillation_converse_audit(w_state(), H_THIRD + 0.5e-9)
        # six-decimal quote sits 1.7e-7 above h(1/3)
        assert not distillation_converse_audit(w_state(), 0.918296)
        assert distillation_converse_audit(w_state(), 0.918296, tol=1e-6)

    def test_converse_random(self, rng):
        layout = SystemLayout.of(("A", 2, "Alice"), ("B", 3, "Bob"), ("C", 2, "Charlie"))
        for _ in range(50):
            psi = random_pure_state(layout, rng)
            limit = min(marginal_entropy(psi, ["A"]), marginal_entropy(psi, ["B"]))
            assert distillation_converse_audit(psi, limit)
            assert not distillation_converse_audit(psi, limit + 1e-6)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_local_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        layout = SystemLayout.of(("A", 2, "Alice"), ("B", 2, "Bob"), ("C", 3, "Charlie"))
        psi = random_pure_state(layout, rng)
        before = distillation_ledger(psi).resource_entropy
        label = ["A", "B", "C"][int(rng.integers(3))]
        u = random_unitary(layout.dim_of([label]), rng)
        after = distillation_ledger(apply_local_unitary(psi, u, [label])).resource_entropy
        assert after == pytest.approx(before, abs=1e-9)
        assert before == pytest.approx(min(marginal_entropy(psi, ["A"]), marginal_entropy(psi, ["B"])), abs=1e-9)
