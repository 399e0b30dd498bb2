import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brickqec.brickwork import BlockLayout, BrickworkSpec, sample_circuit, task_rng
from brickqec.codecheck import (
    MCEstimate,
    code_distance,
    estimate_failure_probability,
    forward_enumeration_check,
    four_two_two_encoder,
    is_code,
)
from brickqec.pauli import CliffordTableau, PauliOperator
from brickqec.statmech import ParameterError, QECWeighting, partition_function


def embed(text: str, sites, n: int) -> PauliOperator:
    """Place a short Pauli string (sign first) onto ``sites`` of an ``n``-qubit register."""
    letters = ["I"] * n
    for site, letter in zip(sites, text[1:]):
        letters[site] = letter
    return PauliOperator.from_str(text[0] + "".join(letters))


def padded_four_two_two():
    """The [[4,2,2]] encoder on qubits 0, 1, 3, 4 of six, with ancillas 2 and 5 left idle."""
    u4, _ = four_two_two_encoder()
    sites = [0, 1, 3, 4]
    n = 6
    rows = [None] * (2 * n)
    for local, q in enumerate(sites):
        rows[q] = embed(str(u4.image(local)), sites, n)
        rows[n + q] = embed(str(u4.image(4 + local)), sites, n)
    for q in (2, 5):
        rows[q] = PauliOperator.single(n, q, "X")
        rows[n + q] = PauliOperator.single(n, q, "Z")
    return CliffordTableau.from_images(rows), BlockLayout(1, 3, 2)


def test_four_two_two_encoder():
    u, layout = four_two_two_encoder()
    assert u.is_symplectic()
    assert is_code(u, layout, 1)
    check = is_code(u, layout, 2)
    assert not check and check.witness.mu.weight == 2
    report = code_distance(u, layout, cap=4)
    assert report.distance == 2
    assert forward_enumeration_check(u, layout, 1) and not forward_enumeration_check(u, layout, 2)


def test_stabilizers_are_the_ancilla_z_images():
    u, _ = four_two_two_encoder()
    assert str(u.image(4 + 1)) == "+XXXX"
    assert str(u.image(4 + 3)) == "+ZZZZ"


def test_degenerate_code_with_weight_one_stabilizers():
    u, layout = padded_four_two_two()
    assert u.is_symplectic()
    # Z on an idle ancilla is a weight-1 stabilizer; it must not count as a failure
    assert is_code(u, layout, 1)
    assert code_distance(u, layout, cap=3).distance == 2
    assert forward_enumeration_check(u, layout, 1)
    assert not forward_enumeration_check(u, layout, 2)


def test_identity_encoder_has_distance_one():
    layout = BlockLayout(1, 2, 2)
    u = CliffordTableau.identity(4)
    report = code_distance(u, layout, cap=2)
    assert report.distance == 1
    w = report.witness
    assert w.mu.weight == 1 and set(w.nu_ancilla) <= {"I", "Z"}
    assert report.to_dict()["witness"]["mu"] == str(w.mu)


def test_cap_limits_the_search():
    u, layout = four_two_two_encoder()
    report = code_distance(u, layout, cap=1)
    assert report.distance is None and report.at_least == 2


def test_argument_validation():
    u, layout = four_two_two_encoder()
    with pytest.raises(ParameterError):
        is_code(u, layout, 0)
    with pytest.raises(ParameterError):
        code_distance(u, layout, 0)
    with pytest.raises(ParameterError):
        is_code(u, BlockLayout(1, 3, 2), 1)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([(1, 2, 2), (1, 3, 2), (2, 4, 2), (1, 2, 3), (1, 4, 2)]),
    st.integers(0, 4),
    st.integers(1, 3),
    st.integers(0, 2**31),
)
def test_backprop_agrees_with_forward_enumeration(layout, depth, d, seed):
    spec = BrickworkSpec(BlockLayout(*layout), depth)
    u = sample_circuit(spec, task_rng(seed, 0))
    assert bool(is_code(u, spec.layout, d)) == forward_enumeration_check(u, spec.layout, d)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31))
def test_distance_is_local_in_shallow_circuits(depth, seed):
    # each logical qubit spreads over at most 2*depth sites, so a logical
    # error of that weight always exists
    spec = BrickworkSpec(BlockLayout(1, 8, 2), depth)
    u = sample_circuit(spec, task_rng(seed, 1))
    report = code_distance(u, spec.layout, cap=2 * depth)
    assert report.distance is not None and report.distance <= 2 * depth


def test_mc_estimate_statistics():
    est = MCEstimate.from_values([0, 1, 1, 0], seed=3)
    assert est.mean == 0.5
    assert est.stderr == pytest.approx(np.std([0, 1, 1, 0], ddof=1) / 2)
    assert math.isnan(MCEstimate.from_values([1.0], seed=0).stderr)


def test_failure_estimate_is_independent_of_workers():
    spec = BrickworkSpec(BlockLayout(1, 2, 3), 2)
    a = estimate_failure_probability(spec, 1, samples=60, seed=17, workers=1)
    b = estimate_failure_probability(spec, 1, samples=60, seed=17, workers=2)
    assert a == b
    with pytest.raises(ParameterError):
        estimate_failure_probability(spec, 1, samples=0, seed=1)


@pytest.mark.slow
def test_failure_probability_below_partition_function():
    spec = BrickworkSpec(BlockLayout(1, 2, 3), 4)
    est = estimate_failure_probability(spec, 1, samples=2000, seed=5)
    z = partition_function(spec, QECWeighting(1)).value
    assert est.mean <= z + 4 * est.stderr
