import numpy as np
import pytest
from hypothesis import given, strategies as st

from brickqec.brickwork import (
    BlockLayout,
    BrickworkSpec,
    LayoutError,
    build_schedule,
    circuit_tableau,
    layer_pairs,
    logical_positions,
    sample_circuit,
    sample_gate_indices,
    schedule_arrays,
    task_rng,
)
from brickqec.pauli import CliffordTableau, TwoQubitClifford, apply_gate


def test_layout_positions():
    layout = BlockLayout(2, 5, 2)
    assert (layout.n, layout.k) == (10, 4)
    assert logical_positions(layout) == {0, 1, 5, 6}
    assert layout.ancilla_positions() == [2, 3, 4, 7, 8, 9]
    assert layout.logical_mask() == 0b1100011
    assert layout.rate == pytest.approx(0.4)


@pytest.mark.parametrize(
    "args, field",
    [((0, 2, 2), "a"), ((2, 2, 2), "b"), ((1, 2, 0), "m"), ((1, 3, 1), "m"), ((1.0, 2, 2), "a")],
)
def test_invalid_layouts_name_the_field(args, field):
    with pytest.raises(LayoutError) as info:
        BlockLayout(*args)
    assert info.value.field == field


def test_negative_depth_rejected():
    with pytest.raises(LayoutError) as info:
        BrickworkSpec(BlockLayout(1, 2, 2), -1)
    assert info.value.field == "depth"


def test_schedule_for_six_qubits():
    spec = BrickworkSpec(BlockLayout(1, 3, 2), 3)
    assert build_schedule(spec) == [
        (0, 1), (2, 3), (4, 5),
        (1, 2), (3, 4), (5, 0),
        (0, 1), (2, 3), (4, 5),
    ]
    assert spec.gate_count == 9


def test_two_qubit_ring_wraps_onto_the_same_pair():
    assert layer_pairs(2, 0) == [(0, 1)]
    assert layer_pairs(2, 1) == [(1, 0)]


def test_odd_ring_rejected():
    with pytest.raises(LayoutError):
        layer_pairs(5, 0)


@given(st.integers(1, 12), st.integers(0, 8))
def test_schedule_shape(half, depth):
    n = 2 * half
    spec = BrickworkSpec(BlockLayout(1, 2, half), depth)
    pairs = build_schedule(spec)
    assert len(pairs) == spec.gate_count == n * depth // 2
    for layer in range(depth):
        chunk = pairs[layer * half:(layer + 1) * half]
        touched = sorted(q for p in chunk for q in p)
        assert touched == list(range(n))  # each layer covers every qubit once
        assert all(y == (x + 1) % n and x % 2 == layer % 2 for x, y in chunk)
    xs, ys = schedule_arrays(spec)
    assert xs.dtype == np.intc and list(zip(xs.tolist(), ys.tolist())) == pairs


def test_task_rng_is_a_pure_function_of_seed_and_index():
    a = task_rng(7, 3).integers(0, 2**62, size=5)
    b = task_rng(7, 3).integers(0, 2**62, size=5)
    c = task_rng(7, 4).integers(0, 2**62, size=5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_circuit_tableau_matches_gate_by_gate_construction():
    spec = BrickworkSpec(BlockLayout(1, 2, 3), 3)
    rng = np.random.default_rng(0)
    idx = sample_gate_indices(spec, rng)
    t = CliffordTableau.identity(spec.n)
    for pair, g in zip(build_schedule(spec), idx):
        t = apply_gate(t, TwoQubitClifford.from_index(int(g)), pair)
    assert circuit_tableau(spec, idx) == t
    assert t.is_symplectic()


def test_depth_zero_circuit_is_identity():
    spec = BrickworkSpec(BlockLayout(1, 2, 2), 0)
    assert sample_circuit(spec, task_rng(1, 0)) == CliffordTableau.identity(4)


def test_sampled_circuits_are_reproducible():
    spec = BrickworkSpec(BlockLayout(1, 4, 2), 4)
    assert sample_circuit(spec, task_rng(5, 9)) == sample_circuit(spec, task_rng(5, 9))
