"""The compiled kernels and the pure-Python fallback must agree exactly."""
from fractions import Fraction

import numpy as np
import pytest

from brickqec import _core, _fallback
from brickqec.brickwork import BlockLayout, BrickworkSpec, schedule_arrays
from brickqec.domainwall import initial_masks
from brickqec.pauli import CliffordTableau, two_qubit_tables

BACKENDS = _core.backends()
needs_cython = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def test_backend_flag_is_known():
    assert _core.BACKEND in ("cython", "python")


@needs_cython
def test_gate_transfer_backends_agree():
    rng = np.random.default_rng(1)
    n = 8
    v0 = rng.random(2**n)
    for x, y in [(0, 1), (3, 4), (7, 0)]:
        a, b = v0.copy(), v0.copy()
        BACKENDS["cython"].gate_transfer(a, n, x, y, 0.4)
        _fallback.gate_transfer(b, n, x, y, 0.4)
        assert np.allclose(a, b, rtol=0, atol=1e-15)


def test_fallback_gate_transfer_is_exact_on_fractions():
    n = 2
    v = np.array([Fraction(1), Fraction(2), Fraction(3), Fraction(4)], dtype=object)
    _fallback.gate_transfer(v, n, 0, 1, Fraction(2, 5))
    # masks 01 and 10 carry 2 + 3 = 5; each equal-bit mask gains 2
    assert list(v) == [3, 0, 0, 6]


@needs_cython
def test_local_table_backends_agree():
    images, phases = two_qubit_tables()
    rng = np.random.default_rng(2)
    n = 10
    base = CliffordTableau.identity(n)
    a, b = base.copy(), base.copy()
    for _ in range(60):
        g = int(rng.integers(11520))
        x, y = (int(q) for q in rng.choice(n, size=2, replace=False))
        BACKENDS["cython"].apply_local_table(a.xs, a.zs, a.phases, x, y, images[g], phases[g])
        _fallback.apply_local_table(b.xs, b.zs, b.phases, x, y, images[g], phases[g])
    assert a == b and a.is_symplectic()


@needs_cython
@pytest.mark.parametrize("layout, depth", [((1, 2, 2), 3), ((1, 3, 2), 2), ((2, 4, 2), 2), ((1, 2, 3), 3)])
def test_enumeration_backends_agree(layout, depth):
    spec = BrickworkSpec(BlockLayout(*layout), depth)
    xs, ys = schedule_arrays(spec)
    init = initial_masks(spec)
    a = BACKENDS["cython"].enumerate_counts(spec.n, xs, ys, init)
    b = _fallback.enumerate_counts(spec.n, xs, ys, init)
    assert np.array_equal(np.asarray(a), np.asarray(b))
