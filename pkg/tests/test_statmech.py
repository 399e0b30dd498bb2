import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brickqec.brickwork import BlockLayout, BrickworkSpec
from brickqec.statmech import (
    TRANSFER_FACTOR,
    AQECWeighting,
    ErasureNoise,
    ParameterError,
    PauliNoise,
    QECWeighting,
    apply_gate_transfer,
    aqec_depth_bound,
    choi_error_bound,
    choose_alpha,
    depth_masses,
    depth_profile,
    final_masses,
    final_weight_bound,
    gate_profile,
    informal_scaling,
    init_config_vector,
    lambda_of_f,
    linear_distance_rate_ok,
    noise_strength_f,
    partition_function,
    popcount_masses,
    prefactor,
    qec_depth_bound,
    scan_exact_threshold,
    z_infinity_aqec,
    z_infinity_qec,
)

# Values frozen from the brute-force trajectory enumeration (independent of the DP).
ORACLE = [
    ((1, 2, 2), 1, AQECWeighting(1), Fraction(144, 25)),
    ((1, 2, 3), 2, AQECWeighting(1), Fraction(35136, 3125)),
    ((1, 2, 3), 2, AQECWeighting(2), Fraction(512)),
    ((2, 4, 2), 3, AQECWeighting(0), Fraction(1)),
    ((1, 2, 3), 3, AQECWeighting(0), Fraction(1)),
    ((1, 2, 2), 2, QECWeighting(2), Fraction(11298, 625)),
    ((1, 3, 2), 2, QECWeighting(1), Fraction(522, 125)),
]


@pytest.mark.parametrize("layout, depth, weighting, expected", ORACLE)
def test_dp_matches_frozen_enumeration(layout, depth, weighting, expected):
    res = partition_function(BrickworkSpec(BlockLayout(*layout), depth), weighting, exact=True)
    assert res.exact == expected
    assert res.value == pytest.approx(float(expected), rel=1e-15)
    float_res = partition_function(BrickworkSpec(BlockLayout(*layout), depth), weighting, exact=False)
    assert float_res.exact is None
    assert float_res.value == pytest.approx(float(expected), rel=1e-12)


def test_final_masses_after_one_layer():
    masses = final_masses(BrickworkSpec(BlockLayout(1, 2, 2), 1), exact=True)
    assert masses == [Fraction(4, 25), 0, Fraction(28, 25), 0, Fraction(49, 25)]


def test_noise_strengths():
    assert noise_strength_f(PauliNoise(1, 0, 0, 0)) == 0
    assert noise_strength_f(PauliNoise(0.25, 0.25, 0.25, 0.25)) == pytest.approx(2.0)
    assert noise_strength_f(ErasureNoise(1.0)) == pytest.approx(2.0)
    assert noise_strength_f(ErasureNoise(1 / 3)) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        PauliNoise(0.5, 0.5, 0.5, -0.5)
    with pytest.raises(ParameterError):
        ErasureNoise(1.5)


def test_lambda_exact_and_float():
    assert lambda_of_f(0) == Fraction(1, 2)
    assert lambda_of_f(2) == 2
    assert lambda_of_f(0.5) == pytest.approx(2**-0.5)


def test_qec_weights():
    w = QECWeighting(2).weights(4, exact=True)
    assert w[0] == 0
    assert w[1] == Fraction(3, 2)
    assert w[3] == Fraction(3 * 3 + 9 * 3, 8)
    with pytest.raises(ParameterError):
        QECWeighting(0)


def test_depth_zero_is_flagged_and_matches_direct_sum():
    spec = BrickworkSpec(BlockLayout(1, 2, 2), 0)
    res = partition_function(spec, AQECWeighting(1), exact=True)
    assert "below 1-design depth" in res.notes
    # masks with both logical sites set: 4 of them with popcounts 2, 3, 3, 4
    expected = prefactor(4, 2, exact=True) * (1 + 2 * 1 + 1)
    assert res.exact == expected


def test_transfer_preserves_dense_shape_and_returns_copy():
    v = init_config_vector(BlockLayout(1, 2, 2))
    out = apply_gate_transfer(v, 4, (0, 1))
    assert out is not v and v.sum() == 4


def test_noiseless_value_is_one_at_every_depth():
    layout = BlockLayout(1, 2, 3)
    for D, res in depth_profile(layout, range(6), AQECWeighting(0), exact=True).items():
        assert res.exact == 1, D


def test_maximal_noise_value_is_flat():
    layout = BlockLayout(1, 3, 2)
    values = {res.exact for res in depth_profile(layout, range(5), AQECWeighting(2), exact=True).values()}
    assert values == {Fraction(2) ** (layout.n + layout.k)}


def test_depth_profile_agrees_with_separate_runs():
    layout = BlockLayout(1, 2, 3)
    prof = depth_profile(layout, [0, 1, 3, 5], AQECWeighting(0.7))
    for D, res in prof.items():
        single = partition_function(BrickworkSpec(layout, D), AQECWeighting(0.7))
        assert res.value == pytest.approx(single.value, rel=1e-14)


def test_gate_profile_last_column_is_partition_function():
    spec = BrickworkSpec(BlockLayout(1, 2, 2), 3)
    ws = [AQECWeighting(1), QECWeighting(1)]
    prof = gate_profile(spec, ws, exact=True)
    assert prof.shape == (2, spec.gate_count + 1)
    for row, w in zip(prof, ws):
        assert row[-1] == partition_function(spec, w, exact=True).exact


@pytest.mark.parametrize("f", [0, 1, 2])
def test_gate_profile_never_increases_for_dyadic_f(f):
    spec = BrickworkSpec(BlockLayout(1, 3, 2), 4)
    row = gate_profile(spec, [AQECWeighting(f)], exact=True)[0]
    assert all(b <= a for a, b in zip(row, row[1:]))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 1.95))
def test_gate_profile_never_increases_for_any_f(f):
    spec = BrickworkSpec(BlockLayout(1, 2, 3), 3)
    row = gate_profile(spec, [AQECWeighting(f)])[0]
    assert np.all(np.diff(row) <= 1e-12 * row[:-1])


@pytest.mark.parametrize("layout", [(1, 2, 2), (1, 3, 2), (2, 4, 2)])
@pytest.mark.parametrize("f", [0, 1, 2])
def test_deep_circuits_reach_the_closed_form(layout, f):
    layout = BlockLayout(*layout)
    res = depth_profile(layout, [200], AQECWeighting(f), exact=True)[200]
    z_inf = z_infinity_aqec(layout.n, layout.k, f, exact=True)
    assert abs(res.exact - z_inf) < Fraction(1, 10**12)
    assert res.exact >= z_inf


def test_deep_qec_reaches_the_closed_form():
    layout = BlockLayout(1, 2, 2)
    res = depth_profile(layout, [150], QECWeighting(1), exact=True)[150]
    assert float(res.exact) == pytest.approx(z_infinity_qec(4, 2, 1), rel=1e-12)
    assert z_infinity_qec(4, 2, 1) == pytest.approx(2.96470588, rel=1e-8)
    assert z_infinity_qec(4, 2, 1, exact=True) == Fraction(252, 85)


def test_closed_form_limits():
    assert z_infinity_aqec(10, 4, 0) == pytest.approx(1.0)
    assert z_infinity_aqec(10, 4, 2) == pytest.approx(2.0**14)
    with pytest.raises(ParameterError):
        z_infinity_aqec(10, 4, 0.5, exact=True)
    with pytest.raises(ParameterError):
        z_infinity_aqec(4, 4, 1)


def test_huge_qec_closed_form_does_not_overflow():
    assert math.isfinite(z_infinity_qec(4096, 2048, 12))


def test_depth_bounds_dominate_the_dp():
    layout = BlockLayout(1, 2, 3)
    n, k = layout.n, layout.k
    prof = depth_profile(layout, [1, 4, 16, 64], AQECWeighting(0.5))
    for D, res in prof.items():
        assert res.value <= aqec_depth_bound(n, k, 2, D, 0.5)
    qprof = depth_profile(layout, [1, 16, 64], QECWeighting(2))
    for D, res in qprof.items():
        assert res.value <= qec_depth_bound(n, k, 2, 2, D)


def test_aqec_bound_refuses_strong_noise():
    with pytest.raises(ParameterError) as info:
        aqec_depth_bound(8, 4, 2, 3, 0.75)
    assert info.value.field == "f"


def test_bound_helpers_validate_layout():
    with pytest.raises(ParameterError):
        qec_depth_bound(9, 4, 2, 1, 3)


@settings(max_examples=60)
@given(st.integers(1, 400), st.integers(1, 12), st.floats(0.02, 0.98))
def test_final_weight_bound_holds(w, d, f):
    lhs, rhs = final_weight_bound(w, d, f)
    assert lhs <= rhs * (1 + 1e-12)


def test_choi_error_bound_and_scaling():
    assert choi_error_bound(0.5) == 0.0
    assert choi_error_bound(17.0) == pytest.approx(2.0)
    assert informal_scaling(16.0, 4.0, 0.5) == pytest.approx(16 ** (-0.75))
    with pytest.raises(ParameterError):
        informal_scaling(16.0, 0.5, 0.5)


def test_rate_condition():
    assert linear_distance_rate_ok(0.01, 1, 2)
    assert not linear_distance_rate_ok(0.2, 1, 2)


def test_scan_with_chosen_alpha():
    ns = [2**j for j in range(6, 13)]
    alpha = choose_alpha(ns, 1, 2)
    assert alpha == 23
    table = scan_exact_threshold(ns, 1, 2, alpha=alpha)
    assert table.strictly_decreasing and table.rows[-1].below_one
    assert not scan_exact_threshold(ns, 1, 2, alpha=alpha - 1).rows[-1].below_one or \
        not scan_exact_threshold(ns, 1, 2, alpha=alpha - 1).strictly_decreasing
    assert [r.depth for r in table.rows] == [23 * r.d for r in table.rows]


def test_transfer_factor_is_two_fifths():
    assert TRANSFER_FACTOR == Fraction(2, 5)


def test_popcount_masses_match_bruteforce():
    rng = np.random.default_rng(3)
    v = rng.random(2**6)
    masses = popcount_masses(v, 6)
    pop = np.array([bin(i).count("1") for i in range(64)])
    for w in range(7):
        assert masses[w] == pytest.approx(v[pop == w].sum())


def test_masses_of_depth_masses_are_shared_across_weightings():
    layout = BlockLayout(1, 2, 2)
    masses = depth_masses(layout, [2], exact=True)[2]
    spec = BrickworkSpec(layout, 2)
    assert masses == final_masses(spec, exact=True)
