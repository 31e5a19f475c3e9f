import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpslogic.gates import (
    CAND,
    CNAND,
    CXOR,
    ID,
    NOT,
    ONE_BIT_GATES,
    RAND,
    RST,
    SET,
    SWAP,
    TWO_BIT_GATES,
    OneBitGate,
    SvdConfig,
    TwoBitGate,
    apply_one_bit,
    apply_two_bit,
    assemble_gate_blocks,
    recompress_sweeps,
    svd_split,
)
from mpslogic.state import (
    CorruptStateError,
    MpsState,
    SiteMatrices,
    evaluate_probability,
    full_distribution,
    init_state,
)


def test_builtin_one_bit_parameters():
    assert (NOT.p, NOT.q) == (0.0, 0.0)
    assert (RAND.p, RAND.q) == (0.5, 0.5)
    assert (RST.p, RST.q) == (1.0, 0.0)
    assert (SET.p, SET.q) == (0.0, 1.0)


def test_transfer_columns_sum_to_one():
    for gate in ONE_BIT_GATES.values():
        np.testing.assert_allclose(gate.transfer().sum(axis=0), [1.0, 1.0])


def test_one_bit_gate_rejects_bad_probability():
    with pytest.raises(ValueError):
        OneBitGate(p=1.5, q=0.0)


def test_not_flips_fixed_bit():
    state = init_state(1, {1: 0})
    apply_one_bit(state, 1, NOT)
    assert evaluate_probability(state, {1: 1}) == 1.0
    assert evaluate_probability(state, {1: 0}) == 0.0


def test_rand_averages_site_matrices():
    state = init_state(1, {1: 1})
    apply_one_bit(state, 1, RAND)
    site = state.sites[0]
    np.testing.assert_allclose(site.m0, site.m1)
    assert evaluate_probability(state, {1: 0}) == pytest.approx(0.5)


def test_rst_resets_uniform_bit():
    state = init_state(1)
    apply_one_bit(state, 1, RST)
    assert evaluate_probability(state, {1: 0}) == 1.0


def test_set_forces_one():
    state = init_state(1)
    apply_one_bit(state, 1, SET)
    assert evaluate_probability(state, {1: 1}) == 1.0


def test_apply_one_bit_index_checked():
    with pytest.raises(IndexError):
        apply_one_bit(init_state(2), 3, NOT)


def test_deterministic_value_map():
    assert NOT.apply_to_value(0) == 1 and NOT.apply_to_value(1) == 0
    assert RST.apply_to_value(1) == 0
    assert SET.apply_to_value(0) == 1
    with pytest.raises(ValueError):
        RAND.apply_to_value(0)


def test_nand_transfer_entries():
    # exactly these four input->output transitions carry weight 1
    hot = {((0, 0), (0, 1)), ((0, 1), (0, 1)),
           ((1, 0), (1, 1)), ((1, 1), (1, 0))}
    for a in (0, 1):
        for b in (0, 1):
            assert CNAND.outputs(a, b) == next(
                out for (inp, out) in hot if inp == (a, b))


def test_nand_blocks_on_scalar_uniform_sites():
    state = init_state(2)
    blocks = assemble_gate_blocks(state.sites[0], state.sites[1], CNAND)
    assert np.array_equal(blocks, np.array([[0.0, 0.5], [0.25, 0.25]]))


def test_identity_blocks_layout():
    rng = np.random.default_rng(3)
    left = SiteMatrices(rng.normal(size=(1, 3)), rng.normal(size=(1, 3)))
    right = SiteMatrices(rng.normal(size=(3, 2)), rng.normal(size=(3, 2)))
    blocks = assemble_gate_blocks(left, right, ID)
    np.testing.assert_allclose(blocks[:1, :2], left.m0 @ right.m0)
    np.testing.assert_allclose(blocks[:1, 2:], left.m0 @ right.m1)
    np.testing.assert_allclose(blocks[1:, :2], left.m1 @ right.m0)
    np.testing.assert_allclose(blocks[1:, 2:], left.m1 @ right.m1)


def test_assemble_rejects_mismatched_sites():
    left = SiteMatrices(np.ones((1, 2)), np.ones((1, 2)))
    right = SiteMatrices(np.ones((3, 1)), np.ones((3, 1)))
    with pytest.raises(CorruptStateError):
        assemble_gate_blocks(left, right, CNAND)


def test_svd_split_rank_one():
    blocks = np.array([[0.0, 0.5], [0.0, 0.5]])
    left, right = svd_split(blocks)
    assert left.shape == (1, 1) and right.shape == (1, 1)
    rec = np.block([[left.m0 @ right.m0, left.m0 @ right.m1],
                    [left.m1 @ right.m0, left.m1 @ right.m1]])
    np.testing.assert_allclose(rec, blocks, atol=1e-12)


def test_svd_split_nand_block_is_rank_two():
    blocks = np.array([[0.0, 0.5], [0.25, 0.25]])
    left, right = svd_split(blocks)
    assert left.shape[1] == 2


def test_svd_split_detects_rank_deficiency():
    rng = np.random.default_rng(5)
    u = rng.normal(size=(4, 2))
    v = rng.normal(size=(2, 4))
    left, right = svd_split(u @ v)
    assert left.shape[1] == 2


def test_svd_split_zero_matrix_is_corrupt():
    with pytest.raises(CorruptStateError):
        svd_split(np.zeros((2, 2)))


def test_svd_split_truncation_cap():
    blocks = np.array([[0.0, 0.5], [0.25, 0.25]])
    left, right = svd_split(blocks, SvdConfig(trunc_max_rank=1))
    assert left.shape[1] == 1


def test_svd_config_validation():
    with pytest.raises(ValueError):
        SvdConfig(rank_tol=-1.0)
    with pytest.raises(ValueError):
        SvdConfig(trunc_max_rank=0)
    assert SvdConfig(trunc_max_rank=4).approximate
    assert not SvdConfig().approximate


def test_nand_output_marginal():
    state = init_state(2)
    apply_two_bit(state, 1, CNAND)
    assert evaluate_probability(state, {2: 1}) == pytest.approx(0.75, abs=1e-12)
    assert evaluate_probability(state, {2: 0}) == pytest.approx(0.25, abs=1e-12)


def test_identity_gate_preserves_distribution():
    state = init_state(3)
    apply_two_bit(state, 1, CNAND)
    before = full_distribution(state)
    apply_two_bit(state, 2, ID)
    np.testing.assert_allclose(full_distribution(state), before, atol=1e-12)


def test_swap_exchanges_fixed_bits():
    state = init_state(2, {1: 0, 2: 1})
    apply_two_bit(state, 1, SWAP)
    assert evaluate_probability(state, {1: 1, 2: 0}) == pytest.approx(1.0)


def test_apply_two_bit_counts_gates_and_updates_height():
    state = init_state(4)
    apply_two_bit(state, 2, CNAND)
    assert state.gate_count == 1
    assert state.tracked_heights == [0, 0, 1, 0, 0]


def test_apply_two_bit_index_checked():
    with pytest.raises(IndexError):
        apply_two_bit(init_state(3), 3, CNAND)


def test_flipped_table():
    for gate in TWO_BIT_GATES.values():
        flipped = gate.flipped()
        for a in (0, 1):
            for b in (0, 1):
                out_a, out_b = gate.outputs(b, a)
                assert flipped.outputs(a, b) == (out_b, out_a)
        assert flipped.name == gate.name + "_R"
        assert flipped.flipped().table == gate.table


def test_two_bit_gate_table_validation():
    with pytest.raises(ValueError):
        TwoBitGate("BAD", ((0, 0), (0, 1), (1, 0)))
    with pytest.raises(ValueError):
        TwoBitGate("BAD", ((0, 2), (0, 1), (1, 0), (1, 1)))


def test_sweeps_compress_padded_product_state():
    # uniform two-bit product state with an artificially padded bond
    site1 = SiteMatrices(np.array([[0.5, 0.0]]), np.array([[0.5, 0.0]]))
    site2 = SiteMatrices(np.array([[0.5], [0.0]]), np.array([[0.5], [0.0]]))
    state = MpsState([site1, site2],
                     profile=None)
    state.profile.heights = [0, 1, 0]
    recompress_sweeps(state)
    assert state.bond_dims() == [1, 1, 1]
    assert evaluate_probability(state, {1: 0, 2: 1}) == pytest.approx(0.25)


def test_sweeps_preserve_distribution():
    state = init_state(5)
    for cut, gate in [(1, CNAND), (2, CXOR), (3, CAND), (4, CNAND)]:
        apply_two_bit(state, cut, gate)
    before = full_distribution(state)
    recompress_sweeps(state)
    np.testing.assert_allclose(full_distribution(state), before, atol=1e-9)


def test_sweeps_count_toward_gate_count():
    state = init_state(4)
    recompress_sweeps(state)
    assert state.gate_count == 2 * 3


def test_sweeps_repair_heights_after_removal():
    from mpslogic.state import remove_bit

    state = init_state(4)
    apply_two_bit(state, 1, CNAND)
    apply_two_bit(state, 2, CXOR)
    apply_two_bit(state, 3, CAND)
    remove_bit(state, 2)
    recompress_sweeps(state)
    h = state.tracked_heights
    assert h[0] == 0 and h[-1] == 0
    assert all(abs(h[j] - h[j - 1]) <= 1 for j in range(1, len(h)))
    for j, d in enumerate(state.bond_dims()):
        assert (d - 1).bit_length() <= h[j]


@given(p=st.floats(0.0, 1.0), q=st.floats(0.0, 1.0))
@settings(max_examples=50, deadline=None)
def test_one_bit_gates_preserve_normalization(p, q):
    state = init_state(3)
    apply_two_bit(state, 1, CNAND)
    apply_one_bit(state, 2, OneBitGate(p, q))
    assert evaluate_probability(state, {}) == pytest.approx(1.0, abs=1e-9)


@given(st.sampled_from(list(TWO_BIT_GATES.values())),
       st.sampled_from(list(TWO_BIT_GATES.values())))
@settings(max_examples=30, deadline=None)
def test_disjoint_gates_commute(gate_a, gate_b):
    first = init_state(4)
    apply_two_bit(first, 1, gate_a)
    apply_two_bit(first, 3, gate_b)
    second = init_state(4)
    apply_two_bit(second, 3, gate_b)
    apply_two_bit(second, 1, gate_a)
    np.testing.assert_allclose(full_distribution(first),
                               full_distribution(second), atol=1e-9)


def test_two_bit_semantics_match_truth_table_pushforward():
    for gate in TWO_BIT_GATES.values():
        state = init_state(3)
        apply_one_bit(state, 1, OneBitGate(0.3, 0.8))
        apply_one_bit(state, 3, OneBitGate(0.6, 0.4))
        before = full_distribution(state).reshape((2, 2, 2))
        apply_two_bit(state, 2, gate)
        after = full_distribution(state).reshape((2, 2, 2))
        expected = np.zeros_like(before)
        for a in (0, 1):
            for b in (0, 1):
                out_a, out_b = gate.outputs(a, b)
                expected[:, out_a, out_b] += before[:, a, b]
        np.testing.assert_allclose(after, expected, atol=1e-9)
