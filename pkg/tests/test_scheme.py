"""Pairing generation, key rings, and the ring-size conservation law."""

import io

import numpy as np
import pytest

from pairdeploy import (
    PairingTable,
    PairwiseKeyId,
    SchemeParams,
    derive_key_rings,
    generate_pairing,
    phase_size,
    reverse_degree,
    reverse_degrees,
    ring_sizes,
    table_from_json,
    table_from_lists,
    table_to_json,
)
from pairdeploy.sampling import sample_pairing_block


def test_params_validation():
    SchemeParams(2, 1)
    with pytest.raises(ValueError):
        SchemeParams(1, 1)
    with pytest.raises(ValueError):
        SchemeParams(5, 0)
    with pytest.raises(ValueError):
        SchemeParams(5, 5)


class TestHandExample:
    """n=3, k=1 with selections 1->2, 2->1, 3->1, worked by hand.

    Node 1 holds the key it installed for 2 plus the keys 2 and 3 installed
    for it; node 2 holds its own plus the reciprocal one; node 3 only its
    own.  Sizes 3, 2, 1 summing to 2*3*1.
    """

    @pytest.fixture()
    def table(self):
        return table_from_lists(3, 1, [[2], [1], [1]])

    def test_ring_contents(self, table):
        rings = {r.owner: r.keys for r in derive_key_rings(table)}
        k12 = PairwiseKeyId(1, 2, 1)
        k21 = PairwiseKeyId(2, 1, 1)
        k31 = PairwiseKeyId(3, 1, 1)
        assert rings[1] == {k12, k21, k31}
        assert rings[2] == {k12, k21}
        assert rings[3] == {k31}

    def test_ring_sizes(self, table):
        assert [r.size for r in derive_key_rings(table)] == [3, 2, 1]
        assert ring_sizes(table).tolist() == [3, 2, 1]

    def test_reverse_degrees(self, table):
        assert reverse_degree(table, 1) == 2
        assert reverse_degree(table, 2) == 1
        assert reverse_degree(table, 3) == 0
        assert reverse_degrees(table).tolist() == [2, 1, 0]

    def test_partners_of(self, table):
        assert table.partners_of(1) == (2,)
        assert table.partners_of(3) == (1,)
        with pytest.raises(ValueError):
            table.partners_of(4)


def test_forced_full_selection():
    # k = n-1 leaves exactly one subset per node
    table = generate_pairing(SchemeParams(5, 4), seed=271828)
    for i in range(1, 6):
        assert table.partners_of(i) == tuple(j for j in range(1, 6) if j != i)
        assert reverse_degree(table, i) == 4


def test_two_node_scheme():
    table = generate_pairing(SchemeParams(2, 1), seed=3)
    assert table.partners_of(1) == (2,)
    assert table.partners_of(2) == (1,)


def test_generation_is_deterministic():
    a = generate_pairing(SchemeParams(1000, 3), seed=11, trial=5)
    b = generate_pairing(SchemeParams(1000, 3), seed=11, trial=5)
    assert np.array_equal(a.partners, b.partners)
    assert a.seed == 11 and a.trial == 5


def test_ring_size_conservation():
    """Every pairing lands in exactly two rings, so sizes sum to 2nk."""
    for n, k, seed in [(10, 1, 0), (50, 7, 1), (300, 12, 2)]:
        table = generate_pairing(SchemeParams(n, k), seed=seed)
        assert int(ring_sizes(table).sum()) == 2 * n * k
        assert ring_sizes(table).min() >= k


def test_derived_rings_match_size_formula():
    table = generate_pairing(SchemeParams(40, 3), seed=8)
    sizes = ring_sizes(table)
    for ring in derive_key_rings(table):
        assert ring.size == sizes[ring.owner - 1]


def test_all_key_ids_distinct():
    table = generate_pairing(SchemeParams(30, 4), seed=15)
    all_keys = set()
    for ring in derive_key_rings(table):
        all_keys.update(ring.keys)
    assert len(all_keys) == 30 * 4


def test_selection_marginals_are_uniform():
    """Each of the 3 possible partners of each node appears 1/3 +- 0.01 of
    the time over 30000 tables at n=4, k=1."""
    block = sample_pairing_block(2024, 0, 30_000, 4, 1)
    for i in range(4):
        counts = np.bincount(block[:, i, 0], minlength=4)
        assert counts[i] == 0
        for j in range(4):
            if j != i:
                assert abs(counts[j] / 30_000 - 1 / 3) < 0.01


def test_subset_distribution_is_uniform():
    # chi-square over all 6 possible 2-subsets for every node at n=5;
    # 0.001-level critical value for 5 degrees of freedom is 20.52
    draws = 120_000
    block = sample_pairing_block(77, 0, draws, 5, 2)
    for i in range(5):
        packed = block[:, i, 0] * 5 + block[:, i, 1]
        counts = np.bincount(packed, minlength=25)
        observed = counts[counts > 0]
        assert len(observed) == 6
        chi2 = float(((observed - draws / 6) ** 2 / (draws / 6)).sum())
        assert chi2 < 20.52


def test_reverse_degree_moments():
    """Pooled reverse degrees at n=1000, k=10: mean exactly k by
    conservation, variance near k*(1 - k/(n-1))."""
    n, k, trials = 1000, 10, 100
    block = sample_pairing_block(5150, 0, trials, n, k)
    degs = np.stack([np.bincount(block[t].ravel(), minlength=n) for t in range(trials)])
    pooled = degs.ravel().astype(np.float64)
    assert abs(pooled.mean() - k) < 0.1  # exact up to float summation
    expected_var = k * (1 - k / (n - 1))
    assert abs(pooled.var() - expected_var) < 0.3


def test_mean_ring_size_is_twice_k():
    n, k, trials = 500, 21, 200
    block = sample_pairing_block(61, 0, trials, n, k)
    sizes = k + np.stack([np.bincount(block[t].ravel(), minlength=n) for t in range(trials)])
    assert abs(float(sizes.mean()) - 2 * k) < 0.2


class TestPhaseSize:
    def test_floor_arithmetic(self):
        assert phase_size(10, 0.25) == 2
        assert phase_size(1000, 0.5) == 500
        assert phase_size(7, 1.0) == 7

    def test_decimal_floor_is_exact(self):
        # 0.3 * 10 is 2.999... in binary; the decimal value must win
        assert phase_size(10, 0.3) == 3
        assert phase_size(100, 0.07) == 7

    def test_domain(self):
        with pytest.raises(ValueError):
            phase_size(10, 0.0)
        with pytest.raises(ValueError):
            phase_size(10, 1.5)
        with pytest.raises(ValueError):
            phase_size(10, 0.05)  # floor would be 0


class TestTableValidation:
    def test_rejects_self_selection(self):
        with pytest.raises(ValueError):
            table_from_lists(3, 1, [[1], [1], [1]])

    def test_rejects_duplicate_ids(self):
        with pytest.raises(ValueError):
            table_from_lists(4, 2, [[2, 2], [1, 3], [1, 2], [1, 2]])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            table_from_lists(3, 1, [[2], [4], [1]])

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            PairingTable(SchemeParams(3, 1), np.zeros((2, 1), dtype=np.int64))

    def test_partner_array_is_frozen(self):
        table = table_from_lists(3, 1, [[2], [1], [1]])
        with pytest.raises(ValueError):
            table.partners[0, 0] = 2


def test_json_round_trip():
    table = generate_pairing(SchemeParams(12, 3), seed=4242)
    text = table_to_json(table)
    back = table_from_json(text)
    assert back.n == 12 and back.k == 3
    assert np.array_equal(back.partners, table.partners)
    assert back.seed == 4242


def test_json_uses_one_based_ids():
    table = table_from_lists(3, 1, [[2], [1], [1]])
    buf = io.StringIO()
    table_to_json(table, buf)
    assert '"gamma": [[2], [1], [1]]' in buf.getvalue()


def test_json_rejects_wrong_row_count():
    with pytest.raises(ValueError):
        table_from_json('{"n": 3, "k": 1, "seed": 0, "gamma": [[2], [1]]}')
