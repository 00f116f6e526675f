import numpy as np

from gpz.blocksort import sort_block
from gpz.model import BlockGeometry, QuantizedBlock


def _block(pairs, ranks=None):
    geom = BlockGeometry(
        mins=(0.0,), maxs=(10.0,), bin_counts=(16,), seg_sizes=(2,), seg_counts=(8,)
    )
    seg, off = zip(*pairs) if pairs else ((), ())
    return QuantizedBlock(
        geometry=geom,
        seg_ids=np.array(seg, dtype=np.uint32),
        offsets=np.array(off, dtype=np.uint32),
        ranks=None if ranks is None else np.array(ranks, dtype=np.uint32),
    )


def _pairs(qb):
    return list(zip(qb.seg_ids.tolist(), qb.offsets.tolist()))


def test_sorts_worked_example():
    qb = sort_block(_block([(3, 1), (1, 0), (4, 0), (3, 1)]))
    assert _pairs(qb) == [(1, 0), (3, 1), (3, 1), (4, 0)]


def test_already_sorted_input_unchanged():
    pairs = [(0, 0), (1, 1), (2, 0), (5, 3)]
    assert _pairs(sort_block(_block(pairs))) == pairs


def test_equal_ids_tie_break_by_offset():
    qb = sort_block(_block([(2, 3), (2, 0), (2, 2), (2, 1)]))
    assert _pairs(qb) == [(2, 0), (2, 1), (2, 2), (2, 3)]


def test_preserves_pair_multiset():
    rng = np.random.default_rng(21)
    for _ in range(50):
        pairs = list(zip(rng.integers(0, 8, 256).tolist(), rng.integers(0, 4, 256).tolist()))
        out = _pairs(sort_block(_block(pairs)))
        assert sorted(pairs) == out  # sorted() is exactly the target order


def test_idempotent():
    rng = np.random.default_rng(22)
    pairs = list(zip(rng.integers(0, 100, 512).tolist(), rng.integers(0, 16, 512).tolist()))
    once = sort_block(_block(pairs))
    twice = sort_block(once)
    assert np.array_equal(once.seg_ids, twice.seg_ids)
    assert np.array_equal(once.offsets, twice.offsets)


def test_deterministic_bit_identical():
    rng = np.random.default_rng(23)
    pairs = list(zip(rng.integers(0, 50, 300).tolist(), rng.integers(0, 8, 300).tolist()))
    a = sort_block(_block(pairs))
    b = sort_block(_block(pairs))
    assert a.seg_ids.tobytes() == b.seg_ids.tobytes()
    assert a.offsets.tobytes() == b.offsets.tobytes()


def test_ranks_travel_with_their_pairs():
    qb = sort_block(_block([(3, 1), (1, 0), (4, 0), (3, 1)], ranks=[0, 1, 2, 3]))
    # pairs end up as [(1,0),(3,1),(3,1),(4,0)]; the two (3,1) entries keep
    # their original relative order (stable sort), so ranks follow.
    assert qb.ranks.tolist() == [1, 0, 3, 2]


def test_single_and_empty_blocks_pass_through():
    qb = _block([(4, 1)])
    assert _pairs(sort_block(qb)) == [(4, 1)]
    empty = _block([])
    assert sort_block(empty).count == 0
