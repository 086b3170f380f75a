import itertools
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from seqspace.errors import (
    IndexOutOfRange,
    InvalidPartition,
    NonDisjointTargets,
    OverlappingSupports,
    ZeroMember,
)
from seqspace.seqvec import (
    BlockFamily,
    IndexMap,
    IndexSetSpec,
    SeqVec,
    compress,
    coordinate_projection,
    disjoint_sum,
    interleave_map,
    rearrangement,
    spread,
    support,
)

entries = st.dictionaries(st.integers(1, 60), st.floats(-10, 10, allow_nan=False), max_size=12)
vectors = entries.map(SeqVec)


def test_zero_entries_dropped_and_equality():
    f = SeqVec({1: 3.0, 2: 0.0, 4: -1.0})
    assert support(f) == [1, 4]
    assert f == SeqVec([(4, -1.0), (1, 3.0)])
    assert hash(f) == hash(SeqVec({1: 3.0, 4: -1.0}))
    assert SeqVec() == SeqVec({})


@pytest.mark.parametrize("f, expected", [
    ({1: 3, 4: -1}, [1, 4]),
    ({}, []),
    ({7: 0.5}, [7]),
])
def test_support(f, expected):
    assert support(SeqVec(f)) == expected


@pytest.mark.parametrize("f, expected", [
    ({1: 3, 2: -1, 5: 2}, [3, 2, 1]),
    ({}, []),
    ({2: 0.5, 9: 0.5}, [0.5, 0.5]),
])
def test_rearrangement(f, expected):
    assert list(rearrangement(SeqVec(f))) == expected


def test_coordinate_projection_examples():
    f = SeqVec({1: 1, 2: 2, 3: 3})
    assert coordinate_projection(f, IndexSetSpec.odds()) == SeqVec({1: 1, 3: 3})
    assert coordinate_projection(f, IndexSetSpec.naturals()) == f
    assert coordinate_projection(SeqVec({1: 1}), IndexSetSpec.evens()) == SeqVec()


def test_spread_and_compress_examples():
    phi = IndexMap((3, 8))
    assert spread(SeqVec({1: 5, 2: 7}), phi) == SeqVec({3: 5, 8: 7})
    assert spread(SeqVec(), phi) == SeqVec()
    assert spread(SeqVec({2: 1}), IndexMap((1, 2, 3))) == SeqVec({2: 1})
    assert compress(SeqVec({3: 5, 8: 7}), phi) == SeqVec({1: 5, 2: 7})
    assert compress(SeqVec({1: 1}), IndexMap((2, 4))) == SeqVec()
    assert compress(SeqVec({2: 9}), IndexMap((2,))) == SeqVec({1: 9})


def test_spread_rejects_short_map():
    with pytest.raises(IndexOutOfRange):
        spread(SeqVec({3: 1.0}), IndexMap((1, 2)))


def test_index_map_validation():
    with pytest.raises(ValueError):
        IndexMap((2, 2))
    with pytest.raises(ValueError):
        IndexMap((0, 1))


@pytest.mark.parametrize("blocks, targets, expected", [
    ([[1, 3], [2]], [IndexSetSpec.odds(), IndexSetSpec.evens()], [1, 2, 3]),
    ([[1, 2, 3]], [IndexSetSpec.multiples(3)], [3, 6, 9]),
    ([[1], [2]], [IndexSetSpec.progression(5, 10), IndexSetSpec.evens()], [5, 6]),
])
def test_interleave_map_examples(blocks, targets, expected):
    phi = interleave_map([IndexSetSpec.explicit(b) for b in blocks], targets)
    assert list(phi.values) == expected


def test_interleave_map_errors():
    odd, even = IndexSetSpec.odds(), IndexSetSpec.evens()
    with pytest.raises(InvalidPartition):
        interleave_map([IndexSetSpec.explicit([1, 3])], [odd])
    with pytest.raises(InvalidPartition):
        interleave_map([IndexSetSpec.explicit([1]), IndexSetSpec.explicit([1, 2])], [odd, even])
    with pytest.raises(NonDisjointTargets):
        interleave_map([IndexSetSpec.explicit([1]), IndexSetSpec.explicit([2])],
                       [IndexSetSpec.multiples(2), IndexSetSpec.multiples(3)])
    with pytest.raises(NonDisjointTargets):
        interleave_map([IndexSetSpec.explicit([1])], [IndexSetSpec.explicit([1, 2])])
    # 5N and 2N share 10, 20, ...
    with pytest.raises(NonDisjointTargets):
        interleave_map([IndexSetSpec.explicit([1]), IndexSetSpec.explicit([2])],
                       [IndexSetSpec.multiples(5), IndexSetSpec.evens()])


def test_interleave_map_with_predicate_target():
    squares = IndexSetSpec.predicate(lambda j: math.isqrt(j) ** 2 == j,
                                     lambda: (k * k for k in itertools.count(1)), label="squares")
    odd_non_squares = IndexSetSpec.predicate(
        lambda j: j % 2 == 1 and math.isqrt(j) ** 2 != j,
        lambda: (j for j in itertools.count(3, 2) if math.isqrt(j) ** 2 != j))
    phi = interleave_map([IndexSetSpec.explicit([1, 2]), IndexSetSpec.explicit([3])],
                         [squares, odd_non_squares])
    assert list(phi.values) == [1, 4, 5]


def test_disjoint_sum_examples():
    fam = BlockFamily([SeqVec({1: 1}), SeqVec({2: 1})])
    assert disjoint_sum(fam, SeqVec({1: 2, 2: 3})) == SeqVec({1: 2, 2: 3})
    assert disjoint_sum(fam, SeqVec()) == SeqVec()
    fam = BlockFamily([SeqVec({1: 1, 2: 1}), SeqVec({3: 1})])
    assert disjoint_sum(fam, SeqVec({1: 1, 2: -1})) == SeqVec({1: 1, 2: 1, 3: -1})


def test_block_family_validation():
    with pytest.raises(OverlappingSupports):
        BlockFamily([SeqVec({1: 1}), SeqVec({1: 2})])
    with pytest.raises(ZeroMember):
        BlockFamily([SeqVec({1: 1}), SeqVec()])
    with pytest.raises(OverlappingSupports):
        disjoint_sum([SeqVec({1: 1}), SeqVec({1: 1})], SeqVec({1: 1, 2: 1}))


def test_serialization_round_trip():
    f = SeqVec({4: -1.5, 1: 3.0})
    obj = json.loads(f.to_json())
    assert obj == {"entries": [[1, 3.0], [4, -1.5]]}
    assert SeqVec.from_json(f.to_json()) == f
    assert SeqVec.from_text("# comment\n1 3.0\n4 -1.5\n") == f


@given(vectors)
def test_no_stored_zeros(f):
    assert all(v != 0 for _, v in f)
    assert len(rearrangement(f)) == len(support(f))


@given(vectors, st.lists(st.integers(1, 5), min_size=60, max_size=60))
def test_spread_preserves_rearrangement_and_compress_inverts(f, gaps):
    values, acc = [], 0
    for g in gaps:
        acc += g
        values.append(acc)
    phi = IndexMap(tuple(values))
    g = spread(f, phi)
    assert list(rearrangement(g)) == list(rearrangement(f))
    assert compress(g, phi) == f


@given(vectors, st.integers(1, 4), st.integers(0, 3), st.integers(1, 4), st.integers(0, 3))
def test_projection_idempotent_and_intersects(f, step_a, off_a, step_b, off_b):
    A = IndexSetSpec.progression(off_a % step_a + 1, step_a)
    B = IndexSetSpec.progression(off_b % step_b + 1, step_b)
    pa = coordinate_projection(f, A)
    assert coordinate_projection(pa, A) == pa
    both = coordinate_projection(coordinate_projection(f, B), A)
    assert both == SeqVec((i, v) for i, v in f if i in A and i in B)


@settings(max_examples=200)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=25), st.integers(0, 3), st.randoms())
def test_interleave_map_properties(labels, extra, rnd):
    nb = max(labels) + 1
    blocks = [[k + 1 for k, lab in enumerate(labels) if lab == b] for b in range(nb)]
    blocks = [b for b in blocks if b]
    q = len(blocks) + extra
    residues = rnd.sample(range(q), len(blocks))
    targets = [IndexSetSpec.progression(r if r else q, q) for r in residues]
    phi = interleave_map([IndexSetSpec.explicit(b) for b in blocks], targets)
    vals = phi.values
    assert all(b > a for a, b in zip(vals, vals[1:]))
    for b, t in zip(blocks, targets):
        assert all(phi(k) in t for k in b)
    # pointwise minimal: nothing in the owning target between consecutive values
    owner = {k: n for n, b in enumerate(blocks) for k in b}
    prev = 0
    for k in range(1, len(vals) + 1):
        assert not any(j in targets[owner[k]] for j in range(prev + 1, vals[k - 1]))
        prev = vals[k - 1]
