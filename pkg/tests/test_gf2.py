import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from iesym.stabcore.gf2 import gf2_rank, pack_rows, unpack_rows


def rank_oracle(m):
    m = np.array(m, dtype=np.uint8) % 2
    r = 0
    rows, cols = m.shape
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i, c]), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
    return r


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 40).flatmap(lambda r: st.integers(1, 140).flatmap(
    lambda c: arrays(np.uint8, (r, c), elements=st.integers(0, 1)))))
def test_rank_matches_oracle(m):
    assert gf2_rank(m) == rank_oracle(m)


@settings(max_examples=50)
@given(arrays(np.uint8, (5, 130), elements=st.integers(0, 1)))
def test_pack_roundtrip(m):
    assert np.array_equal(unpack_rows(pack_rows(m), 130), m)


def test_rank_examples():
    assert gf2_rank(np.eye(70, dtype=np.uint8)) == 70
    assert gf2_rank(np.ones((4, 4), dtype=np.uint8)) == 1
    assert gf2_rank(np.zeros((0, 3), dtype=np.uint8)) == 0
