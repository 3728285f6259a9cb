import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ringpen.core import (
    InvalidInputError,
    Ring,
    as_blocks,
    average_point,
    consensus,
    lipschitz_bound,
    penalty_gradient,
    penalty_gradient_block,
    penalty_value,
    ring_matrix,
)

X3 = np.array([[1.0], [0.0], [0.0]])

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def block_vectors(draw, min_m=2, max_m=8, max_n=4):
    m = draw(st.integers(min_m, max_m))
    n = draw(st.integers(1, max_n))
    return draw(arrays(float, (m, n), elements=finite))


class TestRing:
    def test_wraps_around(self):
        r = Ring(5)
        assert r.prev(0) == 4
        assert r.next(4) == 0

    @pytest.mark.parametrize("m", [1, 2, 3, 7])
    def test_prev_next_inverse(self, m):
        r = Ring(m)
        assert all(r.prev(r.next(i)) == i for i in range(m))

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            Ring(3).prev(3)

    def test_shift_helpers(self):
        x = np.arange(4.0)[:, None]
        assert Ring.from_prev(x)[:, 0].tolist() == [3, 0, 1, 2]
        assert Ring.from_next(x)[:, 0].tolist() == [1, 2, 3, 0]


class TestPenalty:
    def test_examples(self):
        assert penalty_value(X3, 1.0) == 1.0
        assert penalty_value(X3, 2.0) == 0.5
        assert penalty_value(consensus([3.0, -1.0], 6), 0.7) == 0.0

    def test_m2_counts_both_edges(self):
        x = np.array([[1.0, 0.0], [0.0, 2.0]])
        assert penalty_value(x, 2.0) == pytest.approx(5.0 / 2.0)

    def test_gradient_blocks(self):
        assert penalty_gradient_block(X3, 0, 1.0).tolist() == [2.0]
        assert penalty_gradient_block(X3, 1, 1.0).tolist() == [-1.0]
        assert not np.any(penalty_gradient_block(consensus([2.0, 3.0], 4), 2, 3.0))

    def test_gradient_block_out_of_range(self):
        with pytest.raises(IndexError):
            penalty_gradient_block(X3, 3, 1.0)

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidInputError):
            penalty_value(np.array([[np.nan], [0.0]]), 1.0)
        with pytest.raises(InvalidInputError):
            penalty_value(X3, 0.0)
        with pytest.raises(InvalidInputError):
            as_blocks(np.zeros(3))

    @given(block_vectors(), st.floats(0.1, 10))
    def test_nonnegative_and_scaling(self, x, tau):
        p = penalty_value(x, tau)
        assert p >= 0
        assert p * tau == pytest.approx(penalty_value(x, 1.0), rel=1e-12, abs=1e-9)

    @given(arrays(float, st.tuples(st.integers(2, 8), st.integers(1, 4)), elements=st.integers(-3, 3)))
    def test_zero_iff_consensus(self, x):
        # integer entries: tiny float differences would underflow when squared
        is_consensus = np.all(x == x[0])
        assert (penalty_value(x, 1.0) == 0.0) == bool(is_consensus)

    @given(block_vectors(min_m=5), st.data())
    def test_gradient_locality(self, x, data):
        m = x.shape[0]
        i = data.draw(st.integers(0, m - 1))
        g = penalty_gradient_block(x, i, 1.0)
        keep = {(i - 1) % m, i, (i + 1) % m}
        y = x.copy()
        for j in range(m):
            if j not in keep:
                y[j] = data.draw(arrays(float, x.shape[1], elements=finite))
        assert np.array_equal(penalty_gradient_block(y, i, 1.0), g)

    @given(block_vectors(), st.floats(1, 4))
    def test_assembled_gradient_matches_blocks(self, x, tau):
        g = penalty_gradient(x, tau)
        for i in range(x.shape[0]):
            np.testing.assert_allclose(g[i], penalty_gradient_block(x, i, tau), rtol=1e-12, atol=1e-12)

    @settings(max_examples=50)
    @given(block_vectors())
    def test_gradient_is_ring_matrix_product(self, x):
        m = x.shape[0]
        np.testing.assert_allclose(penalty_gradient(x, 1.0), ring_matrix(m) @ x, atol=1e-9)


class TestLipschitz:
    def test_values(self):
        assert lipschitz_bound(1.0) == 4.0
        assert lipschitz_bound(4.0) == 1.0

    def test_m4_spectrum(self):
        ev = np.sort(np.linalg.eigvalsh(ring_matrix(4)))
        np.testing.assert_allclose(ev, [0, 2, 2, 4], atol=1e-12)

    @given(block_vectors(), st.floats(1, 4))
    def test_bound_holds(self, x, tau):
        y = np.zeros_like(x)
        lhs = np.linalg.norm(penalty_gradient(x, tau) - penalty_gradient(y, tau))
        assert lhs <= lipschitz_bound(tau) * np.linalg.norm(x - y) * (1 + 1e-12) + 1e-12


class TestAverage:
    def test_examples(self):
        assert average_point(consensus([5.0] * 3, 4)).tolist() == [5.0] * 3
        assert average_point(np.array([[0.0], [4.0]])).tolist() == [2.0]
        assert average_point(np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])).tolist() == [1.0, 1.0]
