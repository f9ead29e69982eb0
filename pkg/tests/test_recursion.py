import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnn_certify import recursion
from gnn_certify.activations import make_activation
from gnn_certify.errors import DeepBoundUnavailable, DomainError
from gnn_certify.recursion import Architecture

RELU = make_activation("relu")


def relu_sequences(cb, cw, o0, L):
    """ReLU closed forms: O = kappa^2 / 2, c = sqrt(2 * 3 kappa^4 / 2)."""
    o, c, prev = [], [], o0
    for _ in range(L):
        k2 = cb + cw * prev
        prev = k2 / 2
        o.append(prev)
        c.append(math.sqrt(3.0) * k2)
    return o, c


class TestArchitecture:
    def test_widths_and_depth(self):
        arch = Architecture(4, (10, 20), 3, 1.0, 2.0)
        assert arch.L == 2
        assert arch.widths == (4, 10, 20, 3)
        assert not arch.is_shallow

    @pytest.mark.parametrize("kwargs", [
        dict(n0=0, hidden=(5,), n_out=1, C_b=1.0, C_W=1.0),
        dict(n0=2, hidden=(), n_out=1, C_b=1.0, C_W=1.0),
        dict(n0=2, hidden=(5, 0), n_out=1, C_b=1.0, C_W=1.0),
        dict(n0=2, hidden=(5,), n_out=1, C_b=0.0, C_W=1.0),
        dict(n0=2, hidden=(5,), n_out=1, C_b=1.0, C_W=-1.0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            Architecture(**kwargs)


class TestOZero:
    def test_mean_square(self):
        assert recursion.o_zero([0.5, -0.5, 0.5, -0.5]) == 0.25
        assert recursion.o_zero([10.0] * 4) == 100.0

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            recursion.o_zero([1.0, 2.0], n0=3)

    def test_nonfinite(self):
        with pytest.raises(DomainError):
            recursion.o_zero([1.0, float("nan")])


class TestSequences:
    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.1, 10), st.floats(0.01, 3), st.floats(0, 4), st.integers(1, 6))
    def test_relu_closed_form(self, cb, cw, x, L):
        arch = Architecture(2, (7,) * L, 1, cb, cw)
        stats = recursion.layer_stats(RELU, arch, (x, -x))
        o, c = relu_sequences(cb, cw, x * x, L)
        assert stats.o_seq == pytest.approx(o, rel=1e-12)
        assert stats.c_seq == pytest.approx(c, rel=1e-12)
        assert stats.nu_sq == pytest.approx(cb + cw * o[-1], rel=1e-12)
        assert recursion.o_sequence(RELU, arch, (x, -x)) == pytest.approx(o, rel=1e-12)
        assert recursion.c_sequence(RELU, arch, (x, -x)) == pytest.approx(c, rel=1e-12)

    def test_example_variance(self):
        stats = recursion.layer_stats(RELU, Architecture(4, (50,) * 3, 3, 1.0, 1.0), (0.0,) * 4)
        assert stats.o_seq == pytest.approx((0.5, 0.75, 0.875))
        assert stats.nu_sq == pytest.approx(1.875)

    def test_deep_warning(self):
        with pytest.warns(UserWarning, match="depth"):
            recursion.o_sequence(RELU, Architecture(1, (3,) * 20, 1, 1.0, 0.5), (1.0,))

    def test_no_warning_for_moderate_depth(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            recursion.o_sequence(RELU, Architecture(1, (3,) * 5, 1, 1.0, 0.5), (1.0,))


class TestCollective:
    def test_relu_example_sum(self):
        # multiplier 4 sqrt(2) sqrt(3/2) = 4 sqrt(3); c = sqrt(3) * (1, 3/2, 7/4)
        s3 = math.sqrt(3.0)
        expected = ((4 * s3) ** 2 * s3 + 4 * s3 * 1.5 * s3 + 1.75 * s3) / 100
        arch = Architecture(4, (10**4,) * 3, 1, 1.0, 1.0)
        assert recursion.collective_bound(RELU, arch, (0.0,) * 4) == pytest.approx(expected, rel=1e-13)
        assert expected == pytest.approx(1.04174, rel=1e-4)

    def test_layer_one_is_single_term(self):
        arch = Architecture(4, (50, 50), 1, 1.0, 1.0)
        assert recursion.collective_bound(RELU, arch, (0.0,) * 4, ell=1) == pytest.approx(math.sqrt(3) / math.sqrt(50))

    def test_perceptron_zero_power_convention(self):
        # P = 0 so only the k = ell term survives, with 0^0 = 1
        act = make_activation("perceptron")
        arch = Architecture(1, (4, 9, 16), 1, 1.0, 1.0)
        c = math.sqrt(2 * 0.5)
        for ell, n in zip((1, 2, 3), (4, 9, 16)):
            assert recursion.collective_bound(act, arch, (1.0,), ell) == pytest.approx(c / math.sqrt(n))

    def test_unavailable_for_monomial(self):
        act = make_activation("monomial", k=3)
        arch = Architecture(1, (4, 4), 1, 1.0, 1.0)
        assert recursion.layer_stats(act, arch, (1.0,)).p_l2 is None
        with pytest.raises(DeepBoundUnavailable):
            recursion.collective_bound(act, arch, (1.0,))

    def test_layer_out_of_range(self):
        with pytest.raises(DomainError):
            recursion.collective_bound(RELU, Architecture(1, (4,), 1, 1.0, 1.0), (1.0,), ell=2)
