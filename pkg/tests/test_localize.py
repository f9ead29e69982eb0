import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from gnn_certify import bounds, localize
from gnn_certify.activations import make_activation
from gnn_certify.errors import DomainError
from gnn_certify.localize import LocalizationReport, Rect
from gnn_certify.recursion import Architecture

RELU = make_activation("relu")
finite = st.floats(-50, 50, allow_nan=False)


class TestRect:
    def test_parse_with_infinities(self):
        r = Rect.parse("-inf:0, -1.5:inf")
        assert r.lo == (-math.inf, -1.5) and r.hi == (0.0, math.inf)
        assert r.format() == "-inf:0.0,-1.5:inf"

    @given(st.lists(st.tuples(finite, finite), min_size=1, max_size=5))
    def test_format_round_trip(self, axes):
        lo = tuple(min(a, b) for a, b in axes)
        hi = tuple(max(a, b) for a, b in axes)
        r = Rect(lo, hi)
        assert Rect.parse(r.format()) == r

    @pytest.mark.parametrize("text", ["1:0", "a:b", "0", "", "nan:1"])
    def test_bad(self, text):
        with pytest.raises(DomainError):
            Rect.parse(text)


class TestLimitProbability:
    def test_one_sigma(self):
        assert localize.limit_rect_prob(2.0, 1, Rect((-math.sqrt(2),), (math.sqrt(2),))) == pytest.approx(
            0.682689492137, abs=1e-12)

    def test_against_multivariate_normal(self):
        rect = Rect((-1.0, -0.3), (0.5, 2.0))
        mvn = stats.multivariate_normal(mean=[0, 0], cov=[[1.7, 0], [0, 1.7]])
        expected = (mvn.cdf([0.5, 2.0]) - mvn.cdf([-1.0, 2.0]) - mvn.cdf([0.5, -0.3]) + mvn.cdf([-1.0, -0.3]))
        assert localize.limit_rect_prob(1.7, 2, rect) == pytest.approx(expected, abs=1e-7)

    def test_infinite_bounds(self):
        assert localize.limit_rect_prob(1.0, 2, Rect((-math.inf,) * 2, (math.inf,) * 2)) == 1.0
        assert localize.limit_rect_prob(1.0, 1, Rect((0.0,), (math.inf,))) == 0.5
        assert localize.limit_rect_prob(1.0, 1, Rect((math.inf,), (math.inf,))) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            localize.limit_rect_prob(1.0, 2, Rect((0.0,), (1.0,)))


class TestCertifiedInterval:
    def test_shallow_mode(self):
        arch = Architecture(4, (100,), 1, 1.0, 1.0)
        nu = math.sqrt(1.5)
        rep = localize.certified_interval(RELU, arch, (0.0,) * 4, Rect((-nu,), (nu,)))
        assert rep.mode == "tv_shallow"
        assert rep.p_limit == pytest.approx(0.682689, abs=1e-6)
        tv = bounds.shallow_bounds(RELU, arch, (0.0,) * 4)["total_variation"].value
        assert rep.c_bound == tv
        assert rep.interval == pytest.approx((rep.p_limit - tv, rep.p_limit + tv))

    def test_deep_mode_clips(self):
        arch = Architecture(4, (100, 100), 2, 1.0, 1.0)
        rep = localize.certified_interval(RELU, arch, (0.0,) * 4, Rect((-1, -1), (1, 1)))
        assert rep.mode == "convex_deep"
        assert rep.interval == (0.0, 1.0)

    def test_explicit_mode_and_validation(self):
        arch = Architecture(4, (100,), 1, 1.0, 1.0)
        rep = localize.certified_interval(RELU, arch, (0.0,) * 4, Rect((-1,), (1,)), mode="convex_deep")
        assert rep.c_bound == bounds.deep_convex_bound(RELU, arch, (0.0,) * 4).value
        with pytest.raises(DomainError):
            localize.certified_interval(RELU, arch, (0.0,) * 4, Rect((-1,), (1,)), mode="nope")

    def test_report_round_trip(self):
        rep = LocalizationReport(0.4, 0.1, "tv_shallow")
        assert LocalizationReport.from_dict(rep.to_dict()) == rep
        assert rep.contains(0.45) and not rep.contains(0.55) and rep.contains(0.55, slack=0.06)
