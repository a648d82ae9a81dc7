import warnings

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from linksymp.dimensions import (
    BNParams,
    RangeWarning,
    case_inequality,
    dims_report,
    exceeds_rho_minus_1,
    g0_stratum_dims,
    main_inequality,
    rho,
    rho_special,
    stability_status,
    stable_exception,
    structured_length,
    parameter_grid,
    varying_det_dimension,
)
from linksymp.errors import ValidationError

g_, d_, k_ = sympy.symbols("g d k", integer=True)
# independent symbolic oracle, written from the classical count rho - 1 = 4g - 4 - k(k - d + 2g - 2)
RHO = 4 * g_ - 3 - k_ * (k_ - d_ + 2 * g_ - 2)


def oracle_rho(g, d, k):
    return int(RHO.subs({g_: g, d_: d, k_: k}))


def oracle_rho_L(g, d, k):
    return oracle_rho(g, d, k) - g + int(sympy.binomial(k, 2))


@pytest.mark.parametrize("t,expected", [((8, 12, 4), 5), ((7, 12, 5), 0), ((10, 17, 5), 7)])
def test_rho(t, expected):
    assert rho(t) == expected == oracle_rho(*t)


@pytest.mark.parametrize("t,expected", [((8, 12, 4), 3), ((7, 11, 4), 4), ((2, 2, 2), 0)])
def test_rho_special(t, expected):
    assert rho_special(t) == expected == oracle_rho_L(*t)


@given(st.integers(0, 40), st.integers(-5, 80), st.integers(0, 12))
def test_formulas_match_oracle(g, d, k):
    assert rho((g, d, k)) == oracle_rho(g, d, k)
    assert rho_special((g, d, k)) == oracle_rho_L(g, d, k)


class TestVaryingDeterminant:
    def test_not_exceeding(self):
        assert varying_det_dimension((8, 12, 4)) == 4
        assert not exceeds_rho_minus_1((8, 12, 4))

    def test_exceeding(self):
        assert varying_det_dimension((10, 17, 5)) == 7
        assert exceeds_rho_minus_1((10, 17, 5))

    @given(st.integers(2, 8), st.integers(0, 30))
    def test_boundary_is_strict(self, k, g):
        d = (k * (k - 1)) // 2 + g - 2  # C(k,2) = d - g + 2
        assert not exceeds_rho_minus_1((g, d, k))

    @given(st.integers(0, 30), st.integers(0, 60), st.integers(2, 8))
    def test_predicate_matches_definition(self, g, d, k):
        assert exceeds_rho_minus_1((g, d, k)) == (varying_det_dimension((g, d, k)) > rho((g, d, k)) - 1)


class TestMainInequality:
    def test_equality_ee(self):
        ineq = main_inequality((8, 12, 4))
        assert ineq.holds and ineq.equality and (ineq.lhs, ineq.rhs) == (32, 32)

    def test_equality_oe(self):
        ineq = main_inequality((7, 11, 4))
        assert ineq.holds and ineq.equality

    def test_exception_listed(self):
        assert main_inequality((3, 2, 2)).holds
        assert stable_exception((3, 2, 2))


class TestExceptions:
    def test_listed(self):
        assert stable_exception((2, 2, 2))
        assert stability_status((2, 2, 2)) == "SemistableOnly"

    def test_not_listed(self):
        assert not stable_exception((8, 12, 4))
        assert stability_status((8, 12, 4)) == "Stable"

    def test_special(self):
        assert not stable_exception((3, 4, 3))
        assert stability_status((3, 4, 3)) == "SpecialCase"


class TestCaseInequality:
    @pytest.mark.parametrize(
        "t,case,rhs", [((8, 12, 4), "EE", 8), ((7, 12, 5), "EO", 7), ((10, 17, 5), "OO", 10), ((7, 11, 4), "OE", 7)]
    )
    def test_worked_values(self, t, case, rhs):
        ci = case_inequality(t)
        assert ci.case == case and ci.rhs == rhs and ci.holds and ci.equivalent_to_main

    def test_parity_mismatch(self):
        with pytest.raises(ValidationError):
            case_inequality((8, 12, 4), "OO")

    def test_unknown(self):
        with pytest.raises(ValidationError):
            case_inequality((8, 12, 4), "XY")
        with pytest.raises(ValidationError):
            structured_length((8, 12, 4), "XY")

    def test_grid_equivalence(self):
        for p in parameter_grid(30):
            assert case_inequality(p).holds == main_inequality(p).holds, p.triple


class TestParams:
    def test_floor_halves(self):
        p = BNParams(10, 17, 5)
        assert (p.d1, p.k1, p.case) == (8, 2, "OO")

    def test_rejects_non_int(self):
        with pytest.raises(ValidationError):
            BNParams(1.5, 2, 2)

    def test_range_warning(self):
        p = BNParams(5, 1, 1)
        assert set(p.range_problems()) == {"k < 2", "d outside [g-2, 2g-2]"}
        with pytest.warns(RangeWarning):
            p.warn_if_out_of_range()

    def test_in_range_is_quiet(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            BNParams(8, 12, 4).warn_if_out_of_range()

    def test_report(self):
        r = dims_report((8, 12, 4))
        assert (r["rho"], r["rho_L"]) == (5, 3)
        assert r["main_inequality"]["equality"]
        assert r["warnings"] == []


class TestStrata:
    def test_no_vanishing(self):
        assert g0_stratum_dims(7, 0).as_dict() == {"target_dim": 7, "stratum_dim": 7, "fiber_dim": 0}

    def test_two_nodes(self):
        s = g0_stratum_dims(6, 2)
        assert (s.stratum_dim, s.fiber_dim, s.total) == (2, 2, 4)
        assert s.total < s.target_dim

    def test_degenerate(self):
        s = g0_stratum_dims(6, S1=1, S2=1, m=1)
        assert s.fiber_dim == 1

    def test_degenerate_partial_degree(self):
        s = g0_stratum_dims(9, S1=1, S2=2, m=1, d_rest=5)
        assert (s.target_dim, s.stratum_dim, s.fiber_dim) == (5, 1, 2)

    @given(st.integers(0, 30), st.integers(0, 10), st.integers(0, 10), st.integers(1, 5))
    def test_degenerate_never_dominates(self, d, S1, S2, m):
        if 2 * S1 + S2 > d or S1 + S2 < m:
            return
        s = g0_stratum_dims(d, S1=S1, S2=S2, m=m)
        assert s.total <= s.target_dim

    def test_bad_inputs(self):
        with pytest.raises(ValidationError):
            g0_stratum_dims(5)
        with pytest.raises(ValidationError):
            g0_stratum_dims(5, S1=1, S2=1, m=0)
        with pytest.raises(ValidationError):
            g0_stratum_dims(5, S1=1, S2=1, d_rest=6)
