from pathlib import Path

import pytest

from linksymp.dimensions import case_inequality, rho_special, stability_status, parameter_grid
from linksymp.errors import CheckFailure, ValidationError
from linksymp.families import (
    EI,
    EXAMPLES,
    OI,
    Dec,
    Generic,
    GenericLine,
    LineBundleLabel,
    audit_terms,
    aut_dim,
    build_family,
    det_aspect,
    dimension_audit,
    emit_appendix_tables,
    example_name,
    family_report_dict,
    gen_sequences,
    h0,
    is_semistable,
    observations,
    stability_check,
)
from linksymp.families import _layout

GOLDEN = Path(__file__).resolve().parents[1] / "src" / "linksymp" / "golden" / "v1"


def O(a, b):
    return LineBundleLabel(a, b)


class TestDeterminant:
    def test_middle_component(self):
        assert det_aspect(8, 12, 3) == O(4, 8)

    def test_first_component(self):
        assert det_aspect(8, 12, 1) == O(0, 12)

    def test_before_special(self):
        assert det_aspect(8, 12, 2, 5) == O(2, 9)

    def test_after_special(self):
        assert det_aspect(8, 12, 6, 5) == O(9, 2)

    def test_generic_tail(self):
        L = det_aspect(8, 12, 7)
        assert isinstance(L, GenericLine) and L.degree == 12

    def test_range(self):
        with pytest.raises(ValidationError):
            det_aspect(8, 20, 1)
        with pytest.raises(ValidationError):
            det_aspect(8, 12, 9)


class TestLabels:
    def test_render(self):
        assert Dec(O(2, 4), O(6, 0)).render() == "O(2,4) + O(6,0)"
        assert OI(O(8, 3)).render() == "OI(O(8,3))"
        assert OI(GenericLine(10, 17)).render() == "OI(L_10)"
        assert LineBundleLabel(5, 1, twist=7, det_degree=12).render() == "L_7(5,1)"

    def test_twisted_degree(self):
        assert LineBundleLabel(5, 1, twist=7, det_degree=12).degree == 6

    def test_aut(self):
        assert aut_dim(Dec(O(3, 3), O(3, 3))) == 3
        assert aut_dim(Dec(O(2, 4), O(6, 0))) == 1
        assert aut_dim(EI(6, 0)) == 1
        assert aut_dim(OI(O(8, 3))) == 0

    def test_semistable(self):
        assert is_semistable(Dec(O(2, 4), O(6, 0)))
        assert not is_semistable(Dec(O(2, 4), O(7, 0)))
        assert is_semistable(Generic(7, (6, 6)))

    def test_h0_of_line(self):
        # degree 6 on an elliptic curve, vanishing 2 at P and 4 at Q: O(2P + 4Q) itself
        assert h0(Dec(O(2, 4), O(6, 0)), 2, 4) == 1
        assert h0(Dec(O(2, 4), O(6, 0)), 0, 0) == 12


class TestSequences:
    def test_ee_columns(self):
        T = gen_sequences("EE", 8, 12, 4)
        assert T.a(1) == (0, 0, 1, 1)
        assert T.a(2) == (0, 0, 2, 2)
        assert T.a(9) == (5, 5, 6, 6)  # ascending: reflection of a^1 through b = 6

    def test_eo_last_p_column(self):
        assert gen_sequences("EO", 7, 12, 5).p_column(7) == (3, 4, 4, 5, 6)

    def test_rows_sum_to_b(self):
        T = gen_sequences("OO", 10, 17, 5)
        for i in range(1, T.g):
            assert all(q + p == T.b for q, p in zip(T.q_column(i), T.p_column(i + 1)))

    def test_observation_names(self):
        lay = _layout("EE", 8, 12, 4)
        names = [o.name for o in observations(lay, gen_sequences("EE", 8, 12, 4))]
        assert names == ["refined", "nondecreasing", "interleaving", "pair-advance", "bumped-sum", "cycling-room", "final-sequence"]


class TestBundles:
    def test_ee_component_five(self):
        assert build_family("EE", 8, 12, 4).bundles[4] == Dec(O(2, 4), O(6, 0))

    def test_eo_component_seven(self):
        assert build_family("EO", 7, 12, 5).bundles[6] == EI(6, 0)

    def test_oe_component_five(self):
        assert build_family("OE", 7, 11, 4).bundles[4].render() == "OI(O(8,3))"

    def test_oo_tail(self):
        rep = build_family("oo", 10, 17, 5)
        assert rep.bundles[8].render() == "EI(8,0)"
        assert rep.bundles[9].render() == "OI(L_10)"

    def test_oo_row_five_tail(self):
        row5 = build_family("OO", 10, 17, 5).render().splitlines()[4]
        assert row5.endswith("8 0 | 8 0")

    def test_sections_have_dimension_k(self):
        for case, g, d, k in EXAMPLES:
            for c in build_family(case, g, d, k).components:
                assert c.section_dim == k


class TestLayout:
    def test_parity_mismatch(self):
        with pytest.raises(ValidationError):
            build_family("EE", 7, 11, 4)

    def test_inequality_fails(self):
        with pytest.raises(ValidationError):
            build_family("EE", 8, 12, 6)


class TestAudit:
    @pytest.mark.parametrize(
        "ex,terms",
        [
            (("EE", 8, 12, 4), (0, 12, 15, 0)),
            (("EO", 7, 12, 5), (0, 11, 8, 6)),
            (("OE", 7, 11, 4), (0, 10, 12, 2)),
            (("OO", 10, 17, 5), (0, 13, 13, 7)),
        ],
    )
    def test_worked_counts(self, ex, terms):
        a = dimension_audit(build_family(*ex))
        assert (a.moduli, a.aut, a.gluing, a.vchoices) == terms
        assert a.total == rho_special(ex[1:])

    def test_mismatch_raises(self, monkeypatch):
        import linksymp.families as fam

        rep = build_family("EE", 8, 12, 4)
        monkeypatch.setattr(fam, "rho_special", lambda p: 99)
        with pytest.raises(CheckFailure) as exc:
            fam.dimension_audit(rep)
        assert exc.value.tag == "dimension-audit"


class TestStability:
    def test_ee(self):
        v = stability_check(build_family("EE", 8, 12, 4))
        assert v.as_dict() == {"semistable": True, "stable_status": "Stable"}

    def test_semistable_only(self):
        assert stability_check(build_family("EE", 2, 2, 2)).stable_status == "SemistableOnly"

    def test_special(self):
        assert stability_check(build_family("EO", 3, 4, 3)).stable_status == "SpecialCase"


class TestAppendix:
    def test_names(self):
        assert [example_name(*e) for e in EXAMPLES] == ["ee_8_12_4", "eo_7_12_5", "oe_7_11_4", "oo_10_17_5"]

    def test_first_row(self):
        assert emit_appendix_tables()["ee_8_12_4"].splitlines()[0] == "0 6 | 0 6 | 0 5 | 1 4 | 2 4 | 2 3 | 3 2 | 4 1"

    @pytest.mark.parametrize("name", [example_name(*e) for e in EXAMPLES])
    def test_golden(self, name):
        assert emit_appendix_tables()[name] == (GOLDEN / f"{name}.txt").read_text()

    def test_report_dict(self):
        d = family_report_dict(build_family("EE", 8, 12, 4))
        assert d["b"] == 6 and len(d["components"]) == 8 and d["multidegree"] == [12] * 8


def test_grid_families_small():
    # the exhaustive sweep lives in the acceptance suite; this is the quick smoke version
    for p in parameter_grid(10):
        if not case_inequality(p).holds:
            continue
        rep = build_family(p.case, p.g, p.d, p.k)
        assert audit_terms(rep).ok
        assert stability_check(rep).stable_status == stability_status(p)
