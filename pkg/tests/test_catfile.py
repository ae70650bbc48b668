"""Category description files."""

from fractions import Fraction

import pytest

from cgm.catfile import parse_cat_file
from cgm.errors import DanglingEdge, ParseError
from cgm.indexcat import STAR, ObjectId, WPath


def test_parse_free_category():
    cat = parse_cat_file("""
# lock protocol graph
kind free
objects free critical
gen lock : free -> critical
gen unlock : critical -> free
""")
    assert cat.kind == "free"
    m = cat.path(["lock", "unlock"])
    assert m.src == ObjectId("free") and m.tgt == ObjectId("free")


def test_parse_table_category():
    cat = parse_cat_file("""
kind table
objects a b c
gen f : a -> b
gen g : b -> c
""")
    assert cat.kind == "table"
    pool = cat.morphisms()
    comp = [m for m in pool if m.word == WPath(("f", "g"))]
    assert len(comp) == 1


def test_parse_monoid_categories():
    nat = parse_cat_file("kind monoid\nmonoid nat-plus\n")
    assert nat.compose(nat.elem(2), nat.elem(3)).word.value == 5
    prob = parse_cat_file("kind monoid\nmonoid prob-sat\n")
    out = prob.compose(prob.elem(Fraction(7, 10)), prob.elem(Fraction(5, 10)))
    assert out.word.value == Fraction(1)
    assert prob.identity(STAR).word.value == Fraction(0)


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_cat_file("kind nonsense\n")
    with pytest.raises(ParseError):
        parse_cat_file("kind monoid\n")  # missing monoid line
    with pytest.raises(ParseError):
        parse_cat_file("objects a\ngen broken\n")
    with pytest.raises(DanglingEdge):
        parse_cat_file("objects a\ngen f : a -> b\n")
    with pytest.raises(ParseError):
        parse_cat_file("kind free\n")  # no objects
