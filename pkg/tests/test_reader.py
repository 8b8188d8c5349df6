# tests/test_reader.py

import pytest

from data import DataLoader, ParseError, UnknownNameError
from data.quiver_reader import parse_text
from engine.modcat import is_isomorphic

A2_HEADER = """\
algebra A2
field 2
vertex 1
vertex 2
arrow a 1 2
"""


def load(text):
    return DataLoader(text=text).load()


def test_parse_text_collects_declarations():
    wb = parse_text(A2_HEADER + "relation 1*a  # ignored comment\nmodule M dim 1 1\nact a = [[1]]\n")
    assert wb.name == "A2"
    assert wb.p == 2
    assert wb.vertices == ["1", "2"]
    assert wb.arrows == [("a", "1", "2")]
    assert wb.relations == [((1, ("a",)),)]
    assert wb.modules[0].dims == (1, 1)
    assert wb.modules[0].acts["a"] == ([[1]], 8)


def test_fixture_loads_named_modules(a2):
    assert sorted(a2.modules) == ["P1", "P2", "S1", "S2"]
    assert a2.algebra.name == "A2"
    assert a2.module("P1").dim_vector == (1, 1)


def test_builtin_names_are_available(a3):
    assert is_isomorphic(a3.module("I3"), a3.module("P1"))
    assert a3.module("S3").dim_vector == (0, 0, 1)


def test_unknown_name(a2):
    with pytest.raises(UnknownNameError) as info:
        a2.module("X9")
    assert "X9" in str(info.value)


def test_full_action_matrix_for_an_arrow():
    wb = load(A2_HEADER + "module M dim 1 1\nact a = [[0, 0], [1, 0]]\n")
    assert is_isomorphic(wb.module("M"), wb.module("P1"))


def test_full_matrix_of_a_non_arrow_label_is_checked(dual):
    assert dual.module("P").dim == 2
    text = "field 2\nvertex 1\narrow x 1 1\nrelation x.x\nmodule P dim 2\nact x = [[0, 0], [1, 0]]\nact e1 = [[1, 0], [0, 0]]\n"
    with pytest.raises(ParseError) as info:
        load(text)
    assert info.value.line == 7


@pytest.mark.parametrize("text, line", [
    ("field 2\nvertex 1\nbogus 3\n", 3),
    ("field 2\nfield 3\n", 2),
    ("field x\n", 1),
    ("field 2\nvertex 1\nvertex 1\n", 3),
    ("field 2\nvertex 1\narrow a 1 2\n", 3),
    ("field 2\nvertex 1\nact a = [[1]]\n", 3),
    ("field 2\nvertex 1\nmodule M dim 1 1\n", 3),
    ("field 2\nvertex 1\nmodule M dim 1\nmodule M dim 1\n", 4),
    ("field 2\nvertex 1\nmodule M dim 1\nact e1 = [[1], [2\n", 4),
    ("field 2\nvertex 1\nmodule M dim 1\nact e1 = [[1, 2], [3]]\n", 4),
    ("field 2\nvertex 1\nrelation 1*a. \n", 3),
])
def test_parse_errors_carry_the_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_text(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"<input>:{line}:")


def test_whole_file_errors_have_line_zero():
    with pytest.raises(ParseError) as info:
        parse_text("vertex 1\n")
    assert info.value.line == 0
    with pytest.raises(ParseError):
        parse_text("field 2\n")


def test_bad_block_shape():
    with pytest.raises(ParseError) as info:
        load(A2_HEADER + "module M dim 1 1\nact a = [[1, 1]]\n")
    assert info.value.line == 7


def test_unknown_basis_label():
    with pytest.raises(ParseError) as info:
        load(A2_HEADER + "module M dim 1 1\nact b = [[1]]\n")
    assert "unknown basis label" in str(info.value)


def test_invalid_field_becomes_a_parse_error():
    with pytest.raises(ParseError):
        load("field 4\nvertex 1\n")


def test_loader_needs_exactly_one_source():
    with pytest.raises(ValueError):
        DataLoader()
    with pytest.raises(ValueError):
        DataLoader(path="x", text="y")


def test_universe_reuses_named_modules(a3, a3_universe):
    assert {m.name for m in a3_universe} == {"M12", "P1", "P2", "P3", "S1", "S2"}
    assert a3.universe((1, 1, 1)) is a3_universe
    assert a3.default_bound() == (1, 1, 1)
