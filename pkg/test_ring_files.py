import pytest

from cech import CechClass
from families import (
    family_a,
    family_a_base_change_witness,
    family_a_enveloping_witness,
    family_b,
    family_b_base_change_witness,
)
from ring_files import (
    RingFileError,
    load_ring_file,
    loads_ring,
    parse_class_expression,
    parse_polynomial,
    write_ring_file,
)
from rings import RingError, base_change, tensor_square
from scalars import FieldDescriptor

FAMILY_A_TEXT = """\
[field]
p = 2
params = ["t1", "t2"]

[variables]
x0 = 1
x1 = 1
x2 = 1

[relations]
x0 = "{relation}"
"""


def test_shipped_files_match_the_constructors(rings_dir):
    loaded = load_ring_file(rings_dir / "family_a_p2.toml")
    built = family_a(2)
    assert loaded.names == built.names
    assert loaded.relation_polynomial(0) == built.relation_polynomial(0)
    assert loaded.assumptions.isolated_singularity_asserted
    assert loaded.assumptions.normal_asserted

    loaded = load_ring_file(rings_dir / "family_b_p2.toml")
    assert loaded.relation_polynomial(0) == family_b(2).relation_polynomial(0)


@pytest.mark.parametrize("ring", [family_a(3), family_b(3), base_change(family_b(2)), tensor_square(family_a(2))],
                         ids=["family-a", "family-b", "base-change", "tensor-square"])
def test_written_files_load_back(ring):
    text = write_ring_file(ring)
    loaded = loads_ring(text)
    assert loaded.names == ring.names
    assert loaded.degrees == ring.degrees
    assert loaded.field.params == ring.field.params
    for j in range(len(ring.relations)):
        assert loaded.relation_polynomial(j) == ring.relation_polynomial(j)


def test_write_ring_file_to_disk(tmp_path):
    path = tmp_path / "ring.toml"
    text = write_ring_file(family_a(2), path)
    assert path.read_text(encoding="utf-8") == text
    assert '"x0^2 + t1*x1^2 + t2*x2^2"' in text


def test_polynomial_syntax():
    field = FieldDescriptor(3, ("t",))
    variables = ["x", "y"]
    poly = parse_polynomial("2 x^2 y - (t + 1)/t * y^3 + 4", variables, field)
    t = field.param("t")
    assert poly[(2, 1)] == field.constant(2)
    assert poly[(0, 3)] == -((t + field.one()) / t)
    assert poly[(0, 0)] == field.one()
    assert parse_polynomial("x*x - x^2", variables, field) == {}


def test_syntax_error_position():
    text = FAMILY_A_TEXT.format(relation="x0^2 + $")
    with pytest.raises(RingFileError) as info:
        loads_ring(text)
    assert info.value.line == 11
    assert info.value.column == 14
    assert "unexpected character" in info.value.reason


def test_unknown_identifier():
    with pytest.raises(RingFileError, match="unknown identifier 's'") as info:
        loads_ring(FAMILY_A_TEXT.format(relation="x0^2 - s*x1^2"))
    assert info.value.line == 11


def test_division_by_a_variable_is_rejected():
    with pytest.raises(RingFileError, match="divisor"):
        loads_ring(FAMILY_A_TEXT.format(relation="x0^2 - x1^3/x2"))


def test_semantic_errors_surface_from_the_ring_builder():
    with pytest.raises(RingError, match="non-homogeneous"):
        loads_ring(FAMILY_A_TEXT.format(relation="x0^2 - x1^3"))


def test_invalid_toml_and_missing_sections():
    with pytest.raises(RingFileError, match="invalid TOML") as info:
        loads_ring("[field]\np = \n")
    assert info.value.line == 2
    with pytest.raises(RingFileError, match="missing \\[field\\]"):
        loads_ring("[variables]\nx = 1\n")
    with pytest.raises(RingFileError, match="integer"):
        loads_ring('[field]\np = "two"\n[variables]\nx = 1\n')
    with pytest.raises(RingFileError):
        loads_ring("[field]\np = 4\n[variables]\nx = 1\n")


def test_class_literals(family_a_2_extended):
    ring = family_a_2_extended
    parsed = parse_class_expression("u2*[x0 / x1^2 x2] - u1*[x0 / x1 x2^2]", ring)
    assert parsed == family_a_base_change_witness(ring)
    assert parse_class_expression("0", ring) == CechClass(ring)
    # fractions are normalized: [x1 x0 / x1^3 x2] is [x0 / x1^2 x2]
    assert parse_class_expression("[x1*x0 / x1^3 x2]", ring) == parse_class_expression("[x0 / x1^2 x2]", ring)
    with pytest.raises(RingFileError, match="every unbound variable"):
        parse_class_expression("[x0 / x1^2]", ring)
    with pytest.raises(RingFileError, match="unbound"):
        parse_class_expression("[1 / x0 x1 x2]", ring)


@pytest.mark.parametrize("p", [2, 3])
def test_witnesses_print_and_parse_back(p):
    extended = base_change(family_a(p))
    square = tensor_square(family_a(p))
    b_extended = base_change(family_b(p))
    for ring, witness in [
        (extended, family_a_base_change_witness(extended)),
        (square, family_a_enveloping_witness(square)),
        (b_extended, family_b_base_change_witness(b_extended)),
    ]:
        assert parse_class_expression(witness.to_str(), ring) == witness
