import pytest

from cech import (
    BasisClassIndex,
    CechClass,
    CechError,
    cech_fraction,
    class_frobenius,
    class_multiply,
    component_basis,
    family_b_residue,
    index_degree,
    multigraded_split,
    normalize_class,
    veronese_component_basis,
)
from conftest import random_scalar
from families import (
    family_a,
    family_a_alphas,
    family_a_component_dimension,
    family_a_eta,
    family_a_expected_image,
    family_a_low_kernel_class,
    family_a_mu,
    family_a_socle,
    family_b,
    family_b_component_dimension,
    family_b_socle,
    multinomial,
)


def _random_class(rng, component, field):
    coords = {}
    for index in component.basis:
        if rng.random() < 0.6:
            coords[index] = random_scalar(rng, field)
    return CechClass(component.ring, coords)


@pytest.mark.parametrize("p, expected", [(2, 3), (3, 10)])
def test_family_a_component_dimension(p, expected):
    ring = family_a(p)
    assert component_basis(ring, -p).dim == expected
    assert family_a_component_dimension(p) == expected
    assert len(family_a_alphas(p)) == expected


@pytest.mark.parametrize("p, expected", [(2, 4), (3, 15)])
def test_family_b_component_dimension(p, expected):
    ring = family_b(p)
    assert component_basis(ring, -p).dim == expected
    assert family_b_component_dimension(p) == expected


def test_family_a_p2_basis(family_a_2):
    component = component_basis(family_a_2, -2)
    assert [index_degree(family_a_2, index) for index in component.basis] == [(-2,)] * 3
    texts = sorted(component.class_at(k).to_str() for k in range(component.dim))
    assert texts == ["[1 / x1 x2]", "[x0 / x1 x2^2]", "[x0 / x1^2 x2]"]


def test_top_degree_component_is_the_socle(family_b_2):
    component = component_basis(family_b_2, -1)
    assert component.dim == 1
    assert component.class_at(0) == family_b_socle(family_b_2)
    assert component_basis(family_b_2, 0).dim == 0


@pytest.mark.parametrize("p", [2, 3])
def test_family_a_socle_lies_in_the_frobenius_kernel(p):
    ring = family_a(p)
    component = component_basis(ring, -1)
    assert component.dim == 1
    assert component.class_at(0) == family_a_socle(ring)
    assert class_frobenius(family_a_socle(ring)).is_zero()
    assert component_basis(ring, 0).dim == 0


@pytest.mark.parametrize("p", [2, 3])
def test_family_a_frobenius_formula(p):
    ring = family_a(p)
    for alpha in family_a_alphas(p):
        assert class_frobenius(family_a_eta(ring, alpha)) == family_a_expected_image(ring, alpha)


def test_frobenius_formula_by_hand(family_a_2):
    ring = family_a_2
    image = class_frobenius(family_a_eta(ring, (1, 0)))
    assert image == family_a_mu(ring).scale(ring.field.param("t1"))
    assert image.to_str() == "t1*[1 / x1^2 x2^2]"
    assert multinomial((2, 1)) == 3


def test_iterated_frobenius_of_mu():
    for p in (2, 3):
        ring = family_a(p)
        mu = family_a_mu(ring)
        for e in (1, 2):
            expected = BasisClassIndex((0,), (p ** (e + 1) - 1,) * p)
            assert class_frobenius(mu, e) == CechClass.basis_class(ring, expected)
        assert class_frobenius(class_frobenius(mu)) == class_frobenius(mu, 2)


def test_low_degree_kernel_class():
    for p in (2, 3):
        ring = family_a(p)
        eta = family_a_low_kernel_class(ring)
        assert eta.degree() == (1 - p,)
        assert not eta.is_zero()
        assert class_frobenius(eta).is_zero()


def test_frobenius_laws(rng, family_a_2, family_a_3, family_b_2):
    checked = 0
    for ring in (family_a_2, family_a_3, family_b_2):
        p = ring.p
        component = component_basis(ring, -p)
        for _ in range(70):
            eta = _random_class(rng, component, ring.field)
            xi = _random_class(rng, component, ring.field)
            c = random_scalar(rng, ring.field)
            image = class_frobenius(eta)
            assert class_frobenius(eta.scale(c)) == image.scale(c.frobenius())
            assert class_frobenius(eta + xi) == image + class_frobenius(xi)
            if not image.is_zero():
                assert image.degree() == (-p * p,)
            checked += 1
    assert checked >= 200


def test_normalize_class_properties(rng, family_a_3):
    ring = family_a_3
    for _ in range(200):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            exponents = tuple(rng.randint(0, 4) for _ in range(ring.nvars))
            terms[exponents] = random_scalar(rng, ring.field, fractions=False)
        numerator = ring.element(terms)
        other = ring.element({tuple(rng.randint(0, 3) for _ in range(ring.nvars)): ring.field.one()})
        k = [rng.randint(1, 4) for _ in ring.unbound_indices]
        eta = normalize_class(numerator, k)
        # a second normalization of each basis fraction changes nothing
        for index, c in eta.coords.items():
            exponents = [0] * ring.nvars
            for j, a in zip(ring.bound_indices, index.bound):
                exponents[j] = a
            again = normalize_class(ring.element({tuple(exponents): c}), index.denominators())
            assert again == CechClass(ring, {index: c})
        assert normalize_class(numerator + other, k) == eta + normalize_class(other, k)
        # [g u / u^(k+1)] = [g / u^k]
        i = rng.randrange(len(ring.unbound_indices))
        u = ring.gen(ring.unbound_indices[i])
        shifted = list(k)
        shifted[i] += 1
        assert normalize_class(numerator * u, shifted) == eta


def test_cech_fraction_validation(family_a_2):
    ring = family_a_2
    with pytest.raises(CechError, match="non-unbound"):
        cech_fraction(ring, ring.one(), {"x0": 1, "x1": 1, "x2": 1})
    with pytest.raises(CechError, match="positive"):
        cech_fraction(ring, ring.one(), {"x1": 1})
    assert cech_fraction(ring, ring.gen("x1"), {"x1": 1, "x2": 1}).is_zero()


def test_class_multiply(family_a_2):
    ring = family_a_2
    eta = cech_fraction(ring, ring.one(), {"x1": 2, "x2": 1})
    assert class_multiply(ring.gen("x1"), eta) == cech_fraction(ring, ring.one(), {"x1": 1, "x2": 1})
    assert class_multiply(ring.gen("x1") ** 2, eta).is_zero()
    # x0 * [x0 / x1^2 x2] = [t1 x1^2 + t2 x2^2 / x1^2 x2] = 0
    xi = cech_fraction(ring, ring.gen("x0"), {"x1": 2, "x2": 1})
    assert class_multiply(ring.gen("x0"), xi).is_zero()


def test_veronese_component(family_a_2, family_b_2):
    assert veronese_component_basis(family_a_2, 2, -1).dim == component_basis(family_a_2, -2).dim
    assert veronese_component_basis(family_b_2, 2, -1).veronese == (2, (-1,))
    with pytest.raises(CechError):
        veronese_component_basis(family_a_2, 0, -1)
    with pytest.raises(CechError, match="grading rank"):
        component_basis(family_a_2, (-2, -2))


def test_multigraded_split_partitions_the_basis(family_b_2, family_b_3):
    for ring in (family_b_2, family_b_3):
        component = component_basis(ring, -ring.p)
        parts = multigraded_split(ring, component)
        flattened = sorted(index for part in parts.values() for index in part)
        assert flattened == sorted(component.basis)
        assert len(parts) > 1
        p = ring.p
        for residue, part in parts.items():
            for index in part:
                image = class_frobenius(CechClass.basis_class(ring, index))
                for target in image.coords:
                    assert family_b_residue(ring, target) == tuple(p * r % (p + 1) for r in residue)


def test_multigraded_split_rejects_other_rings(family_a_2):
    with pytest.raises(CechError):
        multigraded_split(family_a_2, component_basis(family_a_2, -2))


def test_component_coordinates(family_a_2):
    component = component_basis(family_a_2, -2)
    eta = component.class_at(1).scale(family_a_2.field.param("t2"))
    vector = component.coordinates(eta)
    assert component.from_vector(vector) == eta
    with pytest.raises(CechError):
        component.coordinates(family_a_mu(family_a_2))
