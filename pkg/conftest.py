import random
from pathlib import Path

import pytest

from families import family_a, family_b
from rings import base_change
from scalars import FieldDescriptor, ParamPoly, RationalScalar

RINGS_DIR = Path(__file__).parent / "rings"


def random_poly(rng: random.Random, p: int, nvars: int, max_terms: int = 3, max_degree: int = 3) -> ParamPoly:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        exponents = tuple(rng.randint(0, max_degree) for _ in range(nvars))
        terms[exponents] = rng.randrange(p)
    return ParamPoly(p, nvars, terms)


def random_scalar(rng: random.Random, field: FieldDescriptor, fractions: bool = True) -> RationalScalar:
    num = random_poly(rng, field.p, field.s)
    if not fractions or rng.random() < 0.5:
        return field.fraction(num)
    den = random_poly(rng, field.p, field.s, max_terms=2, max_degree=2)
    if den.is_zero():
        den = ParamPoly.one(field.p, field.s)
    return field.fraction(num, den)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def rings_dir():
    return RINGS_DIR


@pytest.fixture(scope="session")
def family_a_2():
    return family_a(2)


@pytest.fixture(scope="session")
def family_a_3():
    return family_a(3)


@pytest.fixture(scope="session")
def family_b_2():
    return family_b(2)


@pytest.fixture(scope="session")
def family_b_3():
    return family_b(3)


@pytest.fixture(scope="session")
def family_a_2_extended(family_a_2):
    return base_change(family_a_2)
