import pytest

from shatterlab import Concept, ConceptClass, Distribution


@pytest.fixture
def four_constants():
    return ConceptClass(
        1, tuple(Concept(i, (v,)) for i, v in enumerate([0.0, 1 / 3, 2 / 3, 1.0]))
    )


@pytest.fixture
def two_constants_01():
    return ConceptClass(1, (Concept(0, (0.0,)), Concept(1, (1.0,))))


@pytest.fixture
def two_constants_19():
    return ConceptClass(1, (Concept(0, (0.1,)), Concept(1, (0.9,))))


def make_class(values_rows):
    return ConceptClass(
        len(values_rows[0]),
        tuple(Concept(i, tuple(row)) for i, row in enumerate(values_rows)),
    )


@pytest.fixture
def uniform2():
    return Distribution.uniform(2)
