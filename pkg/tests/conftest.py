import random

import pytest

from polymeasure.core import Carrier, Map, carrier
from polymeasure.functor import apply_to_set
from polymeasure.fixpoints import Algebra, Coalgebra


def random_algebra(functor, size, rng: random.Random) -> Algebra:
    car = carrier(range(size))
    dom = apply_to_set(functor, car)
    images = tuple(rng.choice(car.elements) for _ in dom)
    return Algebra(functor, car, Map(dom, car, images))


def random_coalgebra(functor, size, rng: random.Random) -> Coalgebra:
    car = carrier(range(size))
    cod = apply_to_set(functor, car)
    images = tuple(rng.choice(cod.elements) for _ in car)
    return Coalgebra(functor, car, Map(car, cod, images))


@pytest.fixture
def rng():
    return random.Random(20260811)
