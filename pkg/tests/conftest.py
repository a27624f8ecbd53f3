from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from necklace.calculus import Multivector
from necklace.charts import Chart
from necklace.polys import Poly, RatFunc
from necklace.scalars import Scalar

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CHART2 = Chart("plane", ("x", "y"))
CHART4 = Chart("r4test", ("a", "b", "p", "q"))


def random_scalar(rng: random.Random, gaussian: bool = False) -> Scalar:
    re = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    im = Fraction(rng.randint(-3, 3), rng.randint(1, 2)) if gaussian else 0
    return Scalar(re, im)


def random_poly(rng: random.Random, variables, max_deg: int = 3, nterms: int = 3, gaussian=False) -> Poly:
    terms = {}
    for _ in range(nterms):
        e = [0] * len(variables)
        for _ in range(rng.randint(0, max_deg)):
            e[rng.randrange(len(variables))] += 1
        terms[tuple(e)] = random_scalar(rng, gaussian)
    return Poly(terms, variables)


def random_multivector(rng: random.Random, chart: Chart, degree: int, max_deg: int = 3,
                       nterms: int = 2, density: float = 0.6) -> Multivector:
    comps = {}
    for idx in itertools.combinations(range(chart.dimension), degree):
        if degree and rng.random() > density:
            continue
        comps[idx] = RatFunc(random_poly(rng, chart.variables, max_deg, nterms))
    return Multivector(chart, comps)


@pytest.fixture
def rng():
    return random.Random(20240601)
