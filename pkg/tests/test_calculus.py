from __future__ import annotations

import random

import pytest
from conftest import CHART2, CHART4, random_multivector, random_poly

from necklace.calculus import (
    CONVENTIONS,
    DiffForm,
    Multivector,
    d_pi,
    de_rham_d,
    hamiltonian_vf,
    interior,
    lie_derivative,
    modular_field,
    pi_sharp,
    poisson_bracket,
    schouten,
    schouten_bv,
    vf_apply,
    wedge,
)
from necklace.charts import get_chart
from necklace.errors import ChartMismatch, NotPoisson, ZeroDensity
from necklace.polys import RatFunc
from necklace.structures import euler_field, make_pi_family, make_pi_standard

ST = get_chart("st")
AA = get_chart("action_angle")
XY = get_chart("xy")


def rf(text, chart=ST):
    return RatFunc.parse(text, chart.ring_vars)


def vf(chart=ST, **comps):
    return Multivector(chart, {(k,): rf(v, chart) for k, v in comps.items()})


def parity(k):
    return -1 if k % 2 else 1


def sgn(p, q):
    return parity((p - 1) * (q - 1))


# -- exterior algebra ------------------------------------------------------------


def test_wedge_basics():
    ds, dt = Multivector.basis(ST, "s"), Multivector.basis(ST, "t")
    assert wedge(ds, dt) == Multivector.basis(ST, "s", "t")
    assert wedge(ds, ds).is_zero()
    assert wedge(vf(s="s"), vf(t="t")) == Multivector(ST, {("s", "t"): rf("s*t")})
    assert wedge(dt, ds) == -wedge(ds, dt)


def test_wedge_chart_mismatch():
    with pytest.raises(ChartMismatch):
        wedge(Multivector.basis(ST, "s"), Multivector.basis(XY, "x"))


@pytest.mark.parametrize("seed", range(10))
def test_wedge_graded_commutative(seed):
    rng = random.Random(seed)
    for p in range(3):
        for q in range(3):
            a = random_multivector(rng, CHART4, p, 2)
            b = random_multivector(rng, CHART4, q, 2)
            assert wedge(a, b) == wedge(b, a) * ((-1) ** (p * q))


def test_storage_is_canonical():
    a = Multivector(ST, {("t", "s"): 1})
    assert a.components == {(0, 1): RatFunc.parse("-1", ())}
    assert Multivector(ST, {("s", "s"): 1}).is_zero()
    assert a.coefficient("t", "s") == RatFunc.one()


# -- Schouten -------------------------------------------------------------------------


def test_bracket_with_function_is_derivative():
    X = Multivector.basis(ST, "s")
    f = Multivector.function(ST, rf("s^2"))
    assert schouten(X, f) == Multivector.function(ST, rf("2*s"))


def test_lie_bracket_of_vector_fields():
    X, Y = vf(s="t"), vf(t="s^2")
    # [t d/ds, s^2 d/dt] = 2 s t d/dt - s^2 d/ds
    assert schouten(X, Y) == vf(s="-s^2", t="2*s*t")


def test_euler_primitive():
    for c in ("0", "1/2", "-1/2"):
        pi_c = make_pi_family("st", c).bivector
        assert schouten(pi_c, euler_field(c)) == make_pi_standard("st").bivector


@pytest.mark.parametrize("seed", range(10))
def test_two_dimensional_bivectors_commute(seed):
    rng = random.Random(seed)
    a, b = random_multivector(rng, CHART2, 2, 3), random_multivector(rng, CHART2, 2, 3)
    assert schouten(a, b).is_zero()
    assert schouten(a, a).is_zero()


@pytest.mark.parametrize("chart", [CHART2, CHART4], ids=["2var", "4var"])
@pytest.mark.parametrize("seed", range(8))
def test_two_evaluators_agree(chart, seed):
    rng = random.Random(seed)
    for p in range(3):
        for q in range(3):
            a = random_multivector(rng, chart, p, 3)
            b = random_multivector(rng, chart, q, 3)
            assert schouten(a, b) == schouten_bv(a, b), (p, q)


@pytest.mark.parametrize("seed", range(6))
def test_graded_antisymmetry_leibniz_jacobi(seed):
    rng = random.Random(1000 + seed)
    chart = CHART4 if seed % 2 else CHART2
    degs = [rng.randint(0, 2) for _ in range(3)]
    a, b, c = (random_multivector(rng, chart, d, 2) for d in degs)
    p, q, _ = degs
    assert schouten(a, b) == schouten(b, a) * (-sgn(p, q))
    assert schouten(a, wedge(b, c)) == wedge(schouten(a, b), c) + wedge(b, schouten(a, c)) * parity((p - 1) * q)
    lhs = schouten(a, schouten(b, c))
    rhs = schouten(schouten(a, b), c) + schouten(b, schouten(a, c)) * sgn(p, q)
    assert lhs == rhs


# -- Poisson calculus ---------------------------------------------------------------


def test_d_pi_examples_action_angle():
    pi = make_pi_family("action_angle", 0)
    xi = Multivector.basis(AA, "I")
    assert d_pi(pi, xi) == Multivector(AA, {("I", "theta"): -1})
    assert d_pi(pi, Multivector.function(AA, 1)).is_zero()
    for m in range(1, 5):
        image = d_pi(pi, Multivector.function(AA, rf(f"I^{m}", AA)))
        assert image == Multivector(AA, {("theta",): rf(f"-{m}*I^{m}", AA)})


def test_d_pi_rejects_non_poisson_raw_bivector():
    bad = Multivector(CHART4, {("a", "b"): RatFunc.parse("p", CHART4.variables),
                               ("p", "q"): RatFunc.parse("a", CHART4.variables)})
    with pytest.raises(NotPoisson):
        d_pi(bad, Multivector.basis(CHART4, "a"))


@pytest.mark.parametrize("chart", ["xy", "z", "st", "action_angle"])
@pytest.mark.parametrize("seed", range(5))
def test_d_pi_squared_is_zero(chart, seed):
    rng = random.Random(seed)
    pi = make_pi_family(chart, "1/3")
    ch = get_chart(chart)
    for deg in range(2):
        mv = random_multivector(rng, _ring_chart(ch), deg, 3)
        mv = Multivector(ch, {k: v for k, v in mv.components.items()})
        assert d_pi(pi, d_pi(pi, mv)).is_zero()


def _ring_chart(ch):
    # random coefficients drawn in the coefficient ring variables
    from necklace.charts import Chart

    return Chart(ch.name + "_ring", ch.ring_vars)


def test_pi_sharp_and_hamiltonian_orientation():
    pi = make_pi_standard("st")
    ds = DiffForm(ST, {("s",): 1})
    assert pi_sharp(pi, ds) == Multivector(ST, {("t",): rf("-1/4")})
    assert hamiltonian_vf(pi, rf("s")) == Multivector(ST, {("t",): rf("-1/4")})
    assert hamiltonian_vf(pi, rf("7")).is_zero()


def test_hamiltonian_of_action():
    pi = make_pi_family("action_angle", 0)
    assert hamiltonian_vf(pi, rf("I", AA)) == Multivector(AA, {("theta",): rf("-I", AA)})


@pytest.mark.parametrize("seed", range(8))
def test_hamiltonian_consistency(seed):
    rng = random.Random(seed)
    pi = make_pi_family("st", "1/2")
    h = RatFunc(random_poly(rng, ST.variables, 3, 3))
    k = RatFunc(random_poly(rng, ST.variables, 3, 3))
    X = hamiltonian_vf(pi, h)
    assert X == pi_sharp(pi, de_rham_d(DiffForm.function(ST, h)))
    assert X == d_pi(pi, Multivector.function(ST, h))
    assert vf_apply(X, k) == poisson_bracket(pi, k, h)
    assert poisson_bracket(pi, h, k) == -poisson_bracket(pi, k, h)


def test_conventions_block_is_complete():
    for key in ("orientation", "schouten", "poisson_bracket", "sharp", "hamiltonian_vector_field",
                "modular_vector_field"):
        assert key in CONVENTIONS


# -- modular field ------------------------------------------------------------------


def test_modular_field_of_omega_is_rotation():
    density = rf("4/(1+x^2+y^2)^2", XY)
    expected = Multivector(XY, {("y",): rf("x", XY), ("x",): rf("-y", XY)})
    for c in ("0", "1/2", "-1/2", "9/10", "-9/10"):
        assert modular_field(make_pi_family("xy", c), density, check=True) == expected


def test_modular_field_liouville_density_is_zero():
    f = rf("1 + s^2 + 3*t^4")
    pi = Multivector(ST, {("s", "t"): f})
    assert modular_field(pi, f.inverse(), check=True).is_zero()


def test_modular_field_unit_density_disk_chart():
    pi = make_pi_family("st", "1/2")
    delta = modular_field(pi, 1, check=True)
    f = pi.coefficient()
    # Delta^j = sum_i d_i pi^{ij}: -f_t d/ds + f_s d/dt
    assert delta == Multivector(ST, {("s",): -f.derivative("t"), ("t",): f.derivative("s")})
    assert delta == Multivector(ST, {("s",): rf("-t"), ("t",): rf("s")})


def test_modular_zero_density():
    with pytest.raises(ZeroDensity):
        modular_field(make_pi_standard("st"), 0)


@pytest.mark.parametrize("g", ["1+s^2", "2+s*t+t^2", "(3+s^2)/(1+t^2)"])
def test_modular_volume_covariance(g):
    pi = make_pi_family("st", "1/2")
    mu = rf("1+t^2")
    gg = rf(g)
    lhs = modular_field(pi, gg * mu)
    rhs = modular_field(pi, mu) - pi_sharp(pi, de_rham_d(DiffForm.function(ST, gg))) * gg.inverse()
    assert lhs == rhs


# -- Lie derivative, d, interior ------------------------------------------------------


def test_lie_derivative_examples():
    pi_c = make_pi_family("st", "1/2").bivector
    assert lie_derivative(euler_field("1/2"), pi_c) == -make_pi_standard("st").bivector
    X = vf(s="s*t", t="s")
    assert lie_derivative(X, X).is_zero()
    dtheta = Multivector.basis(AA, "theta")
    assert lie_derivative(dtheta, make_pi_family("action_angle", 0).bivector).is_zero()


def test_de_rham_examples():
    assert de_rham_d(DiffForm(ST, {("t",): rf("s")})) == DiffForm(ST, {("s", "t"): 1})
    assert de_rham_d(DiffForm(ST, {("s",): 1})).is_zero()


@pytest.mark.parametrize("seed", range(6))
def test_d_squared_and_leibniz(seed):
    rng = random.Random(seed)
    for p in range(3):
        a = DiffForm(CHART4, random_multivector(rng, CHART4, p, 3).components)
        assert de_rham_d(de_rham_d(a)).is_zero()
        b = DiffForm(CHART4, random_multivector(rng, CHART4, 1, 2).components)
        assert de_rham_d(wedge(a, b)) == wedge(de_rham_d(a), b) + wedge(a, de_rham_d(b)) * ((-1) ** p)


def test_interior_example():
    omega = DiffForm(AA, {("I", "theta"): rf("1/I", AA)})
    assert interior(Multivector.basis(AA, "theta"), omega) == DiffForm(AA, {("I",): rf("-1/I", AA)})


@pytest.mark.parametrize("seed", range(5))
def test_cartan_formula_on_functions(seed):
    rng = random.Random(seed)
    X = random_multivector(rng, CHART2, 1, 2, density=1.0)
    f = RatFunc(random_poly(rng, CHART2.variables, 3, 3))
    assert lie_derivative(X, DiffForm.function(CHART2, f)) == DiffForm.function(CHART2, vf_apply(X, f))


def test_serialization_shape():
    data = make_pi_family("st", "1/2").bivector.to_json()
    assert data["chart"] == "st" and data["kind"] == "multivector"
    text = data["components"]["2"]["s^t"]
    assert text == "1/2*s^2 + 1/2*t^2 - 1/8"
    assert RatFunc.parse(text, ST.variables) == make_pi_family("st", "1/2").coefficient()
