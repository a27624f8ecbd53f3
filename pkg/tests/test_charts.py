from __future__ import annotations

import random
from fractions import Fraction

import pytest
from conftest import random_multivector

from necklace.calculus import Multivector, schouten, wedge
from necklace.charts import (
    CHARTS,
    atlas_json,
    atlas_map,
    get_chart,
    pushforward_rational,
    rational_map,
    scaling_map,
    st_to_action_angle_map,
    validate_pushforward_numeric,
    xy_to_st_map,
)
from necklace.errors import NotInvertible, UnknownChart, WrongChart
from necklace.polys import RatFunc
from necklace.structures import (
    make_pi_bruhat,
    make_pi_family,
    make_pi_standard,
    necklace_radius,
)

XY, Z, SPHERE, ST = (get_chart(n) for n in ("xy", "z", "sphere", "st"))


def rf(text, chart):
    return RatFunc.parse(text, chart.variables)


def test_registry_and_alias():
    assert get_chart("w") == get_chart("xy")
    assert set(CHARTS) >= {"r4", "xy", "z", "sphere", "st", "action_angle"}
    with pytest.raises(UnknownChart):
        get_chart("nowhere")
    with pytest.raises(UnknownChart):
        atlas_map("nowhere")


def test_xy_to_sphere_components():
    m = atlas_map("xy->sphere")
    assert m.components[0] == rf("2*x/(1+x^2+y^2)", XY)
    assert m.components[2] == rf("(1-x^2-y^2)/(1+x^2+y^2)", XY)
    sq = sum((c * c for c in m.components), RatFunc.zero())
    assert sq == RatFunc.one()


def test_sphere_roundtrip_at_rational_point():
    p = {"x": Fraction(1, 2), "y": Fraction(1, 3)}
    m = atlas_map("xy->sphere")
    q = m(p)
    back = m.inverse(q)
    assert back["x"] == p["x"] and back["y"] == p["y"]


def test_stereographic_identity_on_z_chart():
    m = atlas_map("z->sphere")
    x3 = m.components[2]
    assert rf("X^2+Y^2", Z) == (RatFunc.one() + x3) / (RatFunc.one() - x3)


def test_w_to_z_is_involution():
    m = atlas_map("w->z")
    composite = m.inverse.compose(m)
    assert composite.components == (rf("x", XY), rf("y", XY))


def test_composition_functoriality():
    w2z, z2s = atlas_map("w->z"), atlas_map("z->sphere")
    direct = z2s.compose(w2z)
    assert direct.components == atlas_map("xy->sphere").components
    # chain rule: J(g o f) = J(g)(f) J(f)
    sub = dict(zip(Z.variables, w2z.components))
    Jg = [[e.subs(sub) for e in row] for row in z2s.jacobian()]
    Jf = w2z.jacobian()
    Jgf = direct.jacobian()
    for i in range(3):
        for j in range(2):
            assert Jgf[i][j] == Jg[i][0] * Jf[0][j] + Jg[i][1] * Jf[1][j]


def test_compose_wrong_chart():
    with pytest.raises(WrongChart):
        atlas_map("w->z").compose(atlas_map("w->z").inverse.inverse)


def test_identity_pushforward():
    ident = rational_map(ST, ST, ["s", "t"], name="id")
    ident = ident.with_inverse(rational_map(ST, ST, ["s", "t"], name="id"))
    pi = make_pi_family("st", "1/3").bivector
    assert pushforward_rational(pi, ident) == pi


def test_pushforward_requires_inverse_and_chart():
    no_inv = rational_map(ST, ST, ["s", "t"])
    with pytest.raises(NotInvertible):
        pushforward_rational(make_pi_standard("st").bivector, no_inv)
    with pytest.raises(NotInvertible):
        pushforward_rational(make_pi_standard("st").bivector, xy_to_st_map())
    with pytest.raises(WrongChart):
        pushforward_rational(make_pi_standard("st").bivector, atlas_map("w->z"))


@pytest.mark.parametrize("c", ["0", "1/2", "-1/2", "9/10"])
def test_exact_pushforward_w_to_z(c):
    pushed = pushforward_rational(make_pi_family("xy", c).bivector, atlas_map("w->z"))
    assert pushed == make_pi_family("z", c).bivector


def test_exact_pushforward_standard_and_bruhat():
    m = atlas_map("w->z")
    assert pushforward_rational(make_pi_standard("xy").bivector, m) == make_pi_standard("z").bivector
    assert pushforward_rational(make_pi_bruhat("xy").bivector, m) == make_pi_bruhat("z").bivector


def test_scaling_map_moves_necklace():
    alpha = Fraction(3, 2)
    pushed = pushforward_rational(make_pi_family("st", "1/2").bivector, scaling_map(alpha))
    coef = pushed.coefficient("s", "t")
    r2, _ = necklace_radius("1/2")
    rho = r2.re / alpha ** 2
    # restricted to t = 0 the coefficient is a polynomial in s^2; it vanishes at s^2 = R^2/alpha^2 only
    radial = coef.subs({"t": RatFunc.zero()}).num.with_vars(("s",)).sorted_terms()

    def at(s2):
        return sum(c.re * s2 ** (e[0] // 2) for e, c in radial)

    assert all(e[0] % 2 == 0 for e, _ in radial)
    assert at(rho) == 0
    assert at(Fraction(0)) != 0 and at(rho / 2) != 0


@pytest.mark.parametrize("c", ["0", "1/2", "-1/2", "9/10", "-9/10"])
def test_numeric_validation_xy_to_st(c):
    assert validate_pushforward_numeric(make_pi_family("xy", c).bivector, make_pi_family("st", c).bivector,
                                        xy_to_st_map())


def test_numeric_validation_detects_perturbation():
    good = make_pi_family("st", "1/2").bivector
    bad = good + Multivector(ST, {("s", "t"): 1})
    assert not validate_pushforward_numeric(make_pi_family("xy", "1/2").bivector, bad, xy_to_st_map())


@pytest.mark.parametrize("c", ["0", "1/2", "-1/2", "-1"])
def test_numeric_validation_action_angle(c):
    m = st_to_action_angle_map(c)
    assert validate_pushforward_numeric(make_pi_family("st", c).bivector,
                                        make_pi_family("action_angle", c).bivector, m)


def test_numeric_validation_standard_to_action_angle():
    m = st_to_action_angle_map(-1)
    pi_aa = Multivector(get_chart("action_angle"), {("I", "theta"): Fraction(1, 2)})
    assert validate_pushforward_numeric(make_pi_standard("st").bivector, pi_aa, m)


def test_numeric_validation_of_exact_map_agrees():
    m = atlas_map("w->z")
    for c in ("1/2", "-9/10"):
        assert validate_pushforward_numeric(make_pi_family("xy", c).bivector, make_pi_family("z", c).bivector, m)


def test_numeric_validation_wrong_chart():
    with pytest.raises(WrongChart):
        validate_pushforward_numeric(make_pi_standard("z").bivector, make_pi_standard("st").bivector,
                                     xy_to_st_map())


def _affine_map():
    fwd = rational_map(XY, XY, ["2*x + y + 1", "x - 3*y"], name="aff")
    inv = rational_map(XY, XY, ["(3*x + y - 3)/7", "(x - 2*y - 1)/7"], name="aff^-1")
    return fwd.with_inverse(inv)


@pytest.mark.parametrize("which", ["affine", "mobius"])
@pytest.mark.parametrize("seed", range(4))
def test_pushforward_is_schouten_homomorphism(which, seed):
    rng = random.Random(seed)
    m = _affine_map() if which == "affine" else atlas_map("w->z")
    p, q = rng.randint(0, 2), rng.randint(1, 2)
    a = random_multivector(rng, XY, p, 2, nterms=2)
    b = random_multivector(rng, XY, q, 2, nterms=2)
    pa, pb = pushforward_rational(a, m), pushforward_rational(b, m)
    assert pushforward_rational(schouten(a, b), m) == schouten(pa, pb)
    assert pushforward_rational(wedge(a, b), m) == wedge(pa, pb)


def test_affine_inverse_is_correct():
    m = _affine_map()
    assert m.inverse.compose(m).components == (rf("x", XY), rf("y", XY))


def test_atlas_json_lists_every_map():
    data = atlas_json()
    names = {m["name"] for m in data["maps"]}
    assert {"w->z", "z->w", "xy->sphere", "xy->st", "st->action_angle"} <= names
    assert "w" not in data["charts"]
