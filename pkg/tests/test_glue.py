from __future__ import annotations

import math
from fractions import Fraction

import pytest

from necklace.calculus import Multivector
from necklace.charts import get_chart
from necklace.errors import Inconsistent, OutOfRange, SingularOnLoop, Underdetermined
from necklace.formal import zero_mode_to_st
from necklace.glue import (
    ExactSequence,
    annulus_loops,
    deformation_check,
    global_cohomology,
    mayer_vietoris_sequence,
    period_class,
    period_matrix,
    restriction_rank,
    solve_exact_sequence,
)
from necklace.polys import RatFunc
from necklace.structures import make_pi_family

ST = get_chart("st")


def st_vf(**comps):
    return Multivector(ST, {(k,): RatFunc.parse(v, ST.variables) for k, v in comps.items()})


ROTATION = st_vf(t="s", s="-t")
DILATION = st_vf(s="s", t="t")


# -- exact sequences ----------------------------------------------------------------------


def test_short_exact_sequence():
    seq = ExactSequence([{"label": "A", "dim": 2}, {"label": "B", "dim": None}, {"label": "C", "dim": 3}],
                        [{"rank": None}, {"rank": None}])
    out = solve_exact_sequence(seq)
    assert out.dims == [2, 5, 3]
    assert out.ranks == [2, 3]


def test_inconsistent_sequence():
    seq = ExactSequence([{"label": "A", "dim": 2}, {"label": "B", "dim": 1}], [{"rank": None}])
    with pytest.raises(Inconsistent):
        solve_exact_sequence(seq)


def test_mayer_vietoris_with_rank_one():
    out = solve_exact_sequence(mayer_vietoris_sequence(restriction_rank_1=1))
    assert [out.terms[k]["dim"] for k in (0, 3, 6)] == [1, 1, 2]
    assert out.euler_characteristic() == 0


@pytest.mark.parametrize("r, expected", [(0, [1, 2, 3]), (2, [1, 0, 1])])
def test_mayer_vietoris_other_ranks(r, expected):
    out = solve_exact_sequence(mayer_vietoris_sequence(restriction_rank_1=r))
    assert [out.terms[k]["dim"] for k in (0, 3, 6)] == expected


def test_mayer_vietoris_needs_restriction_rank():
    with pytest.raises(Underdetermined) as exc:
        solve_exact_sequence(mayer_vietoris_sequence())
    resolving = " ".join(exc.value.resolving)
    assert "map 4" in resolving
    assert {f"map {j}" in resolving for j in (3, 4, 5)} == {True}


def test_rank_exceeding_dimension_rejected():
    with pytest.raises(Inconsistent):
        solve_exact_sequence(mayer_vietoris_sequence(restriction_rank_1=3))


# -- periods ---------------------------------------------------------------------------------


@pytest.mark.parametrize("c", ["0", "1/2", "-1/2", "9/10", "-9/10"])
def test_periods_of_annulus_generators(c):
    pi = make_pi_family("st", c)
    loops = annulus_loops(c)
    gens = [ROTATION, _action_dilation(c)]
    P = period_matrix(gens, pi, loops)
    assert abs(P[0][0]) < 1e-9 and abs(P[0][1]) < 1e-9
    assert P[1][0] == pytest.approx(2 * math.pi, rel=1e-9)
    assert P[1][1] == pytest.approx(2 * math.pi, rel=1e-9)
    assert restriction_rank(gens, pi, loops) == 1


def _action_dilation(c):
    aa = get_chart("action_angle")
    xi = Multivector(aa, {("I",): RatFunc.parse("I", aa.ring_vars)})
    return zero_mode_to_st(xi, (1 - Fraction(c)) / 2)


def test_plain_dilation_is_not_a_generator():
    # s d/ds + t d/dt has different periods on the two sides of the necklace
    pi = make_pi_family("st", "1/2")
    P = period_matrix([DILATION], pi, annulus_loops("1/2"))
    assert P[0][0] != pytest.approx(P[0][1])


def test_dilation_period_value():
    # i_X omega for X = s d/ds + t d/dt and omega = ds^dt / f integrates to 2 pi rho / f(rho)
    pi = make_pi_family("st", "1/2")
    rho = Fraction(1, 8)
    f = (rho - Fraction(1, 4)) / 2
    assert period_class(pi, DILATION, rho) == pytest.approx(2 * math.pi * rho / f, rel=1e-12)


def test_period_on_necklace_is_singular():
    with pytest.raises(SingularOnLoop):
        period_class(make_pi_family("st", "1/2"), ROTATION, Fraction(1, 4))


def test_loops_inside_disk_and_around_necklace():
    for c in ("-9/10", "0", "9/10"):
        loops = annulus_loops(c)
        lo, hi = loops["annulus"]
        r2 = (1 - Fraction(c)) / 2
        assert 0 < lo.re < loops["lower_cap_side"].re < r2 < loops["upper_cap_side"].re < hi.re < 1


def test_restriction_rank_empty():
    assert restriction_rank([], make_pi_family("st", 0), annulus_loops(0)) == 0


# -- global cohomology ----------------------------------------------------------------------


@pytest.mark.parametrize("c", ["1/2", "0", "-1/4"])
def test_global_cohomology(c):
    rep = global_cohomology(c)
    assert rep.dims == [1, 1, 2]
    ev = rep.extra["evidence"]
    assert ev["restriction_matrix"]["rank"] == 1
    assert ev["modular_field"]["equals x d/dy - y d/dx"]
    assert ev["euler_primitive_check"]["[pi_c, E] == pi"]
    assert ev["pi_is_cocycle"] and ev["pi_locally_exact_on_annulus"]
    assert "map 4" in " ".join(ev["sequence_without_restriction_rank"]["resolving"])


def test_global_cohomology_strict_range():
    for c in ("1", "-1", "2"):
        with pytest.raises(OutOfRange):
            global_cohomology(c)
    sym = global_cohomology("2", strict=False)
    assert sym.dims == [1, 0, 1] and sym.extra["status"] == "LOOKUP"
    assert global_cohomology("1", strict=False).extra["status"] == "SKIPPED"


def test_global_cohomology_rejects_complex_c():
    with pytest.raises(OutOfRange):
        global_cohomology("1/2+i")


# -- deformations ----------------------------------------------------------------------------


def test_deformation_is_multiple_of_pi():
    out = deformation_check("1/2", "-1/4")
    assert out["equals_multiple_of_pi"]
    assert out["multiple_of_pi"] == "-3/4"
    assert out["nontrivial_in_H2"] and not out["trivial"]


def test_trivial_deformation():
    out = deformation_check("1/3", "1/3")
    assert out["trivial"] and not out["nontrivial_in_H2"]
