"""Constructors for the SU(2)-covariant Poisson structures and their invariants.

Complex formulas are entered in Wirtinger frames and converted once to real
frames through ``d/dw = (d/dx - i d/dy)/2``; everything downstream is real
multivector calculus over Q(i) coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .calculus import (
    CONVENTIONS,
    Multivector,
    modular_field,
    poisson_bracket,
    schouten,
    wedge,
)
from .charts import Chart, atlas_map, get_chart
from .errors import (
    ChartMismatch,
    DegenerateFamily,
    NotPoisson,
    OutOfRange,
    UnknownChart,
)
from .polys import Poly, RatFunc
from .scalars import I as IMAG
from .scalars import Scalar, as_scalar

__all__ = [
    "FAMILY_CHARTS",
    "NecklaceGeometry",
    "PoissonStructure",
    "area_closed_form",
    "casimir_check",
    "euler_field",
    "linear_structure_sign",
    "make_pi_bruhat",
    "make_pi_family",
    "make_pi_standard",
    "make_pi_symplectic_model",
    "make_su2_bivector_r4",
    "modular_field_of_omega",
    "necklace_geometry",
    "necklace_radius",
    "omega_density",
    "sphere_height",
    "symplectic_area",
    "wirtinger_frame",
]

FAMILY_CHARTS = ("w", "z", "xy", "st", "action_angle")


@dataclass(frozen=True, eq=False)
class PoissonStructure:
    """A bivector whose Schouten square has been checked to vanish."""

    bivector: Multivector
    label: str = ""
    family_param_c: Scalar | None = None
    conventions: dict = field(default_factory=lambda: dict(CONVENTIONS))
    verify: bool = True

    def __post_init__(self):
        if self.bivector.degrees() - {2}:
            raise NotPoisson(f"{self.label or 'structure'} is not a pure bivector")
        if self.verify and not schouten(self.bivector, self.bivector).is_zero():
            raise NotPoisson(f"[pi, pi] != 0 for {self.label or 'structure'}")

    @property
    def chart(self) -> Chart:
        return self.bivector.chart

    def coefficient(self, a=0, b=1) -> RatFunc:
        return self.bivector.coefficient(a, b)

    def jacobiator(self) -> Multivector:
        return schouten(self.bivector, self.bivector)

    def bracket(self, f, g) -> RatFunc:
        return poisson_bracket(self.bivector, f, g)

    def __sub__(self, other: PoissonStructure) -> Multivector:
        return self.bivector - other.bivector

    def to_json(self) -> dict:
        out = {"label": self.label, "bivector": self.bivector.to_json()}
        if self.family_param_c is not None:
            out["c"] = str(self.family_param_c)
        return out


def _rf(text: str, chart: Chart) -> RatFunc:
    return RatFunc.parse(text, chart.ring_vars)


def _c(c) -> Scalar:
    return as_scalar(c)


# ---------------------------------------------------------------------------
# Wirtinger frames


def wirtinger_frame(chart: Chart, re_name: str, im_name: str) -> tuple[Multivector, Multivector]:
    """``(d/dw, d/dwbar)`` as real vector fields for ``w = re + i*im``."""
    half = Scalar(Fraction(1, 2))
    dw = Multivector(chart, {(re_name,): half, (im_name,): -half * IMAG})
    dwbar = Multivector(chart, {(re_name,): half, (im_name,): half * IMAG})
    return dw, dwbar


def _complex_coordinate(chart: Chart, re_name: str, im_name: str) -> tuple[RatFunc, RatFunc]:
    re = RatFunc(Poly.var(re_name, chart.variables))
    im = RatFunc(Poly.var(im_name, chart.variables))
    return re + im * IMAG, re - im * IMAG


def _real_bivector_from_wirtinger(chart: Chart, coef: RatFunc, re_name: str, im_name: str) -> Multivector:
    dw, dwbar = wirtinger_frame(chart, re_name, im_name)
    return wedge(dw, dwbar) * coef


# ---------------------------------------------------------------------------
# SU(2)


def make_su2_bivector_r4() -> PoissonStructure:
    """The coordinate Poisson bivector on C^2 = R^4 with u = a+ib, v = p+iq.

    ``-i v vbar du^dubar + 1/2 (i u v du^dv + conj) + 1/2 (i u vbar du^dvbar + conj)``.
    """
    r4 = get_chart("r4")
    du, dub = wirtinger_frame(r4, "a", "b")
    dv, dvb = wirtinger_frame(r4, "p", "q")
    u, ub = _complex_coordinate(r4, "a", "b")
    v, vb = _complex_coordinate(r4, "p", "q")
    half_i = Scalar(0, Fraction(1, 2))
    t1 = wedge(du, dub) * (-(v * vb) * IMAG)
    t2 = wedge(du, dv) * (u * v * half_i)
    t2c = wedge(dub, dvb) * (ub * vb * half_i.conjugate())
    t3 = wedge(du, dvb) * (u * vb * half_i)
    t3c = wedge(dub, dv) * (ub * v * half_i.conjugate())
    biv = t1 + t2 + t2c + t3 + t3c
    return PoissonStructure(biv, label="pi_SU2 on R^4")


def su2_complex_coordinates() -> dict:
    r4 = get_chart("r4")
    u, ub = _complex_coordinate(r4, "a", "b")
    v, vb = _complex_coordinate(r4, "p", "q")
    return {"u": u, "ubar": ub, "v": v, "vbar": vb}


def casimir_check(pi: PoissonStructure, f) -> bool:
    """True iff ``[pi, f] = 0`` exactly."""
    if isinstance(f, Multivector):
        if f.chart != pi.chart:
            raise ChartMismatch(f"{f.chart.name} vs {pi.chart.name}")
        g = f
    else:
        if not isinstance(f, RatFunc):
            f = RatFunc.parse(f, pi.chart.ring_vars) if isinstance(f, str) else RatFunc(Poly.const(f))
        g = Multivector.function(pi.chart, f)
    return schouten(pi.bivector, g).is_zero()


# ---------------------------------------------------------------------------
# the covariant family on S^2


def _standard_coef(chart: Chart) -> RatFunc:
    name = chart.name
    if name == "xy":
        return _rf("1/4*(1+x^2+y^2)^2", chart)
    if name == "z":
        return _rf("1/4*(1+X^2+Y^2)^2", chart)
    if name == "st":
        return _rf("1/4", chart)
    if name == "action_angle":
        # normalized radius 1: d/ds^d/dt = 2 d/dI^d/dtheta
        return _rf("1/2", chart)
    raise UnknownChart(name)


def make_pi_standard(chart_id: str = "xy") -> PoissonStructure:
    """The SU(2)-invariant symplectic structure (the restriction of the linear one)."""
    chart = get_chart(chart_id)
    if chart.name in ("xy", "z"):
        re, im = chart.variables
        w, wb = _complex_coordinate(chart, re, im)
        coef = (RatFunc.one() + w * wb) ** 2 * Scalar(0, Fraction(-1, 2))
        biv = _real_bivector_from_wirtinger(chart, coef, re, im)
    else:
        biv = Multivector(chart, {tuple(chart.variables): _standard_coef(chart)})
    return PoissonStructure(biv, label=f"pi on {chart.name}")


def make_pi_bruhat(chart_id: str = "xy") -> PoissonStructure:
    """The Bruhat structure ``pi_1`` in the ``w`` or ``z`` chart."""
    chart = get_chart(chart_id)
    if chart.name not in ("xy", "z"):
        raise UnknownChart(f"Bruhat structure is provided on the w and z charts, not {chart.name}")
    re, im = chart.variables
    w, wb = _complex_coordinate(chart, re, im)
    if chart.name == "xy":
        coef = -(w * wb) * (RatFunc.one() + w * wb) * IMAG
    else:
        coef = -(RatFunc.one() + w * wb) * IMAG
    return PoissonStructure(_real_bivector_from_wirtinger(chart, coef, re, im), label=f"pi_1 on {chart.name}",
                            family_param_c=Scalar(1))


def make_pi_family(chart_id: str, c) -> PoissonStructure:
    """``pi_c = pi_1 + (c-1) pi`` presented on one chart.

    ``w``/``xy``: from ``-(i/2)(1+w wbar)((c+1) w wbar + c-1) d/dw^d/dwbar``;
    ``z``: from the Bruhat and standard formulas in the z chart;
    ``st``: ``1/2 (s^2+t^2-(1-c)/2) d/ds^d/dt``;
    ``action_angle``: ``I d/dI^d/dtheta`` (the same for every ``c``).
    """
    if chart_id not in FAMILY_CHARTS:
        raise UnknownChart(chart_id)
    c = _c(c)
    chart = get_chart(chart_id)
    if chart.name == "xy":
        w, wb = _complex_coordinate(chart, "x", "y")
        r = w * wb
        coef = (RatFunc.one() + r) * (r * (c + 1) + (c - 1)) * Scalar(0, Fraction(-1, 2))
        biv = _real_bivector_from_wirtinger(chart, coef, "x", "y")
    elif chart.name == "z":
        biv = make_pi_bruhat("z").bivector + make_pi_standard("z").bivector * (c - 1)
    elif chart.name == "st":
        R2 = (1 - c) / 2
        coef = (_rf("s^2+t^2", chart) - R2) * Scalar(Fraction(1, 2))
        biv = Multivector(chart, {("s", "t"): coef})
    else:
        biv = Multivector(chart, {("I", "theta"): _rf("I", chart)})
    return PoissonStructure(biv, label=f"pi_c on {chart.name}", family_param_c=c)


def make_pi_symplectic_model(chart_id: str, density: RatFunc) -> PoissonStructure:
    chart = get_chart(chart_id)
    return PoissonStructure(Multivector(chart, {tuple(chart.variables): density}), label="model")


def euler_field(c) -> Multivector:
    """``E = (s d/ds + t d/dt) / (2(c-1))`` on the disk chart."""
    c = _c(c)
    if c == 1:
        raise OutOfRange("E is undefined at c = 1")
    st = get_chart("st")
    k = (2 * (c - 1)).inverse()
    return Multivector(st, {("s",): _rf("s", st) * k, ("t",): _rf("t", st) * k})


def sphere_height(chart_id: str = "xy") -> RatFunc:
    """``x3`` as a function on the ``xy`` or ``z`` chart."""
    name = {"xy": "xy->sphere", "w": "xy->sphere", "z": "z->sphere"}.get(chart_id)
    if name is None:
        raise UnknownChart(chart_id)
    return atlas_map(name).components[2]


def linear_structure_sign(chart_id: str = "z") -> int:
    """Sign ``e`` with ``pi = e (x1 d2^d3 + x2 d3^d1 + x3 d1^d2)`` along the sphere.

    ``pi`` on the chart is pushed through the embedding and compared, after
    substituting the parametrization, with the linear bivector on R^3.
    """
    from .charts import push_along

    emb = atlas_map({"xy": "xy->sphere", "w": "xy->sphere", "z": "z->sphere"}[chart_id])
    pushed = push_along(make_pi_standard(chart_id).bivector, emb)
    x = emb.components
    linear = {(1, 2): x[0], (0, 2): -x[1], (0, 1): x[2]}
    for sign in (1, -1):
        keys = set(pushed) | set(linear)
        if all(pushed.get(k, RatFunc.zero()) == linear.get(k, RatFunc.zero()) * sign for k in keys):
            return sign
    return 0


def omega_density(chart_id: str = "xy") -> RatFunc:
    """Density of the invariant area form ``omega`` (inverse of ``pi``)."""
    return make_pi_standard(chart_id).coefficient().inverse()


def modular_field_of_omega(c, chart_id: str = "xy", check: bool = True) -> Multivector:
    pi_c = make_pi_family(chart_id, c)
    return modular_field(pi_c, omega_density(chart_id), check=check)


# ---------------------------------------------------------------------------
# necklace geometry


HALF = Scalar(Fraction(1, 2))


@dataclass(frozen=True)
class NecklaceGeometry:
    c: Scalar
    radius_squared: Scalar
    radius: float
    delta: Scalar = HALF

    def to_json(self) -> dict:
        return {"c": str(self.c), "radius_squared": str(self.radius_squared), "radius": self.radius,
                "delta": str(self.delta)}


def necklace_radius(c) -> tuple[Scalar, float]:
    """``R^2 = (1-c)/2`` (exact) and ``R``; the zero locus of the disk-chart coefficient is checked."""
    c = _c(c)
    if not c.is_real() or not (-1 <= c.re < 1):
        raise OutOfRange(f"necklace radius needs -1 <= c < 1, got {c.pretty()}")
    R2 = (1 - c) / 2
    st = get_chart("st")
    coef = make_pi_family("st", c).coefficient()
    if coef != (_rf("s^2+t^2", st) - R2) * Scalar(Fraction(1, 2)):
        raise AssertionError("zero locus of the disk coefficient is not s^2+t^2 = R^2")
    return R2, math.sqrt(float(R2.re))


def necklace_geometry(c, delta=Fraction(1, 2)) -> NecklaceGeometry:
    c = _c(c)
    if not c.is_real() or abs(c.re) >= 1:
        raise OutOfRange(f"necklace geometry needs |c| < 1, got {c.pretty()}")
    R2, R = necklace_radius(c)
    return NecklaceGeometry(c, R2, R, as_scalar(delta))


# ---------------------------------------------------------------------------
# symplectic area


def area_closed_form(c) -> float:
    c = _c(c)
    cf = float(c.re)
    return 2 * math.pi * math.log((cf + 1) / (cf - 1))


@lru_cache(maxsize=8)
def _legendre(n: int):
    return roots_legendre(n)


def symplectic_area(c, quad_points: int = 4096, angular_points: int = 16) -> float:
    """Signed Liouville area of ``pi_c`` for ``|c| > 1``.

    The disk chart is swept in ``(rho = s^2+t^2, phi)``: Gauss-Legendre in
    ``rho`` on ``[0, 1]`` and the trapezoid rule in ``phi``; the integrand is
    ``1 / coefficient`` of the disk-chart bivector, evaluated from the exact
    structure, times the Jacobian ``1/2``.
    """
    c = _c(c)
    if not c.is_real() or abs(c.re) <= 1:
        raise DegenerateFamily(f"|c| <= 1 (c = {c.pretty()}): the open symplectic leaves have infinite area")
    if quad_points < 64:
        raise OutOfRange("quad_points must be at least 64")
    coef = make_pi_family("st", c).coefficient()
    nodes, weights = _legendre(quad_points)
    rho = 0.5 * (nodes + 1.0)
    w_rho = 0.5 * weights
    phi = np.arange(angular_points) * (2 * math.pi / angular_points)
    R, PHI = np.meshgrid(np.sqrt(rho), phi, indexing="ij")
    vals = np.asarray(coef.evaluate({"s": R * np.cos(PHI), "t": R * np.sin(PHI)}), dtype=float)
    inner = (1.0 / vals).mean(axis=1) * (2 * math.pi)
    return float(np.sum(w_rho * 0.5 * inner))
