"""Coordinate charts, transition maps and transport of multivectors.

The atlas covers the charts the necklace computation needs:

``r4``            real coordinates (a, b, p, q) of C^2, u = a+ib, v = p+iq
``xy``            real coordinates of the affine chart w = x+iy of CP^1
``z``             real coordinates (X, Y) of z = 1/w
``sphere``        the embedding coordinates (x1, x2, x3) of S^2 in R^3
``st``            the disk model s = x/sqrt(1+x^2+y^2), t = y/sqrt(1+x^2+y^2)
``action_angle``  (I, theta) near the necklace; functions of theta are carried
                  by the auxiliary ring variable E = exp(i*theta)

Rational transitions transport multivectors exactly.  The two algebraic ones
(``xy -> st`` and ``st -> action_angle``) only feed the numeric validator.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateJacobian,
    NotInvertible,
    SamplePointOutsideDomain,
    UnknownChart,
    WrongChart,
)
from .polys import Poly, RatFunc
from .scalars import I as IMAG
from .scalars import Scalar, as_scalar

__all__ = [
    "CHARTS",
    "DEFAULT_DELTA",
    "DEFAULT_SEED",
    "Chart",
    "ChartMap",
    "atlas_json",
    "atlas_map",
    "get_chart",
    "push_along",
    "pushforward_rational",
    "rational_map",
    "scaling_map",
    "st_to_action_angle_map",
    "stereographic_atlas",
    "validate_pushforward_numeric",
    "xy_to_st_map",
]

DEFAULT_SEED = 42
DEFAULT_DELTA = Fraction(1, 2)


def _default_sampler(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.uniform(-2.0, 2.0, size=dim)


@dataclass(frozen=True, eq=False)
class Chart:
    name: str
    variables: tuple
    domain_note: str = ""
    ring_vars: tuple | None = None
    derivations: tuple | None = None
    to_ring: Callable | None = None
    sampler: Callable | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in chart {self.name}")
        if self.ring_vars is None:
            object.__setattr__(self, "ring_vars", self.variables)

    @property
    def dimension(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise WrongChart(f"{name!r} is not a coordinate of chart {self.name}") from None

    def partial(self, f: RatFunc, k: int) -> RatFunc:
        if self.derivations is not None:
            return self.derivations[k](f)
        return f.derivative(self.variables[k])

    def coordinate(self, name: str) -> RatFunc:
        return RatFunc(Poly.var(name, self.ring_vars if name in self.ring_vars else (name,)))

    def ring_point(self, point: Mapping[str, object]) -> dict:
        if self.to_ring is not None:
            return self.to_ring(point)
        return dict(point)

    def sample(self, rng: np.random.Generator) -> dict:
        vals = (self.sampler or _default_sampler)(rng, self.dimension)
        return dict(zip(self.variables, vals))

    def __eq__(self, other):
        return isinstance(other, Chart) and (self.name, self.variables) == (other.name, other.variables)

    def __hash__(self):
        return hash((self.name, self.variables))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "variables": list(self.variables),
            "dimension": self.dimension,
            "domain_note": self.domain_note,
        }


def _aa_theta(f: RatFunc) -> RatFunc:
    # d/dtheta acts on E = exp(i theta) as i*E*d/dE
    d = f.derivative("E")
    if d.is_zero():
        return d
    return d * RatFunc(Poly({(0, 1): IMAG}, ("I", "E")))


def _aa_I(f: RatFunc) -> RatFunc:
    return f.derivative("I")


def _aa_ring(point):
    return {"I": point["I"], "E": np.exp(1j * np.asarray(point["theta"]))}


def _annulus_sampler(r2: float, delta: float, outer: float | None = None):
    lo = r2 * (1 - delta)
    hi = r2 * (1 + delta) if outer is None else outer

    def sample(rng, dim):
        rho = rng.uniform(lo + 1e-3 * (hi - lo), hi - 1e-3 * (hi - lo))
        phi = rng.uniform(0.0, 2 * math.pi)
        return np.array([math.sqrt(rho) * math.cos(phi), math.sqrt(rho) * math.sin(phi)])

    return sample


def _aa_sampler(rng, dim):
    d = float(DEFAULT_DELTA)
    I = rng.uniform(-d * 0.95, d * 0.95)
    if abs(I) < 1e-3:
        I = 1e-3
    return np.array([I, rng.uniform(0.0, 2 * math.pi)])


CHARTS: dict[str, Chart] = {
    "r4": Chart("r4", ("a", "b", "p", "q"), "C^2 with u = a+ib, v = p+iq"),
    "xy": Chart("xy", ("x", "y"), "affine chart w = x+iy of CP^1 around the base point w = 0"),
    "z": Chart("z", ("X", "Y"), "affine chart z = 1/w = X+iY (the open Bruhat cell), z != infinity"),
    "sphere": Chart("sphere", ("x1", "x2", "x3"), "R^3 restricted to the unit sphere"),
    "st": Chart(
        "st", ("s", "t"), "open unit disk s^2+t^2 < 1",
        sampler=lambda rng, dim: _annulus_sampler(0.5, 0.9)(rng, dim),
    ),
    "action_angle": Chart(
        "action_angle", ("I", "theta"), "annulus |I| < delta, theta periodic; E = exp(i*theta)",
        ring_vars=("I", "E"), derivations=(_aa_I, _aa_theta), to_ring=_aa_ring, sampler=_aa_sampler,
    ),
}
CHARTS["w"] = CHARTS["xy"]


def get_chart(name: str) -> Chart:
    try:
        return CHARTS[name]
    except KeyError:
        raise UnknownChart(name) from None


# ---------------------------------------------------------------------------
# chart maps


@dataclass(frozen=True, eq=False)
class ChartMap:
    source: Chart
    target: Chart
    components: tuple | None
    kind: str = "rational_exact"
    inverse: ChartMap | None = None
    numeric_sampler: Callable | None = None
    numeric_jacobian: Callable | None = None
    domain_sampler: Callable | None = None
    name: str = ""
    formulas: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("rational_exact", "algebraic_numeric"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind == "rational_exact":
            comps = tuple(c if isinstance(c, RatFunc) else RatFunc(c) for c in self.components)
            if len(comps) != self.target.dimension:
                raise ValueError("one component per target variable required")
            object.__setattr__(self, "components", comps)

    def with_inverse(self, inv: ChartMap) -> ChartMap:
        object.__setattr__(self, "inverse", inv)
        if inv.inverse is None:
            object.__setattr__(inv, "inverse", self)
        return self

    def substitution(self) -> dict:
        return dict(zip(self.target.variables, self.components))

    def jacobian(self) -> list[list[RatFunc]]:
        """Exact Jacobian d(target_i)/d(source_j)."""
        if self.kind != "rational_exact":
            raise NotInvertible("exact Jacobian only for rational maps")
        return [[c.derivative(v) for v in self.source.variables] for c in self.components]

    def compose(self, first: ChartMap) -> ChartMap:
        """``self o first``."""
        if first.target != self.source:
            raise WrongChart(f"cannot compose {self.source.name} after {first.target.name}")
        sub = dict(zip(self.source.variables, first.components))
        comps = tuple(c.subs(sub) for c in self.components)
        return ChartMap(first.source, self.target, comps, name=f"{self.name}o{first.name}")

    def __call__(self, point: Mapping[str, object]) -> dict:
        if self.numeric_sampler is not None:
            return self.numeric_sampler(point)
        return {v: c.evaluate(point) for v, c in zip(self.target.variables, self.components)}

    def numeric_jacobian_at(self, point: Mapping[str, object]) -> np.ndarray:
        if self.numeric_jacobian is not None:
            return np.asarray(self.numeric_jacobian(point), dtype=complex)
        if self.kind == "rational_exact":
            J = self.jacobian()
            return np.array([[complex(_num(e.evaluate(point))) for e in row] for row in J])
        # central differences as a last resort
        h = 1e-6
        cols = []
        for v in self.source.variables:
            plus = dict(point)
            minus = dict(point)
            plus[v] = point[v] + h
            minus[v] = point[v] - h
            fp, fm = self(plus), self(minus)
            cols.append([(fp[t] - fm[t]) / (2 * h) for t in self.target.variables])
        return np.array(cols, dtype=complex).T

    def to_json(self) -> dict:
        if self.kind == "rational_exact":
            comps = [str(c) for c in self.components]
        else:
            comps = list(self.formulas)
        return {
            "name": self.name,
            "source": self.source.name,
            "target": self.target.name,
            "kind": self.kind,
            "components": dict(zip(self.target.variables, comps)),
            "has_inverse": self.inverse is not None,
        }


def _num(x):
    return x.to_number() if isinstance(x, Scalar) else x


def rational_map(source: Chart, target: Chart, formulas: Sequence[str], name: str = "") -> ChartMap:
    comps = tuple(RatFunc.parse(f, source.variables) for f in formulas)
    return ChartMap(source, target, comps, name=name or f"{source.name}->{target.name}")


# ---------------------------------------------------------------------------
# transport


def pushforward_rational(mv, cmap: ChartMap):
    """Exact pushforward of a multivector along an invertible rational map."""
    from .calculus import Multivector

    if cmap.kind != "rational_exact":
        raise NotInvertible(f"{cmap.name} is not a rational map")
    if cmap.inverse is None or cmap.inverse.kind != "rational_exact":
        raise NotInvertible(f"{cmap.name} has no registered rational inverse")
    if not isinstance(mv, Multivector):
        raise TypeError("pushforward_rational expects a Multivector")
    if mv.chart != cmap.source:
        raise WrongChart(f"multivector on {mv.chart.name}, map from {cmap.source.name}")
    if cmap.source.dimension != cmap.target.dimension:
        raise NotInvertible("source and target dimensions differ")
    back = dict(zip(cmap.source.variables, cmap.inverse.components))
    # J(F) o F^{-1} = J(F^{-1})^{-1}, which avoids substituting into the Jacobian
    J = _inverse_matrix(cmap.inverse.jacobian())
    n = cmap.target.dimension
    out: dict = {}
    for idx, c in mv.components.items():
        c = c.subs(back)
        k = len(idx)
        for tgt in _subsets(n, k):
            minor = _det([[J[r][s] for s in idx] for r in tgt])
            if minor.is_zero():
                continue
            v = c * minor
            cur = out.get(tgt)
            out[tgt] = v if cur is None else cur + v
    return Multivector._raw(cmap.target, out)


def push_along(mv, cmap: ChartMap) -> dict:
    """Components of ``Lambda^k J . mv`` as functions on the *source* chart.

    Works for maps without inverse (embeddings); keys are target index tuples.
    """
    J = cmap.jacobian()
    out: dict = {}
    for idx, c in mv.components.items():
        for tgt in _subsets(cmap.target.dimension, len(idx)):
            minor = _det([[J[r][s] for s in idx] for r in tgt])
            if minor.is_zero():
                continue
            v = c * minor
            cur = out.get(tgt)
            out[tgt] = v if cur is None else cur + v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _subsets(n: int, k: int):
    from itertools import combinations

    return combinations(range(n), k)


def _det(m: list) -> RatFunc:
    n = len(m)
    if n == 0:
        return RatFunc.one()
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = RatFunc.zero()
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        t = m[0][j] * _det(minor)
        total = total + t if j % 2 == 0 else total - t
    return total


def _inverse_matrix(m: list) -> list[list[RatFunc]]:
    n = len(m)
    det = _det(m)
    if det.is_zero():
        raise NotInvertible("Jacobian of the inverse map is singular")
    inv_det = det.inverse()
    out = [[RatFunc.zero()] * n for _ in range(n)]
    for r in range(n):
        for s in range(n):
            minor = [row[:r] + row[r + 1:] for k, row in enumerate(m) if k != s]
            cof = _det(minor) * inv_det
            out[r][s] = cof if (r + s) % 2 == 0 else -cof
    return out


def _coefficient_matrix(values: dict, degree: int, n: int) -> np.ndarray:
    if degree == 1:
        v = np.zeros(n, dtype=complex)
        for (i,), c in values.items():
            v[i] = _num(c)
        return v
    A = np.zeros((n, n), dtype=complex)
    for (i, j), c in values.items():
        A[i, j] = _num(c)
        A[j, i] = -_num(c)
    return A


def validate_pushforward_numeric(mv_src, mv_tgt, cmap: ChartMap, samples: int = 50, tol: float = 1e-8,
                                 seed: int = DEFAULT_SEED, max_resample: int = 1000) -> bool:
    """Compare two presentations of a vector field or bivector at random points.

    Checks ``J A_src J^T == A_tgt(map(p))`` (``J v`` for vector fields) entrywise.
    """
    if mv_src.chart != cmap.source or mv_tgt.chart != cmap.target:
        raise WrongChart("multivectors do not live on the map's charts")
    deg_src, deg_tgt = mv_src.degree, mv_tgt.degree
    degree = deg_src if deg_src is not None else deg_tgt
    if degree is None:
        return True
    if degree not in (1, 2) or (deg_tgt is not None and deg_tgt != degree):
        raise ValueError("numeric validation handles vector fields and bivectors only")
    rng = np.random.default_rng(seed)
    sampler = cmap.domain_sampler or cmap.source.sampler or _default_sampler
    n_src, n_tgt = cmap.source.dimension, cmap.target.dimension
    done = tries = 0
    while done < samples:
        tries += 1
        if tries > max_resample + samples:
            raise SamplePointOutsideDomain("could not draw enough admissible sample points")
        p = dict(zip(cmap.source.variables, sampler(rng, n_src)))
        try:
            J = cmap.numeric_jacobian_at(p)
            q = cmap(p)
            src = _coefficient_matrix(mv_src.evaluate(p), degree, n_src)
            tgt = _coefficient_matrix(mv_tgt.evaluate(q), degree, n_tgt)
        except (ZeroDivisionError, ValueError):
            continue
        if n_src == n_tgt and abs(np.linalg.det(J)) < 1e-12:
            raise DegenerateJacobian(f"Jacobian degenerate at {p}")
        pushed = J @ src if degree == 1 else J @ src @ J.T
        if not np.all(np.abs(pushed - tgt) <= tol):
            return False
        done += 1
    return True


# ---------------------------------------------------------------------------
# the atlas


def xy_to_st_map() -> ChartMap:
    """``s = x/sqrt(1+x^2+y^2)``, ``t = y/sqrt(1+x^2+y^2)``."""
    def f(p):
        x, y = p["x"], p["y"]
        r = math.sqrt(1 + x * x + y * y)
        return {"s": x / r, "t": y / r}

    def jac(p):
        x, y = p["x"], p["y"]
        q = 1 + x * x + y * y
        k = q ** -1.5
        return [[(1 + y * y) * k, -x * y * k], [-x * y * k, (1 + x * x) * k]]

    return ChartMap(CHARTS["xy"], CHARTS["st"], None, kind="algebraic_numeric", numeric_sampler=f,
                    numeric_jacobian=jac, name="xy->st",
                    formulas=("x/sqrt(1+x^2+y^2)", "y/sqrt(1+x^2+y^2)"))


def st_to_action_angle_map(c=-1, delta=DEFAULT_DELTA) -> ChartMap:
    """Action-angle coordinates around the necklace of radius ``R = sqrt((1-c)/2)``.

    ``s = R sqrt(1+I) cos(theta)``, ``t = R sqrt(1+I) sin(theta)``; at ``c = -1``
    (``R = 1``) this is the normalized model.
    """
    c = as_scalar(c)
    r2 = float((1 - c).re / 2)
    if r2 <= 0:
        raise ValueError("action-angle coordinates need |c| < 1 (or the normalized c = -1)")

    def f(p):
        s, t = p["s"], p["t"]
        return {"I": (s * s + t * t) / r2 - 1.0, "theta": math.atan2(t, s)}

    def jac(p):
        s, t = p["s"], p["t"]
        rho = s * s + t * t
        return [[2 * s / r2, 2 * t / r2], [-t / rho, s / rho]]

    d = float(as_scalar(delta).re)
    outer = min(r2 * (1 + d), 1.0 - 1e-6) if c != -1 else None
    return ChartMap(CHARTS["st"], CHARTS["action_angle"], None, kind="algebraic_numeric", numeric_sampler=f,
                    numeric_jacobian=jac, domain_sampler=_annulus_sampler(r2, d, outer), name="st->action_angle",
                    formulas=(f"(s^2+t^2)/({(1 - c) / 2}) - 1", "atan2(t, s)"))


def scaling_map(alpha) -> ChartMap:
    """``s = alpha s'``, ``t = alpha t'`` as a self-map of the disk chart."""
    alpha = as_scalar(alpha)
    st = CHARTS["st"]
    fwd = ChartMap(st, st, (RatFunc.parse("s", ("s", "t")) * alpha.inverse(),
                            RatFunc.parse("t", ("s", "t")) * alpha.inverse()), name=f"scale[{alpha.pretty()}]")
    inv = ChartMap(st, st, (RatFunc.parse("s", ("s", "t")) * alpha,
                            RatFunc.parse("t", ("s", "t")) * alpha), name=f"scale[{alpha.inverse().pretty()}]")
    return fwd.with_inverse(inv)


def _w_to_z() -> ChartMap:
    # z = 1/w in real coordinates: X = x/(x^2+y^2), Y = -y/(x^2+y^2)
    fwd = rational_map(CHARTS["xy"], CHARTS["z"], ["x/(x^2+y^2)", "-y/(x^2+y^2)"], name="w->z")
    inv = rational_map(CHARTS["z"], CHARTS["xy"], ["X/(X^2+Y^2)", "-Y/(X^2+Y^2)"], name="z->w")
    return fwd.with_inverse(inv)


def _z_to_sphere() -> ChartMap:
    fwd = rational_map(CHARTS["z"], CHARTS["sphere"],
                       ["2*X/(1+X^2+Y^2)", "2*Y/(1+X^2+Y^2)", "(X^2+Y^2-1)/(1+X^2+Y^2)"], name="z->sphere")
    inv = ChartMap(CHARTS["sphere"], CHARTS["z"],
                   tuple(RatFunc.parse(f, ("x1", "x2", "x3")) for f in ["x1/(1-x3)", "x2/(1-x3)"]),
                   name="sphere->z")
    object.__setattr__(fwd, "inverse", inv)
    return fwd


def _build_atlas() -> dict:
    w2z = _w_to_z()
    z2s = _z_to_sphere()
    xy2s = z2s.compose(w2z)
    object.__setattr__(xy2s, "name", "xy->sphere")
    s2xy = ChartMap(CHARTS["sphere"], CHARTS["xy"],
                    tuple(RatFunc.parse(f, ("x1", "x2", "x3")) for f in ["x1/(1+x3)", "-x2/(1+x3)"]),
                    name="sphere->xy")
    object.__setattr__(xy2s, "inverse", s2xy)
    return {
        "w->z": w2z,
        "z->w": w2z.inverse,
        "z->sphere": z2s,
        "sphere->z": z2s.inverse,
        "xy->sphere": xy2s,
        "sphere->xy": s2xy,
        "xy->st": xy_to_st_map(),
        "st->action_angle": st_to_action_angle_map(),
    }


_ATLAS = _build_atlas()


def stereographic_atlas() -> list[ChartMap]:
    """The registered transition maps (read-only after import)."""
    return list(_ATLAS.values())


def atlas_map(name: str) -> ChartMap:
    try:
        return _ATLAS[name]
    except KeyError:
        raise UnknownChart(name) from None


def atlas_json() -> dict:
    charts = {k: v.to_json() for k, v in CHARTS.items() if k != "w"}
    return {"charts": charts, "maps": [m.to_json() for m in stereographic_atlas()]}
