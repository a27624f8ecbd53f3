"""Multivector fields and differential forms on a coordinate chart.

Both are stored as maps from sorted index tuples (positions in
``chart.variables``) to :class:`RatFunc` coefficients.  Partial derivatives
are delegated to the chart, so a chart may interpret a coordinate through a
custom derivation (the action-angle chart lets ``theta`` act on
``E = exp(i*theta)``).

The Schouten bracket has two evaluators: :func:`schouten` works term by term
on decomposable multivectors through Lie brackets of vector fields, and
:func:`schouten_bv` derives the bracket from the odd Laplacian
``sum_i d/dx_i d/dzeta_i`` on the Grassmann picture.  They share nothing but
the chart derivatives.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping
from typing import TYPE_CHECKING

from .errors import ChartMismatch, NotPoisson, ZeroDensity
from .polys import Poly, RatFunc

if TYPE_CHECKING:  # pragma: no cover
    from .charts import Chart

__all__ = [
    "CONVENTIONS",
    "DiffForm",
    "Multivector",
    "bivector_matrix",
    "check_modular_contract",
    "d_pi",
    "de_rham_d",
    "hamiltonian_vf",
    "interior",
    "lie_derivative",
    "modular_field",
    "pi_sharp",
    "poisson_bracket",
    "schouten",
    "schouten_bv",
    "vf_apply",
    "wedge",
]

CONVENTIONS = {
    "orientation": "f d/dx^d/dy is stored with coefficient f on the sorted index pair (x, y); "
                   "the chart's variable order is positive",
    "schouten": "[X, f] = X(f) for a vector field X; graded antisymmetry "
                "[a, b] = -(-1)^((p-1)(q-1)) [b, a]",
    "poisson_bracket": "{h, k} = pi(dh, dk)",
    "sharp": "pi#(alpha) = pi(., alpha), i.e. (pi# alpha)^i = sum_j pi^{ij} alpha_j",
    "hamiltonian_vector_field": "X_h = pi#(dh) = [pi, h] = d_pi h, so X_h(k) = {k, h}",
    "modular_vector_field": "L_{X_h} mu = Delta(h) mu; in coordinates "
                            "Delta^j = (1/rho) sum_i d_i(rho pi^{ij}) for mu = rho dx^1...dx^n",
    "interior": "i_{d/dx_k} dx_{j_0}^...^dx_{j_r} = sum_l (-1)^l delta_{k j_l} (drop j_l)",
    "symplectic_form": "for pi = f d/dx^d/dy the inverse form is omega = (1/f) dx^dy",
}


def _rf(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    return RatFunc(Poly.const(x))


def _sort_sign(idx: Iterable[int]) -> tuple[int, tuple]:
    """Sign of the permutation sorting ``idx`` (0 if an index repeats)."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def _accumulate(out: dict, key: tuple, coef: RatFunc) -> None:
    if coef.is_zero():
        return
    cur = out.get(key)
    out[key] = coef if cur is None else cur + coef


class _Graded:
    """Common storage for multivectors and forms."""

    __slots__ = ("chart", "components")
    kind = "graded"

    def __init__(self, chart: Chart, components: Mapping | None = None):
        comps: dict = {}
        for key, coef in (components or {}).items():
            key = tuple(key)
            idx = tuple(chart.index(k) if isinstance(k, str) else int(k) for k in key)
            for i in idx:
                if not 0 <= i < chart.dimension:
                    raise IndexError(f"index {i} outside chart {chart.name}")
            sign, sidx = _sort_sign(idx)
            if sign == 0:
                continue
            c = _rf(coef)
            _accumulate(comps, sidx, c if sign > 0 else -c)
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "components", {k: v for k, v in comps.items() if not v.is_zero()})

    @classmethod
    def _raw(cls, chart, comps: dict):
        obj = object.__new__(cls)
        object.__setattr__(obj, "chart", chart)
        object.__setattr__(obj, "components", {k: v for k, v in comps.items() if not v.is_zero()})
        return obj

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    # -- construction helpers --------------------------------------------------
    @classmethod
    def function(cls, chart, f) -> _Graded:
        return cls._raw(chart, {(): _rf(f)})

    @classmethod
    def basis(cls, chart, *names, coef=1) -> _Graded:
        return cls(chart, {tuple(names): coef})

    @classmethod
    def zero(cls, chart) -> _Graded:
        return cls._raw(chart, {})

    # -- queries ------------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.components

    def degrees(self) -> set:
        return {len(k) for k in self.components}

    @property
    def degree(self) -> int | None:
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError(f"mixed-degree value with degrees {sorted(ds)}")
        return ds.pop()

    def part(self, k: int):
        return type(self)._raw(self.chart, {i: c for i, c in self.components.items() if len(i) == k})

    def homogeneous_parts(self) -> dict:
        return {k: self.part(k) for k in sorted(self.degrees())}

    def coefficient(self, *names) -> RatFunc:
        idx = tuple(self.chart.index(n) if isinstance(n, str) else n for n in names)
        sign, sidx = _sort_sign(idx)
        c = self.components.get(sidx)
        if c is None or sign == 0:
            return RatFunc.zero()
        return c if sign > 0 else -c

    def function_part(self) -> RatFunc:
        return self.components.get((), RatFunc.zero())

    # -- linear structure ---------------------------------------------------------
    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartMismatch(f"{self.chart.name} vs {other.chart.name}")

    def __add__(self, other):
        if not isinstance(other, _Graded):
            return NotImplemented
        self._check(other)
        out = dict(self.components)
        for k, c in other.components.items():
            _accumulate(out, k, c)
        return type(self)._raw(self.chart, out)

    def __neg__(self):
        return type(self)._raw(self.chart, {k: -c for k, c in self.components.items()})

    def __sub__(self, other):
        if not isinstance(other, _Graded):
            return NotImplemented
        return self + (-other)

    def __mul__(self, f):
        if isinstance(f, _Graded):
            return NotImplemented
        f = _rf(f)
        if f.is_zero():
            return type(self)._raw(self.chart, {})
        return type(self)._raw(self.chart, {k: c * f for k, c in self.components.items()})

    __rmul__ = __mul__

    def map_coefficients(self, fn):
        return type(self)._raw(self.chart, {k: _rf(fn(c)) for k, c in self.components.items()})

    def __eq__(self, other):
        if not isinstance(other, _Graded):
            if self.degrees() <= {0}:
                try:
                    return self.function_part() == _rf(other)
                except TypeError:
                    return NotImplemented
            return NotImplemented
        if type(other) is not type(self) or other.chart != self.chart:
            return False
        keys = set(self.components) | set(other.components)
        zero = RatFunc.zero()
        return all(self.components.get(k, zero) == other.components.get(k, zero) for k in keys)

    __hash__ = None

    # -- numeric ---------------------------------------------------------------
    def evaluate(self, point: Mapping[str, object]) -> dict:
        ring = self.chart.ring_point(point)
        return {k: c.evaluate(ring) for k, c in self.components.items()}

    # -- display --------------------------------------------------------------------
    def _basis_name(self, idx: tuple) -> str:
        raise NotImplementedError

    def __str__(self):
        if not self.components:
            return "0"
        parts = []
        for k in sorted(self.components, key=lambda i: (len(i), i)):
            c = self.components[k]
            if not k:
                parts.append(f"({c})")
            else:
                parts.append(f"({c})*{self._basis_name(k)}")
        return " + ".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}[{self.chart.name}]({self})"

    def to_json(self) -> dict:
        degrees: dict = {}
        for k in sorted(self.components, key=lambda i: (len(i), i)):
            names = "^".join(self.chart.variables[i] for i in k) or "1"
            degrees.setdefault(str(len(k)), {})[names] = str(self.components[k])
        return {"kind": self.kind, "chart": self.chart.name, "components": degrees}


class Multivector(_Graded):
    """A (possibly mixed-degree) multivector field; degree-0 parts are functions."""

    __slots__ = ()
    kind = "multivector"

    def _basis_name(self, idx):
        return "^".join(f"d/d{self.chart.variables[i]}" for i in idx)


class DiffForm(_Graded):
    """A (possibly mixed-degree) differential form."""

    __slots__ = ()
    kind = "form"

    def _basis_name(self, idx):
        return "^".join(f"d{self.chart.variables[i]}" for i in idx)


# ---------------------------------------------------------------------------
# exterior algebra


def wedge(a: _Graded, b: _Graded) -> _Graded:
    """Exterior product; graded commutative."""
    a._check(b)
    out: dict = {}
    for ia, ca in a.components.items():
        sa = set(ia)
        for ib, cb in b.components.items():
            if sa.intersection(ib):
                continue
            sign, idx = _sort_sign(ia + ib)
            c = ca * cb
            _accumulate(out, idx, c if sign > 0 else -c)
    return type(a)._raw(a.chart, out)


def _partial(chart, f: RatFunc, k: int) -> RatFunc:
    return chart.partial(f, k)


def vf_apply(X: Multivector, f) -> RatFunc:
    """Directional derivative ``X(f)`` of a function along a vector field."""
    f = _rf(f)
    total = RatFunc.zero()
    for idx, c in X.components.items():
        if len(idx) != 1:
            raise ValueError("vf_apply needs a vector field")
        d = _partial(X.chart, f, idx[0])
        if not d.is_zero():
            total = total + c * d
    return total


# ---------------------------------------------------------------------------
# Schouten bracket, evaluator 1: decomposable terms


def _lie_terms(chart, fa: RatFunc | None, a: int, gb: RatFunc | None, b: int) -> list:
    """[fa d_a, gb d_b] as a list of (coef, index); ``None`` stands for the constant 1."""
    out = []
    if gb is not None and fa is not None:
        out.append((fa * _partial(chart, gb, a), b))
        out.append((-(gb * _partial(chart, fa, b)), a))
    elif gb is not None:
        out.append((_partial(chart, gb, a), b))
    elif fa is not None:
        out.append((-_partial(chart, fa, b), a))
    return out


def _bracket_terms(chart, I: tuple, f: RatFunc, J: tuple, g: RatFunc, out: dict) -> None:
    p, q = len(I), len(J)
    if p == 0 and q == 0:
        return
    if q == 0:
        # [X_0 ^ ... ^ X_{p-1}, g] = sum_k (-1)^(p-1-k) X_k(g) X_0^..^X_k-hat^..
        for k in range(p):
            if k == 0:
                coef = f * _partial(chart, g, I[0])
                rest = I[1:]
            else:
                coef = f * _partial(chart, g, I[k])
                rest = I[:k] + I[k + 1:]
            if coef.is_zero():
                continue
            sign, idx = _sort_sign(rest)
            if sign == 0:
                continue
            if (p - 1 - k) % 2:
                sign = -sign
            _accumulate(out, idx, coef if sign > 0 else -coef)
        return
    if p == 0:
        # [f, B] = (-1)^q [B, f]
        tmp: dict = {}
        _bracket_terms(chart, J, g, I, f, tmp)
        for idx, c in tmp.items():
            _accumulate(out, idx, c if q % 2 == 0 else -c)
        return
    # sum_{k,l} (-1)^(k+l) [X_k, Y_l] ^ X-hat ^ Y-hat; only pairs touching a coefficient survive
    pairs = [(0, l) for l in range(q)] + [(k, 0) for k in range(1, p)]
    for k, l in pairs:
        fa = f if k == 0 else None
        gb = g if l == 0 else None
        restX = list(I[:k] + I[k + 1:])
        restY = list(J[:l] + J[l + 1:])
        # the coefficient f stays attached to the wedge when X_0 is not bracketed
        extra = RatFunc.one()
        if k != 0:
            extra = extra * f
        if l != 0:
            extra = extra * g
        for coef, m in _lie_terms(chart, fa, I[k], gb, J[l]):
            if coef.is_zero():
                continue
            sign, idx = _sort_sign([m] + restX + restY)
            if sign == 0:
                continue
            if (k + l) % 2:
                sign = -sign
            c = coef * extra
            _accumulate(out, idx, c if sign > 0 else -c)


def schouten(a: Multivector, b: Multivector) -> Multivector:
    """Schouten-Nijenhuis bracket ``[a, b]`` (bilinear extension over mixed degrees)."""
    if not isinstance(a, Multivector) or not isinstance(b, Multivector):
        raise TypeError("schouten expects multivectors")
    a._check(b)
    out: dict = {}
    for I, f in a.components.items():
        for J, g in b.components.items():
            _bracket_terms(a.chart, I, f, J, g, out)
    return Multivector._raw(a.chart, out)


# ---------------------------------------------------------------------------
# Schouten bracket, evaluator 2: odd Laplacian on the Grassmann picture


def _odd_laplacian(mv: Multivector) -> Multivector:
    out: dict = {}
    for idx, c in mv.components.items():
        for pos, i in enumerate(idx):
            d = _partial(mv.chart, c, i)
            if d.is_zero():
                continue
            rest = idx[:pos] + idx[pos + 1:]
            _accumulate(out, rest, d if pos % 2 == 0 else -d)
    return Multivector._raw(mv.chart, out)


def schouten_bv(a: Multivector, b: Multivector) -> Multivector:
    """Schouten bracket from the odd Laplacian ``D``.

    For homogeneous ``P`` of degree ``p``:
    ``[P, Q] = (-1)^(p+1) (D(P^Q) - D(P)^Q - (-1)^p P^D(Q))``.
    """
    a._check(b)
    total = Multivector.zero(a.chart)
    for p, P in a.homogeneous_parts().items():
        for Q in b.homogeneous_parts().values():
            t = _odd_laplacian(wedge(P, Q)) - wedge(_odd_laplacian(P), Q)
            t = t - wedge(P, _odd_laplacian(Q)) if p % 2 == 0 else t + wedge(P, _odd_laplacian(Q))
            total = total + (t if p % 2 == 1 else -t)
    return total


# ---------------------------------------------------------------------------
# Poisson calculus


def _bivector_of(pi) -> Multivector:
    return pi.bivector if hasattr(pi, "bivector") else pi


def d_pi(pi, mv: Multivector) -> Multivector:
    """Lichnerowicz differential ``[pi, mv]``.

    ``pi`` is a PoissonStructure (already Jacobi-checked) or a raw bivector,
    which is checked here.
    """
    biv = _bivector_of(pi)
    if biv is pi and not schouten(biv, biv).is_zero():
        raise NotPoisson("[pi, pi] != 0")
    biv._check(mv)
    return schouten(biv, mv)


def bivector_matrix(pi) -> list[list[RatFunc]]:
    """Antisymmetric coefficient matrix ``pi^{ij}``."""
    biv = _bivector_of(pi)
    n = biv.chart.dimension
    zero = RatFunc.zero()
    m = [[zero] * n for _ in range(n)]
    for idx, c in biv.components.items():
        if len(idx) != 2:
            raise ValueError("not a bivector")
        i, j = idx
        m[i][j] = c
        m[j][i] = -c
    return m


def pi_sharp(pi, form: DiffForm) -> Multivector:
    """``pi#(alpha) = pi(., alpha)``."""
    biv = _bivector_of(pi)
    if biv.chart != form.chart:
        raise ChartMismatch(f"{biv.chart.name} vs {form.chart.name}")
    m = bivector_matrix(biv)
    n = biv.chart.dimension
    out: dict = {}
    for idx, a in form.components.items():
        if len(idx) != 1:
            raise ValueError("pi_sharp expects a 1-form")
        j = idx[0]
        for i in range(n):
            if not m[i][j].is_zero():
                _accumulate(out, (i,), m[i][j] * a)
    return Multivector._raw(biv.chart, out)


def hamiltonian_vf(pi, h) -> Multivector:
    """``X_h = pi#(dh)``; agrees with ``d_pi(h)``."""
    biv = _bivector_of(pi)
    return pi_sharp(biv, de_rham_d(DiffForm.function(biv.chart, h)))


def poisson_bracket(pi, h, k) -> RatFunc:
    """``{h, k} = pi(dh, dk)``."""
    biv = _bivector_of(pi)
    chart = biv.chart
    h, k = _rf(h), _rf(k)
    total = RatFunc.zero()
    for (i, j), c in biv.components.items():
        t = _partial(chart, h, i) * _partial(chart, k, j) - _partial(chart, h, j) * _partial(chart, k, i)
        if not t.is_zero():
            total = total + c * t
    return total


def modular_field(pi, volume_density, check: bool = False) -> Multivector:
    """Modular vector field of ``pi`` with respect to ``rho dx^1^...^dx^n``.

    ``Delta^j = (1/rho) sum_i d_i(rho pi^{ij})``.  With ``check=True`` the
    defining identity ``L_{X_h} mu = Delta(h) mu`` is verified on every
    monomial of degree <= 4.
    """
    biv = _bivector_of(pi)
    rho = _rf(volume_density)
    if rho.is_zero():
        raise ZeroDensity("volume density is identically zero")
    chart = biv.chart
    m = bivector_matrix(biv)
    n = chart.dimension
    out: dict = {}
    inv = rho.inverse()
    for j in range(n):
        acc = RatFunc.zero()
        for i in range(n):
            if not m[i][j].is_zero():
                acc = acc + _partial(chart, rho * m[i][j], i)
        if not acc.is_zero():
            out[(j,)] = acc * inv
    delta = Multivector._raw(chart, out)
    if check:
        bad = check_modular_contract(biv, rho, delta)
        if bad is not None:
            raise AssertionError(f"modular contract fails for h = {bad}")
    return delta


def check_modular_contract(pi, volume_density, delta: Multivector, max_degree: int = 4):
    """Return the first monomial violating ``L_{X_h} mu = Delta(h) mu``, else ``None``."""
    biv = _bivector_of(pi)
    chart = biv.chart
    mu = DiffForm(chart, {tuple(range(chart.dimension)): _rf(volume_density)})
    names = chart.ring_vars
    for deg in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(len(names)), deg):
            e = [0] * len(names)
            for k in combo:
                e[k] += 1
            h = RatFunc(Poly({tuple(e): 1}, names))
            lhs = lie_derivative(hamiltonian_vf(biv, h), mu)
            rhs = mu * vf_apply(delta, h)
            if not (lhs - rhs).is_zero():
                return h
    return None


def lie_derivative(X: Multivector, tensor: _Graded) -> _Graded:
    """``L_X`` on multivectors (``[X, A]``) or forms (Cartan's formula)."""
    if isinstance(tensor, Multivector):
        X._check(tensor)
        return schouten(X, tensor)
    if X.chart != tensor.chart:
        raise ChartMismatch(f"{X.chart.name} vs {tensor.chart.name}")
    return de_rham_d(interior(X, tensor)) + interior(X, de_rham_d(tensor))


def de_rham_d(form: DiffForm) -> DiffForm:
    if not isinstance(form, DiffForm):
        raise TypeError("de_rham_d expects a DiffForm")
    chart = form.chart
    out: dict = {}
    for idx, c in form.components.items():
        for i in range(chart.dimension):
            if i in idx:
                continue
            d = _partial(chart, c, i)
            if d.is_zero():
                continue
            sign, sidx = _sort_sign((i,) + idx)
            _accumulate(out, sidx, d if sign > 0 else -d)
    return DiffForm._raw(chart, out)


def interior(X: Multivector, form: DiffForm) -> DiffForm:
    """Contraction of a vector field into a form."""
    if X.chart != form.chart:
        raise ChartMismatch(f"{X.chart.name} vs {form.chart.name}")
    out: dict = {}
    for xi, xc in X.components.items():
        if len(xi) != 1:
            raise ValueError("interior expects a vector field")
        k = xi[0]
        for idx, c in form.components.items():
            if k not in idx:
                continue
            pos = idx.index(k)
            rest = idx[:pos] + idx[pos + 1:]
            v = xc * c
            _accumulate(out, rest, v if pos % 2 == 0 else -v)
    return DiffForm._raw(X.chart, out)
