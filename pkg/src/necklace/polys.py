"""Multivariate polynomials and rational functions over Q(i).

Polynomials are sparse maps from exponent vectors to :class:`Scalar`
coefficients, tagged with an ordered tuple of variable names.  Operands with
different variable tuples are merged on the fly, so ``x + y`` just works.

The gcd is the classical recursive one: pick a main variable, split off the
content (a gcd of coefficients in the remaining variables) and run a
primitive pseudo-remainder sequence on the primitive parts.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from fractions import Fraction

from .errors import BothZero, NotExactDivision, ParseError, ZeroDenominator
from .scalars import ONE, ZERO, Scalar, as_scalar

__all__ = ["Poly", "RatFunc", "parse_expr", "poly_arith", "poly_gcd", "ratfunc_simplify"]

Exps = tuple


def _grlex_key(e: Exps):
    return (sum(e), e)


def _merge_vars(a: tuple, b: tuple) -> tuple:
    if a == b:
        return a
    extra = tuple(v for v in b if v not in a)
    return a + extra


def _embed(terms: dict, old: tuple, new: tuple) -> dict:
    if old == new:
        return terms
    pos = [new.index(v) for v in old]
    n = len(new)
    out = {}
    for e, c in terms.items():
        ne = [0] * n
        for i, k in zip(pos, e):
            ne[i] = k
        out[tuple(ne)] = c
    return out


class Poly:
    """Sparse polynomial with Gaussian-rational coefficients. Immutable."""

    __slots__ = ("terms", "vars")

    def __init__(self, terms: Mapping[Exps, object] | None = None, variables: Iterable[str] = ()):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        clean = {}
        if terms:
            n = len(variables)
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not match variables {variables}")
                if any(k < 0 for k in e):
                    raise ValueError(f"negative exponent {e}")
                c = as_scalar(c)
                if c:
                    clean[e] = clean.get(e, ZERO) + c if e in clean else c
            clean = {e: c for e, c in clean.items() if c}
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, terms: dict, variables: tuple) -> Poly:
        p = object.__new__(cls)
        object.__setattr__(p, "vars", variables)
        object.__setattr__(p, "terms", terms)
        return p

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c, variables: Iterable[str] = ()) -> Poly:
        variables = tuple(variables)
        c = as_scalar(c)
        if not c:
            return cls._raw({}, variables)
        return cls._raw({(0,) * len(variables): c}, variables)

    @classmethod
    def var(cls, name: str, variables: Iterable[str] | None = None) -> Poly:
        variables = tuple(variables) if variables is not None else (name,)
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls._raw({tuple(e): ONE}, variables)

    @classmethod
    def parse(cls, text: str, variables: Iterable[str] | None = None) -> Poly:
        r = parse_expr(text, variables)
        if not r.den.is_constant():
            raise ParseError(f"{text!r} is not a polynomial")
        return r.num * r.den.constant_value().inverse()

    # -- basic queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        if not self.terms:
            return True
        return len(self.terms) == 1 and not any(next(iter(self.terms)))

    def constant_value(self) -> Scalar:
        if not self.terms:
            return ZERO
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: str) -> int:
        if var not in self.vars:
            return 0 if self.terms else -1
        k = self.vars.index(var)
        return max((e[k] for e in self.terms), default=-1)

    def used_vars(self) -> tuple:
        return tuple(v for k, v in enumerate(self.vars) if any(e[k] for e in self.terms))

    def leading(self) -> tuple[Exps, Scalar]:
        """Leading (exponent, coefficient) in graded lexicographic order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def leading_coefficient(self) -> Scalar:
        return self.leading()[1]

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    # -- alignment ----------------------------------------------------------
    def with_vars(self, variables: Iterable[str]) -> Poly:
        variables = tuple(variables)
        if variables == self.vars:
            return self
        missing = [v for v in self.used_vars() if v not in variables]
        if missing:
            raise ValueError(f"variables {missing} would be dropped")
        pos = [(variables.index(v), k) for k, v in enumerate(self.vars) if v in variables]
        n = len(variables)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, k in pos:
                ne[i] = e[k]
            out[tuple(ne)] = c
        return Poly._raw(out, variables)

    def _aligned(self, other: Poly):
        if self.vars == other.vars:
            return self.vars, self.terms, other.terms
        v = _merge_vars(self.vars, other.vars)
        return v, _embed(self.terms, self.vars, v), _embed(other.terms, other.vars, v)

    # -- arithmetic ---------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, RatFunc):
            return NotImplemented
        try:
            return Poly.const(as_scalar(other), self.vars)
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        v, ta, tb = self._aligned(other)
        out = dict(ta)
        for e, c in tb.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(out, v)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({e: -c for e, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> Poly:
        c = as_scalar(c)
        if not c:
            return Poly._raw({}, self.vars)
        if c == ONE:
            return self
        return Poly._raw({e: k * c for e, k in self.terms.items()}, self.vars)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, RatFunc):
                return NotImplemented
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        v, ta, tb = self._aligned(other)
        if len(ta) == 1 and not any(next(iter(ta))):
            return Poly._raw(dict(tb), v).scale(next(iter(ta.values())))
        if len(tb) == 1 and not any(next(iter(tb))):
            return Poly._raw(dict(ta), v).scale(next(iter(tb.values())))
        out: dict = {}
        for ea, ca in ta.items():
            for eb, cb in tb.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e)
                out[e] = ca * cb if s is None else s + ca * cb
        return Poly._raw({e: c for e, c in out.items() if c}, v)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Poly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (Poly, RatFunc)):
            return RatFunc(self) / other
        return self.scale(as_scalar(other).inverse())

    def __rtruediv__(self, other):
        return RatFunc(self._lift(other)) / RatFunc(self)

    def conjugate(self) -> Poly:
        """Conjugate the coefficients (variables are treated as real)."""
        return Poly._raw({e: c.conjugate() for e, c in self.terms.items()}, self.vars)

    def real_part(self) -> Poly:
        return Poly._raw({e: Scalar(c.re) for e, c in self.terms.items() if c.re}, self.vars)

    def imag_part(self) -> Poly:
        return Poly._raw({e: Scalar(c.im) for e, c in self.terms.items() if c.im}, self.vars)

    def derivative(self, var: str) -> Poly:
        if var not in self.vars:
            return Poly._raw({}, self.vars)
        k = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = e[:k] + (e[k] - 1,) + e[k + 1:]
                out[ne] = c * e[k]
        return Poly._raw(out, self.vars)

    def monic(self) -> Poly:
        if not self.terms:
            return self
        return self.scale(self.leading_coefficient().inverse())

    def div_exact(self, other: Poly) -> Poly:
        """Exact quotient ``self / other``; raises :class:`NotExactDivision` otherwise."""
        if other.is_zero():
            raise ZeroDenominator("division by the zero polynomial")
        v, ta, tb = self._aligned(other)
        if len(tb) == 1:
            (eb, cb), = tb.items()
            inv = cb.inverse()
            out = {}
            for e, c in ta.items():
                d = tuple(x - y for x, y in zip(e, eb))
                if any(k < 0 for k in d):
                    raise NotExactDivision("monomial does not divide")
                out[d] = c * inv
            return Poly._raw(out, v)
        lead_e = max(tb, key=_grlex_key)
        lead_inv = tb[lead_e].inverse()
        r = dict(ta)
        q: dict = {}
        while r:
            e = max(r, key=_grlex_key)
            d = tuple(x - y for x, y in zip(e, lead_e))
            if any(k < 0 for k in d):
                raise NotExactDivision("leading term not divisible")
            t = r[e] * lead_inv
            q[d] = t
            for eb, cb in tb.items():
                ee = tuple(x + y for x, y in zip(eb, d))
                s = r.get(ee, ZERO) - t * cb
                if s:
                    r[ee] = s
                else:
                    r.pop(ee, None)
        return Poly._raw(q, v)

    def divides(self, other: Poly) -> bool:
        try:
            other.div_exact(self)
        except NotExactDivision:
            return False
        return True

    # -- substitution / evaluation ------------------------------------------
    def subs(self, mapping: Mapping[str, object]) -> RatFunc:
        """Simultaneous substitution of variables by RatFunc/Poly/scalars."""
        vals = []
        for v in self.vars:
            if v in mapping:
                vals.append(_to_ratfunc(mapping[v]))
            else:
                vals.append(RatFunc(Poly.var(v)))
        # common denominator prod d_k^{D_k}: a single normalization at the end
        top = [max((e[k] for e in self.terms), default=0) for k in range(len(self.vars))]
        num_pow: list[dict] = [{} for _ in self.vars]
        den_pow: list[dict] = [{} for _ in self.vars]

        def power(cache, base, n):
            p = cache.get(n)
            if p is None:
                p = base ** n
                cache[n] = p
            return p

        num = Poly.const(0)
        for e, c in self.terms.items():
            term = Poly.const(c)
            for k, n in enumerate(e):
                if top[k]:
                    if n:
                        term = term * power(num_pow[k], vals[k].num, n)
                    if top[k] - n and not vals[k].den.is_constant():
                        term = term * power(den_pow[k], vals[k].den, top[k] - n)
            num = num + term
        den = Poly.const(1)
        for k, D in enumerate(top):
            if D and not vals[k].den.is_constant():
                den = den * power(den_pow[k], vals[k].den, D)
        return RatFunc(num, den)

    def evaluate(self, values: Mapping[str, object]):
        """Evaluate at a point.

        Exact when every value is an exact number (returns :class:`Scalar`),
        otherwise numeric; numpy arrays broadcast.
        """
        exact = all(isinstance(values[v], (int, Fraction, Scalar)) and not isinstance(values[v], bool)
                    for v in self.used_vars())
        if exact:
            total = ZERO
            for e, c in self.terms.items():
                t = c
                for v, k in zip(self.vars, e):
                    if k:
                        t = t * as_scalar(values[v]) ** k
                total = total + t
            return total
        total = 0.0
        for e, c in self.terms.items():
            t = c.to_number()
            for v, k in zip(self.vars, e):
                if k:
                    t = t * values[v] ** k
            total = total + t
        return total

    # -- equality / display ----------------------------------------------------
    def _named(self):
        return frozenset(
            (tuple((v, k) for v, k in zip(self.vars, e) if k), c) for e, c in self.terms.items()
        )

    def __eq__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, RatFunc):
                return RatFunc(self) == other
            try:
                other = Poly.const(as_scalar(other), self.vars)
            except TypeError:
                return NotImplemented
        if self.vars == other.vars:
            return self.terms == other.terms
        return self._named() == other._named()

    def __hash__(self):
        return hash(self._named())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.vars, e) if k
            )
            neg = c.re < 0 if c.re else c.im < 0
            mag = -c if neg else c
            cs = mag.pretty()
            if mono:
                body = mono if mag == ONE else f"{cs}*{mono}"
            else:
                body = cs
            parts.append(("-" if neg else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly('{self}', vars={self.vars})"

    def to_json(self):
        return {
            "variables": list(self.vars),
            "terms": [[list(e), str(c)] for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data) -> Poly:
        return cls({tuple(e): as_scalar(c) for e, c in data["terms"]}, data["variables"])


# --------------------------------------------------------------------------
# gcd machinery


def _split(p: Poly, k: int) -> dict[int, Poly]:
    """Coefficients of ``p`` as a polynomial in variable index ``k``."""
    out: dict[int, dict] = {}
    for e, c in p.terms.items():
        d = e[k]
        out.setdefault(d, {})[e[:k] + (0,) + e[k + 1:]] = c
    return {d: Poly._raw(t, p.vars) for d, t in out.items()}


def _xpow(k: int, n: int, variables: tuple) -> Poly:
    e = [0] * len(variables)
    e[k] = n
    return Poly._raw({tuple(e): ONE}, variables)


def _deg(p: Poly, k: int) -> int:
    return max((e[k] for e in p.terms), default=-1)


def _monomial_gcd(m: Poly, p: Poly) -> Poly:
    (em,) = m.terms
    e = list(em)
    for ep in p.terms:
        e = [min(a, b) for a, b in zip(e, ep)]
    return Poly._raw({tuple(e): ONE}, m.vars)


def _content(p: Poly, k: int) -> Poly:
    coeffs = list(_split(p, k).values())
    g = coeffs[0].monic()
    for c in coeffs[1:]:
        if g.is_constant():
            break
        g = _gcd(g, c)
    return g


def _prem(a: Poly, b: Poly, k: int) -> Poly:
    db = _deg(b, k)
    lcb = _split(b, k)[db]
    r = a
    while r.terms:
        dr = _deg(r, k)
        if dr < db:
            break
        lcr = _split(r, k)[dr]
        r = lcb * r - lcr * _xpow(k, dr - db, r.vars) * b
    return r


def _primitive(p: Poly, k: int) -> Poly:
    c = _content(p, k)
    if not c.is_constant():
        p = p.div_exact(c)
    return p.monic()


def _gcd(a: Poly, b: Poly) -> Poly:
    if a.vars != b.vars:
        v = _merge_vars(a.vars, b.vars)
        a, b = a.with_vars(v), b.with_vars(v)
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    variables = a.vars
    one = Poly.const(1, variables)
    if a.is_constant() or b.is_constant():
        return one
    if a.is_monomial():
        return _monomial_gcd(a, b)
    if b.is_monomial():
        return _monomial_gcd(b, a)
    used_a = {k for e in a.terms for k, x in enumerate(e) if x}
    used_b = {k for e in b.terms for k, x in enumerate(e) if x}
    common = sorted(used_a & used_b)
    if not common:
        # gcd divides contents w.r.t. every variable absent from the other operand
        k = min(used_a)
        return _gcd(_content(a, k), b)
    k = common[0]
    ca, cb = _content(a, k), _content(b, k)
    pa = a if ca.is_constant() else a.div_exact(ca)
    pb = b if cb.is_constant() else b.div_exact(cb)
    g_cont = _gcd(ca, cb)
    if _deg(pa, k) < _deg(pb, k):
        pa, pb = pb, pa
    A, B = pa, pb
    while B.terms:
        if _deg(B, k) == 0:
            A = one
            break
        R = _prem(A, B, k)
        A, B = B, (_primitive(R, k) if R.terms else R)
    g = A if A.is_constant() else _primitive(A, k)
    return (g_cont * g).monic()


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Greatest common divisor, normalized to leading coefficient 1."""
    if a.is_zero() and b.is_zero():
        raise BothZero("gcd(0, 0) is undefined")
    return _gcd(a, b)


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


# --------------------------------------------------------------------------
# rational functions


def _to_ratfunc(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    return RatFunc(Poly.const(as_scalar(x)))


class RatFunc:
    """Quotient of polynomials in canonical form.

    The numerator and denominator are coprime and the denominator has leading
    coefficient 1; a zero function is stored as ``0/1``.
    """

    __slots__ = ("den", "num")

    def __init__(self, num, den=None):
        if not isinstance(num, Poly):
            num = Poly.const(as_scalar(num))
        if den is None:
            den = Poly.const(1, num.vars)
        elif not isinstance(den, Poly):
            den = Poly.const(as_scalar(den), num.vars)
        if den.is_zero():
            raise ZeroDenominator("rational function with zero denominator")
        num, den = _normalize(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> RatFunc:
        r = object.__new__(cls)
        object.__setattr__(r, "num", num)
        object.__setattr__(r, "den", den)
        return r

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    @classmethod
    def zero(cls) -> RatFunc:
        return cls._raw(Poly._raw({}, ()), Poly.const(1))

    @classmethod
    def one(cls) -> RatFunc:
        return cls._raw(Poly.const(1), Poly.const(1))

    @classmethod
    def parse(cls, text: str, variables: Iterable[str] | None = None) -> RatFunc:
        return parse_expr(text, variables)

    @classmethod
    def var(cls, name: str) -> RatFunc:
        return cls._raw(Poly.var(name), Poly.const(1, (name,)))

    # -- queries ----------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValueError("not constant")
        return self.num.constant_value() / self.den.constant_value()

    def as_poly(self) -> Poly:
        if not self.den.is_constant():
            raise ValueError(f"{self} is not a polynomial")
        return self.num.scale(self.den.constant_value().inverse())

    @property
    def vars(self) -> tuple:
        return _merge_vars(self.num.vars, self.den.vars)

    def used_vars(self) -> tuple:
        u = self.num.used_vars()
        return u + tuple(v for v in self.den.used_vars() if v not in u)

    def is_real(self) -> bool:
        return self.num.is_real() and self.den.is_real()

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den.is_constant() and other.den.is_constant():
            # both denominators are 1 in canonical form
            return RatFunc._raw(self.num + other.num, Poly.const(1, self.den.vars))
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        g = _gcd(self.den, other.den)
        if g.is_constant():
            return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)
        d1 = self.den.div_exact(g)
        d2 = other.den.div_exact(g)
        return RatFunc(self.num * d2 + other.num * d1, d1 * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)) and not isinstance(other, bool):
            c = as_scalar(other)
            if not c:
                return RatFunc.zero()
            return RatFunc._raw(self.num.scale(c), self.den)
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return RatFunc.zero()
        if self.den.is_constant() and other.den.is_constant():
            return RatFunc._raw(self.num * other.num, Poly.const(1, self.den.vars))
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if not d2.is_constant():
            g = _gcd(n1, d2)
            if not g.is_constant():
                n1, d2 = n1.div_exact(g), d2.div_exact(g)
        if not d1.is_constant():
            g = _gcd(n2, d1)
            if not g.is_constant():
                n2, d1 = n2.div_exact(g), d1.div_exact(g)
        num, den = n1 * n2, d1 * d2
        lc = den.leading_coefficient()
        if lc != ONE:
            inv = lc.inverse()
            num, den = num.scale(inv), den.scale(inv)
        return RatFunc._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> RatFunc:
        if self.num.is_zero():
            raise ZeroDenominator("inverse of zero rational function")
        num, den = self.den, self.num
        lc = den.leading_coefficient()
        if lc != ONE:
            inv = lc.inverse()
            num, den = num.scale(inv), den.scale(inv)
        return RatFunc._raw(num, den)

    def __truediv__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc._raw(self.num ** n, self.den ** n)

    def conjugate(self) -> RatFunc:
        return RatFunc(self.num.conjugate(), self.den.conjugate())

    def derivative(self, var: str) -> RatFunc:
        if self.den.is_constant():
            return RatFunc._raw(self.num.derivative(var), self.den)
        dn = self.num.derivative(var)
        dd = self.den.derivative(var)
        if dd.is_zero():
            return RatFunc(dn, self.den)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def subs(self, mapping: Mapping[str, object]) -> RatFunc:
        return self.num.subs(mapping) / self.den.subs(mapping)

    def evaluate(self, values: Mapping[str, object]):
        n = self.num.evaluate(values)
        d = self.den.evaluate(values)
        if isinstance(n, Scalar) and isinstance(d, Scalar):
            if d.is_zero():
                raise ZeroDenominator(f"denominator of {self} vanishes at {dict(values)}")
            return n / d
        if isinstance(n, Scalar):
            n = n.to_number()
        if isinstance(d, Scalar):
            d = d.to_number()
        return n / d

    # -- equality / display ------------------------------------------------------
    def __eq__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    __hash__ = None

    def __str__(self):
        if self.den.is_constant():
            return str(self.num)
        n = str(self.num)
        if len(self.num.terms) > 1:
            n = f"({n})"
        return f"{n}/({self.den})"

    def __repr__(self):
        return f"RatFunc('{self}')"

    def to_json(self) -> str:
        return str(self)


def _coerce_rf(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc._raw(x, Poly.const(1, x.vars))
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, (Scalar, int, Fraction)):
        return RatFunc._raw(Poly.const(as_scalar(x)), Poly.const(1))
    return NotImplemented


def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if num.vars != den.vars:
        v = _merge_vars(num.vars, den.vars)
        num, den = num.with_vars(v), den.with_vars(v)
    if num.is_zero():
        return num, Poly.const(1, num.vars)
    if den.is_constant():
        c = den.constant_value()
        return num.scale(c.inverse()), Poly.const(1, num.vars)
    g = _gcd(num, den)
    if not g.is_constant():
        num, den = num.div_exact(g), den.div_exact(g)
    lc = den.leading_coefficient()
    if lc != ONE:
        inv = lc.inverse()
        num, den = num.scale(inv), den.scale(inv)
    return num, den


def ratfunc_simplify(f: RatFunc) -> RatFunc:
    """Return the canonical form of ``f`` (already maintained by the constructor)."""
    return RatFunc(f.num, f.den)


# --------------------------------------------------------------------------
# expression parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        if m.group(1) is not None:
            out.append(("num", m.group(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2)))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


def parse_expr(text: str, variables: Iterable[str] | None = None) -> RatFunc:
    """Parse an arithmetic expression in named variables into a :class:`RatFunc`.

    ``i`` is the imaginary unit; ``^`` and ``**`` are exponentiation.
    Decimal points are rejected.
    """
    if "." in text:
        raise ParseError(f"decimal input rejected in {text!r}")
    tokens = _tokenize(text)
    if variables is None:
        seen = []
        for kind, val in tokens:
            if kind == "name" and val != "i" and val not in seen:
                seen.append(val)
        variables = tuple(seen)
    variables = tuple(variables)
    if "i" in variables:
        raise ParseError("'i' is reserved for the imaginary unit")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr():
        val = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = unary()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            rhs = unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def unary():
        if peek() == ("op", "-"):
            take()
            return -unary()
        if peek() == ("op", "+"):
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            neg = False
            if peek() == ("op", "-"):
                take()
                neg = True
            kind, val = take()
            if kind != "num":
                raise ParseError(f"integer exponent expected in {text!r}")
            n = int(val)
            return base ** (-n if neg else n)
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return RatFunc._raw(Poly.const(int(val), variables), Poly.const(1, variables))
        if kind == "name":
            if val == "i":
                return RatFunc._raw(Poly.const(Scalar(0, 1), variables), Poly.const(1, variables))
            if val not in variables:
                raise ParseError(f"unknown variable {val!r} (variables {variables})")
            return RatFunc._raw(Poly.var(val, variables), Poly.const(1, variables))
        if (kind, val) == ("op", "("):
            v = expr()
            if take() != ("op", ")"):
                raise ParseError(f"unbalanced parentheses in {text!r}")
            return v
        raise ParseError(f"unexpected token {val!r} in {text!r}")

    result = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing input in {text!r}")
    return RatFunc(result.num.with_vars(_merge_vars(variables, result.num.vars)),
                   result.den.with_vars(_merge_vars(variables, result.den.vars)))
