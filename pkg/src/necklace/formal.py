"""Fourier-mode decomposition of the Poisson complex near the necklace.

In action-angle coordinates the structure is ``I d/dI ^ d/dtheta``.  Writing
``xi = d/dI`` and ``eta = d/dtheta``, the mode-``n`` complex has basis

    degree 0:  I^m e^{in theta}                    m = 0..M
    degree 1:  I^m e^{in theta} xi   (a_m)         m = 0..M+1
               I^m e^{in theta} eta  (b_m)         m = 0..M
    degree 2:  I^m e^{in theta} xi^eta (h_m)       m = 0..M+1

and the differential never leaves these windows, so the truncated complex
computes the formal power series cohomology exactly.  Matrices are read off
from the Schouten engine applied to each basis element.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache

from .calculus import CONVENTIONS, Multivector, schouten
from .charts import get_chart
from .errors import CapTooSmall
from .linalg import (
    bareiss_rank,
    is_zero_matrix,
    matmul,
    nullspace,
    rank,
    solve,
)
from .polys import Poly, RatFunc
from .scalars import ONE, ZERO, Scalar, as_scalar

__all__ = [
    "ASSUMPTIONS",
    "CohomologyReport",
    "ModeElement",
    "TruncatedModeComplex",
    "annulus_cohomology",
    "build_mode_complex",
    "is_coboundary_in_mode",
    "mode_cohomology",
    "recursion_matrices",
    "zero_mode_split",
    "zero_mode_to_st",
]

ASSUMPTIONS = [
    (
        "formal = smooth: the cohomology of a small annulus around the necklace equals that of its formal "
        "neighborhood (Borel's theorem, acyclicity of the flat complex, convergence of Fourier series); "
        "assumed, not computed"
    ),
]

_AA = get_chart("action_angle")
_AA_VARS = _AA.ring_vars  # ("I", "E")


def _check_cap(M: int) -> None:
    if M < 2:
        raise CapTooSmall(f"degree cap M must be at least 2, got {M}")


def _windows(M: int) -> dict:
    return {"f": M + 1, "a": M + 2, "b": M + 1, "h": M + 2}


def _monomial(m: int, n: int) -> RatFunc:
    if n >= 0:
        return RatFunc(Poly({(m, n): 1}, _AA_VARS))
    return RatFunc(Poly({(m, 0): 1}, _AA_VARS), Poly({(0, -n): 1}, _AA_VARS))


def _I_coefficients(g: RatFunc, n: int) -> dict[int, Scalar]:
    """Coefficients of ``g = sum_m c_m I^m E^n``; fails loudly if ``g`` has another shape."""
    if g.is_zero():
        return {}
    p = (g * _monomial(0, -n)).as_poly()
    out = {}
    names = p.vars
    for e, c in p.terms.items():
        powers = dict(zip(names, e))
        if powers.get("E", 0):
            raise ValueError(f"{g} is not in Fourier mode {n}")
        out[powers.get("I", 0)] = c
    return out


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class ModeElement:
    """A multivector in one Fourier mode, given by truncated coefficient vectors."""

    n: int
    M: int
    f: tuple = ()
    a: tuple = ()
    b: tuple = ()
    h: tuple = ()

    def __post_init__(self):
        w = _windows(self.M)
        for name in "fabh":
            vals = tuple(as_scalar(x) for x in getattr(self, name))
            if not vals:
                vals = (ZERO,) * w[name]
            if len(vals) != w[name]:
                raise ValueError(f"{name} must have length {w[name]} for M = {self.M}, got {len(vals)}")
            object.__setattr__(self, name, vals)

    @classmethod
    def from_parts(cls, n: int, M: int, f=None, a=None, b=None, h=None) -> ModeElement:
        """Build from sparse ``{I-degree: coefficient}`` maps."""
        w = _windows(M)

        def dense(d, length):
            v = [ZERO] * length
            for k, c in (d or {}).items():
                if not 0 <= k < length:
                    raise ValueError(f"I-degree {k} outside the window of length {length}")
                v[k] = as_scalar(c)
            return tuple(v)

        return cls(n, M, dense(f, w["f"]), dense(a, w["a"]), dense(b, w["b"]), dense(h, w["h"]))

    @classmethod
    def from_vector(cls, n: int, M: int, degree: int, vec: Sequence[Scalar]) -> ModeElement:
        w = _windows(M)
        vec = list(vec)
        if degree == 0:
            return cls(n, M, f=tuple(vec))
        if degree == 1:
            return cls(n, M, a=tuple(vec[: w["a"]]), b=tuple(vec[w["a"]:]))
        if degree == 2:
            return cls(n, M, h=tuple(vec))
        raise ValueError("degree must be 0, 1 or 2")

    def vector(self, degree: int) -> list[Scalar]:
        if degree == 0:
            return list(self.f)
        if degree == 1:
            return list(self.a) + list(self.b)
        if degree == 2:
            return list(self.h)
        raise ValueError("degree must be 0, 1 or 2")

    def degrees(self) -> set:
        out = set()
        if any(self.f):
            out.add(0)
        if any(self.a) or any(self.b):
            out.add(1)
        if any(self.h):
            out.add(2)
        return out

    def is_zero(self) -> bool:
        return not self.degrees()

    def to_multivector(self) -> Multivector:
        comps: dict = {}

        def put(key, vals):
            acc = RatFunc.zero()
            for m, c in enumerate(vals):
                if not c.is_zero():
                    acc = acc + _monomial(m, self.n) * c
            if not acc.is_zero():
                comps[key] = acc

        put((), self.f)
        put(("I",), self.a)
        put(("theta",), self.b)
        put(("I", "theta"), self.h)
        return Multivector(_AA, comps)

    @classmethod
    def from_multivector(cls, mv: Multivector, n: int, M: int) -> ModeElement:
        parts = {}
        for key, name in (((), "f"), ((0,), "a"), ((1,), "b"), ((0, 1), "h")):
            c = mv.components.get(key)
            parts[name] = _I_coefficients(c, n) if c is not None else {}
        return cls.from_parts(n, M, **parts)

    def __str__(self):
        terms = []
        fourier = "" if self.n == 0 else f"e^({self.n}*i*theta)"
        for name, label in (("f", ""), ("a", "xi"), ("b", "eta"), ("h", "xi^eta")):
            for m, c in enumerate(getattr(self, name)):
                if c.is_zero():
                    continue
                mono = "" if m == 0 else ("I" if m == 1 else f"I^{m}")
                body = "*".join(x for x in (mono, fourier, label) if x)
                coef = c.pretty()
                if not body:
                    terms.append(coef)
                elif c == ONE:
                    terms.append(body)
                elif c == -ONE:
                    terms.append("-" + body)
                else:
                    terms.append(f"{coef}*{body}")
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> dict:
        def sparse(vals):
            return {str(m): str(c) for m, c in enumerate(vals) if not c.is_zero()}

        return {"mode": self.n, "M": self.M, "f": sparse(self.f), "xi": sparse(self.a), "eta": sparse(self.b),
                "xi_eta": sparse(self.h), "display": str(self)}


# ---------------------------------------------------------------------------
# truncated complexes


@dataclass(frozen=True)
class TruncatedModeComplex:
    n: int
    M: int
    d0: tuple  # rows: a_0..a_{M+1}, b_0..b_M ; columns: f_0..f_M
    d1: tuple  # rows: h_0..h_{M+1} ; columns: a_0..a_{M+1}, b_0..b_M

    @property
    def dims(self) -> tuple[int, int, int]:
        w = _windows(self.M)
        return w["f"], w["a"] + w["b"], w["h"]

    def column_labels(self, degree: int) -> list[str]:
        w = _windows(self.M)
        if degree == 0:
            return [f"f{m}" for m in range(w["f"])]
        if degree == 1:
            return [f"a{m}" for m in range(w["a"])] + [f"b{m}" for m in range(w["b"])]
        return [f"h{m}" for m in range(w["h"])]

    def apply(self, elem: ModeElement) -> ModeElement:
        """The differential on a homogeneous element."""
        out = ModeElement(self.n, self.M)
        for deg in elem.degrees():
            if deg == 0:
                vec = [sum((row[j] * elem.f[j] for j in range(len(elem.f))), ZERO) for row in self.d0]
                out = _add(out, ModeElement.from_vector(self.n, self.M, 1, vec))
            elif deg == 1:
                v = elem.vector(1)
                vec = [sum((row[j] * v[j] for j in range(len(v))), ZERO) for row in self.d1]
                out = _add(out, ModeElement.from_vector(self.n, self.M, 2, vec))
        return out

    def to_json(self) -> dict:
        return {
            "mode": self.n,
            "M": self.M,
            "d0": [[str(x) for x in row] for row in self.d0],
            "d1": [[str(x) for x in row] for row in self.d1],
            "rows_d0": self.column_labels(1),
            "rows_d1": self.column_labels(2),
        }


def _add(x: ModeElement, y: ModeElement) -> ModeElement:
    return ModeElement(x.n, x.M, *(tuple(p + q for p, q in zip(getattr(x, k), getattr(y, k))) for k in "fabh"))


def _basis(n: int, M: int, degree: int) -> list[Multivector]:
    w = _windows(M)
    if degree == 0:
        return [Multivector(_AA, {(): _monomial(m, n)}) for m in range(w["f"])]
    if degree == 1:
        return ([Multivector(_AA, {("I",): _monomial(m, n)}) for m in range(w["a"])]
                + [Multivector(_AA, {("theta",): _monomial(m, n)}) for m in range(w["b"])])
    return [Multivector(_AA, {("I", "theta"): _monomial(m, n)}) for m in range(w["h"])]


def _matrix_of(pi: Multivector, n: int, M: int, degree: int) -> tuple:
    w = _windows(M)
    cols = []
    for mv in _basis(n, M, degree):
        image = schouten(pi, mv)
        elem = ModeElement.from_multivector(image, n, M)
        if elem.degrees() - {degree + 1}:
            raise AssertionError("the differential left the expected degree")
        if elem.to_multivector() != image:
            raise AssertionError("truncation window lost terms")
        cols.append(elem.vector(degree + 1))
    nrows = (w["a"] + w["b"]) if degree == 0 else w["h"]
    return tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(nrows))


@lru_cache(maxsize=256)
def build_mode_complex(n: int, M: int) -> TruncatedModeComplex:
    """The truncated mode-``n`` complex; ``d1 d0 = 0`` is verified exactly."""
    _check_cap(M)
    pi = Multivector(_AA, {("I", "theta"): RatFunc(Poly.var("I", _AA_VARS))})
    d0 = _matrix_of(pi, n, M, 0)
    d1 = _matrix_of(pi, n, M, 1)
    if not is_zero_matrix(matmul(d1, d0)):
        raise AssertionError(f"d1 d0 != 0 in mode {n}")
    return TruncatedModeComplex(n, M, d0, d1)


def recursion_matrices(n: int, M: int, eta_sign: int = -1) -> tuple[list, list]:
    """Matrices from the closed-form recursions.

    ``d f``: ``a_m = i n f_{m-1}``, ``b_m = eta_sign * m f_m``;
    ``d(a xi + b eta)``: ``h_0 = -a_0``, ``h_m = (m-1) a_m + i n b_{m-1}``.
    With ``eta_sign = +1`` the sign is flipped and
    ``d1 d0 != 0`` when ``n != 0``.
    """
    _check_cap(M)
    w = _windows(M)
    i_n = Scalar(0, n)
    d0 = [[ZERO] * w["f"] for _ in range(w["a"] + w["b"])]
    for m in range(1, w["a"]):
        d0[m][m - 1] = i_n
    for m in range(w["b"]):
        d0[w["a"] + m][m] = Scalar(eta_sign * m)
    d1 = [[ZERO] * (w["a"] + w["b"]) for _ in range(w["h"])]
    d1[0][0] = -ONE
    for m in range(1, w["h"]):
        d1[m][m] = Scalar(m - 1)
        d1[m][w["a"] + m - 1] = i_n
    return d0, d1


# ---------------------------------------------------------------------------
# cohomology


@dataclass
class CohomologyReport:
    dims: list
    representatives: list
    stable_range_certificate: dict
    label: str = ""
    provenance: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, reps in enumerate(self.representatives):
            if len(reps) != self.dims[k]:
                raise AssertionError(f"degree {k}: {len(reps)} representatives for dimension {self.dims[k]}")

    def to_json(self) -> dict:
        def ser(x):
            return x.to_json() if hasattr(x, "to_json") else x

        out = {
            "label": self.label,
            "dims": list(self.dims),
            "representatives": [[ser(r) for r in reps] for reps in self.representatives],
            "provenance": list(self.provenance),
            "stable_range_certificate": self.stable_range_certificate,
            "conventions": dict(CONVENTIONS),
        }
        for k, v in self.extra.items():
            out[k] = ser(v)
        return out


def _unit(length: int, k: int) -> list[Scalar]:
    v = [ZERO] * length
    v[k] = ONE
    return v


def _greedy_extend(base: list[list[Scalar]], candidates: list[list[Scalar]]) -> list[list[Scalar]]:
    """Pick candidates that are independent modulo ``span(base)``."""
    chosen: list = []
    current = list(base)
    r = rank(current) if current else 0
    for v in candidates:
        trial = current + [v]
        rt = rank(trial)
        if rt > r:
            chosen.append(v)
            current = trial
            r = rt
    return chosen


def _columns(mat) -> list[list[Scalar]]:
    if not mat:
        return []
    return [[row[j] for row in mat] for j in range(len(mat[0]))]


def _dims_of(cx: TruncatedModeComplex) -> list[int]:
    n0, n1, n2 = cx.dims
    r0 = rank(cx.d0)
    r1 = rank(cx.d1)
    if bareiss_rank(cx.d0) != r0 or bareiss_rank(cx.d1) != r1:
        raise AssertionError("the two rank computations disagree")
    return [n0 - r0, n1 - r0 - r1, n2 - r1]


def mode_cohomology(n: int, M: int) -> CohomologyReport:
    """Cohomology of the mode-``n`` complex with explicit, verified representatives."""
    cx = build_mode_complex(n, M)
    n0, n1, n2 = cx.dims
    dims = _dims_of(cx)
    h0 = nullspace(cx.d0, n0)
    image1 = _columns(cx.d0)
    w = _windows(M)
    # prefer eta-only candidates first so the rotation precedes the dilation
    candidates = sorted(nullspace(cx.d1, n1), key=lambda v: any(not x.is_zero() for x in v[: w["a"]]))
    h1 = _greedy_extend(image1, candidates)
    image2 = _columns(cx.d1)
    h2 = _greedy_extend(image2, [_unit(n2, k) for k in range(n2)])
    reps = [
        [ModeElement.from_vector(n, M, 0, v) for v in h0],
        [ModeElement.from_vector(n, M, 1, v) for v in h1],
        [ModeElement.from_vector(n, M, 2, v) for v in h2],
    ]
    _verify_representatives(cx, reps, image1, image2)
    nxt = _dims_of(build_mode_complex(n, M + 1))
    cert = {"M": M, "dims_at_M_plus_1": nxt, "stable": nxt == dims,
            "windows": {"f": [0, M], "xi": [0, M + 1], "eta": [0, M], "xi_eta": [0, M + 1]}}
    return CohomologyReport(dims, reps, cert, label=f"mode {n}",
                            provenance=["d_pi matrices generated by the Schouten bracket on basis elements",
                                        "ranks by Gauss-Jordan and fraction-free elimination over Q(i)"],
                            extra={"mode": n, "M": M})


def _verify_representatives(cx, reps, image1, image2) -> None:
    for k, group in enumerate(reps):
        for r in group:
            if k < 2 and not cx.apply(r).is_zero():
                raise AssertionError(f"representative {r} is not a cocycle")
    for k, image in ((1, image1), (2, image2)):
        vecs = [r.vector(k) for r in reps[k]]
        if vecs and rank(image + vecs) - (rank(image) if image else 0) != len(vecs):
            raise AssertionError(f"degree {k} representatives are dependent modulo coboundaries")


def zero_mode_split(M: int) -> list[dict]:
    """Dimensions of the subcomplexes ``I^m {1} -> I^m {xi, eta} -> I^m {xi^eta}``, ``m = 0..M``."""
    cx = build_mode_complex(0, M)
    w = _windows(M)
    out = []
    for m in range(M + 1):
        rows1 = [m, w["a"] + m]
        d0 = [[cx.d0[r][m]] for r in rows1]
        d1 = [[cx.d1[m][c] for c in rows1]]
        r0, r1 = rank(d0), rank(d1)
        dims = [1 - r0, 2 - r0 - r1, 1 - r1]
        gens = [[], [], []]
        if dims[0]:
            gens[0].append(ModeElement.from_parts(0, M, f={m: 1}))
        if dims[1]:
            for v in _greedy_extend(_columns(d0), nullspace(d1, 2)):
                gens[1].append(ModeElement.from_parts(0, M, a={m: v[0]}, b={m: v[1]}))
        if dims[2]:
            gens[2].append(ModeElement.from_parts(0, M, h={m: 1}))
        out.append({"m": m, "dims": dims, "generators": [[str(g) for g in gs] for gs in gens]})
    return out


def is_coboundary_in_mode(elem: ModeElement):
    """A primitive of a homogeneous element inside the truncated complex, or ``None``.

    Free variables of the linear solve are set to zero; with the column order
    ``a_0..a_{M+1}, b_0..b_M`` this picks ``a_m = c_m/(m-1)`` (``m != 1``)
    and ``b_0 = c_1/(i n)`` for a degree-2 input in a nonzero mode.
    """
    cx = build_mode_complex(elem.n, elem.M)
    degs = elem.degrees()
    if not degs:
        return ModeElement(elem.n, elem.M)
    if len(degs) > 1:
        raise ValueError("is_coboundary_in_mode expects a homogeneous element")
    deg = degs.pop()
    if deg == 0:
        return None
    mat = cx.d0 if deg == 1 else cx.d1
    x = solve([list(r) for r in mat], elem.vector(deg), len(mat[0]))
    if x is None:
        return None
    prim = ModeElement.from_vector(elem.n, elem.M, deg - 1, x)
    if cx.apply(prim) != elem:
        raise AssertionError("primitive check failed")
    return prim


# ---------------------------------------------------------------------------
# the annulus


def zero_mode_to_st(mv: Multivector, R2=1) -> Multivector:
    """Rewrite a theta-independent action-angle multivector on the disk chart.

    Uses ``I = rho/R^2 - 1``, ``d/dI = (R^2/(2 rho))(s d/ds + t d/dt)`` and
    ``d/dtheta = s d/dt - t d/ds`` with ``rho = s^2 + t^2``.
    """
    from .calculus import wedge

    R2 = as_scalar(R2)
    st = get_chart("st")
    rho = RatFunc.parse("s^2+t^2", st.variables)
    I_val = rho * R2.inverse() - RatFunc.one()
    dI = Multivector(st, {("s",): RatFunc.parse("s", st.variables), ("t",): RatFunc.parse("t", st.variables)})
    dI = dI * (rho.inverse() * (R2 / 2))
    dth = Multivector(st, {("t",): RatFunc.parse("s", st.variables), ("s",): -RatFunc.parse("t", st.variables)})
    frames = {(): Multivector.function(st, 1), (0,): dI, (1,): dth, (0, 1): wedge(dI, dth)}
    out = Multivector.zero(st)
    for key, c in mv.components.items():
        if "E" in c.used_vars():
            raise ValueError("only theta-independent multivectors can be rewritten rationally")
        coef = c.subs({"I": I_val})
        out = out + frames[key] * coef
    return out


def annulus_cohomology(N: int = 3, M: int = 6) -> CohomologyReport:
    """Sum of the mode cohomologies for ``|n| <= N`` with disk-chart representatives."""
    if N < 1:
        raise ValueError("N must be at least 1")
    per_mode = {}
    dims = [0, 0, 0]
    reps: list = [[], [], []]
    for n in range(-N, N + 1):
        rep = mode_cohomology(n, M)
        per_mode[n] = rep.dims
        for k in range(3):
            dims[k] += rep.dims[k]
            reps[k].extend(rep.representatives[k])
    st_reps = [[zero_mode_to_st(r.to_multivector()) for r in group] for group in reps]
    model = Multivector(_AA, {("I", "theta"): RatFunc(Poly.var("I", _AA_VARS))})
    h2_is_model = len(reps[2]) == 1 and reps[2][0].to_multivector() == model
    pi_local = is_coboundary_in_mode(ModeElement.from_parts(0, M, h={0: Scalar(1) / 2}))
    cert = {"N": N, "M": M, "per_mode": {str(k): v for k, v in per_mode.items()}}
    return CohomologyReport(
        dims, reps, cert, label="annulus around the necklace",
        provenance=["sum over Fourier modes |n| <= N of exact truncated mode complexes"],
        extra={
            "st_representatives": [[mv.to_json() for mv in g] for g in st_reps],
            "st_display": [[str(mv) for mv in g] for g in st_reps],
            "h2_generator_is_model_structure": h2_is_model,
            "pi_locally_exact": pi_local is not None,
            "pi_local_primitive": str(pi_local) if pi_local is not None else None,
            "assumptions": list(ASSUMPTIONS),
        },
    )
