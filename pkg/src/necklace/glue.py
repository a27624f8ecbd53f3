"""Global assembly on S^2 through the Mayer-Vietoris sequence.

``U`` is an annulus around the necklace and ``V`` the union of the two open
caps, so ``U n V`` is two annuli.  On ``V`` and ``U n V`` the structure is
symplectic and Poisson cohomology is de Rham cohomology; those dimensions are
topological constants.  The only analytic input is the rank of the
restriction ``H^1(U) -> H^1(U n V)``, detected by periods of ``i_X omega``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .calculus import DiffForm, Multivector, interior, modular_field, schouten
from .charts import get_chart
from .errors import Inconsistent, OutOfRange, SingularOnLoop, Underdetermined
from .formal import ASSUMPTIONS, CohomologyReport, annulus_cohomology, zero_mode_to_st
from .linalg import rank, solve, to_matrix
from .polys import RatFunc
from .scalars import Scalar, as_scalar
from .structures import (
    PoissonStructure,
    euler_field,
    make_pi_family,
    make_pi_standard,
    necklace_geometry,
    omega_density,
)

__all__ = [
    "PERIOD_TOL",
    "RANK_THRESHOLD",
    "TOPOLOGY",
    "ExactSequence",
    "RestrictionClassData",
    "annulus_loops",
    "deformation_check",
    "global_cohomology",
    "mayer_vietoris_sequence",
    "period_class",
    "period_matrix",
    "restriction_rank",
    "solve_exact_sequence",
]

PERIOD_TOL = 1e-9
RANK_THRESHOLD = 1e-6
LOOP_POINTS = 512

# de Rham dimensions of the symplectic pieces (topological facts, not computed)
TOPOLOGY = {
    "V (two disjoint open caps)": (2, 0, 0),
    "U n V (two disjoint annuli)": (2, 2, 0),
    "S^2 symplectic (de Rham)": (1, 0, 1),
}


# ---------------------------------------------------------------------------
# exact sequences


@dataclass
class ExactSequence:
    """Terms ``T_0 -> T_1 -> ... -> T_k``; map ``j`` goes from term ``j`` to term ``j+1``.

    Zero terms are implied before the first and after the last term.
    """

    terms: list  # [{"label": str, "dim": int | None}]
    maps: list  # [{"rank": int | None}]

    def __post_init__(self):
        self.terms = [dict(t) for t in self.terms]
        self.maps = [dict(m) for m in self.maps]
        if len(self.maps) != max(len(self.terms) - 1, 0):
            raise ValueError("an exact sequence with k terms needs k-1 maps")

    @property
    def dims(self) -> list:
        return [t["dim"] for t in self.terms]

    @property
    def ranks(self) -> list:
        return [m["rank"] for m in self.maps]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * t["dim"] for k, t in enumerate(self.terms))

    def to_json(self) -> dict:
        return {"terms": self.terms, "maps": self.maps}


def solve_exact_sequence(seq: ExactSequence) -> ExactSequence:
    """Fill every unknown dimension and rank from exactness.

    Exactness at term ``k`` reads ``dim T_k = rank f_{k-1} + rank f_k`` with
    ``f_{-1} = f_last = 0``.  The linear system is solved exactly; if it does
    not pin every unknown, :class:`Underdetermined` names the ranks that would.
    """
    nterm = len(seq.terms)
    unknowns: list[tuple[str, int]] = []
    for k, t in enumerate(seq.terms):
        if t["dim"] is None:
            unknowns.append(("dim", k))
    for j, m in enumerate(seq.maps):
        if m["rank"] is None:
            unknowns.append(("rank", j))
    index = {u: i for i, u in enumerate(unknowns)}
    rows, rhs = [], []
    for k in range(nterm):
        row = [Fraction(0)] * len(unknowns)
        const = Fraction(0)
        # dim_k - r_{k-1} - r_k = 0
        for kind, j, coef in (("dim", k, 1), ("rank", k - 1, -1), ("rank", k, -1)):
            if kind == "rank" and not 0 <= j < len(seq.maps):
                continue
            value = seq.terms[j]["dim"] if kind == "dim" else seq.maps[j]["rank"]
            if value is None:
                row[index[(kind, j)]] += coef
            else:
                const -= coef * value
        rows.append(row)
        rhs.append(const)
    out = ExactSequence(seq.terms, seq.maps)
    if unknowns:
        A = to_matrix(rows)
        r = rank(A)
        if r < len(unknowns):
            resolving = []
            for (kind, j) in unknowns:
                if kind != "rank":
                    continue
                extra = [Fraction(0)] * len(unknowns)
                extra[index[(kind, j)]] = Fraction(1)
                if rank(A + to_matrix([extra])) == len(unknowns):
                    resolving.append(f"rank of map {j} ({seq.terms[j]['label']} -> {seq.terms[j + 1]['label']})")
            raise Underdetermined(
                f"{len(unknowns) - r} degree(s) of freedom remain among the unknowns", resolving)
        x = solve(A, to_matrix([rhs])[0], len(unknowns))
        if x is None:
            raise Inconsistent("the known dimensions and ranks contradict exactness")
        for (kind, j), v in zip(unknowns, x):
            if not v.is_real() or v.re.denominator != 1 or v.re < 0:
                raise Inconsistent(f"{kind} {j} would be {v.pretty()}")
            if kind == "dim":
                out.terms[j]["dim"] = int(v.re)
            else:
                out.maps[j]["rank"] = int(v.re)
    _check_exact(out)
    return out


def _check_exact(seq: ExactSequence) -> None:
    for k, t in enumerate(seq.terms):
        left = seq.maps[k - 1]["rank"] if k >= 1 else 0
        right = seq.maps[k]["rank"] if k < len(seq.maps) else 0
        if t["dim"] != left + right:
            raise Inconsistent(f"exactness fails at {t['label']}")
        if left > t["dim"] or right > t["dim"]:
            raise Inconsistent(f"rank exceeds dimension at {t['label']}")
    if seq.euler_characteristic() != 0:
        raise Inconsistent("alternating sum of dimensions is not zero")


def mayer_vietoris_sequence(h_S2=(1, None, None), h_U=(1, 2, 1), h_V=(2, 0, 0), h_UV=(2, 2, 0),
                            restriction_rank_1: int | None = None) -> ExactSequence:
    """``0 -> H^k(S^2) -> H^k(U)+H^k(V) -> H^k(U n V) -> H^{k+1}(S^2) -> ...``."""
    terms = []
    for k in range(3):
        terms.append({"label": f"H{k}(S2)", "dim": h_S2[k]})
        terms.append({"label": f"H{k}(U)+H{k}(V)", "dim": h_U[k] + h_V[k]})
        terms.append({"label": f"H{k}(UnV)", "dim": h_UV[k]})
    maps = [{"rank": None} for _ in range(len(terms) - 1)]
    # map 4: H1(U)+H1(V) -> H1(UnV)
    maps[4]["rank"] = restriction_rank_1
    return ExactSequence(terms, maps)


# ---------------------------------------------------------------------------
# periods


@dataclass
class RestrictionClassData:
    vector_field: Multivector
    component_id: str
    loop_radius2: Scalar
    period: float

    def to_json(self) -> dict:
        return {"vector_field": str(self.vector_field), "component": self.component_id,
                "loop_radius2": str(self.loop_radius2), "period": self.period}


def period_class(pi: PoissonStructure, X: Multivector, loop_radius2, points: int = LOOP_POINTS) -> float:
    """``loop integral of i_X omega`` over ``s^2 + t^2 = loop_radius2``, counterclockwise.

    ``omega = (1/f) ds^dt`` for ``pi = f d/ds^d/dt``; the exact 1-form
    ``i_X omega`` is integrated with the trapezoid rule, spectrally accurate
    for smooth periodic integrands.
    """
    chart = pi.chart
    if chart.name != "st" or X.chart != chart:
        raise ValueError("period_class works on the disk chart")
    rho = as_scalar(loop_radius2)
    f = pi.coefficient()
    phi = np.arange(points) * (2 * math.pi / points)
    r = math.sqrt(float(rho.re))
    s, t = r * np.cos(phi), r * np.sin(phi)
    fvals = np.asarray(f.evaluate({"s": s, "t": t}), dtype=complex) * np.ones_like(phi)
    scale = max(1.0, float(np.max(np.abs(fvals))))
    if np.min(np.abs(fvals)) < 1e-12 * scale:
        raise SingularOnLoop(f"the structure vanishes on the loop s^2+t^2 = {rho.pretty()}")
    omega = DiffForm(chart, {("s", "t"): f.inverse()})
    alpha = interior(X, omega)
    comp = {}
    for name, idx in (("s", (0,)), ("t", (1,))):
        c = alpha.components.get(idx)
        comp[name] = (np.asarray(c.evaluate({"s": s, "t": t}), dtype=complex) * np.ones_like(phi)
                      if c is not None else np.zeros_like(phi))
    integrand = comp["s"] * (-t) + comp["t"] * s
    value = np.sum(integrand) * (2 * math.pi / points)
    if abs(value.imag) > 1e-9:
        raise ValueError("period of a real vector field should be real")
    return float(value.real)


def annulus_loops(c, delta=Fraction(1, 2)) -> dict:
    """One loop in each component of ``U n V``.

    ``U`` is ``R^2(1-delta) < rho < R^2 + delta(1-R^2)`` in the disk chart; the
    outer bound keeps ``U`` inside the unit disk for every ``|c| < 1``.
    """
    geo = necklace_geometry(c, delta)
    R2, d = geo.radius_squared, as_scalar(delta)
    return {
        "lower_cap_side": R2 * (1 - d / 2),
        "upper_cap_side": R2 + (d / 2) * (1 - R2),
        "annulus": (R2 * (1 - d), R2 + d * (1 - R2)),
    }


def period_matrix(generators: Sequence[Multivector], pi: PoissonStructure, loops: dict) -> list[list[float]]:
    comps = [k for k in ("lower_cap_side", "upper_cap_side") if k in loops] or list(loops)
    return [[period_class(pi, X, loops[k]) for k in comps] for X in generators]


def restriction_rank(generators: Sequence[Multivector], pi: PoissonStructure, loops: dict,
                     threshold: float = RANK_THRESHOLD) -> int:
    """Rank of the period matrix (generators x components of ``U n V``)."""
    if not generators:
        return 0
    P = np.array(period_matrix(generators, pi, loops), dtype=float)
    sv = np.linalg.svd(P, compute_uv=False)
    return int(np.sum(sv > threshold))


# ---------------------------------------------------------------------------
# global cohomology


def _cval(c) -> Scalar:
    c = as_scalar(c)
    if not c.is_real():
        raise OutOfRange("c must be real")
    return c


def global_cohomology(c, N: int = 3, M: int = 6, delta=Fraction(1, 2), strict: bool = True) -> CohomologyReport:
    """Poisson cohomology of ``(S^2, pi_c)``.

    For ``|c| < 1`` the Mayer-Vietoris sequence is solved from the annulus
    computation, the topological constants and the restriction rank.  With
    ``strict=False`` the other branches are reported: ``|c| > 1`` is
    symplectic (de Rham dimensions), ``|c| = 1`` is the Bruhat case, which is
    not computed here.
    """
    c = _cval(c)
    if abs(c.re) >= 1:
        if strict:
            raise OutOfRange(f"|c| >= 1 (c = {c.pretty()}) is outside the necklace family")
        return _other_branch(c)

    geo = necklace_geometry(c, delta)
    annulus = annulus_cohomology(N, M)
    h_U = tuple(annulus.dims)

    pi_st = make_pi_family("st", c)
    gens = [zero_mode_to_st(r.to_multivector(), geo.radius_squared) for r in annulus.representatives[1]]
    loops = annulus_loops(c, delta)
    P = period_matrix(gens, pi_st, loops)
    r = restriction_rank(gens, pi_st, loops)

    seq = mayer_vietoris_sequence(h_U=h_U, restriction_rank_1=r)
    solved = solve_exact_sequence(seq)
    dims = [solved.terms[0]["dim"], solved.terms[3]["dim"], solved.terms[6]["dim"]]
    try:
        solve_exact_sequence(mayer_vietoris_sequence(h_U=h_U, restriction_rank_1=None))
        withheld = "determined"
    except Underdetermined as exc:
        withheld = {"underdetermined": str(exc), "resolving": exc.resolving}

    # generators and their certificates
    pi_c_xy = make_pi_family("xy", c)
    pi_xy = make_pi_standard("xy")
    delta_omega = modular_field(pi_c_xy, omega_density("xy"), check=True)
    expected = Multivector(get_chart("xy"), {("y",): RatFunc.parse("x", ("x", "y")),
                                             ("x",): -RatFunc.parse("y", ("x", "y"))})
    euler = euler_field(c)
    euler_ok = schouten(pi_st.bivector, euler) == make_pi_standard("st").bivector

    evidence = {
        "annulus_report": annulus.to_json(),
        "restriction_matrix": {"rows": [str(g) for g in gens], "columns": ["lower_cap_side", "upper_cap_side"],
                               "periods": P, "rank": r, "threshold": RANK_THRESHOLD},
        "loops": {k: (str(v) if not isinstance(v, tuple) else [str(x) for x in v]) for k, v in loops.items()},
        "solved_sequence": solved.to_json(),
        "sequence_without_restriction_rank": withheld,
        "euler_primitive_check": {"E": str(euler), "[pi_c, E] == pi": euler_ok},
        "modular_field": {"value": str(delta_omega), "equals x d/dy - y d/dx": delta_omega == expected,
                          "is_cocycle": schouten(pi_c_xy.bivector, delta_omega).is_zero()},
        "pi_is_cocycle": schouten(pi_c_xy.bivector, pi_xy.bivector).is_zero(),
        "pi_locally_exact_on_annulus": annulus.extra["pi_locally_exact"],
        "notes": [
            "the primitive E of pi on the annulus does not extend: the rank-1 restriction forces dim H^2 = 2",
            "adding multiples of the modular field to cancel rotations is subsumed by the rank computation",
        ],
    }
    if c.re < 0:
        evidence["notes"].append("pi_c and pi_{-c} are isomorphic through x3 -> -x3")
    reps = [["1"], ["Delta_omega = x d/dy - y d/dx"], ["pi_c", "pi"]]
    if dims != [1, 1, 2]:
        reps = [[f"H{k} generator {j + 1}" for j in range(dims[k])] for k in range(3)]
    return CohomologyReport(
        dims, reps, {"N": N, "M": M, "delta": str(as_scalar(delta))},
        label=f"global Poisson cohomology, c = {c.pretty()}",
        provenance=["Mayer-Vietoris with U = annulus around the necklace, V = the two caps"],
        extra={"c": str(c), "branch": "necklace", "status": "COMPUTED", "geometry": geo.to_json(),
               "evidence": evidence, "assumptions": list(ASSUMPTIONS) + [
                   "de Rham dimensions of V and U n V are topological constants"]},
    )


def _other_branch(c: Scalar) -> CohomologyReport:
    if abs(c.re) > 1:
        return CohomologyReport(
            [1, 0, 1], [["1"], [], ["pi_c"]], {"source": "de Rham cohomology of S^2"},
            label=f"global Poisson cohomology, c = {c.pretty()}",
            provenance=["pi_c is symplectic for |c| > 1, so Poisson cohomology is de Rham cohomology"],
            extra={"c": str(c), "branch": "symplectic", "status": "LOOKUP", "assumptions": list(ASSUMPTIONS)},
        )
    return CohomologyReport(
        [0, 0, 0], [[], [], []], {},
        label=f"global Poisson cohomology, c = {c.pretty()}",
        provenance=["Bruhat case: computed by Ginzburg, not reproduced here"],
        extra={"c": str(c), "branch": "bruhat", "status": "SKIPPED", "dims_known": False,
               "assumptions": list(ASSUMPTIONS)},
    )


def deformation_check(c, c_prime) -> dict:
    """``pi_{c'} - pi_c`` on the ``xy`` chart as a multiple of ``pi``."""
    c, cp = _cval(c), _cval(c_prime)
    diff = make_pi_family("xy", cp).bivector - make_pi_family("xy", c).bivector
    pi = make_pi_standard("xy").bivector
    multiple = cp - c
    exact = diff == pi * multiple
    ratio = None
    if not diff.is_zero():
        q = diff.coefficient("x", "y") / pi.coefficient("x", "y")
        ratio = q.constant_value() if q.is_constant() else None
    return {
        "c": str(c),
        "c_prime": str(cp),
        "difference": diff.to_json(),
        "difference_display": str(diff),
        "multiple_of_pi": str(multiple),
        "equals_multiple_of_pi": bool(exact),
        "ratio_is_constant": diff.is_zero() or ratio is not None,
        "trivial": diff.is_zero(),
        "nontrivial_in_H2": (not diff.is_zero()) and abs(c.re) < 1 and abs(cp.re) < 1,
        "reason": "pi spans a nonzero class in H^2 for |c| < 1" if not diff.is_zero() else "zero difference",
    }
