"""
Regularized functional calculi for polynomially bounded slice functions.

A function ``f`` with growth exponent ``alpha`` is tamed by the intrinsic
regularizer ``e(s) = s^m / (1 + s^2)^m`` with ``m > alpha``; the products
``e f`` (left) and ``f e`` (right) decay and go through the contour calculus.

* left:  ``f(T) = e(T)^{-1} (e f)(T)``
* right: the closure of ``(f e)(T) e(T)^{-1}``, formed as a linear relation

``e(T)`` itself is evaluated exactly as ``T^m (I + T^2)^{-m}``; the contour
value is available as a cross-check.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import clifford as cl
from . import linalg as la
from . import relations as rl
from .calculus import (ContourSpec, _certified, default_units, omega_calc,
                       qs_inverse)
from .errors import (CertificationFailed, FlavorMismatch, NotInjective,
                     UnclassifiedGrowth)
from .functions import (Flavor, f_add, f_mul_intrinsic, f_scale, make_rational,
                        regularizer)

__all__ = [
    "RegularizerChoice", "HinftyResult", "choose_regularizer", "e_operator",
    "hinf_left", "hinf_right", "rn_operator", "poly_calc_right",
    "rational_calc_right", "hinf_linearity_check", "hinf_product_check",
    "CheckEntry",
]


@dataclass(frozen=True)
class RegularizerChoice:
    m: int
    alpha: float

    def __post_init__(self):
        if self.m < 1 or not self.m > self.alpha:
            raise ValueError(f"regularizer order {self.m} must exceed the growth exponent {self.alpha}")

    @property
    def function(self):
        return regularizer(self.m)


def choose_regularizer(f, m=None):
    """Smallest admissible order ``floor(alpha) + 1``, or validate a requested ``m``."""
    if f.growth is None:
        raise UnclassifiedGrowth(f"growth of {f.name} is unknown")
    alpha = f.growth.alpha
    if not math.isfinite(alpha):
        raise UnclassifiedGrowth(f"{f.name} is not polynomially bounded")
    if m is None or m == "auto":
        return RegularizerChoice(int(math.floor(alpha)) + 1, alpha)
    return RegularizerChoice(int(m), alpha)


@dataclass
class HinftyResult:
    relation: rl.LinearRelation
    as_operator: Optional[la.RightLinearOperator]
    provenance: dict
    discrepancy: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"provenance": self.provenance, "discrepancy": self.discrepancy,
               "relation_dim": self.relation.dim,
               "single_valued": self.as_operator is not None}
        if self.as_operator is not None:
            out["operator"] = self.as_operator.to_dict()
        else:
            out["relation"] = self.relation.to_json()
        return out


def e_operator(T, m):
    """``T^m (I + T^2)^{-m}``."""
    one = cl.ImaginaryUnit(default_units(T.n)[0].j)
    inv = qs_inverse(T, cl.paravector_slice(0.0, 1.0, one))  # (T^2 + I)^{-1}
    return la.op_compose(la.op_power(T, m), la.op_power(inv, m))


def _prepare(f, T, cfg, side):
    if f.flavor not in (side, Flavor.INTRINSIC):
        raise FlavorMismatch(f"{f.flavor.value} function used with the {side.value} calculus")
    if la.kernel_basis(T):
        raise NotInjective("the regularized calculus needs an injective operator")
    cfg = cfg or ContourSpec.for_operator(T, f)
    cert = _certified(T, cfg.phi)
    if not cert.passed:
        raise CertificationFailed(cert.reason)
    return cfg


def _provenance(choice, cfg, side):
    return {"m": choice.m, "phi": cfg.phi, "J": list(cfg.J.j), "tol": cfg.tol, "side": side.value}


def hinf_left(f, T, cfg=None, m=None, check_e=False, info=None):
    """``e(T)^{-1} (e f)(T)`` for a left or intrinsic polynomially bounded ``f``."""
    cfg = _prepare(f, T, cfg, Flavor.LEFT)
    choice = choose_regularizer(f, m)
    e = choice.function
    ef = f_mul_intrinsic(f, e, order="GF")
    efT = omega_calc(ef, T, cfg, side="left")
    eT = e_operator(T, choice.m)
    if info is not None:
        info["provenance"] = _provenance(choice, cfg, Flavor.LEFT)
        if check_e:
            info["e_quadrature"] = la.op_norm(omega_calc(e, T, cfg, side="left") - eT)
    return la.op_compose(la.op_inverse(eT), efT)


def hinf_right(f, T, cfg=None, m=None, check_e=False):
    """Closure of ``(f e)(T) e(T)^{-1}`` as a relation, for right or intrinsic ``f``."""
    cfg = _prepare(f, T, cfg, Flavor.RIGHT)
    choice = choose_regularizer(f, m)
    e = choice.function
    fe = f_mul_intrinsic(f, e, order="FG")
    feT = omega_calc(fe, T, cfg, side="right")
    eT = e_operator(T, choice.m)
    rel = rl.rel_closure(rl.rel_compose(rl.rel_from_operator(feT),
                                        rl.rel_inverse(rl.rel_from_operator(eT))))
    op = None
    if rl.rel_is_operator(rel) and rl.rel_domain(rel).shape[1] == T.dim:
        op = rl.rel_to_operator(rel, check=False)
    disc = {}
    if check_e:
        disc["e_quadrature"] = la.op_norm(omega_calc(e, T, cfg, side="right") - eT)
    return HinftyResult(rel, op, _provenance(choice, cfg, Flavor.RIGHT), disc)


def rn_operator(T, k):
    """``k^2 T^2 (T^2 + k^2)^{-1} (T^2 + k^{-2})^{-1}``."""
    if k <= 0:
        raise ValueError("index must be positive")
    J = default_units(T.n)[0]
    a = qs_inverse(T, cl.paravector_slice(0.0, float(k), J))
    b = qs_inverse(T, cl.paravector_slice(0.0, 1.0 / k, J))
    # T^2 (T^2 + k^-2)^{-1} = I - k^-2 (T^2 + k^-2)^{-1} avoids multiplying T^2 by a huge inverse
    return a * float(k) ** 2 - la.op_compose(a, b)


def _poly_rows(p, n):
    if hasattr(p, "symbolic"):
        if p.symbolic is None or not p.symbolic.is_polynomial:
            raise ValueError("expected a polynomial slice function")
        if p.flavor is Flavor.LEFT:
            raise FlavorMismatch("only right polynomials have a right linear calculus")
        return p.symbolic.promote(n).num
    rows = np.zeros((len(p), 2 ** n))
    for k, c in enumerate(p):
        rows[k] = cl.as_element(c, n).coeffs
    return rows


def poly_calc_right(p, T):
    """``sum_k p_k T^k`` with coefficients acting from the left."""
    rows = _poly_rows(p, T.n)
    out = la.RightLinearOperator.zeros(T.n, T.d)
    Tk = la.RightLinearOperator.identity(T.n, T.d)
    for k, row in enumerate(rows):
        if k:
            Tk = la.op_compose(T, Tk)
        if np.any(row):
            out = la.op_add(out, la.op_scale_left(cl.CliffordElement(T.n, row), Tk))
    return out


def rational_calc_right(p, q, T, cfg=None, m=None):
    """``p q^{-1}`` through the right H-infinity calculus and through ``p[T] q[T]^{-1}``."""
    theta = cfg.sector.theta if cfg is not None else None
    f = make_rational(p, q, theta=theta)
    cfg = cfg or ContourSpec.for_operator(T, f)
    res = hinf_right(f, T, cfg, m)
    direct = rl.rel_closure(rl.rel_compose(rl.rel_from_operator(poly_calc_right(p, T)),
                                           rl.rel_inverse(rl.rel_from_operator(poly_calc_right(q, T)))))
    res.discrepancy["relation_distance"] = rl.rel_distance(res.relation, direct)
    if res.as_operator is not None and rl.rel_is_operator(direct):
        res.discrepancy["operator_norm"] = la.op_norm(res.as_operator - rl.rel_to_operator(direct, check=False))
    return res


@dataclass
class CheckEntry:
    statement: str
    kind: str  # "equality" or "containment"
    value: float

    def to_dict(self):
        return {"statement": self.statement, "kind": self.kind, "value": self.value}


def _graph(op):
    return rl.rel_from_operator(op)


def hinf_linearity_check(f, g, a, T, cfg=None, side=None):
    """Additivity against a decaying ``g`` and scaling by the Clifford number ``a``.

    Right functions are scaled from the left and left functions from the right.
    """
    side = Flavor(side) if isinstance(side, str) else side
    if side is None:
        side = Flavor.LEFT if Flavor.LEFT in (f.flavor, g.flavor) else Flavor.RIGHT
    a = cl.as_element(a, T.n)
    cfg = cfg or ContourSpec.for_operator(T, f)
    entries = []
    if side is Flavor.RIGHT:
        F = hinf_right(f, T, cfg).relation
        G = _graph(omega_calc(g, T, cfg, side="right"))
        FG = hinf_right(f_add(f, g), T, cfg).relation
        entries.append(CheckEntry("sum", "equality", rl.rel_distance(FG, rl.rel_sum(F, G))))
        aF = hinf_right(f_scale(a, f, side="left"), T, cfg).relation
        entries.append(CheckEntry("scale", "equality", rl.rel_distance(aF, rl.rel_scale_left(a, F))))
    else:
        F = hinf_left(f, T, cfg)
        G = omega_calc(g, T, cfg, side="left")
        FG = hinf_left(f_add(f, g), T, cfg)
        entries.append(CheckEntry("sum", "equality", rl.rel_distance(_graph(FG), rl.rel_sum(_graph(F), _graph(G)))))
        Fa = hinf_left(f_scale(a, f, side="right"), T, cfg)
        entries.append(CheckEntry("scale", "equality",
                                  rl.rel_distance(_graph(Fa), _graph(la.op_scale_right(F, a)))))
    return entries


def hinf_product_check(f, g, T, cfg=None):
    """Every product rule applicable to ``(f, g)``; ``g`` or ``f`` must be intrinsic.

    Equalities report the projector distance of the two graphs.  Inclusions
    report the sine of the largest principal angle of the smaller relation
    against the larger one.
    """
    cfg = cfg or ContourSpec.for_operator(T, f)
    entries = []
    f_int, g_int = f.flavor is Flavor.INTRINSIC, g.flavor is Flavor.INTRINSIC
    f_dec, g_dec = f.growth.decaying, g.growth.decaying

    if f_int and g.flavor in (Flavor.LEFT, Flavor.INTRINSIC) and (f_dec or g_dec):
        prod = hinf_left(f_mul_intrinsic(g, f, order="GF"), T, cfg)
        rhs = rl.rel_compose(_graph(hinf_left(f, T, cfg)), _graph(hinf_left(g, T, cfg)))
        if f_dec:
            # (fg)(T) contains f(T) g(T)
            entries.append(CheckEntry("left-decaying-intrinsic-factor", "containment",
                                      rl.containment_angle(_graph(prod), rhs)))
        if g_dec:
            entries.append(CheckEntry("left-decaying-second-factor", "equality",
                                      rl.rel_distance(_graph(prod), rhs)))

    if g_int and f.flavor in (Flavor.RIGHT, Flavor.INTRINSIC) and (f_dec or g_dec):
        prod = hinf_right(f_mul_intrinsic(f, g, order="FG"), T, cfg).relation
        rhs = rl.rel_closure(rl.rel_compose(hinf_right(f, T, cfg).relation,
                                            hinf_right(g, T, cfg).relation))
        if f_dec:
            entries.append(CheckEntry("right-decaying-first-factor", "equality",
                                      rl.rel_distance(prod, rhs)))
        if g_dec:
            # (fg)(T) is contained in f(T) g(T)
            entries.append(CheckEntry("right-decaying-intrinsic-factor", "containment",
                                      rl.containment_angle(rhs, prod)))
    return entries
