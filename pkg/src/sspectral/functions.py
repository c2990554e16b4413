"""
Slice hyperholomorphic functions represented through their stems.

A function is carried as a pair of stems ``f0(x, y)``, ``f1(x, y)`` with values
in ``R_n`` (or in ``R`` for intrinsic functions) and evaluated as

* left / intrinsic: ``f(x + J y) = f0(x, y) + J f1(x, y)``
* right:            ``f(x + J y) = f0(x, y) + f1(x, y) J``

Stems take broadcastable float arrays ``x, y`` and return arrays of shape
``x.shape + (k,)`` where ``k`` is ``2**n`` for Clifford-valued stems and 1 for
real-valued ones.

Growth is tracked as a pair of exponents, ``|f(s)| <~ |s|**at_zero`` near the
origin and ``|f(s)| <~ |s|**at_infinity`` at infinity.  A function decays when
it vanishes at both ends, otherwise it is polynomially bounded with exponent
``alpha = max(0, at_infinity, -at_zero)``.

Polynomials and intrinsic-denominator rationals keep an exact
:class:`RationalForm` so the operator calculus can cross-check quadrature
results against plain matrix algebra.
"""

import enum
import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import clifford as cl
from .errors import DomainError, FlavorMismatch, UnclassifiedGrowth, ZeroInSector

__all__ = [
    "Flavor", "Growth", "RationalForm", "SliceFunction", "slice_eval",
    "evaluate_on_slice", "make_polynomial", "make_rational", "regularizer",
    "f_mul_intrinsic", "f_add", "f_scale", "exact_eval",
    "validate_slice_function", "ValidationReport", "parse_function_id",
    "identity_function", "sector_grid",
]


class Flavor(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    INTRINSIC = "intrinsic"


@dataclass(frozen=True)
class Growth:
    at_zero: float
    at_infinity: float

    @classmethod
    def poly(cls, alpha):
        return cls(-float(alpha), float(alpha))

    @classmethod
    def decay(cls, rate=1.0):
        return cls(float(rate), -float(rate))

    @property
    def decaying(self):
        return self.at_zero > 0 and self.at_infinity < 0

    @property
    def alpha(self):
        if self.decaying:
            return 0.0
        return float(max(0.0, self.at_infinity, -self.at_zero))

    @property
    def kind(self):
        return "Decaying" if self.decaying else "PolyBounded"

    def __mul__(self, other):
        return Growth(self.at_zero + other.at_zero, self.at_infinity + other.at_infinity)

    def combine_sum(self, other):
        return Growth(min(self.at_zero, other.at_zero),
                      max(self.at_infinity, other.at_infinity))

    def to_dict(self):
        return {"class": self.kind, "alpha": self.alpha,
                "at_zero": self.at_zero, "at_infinity": self.at_infinity}


def _trim(c, axis_len_tol=0.0):
    c = np.asarray(c, dtype=float)
    while c.shape[0] > 1 and np.all(np.abs(c[-1]) <= axis_len_tol):
        c = c[:-1]
    return c


def _valuation(c):
    nz = [k for k in range(c.shape[0]) if np.any(c[k] != 0)]
    return nz[0] if nz else math.inf


@dataclass(frozen=True)
class RationalForm:
    """Exact form ``p q^{-1}`` (right) or ``q^{-1} p`` (left).

    ``num[k]`` is the coefficient of ``s**k`` as a coefficient array of length
    ``2**n`` (or 1 for real numerators); ``den`` holds the real coefficients of
    the intrinsic denominator in ascending order.
    """

    num: np.ndarray
    den: np.ndarray
    side: Flavor

    def __post_init__(self):
        num = _trim(np.atleast_2d(np.asarray(self.num, dtype=float)))
        den = _trim(np.asarray(self.den, dtype=float).reshape(-1))
        if not np.any(den != 0):
            raise ZeroDivisionError("zero denominator")
        num.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def width(self):
        return self.num.shape[1]

    @property
    def n(self):
        return None if self.width == 1 else int(round(math.log2(self.width)))

    @property
    def is_real(self):
        return self.width == 1 or not np.any(self.num[:, 1:])

    @property
    def is_polynomial(self):
        return self.den.size == 1

    def growth(self):
        vp = _valuation(self.num)
        if vp == math.inf:
            return Growth(math.inf, -math.inf)
        vq = _valuation(self.den[:, None])
        return Growth(float(vp - vq), float((self.num.shape[0] - 1) - (self.den.size - 1)))

    def promote(self, n):
        if self.width == 2 ** n:
            return self
        if self.width != 1:
            raise ValueError(f"cannot promote R_{self.n} coefficients to R_{n}")
        num = np.zeros((self.num.shape[0], 2 ** n))
        num[:, 0] = self.num[:, 0]
        return RationalForm(num, self.den, self.side)

    def stem(self, x, y):
        z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
        c = _power_ratio(z, self.num.shape[0], self.den)
        return c.real @ self.num, c.imag @ self.num


def _power_ratio(z, K, den):
    """Stable ``z**k / q(z)`` for ``k < K`` (shape ``z.shape + (K,)``)."""
    D = den.size - 1
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (K,), dtype=complex)
    big = np.abs(z) > 1.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ks = np.arange(K)
        zs = z[~big]
        q_small = np.polyval(den[::-1], zs)
        out[~big] = zs[..., None] ** ks / q_small[..., None]
        w = 1.0 / z[big]
        q_rev = np.polyval(den, w)  # sum_j den_j w**(D-j)
        out[big] = w[..., None] ** (D - ks) / q_rev[..., None]
    return out


@dataclass(frozen=True)
class SliceFunction:
    stem: Callable
    flavor: Flavor
    growth: Optional[Growth]
    n: Optional[int] = None
    symbolic: Optional[RationalForm] = None
    domain_angle: Optional[float] = None
    name: str = "f"
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, s):
        return slice_eval(self, s)

    def stems(self, x, y, n=None):
        """Evaluate the stems, promoted to ``R_n`` when ``n`` is given."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        f0, f1 = self.stem(x, y)
        f0 = _as_stem_array(f0, x.shape)
        f1 = _as_stem_array(f1, x.shape)
        if n is not None:
            f0, f1 = _promote(f0, n), _promote(f1, n)
        return f0, f1

    def in_domain(self, s):
        if self.domain_angle is None:
            return True
        s = cl.as_paravector(s)
        return abs(s) == 0.0 or s.phase() < self.domain_angle

    def describe(self):
        out = {"name": self.name, "flavor": self.flavor.value,
               "growth": self.growth.to_dict() if self.growth else None,
               "domain_angle": self.domain_angle}
        return out


def _as_stem_array(v, shape):
    if isinstance(v, cl.CliffordElement):
        v = v.coeffs
    v = np.asarray(v, dtype=float)
    if v.shape == shape:
        v = v[..., None]
    return np.broadcast_to(v, shape + (v.shape[-1],))


def _promote(v, n):
    if v.shape[-1] == 2 ** n:
        return v
    if v.shape[-1] != 1:
        raise ValueError(f"stem values of width {v.shape[-1]} cannot live in R_{n}")
    out = np.zeros(v.shape[:-1] + (2 ** n,))
    out[..., 0] = v[..., 0]
    return out


def _common_n(*fs):
    ns = {f.n for f in fs if f.n is not None}
    if len(ns) > 1:
        raise ValueError(f"functions live in different algebras: {sorted(ns)}")
    return ns.pop() if ns else None


def _from_form(form, flavor, name, domain_angle=None):
    return SliceFunction(stem=form.stem, flavor=flavor, growth=form.growth(),
                         n=form.n, symbolic=form, domain_angle=domain_angle, name=name)


def evaluate_on_slice(f, x, y, J):
    """Vectorized ``f(x + J y)`` for signed ``y``; returns coefficients ``(..., 2**n)``."""
    n = J.n
    if f.n is not None and f.n != n:
        raise ValueError(f"function lives in R_{f.n}, slice unit in R_{n}")
    f0, f1 = f.stems(x, y, n)
    Jc = J.element.coeffs
    if f.flavor is Flavor.RIGHT:
        return f0 + cl.mul_coeffs(f1, Jc, n)
    return f0 + cl.mul_coeffs(Jc, f1, n)


def slice_eval(f, s):
    """``f(s)`` for a paravector ``s`` (or a real number when ``f`` is real)."""
    if np.isscalar(s):
        if not f.in_domain(cl.Paravector(s, (0.0,))):
            raise DomainError(f"{f.name}: {s} is outside the double sector")
        n = f.n or 1
        f0, _ = f.stems(float(s), 0.0, n)
        return cl.CliffordElement(n, f0)
    s = cl.as_paravector(s)
    if not f.in_domain(s):
        raise DomainError(f"{f.name}: s is outside the double sector of angle {f.domain_angle}")
    x, y, J = s.split()
    return cl.CliffordElement(s.n, evaluate_on_slice(f, x, y, J))


def identity_function():
    return make_polynomial([0.0, 1.0])


def _coeff_rows(coeffs):
    els = []
    n = None
    for c in coeffs:
        if isinstance(c, (cl.CliffordElement, cl.Paravector, cl.ImaginaryUnit)):
            e = cl.as_element(c)
            if n is not None and e.n != n:
                raise ValueError("coefficients from different algebras")
            n = e.n
            els.append(e)
        else:
            els.append(float(c))
    real = all(not isinstance(e, cl.CliffordElement) or not np.any(e.coeffs[1:]) for e in els)
    if real:
        return np.array([[e.coeffs[0] if isinstance(e, cl.CliffordElement) else e] for e in els])
    rows = np.zeros((len(els), 2 ** n))
    for k, e in enumerate(els):
        if isinstance(e, cl.CliffordElement):
            rows[k] = e.coeffs
        else:
            rows[k, 0] = e
    return rows


def make_polynomial(coeffs, side="right", name=None):
    """``sum_k p_k s**k`` (side ``right``) or ``sum_k s**k p_k`` (side ``left``).

    Real coefficients give an intrinsic function.  The growth exponent is the
    degree at infinity and minus the valuation at zero.
    """
    side = Flavor(side) if not isinstance(side, Flavor) else side
    if side is Flavor.INTRINSIC:
        side = Flavor.RIGHT
    rows = _coeff_rows(coeffs)
    form = RationalForm(rows, [1.0], side)
    flavor = Flavor.INTRINSIC if form.is_real else side
    if form.is_real:
        form = RationalForm(form.num[:, :1], form.den, side)
    return _from_form(form, flavor, name or "poly")


def _root_phases(den):
    roots = np.roots(den[::-1]) if den.size > 1 else np.array([])
    return [float(math.atan2(abs(r.imag), abs(r.real))) if abs(r) > 0 else 0.0 for r in roots], roots


def make_rational(p, q, theta=None, name=None):
    """``p q^{-1}`` with ``p`` a polynomial and ``q`` an intrinsic polynomial.

    ``q`` must not vanish in the closed double sector of angle ``theta``; when
    ``theta`` is omitted the largest admissible sector is used and the origin
    and the real axis must be free of zeros.
    """
    if p.symbolic is None or not p.symbolic.is_polynomial:
        raise ValueError("numerator must be a polynomial built by make_polynomial")
    if q.symbolic is None or not q.symbolic.is_polynomial or q.flavor is not Flavor.INTRINSIC:
        raise ValueError("denominator must be an intrinsic polynomial")
    den = q.symbolic.num[:, 0]
    phases, roots = _root_phases(den)
    min_phase = min(phases) if phases else math.pi / 2
    if any(abs(r) == 0 for r in roots):
        raise ZeroInSector("denominator vanishes at the origin")
    if theta is not None and min_phase <= theta:
        raise ZeroInSector(
            f"denominator has a zero sphere of phase {min_phase:.6g} inside the closed sector {theta:.6g}")
    if theta is None and min_phase == 0.0:
        raise ZeroInSector("denominator has a real zero")
    domain = float(theta) if theta is not None else min(min_phase, math.pi / 2)
    form = RationalForm(p.symbolic.num, np.convolve(p.symbolic.den, den), p.symbolic.side)
    flavor = Flavor.INTRINSIC if p.flavor is Flavor.INTRINSIC else p.flavor
    return _from_form(form, flavor, name or f"({p.name})/({q.name})", domain_angle=domain)


def regularizer(m):
    """``s**m / (1 + s**2)**m``: intrinsic and decaying on every double sector."""
    if int(m) != m or m < 1:
        raise ValueError("regularizer order must be a positive integer")
    m = int(m)
    num = [0.0] * m + [1.0]
    den = np.array([1.0])
    for _ in range(m):
        den = np.convolve(den, [1.0, 0.0, 1.0])
    f = make_rational(make_polynomial(num), make_polynomial(list(den)), name=f"reg{m}")
    return replace(f, meta={"regularizer": m})


def _stem_product(f, g):
    # g is real-valued: complex-like multiplication of stem pairs
    def stem(x, y):
        f0, f1 = f.stems(x, y)
        g0, g1 = g.stems(x, y)
        return f0 * g0 - f1 * g1, f0 * g1 + f1 * g0
    return stem


def f_mul_intrinsic(f, g, order="FG"):
    """Pointwise product of ``f`` with an intrinsic ``g``.

    ``order`` is ``"FG"`` for ``f g`` (keeps right functions right) or ``"GF"``
    for ``g f`` (keeps left functions left).
    """
    if g.flavor is not Flavor.INTRINSIC:
        raise FlavorMismatch("second factor must be intrinsic")
    order = order.upper()
    if order not in ("FG", "GF"):
        raise ValueError("order must be 'FG' or 'GF'")
    if f.flavor is Flavor.LEFT and order != "GF":
        raise FlavorMismatch("a left function must be multiplied by intrinsic functions from the left")
    if f.flavor is Flavor.RIGHT and order != "FG":
        raise FlavorMismatch("a right function must be multiplied by intrinsic functions from the right")
    growth = f.growth * g.growth if (f.growth and g.growth) else None
    symbolic = None
    if f.symbolic is not None and g.symbolic is not None:
        gnum = g.symbolic.num[:, 0]
        num = np.stack([np.convolve(f.symbolic.num[:, k], gnum)
                        for k in range(f.symbolic.width)], axis=1)
        den = np.convolve(f.symbolic.den, g.symbolic.den)
        symbolic = RationalForm(num, den, f.symbolic.side)
        growth = symbolic.growth()
    angles = [a for a in (f.domain_angle, g.domain_angle) if a is not None]
    name = f"{f.name}*{g.name}" if order == "FG" else f"{g.name}*{f.name}"
    return SliceFunction(stem=symbolic.stem if symbolic else _stem_product(f, g),
                         flavor=f.flavor, growth=growth, n=f.n, symbolic=symbolic,
                         domain_angle=min(angles) if angles else None, name=name)


def f_add(f, g):
    if {f.flavor, g.flavor} == {Flavor.LEFT, Flavor.RIGHT}:
        raise FlavorMismatch("cannot add a left and a right slice function")
    flavor = f.flavor if f.flavor is not Flavor.INTRINSIC else g.flavor
    n = _common_n(f, g)
    growth = f.growth.combine_sum(g.growth) if (f.growth and g.growth) else None
    symbolic = None
    if f.symbolic is not None and g.symbolic is not None:
        a, b = f.symbolic, g.symbolic
        if n is not None:
            a, b = a.promote(n), b.promote(n)
        if a.den.size == b.den.size and np.array_equal(a.den, b.den):
            num1, num2, den = a.num, b.num, a.den
        else:
            num1 = np.stack([np.convolve(a.num[:, k], b.den) for k in range(a.width)], axis=1)
            num2 = np.stack([np.convolve(b.num[:, k], a.den) for k in range(b.width)], axis=1)
            den = np.convolve(a.den, b.den)
        K = max(num1.shape[0], num2.shape[0])
        num = np.zeros((K, num1.shape[1]))
        num[:num1.shape[0]] += num1
        num[:num2.shape[0]] += num2
        side = flavor if flavor is not Flavor.INTRINSIC else Flavor.RIGHT
        symbolic = RationalForm(num, den, side)
        if symbolic.is_real:
            symbolic = RationalForm(symbolic.num[:, :1], symbolic.den, side)

    def stem(x, y):
        f0, f1 = f.stems(x, y, n)
        g0, g1 = g.stems(x, y, n)
        return f0 + g0, f1 + g1

    angles = [a for a in (f.domain_angle, g.domain_angle) if a is not None]
    return SliceFunction(stem=symbolic.stem if symbolic else stem, flavor=flavor,
                         growth=growth, n=symbolic.n if symbolic else n, symbolic=symbolic,
                         domain_angle=min(angles) if angles else None,
                         name=f"{f.name}+{g.name}")


def f_scale(a, f, side="left"):
    """``a f`` (side ``left``, for right/intrinsic ``f``) or ``f a`` (side ``right``)."""
    side = side.value if isinstance(side, Flavor) else side
    if isinstance(a, (int, float, np.floating)):
        a = cl.CliffordElement.scalar(f.n or 1, float(a))
    a = cl.as_element(a)
    n = a.n
    if f.n is not None and f.n != n:
        raise ValueError(f"scalar in R_{n}, function in R_{f.n}")
    real = not np.any(a.coeffs[1:])
    if side == "left":
        if f.flavor is Flavor.LEFT and not real:
            raise FlavorMismatch("left slice functions only admit scalars from the right")
        flavor = f.flavor if real else Flavor.RIGHT
        mul = lambda v: cl.mul_coeffs(a.coeffs, v, n)  # noqa: E731
    elif side == "right":
        if f.flavor is Flavor.RIGHT and not real:
            raise FlavorMismatch("right slice functions only admit scalars from the left")
        flavor = f.flavor if real else Flavor.LEFT
        mul = lambda v: cl.mul_coeffs(v, a.coeffs, n)  # noqa: E731
    else:
        raise ValueError("side must be 'left' or 'right'")

    def stem(x, y):
        f0, f1 = f.stems(x, y, n)
        return mul(f0), mul(f1)

    symbolic = None
    if f.symbolic is not None:
        form = f.symbolic.promote(n)
        symbolic = RationalForm(mul(form.num), form.den,
                                flavor if flavor is not Flavor.INTRINSIC else form.side)
    return SliceFunction(stem=symbolic.stem if symbolic else stem, flavor=flavor,
                         growth=f.growth, n=n, symbolic=symbolic,
                         domain_angle=f.domain_angle, name=f"{a}*{f.name}" if side == "left" else f"{f.name}*{a}")


def exact_eval(form, s):
    """Evaluate a :class:`RationalForm` at ``s`` with Clifford products only."""
    s = cl.as_element(s)
    n = s.n
    form = form.promote(n)
    one = cl.CliffordElement.scalar(n, 1.0)
    K = max(form.num.shape[0], form.den.size)
    powers = [one]
    for _ in range(K):
        powers.append(powers[-1] * s)
    p = cl.CliffordElement(n)
    for k, c in enumerate(form.num):
        ck = cl.CliffordElement(n, c)
        p = p + (ck * powers[k] if form.side is Flavor.RIGHT else powers[k] * ck)
    q = cl.CliffordElement(n)
    for j, c in enumerate(form.den):
        q = q + powers[j] * float(c)
    qinv = q.inverse()
    return p * qinv if form.side is Flavor.RIGHT else qinv * p


def sector_grid(theta, count=20, rmin=1e-2, rmax=1e2):
    """Log-polar ``(x, y)`` sample points of the open double sector ``D_theta``."""
    r = np.logspace(math.log10(rmin), math.log10(rmax), count)
    right = count - count // 2
    ang = np.concatenate([np.linspace(-theta, theta, right + 2)[1:-1],
                          math.pi + np.linspace(-theta, theta, count // 2 + 2)[1:-1]])
    R, A = np.meshgrid(r, ang, indexing="ij")
    return R * np.cos(A), R * np.sin(A)


@dataclass
class ValidationReport:
    compatibility: float
    cauchy_riemann: float
    intrinsic: float
    decay_ok: Optional[bool]
    passed: bool

    def to_dict(self):
        return dict(self.__dict__)


def validate_slice_function(f, count=20, h_rel=1e-5, compat_tol=1e-10, cr_tol=1e-6):
    """Sample the defining conditions on a ``count x count`` log-polar grid."""
    theta = f.domain_angle if f.domain_angle is not None else 1.2
    theta = min(theta, math.pi / 2) * 0.98
    x, y = sector_grid(theta, count)
    f0p, f1p = f.stems(x, y)
    f0m, f1m = f.stems(x, -y)
    scale = np.maximum(1.0, np.max(np.abs(np.concatenate([f0p, f1p], -1)), axis=-1))
    compat = float(np.max((np.max(np.abs(f0p - f0m), -1) + np.max(np.abs(f1p + f1m), -1)) / scale))

    r = np.hypot(x, y)
    h = h_rel * np.maximum(r, 1e-300)
    fx0a, fx1a = f.stems(x + h, y)
    fx0b, fx1b = f.stems(x - h, y)
    fy0a, fy1a = f.stems(x, y + h)
    fy0b, fy1b = f.stems(x, y - h)
    hh = (2 * h)[..., None]
    d0x, d1x = (fx0a - fx0b) / hh, (fx1a - fx1b) / hh
    d0y, d1y = (fy0a - fy0b) / hh, (fy1a - fy1b) / hh
    dscale = np.maximum(1.0, scale / r)[..., None]
    cr = float(max(np.max(np.abs(d0x - d1y) / dscale), np.max(np.abs(d0y + d1x) / dscale)))

    intrinsic = 0.0
    if f.flavor is Flavor.INTRINSIC and f0p.shape[-1] > 1:
        intrinsic = float(np.max(np.abs(np.concatenate([f0p[..., 1:], f1p[..., 1:]], -1))))

    decay_ok = None
    if f.growth is not None and f.growth.decaying:
        rr = np.logspace(-8, 8, 161)
        vals = []
        for a in (theta * 0.5, -theta * 0.5, math.pi - theta * 0.5):
            g0, g1 = f.stems(rr * math.cos(a), rr * math.sin(a))
            vals.append(np.sqrt(np.sum(g0 ** 2, -1) + np.sum(g1 ** 2, -1)))
        vals = np.array(vals)
        top = float(np.max(vals))
        integral = float(np.max(np.trapezoid(vals, np.log(rr), axis=-1)))
        decay_ok = bool(np.isfinite(top) and np.isfinite(integral)
                        and np.all(vals[:, [0, -1]] <= 1e-4 * max(top, 1e-300)))
    passed = compat <= compat_tol and cr <= cr_tol and intrinsic <= compat_tol and decay_ok is not False
    return ValidationReport(compat, cr, intrinsic, decay_ok, passed)


_LIST = re.compile(r"\[([^\]]*)\]")


def _parse_list(text, n):
    m = _LIST.fullmatch(text.strip())
    if not m:
        raise ValueError(f"expected a bracketed coefficient list, got {text!r}")
    body = m.group(1).strip()
    if not body:
        raise ValueError("empty coefficient list")
    return [cl.parse_clifford(tok, n) for tok in body.split(",")]


def parse_function_id(ident, n):
    """Builtin functions by identifier.

    * ``poly:[c0, c1, ...]:left|right`` with Clifford literals such as ``2*e1``
    * ``rat:[p0, p1, ...]/[q0, q1, ...]`` (numerator right polynomial, real
      denominator), optionally suffixed ``:left``
    * ``reg:m``
    """
    kind, _, rest = ident.partition(":")
    kind = kind.strip().lower()
    if kind == "reg":
        return regularizer(int(rest))
    if kind == "poly":
        body, _, side = rest.rpartition(":")
        if not body:
            body, side = rest, "right"
        side = side.strip().lower()
        if side not in ("left", "right"):
            raise ValueError(f"polynomial side must be left or right, got {side!r}")
        return make_polynomial(_parse_list(body, n), side, name=ident)
    if kind == "rat":
        side = "right"
        body = rest
        if rest.rstrip().endswith((":left", ":right")):
            body, _, side = rest.rpartition(":")
        p_text, sep, q_text = body.partition("/")
        if not sep:
            raise ValueError("rational identifiers need the form rat:[p...]/[q...]")
        p = make_polynomial(_parse_list(p_text, n), side.strip())
        q_coeffs = _parse_list(q_text, n)
        if any(np.any(c.coeffs[1:]) for c in q_coeffs):
            raise ValueError("denominator coefficients must be real")
        q = make_polynomial([c.coeffs[0] for c in q_coeffs])
        return make_rational(p, q, name=ident)
    raise ValueError(f"unknown function identifier {ident!r}")
