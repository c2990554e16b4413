"""
Real Clifford algebra ``R_n`` with ``e_i**2 = -1``.

Elements are stored as dense coefficient vectors of length ``2**n``.  Basis
blades ``e_A`` are indexed by subsets ``A`` of ``{1..n}`` sorted first by size
and then lexicographically, so index 0 is the scalar part and indices
``1..n`` are the imaginary units ``e_1..e_n``.

All products go through a structure tensor ``M`` with
``e_i e_j = sum_k M[i, j, k] e_k`` which is built once per ``n``.
"""

import functools
import itertools
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

MAX_N = 5

__all__ = [
    "MAX_N", "basis", "blade_index", "structure_tensor", "left_matrix",
    "right_matrix", "mul_coeffs", "conj_signs", "CliffordElement",
    "Paravector", "ImaginaryUnit", "SpectralSphere", "clifford_mul",
    "clifford_conjugate", "clifford_abs", "paravector_slice", "sphere_of",
    "sample_sphere", "basis_element", "as_element", "as_paravector",
    "parse_clifford", "random_unit",
]


@functools.lru_cache(maxsize=None)
def basis(n):
    """Canonical list of blades of ``R_n`` as sorted index tuples."""
    _check_n(n)
    blades = []
    for k in range(n + 1):
        blades.extend(itertools.combinations(range(1, n + 1), k))
    return tuple(blades)


@functools.lru_cache(maxsize=None)
def _blade_lookup(n):
    return {b: i for i, b in enumerate(basis(n))}


def blade_index(n, blade):
    return _blade_lookup(n)[tuple(blade)]


def _blade_product(a, b):
    # sign and resulting blade of e_a e_b
    seq = list(a) + list(b)
    sign = 1
    # bubble sort: every swap of two distinct units flips the sign
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    out = []
    i = 0
    while i < len(seq):
        if i + 1 < len(seq) and seq[i] == seq[i + 1]:
            sign = -sign  # e_i e_i = -1
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return sign, tuple(out)


@functools.lru_cache(maxsize=None)
def structure_tensor(n):
    """Array ``M`` of shape ``(2**n,)*3`` with ``e_i e_j = sum_k M[i,j,k] e_k``."""
    blades = basis(n)
    lookup = _blade_lookup(n)
    dim = len(blades)
    M = np.zeros((dim, dim, dim))
    for i, a in enumerate(blades):
        for j, b in enumerate(blades):
            sign, c = _blade_product(a, b)
            M[i, j, lookup[c]] = sign
    M.setflags(write=False)
    return M


@functools.lru_cache(maxsize=None)
def conj_signs(n):
    signs = np.array([(-1) ** (len(b) * (len(b) + 1) // 2) for b in basis(n)],
                     dtype=float)
    signs.setflags(write=False)
    return signs


def left_matrix(coeffs, n):
    """Real matrix of ``x -> a x`` in the canonical basis.

    ``coeffs`` may carry leading batch axes; the matrix axes are appended.
    """
    return np.einsum("...i,ijk->...kj", coeffs, structure_tensor(n))


def right_matrix(coeffs, n):
    """Real matrix of ``x -> x a`` in the canonical basis."""
    return np.einsum("...j,ijk->...ki", coeffs, structure_tensor(n))


def mul_coeffs(a, b, n):
    """Batched Clifford product of coefficient arrays (broadcast over leading axes)."""
    return np.einsum("...i,...j,ijk->...k", a, b, structure_tensor(n))


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_N:
        raise ValueError(f"algebra dimension must be an integer in [1, {MAX_N}], got {n!r}")


class CliffordElement:
    """Element of ``R_n`` given by its ``2**n`` real coefficients."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs=None):
        _check_n(n)
        dim = 2 ** n
        if coeffs is None:
            arr = np.zeros(dim)
        else:
            arr = np.array(coeffs, dtype=float).reshape(-1)
            if arr.shape != (dim,):
                raise DimensionMismatch(
                    f"R_{n} needs {dim} coefficients, got {arr.size}")
        arr.setflags(write=False)
        self.n = int(n)
        self.coeffs = arr

    @classmethod
    def scalar(cls, n, value):
        c = np.zeros(2 ** n)
        c[0] = value
        return cls(n, c)

    @property
    def scalar_part(self):
        return float(self.coeffs[0])

    def is_paravector(self, tol=0.0):
        return bool(np.all(np.abs(self.coeffs[self.n + 1:]) <= tol))

    def _coerce(self, other):
        if isinstance(other, CliffordElement):
            if other.n != self.n:
                raise DimensionMismatch(f"R_{self.n} vs R_{other.n}")
            return other
        if isinstance(other, Paravector):
            return self._coerce(other.element)
        if np.isscalar(other):
            return CliffordElement.scalar(self.n, float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CliffordElement(self.n, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CliffordElement(self.n, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CliffordElement(self.n, other.coeffs - self.coeffs)

    def __neg__(self):
        return CliffordElement(self.n, -self.coeffs)

    def __mul__(self, other):
        if np.isscalar(other):
            return CliffordElement(self.n, self.coeffs * float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return clifford_mul(self, other)

    def __rmul__(self, other):
        if np.isscalar(other):
            return CliffordElement(self.n, self.coeffs * float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return clifford_mul(other, self)

    def __truediv__(self, other):
        if np.isscalar(other):
            return CliffordElement(self.n, self.coeffs / float(other))
        return NotImplemented

    def __abs__(self):
        return clifford_abs(self)

    def conj(self):
        return clifford_conjugate(self)

    def inverse(self):
        """Two-sided inverse through the left-regular representation."""
        L = left_matrix(self.coeffs, self.n)
        e0 = np.zeros(2 ** self.n)
        e0[0] = 1.0
        return CliffordElement(self.n, np.linalg.solve(L, e0))

    def allclose(self, other, atol=1e-12, rtol=1e-12):
        other = self._coerce(other)
        return bool(np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=rtol))

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.n, self.coeffs.tobytes()))

    def to_dict(self):
        return {"n": self.n, "coeffs": [float(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["n"]), data["coeffs"])

    def __repr__(self):
        return f"CliffordElement({self.n}, {format_element(self)!r})"

    def __str__(self):
        return format_element(self)


def format_element(a, digits=12):
    terms = []
    for c, blade in zip(a.coeffs, basis(a.n)):
        if c == 0:
            continue
        num = f"{c:.{digits}g}"
        terms.append(num if not blade else f"{num}*e{''.join(map(str, blade))}")
    if not terms:
        return "0"
    return " + ".join(terms).replace("+ -", "- ")


def clifford_mul(a, b):
    if a.n != b.n:
        raise DimensionMismatch(f"cannot multiply R_{a.n} by R_{b.n}")
    return CliffordElement(a.n, mul_coeffs(a.coeffs, b.coeffs, a.n))


def clifford_conjugate(a):
    return CliffordElement(a.n, a.coeffs * conj_signs(a.n))


def clifford_abs(a):
    return float(np.linalg.norm(a.coeffs))


def basis_element(n, *indices):
    """``e_A`` for ``A = indices``; ``basis_element(n)`` is the unit 1."""
    sign, blade = _blade_product(tuple(indices), ())
    c = np.zeros(2 ** n)
    c[blade_index(n, blade)] = sign
    return CliffordElement(n, c)


@dataclass(frozen=True)
class Paravector:
    """``s0 + v[0] e_1 + ... + v[n-1] e_n``."""

    s0: float
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "s0", float(self.s0))
        object.__setattr__(self, "v", tuple(float(x) for x in self.v))
        _check_n(len(self.v))

    @property
    def n(self):
        return len(self.v)

    @property
    def element(self):
        c = np.zeros(2 ** self.n)
        c[0] = self.s0
        c[1:self.n + 1] = self.v
        return CliffordElement(self.n, c)

    @property
    def imag_norm(self):
        return float(math.sqrt(sum(x * x for x in self.v)))

    def __abs__(self):
        return float(math.hypot(self.s0, self.imag_norm))

    def conj(self):
        return Paravector(self.s0, tuple(-x for x in self.v))

    def imag(self):
        return Paravector(0.0, self.v)

    def split(self):
        """Return ``(x, y, J)`` with ``s = x + J y`` and ``y >= 0``.

        For real ``s`` the unit defaults to ``e_1``.
        """
        y = self.imag_norm
        if y == 0.0:
            return self.s0, 0.0, ImaginaryUnit((1.0,) + (0.0,) * (self.n - 1))
        return self.s0, y, ImaginaryUnit(tuple(x / y for x in self.v))

    def phase(self):
        """Angle between ``s`` and the real axis, in ``[0, pi/2]``."""
        return float(math.atan2(self.imag_norm, abs(self.s0)))

    def to_dict(self):
        return self.element.to_dict()


@dataclass(frozen=True)
class ImaginaryUnit:
    """Unit imaginary paravector ``J`` with ``J**2 = -1``."""

    j: tuple

    def __post_init__(self):
        j = tuple(float(x) for x in self.j)
        _check_n(len(j))
        norm = math.sqrt(sum(x * x for x in j))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"imaginary unit must have modulus 1, got {norm}")
        object.__setattr__(self, "j", j)

    @classmethod
    def normalized(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(tuple(v / np.linalg.norm(v)))

    @property
    def n(self):
        return len(self.j)

    @property
    def element(self):
        c = np.zeros(2 ** self.n)
        c[1:self.n + 1] = self.j
        return CliffordElement(self.n, c)

    def __neg__(self):
        return ImaginaryUnit(tuple(-x for x in self.j))


@dataclass(frozen=True)
class SpectralSphere:
    """The sphere ``[s] = {center + J radius}``; ``radius == 0`` is a real point."""

    center: float
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("sphere radius must be nonnegative")
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def phase(self):
        return float(math.atan2(self.radius, abs(self.center)))

    def to_dict(self):
        return {"center": self.center, "radius": self.radius}


def paravector_slice(x, y, J):
    return Paravector(x, tuple(y * c for c in J.j))


def sphere_of(s):
    s = as_paravector(s)
    return SpectralSphere(s.s0, s.imag_norm)


def sample_sphere(S, J):
    return paravector_slice(S.center, S.radius, J)


def as_element(x, n=None):
    """Coerce numbers, paravectors and elements to a :class:`CliffordElement`."""
    if isinstance(x, CliffordElement):
        if n is not None and x.n != n:
            raise DimensionMismatch(f"expected R_{n}, got R_{x.n}")
        return x
    if isinstance(x, (Paravector, ImaginaryUnit)):
        return as_element(x.element, n)
    if np.isscalar(x):
        if n is None:
            raise ValueError("algebra dimension needed to embed a real number")
        return CliffordElement.scalar(n, float(x))
    raise TypeError(f"cannot interpret {type(x).__name__} as a Clifford element")


def as_paravector(x, tol=1e-14):
    if isinstance(x, Paravector):
        return x
    if isinstance(x, ImaginaryUnit):
        return Paravector(0.0, x.j)
    if isinstance(x, CliffordElement):
        if not x.is_paravector(tol):
            raise ValueError(f"{x} is not a paravector")
        return Paravector(x.coeffs[0], tuple(x.coeffs[1:x.n + 1]))
    raise TypeError(f"cannot interpret {type(x).__name__} as a paravector")


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(?P<star>\*)?\s*)?
        (?P<blade>e\d+)?\s*""",
    re.VERBOSE,
)


def parse_clifford(text, n=None):
    """Parse literals such as ``"1 + 2*e1 - 0.5*e12"``.

    A coefficient and a blade must be joined by ``*`` so that ``2e1`` keeps
    its usual meaning of the float 20.  Blade digits are single indices, so
    ``e12`` is ``e_1 e_2``.  ``n`` defaults to the largest index seen.
    """
    pos = 0
    terms = []
    text = text.strip()
    if not text:
        raise ValueError("empty Clifford literal")
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or not (m.group("num") or m.group("blade")):
            raise ValueError(f"cannot parse Clifford literal {text!r} at position {pos}")
        if m.group("num") and m.group("blade") and not m.group("star"):
            raise ValueError(f"use '*' between coefficient and blade in {text!r}")
        if m.group("star") and not m.group("blade"):
            raise ValueError(f"dangling '*' in {text!r}")
        if terms and not m.group("sign"):
            raise ValueError(f"missing operator between terms in {text!r}")
        value = float(m.group("num")) if m.group("num") else 1.0
        if m.group("sign") == "-":
            value = -value
        blade = tuple(int(ch) for ch in m.group("blade")[1:]) if m.group("blade") else ()
        if any(i == 0 for i in blade):
            raise ValueError(f"blade indices start at 1 in {text!r}")
        terms.append((value, blade))
        pos = m.end()
    top = max((max(b) for _, b in terms if b), default=1)
    if n is None:
        n = top
    elif top > n:
        raise DimensionMismatch(f"literal {text!r} needs at least R_{top}")
    out = CliffordElement(n)
    for value, blade in terms:
        out = out + basis_element(n, *blade) * value
    return out


def random_unit(n, rng):
    """Uniformly distributed imaginary unit on the sphere of ``R_n``."""
    v = rng.standard_normal(n)
    return ImaginaryUnit.normalized(v)
