"""
Right-linear operators on the Clifford module ``V = (R_n)**d``.

A module vector is stored as a ``(d, 2**n)`` array of coefficients; its real
embedding is the row-major flattening, so component ``i`` occupies the slice
``i*2**n:(i+1)*2**n``.  An operator is a ``d x d`` matrix of Clifford numbers
acting by ``(Tv)_i = sum_j T_ij v_j``.  Such an action commutes with right
multiplication by scalars, and its real embedding is the block matrix of the
left-regular representations of the entries.

Norms are Euclidean on the embedding: left or right multiplication by a unit
paravector embeds as an orthogonal matrix, so ``|s v| = |v s| = |s| |v|``
holds exactly for paravectors.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import clifford as cl
from .errors import DimensionMismatch, EigenSolverError, SingularOperator

RANK_RTOL = 1e-12
SPHERE_MERGE_TOL = 1e-9

__all__ = [
    "ModuleVector", "RightLinearOperator", "op_apply", "op_add", "op_sub",
    "op_compose", "op_scale_left", "op_scale_right", "op_power",
    "real_embedding", "op_inverse", "op_norm", "eigen_spheres",
    "kernel_basis", "range_basis", "right_mul_matrix", "left_mul_matrix",
]


@dataclass(frozen=True)
class ModuleVector:
    n: int
    d: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(self.d, 2 ** self.n)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_entries(cls, entries):
        entries = [cl.as_element(e) for e in entries]
        n = entries[0].n
        return cls(n, len(entries), np.stack([e.coeffs for e in entries]))

    @classmethod
    def from_embedding(cls, vec, n, d):
        return cls(n, d, np.asarray(vec).reshape(d, 2 ** n))

    @property
    def entries(self):
        return [cl.CliffordElement(self.n, row) for row in self.coeffs]

    def embed(self):
        return self.coeffs.reshape(-1).copy()

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def right_mul(self, s):
        s = cl.as_element(s, self.n)
        return ModuleVector(self.n, self.d, cl.mul_coeffs(self.coeffs, s.coeffs, self.n))

    def left_mul(self, s):
        s = cl.as_element(s, self.n)
        return ModuleVector(self.n, self.d, cl.mul_coeffs(s.coeffs, self.coeffs, self.n))

    def __add__(self, other):
        return ModuleVector(self.n, self.d, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return ModuleVector(self.n, self.d, self.coeffs - other.coeffs)


class RightLinearOperator:
    """``d x d`` matrix of ``R_n`` entries, immutable, with cached embedding."""

    __slots__ = ("n", "d", "entries", "embedding", "_cache")

    def __init__(self, n, d, entries):
        n, d = int(n), int(d)
        arr = np.array(entries, dtype=float)
        if arr.shape != (d, d, 2 ** n):
            raise DimensionMismatch(
                f"expected entries of shape {(d, d, 2 ** n)}, got {arr.shape}")
        arr.setflags(write=False)
        self.n = n
        self.d = d
        self.entries = arr
        L = cl.left_matrix(arr, n)  # (d, d, b, b)
        emb = L.transpose(0, 2, 1, 3).reshape(d * 2 ** n, d * 2 ** n)
        emb.setflags(write=False)
        self.embedding = emb
        self._cache = {}

    @property
    def dim(self):
        """Real dimension ``2**n * d`` of the module."""
        return self.embedding.shape[0]

    @classmethod
    def from_elements(cls, rows):
        rows = [[cl.as_element(e) for e in row] for row in rows]
        n = rows[0][0].n
        d = len(rows)
        return cls(n, d, [[e.coeffs for e in row] for row in rows])

    @classmethod
    def identity(cls, n, d):
        e = np.zeros((d, d, 2 ** n))
        e[np.arange(d), np.arange(d), 0] = 1.0
        return cls(n, d, e)

    @classmethod
    def zeros(cls, n, d):
        return cls(n, d, np.zeros((d, d, 2 ** n)))

    @classmethod
    def diag(cls, elements):
        elements = [cl.as_element(e) for e in elements]
        n, d = elements[0].n, len(elements)
        e = np.zeros((d, d, 2 ** n))
        for k, x in enumerate(elements):
            e[k, k] = x.coeffs
        return cls(n, d, e)

    @classmethod
    def from_embedding(cls, M, n, d, check=True, atol=1e-9):
        """Read Clifford entries back from a real matrix.

        The entry ``T_ij`` is the image of the unit under block ``(i, j)``.
        With ``check`` the matrix must commute with right multiplication up
        to ``atol`` relative to its norm.
        """
        b = 2 ** n
        M = np.asarray(M, dtype=float)
        entries = M[:, ::b].reshape(d, b, d).transpose(0, 2, 1)
        op = cls(n, d, entries)
        if check:
            scale = max(1.0, float(np.max(np.abs(M))) if M.size else 1.0)
            err = float(np.max(np.abs(op.embedding - M))) if M.size else 0.0
            if err > atol * scale:
                raise DimensionMismatch(
                    f"matrix is not right-linear (structure residual {err:.3e})")
        return op

    def element(self, i, j):
        return cl.CliffordElement(self.n, self.entries[i, j])

    def to_dict(self):
        return {
            "n": self.n,
            "d": self.d,
            "entries": [[self.element(i, j).to_dict() for j in range(self.d)]
                        for i in range(self.d)],
        }

    @classmethod
    def from_dict(cls, data):
        n, d = int(data["n"]), int(data["d"])
        rows = data["entries"]
        if len(rows) != d or any(len(r) != d for r in rows):
            raise DimensionMismatch("entries must be a d x d array")
        entries = np.zeros((d, d, 2 ** n))
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                if isinstance(x, str):
                    entries[i, j] = cl.parse_clifford(x, n).coeffs
                elif isinstance(x, dict):
                    el = cl.CliffordElement.from_dict(x)
                    if el.n != n:
                        raise DimensionMismatch(f"entry ({i},{j}) lives in R_{el.n}")
                    entries[i, j] = el.coeffs
                else:
                    entries[i, j, 0] = float(x)
        return cls(n, d, entries)

    def __add__(self, other):
        return op_add(self, other)

    def __sub__(self, other):
        return op_sub(self, other)

    def __matmul__(self, other):
        if isinstance(other, RightLinearOperator):
            return op_compose(self, other)
        if isinstance(other, ModuleVector):
            return op_apply(self, other)
        return NotImplemented

    def __neg__(self):
        return RightLinearOperator(self.n, self.d, -self.entries)

    def __mul__(self, c):
        if np.isscalar(c):
            return RightLinearOperator(self.n, self.d, self.entries * float(c))
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f"RightLinearOperator(n={self.n}, d={self.d})"


def _check_same(T, S):
    if (T.n, T.d) != (S.n, S.d):
        raise DimensionMismatch(f"operators on (n={T.n}, d={T.d}) and (n={S.n}, d={S.d})")


def op_apply(T, v):
    if (T.n, T.d) != (v.n, v.d):
        raise DimensionMismatch("operator and vector live on different modules")
    return ModuleVector(T.n, T.d, T.embedding @ v.embed())


def op_add(T, S):
    _check_same(T, S)
    return RightLinearOperator(T.n, T.d, T.entries + S.entries)


def op_sub(T, S):
    _check_same(T, S)
    return RightLinearOperator(T.n, T.d, T.entries - S.entries)


def op_compose(T, S):
    """``T S``: apply ``S`` first."""
    _check_same(T, S)
    prod = cl.mul_coeffs(T.entries[:, :, None, :], S.entries[None, :, :, :], T.n)
    return RightLinearOperator(T.n, T.d, prod.sum(axis=1))


def op_scale_left(a, T):
    """``a T``: every entry multiplied by ``a`` from the left."""
    a = cl.as_element(a, T.n)
    return RightLinearOperator(T.n, T.d, cl.mul_coeffs(a.coeffs, T.entries, T.n))


def op_scale_right(T, a):
    """``T a``: the composition ``v -> T(a v)``, i.e. entries times ``a``."""
    a = cl.as_element(a, T.n)
    return RightLinearOperator(T.n, T.d, cl.mul_coeffs(T.entries, a.coeffs, T.n))


def op_power(T, k):
    out = RightLinearOperator.identity(T.n, T.d)
    for _ in range(k):
        out = op_compose(T, out)
    return out


def real_embedding(T):
    return T.embedding


def left_mul_matrix(a, n, d):
    """Embedding of ``v -> a v`` on ``(R_n)**d``."""
    return np.kron(np.eye(d), cl.left_matrix(cl.as_element(a, n).coeffs, n))


def right_mul_matrix(a, n, d):
    """Embedding of ``v -> v a`` on ``(R_n)**d``."""
    return np.kron(np.eye(d), cl.right_matrix(cl.as_element(a, n).coeffs, n))


def op_inverse(T):
    M = T.embedding
    sv = scipy.linalg.svdvals(M)
    if sv.size == 0 or sv[-1] <= RANK_RTOL * sv[0] or sv[0] == 0.0:
        raise SingularOperator(
            f"operator is numerically singular (sigma_min/sigma_max = "
            f"{(sv[-1] / sv[0]) if sv[0] else 0.0:.3e})")
    inv = np.linalg.solve(M, np.eye(M.shape[0]))
    return RightLinearOperator.from_embedding(inv, T.n, T.d, check=False)


def op_norm(T):
    M = T.embedding if isinstance(T, RightLinearOperator) else np.asarray(T)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def _merge_spheres(points, tol):
    spheres = []
    for c, r in sorted(points):
        for k, (c0, r0, cnt) in enumerate(spheres):
            scale = max(1.0, abs(c0) + r0)
            if abs(c - c0) <= tol * scale and abs(r - r0) <= tol * scale:
                spheres[k] = ((c0 * cnt + c) / (cnt + 1), (r0 * cnt + r) / (cnt + 1), cnt + 1)
                break
        else:
            spheres.append((c, r, 1))
    return [cl.SpectralSphere(c, r) for c, r, _ in spheres]


def eigen_spheres(T, tol=SPHERE_MERGE_TOL):
    """Spheres ``(Re mu, |Im mu|)`` for the eigenvalues ``mu`` of the embedding.

    ``Q_s[T]`` embeds as ``(E - mu)(E - conj(mu))`` for ``s = Re mu + J |Im mu|``,
    so these are exactly the spheres on which ``Q_s[T]`` is singular.
    """
    try:
        mu = scipy.linalg.eigvals(T.embedding, check_finite=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"eigenvalue iteration failed: {exc}") from exc
    # eigenvalues at rounding level are the origin; their phase would be noise
    floor = tol * max(1.0, float(np.max(np.abs(mu)))) if mu.size else 0.0
    pts = [(0.0, 0.0) if abs(m) <= floor else (float(m.real), float(abs(m.imag))) for m in mu]
    return _merge_spheres(pts, tol)


def _null_and_range(M, rtol=RANK_RTOL):
    U, sv, Vt = np.linalg.svd(M)
    top = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > rtol * top)) if top > 0 else 0
    return Vt[rank:].T, U[:, :rank]


def kernel_basis(T, rtol=RANK_RTOL):
    """Orthonormal basis (embedding coordinates) of ``ker T`` as module vectors."""
    null, _ = _null_and_range(T.embedding, rtol)
    return [ModuleVector.from_embedding(c, T.n, T.d) for c in null.T]


def range_basis(T, rtol=RANK_RTOL):
    _, ran = _null_and_range(T.embedding, rtol)
    return [ModuleVector.from_embedding(c, T.n, T.d) for c in ran.T]


def stack_basis(vectors, dim):
    """Columns of the embedded vectors, an empty ``(dim, 0)`` array if none."""
    if not vectors:
        return np.zeros((dim, 0))
    return np.column_stack([v.embed() for v in vectors])
