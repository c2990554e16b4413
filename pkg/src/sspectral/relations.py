"""
Right-linear multivalued operators (linear relations) on ``V x V``.

A relation is stored as an orthonormal basis of a real subspace of the
embedding of ``V x V``: each column is a stacked pair ``(v, w)`` of length
``2 * dim V``.  Right submodules are exactly the real subspaces that are
invariant under right multiplication by every ``e_i``; every constructor
enforces that invariance by adding right-multiplied generators before
orthonormalizing.

All subspaces of a finite-dimensional space are closed, so the closure is
the identity up to canonicalization.
"""

import functools
from dataclasses import dataclass

import numpy as np

from . import clifford as cl
from .errors import DimensionMismatch, NotSubmodule
from .linalg import RightLinearOperator, left_mul_matrix, right_mul_matrix

REL_RTOL = 1e-10

__all__ = [
    "LinearRelation", "rel_from_operator", "rel_from_pairs", "rel_sum",
    "rel_scale_left", "rel_compose", "rel_closure", "rel_domain",
    "rel_multivalued_part", "rel_is_operator", "rel_eq", "rel_inverse",
    "rel_contains", "rel_to_operator", "rel_distance", "containment_angle",
    "is_right_linear", "orth", "null_space",
]


def orth(M, rtol=REL_RTOL, atol=0.0):
    """Orthonormal basis of the column span, rank cut at ``max(rtol * sigma_max, atol)``."""
    M = np.asarray(M, dtype=float)
    if M.shape[1] == 0:
        return np.zeros((M.shape[0], 0))
    U, sv, _ = np.linalg.svd(M, full_matrices=False)
    if sv.size == 0 or sv[0] == 0.0:
        return np.zeros((M.shape[0], 0))
    return U[:, sv > max(rtol * sv[0], atol)]


def null_space(M, rtol=REL_RTOL, atol=0.0):
    M = np.asarray(M, dtype=float)
    if M.shape[0] == 0 or not np.any(M):
        return np.eye(M.shape[1])
    _, sv, Vt = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(sv > max(rtol * sv[0], atol)))
    return Vt[rank:].T


@functools.lru_cache(maxsize=None)
def _blade_actions(n, d):
    """Right multiplication by every blade, acting on both components."""
    mats = []
    for blade in cl.basis(n)[1:]:
        R = right_mul_matrix(cl.basis_element(n, *blade), n, d)
        mats.append(np.kron(np.eye(2), R))
    return tuple(mats)


@functools.lru_cache(maxsize=None)
def _unit_actions(n, d):
    mats = []
    for i in range(1, n + 1):
        R = right_mul_matrix(cl.basis_element(n, i), n, d)
        mats.append(np.kron(np.eye(2), R))
    return tuple(mats)


def _stabilize(G, n, d, rtol, atol=0.0):
    gens = [G] + [A @ G for A in _blade_actions(n, d)]
    return orth(np.hstack(gens), rtol, atol)


@dataclass(frozen=True)
class LinearRelation:
    n: int
    d: int
    basis: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        N = self.d * 2 ** self.n
        if B.ndim != 2 or B.shape[0] != 2 * N:
            raise DimensionMismatch(f"pair vectors must have length {2 * N}")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def module_dim(self):
        return self.d * 2 ** self.n

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def first(self):
        return self.basis[: self.module_dim]

    @property
    def second(self):
        return self.basis[self.module_dim:]

    def projector(self):
        return self.basis @ self.basis.T

    def to_json(self):
        """Spanning pair vectors in embedding coordinates."""
        return [[float(x) for x in col] for col in self.basis.T]

    @classmethod
    def from_json(cls, data, n, d, rtol=REL_RTOL):
        G = np.array(data, dtype=float).T if len(data) else np.zeros((2 * d * 2 ** n, 0))
        return rel_from_pairs(G[: d * 2 ** n], G[d * 2 ** n:], n, d, rtol)


def _check(A, B):
    if (A.n, A.d) != (B.n, B.d):
        raise DimensionMismatch("relations live on different modules")


def rel_from_pairs(P, Q, n, d, rtol=REL_RTOL):
    """Smallest right-linear relation containing the columns ``(P[:, k], Q[:, k])``."""
    G = np.vstack([np.asarray(P, dtype=float), np.asarray(Q, dtype=float)])
    return LinearRelation(n, d, _stabilize(G, n, d, rtol))


def rel_from_operator(T, domain_basis=None, rtol=REL_RTOL):
    """``graph(T)`` restricted to the span of ``domain_basis`` (default ``V``)."""
    N = T.dim
    if domain_basis is None:
        X = np.eye(N)
    else:
        if isinstance(domain_basis, (list, tuple)):
            X = np.column_stack([v.embed() for v in domain_basis]) if domain_basis else np.zeros((N, 0))
        else:
            X = np.asarray(domain_basis, dtype=float)
        X = orth(X, rtol)
        for i in range(1, T.n + 1):
            R = right_mul_matrix(cl.basis_element(T.n, i), T.n, T.d)
            if np.linalg.norm(R @ X - X @ (X.T @ R @ X)) > 1e-8 * max(1.0, np.linalg.norm(X)):
                raise NotSubmodule("domain basis does not span a right submodule")
    return LinearRelation(T.n, T.d, orth(np.vstack([X, T.embedding @ X]), rtol))


def rel_inverse(A):
    """``{(w, v) : (v, w) in A}``."""
    return LinearRelation(A.n, A.d, np.vstack([A.second, A.first]))


def _joined(P, Q, A, rtol):
    # generators built from orthonormal blocks have unit scale, so noise is cut absolutely
    return LinearRelation(A.n, A.d, _stabilize(np.vstack([P, Q]), A.n, A.d, rtol, atol=rtol))


def rel_sum(A, B, rtol=REL_RTOL):
    """``{(v, w1 + w2) : (v, w1) in A, (v, w2) in B}``."""
    _check(A, B)
    K = null_space(np.hstack([A.first, -B.first]), rtol)
    x, y = K[: A.dim], K[A.dim:]
    return _joined(A.first @ x, A.second @ x + B.second @ y, A, rtol)


def rel_scale_left(s, A, rtol=REL_RTOL):
    """``{(v, s w) : (v, w) in A}``."""
    L = left_mul_matrix(cl.as_element(s, A.n), A.n, A.d)
    return rel_from_pairs(A.first, L @ A.second, A.n, A.d, rtol)


def rel_compose(A, B, rtol=REL_RTOL):
    """``A o B = {(v, u) : (v, w) in B and (w, u) in A for some w}``."""
    _check(A, B)
    K = null_space(np.hstack([B.second, -A.first]), rtol)
    y, x = K[: B.dim], K[B.dim:]
    return _joined(B.first @ y, A.second @ x, A, rtol)


def rel_closure(A, rtol=REL_RTOL):
    """Finite-dimensional subspaces are closed: returns the canonical basis of ``A``."""
    return LinearRelation(A.n, A.d, orth(A.basis, rtol))


def rel_domain(A, rtol=REL_RTOL):
    """Orthonormal basis of ``{v : (v, w) in A for some w}``."""
    # the span is orthonormal, so an absolute cut is scale-free
    return orth(A.first, rtol, atol=rtol)


def rel_multivalued_part(A, rtol=REL_RTOL):
    """Orthonormal basis of ``{w : (0, w) in A}``."""
    K = null_space(A.first, rtol, atol=rtol)
    return orth(A.second @ K, rtol, atol=rtol)


def rel_is_operator(A, rtol=REL_RTOL):
    return rel_multivalued_part(A, rtol).shape[1] == 0


def rel_distance(A, B):
    """Frobenius distance of the orthogonal projectors."""
    _check(A, B)
    return float(np.linalg.norm(A.projector() - B.projector()))


def rel_eq(A, B, tol=1e-10):
    return rel_distance(A, B) < tol


def containment_angle(A, B):
    """Sine of the largest principal angle of ``B`` relative to ``A``.

    Zero exactly when ``B`` is a subspace of ``A``.
    """
    _check(A, B)
    if B.dim == 0:
        return 0.0
    resid = B.basis - A.basis @ (A.basis.T @ B.basis)
    return float(np.linalg.norm(resid, 2))


def rel_contains(A, B, tol=1e-8):
    """``B`` is a subset of ``A``."""
    return containment_angle(A, B) <= tol


def is_right_linear(A, tol=1e-10):
    if A.dim == 0:
        return True
    for act in _unit_actions(A.n, A.d):
        moved = act @ A.basis
        if np.linalg.norm(moved - A.basis @ (A.basis.T @ moved), 2) > tol:
            return False
    return True


def rel_to_operator(A, rtol=REL_RTOL, check=True):
    """The operator whose graph is ``A``; requires a single-valued relation on all of ``V``."""
    N = A.module_dim
    if A.dim != N or np.linalg.matrix_rank(A.first, tol=rtol * max(1.0, np.linalg.norm(A.first, 2))) != N:
        raise ValueError("relation is not the graph of an everywhere-defined operator")
    M = np.linalg.solve(A.first.T, A.second.T).T
    return RightLinearOperator.from_embedding(M, A.n, A.d, check=check, atol=1e-8)
