"""
S-spectrum, S-resolvents and the contour (omega) functional calculus.

For a paravector ``s`` the pseudo-resolvent ``Q_s[T] = T^2 - 2 s0 T + |s|^2``
embeds as ``(E - mu)(E - conj(mu))`` with ``mu = s0 + i |Im s|`` and ``E`` the
real embedding of ``T``.  Batched evaluations along a slice ``C_J`` therefore
only need one eigendecomposition of ``E``.  When ``E`` is not safely
diagonalizable they fall back to one linear solve per point.

Contour integrals run over the four rays bounding the double sector ``D_phi``
inside ``C_J``, each parametrized by ``r = exp(t)`` and integrated with
composite Gauss-Legendre panels.  The rays are traversed with the sector on
the left (in along angle ``phi``, out along ``-phi``, in along ``pi + phi``,
out along ``pi - phi``) and ``ds_J = -J ds``, which reproduces the classical
Cauchy formula on every slice.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from . import clifford as cl
from . import linalg as la
from .errors import (CertificationFailed, DomainError, FlavorMismatch,
                     NonDecayingFunction, QuadratureNotConverged, SInSpectrum,
                     SpectrumOutsideSector, EigenSolverError)
from .functions import Flavor, evaluate_on_slice

__all__ = [
    "SectorSpec", "ContourSpec", "BisectorialCertificate", "qs_operator",
    "qs_inverse", "s_resolvent_left", "s_resolvent_right", "s_spectrum",
    "spectral_angle", "certify_bisectorial", "omega_calc",
    "resolvent_identities_check", "lemma_estimates", "neumann_series",
    "decomposition_check", "limit_lemma_check", "default_units",
]

EIG_COND_LIMIT = 1e7
CHUNK = 2048


@dataclass(frozen=True)
class SectorSpec:
    omega: float
    phi: float
    theta: float

    def __post_init__(self):
        if not 0 < self.omega < self.phi < self.theta < math.pi / 2:
            raise ValueError(
                f"need 0 < omega < phi < theta < pi/2, got {self.omega}, {self.phi}, {self.theta}")

    def to_dict(self):
        return {"omega": self.omega, "phi": self.phi, "theta": self.theta}


@dataclass(frozen=True)
class ContourSpec:
    sector: SectorSpec
    J: cl.ImaginaryUnit
    t_min: float = -14.0
    t_max: float = 14.0
    nodes_per_panel: int = 32
    panels: int = 28
    tol: float = 1e-10
    max_refinements: int = 6
    max_abs_t: float = 60.0

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ValueError("t_min must be smaller than t_max")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    @property
    def phi(self):
        return self.sector.phi

    @classmethod
    def for_operator(cls, T, f=None, phi=None, J=None, margin=0.05, **kw):
        """Pick a sector between the spectral angle of ``T`` and the domain of ``f``."""
        omega = max(spectral_angle(T), 1e-3)
        theta = math.pi / 2 - 1e-3
        if f is not None and f.domain_angle is not None:
            theta = min(theta, f.domain_angle - 1e-9)
        if phi is None:
            phi = 0.5 * (omega + theta)
        omega = min(omega, phi - 1e-6)
        if theta <= phi:
            theta = min(math.pi / 2 - 1e-12, phi + margin)
        if J is None:
            J = default_units(T.n)[0]
        return cls(SectorSpec(omega, phi, theta), J, **kw)

    def with_(self, **kw):
        data = dict(self.__dict__)
        data.update(kw)
        return ContourSpec(**data)

    def to_dict(self):
        return {"sector": self.sector.to_dict(), "J": list(self.J.j),
                "t_min": self.t_min, "t_max": self.t_max,
                "nodes_per_panel": self.nodes_per_panel, "panels": self.panels,
                "tol": self.tol}


def default_units(n):
    """Deterministic imaginary units used for sampling: ``e_1``, ``e_2`` and a diagonal one."""
    units = [cl.ImaginaryUnit((1.0,) + (0.0,) * (n - 1))]
    if n >= 2:
        units.append(cl.ImaginaryUnit((0.0, 1.0) + (0.0,) * (n - 2)))
        units.append(cl.ImaginaryUnit.normalized(np.arange(1, n + 1, dtype=float)))
    return units


# -- single-point operators ---------------------------------------------------

def _E2(T):
    if "E2" not in T._cache:
        T._cache["E2"] = T.embedding @ T.embedding
    return T._cache["E2"]


def qs_operator(T, s):
    s = cl.as_paravector(s)
    N = T.dim
    Q = _E2(T) - 2 * s.s0 * T.embedding + abs(s) ** 2 * np.eye(N)
    return la.RightLinearOperator.from_embedding(Q, T.n, T.d, check=False)


def qs_inverse(T, s):
    """``Q_s[T]^{-1}``; raises :class:`SInSpectrum` when ``Q_s[T]`` is singular."""
    s = cl.as_paravector(s)
    if s.n != T.n:
        raise la.DimensionMismatch(f"s in R_{s.n}, operator over R_{T.n}")
    Q = qs_operator(T, s).embedding
    sv = scipy.linalg.svdvals(Q)
    # rounding level of forming T^2 - 2 s0 T + |s|^2
    normT = scipy.linalg.norm(T.embedding, 2)
    floor = T.dim * np.finfo(float).eps * (normT ** 2 + 2 * abs(s.s0) * normT + abs(s) ** 2)
    if sv[-1] <= floor:
        raise SInSpectrum(f"Q_s[T] is singular at s = {s.element}")
    inv = np.linalg.solve(Q, np.eye(T.dim))
    return la.RightLinearOperator.from_embedding(inv, T.n, T.d, check=False)


def s_resolvent_left(T, s):
    """``S_L^{-1}(s, T) = Q_s[T]^{-1} conj(s) - T Q_s[T]^{-1}``."""
    s = cl.as_paravector(s)
    Qi = qs_inverse(T, s)
    return la.op_sub(la.op_scale_right(Qi, s.conj().element), la.op_compose(T, Qi))


def s_resolvent_right(T, s):
    """``S_R^{-1}(s, T) = (conj(s) - T) Q_s[T]^{-1}``."""
    s = cl.as_paravector(s)
    Qi = qs_inverse(T, s)
    return la.op_sub(la.op_scale_left(s.conj().element, Qi), la.op_compose(T, Qi))


def neumann_series(T, s, K=60):
    """``sum_{k<=K} T^k s^{-k-1}`` with the scalar acting on the input side."""
    s = cl.as_element(cl.as_paravector(s))
    sinv = s.inverse()
    power = sinv
    Tk = la.RightLinearOperator.identity(T.n, T.d)
    total = la.RightLinearOperator.zeros(T.n, T.d)
    for _ in range(K + 1):
        total = la.op_add(total, la.op_scale_right(Tk, power))
        Tk = la.op_compose(T, Tk)
        power = power * sinv
    return total


def s_spectrum(T, verify=True, check_rtol=1e-8):
    """Spheres of the S-spectrum, each confirmed by a singular ``Q_s[T]``."""
    spheres = la.eigen_spheres(T)
    if verify:
        J = default_units(T.n)[0]
        for sph in spheres:
            Q = qs_operator(T, cl.sample_sphere(sph, J)).embedding
            sv = scipy.linalg.svdvals(Q)
            scale = max(sv[0], np.linalg.norm(_E2(T), 2), 1e-300)
            if sv[-1] > check_rtol * scale:
                raise EigenSolverError(
                    f"sphere {sph} failed the singularity check (sigma_min={sv[-1]:.3e})")
    return spheres


def spectral_angle(T):
    """Largest phase of a spectral sphere, i.e. the smallest admissible ``omega``."""
    cache = T._cache
    if "spectral_angle" not in cache:
        spheres = s_spectrum(T)
        cache["spectral_angle"] = max((s.phase() for s in spheres if s.center or s.radius), default=0.0)
    return cache["spectral_angle"]


# -- batched resolvents along a slice -------------------------------------------

class _Eigen:
    """Eigendecomposition of the embedding, if it is well conditioned."""

    def __init__(self, E):
        self.ok = False
        try:
            lam, V = scipy.linalg.eig(E)
            cond = np.linalg.cond(V)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError):
            return
        if np.isfinite(cond) and cond < EIG_COND_LIMIT:
            self.ok = True
            self.lam = lam
            self.V = V
            self.Vinv = np.linalg.inv(V)
            self.cond = cond


def _eigen(T):
    if "eig" not in T._cache:
        T._cache["eig"] = _Eigen(T.embedding)
    return T._cache["eig"]


def _q_weights(lam, x, y):
    mu = x + 1j * y
    return 1.0 / ((lam[None, :] - mu[:, None]) * (lam[None, :] - np.conj(mu)[:, None]))


def _qinv_batch(T, x, y, method="auto"):
    """``Q_s[T]^{-1}`` embeddings for ``s = x + J y`` (shape ``(K, N, N)``)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    eig = _eigen(T)
    if method == "eig" or (method == "auto" and eig.ok):
        if not eig.ok:
            raise EigenSolverError("embedding is not safely diagonalizable")
        q = _q_weights(eig.lam, x, y)
        return np.einsum("il,kl,lj->kij", eig.V, q, eig.Vinv).real
    E, E2 = T.embedding, _E2(T)
    I = np.eye(T.dim)
    out = np.empty((x.size, T.dim, T.dim))
    for a in range(0, x.size, CHUNK):
        xs, ys = x[a:a + CHUNK], y[a:a + CHUNK]
        Q = E2[None] - 2 * xs[:, None, None] * E[None] + (xs ** 2 + ys ** 2)[:, None, None] * I[None]
        out[a:a + CHUNK] = np.linalg.solve(Q, np.broadcast_to(I, Q.shape))
    return out


def _slice_lmul(J, n, d):
    return la.left_mul_matrix(J.element, n, d)


def _sl_batch(T, x, y, J, method="auto"):
    """``S_L^{-1}(s, T)`` embeddings at ``s = x + J y``."""
    Qi = _qinv_batch(T, x, y, method)
    LJ = _slice_lmul(J, T.n, T.d)
    E = T.embedding
    sbar = x[:, None, None] * np.eye(T.dim)[None] - y[:, None, None] * LJ[None]
    return Qi @ (sbar - E[None])


def _sr_batch(T, x, y, J, method="auto"):
    Qi = _qinv_batch(T, x, y, method)
    LJ = _slice_lmul(J, T.n, T.d)
    sbar = x[:, None, None] * np.eye(T.dim)[None] - y[:, None, None] * LJ[None]
    return (sbar - T.embedding[None]) @ Qi


def _batched_norm(M):
    if M.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.norm(M, ord=2, axis=(1, 2))


# -- bisectoriality ----------------------------------------------------------------

@dataclass
class BisectorialCertificate:
    phi: float
    C_phi: float
    radii: np.ndarray
    angles: np.ndarray
    units: list
    values: np.ndarray  # (radii, angles, units): |s| * ||S_L^{-1}(s, T)||
    passed: bool
    injective: bool
    growth_low: float
    growth_high: float
    reason: str = ""

    @property
    def samples(self):
        out = []
        for i, r in enumerate(self.radii):
            for j, a in enumerate(self.angles):
                for k, J in enumerate(self.units):
                    s = cl.paravector_slice(r * math.cos(a), r * math.sin(a), J)
                    out.append((s, float(self.values[i, j, k])))
        return out

    def points(self):
        """``(x, y, unit index)`` arrays of all sample points."""
        R, A, U = np.meshgrid(self.radii, self.angles, np.arange(len(self.units)), indexing="ij")
        return (R * np.cos(A)).ravel(), (R * np.sin(A)).ravel(), U.ravel()

    def profile_rows(self):
        """``(|s|, angle, value)`` rows with the maximum over units."""
        best = self.values.max(axis=2)
        return [(float(r), float(a), float(best[i, j]))
                for i, r in enumerate(self.radii) for j, a in enumerate(self.angles)]

    def to_dict(self):
        return {"phi": self.phi, "C_phi": self.C_phi, "passed": self.passed,
                "injective": self.injective, "growth_low": self.growth_low,
                "growth_high": self.growth_high, "reason": self.reason,
                "samples": int(self.values.size)}


def certify_bisectorial(T, phi, radii=None, angles=9, units=None, require_injective=False,
                        growth_limit=1.05):
    """Sample ``|s| ||S_L^{-1}(s, T)||`` outside ``D_phi`` and certify a finite bound.

    Sample points are radii (log-spaced over ``[1e-6, 1e6]`` by default) times
    ``angles`` ray directions in ``[phi, pi - phi]`` times the given units and
    their negatives, so the set is closed under conjugation.  The bound
    passes when it is finite and shows no growth over the first and last
    decade of radii.
    """
    if not 0 < phi < math.pi / 2:
        raise ValueError("phi must lie in (0, pi/2)")
    omega = spectral_angle(T)
    if omega >= phi:
        raise SpectrumOutsideSector(
            f"spectral angle {omega:.6g} is not below phi = {phi:.6g}")
    radii = np.logspace(-6, 6, 61) if radii is None else np.asarray(radii, dtype=float)
    ang = np.linspace(phi, math.pi - phi, angles) if np.isscalar(angles) else np.asarray(angles)
    base = units if units is not None else default_units(T.n)
    units = []
    for J in base:
        units.extend([J, -J])
    LJs = [_slice_lmul(J, T.n, T.d) for J in units]
    values = np.empty((radii.size, ang.size, len(units)))
    R, A = np.meshgrid(radii, ang, indexing="ij")
    x, y = (R * np.cos(A)).ravel(), (R * np.sin(A)).ravel()
    Qi = _qinv_batch(T, x, y)
    E = T.embedding
    I = np.eye(T.dim)
    for k, LJ in enumerate(LJs):
        sbar = x[:, None, None] * I[None] - y[:, None, None] * LJ[None]
        SL = Qi @ (sbar - E[None])
        values[:, :, k] = (np.hypot(x, y) * _batched_norm(SL)).reshape(R.shape)
    per_radius = values.max(axis=(1, 2))
    decade = max(1, int(round((radii.size - 1) / max(math.log10(radii[-1] / radii[0]), 1e-12))))
    decade = min(decade, radii.size - 1)
    g_low = float(per_radius[0] / per_radius[decade])
    g_high = float(per_radius[-1] / per_radius[-1 - decade])
    C = float(values.max())
    injective = len(la.kernel_basis(T)) == 0
    reason = ""
    passed = bool(np.isfinite(C))
    if not passed:
        reason = "resolvent bound is not finite"
    elif g_low > growth_limit or g_high > growth_limit:
        passed = False
        reason = f"resolvent bound grows at the ends (factor {max(g_low, g_high):.3g} per decade)"
    if require_injective and not injective:
        passed = False
        reason = (reason + "; " if reason else "") + "operator is not injective"
    return BisectorialCertificate(phi, C, radii, ang, units, values, passed, injective,
                                  g_low, g_high, reason)


def _certified(T, phi):
    key = ("cert", round(phi, 12))
    if key not in T._cache:
        T._cache[key] = certify_bisectorial(T, phi)
    return T._cache[key]


# -- contour quadrature ------------------------------------------------------------------

def _rays(phi):
    # (angle, orientation): sector interior kept on the left
    return ((phi, -1.0), (-phi, 1.0), (math.pi + phi, -1.0), (math.pi - phi, 1.0))


def _panel_nodes(lo, hi, width, q):
    panels = max(1, int(math.ceil((hi - lo) / width - 1e-9)))
    h = (hi - lo) / panels
    xi, wi = np.polynomial.legendre.leggauss(q)
    mids = lo + h * (np.arange(panels) + 0.5)
    t = (mids[:, None] + 0.5 * h * xi[None, :]).ravel()
    w = np.tile(0.5 * h * wi, panels)
    return t, w


def _nodes(phi, t, w):
    xs, ys, ws, c0, c1 = [], [], [], [], []
    for a, sigma in _rays(phi):
        r = np.exp(t)
        xs.append(r * math.cos(a))
        ys.append(r * math.sin(a))
        ws.append(sigma * w / (2 * math.pi))
        # ds_J = -J ds = r (sin a - J cos a) dt
        c0.append(r * math.sin(a))
        c1.append(-r * math.cos(a))
    return tuple(np.concatenate(v) for v in (xs, ys, ws, c0, c1))


def _slice_scalars(f, x, y, c0, c1, J, side):
    """Clifford weights ``ds_J f(s)`` (left) or ``f(s) ds_J`` (right) per node."""
    n = J.n
    fv = evaluate_on_slice(f, x, y, J)
    Jc = J.element.coeffs
    if side is Flavor.LEFT:
        Jf = cl.mul_coeffs(Jc, fv, n)
    else:
        Jf = cl.mul_coeffs(fv, Jc, n)
    return c0[:, None] * fv + c1[:, None] * Jf


def _unit_blocks(n, d):
    """``X[beta]``: ``N x d`` with ``e_beta`` in block ``j`` of column ``j``."""
    b = 2 ** n
    X = np.zeros((b, d * b, d))
    for beta in range(b):
        for j in range(d):
            X[beta, j * b + beta, j] = 1.0
    return X


def _lmul_blocks(n, d):
    b = 2 ** n
    return np.stack([la.left_mul_matrix(cl.CliffordElement(n, np.eye(b)[beta]), n, d)
                     for beta in range(b)])


def _omega_sum(T, f, side, J, x, y, w, c0, c1, method="auto"):
    """Weighted sum of the integrand over the nodes; returns the ``(N, d)`` unit columns."""
    n, d = T.n, T.d
    C = _slice_scalars(f, x, y, c0, c1, J, side)  # (K, b)
    LJ = _slice_lmul(J, n, d)
    E = T.embedding
    X = _unit_blocks(n, d)
    eig = _eigen(T)
    use_eig = method == "eig" or (method == "auto" and eig.ok)
    if use_eig:
        lam, V, Vinv = eig.lam, eig.V, eig.Vinv
        q = _q_weights(lam, x, y) * w[:, None]  # (K, N)
        if side is Flavor.LEFT:
            A = np.einsum("ij,bjd->bid", Vinv, X)
            B = np.einsum("ij,jk,bkd->bid", Vinv, LJ, X)
            P1 = np.einsum("kl,kb,k->lb", q, C, x)
            P2 = np.einsum("kl,kb,k->lb", q, C, y)
            P3 = np.einsum("kl,kb->lb", q, C)
            inner = (np.einsum("lb,bld->ld", P1 - lam[:, None] * P3, A)
                     - np.einsum("lb,bld->ld", P2, B))
            return (V @ inner).real
        G = Vinv @ X[0]  # (N, d)
        R1 = np.einsum("kl,kb,k->lb", q, C, x)
        R2 = np.einsum("kl,kb,k->lb", q, C, y)
        R3 = np.einsum("kl,kb->lb", q, C)
        Lb = _lmul_blocks(n, d)
        out = np.zeros((T.dim, d), dtype=complex)
        for beta in range(2 ** n):
            M = V @ ((R1[:, beta] - lam * R3[:, beta])[:, None] * G) \
                - LJ @ V @ (R2[:, beta][:, None] * G)
            out += Lb[beta] @ M
        return out.real
    out = np.zeros((T.dim, d))
    I = np.eye(T.dim)
    for a in range(0, x.size, CHUNK):
        sl = slice(a, a + CHUNK)
        xs, ys, ws, Cs = x[sl], y[sl], w[sl], C[sl]
        Qi = _qinv_batch(T, xs, ys, method="solve")
        sbar = xs[:, None, None] * I[None] - ys[:, None, None] * LJ[None]
        if side is Flavor.LEFT:
            Xk = np.einsum("kb,bnd->knd", Cs, X)
            out += np.einsum("k,knd->nd", ws, Qi @ ((sbar - E[None]) @ Xk))
        else:
            Z = (sbar - E[None]) @ (Qi @ X[0][None])  # (K, N, d)
            Lk = np.einsum("kb,bij->kij", Cs, _lmul_blocks(n, d))
            out += np.einsum("k,knd->nd", ws, Lk @ Z)
    return out


def _columns_to_operator(cols, n, d):
    b = 2 ** n
    entries = cols.reshape(d, b, d).transpose(0, 2, 1)
    return la.RightLinearOperator(n, d, entries)


def _integrand_norm(T, f, side, J, phi, t, method):
    """Largest integrand norm over the four rays at log-radius ``t``."""
    best = 0.0
    for a, _ in _rays(phi):
        r = math.exp(t)
        x, y = np.array([r * math.cos(a)]), np.array([r * math.sin(a)])
        cols = _omega_sum(T, f, side, J, x, y, np.array([1.0]),
                          np.array([r * math.sin(a)]), np.array([-r * math.cos(a)]), method)
        best = max(best, float(np.linalg.norm(cols, 2)))
    return best


@dataclass
class QuadratureInfo:
    t_min: float
    t_max: float
    panels: int
    nodes: int
    change: float
    method: str
    refinements: int = 0

    def to_dict(self):
        return dict(self.__dict__)


def omega_calc(f, T, cfg=None, side="left", certify=True, method="auto", info=None):
    """Contour functional calculus ``f(T)`` of a decaying slice function.

    ``side="left"`` integrates ``S_L^{-1}(s, T) ds_J f(s)`` for left or
    intrinsic ``f``; ``side="right"`` integrates ``f(s) ds_J S_R^{-1}(s, T)``
    for right or intrinsic ``f``.  Panels are halved until the operator
    changes by less than ``cfg.tol`` relative to its norm; the log-radius
    range is widened first until the neglected tails are below tolerance.
    """
    side = Flavor(side) if not isinstance(side, Flavor) else side
    if side is Flavor.INTRINSIC:
        raise ValueError("side must be left or right")
    if f.flavor not in (side, Flavor.INTRINSIC):
        raise FlavorMismatch(f"{f.flavor.value} function used with the {side.value} calculus")
    if f.growth is None or not f.growth.decaying:
        raise NonDecayingFunction(f"{f.name} does not decay at both 0 and infinity")
    if f.n is not None and f.n != T.n:
        raise la.DimensionMismatch(f"function over R_{f.n}, operator over R_{T.n}")
    cfg = cfg or ContourSpec.for_operator(T, f)
    phi, J = cfg.phi, cfg.J
    if J.n != T.n:
        raise la.DimensionMismatch("imaginary unit and operator live in different algebras")
    if f.domain_angle is not None and phi >= f.domain_angle:
        raise DomainError(f"contour angle {phi} leaves the domain of {f.name}")
    if spectral_angle(T) >= phi:
        raise SpectrumOutsideSector(f"spectrum of T is not inside D_phi for phi = {phi}")
    if certify:
        cert = _certified(T, phi)
        if not cert.passed:
            raise CertificationFailed(cert.reason)

    q = cfg.nodes_per_panel
    width = (cfg.t_max - cfg.t_min) / cfg.panels
    lo, hi = cfg.t_min, cfg.t_max
    rate_lo = max(min(f.growth.at_zero, 4.0), 0.25)
    rate_hi = max(min(-f.growth.at_infinity, 4.0), 0.25)
    tail_tol = 0.1 * cfg.tol
    while _integrand_norm(T, f, side, J, phi, lo, method) / (2 * math.pi * rate_lo) > tail_tol:
        lo -= 4.0
        if lo < -cfg.max_abs_t:
            raise QuadratureNotConverged("integrand does not decay fast enough near 0")
    while _integrand_norm(T, f, side, J, phi, hi, method) / (2 * math.pi * rate_hi) > tail_tol:
        hi += 4.0
        if hi > cfg.max_abs_t:
            raise QuadratureNotConverged("integrand does not decay fast enough at infinity")

    def integrate(width):
        t, w = _panel_nodes(lo, hi, width, q)
        x, y, ws, c0, c1 = _nodes(phi, t, w)
        return _omega_sum(T, f, side, J, x, y, ws, c0, c1, method), t.size * 4

    prev, _ = integrate(width)
    for level in range(cfg.max_refinements):
        width /= 2
        cols, count = integrate(width)
        change = float(np.linalg.norm(cols - prev, 2))
        scale = float(np.linalg.norm(cols, 2))
        if change <= cfg.tol * max(scale, 1e-300) or change == 0.0:
            if info is not None:
                info.update(QuadratureInfo(lo, hi, int(round((hi - lo) / width)), count, change,
                                           "eig" if (method == "eig" or (method == "auto" and _eigen(T).ok)) else "solve",
                                           level + 1).to_dict())
            return _columns_to_operator(cols, T.n, T.d)
        prev = cols
    raise QuadratureNotConverged(
        f"relative change {change / max(scale, 1e-300):.3e} above tol {cfg.tol:.1e} "
        f"after {cfg.max_refinements} refinements")


# -- identity and estimate checks -----------------------------------------------------------

def resolvent_identities_check(T, s, C_phi=None):
    """Residual norms of the S-resolvent identities at ``s``.

    With ``C_phi`` the ratios of the four resolvent estimates to their bounds
    are included (values at most 1 satisfy the estimate).
    """
    s = cl.as_paravector(s)
    _, _, J = s.split()
    sb = s.conj()
    Qi = qs_inverse(T, s)
    SL, SLb = s_resolvent_left(T, s), s_resolvent_left(T, sb)
    SR, SRb = s_resolvent_right(T, s), s_resolvent_right(T, sb)
    s0_minus_T = la.op_sub(la.RightLinearOperator.identity(T.n, T.d) * s.s0, T)
    two_re = la.op_compose(s0_minus_T, Qi) * 2.0
    imQ = la.op_scale_left(s.imag().element, Qi) * 2.0
    Je = J.element
    jdiff = la.op_scale_right(la.op_scale_left(Je, la.op_sub(SL, SLb)), Je)
    one = la.RightLinearOperator.identity(T.n, T.d)
    out = {
        "right_sum": la.op_norm(la.op_sub(la.op_add(SR, SRb), two_re)),
        "left_sum": la.op_norm(la.op_sub(la.op_add(SL, SLb), two_re)),
        "right_difference": la.op_norm(la.op_add(la.op_sub(SR, SRb), imQ)),
        "left_difference": la.op_norm(la.op_add(la.op_sub(SR, SRb), jdiff)),
        "resolvent_equation": la.op_norm(la.op_add(la.op_sub(la.op_compose(T, SL),
                                                             la.op_scale_right(SL, s.element)), one)),
    }
    if C_phi is not None:
        r = abs(s)
        C = C_phi
        out["estimate_right_resolvent"] = la.op_norm(SR) * r / (2 * C)
        out["estimate_qs_inverse"] = la.op_norm(Qi) * r ** 2 / (2 * C ** 2)
        out["estimate_t_qs_inverse"] = la.op_norm(la.op_compose(T, Qi)) * r / (2 * C ** 2 + C)
        out["estimate_t2_qs_inverse"] = (la.op_norm(la.op_compose(la.op_compose(T, T), Qi))
                                         / (1 + 2 * C + 2 * C ** 2))
    return out


@dataclass
class LemmaReport:
    C_phi: float
    samples: int
    ratios: dict = field(default_factory=dict)  # estimate name -> largest value/bound
    violations: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(v == 0 for v in self.violations.values())

    def to_dict(self):
        return {"C_phi": self.C_phi, "samples": self.samples, "ratios": self.ratios,
                "violations": self.violations, "passed": self.passed}


def lemma_estimates(T, cert, slack=1e-12):
    """The four resolvent estimates at every sample point of ``cert``."""
    C = cert.C_phi
    bounds = {
        "right_resolvent": lambda r: 2 * C / r,
        "qs_inverse": lambda r: 2 * C ** 2 / r ** 2,
        "t_qs_inverse": lambda r: (2 * C ** 2 + C) / r,
        "t2_qs_inverse": lambda r: (1 + 2 * C + 2 * C ** 2) * np.ones_like(r),
    }
    x, y, u = cert.points()
    r = np.hypot(x, y)
    E = T.embedding
    I = np.eye(T.dim)
    vals = {k: np.empty(x.size) for k in bounds}
    Qi_all = _qinv_batch(T, x, y)
    for k, J in enumerate(cert.units):
        sel = u == k
        Qi = Qi_all[sel]
        LJ = _slice_lmul(J, T.n, T.d)
        sbar = x[sel, None, None] * I[None] - y[sel, None, None] * LJ[None]
        vals["right_resolvent"][sel] = _batched_norm((sbar - E[None]) @ Qi)
        vals["qs_inverse"][sel] = _batched_norm(Qi)
        EQ = E[None] @ Qi
        vals["t_qs_inverse"][sel] = _batched_norm(EQ)
        vals["t2_qs_inverse"][sel] = _batched_norm(E[None] @ EQ)
    rep = LemmaReport(C, int(x.size))
    for k, bound in bounds.items():
        ratio = vals[k] / bound(r)
        rep.ratios[k] = float(ratio.max())
        rep.violations[k] = int(np.sum(ratio > 1 + slack))
    return rep


def decomposition_check(T):
    """Dimensions of ``ker T`` and ``ran T`` and the smallest principal angle between them."""
    ker = la.stack_basis(la.kernel_basis(T), T.dim)
    ran = la.stack_basis(la.range_basis(T), T.dim)
    if ker.shape[1] and ran.shape[1]:
        angle = float(np.min(scipy.linalg.subspace_angles(ker, ran)))
    else:
        angle = math.pi / 2
    return {"dim_kernel": ker.shape[1], "dim_range": ran.shape[1], "dim": T.dim,
            "min_angle": angle}


def limit_lemma_check(T, phi, v=None, J=None, decades=6, per_decade=2, angle=None):
    """Trends of ``||T^2 Q_s^{-1} v||`` (``|s| -> oo``) and ``|| |s|^2 Q_s^{-1} u||`` (``|s| -> 0``).

    ``u`` is ``v`` projected onto ``ran T``.  Both sequences should decrease
    monotonically towards zero along a ray outside ``D_phi``.
    """
    J = J or default_units(T.n)[0]
    angle = (phi + math.pi / 2) / 2 if angle is None else angle
    if v is None:
        v = np.ones(T.dim) / math.sqrt(T.dim)
    v = np.asarray(v, dtype=float)
    ran = la.stack_basis(la.range_basis(T), T.dim)
    u = ran @ (ran.T @ v)
    sv = scipy.linalg.svdvals(T.embedding)
    big = max(sv[0], 1e-300) if sv.size else 1.0
    nonzero = sv[sv > la.RANK_RTOL * big]
    small = nonzero[-1] if nonzero.size else 1.0
    count = decades * per_decade + 1
    r_up = 10 * big * np.logspace(0, decades, count)
    r_down = 0.1 * small * np.logspace(0, -decades, count)
    E = T.embedding
    Qi_up = _qinv_batch(T, r_up * math.cos(angle), r_up * math.sin(angle))
    Qi_dn = _qinv_batch(T, r_down * math.cos(angle), r_down * math.sin(angle))
    up = np.linalg.norm(np.einsum("ij,kjl,l->ki", E @ E, Qi_up, v), axis=1)
    down = np.linalg.norm((r_down ** 2)[:, None] * np.einsum("kij,j->ki", Qi_dn, u), axis=1)

    def trend(seq):
        ref = max(seq[0], 1e-300)
        mono = bool(np.all(np.diff(seq) <= 1e-12 * ref))
        return mono, float(seq[-1] / ref) if seq[0] > 0 else 0.0

    up_mono, up_ratio = trend(up)
    dn_mono, dn_ratio = trend(down)
    return {"infinity_monotone": up_mono, "infinity_ratio": up_ratio,
            "zero_monotone": dn_mono, "zero_ratio": dn_ratio,
            "infinity_values": up.tolist(), "zero_values": down.tolist()}


def _threads():
    try:
        return max(1, int(os.environ.get("SSPECTRAL_THREADS", "1")))
    except ValueError:
        return 1


def map_ordered(fn, items):
    """``[fn(x) for x in items]``, run on ``SSPECTRAL_THREADS`` worker threads."""
    items = list(items)
    workers = _threads()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
