"""
Seeded test-operator generators and the end-to-end verification suites.

Every check produces a record ``{name, anchor, status, residual, tolerance,
runtime}``.  ``anchor`` names the mathematical statement being checked.
Failed checks are records, not exceptions; only invalid configurations
raise.  Records are sorted by name, and everything except ``runtime`` is
a deterministic function of the configuration.
"""

import copy
import itertools
import json
import math
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import calculus as ca
from . import clifford as cl
from . import functions as fn
from . import hinfty as hi
from . import linalg as la
from . import relations as rl
from .errors import ConfigError, SpectralError

__all__ = [
    "ScenarioConfig", "VerificationReport", "Record", "generate_operator",
    "generate_operators", "run_suite", "SUITES", "ANCHORS", "TOLERANCES",
    "load_schema", "dirac_operator", "brute_force_sum", "brute_force_compose",
]

SUITES = ("algebra", "resolvent", "lemma-estimates", "decomposition", "rn-density",
          "omega", "hinfty-left", "hinfty-right", "relations", "product-rules", "rational")

# statement label per check family
ANCHORS = {
    "algebra": "clifford-algebra-identities",
    "embedding": "real-embedding-homomorphism",
    "series": "s-resolvent-series",
    "resolvent-identity": "s-resolvent-identity",
    "sum-difference": "resolvent-sum-difference-identities",
    "axial": "s-spectrum-axial-symmetry",
    "spectrum": "s-spectrum-spheres",
    "bisectorial": "bisectoriality-certificate",
    "estimates": "resolvent-norm-estimates",
    "decomposition": "kernel-range-decomposition",
    "limits": "resolvent-limits",
    "rn": "rn-approximants-density",
    "omega": "omega-functional-calculus",
    "omega-invariance": "omega-contour-independence",
    "hinf-left": "left-hinfty-calculus",
    "hinf-right": "right-hinfty-well-defined",
    "approximants": "right-hinfty-closure-reformulation",
    "dense-domain": "right-hinfty-dense-domain",
    "relations": "multivalued-operator-algebra",
    "linearity": "hinfty-linearity",
    "product": "hinfty-product-rule",
    "rational": "right-rational-calculus",
}

TOLERANCES = {
    "algebra": 1e-12,
    "series": 1e-9,
    "identity": 1e-10,
    "axial": 1e-10,
    "spectrum": 1e-8,
    "principal_angle": 1e-6,
    "limit_ratio": 1e-6,
    "rn": 1e-6,
    "omega": 1e-8,
    "omega_invariance": 1e-7,
    "hinf": 1e-7,
    "approximant": 1e-8,
    "relations": 1e-10,
    "equality": 1e-7,
    "containment": 1e-8,
}

DEFAULT_OPTIONS = {
    "algebra_samples": 10000,
    "series_points": 20,
    "identity_points": 50,
    "rn_vectors": 10,
    "invariance_units": 3,
    "relation_cases": 12,
}

DEFAULT_SECTOR = {"omega": 0.6, "phi": 0.9, "theta": 1.2}


def load_schema(name="scenario"):
    text = resources.files("sspectral").joinpath("schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


@dataclass
class ScenarioConfig:
    generator: dict
    n: int
    d: int
    sector: ca.SectorSpec
    quadrature: dict = field(default_factory=dict)
    suites: list = field(default_factory=lambda: list(SUITES))
    seed: int = 0
    rng: str = "PCG64"
    count: int = 1
    options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data):
        try:
            jsonschema.validate(data, load_schema("scenario"))
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid scenario: {exc.message}") from None
        unknown = set(data.get("suites", [])) - set(SUITES)
        if unknown:
            raise ConfigError(f"unknown suites: {sorted(unknown)}")
        try:
            sector = ca.SectorSpec(**data.get("sector", DEFAULT_SECTOR))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        gen = copy.deepcopy(data["generator"])
        gen.setdefault("params", {})
        d = data.get("d")
        if gen["kind"] == "DiscretizedDirac":
            d = gen["params"].get("points", d or 8)
        if d is None:
            raise ConfigError("d is required for this generator")
        options = dict(DEFAULT_OPTIONS)
        options.update(data.get("options", {}))
        return cls(gen, int(data.get("n", 1)), int(d), sector, dict(data.get("quadrature", {})),
                   list(data.get("suites", SUITES)), int(data.get("seed", 0)),
                   data.get("rng", "PCG64"), int(data.get("count", 1)), options)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return {"generator": self.generator, "n": self.n, "d": self.d,
                "sector": self.sector.to_dict(), "quadrature": self.quadrature,
                "suites": self.suites, "seed": self.seed, "rng": self.rng,
                "count": self.count, "options": self.options}

    def contour(self, J=None, phi=None):
        sector = self.sector
        if phi is not None:
            sector = ca.SectorSpec(min(sector.omega, phi / 2), phi, max(sector.theta, phi + 1e-6))
        return ca.ContourSpec(sector, J or ca.default_units(self.n)[0], **self.quadrature)

    def generator_rng(self, *tags):
        if self.rng != "PCG64":
            raise ConfigError(f"unsupported generator {self.rng!r}")
        words = [self.seed] + [zlib.crc32(str(t).encode()) for t in tags]
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))


# -- generators -------------------------------------------------------------------------

@dataclass
class GeneratedOperator:
    name: str
    op: la.RightLinearOperator
    spheres: list  # spectral spheres of the diagonal part, when known
    meta: dict = field(default_factory=dict)


def _random_paravector(rng, n, omega):
    c = rng.uniform(0.5, 4.0) * (1 if rng.random() < 0.5 else -1)
    phase = rng.uniform(0.0, 0.9 * omega)
    r = abs(c) * math.tan(phase)
    J = cl.random_unit(n, rng) if n > 1 else cl.ImaginaryUnit((1.0 if rng.random() < 0.5 else -1.0,))
    return cl.paravector_slice(c, r, J)


def _diagonal(cfg, rng, zeros):
    entries = [_random_paravector(rng, cfg.n, cfg.sector.omega) for _ in range(cfg.d)]
    for k in range(min(zeros, cfg.d)):
        entries[k] = cl.Paravector(0.0, (0.0,) * cfg.n)
    spheres = la._merge_spheres([(p.s0, p.imag_norm) for p in entries], la.SPHERE_MERGE_TOL)
    return la.RightLinearOperator.diag([p.element for p in entries]), spheres


def _similarity(cfg, rng, D):
    params = cfg.generator["params"]
    rho = float(params.get("rho", 0.5))
    max_cond = float(params.get("max_cond", 20.0))
    if not 0 < rho < 1:
        raise ConfigError("rho must lie in (0, 1)")
    for _ in range(100):
        G = la.RightLinearOperator(cfg.n, cfg.d, rng.standard_normal((cfg.d, cfg.d, 2 ** cfg.n)))
        S = la.RightLinearOperator.identity(cfg.n, cfg.d) + G * (rho / la.op_norm(G))
        cond = float(np.linalg.cond(S.embedding))
        if cond <= max_cond:
            return la.op_compose(la.op_compose(S, D), la.op_inverse(S)), cond
    raise ConfigError("could not draw a similarity within the condition bound")


def dirac_operator(points, amplitude=0.0, n=1):
    """Central differences for ``e_1 a(x) d/dx`` on a periodic grid of ``[0, 1)``."""
    if points < 3:
        raise ConfigError("need at least 3 grid points")
    if not abs(amplitude) < 1:
        raise ConfigError("amplitude must be below 1 so that a(x) > 0")
    h = 1.0 / points
    x = np.arange(points) * h
    a = 1.0 + amplitude * np.cos(2 * math.pi * x)
    e1 = cl.basis_element(n, 1).coeffs
    entries = np.zeros((points, points, 2 ** n))
    for k in range(points):
        entries[k, (k + 1) % points] += e1 * a[k] / (2 * h)
        entries[k, (k - 1) % points] -= e1 * a[k] / (2 * h)
    return la.RightLinearOperator(n, points, entries)


def generate_operators(cfg):
    kind = cfg.generator["kind"]
    params = cfg.generator["params"]
    rng = cfg.generator_rng("operators")
    kernel_ops = set(params.get("kernel_ops", []))
    zeros = int(params.get("zero_spheres", 1))
    out = []
    for i in range(cfg.count):
        if kind == "DiscretizedDirac":
            T = dirac_operator(int(params.get("points", cfg.d)), float(params.get("amplitude", 0.0)), cfg.n)
            out.append(GeneratedOperator(f"op{i}", T, None, {"kind": kind}))
            continue
        D, spheres = _diagonal(cfg, rng, zeros if i in kernel_ops else 0)
        meta = {"kind": kind, "kernel": i in kernel_ops}
        if kind == "DiagonalModel":
            T = D
        elif kind == "SimilarityModel":
            T, meta["cond"] = _similarity(cfg, rng, D)
        else:
            raise ConfigError(f"unknown generator {kind!r}")
        out.append(GeneratedOperator(f"op{i}", T, spheres, meta))
    return out


def generate_operator(cfg):
    return generate_operators(cfg)[0].op


# -- records --------------------------------------------------------------------------

@dataclass
class Record:
    name: str
    anchor: str
    status: str
    residual: float
    tolerance: float
    runtime: float = 0.0
    bound: str = "upper"
    detail: str = ""

    def to_dict(self):
        out = {"name": self.name, "anchor": self.anchor, "status": self.status,
               "residual": _jsonable(self.residual), "tolerance": _jsonable(self.tolerance),
               "runtime": self.runtime, "bound": self.bound}
        if self.detail:
            out["detail"] = self.detail
        return out


def _jsonable(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _record(name, anchor, residual, tolerance, bound="upper", detail="", runtime=0.0):
    residual = float(residual)
    if not math.isfinite(residual):
        ok = False
    elif bound == "upper":
        ok = residual <= tolerance
    else:
        ok = residual >= tolerance
    return Record(name, ANCHORS[anchor], "pass" if ok else "fail", residual, tolerance,
                  runtime, bound, detail)


@dataclass
class VerificationReport:
    config: dict
    records: list

    @property
    def summary(self):
        counts = {"pass": 0, "fail": 0, "skip": 0}
        for r in self.records:
            counts[r.status] += 1
        counts["total"] = len(self.records)
        return counts

    @property
    def ok(self):
        return all(r.status != "fail" for r in self.records)

    def anchors_covered(self):
        return sorted({r.anchor for r in self.records if r.status != "skip"})

    def to_dict(self, runtime=True):
        recs = [r.to_dict() for r in self.records]
        if not runtime:
            for r in recs:
                r.pop("runtime")
        return {"config": self.config, "summary": self.summary,
                "anchors": self.anchors_covered(), "records": recs}

    def canonical(self):
        """JSON text without timings; equal configurations give equal text."""
        return json.dumps(self.to_dict(runtime=False), sort_keys=True)

    def failures(self):
        return [r for r in self.records if r.status == "fail"]


def _rel(A, B):
    """``||A - B|| / max(1, ||B||)`` in the embedding norm."""
    return la.op_norm(A - B) / max(1.0, la.op_norm(B))


class _Checks:
    """Collects timed records for one (suite, operator) task."""

    def __init__(self, prefix):
        self.prefix = prefix
        self.records = []

    def run(self, name, anchor, tolerance, fn_, bound="upper"):
        t0 = time.perf_counter()
        detail = ""
        try:
            out = fn_()
            if isinstance(out, tuple):
                residual, detail = out
            else:
                residual = out
        except SpectralError as exc:
            residual, detail = math.inf, f"{type(exc).__name__}: {exc}"
        except (ValueError, np.linalg.LinAlgError) as exc:
            residual, detail = math.inf, f"{type(exc).__name__}: {exc}"
        rec = _record(f"{self.prefix}/{name}", anchor, residual, tolerance, bound, detail,
                      time.perf_counter() - t0)
        self.records.append(rec)
        return rec

    def skip(self, name, anchor, reason):
        self.records.append(Record(f"{self.prefix}/{name}", ANCHORS[anchor], "skip",
                                   None, None, 0.0, "upper", reason))


# -- algebra and relations suites -------------------------------------------------------------

def _algebra_suite(cfg, checks, n=None):
    n = n or cfg.n
    rng = cfg.generator_rng("algebra", n)
    N = int(cfg.options["algebra_samples"])
    b = 2 ** n
    a, bb, c = (rng.standard_normal((N, b)) for _ in range(3))
    nrm = lambda v: np.linalg.norm(v, axis=-1)  # noqa: E731
    mul = lambda x, y: cl.mul_coeffs(x, y, n)  # noqa: E731
    tol = TOLERANCES["algebra"]

    def assoc():
        lhs, rhs = mul(mul(a, bb), c), mul(a, mul(bb, c))
        return float(np.max(nrm(lhs - rhs) / (nrm(a) * nrm(bb) * nrm(c))))

    def anticomm():
        worst = 0.0
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                ei, ej = cl.basis_element(n, i), cl.basis_element(n, j)
                s = ei * ej + ej * ei
                target = -2.0 if i == j else 0.0
                worst = max(worst, float(np.max(np.abs(s.coeffs - np.eye(b)[0] * target))))
        return worst

    sign = cl.conj_signs(n)

    def conj():
        lhs = mul(a, bb) * sign
        rhs = mul(bb * sign, a * sign)
        return float(np.max(nrm(lhs - rhs) / (nrm(a) * nrm(bb))))

    def para_norm():
        p, q = np.zeros((N, b)), np.zeros((N, b))
        p[:, : n + 1] = a[:, : n + 1]
        q[:, : n + 1] = c[:, : n + 1]
        prod = nrm(mul(p, q))
        mult = np.abs(prod - nrm(p) * nrm(q)) / (nrm(p) * nrm(q))
        ss = mul(p, p * sign)
        sq = nrm(p) ** 2
        target = np.zeros_like(ss)
        target[:, 0] = sq
        herm = nrm(ss - target) / sq
        return float(max(mult.max(), herm.max()))

    def embedding():
        k = min(N, 500)
        L = lambda x: cl.left_matrix(x, n)  # noqa: E731
        lhs = L(mul(a[:k], bb[:k]))
        rhs = L(a[:k]) @ L(bb[:k])
        return float(np.max(np.linalg.norm(lhs - rhs, axis=(1, 2))
                            / (nrm(a[:k]) * nrm(bb[:k]))))

    checks.run(f"n{n}/associativity", "algebra", tol, assoc)
    checks.run(f"n{n}/anticommutation", "algebra", tol, anticomm)
    checks.run(f"n{n}/conjugation", "algebra", tol, conj)
    checks.run(f"n{n}/paravector-norm", "algebra", tol, para_norm)
    checks.run(f"n{n}/left-regular", "embedding", tol, embedding)


def _integer_generators(rng, n, d, k, zero_first=False):
    """Integer pair vectors and their right-multiplied images (still integer)."""
    N = d * 2 ** n
    G = rng.integers(-1, 2, size=(2 * N, k)).astype(float)
    if zero_first:
        G[:N] = 0.0
    imgs = [G] + [act @ G for act in rl._blade_actions(n, d)]
    return np.hstack(imgs)


def _combos(G, box=2):
    k = G.shape[1]
    coeffs = np.array(list(itertools.product(range(-box, box + 1), repeat=k)), dtype=float)
    return coeffs @ G.T  # rows are pair vectors with integer entries


def _span(rows, n, d):
    N = d * 2 ** n
    if not rows:
        return rl.LinearRelation(n, d, np.zeros((2 * N, 0)))
    M = np.array(rows).T
    return rl.LinearRelation(n, d, rl.orth(M))


def brute_force_sum(GA, GB, n, d, box=2):
    """Pairs ``(v, w1 + w2)`` found by matching integer combinations of the generators."""
    N = d * 2 ** n
    A, B = _combos(GA, box), _combos(GB, box)
    index = {}
    for row in B:
        index.setdefault(row[:N].round().astype(np.int64).tobytes(), []).append(row[N:])
    out = []
    for row in A:
        for w2 in index.get(row[:N].round().astype(np.int64).tobytes(), ()):
            out.append(np.concatenate([row[:N], row[N:] + w2]))
    return _span(out, n, d)


def brute_force_compose(GA, GB, n, d, box=2):
    """Pairs ``(v, u)`` with ``(v, w)`` from ``B`` and ``(w, u)`` from ``A``."""
    N = d * 2 ** n
    A, B = _combos(GA, box), _combos(GB, box)
    index = {}
    for row in A:
        index.setdefault(row[:N].round().astype(np.int64).tobytes(), []).append(row[N:])
    out = []
    for row in B:
        for u in index.get(row[N:].round().astype(np.int64).tobytes(), ()):
            out.append(np.concatenate([row[:N], u]))
    return _span(out, n, d)


def _stability_defect(A):
    worst = 0.0
    for act in rl._unit_actions(A.n, A.d):
        moved = act @ A.basis
        worst = max(worst, float(np.linalg.norm(moved - A.basis @ (A.basis.T @ moved), 2))
                    if A.dim else 0.0)
    return worst


def _relations_suite(cfg, checks):
    rng = cfg.generator_rng("relations")
    tol = TOLERANCES["relations"]
    n = 1
    cases = int(cfg.options["relation_cases"])
    for c in range(cases):
        d = 1 + c % 2
        kA, kB = (1, 1) if d == 2 else (2, 1)
        GA = _integer_generators(rng, n, d, kA)
        GB = _integer_generators(rng, n, d, kB, zero_first=(c % 4 == 3))
        A = rl.rel_from_pairs(GA[: d * 2], GA[d * 2:], n, d)
        B = rl.rel_from_pairs(GB[: d * 2], GB[d * 2:], n, d)
        S, C = rl.rel_sum(A, B), rl.rel_compose(A, B)
        pre = f"case{c:02d}"
        checks.run(f"{pre}/sum-vs-enumeration", "relations", tol,
                   lambda: rl.rel_distance(S, brute_force_sum(GA, GB, n, d)))
        checks.run(f"{pre}/compose-vs-enumeration", "relations", tol,
                   lambda: rl.rel_distance(C, brute_force_compose(GA, GB, n, d)))
        checks.run(f"{pre}/outputs-right-linear", "relations", tol,
                   lambda: max(_stability_defect(S), _stability_defect(C)))

    # faithful image of the operator algebra
    for d in (1, 2):
        T = la.RightLinearOperator(n, d, rng.integers(-2, 3, size=(d, d, 2)).astype(float))
        S = la.RightLinearOperator(n, d, rng.integers(-2, 3, size=(d, d, 2)).astype(float))
        a = cl.CliffordElement(n, rng.integers(-2, 3, size=2).astype(float))
        G = rl.rel_from_operator
        checks.run(f"graphs-d{d}/sum", "relations", tol,
                   lambda: rl.rel_distance(rl.rel_sum(G(T), G(S)), G(la.op_add(T, S))))
        checks.run(f"graphs-d{d}/compose", "relations", tol,
                   lambda: rl.rel_distance(rl.rel_compose(G(T), G(S)), G(la.op_compose(T, S))))
        checks.run(f"graphs-d{d}/scale", "relations", tol,
                   lambda: rl.rel_distance(rl.rel_scale_left(a, G(T)), G(la.op_scale_left(a, T))))


# -- per-operator suites ------------------------------------------------------------------------

def _random_resolvent_point(rng, T, scale):
    n = T.n
    for _ in range(1000):
        v = rng.standard_normal(n + 1) * scale
        s = cl.Paravector(float(v[0]), tuple(float(x) for x in v[1:]))
        Q = ca.qs_operator(T, s).embedding
        sv = np.linalg.svd(Q, compute_uv=False)
        if sv[-1] > 1e-2 * max(1.0, sv[0]) and sv[-1] > 1e-2:
            return s
    raise ConfigError("could not sample a resolvent point")


def _resolvent_suite(cfg, checks, item):
    T = item.op
    rng = cfg.generator_rng("resolvent", item.name)
    normT = max(la.op_norm(T), 1e-3)

    def series():
        worst = 0.0
        for _ in range(int(cfg.options["series_points"])):
            J = cl.random_unit(T.n, rng)
            r = normT * rng.uniform(2.05, 5.0)
            ang = rng.uniform(0, math.pi)
            s = cl.paravector_slice(r * math.cos(ang), r * math.sin(ang), J)
            SL = ca.s_resolvent_left(T, s)
            err = la.op_norm(ca.neumann_series(T, s, K=60) - SL) / la.op_norm(SL)
            worst = max(worst, err)
        return worst

    points = [_random_resolvent_point(rng, T, 1.0 + normT) for _ in range(int(cfg.options["identity_points"]))]

    def identity():
        worst = 0.0
        one = la.RightLinearOperator.identity(T.n, T.d)
        for s in points:
            SL = ca.s_resolvent_left(T, s)
            res = la.op_compose(T, SL) - la.op_scale_right(SL, s.element) + one
            worst = max(worst, la.op_norm(res))
        return worst

    def sum_difference():
        worst = 0.0
        for s in points:
            rep = ca.resolvent_identities_check(T, s)
            worst = max(worst, rep["right_sum"], rep["left_sum"], rep["right_difference"],
                        rep["left_difference"])
        return worst

    def axial():
        worst = 0.0
        for s in points[:10]:
            x, y, _ = s.split()
            other = cl.paravector_slice(x, y, cl.random_unit(T.n, rng))
            A, B = ca.qs_inverse(T, s), ca.qs_inverse(T, other)
            worst = max(worst, _rel(A, B))
        return worst

    def spectrum():
        found = ca.s_spectrum(T)
        if item.spheres is None:
            return 0.0, f"{len(found)} spheres"
        want = sorted((s.center, s.radius) for s in item.spheres)
        got = sorted((s.center, s.radius) for s in found)
        if len(want) != len(got):
            return math.inf, f"expected {len(want)} spheres, found {len(got)}"
        return max(math.hypot(a[0] - b[0], a[1] - b[1]) for a, b in zip(want, got))

    checks.run("neumann-series", "series", TOLERANCES["series"], series)
    checks.run("resolvent-equation", "resolvent-identity", TOLERANCES["identity"], identity)
    checks.run("sum-difference-identities", "sum-difference", TOLERANCES["identity"], sum_difference)
    checks.run("axial-symmetry", "axial", TOLERANCES["axial"], axial)
    checks.run("spectrum-spheres", "spectrum", TOLERANCES["spectrum"], spectrum)


def _certificate(cfg, T):
    return ca._certified(T, cfg.sector.phi)


def _lemma_suite(cfg, checks, item):
    T = item.op
    holder = {}

    def certify():
        cert = _certificate(cfg, T)
        holder["cert"] = cert
        return (0.0 if cert.passed else 1.0), f"C_phi={cert.C_phi:.6g} {cert.reason}".strip()

    checks.run("certified", "bisectorial", 0.0, certify)
    cert = holder.get("cert")
    if cert is None:
        checks.skip("estimates", "estimates", "certification raised")
        return
    checks.run("sample-count", "estimates", 500, lambda: float(cert.values.size), bound="lower")
    rep = holder["lemma"] = ca.lemma_estimates(T, cert)
    for key in ("right_resolvent", "qs_inverse", "t_qs_inverse", "t2_qs_inverse"):
        checks.run(f"estimate-{key.replace('_', '-')}", "estimates", 0.0,
                   lambda key=key: (float(rep.violations[key]), f"max ratio {rep.ratios[key]:.6g}"))


def _decomposition_suite(cfg, checks, item):
    T = item.op
    dec = ca.decomposition_check(T)
    checks.run("dimension-sum", "decomposition", 0.0,
               lambda: float(abs(dec["dim_kernel"] + dec["dim_range"] - dec["dim"])),)
    checks.run("principal-angle", "decomposition", TOLERANCES["principal_angle"],
               lambda: (dec["min_angle"], f"dim ker={dec['dim_kernel']}"), bound="lower")
    lim = ca.limit_lemma_check(T, cfg.sector.phi)
    checks.run("limit-infinity", "limits", TOLERANCES["limit_ratio"],
               lambda: lim["infinity_ratio"] if lim["infinity_monotone"] else math.inf)
    checks.run("limit-zero", "limits", TOLERANCES["limit_ratio"],
               lambda: lim["zero_ratio"] if lim["zero_monotone"] else math.inf)


def _rn_suite(cfg, checks, item):
    T = item.op
    rng = cfg.generator_rng("rn", item.name)
    ran = la.stack_basis(la.range_basis(T), T.dim)
    vs = [ran @ rng.standard_normal(ran.shape[1]) for _ in range(int(cfg.options["rn_vectors"]))]
    vs = [v / np.linalg.norm(v) for v in vs]
    ks = [10 ** j for j in range(1, 7)]
    rns = {k: hi.rn_operator(T, k).embedding for k in ks}
    for m in (1, 2):
        powers = {k: np.linalg.matrix_power(rns[k], m) for k in ks}
        errs = np.array([[np.linalg.norm(powers[k] @ v - v) for k in ks] for v in vs])

        def final(errs=errs):
            return float(errs[:, -1].max())

        def monotone(errs=errs):
            increase = np.diff(errs, axis=1)
            return float(max(0.0, increase.max()))

        checks.run(f"m{m}/error-at-1e6", "rn", TOLERANCES["rn"], final)
        checks.run(f"m{m}/monotone-decrease", "rn", 0.0, monotone)
        if not ca.decomposition_check(T)["dim_kernel"]:
            checks.run(f"m{m}/full-range", "rn", 0.0,
                       lambda m=m: float(T.dim - np.linalg.matrix_rank(powers[ks[0]])))


def _omega_functions():
    f1 = fn.make_rational(fn.make_polynomial([0, 1]), fn.make_polynomial([1, 0, 2, 0, 1]),
                          name="s/(1+s^2)^2")
    f2 = fn.make_rational(fn.make_polynomial([0, 0, 0, 1]),
                          fn.make_polynomial([1, 0, 3, 0, 3, 0, 1]), name="s^3/(1+s^2)^3")
    return [(f1, 1, 2), (f2, 3, 3)]


def _algebraic_rational(T, k, j):
    """``T^k (I + T^2)^{-j}``."""
    one = la.RightLinearOperator.identity(T.n, T.d)
    return la.op_compose(la.op_power(T, k), la.op_power(la.op_inverse(one + T @ T), j))


def _omega_suite(cfg, checks, item):
    T = item.op
    rng = cfg.generator_rng("omega", item.name)
    base = cfg.contour()
    for f, k, j in _omega_functions():
        oracle = _algebraic_rational(T, k, j)
        tag = f"f{k}{j}"
        results = {}
        for side in ("left", "right"):
            def run(side=side):
                results[side] = ca.omega_calc(f, T, base, side=side)
                return _rel(results[side], oracle)
            checks.run(f"{tag}/{side}-vs-algebraic", "omega", TOLERANCES["omega"], run)
        if len(results) == 2:
            checks.run(f"{tag}/left-vs-right", "omega", TOLERANCES["omega"],
                       lambda: _rel(results["left"], results["right"]))

        def invariance(f=f):
            ref = results.get("left") or ca.omega_calc(f, T, base, side="left")
            worst = 0.0
            phi2 = 0.5 * (cfg.sector.phi + cfg.sector.theta)
            units = [cl.random_unit(T.n, rng) for _ in range(int(cfg.options["invariance_units"]))]
            for phi in (cfg.sector.phi, phi2):
                for J in units:
                    other = ca.omega_calc(f, T, cfg.contour(J=J, phi=phi), side="left")
                    worst = max(worst, _rel(other, ref))
            return worst
        checks.run(f"{tag}/contour-invariance", "omega-invariance", TOLERANCES["omega_invariance"],
                   invariance)


def _injective(item):
    return not la.kernel_basis(item.op)


def _hinf_left_suite(cfg, checks, item):
    T = item.op
    tol = TOLERANCES["hinf"]
    c = cfg.contour()
    s = fn.identity_function()
    s2 = fn.make_polynomial([0, 0, 1])
    checks.run("identity", "hinf-left", tol, lambda: _rel(hi.hinf_left(s, T, c), T))
    checks.run("square", "hinf-left", tol, lambda: _rel(hi.hinf_left(s2, T, c), T @ T))
    f, k, j = _omega_functions()[0]
    checks.run("decaying-vs-omega", "hinf-left", tol,
               lambda: _rel(hi.hinf_left(f, T, c), ca.omega_calc(f, T, c, side="left")))

    def e_paths():
        info = {}
        hi.hinf_left(s2, T, c, check_e=True, info=info)
        return info["e_quadrature"] / max(1.0, la.op_norm(hi.e_operator(T, info["provenance"]["m"])))
    checks.run("regularizer-paths", "hinf-left", tol, e_paths)


def _clifford_coeff(rng, n):
    return cl.CliffordElement(n, rng.standard_normal(2 ** n))


def _second_unit(n):
    return cl.basis_element(n, 2) if n >= 2 else cl.basis_element(n, 1)


def _hinf_right_suite(cfg, checks, item):
    T = item.op
    rng = cfg.generator_rng("hinf-right", item.name)
    tol = TOLERANCES["hinf"]
    c = cfg.contour()
    n = T.n
    p = fn.make_polynomial([_clifford_coeff(rng, n), _clifford_coeff(rng, n), _clifford_coeff(rng, n)])

    def m_independence():
        m = hi.choose_regularizer(p).m
        A = hi.hinf_right(p, T, c, m=m)
        B = hi.hinf_right(p, T, c, m=m + 2)
        return _rel(A.as_operator, B.as_operator)

    intrinsic = fn.make_polynomial([1.0, 0.5, 1.0])

    def intrinsic_agreement():
        return _rel(hi.hinf_right(intrinsic, T, c).as_operator, hi.hinf_left(intrinsic, T, c))

    decaying = fn.make_rational(fn.make_polynomial([0, _clifford_coeff(rng, n), _clifford_coeff(rng, n)]),
                                fn.make_polynomial([1, 0, 2, 0, 1]))

    def decaying_agreement():
        return _rel(hi.hinf_right(decaying, T, c).as_operator, ca.omega_calc(decaying, T, c, side="right"))

    def dense_domain():
        res = hi.hinf_right(p, T, c)
        return float(T.dim - rl.rel_domain(res.relation).shape[1])

    def approximants():
        choice = hi.choose_regularizer(p)
        fe = fn.f_mul_intrinsic(p, choice.function, order="FG")
        feT = ca.omega_calc(fe, T, c, side="right").embedding
        e_inv = la.op_inverse(hi.e_operator(T, choice.m)).embedding
        fT = hi.poly_calc_right(p, T).embedding
        worst = 0.0
        for k in (10, 100, 1000):
            R = np.linalg.matrix_power(hi.rn_operator(T, k).embedding, choice.m)
            v = rng.standard_normal(T.dim)
            vn = R @ (v / np.linalg.norm(v))
            worst = max(worst, float(np.linalg.norm(feT @ (e_inv @ vn) - fT @ vn)))
        return worst

    checks.run("m-independence", "hinf-right", tol, m_independence)
    checks.run("intrinsic-vs-left", "hinf-right", tol, intrinsic_agreement)
    checks.run("decaying-vs-omega", "hinf-right", tol, decaying_agreement)
    checks.run("dense-domain", "dense-domain", 0.0, dense_domain)
    checks.run("approximant-identity", "approximants", TOLERANCES["approximant"], approximants)


def _product_suite(cfg, checks, item):
    T = item.op
    rng = cfg.generator_rng("product", item.name)
    c = cfg.contour()
    n = T.n
    a = cl.basis_element(n, 1, 2) if n >= 2 else cl.basis_element(n, 1)
    b = _clifford_coeff(rng, n)
    s = fn.identity_function()
    s2 = fn.make_polynomial([0, 0, 1])
    reg1, reg2 = fn.regularizer(1), fn.regularizer(2)
    one_plus_s2 = fn.make_polynomial([1, 0, 1])
    left_poly = fn.f_scale(b, s2, side="right")
    left_decay = fn.f_scale(b, reg2, side="right")
    right_poly = fn.f_add(fn.f_scale(a, s, side="left"), s2)
    right_decay = fn.f_scale(b, reg2, side="left")

    def linearity(side, f, g):
        def go():
            entries = hi.hinf_linearity_check(f, g, a, T, c, side=side)
            return max(e.value for e in entries), ", ".join(f"{e.statement}={e.value:.3g}" for e in entries)
        return go

    eq, inc = TOLERANCES["equality"], TOLERANCES["containment"]
    checks.run("linearity-left", "linearity", eq, linearity("left", left_poly, left_decay))
    checks.run("linearity-right", "linearity", eq, linearity("right", right_poly, right_decay))

    def rule(f, g, label):
        def go():
            for e in hi.hinf_product_check(f, g, T, c):
                if e.statement == label:
                    return e.value
            raise ValueError(f"rule {label} does not apply")
        return go

    checks.run("rule-left-intrinsic-decaying", "product", inc,
               rule(reg1, left_poly, "left-decaying-intrinsic-factor"))
    checks.run("rule-left-second-decaying", "product", eq,
               rule(one_plus_s2, left_decay, "left-decaying-second-factor"))
    checks.run("rule-right-first-decaying", "product", eq,
               rule(right_decay, one_plus_s2, "right-decaying-first-factor"))
    checks.run("rule-right-intrinsic-decaying", "product", inc,
               rule(right_poly, reg1, "right-decaying-intrinsic-factor"))


def _rational_suite(cfg, checks, item):
    T = item.op
    c = cfg.contour()
    e2 = _second_unit(T.n)
    p = fn.make_polynomial([0, e2, 1])
    q = fn.make_polynomial([1, 0, 2, 0, 1])
    holder = {}

    def relation():
        holder["res"] = hi.rational_calc_right(p, q, T, c)
        return holder["res"].discrepancy["relation_distance"]

    checks.run("relation-distance", "rational", TOLERANCES["hinf"], relation)
    checks.run("operator-discrepancy", "rational", TOLERANCES["hinf"],
               lambda: holder["res"].discrepancy.get("operator_norm", math.inf)
               / max(1.0, la.op_norm(holder["res"].as_operator)))


_PER_OPERATOR = {
    "resolvent": (_resolvent_suite, False),
    "lemma-estimates": (_lemma_suite, False),
    "decomposition": (_decomposition_suite, False),
    "rn-density": (_rn_suite, False),
    "omega": (_omega_suite, False),
    "hinfty-left": (_hinf_left_suite, True),
    "hinfty-right": (_hinf_right_suite, True),
    "product-rules": (_product_suite, True),
    "rational": (_rational_suite, True),
}


_SUITE_ANCHOR = {
    "algebra": "algebra", "resolvent": "resolvent-identity", "lemma-estimates": "estimates",
    "decomposition": "decomposition", "rn-density": "rn", "omega": "omega",
    "hinfty-left": "hinf-left", "hinfty-right": "hinf-right", "relations": "relations",
    "product-rules": "product", "rational": "rational",
}


def _certified_ok(cfg, T):
    try:
        return _certificate(cfg, T).passed
    except SpectralError:
        return False


def _threads():
    try:
        return max(1, int(os.environ["SSPECTRAL_THREADS"]))
    except (KeyError, ValueError):
        return min(4, os.cpu_count() or 1)


def run_suite(cfg, operators=None):
    """Run the configured suites; returns a :class:`VerificationReport`."""
    if isinstance(cfg, dict):
        cfg = ScenarioConfig.from_dict(cfg)
    items = operators if operators is not None else (
        generate_operators(cfg) if set(cfg.suites) & set(_PER_OPERATOR) else [])
    tasks = []
    for suite in cfg.suites:
        if suite == "algebra":
            tasks.append((suite, None))
        elif suite == "relations":
            tasks.append((suite, None))
        else:
            tasks.extend((suite, item) for item in items)

    def run(task):
        suite, item = task
        checks = _Checks(suite if item is None else f"{suite}/{item.name}")
        if suite == "algebra":
            _algebra_suite(cfg, checks)
        elif suite == "relations":
            _relations_suite(cfg, checks)
        else:
            fn_, needs_injective = _PER_OPERATOR[suite]
            if needs_injective and not _injective(item):
                checks.skip("all", _SUITE_ANCHOR[suite], "operator is not injective")
            elif needs_injective and not _certified_ok(cfg, item.op):
                checks.skip("all", _SUITE_ANCHOR[suite], "certification failed")
            else:
                try:
                    fn_(cfg, checks, item)
                except SpectralError as exc:
                    checks.records.append(_record(f"{checks.prefix}/error", _SUITE_ANCHOR[suite],
                                                  math.inf, 0.0,
                                                  detail=f"{type(exc).__name__}: {exc}"))
        return checks.records

    # warm shared caches so concurrent tasks only read them
    for item in items:
        ca._eigen(item.op)
        try:
            ca.spectral_angle(item.op)
            _certificate(cfg, item.op)
        except SpectralError:
            pass
    workers = _threads()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, tasks))
    else:
        chunks = [run(t) for t in tasks]
    records = sorted((r for chunk in chunks for r in chunk), key=lambda r: r.name)
    return VerificationReport(cfg.to_dict(), records)


def certification_profiles(cfg, operators=None):
    """CSV rows ``(operator, |s|, angle, |s| ||S_L^{-1}||)`` for each generated operator."""
    items = operators if operators is not None else generate_operators(cfg)
    rows = []
    for item in items:
        try:
            cert = _certificate(cfg, item.op)
        except SpectralError:
            continue
        rows.extend((item.name,) + row for row in cert.profile_rows())
    return rows
