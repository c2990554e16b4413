import json
import pathlib

import jsonschema
import numpy as np
import pytest

from oracles import enumerate_compose, enumerate_sum, span_projector, stabilized
from sspectral import calculus as ca
from sspectral import clifford as cl
from sspectral import linalg as la
from sspectral import harness as hs
from sspectral.errors import ConfigError

DOCS = pathlib.Path(__file__).resolve().parent.parent / "docs"


def config(**kw):
    data = {"generator": {"kind": "DiagonalModel"}, "n": 1, "d": 2, "seed": 1}
    data.update(kw)
    return hs.ScenarioConfig.from_dict(data)


class TestConfig:
    def test_defaults(self):
        cfg = config()
        assert cfg.suites == list(hs.SUITES)
        assert cfg.rng == "PCG64"
        assert cfg.options["algebra_samples"] == 10000

    @pytest.mark.parametrize("bad", [
        {"generator": {"kind": "Nope"}, "d": 2},
        {"generator": {"kind": "DiagonalModel"}, "d": 2, "suites": ["plots"]},
        {"generator": {"kind": "DiagonalModel"}, "d": 2, "n": 7},
        {"generator": {"kind": "DiagonalModel"}, "d": 2, "sector": {"omega": 1.0, "phi": 0.5, "theta": 1.2}},
        {"generator": {"kind": "DiagonalModel"}, "d": 2, "rng": "MT19937"},
        {"generator": {"kind": "DiagonalModel"}, "d": 2, "extra": 1},
        {"generator": {"kind": "DiagonalModel"}},
    ])
    def test_invalid(self, bad):
        with pytest.raises(ConfigError):
            hs.ScenarioConfig.from_dict(bad)

    def test_round_trip(self):
        cfg = config(count=2, suites=["omega"])
        again = hs.ScenarioConfig.from_dict(cfg.to_dict())
        assert again == cfg

    def test_contour(self):
        cfg = config(quadrature={"tol": 1e-9})
        c = cfg.contour()
        assert c.tol == 1e-9 and c.phi == cfg.sector.phi


class TestGenerators:
    def test_diagonal_deterministic(self):
        a = hs.generate_operator(config())
        b = hs.generate_operator(config())
        assert np.array_equal(a.entries, b.entries)
        c = hs.generate_operator(config(seed=2))
        assert not np.array_equal(a.entries, c.entries)

    def test_diagonal_spectrum_inside(self):
        cfg = config(n=2, d=4, count=5)
        for item in hs.generate_operators(cfg):
            assert ca.spectral_angle(item.op) < cfg.sector.omega
            for s in ca.s_spectrum(item.op):
                assert 0.5 - 1e-12 <= abs(complex(s.center, s.radius)) <= 4 + 1e-12

    def test_kernel_ops(self):
        cfg = config(n=2, d=3, count=2, generator={"kind": "DiagonalModel", "params": {"kernel_ops": [1]}})
        items = hs.generate_operators(cfg)
        assert ca.decomposition_check(items[0].op)["dim_kernel"] == 0
        assert ca.decomposition_check(items[1].op)["dim_kernel"] == 4

    def test_similarity_preserves_spectrum(self):
        cfg = config(n=2, d=3, count=3, generator={"kind": "SimilarityModel", "params": {"max_cond": 20}})
        for item in hs.generate_operators(cfg):
            got = sorted((s.center, s.radius) for s in ca.s_spectrum(item.op))
            want = sorted((s.center, s.radius) for s in item.spheres)
            np.testing.assert_allclose(got, want, atol=1e-8)
            assert item.meta["cond"] <= 20

    def test_dirac(self):
        T = hs.dirac_operator(8)
        assert T.dim == 16
        # e1 times a skew difference matrix: the embedding is symmetric and the spectrum real
        np.testing.assert_allclose(T.embedding, T.embedding.T, atol=1e-14)
        assert ca.spectral_angle(T) == 0.0
        # constants and the alternating grid mode are in the kernel
        assert ca.decomposition_check(T)["dim_kernel"] == 4

    def test_dirac_variable_coefficient(self):
        T = hs.dirac_operator(8, amplitude=0.5)
        assert not np.allclose(T.embedding, T.embedding.T)
        assert ca.spectral_angle(T) < 1e-6
        with pytest.raises(ConfigError):
            hs.dirac_operator(8, amplitude=1.0)


class TestRunSuite:
    def test_algebra_fast(self):
        report = hs.run_suite(config(suites=["algebra"]))
        assert report.ok
        assert sum(r.runtime for r in report.records) < 1.0

    def test_omega_residuals(self):
        report = hs.run_suite(config(n=2, d=2, suites=["omega"]))
        assert report.ok
        for r in report.records:
            if "algebraic" in r.name:
                assert r.residual < 1e-8

    def test_rational_discrepancy(self):
        report = hs.run_suite(config(n=2, d=2, suites=["rational"]))
        assert report.ok
        assert all(r.residual < 1e-7 for r in report.records)

    def test_determinism(self):
        cfg = config(n=2, d=2, count=2, suites=["resolvent", "omega", "hinfty-right", "relations"],
                     options={"relation_cases": 3})
        assert hs.run_suite(cfg).canonical() == hs.run_suite(cfg).canonical()

    def test_records_sorted_and_anchored(self):
        report = hs.run_suite(config(n=2, d=2, suites=["decomposition", "rn-density"]))
        names = [r.name for r in report.records]
        assert names == sorted(names)
        assert all(r.anchor in hs.ANCHORS.values() for r in report.records)

    def test_anchor_coverage(self):
        cfg = config(n=2, d=2, count=1, options={"algebra_samples": 200, "relation_cases": 2})
        report = hs.run_suite(cfg)
        assert report.ok, report.failures()
        assert set(report.anchors_covered()) == set(hs.ANCHORS.values())

    def test_kernel_operator_skips_hinfty(self):
        cfg = config(n=1, d=2, count=2, suites=["decomposition", "hinfty-left", "hinfty-right"],
                     generator={"kind": "DiagonalModel", "params": {"kernel_ops": [0]}})
        report = hs.run_suite(cfg)
        skipped = {r.name.split("/")[0] for r in report.records if r.status == "skip"}
        assert skipped == {"hinfty-left", "hinfty-right"}
        assert all(r.status == "pass" for r in report.records if r.name.startswith("decomposition/op0"))

    def test_dirac_outcome_recorded(self):
        cfg = hs.ScenarioConfig.from_dict({"generator": {"kind": "DiscretizedDirac", "params": {"points": 8}},
                                           "suites": ["lemma-estimates", "hinfty-left"]})
        report = hs.run_suite(cfg)
        status = {r.name: r.status for r in report.records}
        assert status["lemma-estimates/op0/certified"] in ("pass", "fail")
        assert status["hinfty-left/op0/all"] == "skip"

    def test_failures_are_data(self):
        cfg = config(n=1, d=1, suites=["lemma-estimates", "omega", "hinfty-left"])
        rot = la.RightLinearOperator.from_elements([[cl.basis_element(1, 1)]])
        report = hs.run_suite(cfg, [hs.GeneratedOperator("op0", rot, None)])
        assert not report.ok
        assert report.failures()
        assert {r.name.split("/")[0] for r in report.failures()} >= {"lemma-estimates"}

    def test_report_schema(self):
        report = hs.run_suite(config(suites=["algebra"]))
        jsonschema.validate(report.to_dict(), hs.load_schema("report"))


class TestBruteForce:
    @pytest.mark.parametrize("seed", range(4))
    def test_matches_reference_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        GA = stabilized(rng.integers(-1, 2, size=(8, 1)).astype(float))
        GB = stabilized(rng.integers(-1, 2, size=(8, 1)).astype(float))
        GB[:4, 0] = GA[4:, 0]
        GB = stabilized(GB[:, :1])
        for ours, ref in ((hs.brute_force_sum, enumerate_sum), (hs.brute_force_compose, enumerate_compose)):
            rel = ours(GA, GB, 1, 2)
            P = span_projector(ref(GA, GB, 4))
            Q = rel.projector()
            assert np.linalg.norm((P if P is not None else 0 * Q) - Q) < 1e-10


class TestDocs:
    @pytest.mark.parametrize("name", ["scenario", "report"])
    def test_shipped_schema_matches_docs(self, name):
        doc = json.loads((DOCS / "schemas" / f"{name}.schema.json").read_text())
        assert doc == hs.load_schema(name)

    @pytest.mark.parametrize("path", sorted((DOCS / "scenarios").glob("*.json")), ids=lambda p: p.stem)
    def test_example_scenarios_valid(self, path):
        hs.ScenarioConfig.from_json(path)

    def test_certification_profiles(self):
        cfg = config(count=2)
        rows = hs.certification_profiles(cfg)
        assert rows and len(rows[0]) == 4
