"""Verification harness: reports, rows, tolerances, output formats."""

import json
import math

import pytest

from heisgeo.quadrature import QuadratureSpec
from heisgeo.verify import (CSV_COLUMNS, Report, VerifyConfig, make_row,
                            expected_projection, report_all, run,
                            verify_anydirection, verify_cauchy,
                            verify_lemma_kr, verify_pansu_area,
                            verify_pansu_projection,
                            verify_rotational_constancy)

FAST = QuadratureSpec(radial_nodes=64, angular_nodes=128)


class TestRowSemantics:
    def test_relative_error(self):
        row = make_row("x", 1.001, 1.0, 1e-2, 10, 0.0)
        assert row.passed
        assert abs(row.rel_err - 1e-3) < 1e-12

    def test_absolute_when_expected_zero(self):
        assert make_row("x", 5e-11, 0.0, 1e-10, 0, 0.0).passed
        assert not make_row("x", 2e-10, 0.0, 1e-10, 0, 0.0).passed

    def test_mc_needs_four_sigma(self):
        # tight rel err but > 4 SE away: must fail
        row = make_row("x", 1.001, 1.0, 1e-2, 0, 0.0, std_err=1e-5)
        assert not row.passed
        row = make_row("x", 1.001, 1.0, 1e-2, 0, 0.0, std_err=3e-4)
        assert row.passed

    def test_nan_never_passes(self):
        assert not make_row("x", math.nan, 1.0, 1e9, 0, 0.0).passed

    def test_infinite_tolerance_rows_are_informational(self):
        assert make_row("x", 100.0, 1.0, math.inf, 0, 0.0).passed


class TestReports:
    def test_pansu_area_grid(self):
        rep = verify_pansu_area(VerifyConfig("pansu_area", quadrature=FAST))
        assert len(rep.rows) == 9
        assert rep.all_pass

    def test_pansu_area_single_case(self):
        rep = verify_pansu_area(VerifyConfig("pansu_area", n=2, lam=0.5,
                                             quadrature=FAST))
        assert len(rep.rows) == 1
        assert rep.rows[0].case_id == "pansu_area/n=2,lam=0.5"

    def test_pansu_projection_h1(self):
        rep = verify_pansu_projection(VerifyConfig("pansu_projection", n=1,
                                                   samples=6, quadrature=FAST))
        assert rep.all_pass
        assert all(r.std_err is None for r in rep.rows)

    def test_pansu_projection_h2_is_mc(self):
        quad = FAST.with_(mc_samples=150_000)
        rep = verify_pansu_projection(VerifyConfig("pansu_projection", n=2,
                                                   samples=2, quadrature=quad))
        assert rep.all_pass
        assert all(r.std_err is not None and r.std_err > 0 for r in rep.rows)

    def test_pansu_projection_scaling_law(self):
        # the constant scales as lambda^{-(2n+1)}
        values = {}
        for lam in (0.5, 1.0, 2.0):
            rep = verify_pansu_projection(VerifyConfig(
                "pansu_projection", n=1, lam=lam, samples=2, quadrature=FAST))
            values[lam] = rep.rows[0].computed
        scaled = [values[lam] * lam ** 3 for lam in (0.5, 1.0, 2.0)]
        assert (max(scaled) - min(scaled)) / scaled[1] < 1e-6

    def test_cauchy(self):
        rep = verify_cauchy(VerifyConfig("cauchy", quadrature=FAST))
        assert rep.all_pass
        ratio_rows = [r for r in rep.rows if "ratio" in r.case_id]
        assert len(ratio_rows) == 3
        for r in ratio_rows:
            assert r.rel_err <= 1e-12

    def test_anydirection(self):
        rep = verify_anydirection(VerifyConfig("anydirection", quadrature=FAST))
        assert rep.all_pass
        zero_rows = [r for r in rep.rows if "alpha=0.0000" in r.case_id]
        assert zero_rows and all(r.computed == 0.0 for r in zero_rows)

    def test_rotational_constancy(self):
        rep = verify_rotational_constancy(VerifyConfig("rotational_constancy",
                                                       samples=8, quadrature=FAST))
        assert rep.all_pass
        flat = [r for r in rep.rows if "flat_pair/value" in r.case_id]
        assert len(flat) == 1
        assert abs(flat[0].computed - 8.0 / 3.0) < 1e-10

    def test_lemma_kr(self):
        rep = verify_lemma_kr(VerifyConfig("lemma_kr", quadrature=FAST))
        assert rep.all_pass
        by_dim = {}
        for r in rep.rows:
            dim = r.case_id.split("/")[1]
            by_dim.setdefault(dim, []).append(r.expected)
        assert abs(by_dim["n=2"][0] - 4.0) < 1e-14
        assert abs(by_dim["n=3"][0] - 2 * math.pi) < 1e-14

    def test_expected_value(self):
        rep = expected_projection(VerifyConfig("expected_value", quadrature=FAST))
        assert rep.all_pass
        info = [r for r in rep.rows if "displayed_product" in r.case_id]
        assert len(info) == 1
        assert info[0].tol == math.inf  # logged, never asserted

    def test_custom_surface_dict(self):
        cfg = VerifyConfig("rotational_constancy", samples=4, quadrature=FAST,
                           surface={"kind": "rotational", "n": 1, "R": 1.0,
                                    "h_plus": "flat", "h_minus": "flat"})
        rep = verify_rotational_constancy(cfg)
        assert rep.all_pass

    def test_run_dispatch(self):
        rep = run(VerifyConfig("lemma_kr", n=2, quadrature=FAST))
        assert rep.name == "lemma_kr"
        with pytest.raises(ValueError, match="unknown verification"):
            run(VerifyConfig("frobnicate"))


class TestOutputFormats:
    def make_report(self):
        rep = Report("demo", FAST)
        rep.rows.append(make_row("b/second", 2.0, 2.0, 1e-6, 3, 1.5))
        rep.rows.append(make_row("a/first", 1.0, 1.0, 1e-6, 2, 0.5, std_err=0.1))
        return rep

    def test_csv_columns_and_order(self):
        text = self.make_report().to_csv()
        lines = text.strip().split("\n")
        assert lines[0].startswith("# report=demo QuadratureSpec ")
        assert lines[1] == ",".join(CSV_COLUMNS)
        assert lines[2].startswith("a/first,")  # sorted by case id
        assert lines[3].startswith("b/second,")

    def test_csv_timings_suppressed_by_default(self):
        rep = self.make_report()
        assert ",1.5" not in rep.to_csv()
        assert ",1.5" in rep.to_csv(timings=True)

    def test_csv_quotes_case_ids_with_commas(self):
        import csv as csvmod
        import io
        rep = verify_pansu_area(VerifyConfig("pansu_area", n=1, lam=0.5,
                                             quadrature=FAST))
        body = rep.to_csv().split("\n", 1)[1]
        rows = [r for r in csvmod.reader(io.StringIO(body)) if r]
        assert all(len(r) == len(CSV_COLUMNS) for r in rows)
        assert rows[1][0] == "pansu_area/n=1,lam=0.5"

    def test_json_round_trips_and_carries_std_err(self):
        payload = json.loads(self.make_report().to_json())
        assert payload["report"] == "demo"
        assert payload["all_pass"] is True
        assert payload["quadrature"]["radial_nodes"] == 64
        rows = {r["case_id"]: r for r in payload["rows"]}
        assert rows["a/first"]["std_err"] == 0.1
        assert "std_err" not in rows["b/second"]

    def test_pretty_mentions_every_row(self):
        text = self.make_report().pretty()
        assert "a/first" in text and "b/second" in text
        assert "all pass" in text


def test_report_all_runs_everything():
    # mc_samples stays at the level where the 1e-2 relative gate is
    # statistically safe (SE ~ 0.12% of the value)
    reports = report_all(seed=0, quadrature=FAST, mc_samples=1_000_000)
    names = [r.name for r in reports]
    assert names == ["pansu_area", "pansu_projection", "pansu_projection",
                     "cauchy", "anydirection", "rotational_constancy",
                     "lemma_kr", "expected_value"]
    assert all(r.all_pass for r in reports)
