"""Property checks and the suite runner."""
import math

import numpy as np
import pytest

from loewnerflow import (ConfigError, EvolutionFamilyHandle, VerificationReport, check_contraction,
                         check_ef3, check_semigroup, check_univalence, polynomial_field, run_suite)
from loewnerflow.verify import (CHECKS, builtin_family_configs, check_ladder, parse_suite,
                                rng_for, sample_disc, skipped)

LINEAR = EvolutionFamilyHandle(polynomial_field([0, -1]))
ZERO = EvolutionFamilyHandle(polynomial_field([0]))


def test_sampling_is_seeded_and_stratified():
    a = sample_disc(200, rng_for(3, "x"))
    b = sample_disc(200, rng_for(3, "x"))
    c = sample_disc(200, rng_for(3, "y"))
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert np.max(np.abs(a)) <= 0.9
    # equal-area strata: a quarter of the points in |z| <= 0.45
    assert np.sum(np.abs(a) <= 0.45) == pytest.approx(50, abs=1)


def test_semigroup_examples():
    assert check_semigroup(LINEAR).max_defect < 1e-10
    rep = check_semigroup(ZERO)
    assert rep.max_defect == 0 and rep.passed


def test_contraction_examples():
    assert check_contraction(LINEAR, n_samples=200).max_defect <= 0
    assert check_contraction(ZERO, n_samples=100).max_defect == pytest.approx(0, abs=1e-15)


def test_univalence_and_ef3_on_linear():
    assert check_univalence(LINEAR, n_samples=100).passed
    assert check_ef3(LINEAR, n_samples=50).passed
    assert check_ef3(LINEAR, z_list=[0.1, 0.5j]).samples == 2


def test_ladder_on_koebe():
    from loewnerflow import build_field
    spec = build_field(builtin_family_configs()["radial_koebe"])
    rep = check_ladder(EvolutionFamilyHandle(spec.disc), n_samples=20)
    assert rep.passed
    assert rep.worst_case["tight"] < rep.worst_case["loose"]


def test_suite_on_linear_all_pass():
    reports = run_suite({"kind": "polynomial", "coefficients": [0, -1]}, horizon=1.0)
    assert [r.property_name for r in reports] == list(CHECKS)
    assert all(r.passed for r in reports)
    statuses = {r.property_name: r.status for r in reports}
    assert statuses["hydro"] == "skipped" and statuses["multiplier"] == "pass"


def test_suite_on_non_generator():
    reports = run_suite({"kind": "polynomial", "coefficients": [0, 1]})
    assert reports[0].property_name == "decompose" and not reports[0].passed
    assert all(r.status == "not-run" and not r.passed for r in reports[1:])
    assert len(reports) == len(CHECKS)


def test_named_subset():
    reports = run_suite({"kind": "polynomial", "coefficients": [0, -1]}, "semigroup")
    assert len(reports) == 1 and reports[0].property_name == "semigroup"
    with pytest.raises(ConfigError):
        parse_suite("semigroup,bogus")
    assert parse_suite("all") == list(CHECKS)


def test_report_serialization():
    rep = VerificationReport("x", 1e-12, 1e-9, 10, {"z": 0.5j, "v": np.float64(2.0)})
    d = rep.to_dict()
    assert d["passed"] and d["worst_case"] == {"z": [0.0, 0.5], "v": 2.0}
    assert rep.line().startswith("[PASS] x:")
    assert skipped("y", "n/a").line().startswith("[SKIPPED]")
    nan = VerificationReport("z", math.nan, 1.0, 0)
    assert not nan.passed and nan.to_dict()["max_defect"] is None
