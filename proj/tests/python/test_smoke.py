"""End-to-end smoke tests for the python bindings."""

import math

import pytest

import subcausal as sc


@pytest.fixture(scope="module")
def icd():
    return sc.fixture("icd_trial")


def test_fixture_counts(icd):
    assert icd.total() == 1231.0
    assert icd.obs(1, 0, 0) == 311.0
    assert icd.mis(0, 0) == 382.0


def test_em_reproduces_comparison_table(icd):
    fit = sc.em_fit(icd, 2, randomized=True)
    assert fit.converged
    assert abs(fit.loglik - (-2200.452)) < 0.01
    gof = sc.lrt_gof(icd, 2)
    assert abs(gof.p_value - 0.248) < 0.005
    assert sc.check_expert_assumptions(fit.joint) == (True, True, True, True)


def test_selection_and_bounds(icd):
    chosen, logliks = sc.select_mechanism(icd, randomized=True)
    assert chosen == 2
    assert len(logliks) == 4
    bounds = sc.bounds_m5(icd, "cor")
    assert any(math.isinf(v) for v in bounds.lower + bounds.upper)


def test_closed_form_identification(icd):
    joint = sc.identify_m2(icd)
    assert abs(joint.sum() - 1.0) < 1e-9
    log_cor = sc.identify_m3_cor(icd)
    assert math.isinf(log_cor[0])
    with pytest.raises(sc.ModelError):
        sc.identify_m3_joint(icd)


def test_gibbs_is_reproducible(icd):
    a = sc.gibbs_run(icd, 2, iterations=500, burnin=100, seed=5, randomized=True)
    b = sc.gibbs_run(icd, 2, iterations=500, burnin=100, seed=5, randomized=True)
    assert a.col("log_cor_1") == b.col("log_cor_1")
    s = sc.posterior_summary(a, "crr_1")
    assert s.q025 <= s.median <= s.q975


def test_simulation_round_trip():
    table = sc.generate_dataset(2, 20000, seed=3)
    fit = sc.em_fit(table, 2, randomized=True)
    est = sc.effects_from_joint(fit.joint, "cor", randomized=True)
    assert abs(est.ce_x[0] - math.log(16.0)) < 0.35
    assert abs(est.ce_x[1] - math.log(3.0 / 7.0)) < 0.35


def test_population_log_or(icd):
    est, se, finite = sc.population_log_or(icd)
    assert finite
    assert abs(se - 0.156) < 0.002


def test_data_errors_are_typed():
    with pytest.raises(sc.DataError):
        sc.fixture("not_a_fixture")
    with pytest.raises(sc.DataError):
        sc.ingest_json("not json")
