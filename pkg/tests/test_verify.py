import numpy as np
import pytest

from qduality import verify as V
from qduality.errors import BadDimension, ParamOutOfRange, UnknownMeasure
from qduality.measures import p_hs_vn
from qduality.states import basis_state, maximally_mixed, random_state

from conftest import oracle_sqrt

COHERENCES = ("c_hs", "c_wy", "c_l1")
PREDICTABILITIES = ("p_hs_l", "p_hs_vn", "p_l1")


def test_evaluate_maximally_mixed():
    rec = V.evaluate(maximally_mixed(4))
    for name in COHERENCES + PREDICTABILITIES:
        assert getattr(rec, name) == pytest.approx(0, abs=1e-12)
    assert rec.slacks["tohs_l"] == pytest.approx(0.75)
    assert rec.slacks["tohs_vn"] == pytest.approx(np.log(4) - 0.75)
    assert rec.slacks["cpl1"] == pytest.approx(3.0)
    assert rec.pass_all and rec.rank == 4


def test_evaluate_basis_state():
    rec = V.evaluate(basis_state(0, 4))
    for name in COHERENCES:
        assert getattr(rec, name) == pytest.approx(0, abs=1e-12)
    assert rec.p_hs_l == pytest.approx(0.75)
    assert rec.p_hs_vn == pytest.approx(np.log(4))
    assert rec.p_l1 == pytest.approx(3.0)
    for name in ("tohs_l", "tohs_vn", "heub", "heub2", "tocp", "cpwy", "cpl1"):
        assert rec.slacks[name] == pytest.approx(0, abs=1e-12)
    assert rec.pass_all and rec.rank == 1


def test_evaluate_against_direct_oracle():
    rho = random_state(6, rng=42).matrix
    rec = V.evaluate(rho)
    S = oracle_sqrt(rho)
    p = np.real(np.diag(rho))
    s = np.real(np.diag(S))
    off = ~np.eye(6, dtype=bool)
    assert rec.c_hs == pytest.approx(np.sum(np.abs(rho[off]) ** 2), abs=1e-12)
    assert rec.c_wy == pytest.approx(np.sum(np.abs(S[off]) ** 2), abs=1e-10)
    assert rec.upsilon == pytest.approx(s.sum() ** 2 - np.sum(s ** 2), abs=1e-10)
    assert rec.omega == pytest.approx(-np.sum(s * np.log(s)) + s.sum() * (s.sum() - 1), abs=1e-10)
    assert rec.s_vn_iota == pytest.approx(-np.sum(p * np.log(p)), abs=1e-12)
    assert rec.pass_all
    assert all(rec.verdicts().values())


def test_campaign_is_deterministic_across_workers():
    a = V.campaign(range(2, 5), 300, seed=5, workers=1)
    b = V.campaign(range(2, 5), 300, seed=5, workers=4)
    assert a.records == b.records
    assert [(r.dim, r.sample_id) for r in a.records] == sorted((r.dim, r.sample_id) for r in a.records)


def test_campaign_summary_matches_records():
    res = V.campaign([3, 4], 120, seed=2)
    assert res.all_passed
    for d, s in res.per_dim.items():
        recs = [r for r in res.records if r.dim == d]
        assert s.samples == 120 and s.pass_rate == 1.0
        assert s.mean_slack_tohs_l == pytest.approx(np.mean([r.slacks["tohs_l"] for r in recs]))
    assert res.verdict_totals()["heub"] == 240


def test_pure_qubit_tightness():
    res = V.campaign([2], 200, rank=1, seed=3)
    assert max(abs(r.c_hs - r.s_l_iota) for r in res.records) < 1e-10


def test_mean_slack_matches_closed_form():
    # E[S_l(iota) - C_hs] = 1 - E[Tr rho^2] = 1 - 2d/(d^2 + 1) for the full-rank ensemble
    res = V.campaign([3], 2000, seed=8)
    assert res.tightness_trend()[3] == pytest.approx(1 - 6 / 10, abs=0.01)


def test_state_hook_records_violation():
    bad = np.diag([0.6, 0.5, -0.1]).astype(complex)

    def hook(d, sample_id, matrix):
        return bad if sample_id == 7 else matrix

    res = V.campaign([3], 20, seed=1, state_hook=hook)
    assert len(res.violations) == 1
    v = res.violations[0]
    assert v.sample_id == 7 and "positivity" in v.failed
    np.testing.assert_array_equal(v.matrix, bad)
    assert v.to_json()["real"][2][2] == -0.1


def test_campaign_dimension_bounds():
    with pytest.raises(BadDimension):
        V.campaign(range(1, 3), 5)
    with pytest.raises(BadDimension):
        V.campaign([17], 5)


def test_werner_sweep():
    recs = V.werner_sweep([0.0, 0.5, 1.0], 11)
    assert len(recs) == 33
    assert recs[0].w == 0.0 and recs[-1].a == 1.0
    half = [r for r in recs if r.w == 1.0 and abs(r.a - 0.5) < 1e-12][0]
    assert half.c_hs == pytest.approx(0.5) and half.p_hs_l == pytest.approx(0.25)
    for r in recs:
        if r.w == 0.0:
            for name in COHERENCES + PREDICTABILITIES:
                assert getattr(r, name) == pytest.approx(0, abs=1e-12)
    with pytest.raises(ParamOutOfRange):
        V.werner_sweep([1.2], 3)
    with pytest.raises(ParamOutOfRange):
        V.a_grid(1)


def test_werner_symmetric_under_a_reflection():
    recs = V.werner_sweep([0.3, 1.0], 21)
    by_key = {(r.w, round(r.a, 12)): r for r in recs}
    for (w, a), r in by_key.items():
        mirror = by_key[(w, round(1 - a, 12))]
        for name in V.MEASURE_FIELDS:
            assert getattr(r, name) == pytest.approx(getattr(mirror, name), abs=1e-8)


@pytest.mark.parametrize("measure", PREDICTABILITIES)
def test_predictability_suite(measure):
    reports = V.axiom_suite_predictability(measure, d=3, trials=200, seed=4)
    assert [r.axiom for r in reports] == ["P1", "P2", "P3", "P4", "P5", "P6"]
    for r in reports:
        assert r.passed, r
        assert np.isfinite(r.worst_slack)


@pytest.mark.parametrize("measure", COHERENCES)
def test_wave_suite(measure):
    reports = V.axiom_suite_wave(measure, d=3, trials=200, seed=4)
    assert [r.axiom for r in reports] == ["W1", "W2", "W3", "W4", "W5", "W6"]
    for r in reports:
        assert r.passed, r


def test_unknown_measures():
    with pytest.raises(UnknownMeasure):
        V.axiom_suite_predictability("c_hs")
    with pytest.raises(UnknownMeasure):
        V.axiom_suite_wave("p_l1")
    with pytest.raises(ValueError):
        V.axiom_suite_wave("c_hs", w5_mode="sqrt_row")


def test_p5_tie_moves_prediction_at_second_order():
    p = np.array([0.3, 0.3, 0.4])
    base = p_hs_vn(np.diag(p).astype(complex)[None])[0]
    for eps in (1e-3, 1e-4):
        q = p + np.array([-eps, eps, 0.0])
        change = p_hs_vn(np.diag(q).astype(complex)[None])[0] - base
        # second-order expansion: eps^2 / p_j for the von Neumann form
        assert change == pytest.approx(eps ** 2 / 0.3, rel=1e-2)


def test_p5_counts_skipped_ties():
    r = V.axiom_suite_predictability("p_l1", d=4, trials=100, seed=6)[4]
    assert r.skipped > 0 and r.violations == 0


def test_wy_w5_alternative_readings_are_not_monotone():
    # shrinking rho_jk directly, or renormalising the row-scaled root, can raise c_wy
    for mode in ("direct", "sqrt_row_normalized"):
        r = V.axiom_suite_wave("c_wy", d=4, trials=300, seed=1, w5_mode=mode)[4]
        assert r.violations > 0


def test_axiom_report_merge():
    a = V.AxiomReport("c_hs", "W2", tolerance=1e-12).add([0.0, -1.0])
    b = V.AxiomReport("c_hs", "W2", tolerance=1e-12, skipped=2).add([0.5])
    a.merge(b)
    assert (a.trials, a.violations, a.skipped, a.worst_slack) == (3, 1, 2, -1.0)
    assert not a.passed
