"""Random-constellation experiment tests."""

import math

import numpy as np
import pytest

from satcrb.closed_form import lcrb_tdoa, moment_integrals
from satcrb.fim import crb_from_fim, fim_tdoa_arrays
from satcrb.geometry import InvalidConfig, SystemParams, e_to_l_arrays, sample_constellation
from satcrb.montecarlo import (
    ConvergenceRow,
    CrbDistribution,
    convergence_sweep,
    crb_distribution,
    mean_fim,
    nearest_rank,
    parameter_sweep,
)

SPLIT = SystemParams(eta=400.0)


def test_nearest_rank_small_lists():
    v = np.array([1.0, 2.0, 3.0, 4.0])
    assert nearest_rank(v, 50.0) == 2.0  # ceil(0.5*4)=2nd
    assert nearest_rank(v, 10.0) == 1.0
    assert nearest_rank(v, 90.0) == 4.0
    assert nearest_rank(v, 100.0) == 4.0
    assert nearest_rank(np.array([7.0]), 50.0) == 7.0
    assert math.isnan(nearest_rank(np.array([]), 50.0))
    with pytest.raises(InvalidConfig):
        nearest_rank(v, 0.0)


def test_model_validation():
    with pytest.raises(InvalidConfig):
        crb_distribution(SystemParams(), "rss", trials=2, seed=1)
    with pytest.raises(InvalidConfig):
        crb_distribution(SystemParams(), "tdoa", trials=0, seed=1)


def test_distribution_shape_and_determinism():
    d1 = crb_distribution(SystemParams(n_sats=120), "tdoa", trials=40, seed=7)
    d2 = crb_distribution(SystemParams(n_sats=120), "tdoa", trials=40, seed=7)
    d3 = crb_distribution(SystemParams(n_sats=120), "tdoa", trials=40, seed=8)
    assert np.array_equal(d1.samples_xy, d2.samples_xy)
    assert np.array_equal(d1.samples_z, d2.samples_z)
    assert not np.array_equal(d1.samples_xy, d3.samples_xy)
    assert len(d1.samples_xy) == d1.trials - d1.singular_count
    assert len(d1.samples_z) == len(d1.samples_xy)
    assert (d1.samples_xy > 0).all() and (d1.samples_z > 0).all()
    assert np.all(np.diff(d1.samples_xy) >= 0)


def test_percentiles_order_consistent():
    d = crb_distribution(SystemParams(n_sats=150), "tdoa", trials=60, seed=3)
    assert d.percentile_xy(10.0) <= d.median_xy <= d.percentile_xy(90.0)
    assert d.percentile_z(10.0) <= d.median_z <= d.percentile_z(90.0)


def test_all_singular_run_is_flagged():
    d = crb_distribution(SystemParams(n_sats=3), "tdoa", trials=10, seed=5)
    assert d.singular_count == 10
    assert d.all_singular
    assert len(d.samples_xy) == 0 and len(d.samples_z) == 0


def test_threads_do_not_change_results(monkeypatch):
    base = crb_distribution(SystemParams(n_sats=120), "tdoa", trials=24, seed=9)
    monkeypatch.setenv("SATCRB_THREADS", "4")
    threaded = crb_distribution(SystemParams(n_sats=120), "tdoa", trials=24, seed=9)
    assert np.array_equal(base.samples_xy, threaded.samples_xy)
    assert np.array_equal(base.samples_z, threaded.samples_z)


def test_rss_no_worse_per_trial():
    params = SystemParams(n_sats=120, eta=400.0)
    for trial in range(25):
        c = sample_constellation(params, seed=11, trial=trial)
        phi_l, d, vis = e_to_l_arrays(c.phi_e, params)
        if vis.sum() < 4:
            continue
        from satcrb.fim import fim_tdoa_rss_arrays

        jt = fim_tdoa_arrays(phi_l[vis], c.theta[vis], d[vis], params)
        jr = fim_tdoa_rss_arrays(phi_l[vis], c.theta[vis], d[vis], params)
        bt = crb_from_fim(jt)
        br = crb_from_fim(jr)
        assert br.xy <= bt.xy * (1.0 + 1e-12)
        assert br.z <= bt.z * (1.0 + 1e-12)


def test_rss_model_needs_split():
    with pytest.raises(InvalidConfig):
        crb_distribution(SystemParams(n_sats=50), "tdoa_rss", trials=2, seed=1)


def test_convergence_sweep_rows():
    rows = convergence_sweep(
        SystemParams(), "tdoa", n_list=[250, 1000], trials=60, seed=21
    )
    assert [r.n_sats for r in rows] == [250, 1000]
    limit = lcrb_tdoa(SystemParams())
    for r in rows:
        assert isinstance(r, ConvergenceRow)
        assert r.lcrb_xy == limit.xy and r.lcrb_z == limit.z
        assert r.p10_xy <= r.median_xy <= r.p90_xy
        assert r.p10_z <= r.median_z <= r.p90_z
    # the empirical band around the limit narrows with N
    w250 = (rows[0].p90_xy - rows[0].p10_xy) / rows[0].median_xy
    w1000 = (rows[1].p90_xy - rows[1].p10_xy) / rows[1].median_xy
    assert w1000 < w250
    with pytest.raises(InvalidConfig):
        convergence_sweep(SystemParams(), "tdoa", [], 10, 1)


def test_median_tracks_limit_at_large_n():
    rows = convergence_sweep(SystemParams(), "tdoa", [2000], trials=60, seed=2)
    r = rows[0]
    assert abs(r.median_xy / r.lcrb_xy - 1.0) < 0.10
    assert abs(r.median_z / r.lcrb_z - 1.0) < 0.10
    assert r.median_xy < r.median_z  # vertical is harder at the defaults


def test_parameter_sweep_h_axis():
    rows = parameter_sweep(
        SystemParams(n_sats=200),
        "tdoa",
        axis="h",
        grid=[1000.0, 2500.0, 10000.0, 35000.0],
        n=200,
        trials=30,
        seed=17,
    )
    assert [r.covered for r in rows] == [False, True, True, True]
    acrbs = [r.acrb_xy + r.acrb_z for r in rows]
    assert acrbs[1] < acrbs[2] < acrbs[3]  # grows with h above coverage
    for r in rows:
        assert 0.0 <= r.coverage <= 1.0
        assert r.p10_xy <= r.median_xy <= r.p90_xy


def test_parameter_sweep_phi_axis():
    rows = parameter_sweep(
        SystemParams(n_sats=2000),
        "tdoa",
        axis="phi_l_max",
        grid=[math.radians(10.0), math.radians(25.0), math.radians(60.0)],
        n=2000,
        trials=30,
        seed=4,
    )
    assert all(r.covered for r in rows)
    # opening the cone helps z more than xy
    drop_xy = rows[0].median_xy / rows[-1].median_xy
    drop_z = rows[0].median_z / rows[-1].median_z
    assert drop_z > drop_xy > 1.0
    with pytest.raises(InvalidConfig):
        parameter_sweep(SystemParams(), "tdoa", "r", [6000.0], 100, 5, 1)


def test_mean_fim_structure():
    params = SystemParams()
    j = mean_fim(params, "tdoa", n_samples=40_000, seed=13)
    assert j.shape == (4, 4)
    assert np.allclose(j, j.T)
    m = moment_integrals(params)
    # diagonal entries estimate the cup moments
    assert j[3, 3] == pytest.approx(m.m_l, rel=0.03)
    assert j[0, 0] == pytest.approx(j[1, 1], rel=0.05)
    assert j[0, 0] + j[1, 1] == pytest.approx(m.m_l_sin2, rel=0.05)
    assert j[2, 2] == pytest.approx(m.m_l_cos2, rel=0.05)
    assert j[2, 3] == pytest.approx(-m.m_l_cos, rel=0.05)
    # off-block entries vanish in expectation over the azimuth
    dmin = min(j[0, 0], j[1, 1], j[2, 2], j[3, 3])
    for a, b in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3)):
        assert abs(j[a, b]) < 0.05 * dmin
    with pytest.raises(InvalidConfig):
        mean_fim(params, "tdoa", n_samples=5000, seed=1)


def test_mean_fim_deterministic():
    a = mean_fim(SystemParams(), "tdoa", n_samples=10_000, seed=2)
    b = mean_fim(SystemParams(), "tdoa", n_samples=10_000, seed=2)
    assert np.array_equal(a, b)
