import math

import numpy as np
import pytest

import mmc


def two_state():
    return mmc.validate_model(np.array([[0.9, 0.1], [0.2, 0.8]]), np.array([0.5, 0.5]))


def test_model_properties():
    m = two_state()
    assert np.allclose(m.stationary, [2 / 3, 1 / 3])
    assert m.mixing_time == 3
    assert m.pseudo_spectral_gap == pytest.approx(0.51)
    assert mmc.embed_model(m)[0] == pytest.approx(0.73485, abs=1e-5)


def test_invalid_model_raises_with_kind():
    with pytest.raises(mmc.MmcError) as err:
        mmc.validate_model(np.eye(2), np.array([0.5, 0.5]))
    assert mmc.error_kind(err.value) == "NotIrreducible"


def test_pipeline_end_to_end():
    models = mmc.gen_separation_instance(2)
    inst = mmc.make_instance(models, np.array([0.5, 0.5]), 100, 4000)
    trajs = mmc.sample_trajectories(inst, 3)
    assert trajs.states.shape == (100, 4000)
    assert trajs.states.dtype == np.uint16
    W_hat = mmc.empirical_matrix(trajs)
    s1 = mmc.spectral_cluster(W_hat, inst.H, c_sigma=1.0, c_rho=1.0, radius_mode="rowlevel")
    assert len(s1.labels) == 100
    s2 = mmc.refine(trajs, np.array(s1.labels), s1.K_hat, lam=0.5)
    oracle = mmc.oracle_classify(trajs, models)
    assert mmc.misclassification(oracle, inst.decoding) == 0
    assert mmc.misclassification(s2.labels, inst.decoding) <= mmc.misclassification(s1.labels, inst.decoding)


def test_trajectories_from_array_round_trip():
    inst = mmc.make_instance(mmc.gen_separation_instance(1), np.array([0.5, 0.5]), 6, 20)
    trajs = mmc.sample_trajectories(inst, 1)
    again = mmc.trajectories_from_array(trajs.states, 2)
    assert np.array_equal(mmc.empirical_matrix(again), mmc.empirical_matrix(trajs))


def test_gaps_and_bounds():
    inst = mmc.instance_from_spec({"type": "separation", "S_prime": 2, "T": 10, "H": 100})
    rep = mmc.gap_report(inst)
    assert rep["D_pi"] == pytest.approx(math.log(3) / 2)
    assert rep["alpha"] == pytest.approx(0.125)
    ineq = mmc.gap_inequalities(inst.models, with_mixing=True)
    assert ineq["all_hold"]
    b = mmc.lower_bound_check(0.01, 0.1, 1000, 10, 0.05, 0.5)
    assert b["necessary_holds"] == mmc.lower_bound_probability_form(0.01, 0.1, 1000, 10, 0.05, 0.5)


def test_sweep_deterministic_across_jobs():
    kw = dict(c_sigma=1.0, c_rho=1.0, radius_mode="rowlevel")
    spec = {"type": "separation", "S_prime": 2}
    a = mmc.run_sweep(spec, [40], [100, 200], [0.1], [0.5], [1, 2], jobs=1, **kw)
    b = mmc.run_sweep(spec, [40], [100, 200], [0.1], [0.5], [1, 2], jobs=4, **kw)
    assert len(a) == 4
    strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_time"} for r in rows]
    assert strip(a) == strip(b)


def test_invalid_spec_kind():
    with pytest.raises(mmc.MmcError) as err:
        mmc.instance_from_spec({"type": "separation", "T": 10, "H": 10})
    assert mmc.error_kind(err.value) == "InvalidSpec"
    assert "S_prime" in str(err.value)
