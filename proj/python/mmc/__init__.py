"""Clustering trajectories from a mixture of Markov chains."""

import csv
import io
import json

from ._mmc import (
    MarkovModel,
    MixtureInstance,
    MmcError,
    Stage1Result,
    Stage2Result,
    TrajectorySet,
    augmented_chain,
    delta_W_sq,
    divergence_D,
    divergence_D_pi,
    embed_model,
    empirical_matrix,
    gen_random_ergodic,
    gen_separation_instance,
    kl_divergence,
    lower_bound_probability_form,
    make_instance,
    misclassification,
    oracle_classify,
    pool_estimates,
    refine,
    sample_trajectories,
    sigma_threshold,
    spectral_cluster,
    predicted_rate,
    time_reversal,
    trajectories_from_array,
    trajectory_loglik,
    truth_matrix,
    two_inf_distance,
    validate_model,
)
from . import _mmc


def error_kind(err):
    """Name of the failure kind carried by an MmcError."""
    return err.args[1] if len(err.args) > 1 else None


def instance_from_spec(spec):
    return _mmc.instance_from_spec_json(json.dumps(spec))


def gap_report(instance):
    return json.loads(_mmc.gap_report_json(instance))


def gap_inequalities(models, with_mixing=False):
    return json.loads(_mmc.gap_inequalities_json(list(models), with_mixing))


def lower_bound_check(eps, delta, T, H, D, alpha_min):
    return json.loads(_mmc.lower_bound_json(eps, delta, T, H, D, alpha_min))


def run_sweep(family_spec, T, H, delta, lam, seeds, **kwargs):
    """Rows of the sweep CSV as dicts of strings, in (T, H, delta, lambda, seed) order."""
    text = _mmc.sweep_csv(json.dumps(family_spec), list(T), list(H), list(delta), list(lam), list(seeds), **kwargs)
    return list(csv.DictReader(io.StringIO(text)))
