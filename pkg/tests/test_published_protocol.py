"""Reconstruction of the published counting protocol.

The reference accuracy tables for the manifold-error and element-count
studies are only reachable when directions are drawn on whole degrees
and an error of exactly the 2 degree threshold still counts as a
success; under that counting the published endpoint numbers (98.30% and
42.89% over the error sweep, 86.06% at ten elements, 1% at one element,
and the error stds 1.13 and 4.29 degrees) all reappear within Monte
Carlo scatter. The library exposes that protocol behind
``TrialConfig(integer_directions=True, inclusive_success=True)``; this
module demonstrates the match at reduced trial counts.

The default protocol (continuous directions, strict comparison) is kept
for the acceptance suite; see the README for the full reconciliation.
"""

import dataclasses

import numpy as np

from dirmusic.experiments import TrialConfig, run_batch

PUBLISHED = TrialConfig(
    n_trials=1200, integer_directions=True, inclusive_success=True
)


def _accuracy(batch):
    return float(np.mean([t.success for t in batch]))


def test_error_sweep_endpoints_match_published_values():
    low = run_batch(dataclasses.replace(PUBLISHED, manifold_error=0.025))
    high = run_batch(dataclasses.replace(PUBLISHED, manifold_error=0.1))
    # published: 98.30% and 42.89%, stds 1.13 and 4.29 degrees
    assert _accuracy(low) >= 0.96
    assert 0.38 <= _accuracy(high) <= 0.49
    assert abs(np.std([t.error_deg for t in low]) - 1.13) <= 0.3
    assert abs(np.std([t.error_deg for t in high]) - 4.29) <= 0.6


def test_element_sweep_endpoints_match_published_values():
    one = run_batch(
        dataclasses.replace(PUBLISHED, n_elements=1, manifold_error=0.05)
    )
    ten = run_batch(
        dataclasses.replace(PUBLISHED, n_elements=10, manifold_error=0.05)
    )
    # published: 1% with one element, 86.06% with ten
    assert _accuracy(one) <= 0.05
    assert 0.83 <= _accuracy(ten) <= 0.92


def test_integer_directions_are_whole_degrees():
    batch = run_batch(dataclasses.replace(PUBLISHED, n_trials=64, snr_db=300.0))
    for report in batch:
        assert report.theta_true_deg == int(report.theta_true_deg)
        assert 1.0 <= report.theta_true_deg <= 360.0


def test_inclusive_success_counts_threshold_hits():
    # with whole-degree directions the errors are integers, so trials
    # landing exactly on the threshold separate the two counting rules
    base = dataclasses.replace(PUBLISHED, n_trials=400, manifold_error=0.05)
    strict = run_batch(dataclasses.replace(base, inclusive_success=False))
    inclusive = run_batch(base)
    at_threshold = [abs(t.error_deg) == 2.0 for t in strict]
    assert any(at_threshold)  # seeded batch is known to hit the boundary
    for hit, s, i in zip(at_threshold, strict, inclusive):
        assert (s.theta_true_deg, s.theta_hat_deg, s.error_deg) == (
            i.theta_true_deg,
            i.theta_hat_deg,
            i.error_deg,
        )
        assert i.success == (s.success or hit)
