"""
Tests for the certificate combination rules
Author: Jay Guwalani
"""

import os
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

# Add src to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from stocon.analysis import estimate_noise_bound, estimate_rate
from stocon.combine import (CouplingSpec, SuperpositionWeights, check_feedback_structure, combine_feedback,
                            combine_hierarchical, combine_parallel, combine_small_gain, small_gain_estimate)
from stocon.core import (ContractionCertificate, DomainBox, Provenance, SdeSystem, make_constant_metric,
                         make_identity_metric, make_time_varying_metric)
from stocon.errors import MetricMismatchError, MissingCouplingBoundError, NonConstantMetricError


def cert(lam, c, n=1, metric=None):
    return ContractionCertificate(rate_lambda=lam, bound_c=c, metric=metric or make_identity_metric(n),
                                  domain=DomainBox.cube(n, 1.0, t_max=1.0, sample_count=4),
                                  provenance=Provenance.DECLARED)


class TestParallel:

    def test_known_values(self):
        combined = combine_parallel(cert(1.0, 0.5), cert(2.0, 0.5), SuperpositionWeights(1, 1, 1, 1))
        assert combined.rate_lambda == pytest.approx(3.0)
        assert combined.bound_c == pytest.approx(1.0)
        assert combined.provenance == Provenance.COMBINED
        assert combined.tree()["rule"] == "parallel"

    def test_zero_noise_component(self):
        combined = combine_parallel(cert(1.0, 0.7), cert(2.0, 0.0), SuperpositionWeights(1, 1, 1, 1))
        assert combined.bound_c == pytest.approx(0.7)

    def test_metric_mismatch(self):
        other = cert(1.0, 1.0, metric=make_constant_metric([[2.0]]))
        with pytest.raises(MetricMismatchError):
            combine_parallel(cert(1.0, 1.0), other, SuperpositionWeights(1, 1, 1, 1))

    def test_weights_are_validated(self):
        with pytest.raises(ValueError):
            SuperpositionWeights(2.0, 1.0, 1.0, 1.0)


class TestFeedback:

    def test_known_values(self):
        combined = combine_feedback(cert(2.0, 0.5), cert(3.0, 0.25), 4.0)
        assert combined.rate_lambda == pytest.approx(2.0)
        assert combined.bound_c == pytest.approx(1.5)
        assert_allclose(combined.metric.matrix_at(0.0), np.diag([1.0, 4.0]))
        assert combined.notes

    def test_equal_rates(self):
        combined = combine_feedback(cert(1.5, 1.0), cert(1.5, 2.0), 1.0)
        assert combined.rate_lambda == pytest.approx(1.5)
        assert combined.bound_c == pytest.approx(3.0)

    def test_time_varying_metric_is_rejected(self):
        tv = make_time_varying_metric(lambda t: np.eye(1), lambda t: np.zeros((1, 1)), beta=1.0, dim=1)
        with pytest.raises(NonConstantMetricError):
            combine_feedback(cert(1.0, 1.0, metric=tv), cert(1.0, 1.0), 1.0)

    def test_structure_check(self):
        j21 = np.array([[1.0, 2.0]])
        assert check_feedback_structure(np.eye(2), np.eye(1), -3.0 * j21.T, j21, 3.0)
        assert not check_feedback_structure(np.eye(2), np.eye(1), 3.0 * j21.T, j21, 3.0)


class TestHierarchical:

    def test_known_values(self):
        combined = combine_hierarchical(cert(1.0, 1.0), cert(1.0, 1.0), 2.0)
        assert combined.rate_lambda == pytest.approx((2.0 - np.sqrt(2.0)) / 2.0)
        assert combined.bound_c == pytest.approx(2.0)

    @pytest.mark.parametrize("k", [0.1, 1.0, 10.0])
    def test_noise_free_driven_system(self, k):
        assert combine_hierarchical(cert(1.0, 0.3), cert(2.0, 0.0), k).bound_c == pytest.approx(0.3)

    def test_rate_grows_with_driven_rate(self):
        rates = [combine_hierarchical(cert(1.0, 1.0), cert(l2, 1.0), 1.0).rate_lambda
                 for l2 in np.geomspace(0.1, 1e4, 40)]
        assert np.all(np.diff(rates) > 0)
        assert rates[-1] < 1.0


class TestSmallGain:

    def test_decoupled(self):
        result = combine_small_gain(cert(1.0, 1.0), cert(3.0, 2.0), CouplingSpec(0.0, 0.0))
        assert result.applicable
        assert result.certificate.rate_lambda == pytest.approx(1.0)

    def test_boundary_is_not_applicable(self):
        result = combine_small_gain(cert(1.0, 1.0), cert(1.0, 1.0), CouplingSpec(1.0, 1.0))
        assert not result.applicable
        assert result.certificate is None
        assert result.k_opt == pytest.approx(1.0)
        assert result.min_sing_sq == pytest.approx(1.0)

    def test_applicable(self):
        result = combine_small_gain(cert(2.0, 0.5), cert(2.0, 0.25), CouplingSpec(1.0, 1.0))
        assert result.applicable
        assert result.certificate.rate_lambda == pytest.approx(1.0)
        assert result.certificate.bound_c == pytest.approx(0.75)

    def test_optimal_k_is_analytic(self):
        result = combine_small_gain(cert(5.0, 1.0), cert(5.0, 1.0), CouplingSpec(4.0, 1.0))
        assert result.k_opt == pytest.approx(4.0, rel=1e-6)
        assert result.min_sing_sq == pytest.approx(small_gain_estimate(4.0, 4.0, 1.0) ** 2)

    @pytest.mark.parametrize("s12, s21", [(1.0, 0.0), (0.0, 2.0)])
    def test_one_way_coupling_keeps_metric_weight_moderate(self, s12, s21):
        result = combine_small_gain(cert(1.0, 1.0), cert(2.0, 1.0), CouplingSpec(s12, s21))
        assert result.applicable
        # coupling term pinned at lambda1 lambda2 / 4
        assert result.k_opt == pytest.approx(0.5)
        assert result.min_sing_sq == pytest.approx(0.5)
        assert result.certificate.bound_c == pytest.approx(1.5)
        assert result.certificate.rate_lambda == pytest.approx(1.5 - np.sqrt(0.75))
        assert result.certificate.metric.beta == pytest.approx(0.5)

    def test_missing_bounds(self):
        with pytest.raises(MissingCouplingBoundError):
            combine_small_gain(cert(1.0, 1.0), cert(1.0, 1.0), CouplingSpec(j12_sup_sing=1.0))

    def test_coupling_from_jacobians(self):
        spec = CouplingSpec.from_jacobians(np.eye(1), np.diag([1.0, 2.0]), np.array([[1.0, 0.0]]),
                                           np.array([[0.0], [1.0]]))
        assert spec.j12_sup_sing == pytest.approx(1.0)
        assert spec.j21_sup_sing == pytest.approx(2.0)


def random_stable(rng, n, margin=0.1):
    p = rng.normal(size=(n, n))
    s = rng.normal(size=(n, n))
    return -(p @ p.T + margin * np.eye(n)) + (s - s.T)


def rate_of(a):
    return -np.linalg.eigvalsh(0.5 * (a + a.T))[-1]


def linear_system(a, s):
    n, d = s.shape
    return SdeSystem(n=n, d=d, drift=lambda x, t: np.asarray(x) @ a.T,
                     diffusion=lambda x, t: np.broadcast_to(s, np.shape(x)[:-1] + (n, d)).copy(),
                     drift_jacobian=lambda x, t: np.broadcast_to(a, np.shape(x)[:-1] + (n, n)).copy())


def component(a, s):
    n = a.shape[0]
    return cert(rate_of(a), float(np.trace(s.T @ s)), n=n)


def check_conservative(combined, a, s):
    system = linear_system(a, s)
    dom = DomainBox.cube(a.shape[0], 1.0, t_max=1.0, sample_count=2)
    measured = estimate_rate(system, combined.metric, dom).rate
    noise = estimate_noise_bound(system, combined.metric, dom).bound
    assert combined.rate_lambda <= measured + 1e-9 * (1.0 + abs(measured))
    assert combined.bound_c >= noise - 1e-9 * (1.0 + noise)


@pytest.mark.slow
class TestConservativeness:
    TRIALS = 1000

    def trial_blocks(self, rng):
        n1, n2 = rng.integers(1, 4, size=2)
        a1, a2 = random_stable(rng, n1), random_stable(rng, n2)
        s1, s2 = rng.normal(size=(n1, 2)), rng.normal(size=(n2, 2))
        return a1, a2, s1, s2

    def test_feedback(self):
        rng = np.random.default_rng(100)
        for _ in range(self.TRIALS):
            a1, a2, s1, s2 = self.trial_blocks(rng)
            k = float(rng.uniform(0.1, 10.0))
            j21 = rng.normal(size=(a2.shape[0], a1.shape[0]))
            a = np.block([[a1, -k * j21.T], [j21, a2]])
            s = np.block([[s1, np.zeros_like(s1)], [np.zeros_like(s2), s2]])
            check_conservative(combine_feedback(component(a1, s1), component(a2, s2), k), a, s)

    def test_hierarchical(self):
        rng = np.random.default_rng(200)
        for _ in range(self.TRIALS):
            a1, a2, s1, s2 = self.trial_blocks(rng)
            j21 = rng.normal(size=(a2.shape[0], a1.shape[0]))
            bound_k = float(np.linalg.norm(j21, 2) ** 2 * rng.uniform(1.0, 3.0)) + 1e-12
            a = np.block([[a1, np.zeros((a1.shape[0], a2.shape[0]))], [j21, a2]])
            s = np.block([[s1, np.zeros_like(s1)], [np.zeros_like(s2), s2]])
            check_conservative(combine_hierarchical(component(a1, s1), component(a2, s2), bound_k), a, s)

    def test_small_gain(self):
        rng = np.random.default_rng(300)
        applied = 0
        for _ in range(self.TRIALS):
            a1, a2, s1, s2 = self.trial_blocks(rng)
            j12 = 0.3 * rng.normal(size=(a1.shape[0], a2.shape[0]))
            j21 = 0.3 * rng.normal(size=(a2.shape[0], a1.shape[0]))
            coupling = CouplingSpec.from_jacobians(np.eye(a1.shape[0]), np.eye(a2.shape[0]), j12, j21)
            result = combine_small_gain(component(a1, s1), component(a2, s2), coupling)
            if not result.applicable:
                continue
            applied += 1
            a = np.block([[a1, j12], [j21, a2]])
            s = np.block([[s1, np.zeros_like(s1)], [np.zeros_like(s2), s2]])
            check_conservative(result.certificate, a, s)
        assert applied > 0

    def test_parallel(self):
        rng = np.random.default_rng(400)
        for _ in range(self.TRIALS):
            n = int(rng.integers(1, 4))
            a1, a2 = random_stable(rng, n), random_stable(rng, n)
            s1, s2 = rng.normal(size=(n, 2)), rng.normal(size=(n, 2))
            l1, l2 = rng.uniform(0.1, 1.0, size=2)
            m1, m2 = l1 + rng.uniform(0.0, 1.0), l2 + rng.uniform(0.0, 1.0)
            w1, w2 = rng.uniform(l1, m1), rng.uniform(l2, m2)
            a = w1 * a1 + w2 * a2
            s = np.hstack([np.sqrt(w1) * s1, np.sqrt(w2) * s2])
            combined = combine_parallel(component(a1, s1), component(a2, s2), SuperpositionWeights(l1, m1, l2, m2))
            check_conservative(combined, a, s)
