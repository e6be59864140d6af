"""
Tests for systems, metrics, domains and certificates
Author: Jay Guwalani
"""

import json
import os
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

# Add src to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from stocon.core import (ContractionCertificate, DomainBox, MetricKind, Provenance, SdeSystem,
                         finite_difference_jacobian, make_constant_metric, make_identity_metric,
                         make_time_varying_metric, validate_metric, validate_system)
from stocon.errors import ConfigError, DimensionMismatchError, NotPositiveDefiniteError, NotSymmetricError
from stocon.models import build_fn_pair, build_ou


@pytest.fixture
def ou():
    return build_ou(1.0, 1.0)


@pytest.fixture
def unit_box():
    return DomainBox.cube(1, 5.0, t_max=1.0, sample_count=64)


class TestMetrics:

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_identity_metric(self, n):
        metric = make_identity_metric(n)
        assert metric.kind == MetricKind.IDENTITY
        assert metric.beta == 1.0
        assert_allclose(metric.matrix_at(3.0), np.eye(n))
        assert_allclose(metric.derivative_at(3.0), np.zeros((n, n)))

    def test_constant_metric_factor_and_beta(self):
        m = np.array([[4.0, 1.0], [1.0, 3.0]])
        metric = make_constant_metric(m)
        theta = metric.theta(0.0)
        assert_allclose(theta.T @ theta, m, atol=1e-14)
        assert metric.beta == pytest.approx(np.linalg.eigvalsh(m)[0])

    def test_fn_style_diagonal_metric(self):
        metric = make_constant_metric(np.diag([1.0, 30.0]))
        assert metric.beta == pytest.approx(1.0)

    def test_indefinite_matrix_is_rejected(self):
        with pytest.raises(NotPositiveDefiniteError):
            make_constant_metric([[1.0, 2.0], [2.0, 1.0]])

    def test_asymmetric_matrix_is_rejected(self):
        with pytest.raises(NotSymmetricError):
            make_constant_metric([[1.0, 0.5], [0.0, 1.0]])

    def test_time_varying_metric_derivative(self):
        metric = make_time_varying_metric(lambda t: np.exp(t) * np.eye(2), lambda t: np.exp(t) * np.eye(2),
                                          beta=1.0, dim=2)
        assert not metric.is_constant
        assert_allclose(metric.derivative_at(0.5), 2.0 * np.exp(1.0) * np.eye(2))

    def test_validate_metric_catches_wrong_derivative(self):
        good = make_time_varying_metric(lambda t: np.exp(t) * np.eye(2), lambda t: np.exp(t) * np.eye(2),
                                        beta=1.0, dim=2)
        bad = make_time_varying_metric(lambda t: np.exp(t) * np.eye(2), lambda t: np.zeros((2, 2)),
                                       beta=1.0, dim=2)
        assert validate_metric(good, t_max=1.0).passed
        report = validate_metric(bad, t_max=1.0)
        assert not report.passed
        assert report.max_theta_dot_discrepancy > 1e-5

    def test_validate_metric_catches_beta_violation(self):
        metric = make_time_varying_metric(lambda t: np.eye(2), lambda t: np.zeros((2, 2)), beta=2.0, dim=2)
        assert not validate_metric(metric, t_max=1.0).passed


class TestDomainBox:

    def test_cube(self):
        dom = DomainBox.cube(3, 2.0, t_max=4.0, sample_count=10)
        assert dom.dim == 3
        assert_allclose(dom.lower, -2.0)
        assert_allclose(dom.upper, 2.0)

    def test_inverted_bounds_are_rejected(self):
        with pytest.raises(ValueError):
            DomainBox(lower=[1.0], upper=[0.0], t_max=1.0, sample_count=4)

    def test_mismatched_bounds_are_rejected(self):
        with pytest.raises(DimensionMismatchError):
            DomainBox(lower=[0.0, 0.0], upper=[1.0], t_max=1.0, sample_count=4)

    def test_dict_round_trip(self):
        dom = DomainBox(lower=[-1.0, 0.0], upper=[1.0, 2.0], t_max=3.0, sample_count=7)
        back = DomainBox.from_dict(dom.to_dict())
        assert_allclose(back.lower, dom.lower)
        assert_allclose(back.upper, dom.upper)
        assert back.t_max == 3.0 and back.sample_count == 7


class TestCertificate:

    def test_rejects_nonpositive_rate(self, unit_box):
        with pytest.raises(ValueError):
            ContractionCertificate(rate_lambda=0.0, bound_c=1.0, metric=make_identity_metric(1),
                                   domain=unit_box, provenance=Provenance.DECLARED)

    def test_rejects_negative_bound(self, unit_box):
        with pytest.raises(ValueError):
            ContractionCertificate(rate_lambda=1.0, bound_c=-1.0, metric=make_identity_metric(1),
                                   domain=unit_box, provenance=Provenance.DECLARED)

    def test_json_document(self):
        dom = DomainBox.cube(2, 1.0, t_max=1.0, sample_count=8)
        metric = make_constant_metric(np.diag([1.0, 4.0]))
        cert = ContractionCertificate(rate_lambda=0.5, bound_c=2.0, metric=metric, domain=dom,
                                      provenance=Provenance.ESTIMATED)
        doc = json.loads(cert.to_json())
        assert doc["lambda"] == 0.5 and doc["C"] == 2.0
        assert doc["metric"]["kind"] == "ConstantMatrix"
        assert "provenance_tree" not in doc
        assert list(doc) == sorted(doc)

        back = ContractionCertificate.from_json(cert.to_json())
        assert back.rate_lambda == 0.5 and back.bound_c == 2.0
        assert_allclose(back.metric.matrix_at(0.0), np.diag([1.0, 4.0]))
        assert back.metric.beta == pytest.approx(1.0)
        assert cert.c_over_lambda == pytest.approx(4.0)

    def test_time_varying_metric_needs_explicit_metric(self, unit_box):
        metric = make_time_varying_metric(lambda t: np.eye(1), lambda t: np.zeros((1, 1)), beta=1.0, dim=1)
        cert = ContractionCertificate(rate_lambda=1.0, bound_c=1.0, metric=metric, domain=unit_box,
                                      provenance=Provenance.DECLARED)
        with pytest.raises(ConfigError):
            ContractionCertificate.from_json(cert.to_json())
        back = ContractionCertificate.from_json(cert.to_json(), metric=metric)
        assert back.metric is metric

    def test_missing_field_is_a_config_error(self):
        with pytest.raises(ConfigError):
            ContractionCertificate.from_dict({"lambda": 1.0})


class TestSystems:

    def test_noise_free_copy(self, ou):
        quiet = ou.noise_free()
        assert_allclose(quiet.diffusion(np.ones((3, 1)), 0.0), np.zeros((3, 1, 1)))
        assert_allclose(quiet.drift(np.array([2.0]), 0.0), ou.drift(np.array([2.0]), 0.0))

    def test_finite_difference_of_linear_drift(self):
        a = np.array([[-1.0, 2.0], [0.5, -3.0]])
        fd = finite_difference_jacobian(lambda x, t: x @ a.T, np.array([0.3, -0.7]), 0.0)
        assert_allclose(fd, a, atol=1e-8)

    def test_validate_ou(self, ou, unit_box):
        report = validate_system(ou, unit_box)
        assert report.passed
        assert report.max_jacobian_discrepancy < 1e-8
        assert report.n_points == 64

    def test_validate_catches_wrong_jacobian(self, ou, unit_box):
        broken = SdeSystem(n=1, d=1, drift=ou.drift, diffusion=ou.diffusion,
                           drift_jacobian=lambda x, t: -2.0 * np.ones(np.shape(x)[:-1] + (1, 1)))
        report = validate_system(broken, unit_box)
        assert not report.passed
        assert report.max_jacobian_discrepancy > 1e-5

    def test_validate_fn_pair(self):
        fn = build_fn_pair()
        dom = DomainBox.cube(4, 3.0, t_max=1.0, sample_count=128)
        assert validate_system(fn.network.global_system, dom).passed

    def test_validate_reports_wrong_callable_shapes(self, ou, unit_box):
        # diffusion returns (n,) instead of (n, d)
        flat = SdeSystem(n=1, d=1, drift=ou.drift, diffusion=lambda x, t: np.ones(np.shape(x)),
                         drift_jacobian=ou.drift_jacobian)
        report = validate_system(flat, unit_box)
        assert not report.passed
        assert len(report.shape_errors) == report.n_points
        assert report.shape_errors[0]["shapes"] == {"drift": [1], "diffusion": [1], "jacobian": [1, 1]}
        assert report.non_finite == []

    def test_validate_checks_domain_dimension(self, ou):
        with pytest.raises(DimensionMismatchError):
            validate_system(ou, DomainBox.cube(2, 1.0))

    def test_nonpositive_dimensions_are_rejected(self):
        with pytest.raises(ValueError):
            SdeSystem(n=0, d=1, drift=None, diffusion=None, drift_jacobian=None)
