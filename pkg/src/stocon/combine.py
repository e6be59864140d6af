"""
Certificate algebra for combinations of stochastically contracting systems
Author: Jay Guwalani

Each rule takes component certificates with constant metrics, plus what it
needs to know about the coupling, and returns a Combined certificate whose
metric lives on the stacked state (x1, x2).
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from .core import (ContractionCertificate, DomainBox, Provenance, block_diagonal_metric)
from .errors import MetricMismatchError, MissingCouplingBoundError, NonConstantMetricError
from .matalg import largest_singular_value, lu_inverse

logger = logging.getLogger(__name__)

METRIC_MATCH_TOL = 1e-10
LOG_K_TOL = 1e-10
DEFAULT_K_SEARCH = (1e-8, 1e8)
ONE_SIDED_GAIN_FRACTION = 0.25

CouplingJacobian = Union[np.ndarray, Callable[[np.ndarray, float], np.ndarray]]


@dataclass(frozen=True)
class CouplingSpec:
    """Suprema describing how two subsystems are coupled"""
    j12_sup_sing: Optional[float] = None
    j21_sup_sing: Optional[float] = None
    feedback_k: Optional[float] = None
    hierarchy_bound_k: Optional[float] = None

    def __post_init__(self):
        for name in ("j12_sup_sing", "j21_sup_sing"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")
        for name in ("feedback_k", "hierarchy_bound_k"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")

    @classmethod
    def from_jacobians(cls, theta1, theta2, j12: CouplingJacobian, j21: CouplingJacobian,
                       sample_points: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> "CouplingSpec":
        """Sample sup sing(Theta1 J12 Theta2^-1) and sup sing(Theta2 J21 Theta1^-1).

        Jacobians are constant matrices or callables of the stacked state and time.
        """
        theta1 = np.asarray(theta1, dtype=float)
        theta2 = np.asarray(theta2, dtype=float)
        inv1, _ = lu_inverse(theta1)
        inv2, _ = lu_inverse(theta2)
        s12 = max(largest_singular_value(theta1 @ j @ inv2) for j in _evaluate(j12, sample_points))
        s21 = max(largest_singular_value(theta2 @ j @ inv1) for j in _evaluate(j21, sample_points))
        return cls(j12_sup_sing=s12, j21_sup_sing=s21,
                   hierarchy_bound_k=s21 ** 2 if s21 > 0 else None)


def _evaluate(jac: CouplingJacobian, sample_points) -> Sequence[np.ndarray]:
    if not callable(jac):
        return [np.atleast_2d(np.asarray(jac, dtype=float))]
    if sample_points is None:
        raise ValueError("sample_points are required when coupling Jacobians are callables")
    states, times = sample_points
    return [np.atleast_2d(np.asarray(jac(x, float(t)), dtype=float)) for x, t in zip(states, times)]


@dataclass(frozen=True)
class SuperpositionWeights:
    """Bounds l_i <= alpha_i(t) <= m_i on the superposition weights"""
    l1: float
    m1: float
    l2: float
    m2: float

    def __post_init__(self):
        if not (0 < self.l1 <= self.m1 and 0 < self.l2 <= self.m2):
            raise ValueError(f"weights must satisfy 0 < l_i <= m_i, got {self}")


@dataclass(frozen=True)
class SmallGainResult:
    applicable: bool
    certificate: Optional[ContractionCertificate]
    k_opt: float
    min_sing_sq: float


def _require_constant(*certs: ContractionCertificate):
    for cert in certs:
        if not cert.metric.is_constant:
            raise NonConstantMetricError("combination rules need constant metrics")


def _stacked_domain(c1: ContractionCertificate, c2: ContractionCertificate) -> DomainBox:
    return DomainBox(lower=np.concatenate([c1.domain.lower, c2.domain.lower]),
                     upper=np.concatenate([c1.domain.upper, c2.domain.upper]),
                     t_max=min(c1.domain.t_max, c2.domain.t_max),
                     sample_count=max(c1.domain.sample_count, c2.domain.sample_count))


def _tree(rule: str, rate: float, bound: float, c1: ContractionCertificate,
          c2: ContractionCertificate, **params) -> Dict[str, Any]:
    return {"rule": rule, "lambda": float(rate), "C": float(bound),
            "params": {k: float(v) for k, v in params.items()},
            "inputs": [c1.tree(), c2.tree()]}


def combine_parallel(c1: ContractionCertificate, c2: ContractionCertificate,
                     w: SuperpositionWeights) -> ContractionCertificate:
    """Superposition alpha1(t) a1 + alpha2(t) a2 of two systems sharing one metric"""
    _require_constant(c1, c2)
    m1, m2 = c1.metric.matrix_at(0.0), c2.metric.matrix_at(0.0)
    if m1.shape != m2.shape or np.max(np.abs(m1 - m2)) > METRIC_MATCH_TOL:
        raise MetricMismatchError("parallel combination needs both certificates in the same metric")

    rate = w.l1 * c1.rate_lambda + w.l2 * c2.rate_lambda
    bound = w.m1 * c1.bound_c + w.m2 * c2.bound_c
    return ContractionCertificate(
        rate_lambda=rate, bound_c=bound, metric=c1.metric, domain=c1.domain,
        provenance=Provenance.COMBINED,
        provenance_tree=_tree("parallel", rate, bound, c1, c2, l1=w.l1, m1=w.m1, l2=w.l2, m2=w.m2))


def combine_feedback(c1: ContractionCertificate, c2: ContractionCertificate, k: float) -> ContractionCertificate:
    """Negative feedback J12 = -k Theta1^-1 (Theta2 J21 Theta1^-1)^T Theta2.

    The structure is the caller's assertion; it is recorded in the notes and
    can be spot-checked with check_feedback_structure.
    """
    if not k > 0:
        raise ValueError(f"feedback gain k must be positive, got {k}")
    _require_constant(c1, c2)

    rate = min(c1.rate_lambda, c2.rate_lambda)
    bound = c1.bound_c + k * c2.bound_c
    metric = block_diagonal_metric([c1.metric, c2.metric], [1.0, k])
    return ContractionCertificate(
        rate_lambda=rate, bound_c=bound, metric=metric, domain=_stacked_domain(c1, c2),
        provenance=Provenance.COMBINED,
        notes=(f"caller asserts feedback structure Theta1 J12 Theta2^-1 = -{k:g} (Theta2 J21 Theta1^-1)^T",),
        provenance_tree=_tree("feedback", rate, bound, c1, c2, k=k))


def combine_hierarchical(c1: ContractionCertificate, c2: ContractionCertificate,
                         bound_k: float) -> ContractionCertificate:
    """x1 drives x2 with sing^2(Theta2 J21 Theta1^-1) <= bound_k and no return path"""
    if not bound_k > 0:
        raise ValueError(f"hierarchy bound K must be positive, got {bound_k}")
    _require_constant(c1, c2)

    l1, l2 = c1.rate_lambda, c2.rate_lambda
    eps_sq = 2.0 * l1 * l2 / bound_k
    rate = 0.5 * (l1 + l2 - np.hypot(l1, l2))
    bound = c1.bound_c + eps_sq * c2.bound_c
    metric = block_diagonal_metric([c1.metric, c2.metric], [1.0, eps_sq])
    return ContractionCertificate(
        rate_lambda=float(rate), bound_c=float(bound), metric=metric, domain=_stacked_domain(c1, c2),
        provenance=Provenance.COMBINED,
        notes=("caller asserts J12 = 0",),
        provenance_tree=_tree("hierarchical", rate, bound, c1, c2, K=bound_k))


def small_gain_estimate(k: float, s12: float, s21: float) -> float:
    """Upper estimate (sqrt(k) s21 + s12 / sqrt(k)) / 2 of sing(B_k)"""
    root = np.sqrt(k)
    return 0.5 * (root * s21 + s12 / root)


def _one_sided_k(s12: float, s21: float, rate_product: float, k_min: float, k_max: float) -> float:
    """k putting the one-way coupling term at a quarter of lambda1 lambda2.

    The estimate only improves as k runs to one end of the search range,
    where the block metric degenerates; stop where the gain condition holds with margin.
    """
    target = ONE_SIDED_GAIN_FRACTION * rate_product
    # s21 = 0: sing^2 = s12^2 / 4k; s12 = 0: sing^2 = k s21^2 / 4
    k = s12 ** 2 / (4.0 * target) if s21 == 0 else 4.0 * target / s21 ** 2
    logger.warning(f"One-way coupling (s12={s12:.6g}, s21={s21:.6g}): small-gain metric weight capped "
                   f"at k={k:.6g}; combine_hierarchical certifies this structure without a search")
    return float(np.clip(k, k_min, k_max))


def _minimize_log_k(s12: float, s21: float, k_min: float, k_max: float, rate_product: float) -> float:
    lo, hi = np.log(k_min), np.log(k_max)
    if s12 == 0 and s21 == 0:
        return float(np.clip(1.0, k_min, k_max))
    if s12 == 0 or s21 == 0:
        return _one_sided_k(s12, s21, rate_product, k_min, k_max)

    k_star = float(np.clip(s12 / s21, k_min, k_max))
    mid = np.log(k_star)
    if not lo < mid < hi:
        return k_star
    objective = lambda log_k: small_gain_estimate(np.exp(log_k), s12, s21)
    try:
        res = optimize.minimize_scalar(objective, bracket=(lo, mid, hi), method="golden",
                                       options={"xtol": LOG_K_TOL})
    except ValueError:
        return k_star
    k_golden = float(np.exp(res.x))
    # k_star is the exact minimizer; golden only wins beyond rounding noise
    if small_gain_estimate(k_golden, s12, s21) < small_gain_estimate(k_star, s12, s21) * (1.0 - 1e-12):
        return k_golden
    return k_star


def combine_small_gain(c1: ContractionCertificate, c2: ContractionCertificate, coupling: CouplingSpec,
                       k_search: Tuple[float, float] = DEFAULT_K_SEARCH) -> SmallGainResult:
    """Two-way coupling certified when inf_k sing^2(B_k) < lambda1 lambda2"""
    if coupling.j12_sup_sing is None or coupling.j21_sup_sing is None:
        raise MissingCouplingBoundError("small-gain combination needs both j12_sup_sing and j21_sup_sing")
    k_min, k_max = k_search
    if not 0 < k_min <= k_max:
        raise ValueError(f"k_search must be a positive range, got {k_search}")
    _require_constant(c1, c2)

    s12, s21 = coupling.j12_sup_sing, coupling.j21_sup_sing
    l1, l2 = c1.rate_lambda, c2.rate_lambda
    k_opt = _minimize_log_k(s12, s21, k_min, k_max, l1 * l2)
    sing_sq = small_gain_estimate(k_opt, s12, s21) ** 2

    if not sing_sq < l1 * l2:
        logger.warning(f"Small-gain condition fails | inf sing^2={sing_sq:.6g} >= lambda1*lambda2={l1 * l2:.6g}")
        return SmallGainResult(applicable=False, certificate=None, k_opt=k_opt, min_sing_sq=float(sing_sq))

    rate = 0.5 * (l1 + l2) - np.sqrt((0.5 * (l1 - l2)) ** 2 + sing_sq)
    bound = c1.bound_c + k_opt * c2.bound_c
    metric = block_diagonal_metric([c1.metric, c2.metric], [1.0, k_opt])
    cert = ContractionCertificate(
        rate_lambda=float(rate), bound_c=float(bound), metric=metric, domain=_stacked_domain(c1, c2),
        provenance=Provenance.COMBINED,
        provenance_tree=_tree("small-gain", rate, bound, c1, c2, k=k_opt, s12=s12, s21=s21))
    return SmallGainResult(applicable=True, certificate=cert, k_opt=k_opt, min_sing_sq=float(sing_sq))


def check_feedback_structure(theta1, theta2, j12: CouplingJacobian, j21: CouplingJacobian, k: float,
                             tol: float = 1e-8,
                             sample_points: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> bool:
    """Spot-check Theta1 J12 Theta2^-1 = -k (Theta2 J21 Theta1^-1)^T at the given points"""
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    inv1, _ = lu_inverse(theta1)
    inv2, _ = lu_inverse(theta2)
    for a, b in zip(_evaluate(j12, sample_points), _evaluate(j21, sample_points)):
        lhs = theta1 @ a @ inv2
        rhs = -k * (theta2 @ b @ inv1).T
        if lhs.shape != rhs.shape:
            return False
        if np.max(np.abs(lhs - rhs)) > tol * (1.0 + np.max(np.abs(rhs))):
            return False
    return True
