"""
Domain model: SDE systems, contraction metrics, domains and certificates
Author: Jay Guwalani

Every callable attached to an ``SdeSystem`` works on arrays whose last axis
is the state (shape ``(..., n)``) and a scalar time, so the simulator can
push a whole batch of paths through one call. Types here are immutable.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Any, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .errors import ConfigError, DimensionMismatchError, NotPositiveDefiniteError
from .matalg import PD_TOL, check_symmetric, extreme_eigs

logger = logging.getLogger(__name__)

JACOBIAN_RTOL = 1e-5
FD_STEP = 1e-6

StateFn = Callable[[np.ndarray, float], np.ndarray]
TimeFn = Callable[[float], np.ndarray]


class MetricKind(str, Enum):
    IDENTITY = "Identity"
    CONSTANT = "ConstantMatrix"
    TIME_VARYING = "TimeVarying"


class Provenance(str, Enum):
    ESTIMATED = "Estimated"
    DECLARED = "Declared"
    COMBINED = "Combined"


@dataclass(frozen=True, eq=False)
class SdeSystem:
    """Ito system da = f(a, t) dt + sigma(a, t) dW^d"""
    n: int
    d: int
    drift: StateFn
    diffusion: StateFn
    drift_jacobian: StateFn
    lipschitz_growth_declared: Optional[Tuple[float, float]] = None
    name: str = "sde"

    def __post_init__(self):
        if int(self.n) < 1 or int(self.d) < 1:
            raise ValueError(f"state and noise dimensions must be positive, got n={self.n}, d={self.d}")
        if self.lipschitz_growth_declared is not None:
            k1, k2 = self.lipschitz_growth_declared
            if k1 <= 0 or k2 <= 0:
                raise ValueError("declared Lipschitz/growth constants must be positive")

    def noise_free(self) -> "SdeSystem":
        """Same drift with sigma identically zero"""
        n, d = self.n, self.d

        def zero_diffusion(x, t):
            x = np.asarray(x, dtype=float)
            return np.zeros(x.shape[:-1] + (n, d))

        return SdeSystem(n=n, d=d, drift=self.drift, diffusion=zero_diffusion,
                         drift_jacobian=self.drift_jacobian,
                         lipschitz_growth_declared=self.lipschitz_growth_declared,
                         name=f"{self.name}-noise-free")


@dataclass(frozen=True, eq=False)
class Metric:
    """Metric M(t) = Theta(t)^T Theta(t) with lambda_min(M(t)) >= beta"""
    theta: TimeFn
    theta_dot: TimeFn
    beta: float
    kind: MetricKind
    dim: int
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"metric lower bound beta must be positive, got {self.beta}")

    @property
    def is_constant(self) -> bool:
        return self.kind in (MetricKind.IDENTITY, MetricKind.CONSTANT)

    def matrix_at(self, t: float) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        th = np.asarray(self.theta(t), dtype=float)
        return th.T @ th

    def derivative_at(self, t: float) -> np.ndarray:
        if self.is_constant:
            return np.zeros((self.dim, self.dim))
        th = np.asarray(self.theta(t), dtype=float)
        thd = np.asarray(self.theta_dot(t), dtype=float)
        return thd.T @ th + th.T @ thd

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"kind": self.kind.value, "beta": float(self.beta)}
        if self.kind == MetricKind.CONSTANT:
            doc["matrix"] = np.asarray(self.matrix).tolist()
        return doc


@dataclass(frozen=True, eq=False)
class DomainBox:
    """Region over which suprema and infima are sampled"""
    lower: np.ndarray
    upper: np.ndarray
    t_max: float
    sample_count: int

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DimensionMismatchError(f"box bounds have shapes {lower.shape} and {upper.shape}")
        if np.any(lower > upper):
            raise ValueError("domain lower bound exceeds upper bound")
        if self.t_max < 0:
            raise ValueError(f"t_max must be nonnegative, got {self.t_max}")
        if int(self.sample_count) < 1:
            raise ValueError(f"sample_count must be at least 1, got {self.sample_count}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "sample_count", int(self.sample_count))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @classmethod
    def cube(cls, n: int, half_width: float, t_max: float = 0.0, sample_count: int = 256) -> "DomainBox":
        return cls(lower=np.full(n, -half_width), upper=np.full(n, half_width),
                   t_max=t_max, sample_count=sample_count)

    def to_dict(self) -> Dict[str, Any]:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist(),
                "t_max": float(self.t_max), "samples": self.sample_count}

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "DomainBox":
        return cls(lower=doc["lower"], upper=doc["upper"], t_max=doc["t_max"],
                   sample_count=doc["samples"])


@dataclass(frozen=True, eq=False)
class ContractionCertificate:
    """(lambda, C, M): contraction at rate lambda and tr(sigma^T M sigma) <= C over a declared domain"""
    rate_lambda: float
    bound_c: float
    metric: Metric
    domain: DomainBox
    provenance: Provenance
    notes: Tuple[str, ...] = ()
    provenance_tree: Optional[Dict[str, Any]] = None

    def __post_init__(self):
        if not (np.isfinite(self.rate_lambda) and self.rate_lambda > 0):
            raise ValueError(f"certificate rate must be positive, got {self.rate_lambda}")
        if not (np.isfinite(self.bound_c) and self.bound_c >= 0):
            raise ValueError(f"certificate bound must be nonnegative, got {self.bound_c}")

    @property
    def c_over_lambda(self) -> float:
        return self.bound_c / self.rate_lambda

    def tree(self) -> Dict[str, Any]:
        """Provenance expression; leaves describe themselves"""
        if self.provenance_tree is not None:
            return self.provenance_tree
        return {"provenance": self.provenance.value, "lambda": self.rate_lambda, "C": self.bound_c}

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "lambda": float(self.rate_lambda),
            "C": float(self.bound_c),
            "metric": self.metric.to_dict(),
            "domain": self.domain.to_dict(),
            "provenance": self.provenance.value,
        }
        if self.notes:
            doc["notes"] = list(self.notes)
        if self.provenance == Provenance.COMBINED:
            doc["provenance_tree"] = self.tree()
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, doc: Dict[str, Any], metric: Optional[Metric] = None) -> "ContractionCertificate":
        try:
            domain = DomainBox.from_dict(doc["domain"])
            if metric is None:
                metric = _metric_from_dict(doc["metric"], domain.dim)
            return cls(rate_lambda=float(doc["lambda"]), bound_c=float(doc["C"]), metric=metric,
                       domain=domain, provenance=Provenance(doc["provenance"]),
                       notes=tuple(doc.get("notes", ())),
                       provenance_tree=doc.get("provenance_tree"))
        except KeyError as e:
            raise ConfigError(f"certificate document is missing field {e}") from e

    @classmethod
    def from_json(cls, text: str, metric: Optional[Metric] = None) -> "ContractionCertificate":
        return cls.from_dict(json.loads(text), metric=metric)


def _metric_from_dict(doc: Dict[str, Any], n: int) -> Metric:
    kind = MetricKind(doc["kind"])
    if kind == MetricKind.IDENTITY:
        return make_identity_metric(n)
    if kind == MetricKind.CONSTANT:
        return _constant_metric(np.asarray(doc["matrix"], dtype=float), beta=float(doc["beta"]))
    raise ConfigError("time-varying metrics cannot be rebuilt from JSON; pass metric= explicitly")


def make_identity_metric(n: int) -> Metric:
    """Identity metric, Theta = I and beta = 1"""
    if int(n) < 1:
        raise ValueError(f"metric dimension must be positive, got {n}")
    eye = np.eye(n)
    zeros = np.zeros((n, n))
    return Metric(theta=lambda t: eye, theta_dot=lambda t: zeros, beta=1.0,
                  kind=MetricKind.IDENTITY, dim=int(n), matrix=eye)


def _constant_metric(m: np.ndarray, beta: Optional[float] = None) -> Metric:
    m = check_symmetric(m)
    lam_min = extreme_eigs(m).lambda_min
    if lam_min <= PD_TOL:
        raise NotPositiveDefiniteError(f"metric is not positive definite (lambda_min={lam_min:.3e})")
    m = 0.5 * (m + m.T)
    # upper Cholesky factor U satisfies U^T U = M
    theta = linalg.cholesky(m, lower=False)
    zeros = np.zeros_like(m)
    return Metric(theta=lambda t: theta, theta_dot=lambda t: zeros,
                  beta=float(lam_min if beta is None else beta),
                  kind=MetricKind.CONSTANT, dim=m.shape[0], matrix=m)


def make_constant_metric(m) -> Metric:
    """Constant metric from an SPD matrix, beta = lambda_min(m)"""
    return _constant_metric(np.asarray(m, dtype=float))


def make_time_varying_metric(theta: TimeFn, theta_dot: TimeFn, beta: float, dim: int) -> Metric:
    """Time-varying metric from user-supplied Theta(t) and dTheta/dt"""
    return Metric(theta=theta, theta_dot=theta_dot, beta=float(beta),
                  kind=MetricKind.TIME_VARYING, dim=int(dim))


def block_diagonal_metric(metrics: Sequence[Metric], scales: Sequence[float]) -> Metric:
    """Constant metric blockdiag(s_1 M_1, s_2 M_2, ...)"""
    blocks = [s * m.matrix_at(0.0) for m, s in zip(metrics, scales)]
    return make_constant_metric(linalg.block_diag(*blocks))


@dataclass
class ValidationReport:
    """Outcome of validate_system"""
    passed: bool
    max_jacobian_discrepancy: float
    worst_point: Optional[Tuple[List[float], float]]
    non_finite: List[Dict[str, Any]] = field(default_factory=list)
    n_points: int = 0
    shape_errors: List[Dict[str, Any]] = field(default_factory=list)


@dataclass
class MetricValidationReport:
    """Outcome of validate_metric"""
    passed: bool
    min_eigenvalue: float
    max_theta_dot_discrepancy: float
    failures: List[str] = field(default_factory=list)
    n_points: int = 0


def _fd_step(x: np.ndarray) -> float:
    return FD_STEP * (1.0 + float(np.linalg.norm(x)))


def finite_difference_jacobian(drift: StateFn, x: np.ndarray, t: float) -> np.ndarray:
    """Centered finite-difference Jacobian of ``drift`` at (x, t)"""
    x = np.asarray(x, dtype=float)
    h = _fd_step(x)
    shifts = h * np.eye(x.shape[0])
    plus = np.asarray(drift(x + shifts, t), dtype=float)
    minus = np.asarray(drift(x - shifts, t), dtype=float)
    # row j of plus/minus is f(x +/- h e_j)
    return ((plus - minus) / (2.0 * h)).T


def validate_system(sys: SdeSystem, dom: DomainBox, seed: int = 0) -> ValidationReport:
    """Check finiteness and the analytic Jacobian against finite differences on sampled points"""
    from utils.sampling import halton_points

    if dom.dim != sys.n:
        raise DimensionMismatchError(f"domain has dimension {dom.dim}, system has n={sys.n}")

    states, times = halton_points(dom, seed=seed)
    worst = 0.0
    worst_point = None
    non_finite: List[Dict[str, Any]] = []
    shape_errors: List[Dict[str, Any]] = []

    for i, (x, t) in enumerate(zip(states, times)):
        t = float(t)
        f = np.asarray(sys.drift(x, t), dtype=float)
        g = np.asarray(sys.diffusion(x, t), dtype=float)
        jac = np.asarray(sys.drift_jacobian(x, t), dtype=float)
        if f.shape != (sys.n,) or g.shape != (sys.n, sys.d) or jac.shape != (sys.n, sys.n):
            shape_errors.append({"index": i, "state": x.tolist(), "time": t,
                                 "shapes": {"drift": list(f.shape), "diffusion": list(g.shape),
                                            "jacobian": list(jac.shape)}})
            continue
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g)) and np.all(np.isfinite(jac))):
            non_finite.append({"index": i, "state": x.tolist(), "time": t})
            continue
        fd = finite_difference_jacobian(sys.drift, x, t)
        discrepancy = float(np.max(np.abs(fd - jac))) / (1.0 + float(np.max(np.abs(jac))))
        if discrepancy > worst:
            worst = discrepancy
            worst_point = (x.tolist(), t)

    passed = worst < JACOBIAN_RTOL and not non_finite and not shape_errors
    if not passed:
        logger.warning(f"System '{sys.name}' failed validation | discrepancy={worst:.3e} "
                       f"| non_finite={len(non_finite)} | shape_errors={len(shape_errors)}")
    return ValidationReport(passed=passed, max_jacobian_discrepancy=worst, worst_point=worst_point,
                            non_finite=non_finite, n_points=len(times), shape_errors=shape_errors)


def validate_metric(metric: Metric, t_max: float, sample_count: int = 64) -> MetricValidationReport:
    """Check symmetry, the beta lower bound and theta_dot on a uniform time grid"""
    times = np.linspace(0.0, t_max, max(1, int(sample_count)))
    failures: List[str] = []
    min_eig = np.inf
    worst_dot = 0.0

    for t in times:
        t = float(t)
        m = metric.matrix_at(t)
        try:
            eigs = extreme_eigs(m)
        except ValueError as e:
            failures.append(f"t={t}: {e}")
            continue
        min_eig = min(min_eig, eigs.lambda_min)
        if eigs.lambda_min < metric.beta * (1.0 - 1e-12):
            failures.append(f"t={t}: lambda_min(M)={eigs.lambda_min:.6g} < beta={metric.beta:.6g}")

        if metric.kind == MetricKind.TIME_VARYING:
            h = FD_STEP * (1.0 + abs(t))
            fd = (np.asarray(metric.theta(t + h)) - np.asarray(metric.theta(t - h))) / (2.0 * h)
            analytic = np.asarray(metric.theta_dot(t), dtype=float)
            discrepancy = float(np.max(np.abs(fd - analytic))) / (1.0 + float(np.max(np.abs(analytic))))
            worst_dot = max(worst_dot, discrepancy)
            if discrepancy >= JACOBIAN_RTOL:
                failures.append(f"t={t}: theta_dot discrepancy {discrepancy:.3e}")

    return MetricValidationReport(passed=not failures, min_eigenvalue=float(min_eig),
                                  max_theta_dot_discrepancy=worst_dot, failures=failures,
                                  n_points=len(times))
