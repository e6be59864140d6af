"""
Certificate estimation, mean-square bounds and Monte-Carlo verification
Author: Jay Guwalani

Suprema and infima are taken over sampled points of a DomainBox (scrambled
Halton points, optionally merged with states harvested from simulations).
They are estimates, not proofs.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from utils.sampling import Points, halton_points, merge_points

from .core import ContractionCertificate, DomainBox, Metric, Provenance, SdeSystem
from .errors import DimensionMismatchError, SingularThetaError
from .matalg import extreme_eigs, lu_inverse, symmetric_part
from .sim import EnsemblePairStats, ObservableStats, PairMode

logger = logging.getLogger(__name__)

THETA_COND_LIMIT = 1e12
DEFAULT_K_SIGMA = 3.0
GENERATOR_TOL = 1e-7


@dataclass(frozen=True)
class RateEstimate:
    """lambda = -max lambda_max(sym(F)); contracting is False when lambda <= 0"""
    rate: float
    witness: Tuple[Tuple[float, ...], float]
    contracting: bool
    max_condition: float


@dataclass(frozen=True)
class NoiseEstimate:
    bound: float
    witness: Tuple[Tuple[float, ...], float]


def _points(dom: DomainBox, extra_points: Optional[Points], seed: int) -> Points:
    return merge_points(halton_points(dom, seed=seed), extra_points)


def _theta_and_inverse(metric: Metric, t: float) -> Tuple[np.ndarray, np.ndarray, float]:
    theta = np.asarray(metric.theta(t), dtype=float)
    inverse, cond = lu_inverse(theta)
    if not cond <= THETA_COND_LIMIT:
        raise SingularThetaError(f"Theta({t}) has condition number {cond:.3e}")
    return theta, inverse, cond


def generalized_jacobian(sys: SdeSystem, metric: Metric, x, t: float) -> np.ndarray:
    """F = (dTheta/dt + Theta df/dx) Theta^-1"""
    theta, inverse, _ = _theta_and_inverse(metric, t)
    jac = np.asarray(sys.drift_jacobian(np.asarray(x, dtype=float), t), dtype=float)
    return (np.asarray(metric.theta_dot(t), dtype=float) + theta @ jac) @ inverse


def estimate_rate(sys: SdeSystem, metric: Metric, dom: DomainBox,
                  extra_points: Optional[Points] = None, seed: int = 0) -> RateEstimate:
    """Largest contraction rate consistent with the sampled generalized Jacobians"""
    if metric.dim != sys.n or dom.dim != sys.n:
        raise DimensionMismatchError(
            f"system n={sys.n}, metric dim={metric.dim}, domain dim={dom.dim}")

    states, times = _points(dom, extra_points, seed)
    worst = -np.inf
    witness = None
    max_cond = 0.0
    cache: Dict[float, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    for x, t in zip(states, times):
        t = float(t)
        tm = 0.0 if metric.is_constant else t
        if tm not in cache:
            theta, inverse, cond = _theta_and_inverse(metric, tm)
            max_cond = max(max_cond, cond)
            cache[tm] = (theta, inverse, np.asarray(metric.theta_dot(tm), dtype=float))
        theta, inverse, theta_dot = cache[tm]
        jac = np.asarray(sys.drift_jacobian(x, t), dtype=float)
        lam_max = extreme_eigs(symmetric_part((theta_dot + theta @ jac) @ inverse)).lambda_max
        # strict comparison keeps the first maximizer on ties
        if lam_max > worst:
            worst = lam_max
            witness = (tuple(float(v) for v in x), t)
        if not metric.is_constant:
            cache.clear()

    rate = -worst
    contracting = rate > 0
    if not contracting:
        logger.warning(f"System '{sys.name}' is not contracting on the sampled domain "
                       f"| lambda={rate:.6g} | witness={witness}")
    return RateEstimate(rate=float(rate), witness=witness, contracting=contracting,
                        max_condition=float(max_cond))


def estimate_noise_bound(sys: SdeSystem, metric: Metric, dom: DomainBox,
                         extra_points: Optional[Points] = None, seed: int = 0) -> NoiseEstimate:
    """C = max tr(sigma^T M sigma) over sampled points"""
    states, times = _points(dom, extra_points, seed)
    best = 0.0
    witness = (tuple(float(v) for v in states[0]), float(times[0]))
    for x, t in zip(states, times):
        t = float(t)
        sigma = np.asarray(sys.diffusion(x, t), dtype=float)
        value = float(np.trace(sigma.T @ metric.matrix_at(t) @ sigma))
        if value > best:
            best = value
            witness = (tuple(float(v) for v in x), t)
    return NoiseEstimate(bound=best, witness=witness)


def certify(sys: SdeSystem, metric: Metric, dom: DomainBox,
            extra_points: Optional[Points] = None, seed: int = 0) -> Optional[ContractionCertificate]:
    """Estimated certificate, or None when the sampled rate is not positive"""
    rate = estimate_rate(sys, metric, dom, extra_points, seed)
    if not rate.contracting:
        return None
    noise = estimate_noise_bound(sys, metric, dom, extra_points, seed)
    cert = ContractionCertificate(rate_lambda=rate.rate, bound_c=noise.bound, metric=metric,
                                  domain=dom, provenance=Provenance.ESTIMATED)
    logger.info(f"Certified '{sys.name}' | lambda={cert.rate_lambda:.6g} | C={cert.bound_c:.6g}")
    return cert


def generator_value(sys: SdeSystem, metric: Metric, a, b, t: float) -> float:
    """Ito generator of V = (a-b)^T M(t) (a-b) along independent-noise pairs"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diff = a - b
    m = metric.matrix_at(t)
    sa = np.asarray(sys.diffusion(a, t), dtype=float)
    sb = np.asarray(sys.diffusion(b, t), dtype=float)
    drift_gap = np.asarray(sys.drift(a, t)) - np.asarray(sys.drift(b, t))
    return float(diff @ metric.derivative_at(t) @ diff + 2.0 * diff @ m @ drift_gap
                 + np.trace(sa.T @ m @ sa) + np.trace(sb.T @ m @ sb))


@dataclass(frozen=True)
class BoundEnvelope:
    """(c_over_lambda + initial_excess * exp(-decay_rate t)) / beta_divisor"""
    c_over_lambda: float
    decay_rate: float
    initial_excess: float
    beta_divisor: float = 1.0

    def __post_init__(self):
        if self.c_over_lambda < 0 or self.initial_excess < 0:
            raise ValueError("envelope terms must be nonnegative")
        if not self.decay_rate > 0 or not self.beta_divisor > 0:
            raise ValueError("decay rate and beta divisor must be positive")

    def metric_weighted(self, t) -> np.ndarray:
        """Bound on E[(a-b)^T M (a-b)], before dividing by beta"""
        t = np.asarray(t, dtype=float)
        return self.c_over_lambda + self.initial_excess * np.exp(-self.decay_rate * t)

    def __call__(self, t) -> np.ndarray:
        return self.metric_weighted(t) / self.beta_divisor

    @property
    def asymptote(self) -> float:
        return self.c_over_lambda / self.beta_divisor


def _c_over_lambda(cert: ContractionCertificate, mode: PairMode) -> float:
    c = cert.bound_c / 2.0 if mode == PairMode.NOISE_FREE_VS_NOISY else cert.bound_c
    return c / cert.rate_lambda


def ms_bound(cert: ContractionCertificate, e0: float, mode: PairMode = PairMode.PAIR_NOISY,
             sharp: bool = False) -> BoundEnvelope:
    """Mean-square envelope from initial (metric-weighted) squared distance ``e0``.

    ``sharp`` clips the excess to [e0 - C/lambda]^+, valid for deterministic
    initial conditions.
    """
    if e0 < 0:
        raise ValueError(f"e0 must be nonnegative, got {e0}")
    c_over = _c_over_lambda(cert, mode)
    excess = max(0.0, e0 - c_over) if sharp else float(e0)
    return BoundEnvelope(c_over_lambda=c_over, decay_rate=2.0 * cert.rate_lambda,
                         initial_excess=excess, beta_divisor=cert.metric.beta)


def ms_bound_from_initial_samples(cert: ContractionCertificate, v0_samples,
                                  mode: PairMode = PairMode.PAIR_NOISY) -> BoundEnvelope:
    """Envelope whose excess is the sample mean of [V0 - C/lambda]^+ over initial pairs"""
    v0 = np.asarray(v0_samples, dtype=float)
    if v0.size == 0 or np.any(v0 < 0):
        raise ValueError("initial samples must be a nonempty array of nonnegative values")
    c_over = _c_over_lambda(cert, mode)
    excess = float(np.mean(np.maximum(0.0, v0 - c_over)))
    return BoundEnvelope(c_over_lambda=c_over, decay_rate=2.0 * cert.rate_lambda,
                         initial_excess=excess, beta_divisor=cert.metric.beta)


def t_epsilon(cert: ContractionCertificate, e0: float, eps: float) -> float:
    """Time after which the initial excess has decayed below eps"""
    if not e0 > 0 or not eps > 0:
        raise ValueError(f"e0 and eps must be positive, got e0={e0}, eps={eps}")
    if e0 <= eps:
        return 0.0
    return float(np.log(np.sqrt(e0 / eps)) / (2.0 * cert.rate_lambda))


@dataclass(frozen=True)
class TailBound:
    t_epsilon: float
    level_a: float
    probability: float


def markov_tail(cert: ContractionCertificate, eps: float, level_a: float,
                e0: Optional[float] = None, at_time: Optional[float] = None) -> TailBound:
    """P(||a-b|| >= A) <= sqrt(C/lambda + eps) / A for t >= T_eps"""
    if not eps > 0 or not level_a > 0:
        raise ValueError(f"eps and level_a must be positive, got eps={eps}, A={level_a}")
    t_eps = t_epsilon(cert, e0, eps) if e0 is not None else 0.0
    if at_time is not None and at_time < t_eps:
        raise ValueError(f"tail bound only holds for t >= T_eps={t_eps:.6g}, asked for t={at_time}")
    probability = min(1.0, float(np.sqrt(cert.c_over_lambda + eps) / level_a))
    return TailBound(t_epsilon=t_eps, level_a=float(level_a), probability=probability)


def finite_time_supermartingale_tail(v0: float, lam: float, t_start: float, level_a: float) -> float:
    """P(sup_{s >= t_start} V(s) >= A) <= v0 exp(-lam t_start) / A, for generators with AV <= -lam V"""
    if v0 < 0 or not lam > 0 or not level_a > 0:
        raise ValueError("v0 must be nonnegative and lam, level_a positive")
    return min(1.0, float(v0 * np.exp(-lam * t_start) / level_a))


def gronwall_envelope(g0: float, lam: float, c: float, t):
    """C/lam + [g0 - C/lam]^+ exp(-lam t)"""
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    c_over = c / lam
    value = c_over + max(0.0, g0 - c_over) * np.exp(-lam * np.asarray(t, dtype=float))
    return float(value) if np.ndim(value) == 0 else value


def ou_exact_msd(a0: float, b0: float, lam: float, sigma: float, t):
    """E(a(t) - b(t))^2 for two independent-noise OU trajectories"""
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    decay = np.exp(-2.0 * lam * np.asarray(t, dtype=float))
    value = (a0 - b0) ** 2 * decay + sigma ** 2 / lam * (1.0 - decay)
    return float(value) if np.ndim(value) == 0 else value


@dataclass
class VerificationReport:
    passed: bool
    worst_margin: float
    worst_time: float
    k_sigma: float
    n_points: int

    def to_dict(self) -> Dict[str, Any]:
        return {"pass": bool(self.passed), "worst_margin": float(self.worst_margin),
                "worst_time": float(self.worst_time), "k_sigma": float(self.k_sigma),
                "n_points": int(self.n_points)}


def _report(margins: np.ndarray, times: np.ndarray, k_sigma: float, scale: np.ndarray) -> VerificationReport:
    if margins.size == 0:
        return VerificationReport(passed=True, worst_margin=np.inf, worst_time=np.nan,
                                  k_sigma=k_sigma, n_points=0)
    i = int(np.argmin(margins))
    passed = bool(np.all(margins >= -1e-12 * (1.0 + scale)))
    return VerificationReport(passed=passed, worst_margin=float(margins[i]),
                              worst_time=float(times[i]), k_sigma=k_sigma, n_points=int(margins.size))


def verify_envelope(stats: EnsemblePairStats, env: BoundEnvelope, k_sigma: float = DEFAULT_K_SIGMA,
                    t_min: float = 0.0) -> VerificationReport:
    """Pass iff msd(t) <= envelope(t) + k_sigma * stderr(t) for recorded t >= t_min"""
    mask = stats.times >= t_min
    times = stats.times[mask]
    bound = env.metric_weighted(times) if stats.weighted_by_metric else env(times)
    margins = bound + k_sigma * stats.std_err[mask] - stats.mean_sq_dist[mask]
    report = _report(margins, times, k_sigma, np.abs(bound))
    if not report.passed:
        logger.warning(f"Envelope check failed | worst_margin={report.worst_margin:.6g} "
                       f"| t={report.worst_time:.6g}")
    return report


@dataclass
class ObservableReport(VerificationReport):
    """Per-time band check plus the post-transient point estimate against the window's mean bound"""
    post_transient_mean: Optional[float] = None
    post_transient_bound: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        doc = super().to_dict()
        doc["post_transient_mean"] = self.post_transient_mean
        doc["post_transient_bound"] = self.post_transient_bound
        return doc


def verify_observable(stats: ObservableStats, bound_values, k_sigma: float = DEFAULT_K_SIGMA,
                      t_min: float = 0.0) -> ObservableReport:
    """Pass iff mean(t) <= bound(t) + k_sigma * stderr(t) for recorded t >= t_min
    and the mean over that window is at most the window's mean bound"""
    bound = np.asarray(bound_values, dtype=float)
    if bound.shape != stats.mean.shape:
        raise DimensionMismatchError(f"bound has shape {bound.shape}, stats {stats.mean.shape}")
    mask = stats.times >= t_min
    times = stats.times[mask]
    band = _report(bound[mask] + k_sigma * stats.std_err[mask] - stats.mean[mask], times, k_sigma,
                   np.abs(bound[mask]))
    if not mask.any():
        return ObservableReport(**vars(band))

    mean = float(np.mean(stats.mean[mask]))
    window_bound = float(np.mean(bound[mask]))
    # point estimate, no standard-error allowance
    steady_ok = mean <= window_bound + 1e-12 * (1.0 + abs(window_bound))
    report = ObservableReport(passed=band.passed and steady_ok, worst_margin=band.worst_margin,
                              worst_time=band.worst_time, k_sigma=k_sigma, n_points=band.n_points,
                              post_transient_mean=mean, post_transient_bound=window_bound)
    if not report.passed:
        logger.warning(f"Observable '{stats.name}' check failed | worst_margin={report.worst_margin:.6g} "
                       f"| post_transient_mean={mean:.6g} | bound={window_bound:.6g}")
    return report


def verify_against_oracle(stats: EnsemblePairStats, oracle_values,
                          k_sigma: float = DEFAULT_K_SIGMA) -> VerificationReport:
    """Pass iff |msd(t) - oracle(t)| <= k_sigma * stderr(t) at every recorded t"""
    oracle = np.asarray(oracle_values, dtype=float)
    if oracle.shape != stats.mean_sq_dist.shape:
        raise DimensionMismatchError(f"oracle has shape {oracle.shape}, stats {stats.mean_sq_dist.shape}")
    margins = k_sigma * stats.std_err - np.abs(stats.mean_sq_dist - oracle)
    report = _report(margins, stats.times, k_sigma, np.abs(oracle))
    if not report.passed:
        logger.warning(f"Oracle check failed | worst_margin={report.worst_margin:.6g} "
                       f"| t={report.worst_time:.6g}")
    return report


@dataclass
class GeneratorCheck:
    n_samples: int
    violations: int
    worst_slack: float
    worst_point: Optional[Dict[str, Any]] = None
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = self.violations == 0


def verify_generator_inequality(sys: SdeSystem, cert: ContractionCertificate, n_samples: int = 10_000,
                                seed: int = 0, tol: float = GENERATOR_TOL) -> GeneratorCheck:
    """Count samples where generator_value > -2 lambda V + 2C + tol (1 + |V|)"""
    dom = cert.domain
    rng = np.random.default_rng(seed)
    lower, upper = dom.lower, dom.upper
    a_samples = rng.uniform(lower, upper, size=(n_samples, dom.dim))
    b_samples = rng.uniform(lower, upper, size=(n_samples, dom.dim))
    t_samples = rng.uniform(0.0, dom.t_max, size=n_samples)

    violations = 0
    worst = np.inf
    worst_point = None
    for a, b, t in zip(a_samples, b_samples, t_samples):
        t = float(t)
        diff = a - b
        v = float(diff @ cert.metric.matrix_at(t) @ diff)
        value = generator_value(sys, cert.metric, a, b, t)
        slack = -2.0 * cert.rate_lambda * v + 2.0 * cert.bound_c - value
        if slack < -tol * (1.0 + abs(v)):
            violations += 1
        if slack < worst:
            worst = slack
            worst_point = {"a": a.tolist(), "b": b.tolist(), "t": t}

    if violations:
        logger.warning(f"Generator inequality violated at {violations}/{n_samples} samples of '{sys.name}'")
    return GeneratorCheck(n_samples=n_samples, violations=violations, worst_slack=float(worst),
                          worst_point=worst_point)
