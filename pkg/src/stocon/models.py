"""
Builders for the worked systems
Author: Jay Guwalani

Ornstein-Uhlenbeck pairs, noisy linear-measurement observers, the
composite-variable velocity estimator and diffusively coupled networks
(FitzHugh-Nagumo in particular) with their synchronization projection.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import linalg

from utils.sampling import Points

from .analysis import certify, estimate_noise_bound, estimate_rate
from .core import (ContractionCertificate, DomainBox, Metric, Provenance, SdeSystem,
                   make_constant_metric, make_identity_metric)
from .errors import DimensionMismatchError, LaplacianNotDiffusiveError

logger = logging.getLogger(__name__)

LAPLACIAN_TOL = 1e-12
PROJECTION_TOL = 1e-12

TimeMatrix = Callable[[float], np.ndarray]


def _lead(x: np.ndarray) -> Tuple[int, ...]:
    return np.asarray(x).shape[:-1]


# --- Ornstein-Uhlenbeck ---------------------------------------------------

def build_ou(lam: float, sigma: float) -> SdeSystem:
    """Scalar da = -lam a dt + sigma dW"""
    if not lam > 0:
        raise ValueError(f"OU rate must be positive, got {lam}")

    def drift(x, t):
        return -lam * np.asarray(x, dtype=float)

    def diffusion(x, t):
        return np.full(_lead(x) + (1, 1), float(sigma))

    def jacobian(x, t):
        return np.full(_lead(x) + (1, 1), -float(lam))

    return SdeSystem(n=1, d=1, drift=drift, diffusion=diffusion, drift_jacobian=jacobian,
                     lipschitz_growth_declared=(float(lam), max(float(lam), abs(float(sigma)), 1e-12)),
                     name=f"ou(lambda={lam:g}, sigma={sigma:g})")


# --- observers ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ObserverSpec:
    """Noise-free plant with measurement H(t), injection K(t) and measurement noise Sigma(t)"""
    plant: SdeSystem
    h: TimeMatrix
    k_gain: TimeMatrix
    sigma_meas: TimeMatrix

    def __post_init__(self):
        n = self.plant.n
        h = np.atleast_2d(self.h(0.0))
        k = np.atleast_2d(self.k_gain(0.0))
        s = np.atleast_2d(self.sigma_meas(0.0))
        m = h.shape[0]
        if h.shape != (m, n) or k.shape != (n, m) or s.shape != (m, m):
            raise DimensionMismatchError(
                f"observer matrices H {h.shape}, K {k.shape}, Sigma {s.shape} do not fit n={n}")

    @property
    def m(self) -> int:
        return np.atleast_2d(self.h(0.0)).shape[0]


@dataclass(frozen=True, eq=False)
class ObserverModel:
    """Observer system and the augmented (plant, observer) system.

    ``observer`` omits the measured-signal input K H x(t); it has the
    observer's Jacobian df/dx - KH and diffusion K Sigma, which is all the
    certificate depends on.
    """
    spec: ObserverSpec
    observer: SdeSystem
    augmented: SdeSystem

    def initial_pair(self, x0, xhat0) -> Tuple[np.ndarray, np.ndarray]:
        """(noise-free start, noisy start) of the augmented system; the noise-free observer sits on the plant"""
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        xhat0 = np.atleast_1d(np.asarray(xhat0, dtype=float))
        return np.concatenate([x0, x0]), np.concatenate([x0, xhat0])

    def rate(self, dom: DomainBox, extra_points: Optional[Points] = None) -> float:
        """-max lambda_max(sym(df/dx - KH)) over the domain"""
        return estimate_rate(self.observer, make_identity_metric(self.observer.n), dom, extra_points).rate

    def noise_bound(self, dom: DomainBox, extra_points: Optional[Points] = None) -> float:
        """sup tr(Sigma^T K^T K Sigma) over the domain times"""
        return estimate_noise_bound(self.observer, make_identity_metric(self.observer.n), dom, extra_points).bound

    def certificate(self, dom: DomainBox, extra_points: Optional[Points] = None) -> Optional[ContractionCertificate]:
        return certify(self.observer, make_identity_metric(self.observer.n), dom, extra_points)


def build_observer(spec: ObserverSpec) -> ObserverModel:
    """dxhat = (f(xhat) + K H (x - xhat)) dt + K Sigma dW alongside the plant dx = f(x) dt"""
    plant = spec.plant
    n, m = plant.n, spec.m

    def injection(t):
        return np.atleast_2d(spec.k_gain(t)) @ np.atleast_2d(spec.h(t))

    def obs_drift(x, t):
        x = np.asarray(x, dtype=float)
        return np.asarray(plant.drift(x, t)) - x @ injection(t).T

    def obs_diffusion(x, t):
        ks = np.atleast_2d(spec.k_gain(t)) @ np.atleast_2d(spec.sigma_meas(t))
        return np.broadcast_to(ks, _lead(x) + (n, m)).copy()

    def obs_jacobian(x, t):
        return np.asarray(plant.drift_jacobian(x, t)) - injection(t)

    observer = SdeSystem(n=n, d=m, drift=obs_drift, diffusion=obs_diffusion, drift_jacobian=obs_jacobian,
                         name=f"observer({plant.name})")

    def aug_drift(z, t):
        z = np.asarray(z, dtype=float)
        x, xhat = z[..., :n], z[..., n:]
        est = np.asarray(plant.drift(xhat, t)) + (x - xhat) @ injection(t).T
        return np.concatenate([np.asarray(plant.drift(x, t)), est], axis=-1)

    def aug_diffusion(z, t):
        out = np.zeros(_lead(z) + (2 * n, m))
        out[..., n:, :] = obs_diffusion(np.asarray(z)[..., n:], t)
        return out

    def aug_jacobian(z, t):
        z = np.asarray(z, dtype=float)
        kh = injection(t)
        out = np.zeros(_lead(z) + (2 * n, 2 * n))
        out[..., :n, :n] = plant.drift_jacobian(z[..., :n], t)
        out[..., n:, :n] = kh
        out[..., n:, n:] = np.asarray(plant.drift_jacobian(z[..., n:], t)) - kh
        return out

    augmented = SdeSystem(n=2 * n, d=m, drift=aug_drift, diffusion=aug_diffusion,
                          drift_jacobian=aug_jacobian, name=f"plant+observer({plant.name})")
    logger.debug(f"Built observer for '{plant.name}' | n={n} | m={m}")
    return ObserverModel(spec=spec, observer=observer, augmented=augmented)


def build_linear_plant(a) -> SdeSystem:
    """Noise-free linear plant dx = A x dt"""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionMismatchError(f"plant matrix must be square, got {a.shape}")
    return SdeSystem(n=n, d=1,
                     drift=lambda x, t: np.asarray(x, dtype=float) @ a.T,
                     diffusion=lambda x, t: np.zeros(_lead(x) + (n, 1)),
                     drift_jacobian=lambda x, t: np.broadcast_to(a, _lead(x) + (n, n)).copy(),
                     name=f"linear-plant(n={n})")


def damped_oscillator_observer(kappa1: float = 2.0, kappa2: float = 0.0, noise: float = 1.0,
                               omega0: float = 1.0, damping: float = 0.5) -> ObserverSpec:
    """Position-measured damped oscillator, the CLI's ``observer`` template"""
    plant = build_linear_plant([[0.0, 1.0], [-omega0 ** 2, -damping]])
    h = np.array([[1.0, 0.0]])
    k = np.array([[kappa1], [kappa2]])
    s = np.array([[noise]])
    return ObserverSpec(plant=plant, h=lambda t: h, k_gain=lambda t: k, sigma_meas=lambda t: s)


def gain_sweep(make_spec: Callable[[Any], ObserverSpec], gains: Iterable[Any], dom: DomainBox) -> pd.DataFrame:
    """Rate and noise bound per gain, sorted by asymptotic bound C/(2 lambda).

    Rows that inject nothing or do not contract are kept and flagged, and
    sort after the usable rows.
    """
    rows: List[Dict[str, Any]] = []
    for gain in gains:
        spec = make_spec(gain)
        model = build_observer(spec)
        rate = model.rate(dom)
        c = model.noise_bound(dom)
        flag = ""
        if not np.any(np.atleast_2d(spec.k_gain(0.0))):
            flag = "no-injection"
        if rate <= 0:
            flag = "not-contracting"
        bound = c / (2.0 * rate) if rate > 0 else np.inf
        rows.append({"gain": gain, "lambda": rate, "C": c,
                     "c_over_lambda": c / rate if rate > 0 else np.inf,
                     "asymptotic_bound": bound, "flag": flag})
        if flag:
            logger.warning(f"Gain {gain!r} flagged: {flag}")

    table = pd.DataFrame(rows, columns=["gain", "lambda", "C", "c_over_lambda", "asymptotic_bound", "flag"])
    table["_flagged"] = table["flag"] != ""
    table = table.sort_values(["_flagged", "asymptotic_bound"], kind="mergesort").drop(columns="_flagged")
    return table.reset_index(drop=True)


def best_gain(table: pd.DataFrame) -> Any:
    """Gain of the first unflagged row of a gain_sweep table"""
    usable = table[table["flag"] == ""]
    if usable.empty:
        raise ValueError("no usable gain in the sweep")
    return usable.iloc[0]["gain"]


# --- composite-variable velocity estimator --------------------------------

def true_motion(u1: float, u2: float, omega: float, x0: float, v0: float, t):
    """Position, velocity and acceleration of xddot = -U1 w^2 sin(w t) + 2 U2"""
    t = np.asarray(t, dtype=float)
    x = x0 + v0 * t + u1 * np.sin(omega * t) - u1 * omega * t + u2 * t ** 2
    v = v0 + u1 * omega * (np.cos(omega * t) - 1.0) + 2.0 * u2 * t
    a = -u1 * omega ** 2 * np.sin(omega * t) + 2.0 * u2
    return x, v, a


def composite_beta(alpha: float) -> float:
    return (1.0 + alpha ** 2 - np.sqrt(alpha ** 4 - alpha ** 2 + 1.0)) / 4.0


def composite_metric(alpha: float) -> Metric:
    return make_constant_metric(0.5 * np.array([[alpha ** 2, -alpha / 2.0], [-alpha / 2.0, 1.0]]))


@dataclass(frozen=True, eq=False)
class CompositeObserver:
    """Observer state (vbar, abar); estimates are vhat = vbar + alpha x, ahat = abar + alpha^2 x"""
    system: SdeSystem
    metric: Metric
    beta_alpha: float
    bound: float
    rate: float
    noise_bound: float
    params: Dict[str, float] = field(default_factory=dict)

    def motion(self, t):
        p = self.params
        return true_motion(p["u1"], p["u2"], p["omega"], p["x0"], p["v0"], t)

    def readout(self, state, t) -> Tuple[np.ndarray, np.ndarray]:
        """(vhat, ahat) from observer states of shape (..., 2) at time(s) t"""
        state = np.asarray(state, dtype=float)
        x, _, _ = self.motion(t)
        alpha = self.params["alpha"]
        return state[..., 0] + alpha * x, state[..., 1] + alpha ** 2 * x

    def noise_free_state(self, t) -> np.ndarray:
        """(v - alpha x, a - alpha^2 x), the observer state whose estimates are exact"""
        x, v, a = self.motion(t)
        alpha = self.params["alpha"]
        return np.stack([v - alpha * x, a - alpha ** 2 * x], axis=-1)

    def certificate(self, dom: DomainBox) -> ContractionCertificate:
        return ContractionCertificate(rate_lambda=self.rate, bound_c=self.noise_bound, metric=self.metric,
                                      domain=dom, provenance=Provenance.DECLARED,
                                      notes=("rate alpha/2 and bound alpha^6 sigma^2 / 2 in metric M_alpha",))


def build_composite_observer(u1: float, u2: float, omega: float, alpha: float, sigma: float,
                             x0: float = 0.0, v0: float = 0.0) -> CompositeObserver:
    """Composite-variable estimator with alpha_v = alpha and alpha_a = alpha^2.

    U2 forces the plant only; the observer knows U1 and omega.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    alpha_v, alpha_a = alpha, alpha ** 2
    a_mat = np.array([[-alpha_v, 1.0], [-alpha_a, 0.0]])
    b_diag = np.array([alpha_a - alpha_v ** 2, -alpha_a * alpha_v])
    noise = np.diag(b_diag * sigma)

    def drift(y, t):
        y = np.asarray(y, dtype=float)
        x, _, _ = true_motion(u1, u2, omega, x0, v0, t)
        forcing = b_diag * x - np.array([0.0, u1 * omega ** 3 * np.cos(omega * t)])
        return y @ a_mat.T + forcing

    def diffusion(y, t):
        return np.broadcast_to(noise, _lead(y) + (2, 2)).copy()

    def jacobian(y, t):
        return np.broadcast_to(a_mat, _lead(y) + (2, 2)).copy()

    system = SdeSystem(n=2, d=2, drift=drift, diffusion=diffusion, drift_jacobian=jacobian,
                       name=f"composite(alpha={alpha:g}, sigma={sigma:g})")
    beta = composite_beta(alpha)
    return CompositeObserver(
        system=system, metric=composite_metric(alpha), beta_alpha=float(beta),
        bound=float(alpha ** 5 * sigma ** 2 / (2.0 * beta)), rate=alpha / 2.0,
        noise_bound=float(alpha ** 6 * sigma ** 2 / 2.0),
        params={"u1": u1, "u2": u2, "omega": omega, "alpha": alpha, "sigma": sigma, "x0": x0, "v0": v0})


# --- diffusively coupled networks -----------------------------------------

@dataclass(frozen=True, eq=False)
class ProjectionV:
    """Orthonormal rows spanning the complement of the synchronization subspace"""
    v: np.ndarray
    n_nodes: int
    node_dim: int

    def __post_init__(self):
        v = self.v
        if not np.allclose(v @ v.T, np.eye(v.shape[0]), rtol=0.0, atol=PROJECTION_TOL):
            raise ValueError("projection rows are not orthonormal")
        sync = np.kron(np.ones((self.n_nodes, 1)), np.eye(self.node_dim))
        if np.max(np.abs(v @ sync)) > PROJECTION_TOL:
            raise ValueError("projection does not annihilate the synchronization subspace")

    def project(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.v.T

    def lift(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float) @ self.v


def helmert_projection(n_nodes: int, node_dim: int) -> ProjectionV:
    """V = H kron I, H the Helmert contrast matrix"""
    if n_nodes < 2 or node_dim < 1:
        raise ValueError(f"need at least 2 nodes of positive dimension, got {n_nodes} x {node_dim}")
    v = np.kron(linalg.helmert(n_nodes), np.eye(node_dim))
    return ProjectionV(v=v, n_nodes=n_nodes, node_dim=node_dim)


def sync_error(x, n_nodes: int, node_dim: int) -> np.ndarray:
    """(1/n) sum over unordered pairs i<j of ||x_i - x_j||^2; equals ||V x||^2"""
    nodes = np.asarray(x, dtype=float).reshape(_lead(x) + (n_nodes, node_dim))
    gaps = nodes[..., :, None, :] - nodes[..., None, :, :]
    return 0.5 * np.sum(gaps ** 2, axis=(-3, -2, -1)) / n_nodes


def laplacian_from_gains(gains: np.ndarray) -> np.ndarray:
    """L with L_ii = sum_{j != i} K_ij and L_ij = -K_ij; gains has shape (n, n, d, d)"""
    gains = np.asarray(gains, dtype=float)
    n, _, d, _ = gains.shape
    off = gains.copy()
    off[np.arange(n), np.arange(n)] = 0.0
    lap = -off
    lap[np.arange(n), np.arange(n)] = off.sum(axis=1)
    return lap.transpose(0, 2, 1, 3).reshape(n * d, n * d)


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """n identical nodes with per-node drift/diffusion and diffusive coupling"""
    n_nodes: int
    node_dim: int
    noise_dim: int
    node_drift: Callable[[np.ndarray, float], np.ndarray]
    node_diffusion: Callable[[np.ndarray, float], np.ndarray]
    node_jacobian: Callable[[np.ndarray, float], np.ndarray]
    coupling_gains: np.ndarray
    laplacian: Optional[np.ndarray] = None

    def __post_init__(self):
        n, d = self.n_nodes, self.node_dim
        gains = np.asarray(self.coupling_gains, dtype=float)
        if gains.shape != (n, n, d, d):
            raise DimensionMismatchError(f"coupling gains have shape {gains.shape}, expected {(n, n, d, d)}")
        lap = laplacian_from_gains(gains) if self.laplacian is None else np.asarray(self.laplacian, dtype=float)
        if lap.shape != (n * d, n * d):
            raise DimensionMismatchError(f"Laplacian has shape {lap.shape}, expected {(n * d, n * d)}")
        sync = np.kron(np.ones((n, 1)), np.eye(d))
        residual = float(np.max(np.abs(lap @ sync)))
        if residual > LAPLACIAN_TOL * max(1.0, float(np.max(np.abs(lap)))):
            raise LaplacianNotDiffusiveError(f"coupling does not vanish on synchronized states (residual {residual:.3e})")
        object.__setattr__(self, "coupling_gains", gains)
        object.__setattr__(self, "laplacian", lap)


@dataclass(frozen=True, eq=False)
class NetworkModel:
    spec: NetworkSpec
    global_system: SdeSystem
    projection: ProjectionV
    projected: SdeSystem

    def global_jacobian(self, x, t) -> np.ndarray:
        return self.global_system.drift_jacobian(x, t)

    def projected_jacobian_at(self, x, t) -> np.ndarray:
        """V J(x) V^T at a global state x"""
        v = self.projection.v
        return v @ np.asarray(self.global_system.drift_jacobian(x, t)) @ v.T

    def sync_error(self, x) -> np.ndarray:
        return np.sum(self.projection.project(x) ** 2, axis=-1)


def build_diffusive_network(spec: NetworkSpec) -> NetworkModel:
    """Global system dx = (f(x) - L x) dt + sigma(x) dW and its projection y = V x"""
    n, d, q = spec.n_nodes, spec.node_dim, spec.noise_dim
    lap = spec.laplacian
    proj = helmert_projection(n, d)
    v = proj.v

    def nodes(x):
        x = np.asarray(x, dtype=float)
        return x.reshape(_lead(x) + (n, d))

    def drift(x, t):
        x = np.asarray(x, dtype=float)
        return np.asarray(spec.node_drift(nodes(x), t)).reshape(x.shape) - x @ lap.T

    def diffusion(x, t):
        per_node = np.asarray(spec.node_diffusion(nodes(x), t))
        out = np.zeros(_lead(x) + (n * d, n * q))
        for i in range(n):
            out[..., i * d:(i + 1) * d, i * q:(i + 1) * q] = per_node[..., i, :, :]
        return out

    def jacobian(x, t):
        per_node = np.asarray(spec.node_jacobian(nodes(x), t))
        out = np.zeros(_lead(x) + (n * d, n * d))
        for i in range(n):
            out[..., i * d:(i + 1) * d, i * d:(i + 1) * d] = per_node[..., i, :, :]
        return out - lap

    global_system = SdeSystem(n=n * d, d=n * q, drift=drift, diffusion=diffusion, drift_jacobian=jacobian,
                              name=f"network(n={n}, d={d})")

    vlv = v @ lap @ v.T

    def p_drift(y, t):
        y = np.asarray(y, dtype=float)
        x = proj.lift(y)
        return np.asarray(spec.node_drift(nodes(x), t)).reshape(x.shape) @ v.T - y @ vlv.T

    def p_diffusion(y, t):
        return v @ diffusion(proj.lift(y), t)

    def p_jacobian(y, t):
        return v @ (jacobian(proj.lift(y), t) + lap) @ v.T - vlv

    projected = SdeSystem(n=(n - 1) * d, d=n * q, drift=p_drift, diffusion=p_diffusion,
                          drift_jacobian=p_jacobian, name=f"network-projected(n={n}, d={d})")
    return NetworkModel(spec=spec, global_system=global_system, projection=proj, projected=projected)


def sync_error_bound(n_nodes: int, c: float, lam: float, beta: float = 1.0) -> float:
    """Steady-state bound n C / (2 lambda beta) on the pair-summed sync error"""
    if not lam > 0:
        raise ValueError(f"rate must be positive, got {lam}")
    return n_nodes * c / (2.0 * lam * beta)


# --- FitzHugh-Nagumo ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FitzHughNagumoNetwork:
    """FN network with mean-field coupling k (v_mean - v_i) on the voltage"""
    network: NetworkModel
    metric: Metric
    params: Dict[str, float]

    @property
    def formula_rate(self) -> float:
        p = self.params
        return min(p["k"] - p["c"], p["b"] / p["c"])

    @property
    def contracting(self) -> bool:
        return self.params["k"] > self.params["c"]

    @property
    def noise_bound(self) -> float:
        """tr(sigma^T V^T M V sigma) = (n - 1) sigma^2; sigma^2 for a pair"""
        return (self.params["n_nodes"] - 1) * self.params["sigma"] ** 2

    @property
    def sync_bound(self) -> float:
        """Bound sigma / sqrt(min(1, c) min(k - c, b / c)) on E|v1 - v2|"""
        if not self.contracting:
            return np.inf
        p = self.params
        return float(p["sigma"] / np.sqrt(min(1.0, p["c"]) * self.formula_rate))

    def certificate(self, dom: DomainBox) -> Optional[ContractionCertificate]:
        """Projected-system certificate at the formula rate, or None when k <= c"""
        if not self.contracting:
            logger.warning(f"FN network is not contracting: k={self.params['k']} <= c={self.params['c']}")
            return None
        return ContractionCertificate(rate_lambda=self.formula_rate, bound_c=self.noise_bound, metric=self.metric,
                                      domain=dom, provenance=Provenance.DECLARED,
                                      notes=("rate min(k - c, b / c) and bound (n - 1) sigma^2 in metric Theta = I kron diag(1, c)",))

    def sampled_rate(self, dom: DomainBox, extra_points: Optional[Points] = None) -> float:
        return estimate_rate(self.network.projected, self.metric, dom, extra_points).rate

    def voltage_gap(self, states) -> np.ndarray:
        """|v_1 - v_2| from global states (..., 2 n)"""
        states = np.asarray(states, dtype=float)
        return np.abs(states[..., 0] - states[..., 2])


def _fn_node(a: float, b: float, c: float, sigma: float, current: float):
    def drift(x, t):
        v, w = x[..., 0], x[..., 1]
        return np.stack([c * (v + w - v ** 3 / 3.0 + current), -(v - a + b * w) / c], axis=-1)

    def diffusion(x, t):
        out = np.zeros(_lead(x) + (2, 1))
        out[..., 0, 0] = sigma
        return out

    def jacobian(x, t):
        v = x[..., 0]
        out = np.empty(_lead(x) + (2, 2))
        out[..., 0, 0] = c * (1.0 - v ** 2)
        out[..., 0, 1] = c
        out[..., 1, 0] = -1.0 / c
        out[..., 1, 1] = -b / c
        return out

    return drift, diffusion, jacobian


def build_fn_network(n_nodes: int, a: float, b: float, c: float, k: float, sigma: float,
                     current: float = 0.0) -> FitzHughNagumoNetwork:
    """All-to-all FN network, K_ij = diag(k / n, 0)"""
    if c <= 0:
        raise ValueError(f"FN time-scale c must be positive, got {c}")
    drift, diffusion, jacobian = _fn_node(a, b, c, sigma, current)
    gains = np.zeros((n_nodes, n_nodes, 2, 2))
    gains[..., 0, 0] = k / n_nodes
    gains[np.arange(n_nodes), np.arange(n_nodes)] = 0.0
    spec = NetworkSpec(n_nodes=n_nodes, node_dim=2, noise_dim=1, node_drift=drift, node_diffusion=diffusion,
                       node_jacobian=jacobian, coupling_gains=gains)
    network = build_diffusive_network(spec)
    theta = np.kron(np.eye(n_nodes - 1), np.diag([1.0, c]))
    return FitzHughNagumoNetwork(network=network, metric=make_constant_metric(theta.T @ theta),
                                 params={"a": a, "b": b, "c": c, "k": k, "sigma": sigma, "current": current,
                                         "n_nodes": n_nodes})


def build_fn_pair(a: float = 0.3, b: float = 0.2, c: float = 30.0, k: float = 40.0, sigma: float = 1.0,
                  current: float = 0.0) -> FitzHughNagumoNetwork:
    """Two diffusively coupled noisy FN oscillators"""
    model = build_fn_network(2, a, b, c, k, sigma, current)
    if not model.contracting:
        logger.warning(f"FN pair with k={k} <= c={c} has no certificate")
    return model
