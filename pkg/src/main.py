"""
Stochastic contraction toolkit - batch experiment runner
Author: Jay Guwalani
Email: jguwalan@umd.edu

Usage:
    stocon run --model ou --lambda 1 --sigma 1 --a0 2 --b0 0
    stocon run --preset paper-fig1 --out results/fig1
    stocon combine --rule feedback --k 4 c1.json c2.json --out combined.json

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or
precondition error, 3 a simulated path blew up.
"""

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

# Add src to path for imports
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config.config import Config
from config.experiment import ExperimentConfig, default_experiment, load_experiment
from config.logging_config import PerformanceLogger, setup_logger
from stocon.analysis import (BoundEnvelope, certify, ms_bound, ou_exact_msd, verify_against_oracle,
                             verify_envelope, verify_generator_inequality, verify_observable)
from stocon.combine import (CouplingSpec, SuperpositionWeights, combine_feedback, combine_hierarchical,
                            combine_parallel, combine_small_gain)
from stocon.core import ContractionCertificate, DomainBox, Metric, Provenance, SdeSystem, make_identity_metric
from stocon.errors import ConfigError, NonFiniteError, StoconError
from stocon.models import (FitzHughNagumoNetwork, build_composite_observer, build_fn_network, build_fn_pair,
                           build_observer, build_ou, damped_oscillator_observer, sync_error_bound)
from stocon.sim import (EnsemblePairStats, ObservableStats, PairMode, SimConfig, ensemble_observable_stats,
                        ensemble_pair_stats, fixed_pair, fixed_state, simulate_pair)
from utils.export import write_frame, write_json
from utils.sampling import Points, harvest_points

logger = logging.getLogger("main")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NON_FINITE = 3

# pilot pair used to harvest certification points
PILOT_MAX_STEPS = 20_000
PILOT_MAX_RECORDS = 1000


@dataclass
class ExperimentResult:
    """Everything an experiment writes out"""
    name: str
    template: str
    certificate: Optional[ContractionCertificate]
    stats: Optional[EnsemblePairStats] = None
    envelope: Optional[BoundEnvelope] = None
    checks: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    observables: Dict[str, ObservableStats] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.get("pass", False) for c in self.checks.values())


class ExperimentRunner:
    """Runs one experiment config: build model, certify, simulate, verify"""

    def __init__(self, config: ExperimentConfig, runtime: Optional[Config] = None):
        self.config = config
        self.runtime = runtime or Config()
        self.perf = PerformanceLogger()
        self.recipes: Dict[str, Callable[[], ExperimentResult]] = {
            "ou": self._run_ou,
            "observer": self._run_observer,
            "composite": self._run_composite,
            "fn-pair": self._run_fn_pair,
            "diffusive-net": self._run_diffusive_net,
        }
        logger.info(f"ExperimentRunner initialized | experiment={config.name} | model={config.model.template}")

    # --- helpers ----------------------------------------------------------

    @property
    def params(self) -> Dict[str, float]:
        return self.config.model.params

    def _param(self, name: str, default: float) -> float:
        return float(self.params.get(name, default))

    def _initial(self, name: str, default: Sequence[float]) -> np.ndarray:
        value = getattr(self.config.initial, name)
        return np.asarray(default if value is None else value, dtype=float)

    def _sim_config(self) -> SimConfig:
        sim = self.config.sim
        return SimConfig(dt=sim.dt, t_max=sim.t_max, n_paths=sim.n_paths, master_seed=sim.seed,
                         record_stride=sim.record_stride, batch_size=self.runtime.batch_size,
                         noise_chunk=self.runtime.noise_chunk, threads=self.runtime.threads)

    def _domain(self, n: int, default_half_width: float) -> DomainBox:
        dom = self.config.domain
        if dom.lower is not None:
            if len(dom.lower) != n:
                raise ConfigError(f"domain bounds have dimension {len(dom.lower)}, model needs {n}")
            return DomainBox(lower=dom.lower, upper=dom.upper, t_max=self.config.sim.t_max,
                             sample_count=dom.samples)
        half_width = dom.half_width or default_half_width
        return DomainBox.cube(n, half_width, t_max=self.config.sim.t_max, sample_count=dom.samples)

    def _timed(self, operation: str, fn: Callable[[], Any], **fields) -> Any:
        start = time.time()
        out = fn()
        self.perf.log_timing(operation, time.time() - start, **fields)
        return out

    def _certify(self, metric: Metric, dom: DomainBox,
                 estimate: Callable[[], Optional[ContractionCertificate]]) -> Optional[ContractionCertificate]:
        """Declared certificate from the experiment document, else ``estimate()``"""
        declared = self.config.certificate.declared
        if declared is None:
            return self._timed("certify", estimate)
        logger.info(f"Using declared certificate | lambda={declared.rate_lambda} | C={declared.bound_c}")
        return ContractionCertificate(rate_lambda=declared.rate_lambda, bound_c=declared.bound_c, metric=metric,
                                      domain=dom, provenance=Provenance.DECLARED,
                                      notes=("declared in the experiment document",))

    def _pilot_points(self, system: SdeSystem, a0: np.ndarray, b0: np.ndarray, dom: DomainBox,
                      project: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> Optional[Points]:
        """States of one short pilot pair, mapped onto the certified system's state and kept inside ``dom``"""
        if not self.config.certificate.harvests:
            return None
        sim = self.config.sim
        n_steps = min(int(round(sim.t_max / sim.dt)), PILOT_MAX_STEPS)
        cfg = SimConfig(dt=sim.dt, t_max=n_steps * sim.dt, n_paths=1, master_seed=sim.seed,
                        record_stride=max(1, n_steps // PILOT_MAX_RECORDS), noise_chunk=self.runtime.noise_chunk)
        pair = self._timed("pilot", lambda: simulate_pair(system, a0, b0, cfg), steps=n_steps)
        states = np.stack([pair.a, pair.b])
        points = harvest_points(states if project is None else project(states), pair.times, dom=dom)
        logger.debug(f"Harvested {len(points[1])} pilot points for '{self.config.name}'")
        return points

    def _envelope_check(self, stats: EnsemblePairStats, env: BoundEnvelope) -> Dict[str, Any]:
        check = self.config.check
        return verify_envelope(stats, env, k_sigma=check.k_sigma, t_min=check.t_min).to_dict()

    def _generator_check(self, system: SdeSystem, cert: ContractionCertificate) -> Optional[Dict[str, Any]]:
        n_samples = self.config.check.generator_samples
        if n_samples == 0:
            return None
        result = self._timed("generator_check", lambda: verify_generator_inequality(
            system, cert, n_samples=n_samples, seed=self.config.sim.seed))
        return {"pass": result.passed, "n_samples": result.n_samples, "violations": result.violations,
                "worst_slack": result.worst_slack}

    def _not_contracting(self, reason: str) -> ExperimentResult:
        logger.warning(f"No certificate for '{self.config.name}': {reason}")
        return ExperimentResult(name=self.config.name, template=self.config.model.template, certificate=None,
                                checks={"certificate": {"pass": False, "reason": reason}})

    def _finish(self, result: ExperimentResult, generator: Optional[Dict[str, Any]]) -> ExperimentResult:
        if generator is not None:
            result.checks["generator"] = generator
        if result.certificate is not None:
            self.perf.log_metric("lambda", result.certificate.rate_lambda, experiment=result.name)
            self.perf.log_metric("C", result.certificate.bound_c, experiment=result.name)
        return result

    # --- recipes ----------------------------------------------------------

    def _run_ou(self) -> ExperimentResult:
        lam, sigma = self._param("lambda", 1.0), self._param("sigma", 1.0)
        a0, b0 = self._initial("a0", [2.0]), self._initial("b0", [0.0])
        system = build_ou(lam, sigma)
        metric, dom = make_identity_metric(1), self._domain(1, 5.0)
        cert = self._certify(metric, dom, lambda: certify(
            system, metric, dom, self._pilot_points(system, a0, b0, dom), seed=self.config.sim.seed))
        if cert is None:
            return self._not_contracting("OU drift is not contracting")

        cfg = self._sim_config()
        stats = self._timed("ensemble", lambda: ensemble_pair_stats(system, fixed_pair(a0, b0), cfg),
                            paths=cfg.n_paths)
        env = ms_bound(cert, float(np.sum((a0 - b0) ** 2)), PairMode.PAIR_NOISY,
                       sharp=self.config.certificate.sharp)
        checks = {"envelope": self._envelope_check(stats, env)}
        if self.config.check.oracle:
            oracle = ou_exact_msd(float(a0[0]), float(b0[0]), lam, sigma, stats.times)
            checks["oracle"] = verify_against_oracle(stats, oracle, k_sigma=self.config.check.k_sigma).to_dict()
        result = ExperimentResult(name=self.config.name, template="ou", certificate=cert, stats=stats,
                                  envelope=env, checks=checks,
                                  summary={"terminal_msd": float(stats.mean_sq_dist[-1]),
                                           "stationary_msd": sigma ** 2 / lam})
        return self._finish(result, self._generator_check(system, cert))

    def _run_observer(self) -> ExperimentResult:
        spec = damped_oscillator_observer(kappa1=self._param("kappa1", 2.0), kappa2=self._param("kappa2", 0.0),
                                          noise=self._param("noise", 1.0), omega0=self._param("omega0", 1.0),
                                          damping=self._param("damping", 0.5))
        model = build_observer(spec)
        n = spec.plant.n
        x0, xhat0 = self._initial("a0", [1.0, 0.0]), self._initial("b0", [0.0, 0.0])
        a0, b0 = model.initial_pair(x0, xhat0)
        dom = self._domain(n, 5.0)
        # augmented state is (plant, observer); the observer half is certified
        cert = self._certify(make_identity_metric(n), dom, lambda: model.certificate(
            dom, self._pilot_points(model.augmented, a0, b0, dom, project=lambda z: z[..., n:])))
        if cert is None:
            return self._not_contracting("observer error dynamics are not contracting")

        cfg = self._sim_config()
        stats = self._timed("ensemble", lambda: ensemble_pair_stats(
            model.augmented, fixed_pair(a0, b0), cfg, mode=PairMode.NOISE_FREE_VS_NOISY), paths=cfg.n_paths)
        env = ms_bound(cert, float(np.sum((xhat0 - x0) ** 2)), PairMode.NOISE_FREE_VS_NOISY,
                       sharp=self.config.certificate.sharp)
        result = ExperimentResult(name=self.config.name, template="observer", certificate=cert, stats=stats,
                                  envelope=env, checks={"envelope": self._envelope_check(stats, env)},
                                  summary={"asymptotic_bound": env.asymptote})
        return self._finish(result, self._generator_check(model.observer, cert))

    def _run_composite(self) -> ExperimentResult:
        co = build_composite_observer(u1=self._param("u1", 10.0), u2=self._param("u2", 2.0),
                                      omega=self._param("omega", 3.0), alpha=self._param("alpha", 1.0),
                                      sigma=self._param("sigma", 10.0), x0=self._param("x0", 0.0),
                                      v0=self._param("v0", 0.0))
        dom = self._domain(2, 50.0)
        cert = self._certify(co.metric, dom, lambda: co.certificate(dom))
        a0 = co.noise_free_state(0.0)
        b0 = self._initial("b0", [0.0, 0.0])
        gap = a0 - b0
        cfg = self._sim_config()
        stats = self._timed("ensemble", lambda: ensemble_pair_stats(
            co.system, fixed_pair(a0, b0), cfg, mode=PairMode.NOISE_FREE_VS_NOISY), paths=cfg.n_paths)
        env = ms_bound(cert, float(gap @ co.metric.matrix_at(0.0) @ gap), PairMode.NOISE_FREE_VS_NOISY,
                       sharp=self.config.certificate.sharp)
        tail = stats.mean_sq_dist[stats.times >= self.config.check.t_min]
        result = ExperimentResult(name=self.config.name, template="composite", certificate=cert, stats=stats,
                                  envelope=env, checks={"envelope": self._envelope_check(stats, env)},
                                  summary={"asymptotic_bound": co.bound, "beta_alpha": co.beta_alpha,
                                           "post_transient_mean_msd": float(np.mean(tail)) if tail.size else None})
        return self._finish(result, self._generator_check(co.system, cert))

    def _fn_params(self) -> Dict[str, float]:
        return {"a": self._param("a", 0.3), "b": self._param("b", 0.2), "c": self._param("c", 30.0),
                "k": self._param("k", 40.0), "sigma": self._param("sigma", 1.0),
                "current": self._param("current", 0.0)}

    def _run_network(self, fn: FitzHughNagumoNetwork, x0: np.ndarray, observable_name: str,
                     observable: Callable[[np.ndarray, np.ndarray], np.ndarray],
                     observable_bound: Callable[[BoundEnvelope, np.ndarray], np.ndarray],
                     steady_bound: float) -> ExperimentResult:
        n_nodes = int(fn.params["n_nodes"])
        dom = self._domain((n_nodes - 1) * 2, 3.0)
        cert = self._certify(fn.metric, dom, lambda: fn.certificate(dom))
        if cert is None:
            return self._not_contracting(f"coupling k={fn.params['k']} does not exceed c={fn.params['c']}")

        network = fn.network
        pilot = self._pilot_points(network.global_system, x0, x0, dom, project=network.projection.project)
        sampled_rate = fn.sampled_rate(dom, pilot)
        cfg = self._sim_config()
        observables = self._timed("ensemble", lambda: ensemble_observable_stats(
            network.global_system, fixed_state(x0), cfg,
            {"sync_error": lambda rec, t: network.sync_error(rec), observable_name: observable}),
            paths=cfg.n_paths)
        sync = observables["sync_error"]
        stats = EnsemblePairStats(times=sync.times, mean_sq_dist=sync.mean, std_err=sync.std_err,
                                  n_paths=sync.n_paths)
        y0 = network.projection.project(x0)
        env = ms_bound(cert, float(y0 @ fn.metric.matrix_at(0.0) @ y0), PairMode.NOISE_FREE_VS_NOISY)

        check = self.config.check
        watched = observables[observable_name]
        observable_check = verify_observable(watched, observable_bound(env, watched.times),
                                             k_sigma=check.k_sigma, t_min=check.t_min).to_dict()
        observable_check["steady_bound"] = steady_bound
        checks = {"envelope": self._envelope_check(stats, env), observable_name: observable_check}
        result = ExperimentResult(name=self.config.name, template=self.config.model.template, certificate=cert,
                                  stats=stats, envelope=env, checks=checks,
                                  observables={observable_name: watched},
                                  summary={"formula_rate": fn.formula_rate, "sampled_rate": sampled_rate})
        return self._finish(result, self._generator_check(network.projected, cert))

    def _run_fn_pair(self) -> ExperimentResult:
        fn = build_fn_pair(**self._fn_params())
        x0 = self._initial("a0", [1.0, 0.0, -1.0, 0.0])
        return self._run_network(fn, x0, "v_gap", lambda rec, t: fn.voltage_gap(rec),
                                 lambda env, t: np.full(len(t), fn.sync_bound), fn.sync_bound)

    def _run_diffusive_net(self) -> ExperimentResult:
        n_nodes = int(self._param("n_nodes", 3))
        fn = build_fn_network(n_nodes, **self._fn_params())
        default_x0 = np.stack([np.linspace(1.0, -1.0, n_nodes), np.zeros(n_nodes)], axis=1).ravel()
        x0 = self._initial("a0", default_x0)
        network = fn.network
        steady = (sync_error_bound(n_nodes, fn.noise_bound, fn.formula_rate, fn.metric.beta)
                  if fn.contracting else np.inf)
        # pair-summed error is n ||V x||^2
        return self._run_network(fn, x0, "pair_sync", lambda rec, t: n_nodes * network.sync_error(rec),
                                 lambda env, t: n_nodes * env(t), steady)

    # --- entry points -----------------------------------------------------

    def run(self) -> ExperimentResult:
        template = self.config.model.template
        logger.info(f"Running experiment '{self.config.name}' | model={template} "
                    f"| paths={self.config.sim.n_paths} | seed={self.config.sim.seed}")
        result = self.recipes[template]()
        verdict = "PASS" if result.passed else "FAIL"
        logger.info(f"Experiment '{self.config.name}' finished: {verdict}")
        return result

    def write(self, result: ExperimentResult, out_dir: Path) -> List[Path]:
        """Write stats.csv, envelope.csv, certificate.json, observable.csv and report.json"""
        out_dir = Path(out_dir)
        written: List[Path] = []
        if result.stats is not None:
            written.append(write_frame(out_dir / "stats.csv", result.stats.to_frame()))
        if result.envelope is not None and result.stats is not None:
            frame = result.stats.to_frame()[["t"]].copy()
            frame["bound"] = result.envelope(result.stats.times)
            written.append(write_frame(out_dir / "envelope.csv", frame))
        if result.certificate is not None:
            written.append(write_json(out_dir / "certificate.json", result.certificate.to_dict()))
        for obs in result.observables.values():
            written.append(write_frame(out_dir / "observable.csv", obs.to_frame()))
        written.append(write_json(out_dir / "report.json", self.report(result)))
        logger.info(f"Wrote {len(written)} artifacts to {out_dir}")
        return written

    def report(self, result: ExperimentResult) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "experiment": result.name,
            "model": result.template,
            "params": dict(self.params),
            "seed": self.config.sim.seed,
            "n_paths": self.config.sim.n_paths,
            "dt": self.config.sim.dt,
            "t_max": self.config.sim.t_max,
            "checks": result.checks,
            "summary": result.summary,
            "pass": result.passed,
        }
        if result.certificate is not None:
            cert = result.certificate
            doc["certificate"] = {"lambda": cert.rate_lambda, "C": cert.bound_c, "beta": cert.metric.beta,
                                  "c_over_lambda": cert.c_over_lambda, "provenance": cert.provenance.value}
        if result.envelope is not None:
            env = result.envelope
            doc["envelope"] = {"c_over_lambda": env.c_over_lambda, "decay_rate": env.decay_rate,
                               "initial_excess": env.initial_excess, "beta_divisor": env.beta_divisor,
                               "asymptote": env.asymptote}
        return doc


def parse_assignments(items: Optional[Sequence[str]]) -> Dict[str, float]:
    """Parse ``key=value`` model parameter overrides"""
    params: Dict[str, float] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"expected key=value, got '{item}'")
        try:
            params[key.strip()] = float(value)
        except ValueError as e:
            raise ConfigError(f"parameter '{key}' needs a numeric value, got '{value}'") from e
    return params


def resolve_experiment(args: argparse.Namespace, runtime: Config) -> ExperimentConfig:
    """Preset or config file, then CLI overrides"""
    if args.preset and args.config:
        raise ConfigError("use either --preset or --config, not both")
    if args.preset:
        config = load_experiment(runtime.preset_path(args.preset))
    elif args.config:
        config = load_experiment(args.config)
    elif args.model:
        config = default_experiment(args.model)
    else:
        raise ConfigError("one of --model, --preset or --config is required")
    if args.model and args.model != config.model.template:
        raise ConfigError(f"--model {args.model} does not match the config's model '{config.model.template}'")

    params = parse_assignments(args.set)
    if args.lam is not None:
        params["lambda"] = args.lam
    if args.sigma is not None:
        params["sigma"] = args.sigma
    return config.with_overrides(
        sim={"seed": args.seed, "n_paths": args.paths, "dt": args.dt, "t_max": args.tmax},
        params=params,
        check={"k_sigma": args.k_sigma},
        initial={"a0": args.a0, "b0": args.b0})


def run_command(args: argparse.Namespace) -> int:
    runtime = args.runtime
    config = resolve_experiment(args, runtime)
    runner = ExperimentRunner(config, runtime)
    result = runner.run()
    runner.write(result, Path(args.out or Path("results") / config.name))
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def combine_command(args: argparse.Namespace) -> int:
    certs = [ContractionCertificate.from_json(Path(path).read_text(encoding="utf-8")) for path in args.certs]
    if len(certs) != 2:
        raise ConfigError(f"combine needs exactly two certificates, got {len(certs)}")
    c1, c2 = certs

    if args.rule == "parallel":
        combined = combine_parallel(c1, c2, SuperpositionWeights(args.l1, args.m1, args.l2, args.m2))
    elif args.rule == "feedback":
        combined = combine_feedback(c1, c2, args.k)
    elif args.rule == "hierarchical":
        if args.bound_k is None:
            raise ConfigError("hierarchical combination needs --bound-k")
        combined = combine_hierarchical(c1, c2, args.bound_k)
    else:
        coupling = CouplingSpec(j12_sup_sing=args.s12, j21_sup_sing=args.s21)
        result = combine_small_gain(c1, c2, coupling, k_search=(args.k_min, args.k_max))
        if not result.applicable:
            raise ConfigError(f"small-gain condition fails: inf sing^2(B_k)={result.min_sing_sq:.6g} "
                              f">= lambda1*lambda2={c1.rate_lambda * c2.rate_lambda:.6g}")
        combined = result.certificate

    if args.out:
        write_json(args.out, combined.to_dict())
        logger.info(f"Combined certificate written to {args.out}")
    else:
        print(combined.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stocon", description="Stochastic contraction experiments")
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run an experiment and write CSV/JSON artifacts")
    run.add_argument("--model", choices=["ou", "observer", "composite", "fn-pair", "diffusive-net"])
    run.add_argument("--preset", help="Shipped preset name, e.g. paper-fig1")
    run.add_argument("--config", help="Experiment YAML file")
    run.add_argument("--seed", type=int)
    run.add_argument("--paths", type=int)
    run.add_argument("--dt", type=float)
    run.add_argument("--tmax", type=float)
    run.add_argument("--out", help="Output directory (default results/<experiment name>)")
    run.add_argument("--k-sigma", dest="k_sigma", type=float)
    run.add_argument("--lambda", dest="lam", type=float, help="OU rate")
    run.add_argument("--sigma", type=float, help="Noise intensity")
    run.add_argument("--a0", type=float, nargs="+", help="First initial state")
    run.add_argument("--b0", type=float, nargs="+", help="Second initial state")
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="Model parameter override")
    run.set_defaults(handler=run_command)

    comb = sub.add_parser("combine", help="Combine two certificate files")
    comb.add_argument("certs", nargs="+", help="Certificate JSON files")
    comb.add_argument("--rule", required=True, choices=["parallel", "feedback", "hierarchical", "small-gain"])
    comb.add_argument("--k", type=float, default=1.0, help="Feedback gain")
    comb.add_argument("--l1", type=float, default=1.0)
    comb.add_argument("--m1", type=float, default=1.0)
    comb.add_argument("--l2", type=float, default=1.0)
    comb.add_argument("--m2", type=float, default=1.0)
    comb.add_argument("--bound-k", dest="bound_k", type=float, help="Hierarchy bound K")
    comb.add_argument("--s12", type=float, help="sup sing(Theta1 J12 Theta2^-1)")
    comb.add_argument("--s21", type=float, help="sup sing(Theta2 J21 Theta1^-1)")
    comb.add_argument("--k-min", dest="k_min", type=float, default=1e-8)
    comb.add_argument("--k-max", dest="k_max", type=float, default=1e8)
    comb.add_argument("--out", help="Output JSON file (default stdout)")
    comb.set_defaults(handler=combine_command)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point"""
    args = build_parser().parse_args(argv)
    try:
        args.runtime = Config()
        app = args.runtime.app_config
        setup_logger("main", level=args.log_level or app["log_level"], log_dir=app["log_dir"],
                     log_to_file=app["log_to_file"])
        return args.handler(args)
    except NonFiniteError as e:
        logger.error(f"Simulation blew up: {e} (path {e.path_index}, step {e.step})")
        return EXIT_NON_FINITE
    except (StoconError, ValueError, OSError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    except KeyboardInterrupt:
        logger.info("Application interrupted by user")
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
