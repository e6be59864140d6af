"""
Experiment configuration documents (YAML) validated with pydantic
Author: Jay Guwalani
"""

import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from stocon.errors import ConfigError

logger = logging.getLogger(__name__)

ModelTemplate = Literal["ou", "observer", "composite", "fn-pair", "diffusive-net"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelConfig(_Strict):
    template: ModelTemplate
    params: Dict[str, float] = Field(default_factory=dict)


class SimSettings(_Strict):
    dt: float = Field(1e-3, gt=0)
    t_max: float = Field(5.0, gt=0)
    n_paths: int = Field(1000, ge=2)
    seed: int = 0
    record_stride: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _dt_within_horizon(self):
        if self.dt > self.t_max:
            raise ValueError(f"dt={self.dt} exceeds t_max={self.t_max}")
        return self


class DomainConfig(_Strict):
    """Box for certificate suprema; either a half width or explicit bounds"""
    half_width: Optional[float] = Field(None, gt=0)
    lower: Optional[List[float]] = None
    upper: Optional[List[float]] = None
    samples: int = Field(512, ge=1)

    @model_validator(mode="after")
    def _bounds_complete(self):
        if (self.lower is None) != (self.upper is None):
            raise ValueError("domain lower and upper must be given together")
        return self


class CheckConfig(_Strict):
    k_sigma: float = Field(3.0, gt=0)
    t_min: float = Field(0.0, ge=0)
    oracle: bool = False
    generator_samples: int = Field(10_000, ge=0)


class DeclaredCertificate(_Strict):
    """User-supplied (lambda, C) in the model's own metric"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    rate_lambda: float = Field(alias="lambda", gt=0, allow_inf_nan=False)
    bound_c: float = Field(alias="C", ge=0, allow_inf_nan=False)


class CertificateRequest(_Strict):
    sharp: bool = False
    declared: Optional[DeclaredCertificate] = None
    # None: harvest pilot trajectory states whenever the certificate is estimated
    harvest: Optional[bool] = None

    @model_validator(mode="after")
    def _declared_skips_estimation(self):
        if self.declared is not None and self.harvest:
            raise ValueError("a declared certificate is not estimated, harvest does not apply")
        return self

    @property
    def harvests(self) -> bool:
        return self.declared is None and self.harvest is not False


class InitialConfig(_Strict):
    """Initial states; meaning depends on the template (pair starts, plant/observer, network state)"""
    a0: Optional[List[float]] = None
    b0: Optional[List[float]] = None


class ExperimentConfig(_Strict):
    name: str = "experiment"
    model: ModelConfig
    sim: SimSettings = Field(default_factory=SimSettings)
    domain: DomainConfig = Field(default_factory=DomainConfig)
    check: CheckConfig = Field(default_factory=CheckConfig)
    certificate: CertificateRequest = Field(default_factory=CertificateRequest)
    initial: InitialConfig = Field(default_factory=InitialConfig)

    def with_overrides(self, sim: Optional[Dict[str, Union[int, float]]] = None,
                       params: Optional[Dict[str, float]] = None,
                       check: Optional[Dict[str, float]] = None,
                       initial: Optional[Dict[str, List[float]]] = None) -> "ExperimentConfig":
        """Copy with CLI overrides applied and re-validated"""
        doc = self.model_dump()
        doc["sim"].update({k: v for k, v in (sim or {}).items() if v is not None})
        doc["model"]["params"].update(params or {})
        doc["check"].update({k: v for k, v in (check or {}).items() if v is not None})
        doc["initial"].update({k: v for k, v in (initial or {}).items() if v is not None})
        try:
            return ExperimentConfig.model_validate(doc)
        except ValidationError as e:
            raise ConfigError(str(e)) from e


def load_experiment(path: Union[str, Path]) -> ExperimentConfig:
    """Load and validate an experiment YAML document"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"experiment file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh) or {}
        config = ExperimentConfig.model_validate(doc)
    except (yaml.YAMLError, ValidationError) as e:
        raise ConfigError(f"invalid experiment file {path}: {e}") from e
    logger.debug(f"Loaded experiment '{config.name}' from {path}")
    return config


def default_experiment(template: str) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate({"name": template, "model": {"template": template}})
    except ValidationError as e:
        raise ConfigError(f"unknown model template '{template}'") from e
