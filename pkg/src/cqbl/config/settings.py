"""Settings model for cqbl configuration."""

from dataclasses import dataclass, field
from typing import Dict, Any


@dataclass
class OptimizerSettings:
    """Measured Rényi and variational-Q search settings."""
    restarts: int = 32
    refine_top: int = 4
    givens_tol: float = 1e-9
    max_sweeps: int = 200
    variational_max_iter: int = 400
    regularization: float = 1e-9


@dataclass
class RegionSettings:
    """Boundary search for F(t) and the Lagrangian dual."""
    grid_resolution: int = 64
    ternary_grid_resolution: int = 8
    penalty_weights: int = 8
    ascent_steps: int = 150
    quantum_u: bool = False
    quantum_starts: int = 4
    optimizer_tol: float = 2e-3
    degraded_tol: float = 1e-6
    degraded_max_iter: int = 2000


@dataclass
class ConverseSettings:
    """μ grid used by the strong converse exponent."""
    mu_min: float = 1e-3
    mu_max: float = 1e3
    mu_points: int = 61
    refine_mu: bool = True


@dataclass
class AuditSettings:
    """Limits for finite-blocklength code audits."""
    table_limit: int = 4096
    dense_limit: int = 64
    max_blocklength: int = 6
    decoder_steps: int = 200
    search_budget: int = 10000
    slack_tol: float = 1e-9


@dataclass
class RuntimeSettings:
    """Process-level knobs."""
    seed: int = 0
    threads: int = 0  # 0 = physical core count
    log_level: str = "INFO"
    log_file: str = ""
    bits: bool = False


def _section_from_dict(section_cls, data: Dict[str, Any], current):
    values = {}
    for name in current.__dataclass_fields__:
        values[name] = data.get(name, getattr(current, name))
    return section_cls(**values)


@dataclass
class Settings:
    """Main settings container."""
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    region: RegionSettings = field(default_factory=RegionSettings)
    converse: ConverseSettings = field(default_factory=ConverseSettings)
    audit: AuditSettings = field(default_factory=AuditSettings)
    runtime: RuntimeSettings = field(default_factory=RuntimeSettings)

    def to_dict(self) -> Dict[str, Any]:
        """Convert settings to dictionary."""
        return {
            "optimizer": {
                "restarts": self.optimizer.restarts,
                "refine_top": self.optimizer.refine_top,
                "givens_tol": self.optimizer.givens_tol,
                "max_sweeps": self.optimizer.max_sweeps,
                "variational_max_iter": self.optimizer.variational_max_iter,
                "regularization": self.optimizer.regularization,
            },
            "region": {
                "grid_resolution": self.region.grid_resolution,
                "ternary_grid_resolution": self.region.ternary_grid_resolution,
                "penalty_weights": self.region.penalty_weights,
                "ascent_steps": self.region.ascent_steps,
                "quantum_u": self.region.quantum_u,
                "quantum_starts": self.region.quantum_starts,
                "optimizer_tol": self.region.optimizer_tol,
                "degraded_tol": self.region.degraded_tol,
                "degraded_max_iter": self.region.degraded_max_iter,
            },
            "converse": {
                "mu_min": self.converse.mu_min,
                "mu_max": self.converse.mu_max,
                "mu_points": self.converse.mu_points,
                "refine_mu": self.converse.refine_mu,
            },
            "audit": {
                "table_limit": self.audit.table_limit,
                "dense_limit": self.audit.dense_limit,
                "max_blocklength": self.audit.max_blocklength,
                "decoder_steps": self.audit.decoder_steps,
                "search_budget": self.audit.search_budget,
                "slack_tol": self.audit.slack_tol,
            },
            "runtime": {
                "seed": self.runtime.seed,
                "threads": self.runtime.threads,
                "log_level": self.runtime.log_level,
                "log_file": self.runtime.log_file,
                "bits": self.runtime.bits,
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Settings":
        """Create settings from dictionary.

        Unknown keys are ignored; missing keys keep their defaults.
        """
        settings = cls()

        if "optimizer" in data:
            settings.optimizer = _section_from_dict(OptimizerSettings, data["optimizer"], settings.optimizer)

        if "region" in data:
            settings.region = _section_from_dict(RegionSettings, data["region"], settings.region)

        if "converse" in data:
            settings.converse = _section_from_dict(ConverseSettings, data["converse"], settings.converse)

        if "audit" in data:
            settings.audit = _section_from_dict(AuditSettings, data["audit"], settings.audit)

        if "runtime" in data:
            settings.runtime = _section_from_dict(RuntimeSettings, data["runtime"], settings.runtime)

        return settings
