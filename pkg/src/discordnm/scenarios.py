"""Scenario configuration: flat key=value files, presets, model building.

A scenario is described by dotted keys (for example ``jc.alpha = 5``). The
same schema backs preset names and config files; command-line flags override
file values, which override preset values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .dynamics import (CustomHamiltonianModel, DephasingModel, JaynesCummingsModel)
from .errors import ConfigError, InvalidStateError
from .states import DensityMatrix
from .tolerances import resolve_log_base

__all__ = ["ScenarioConfig", "parse_config_text", "load_preset", "PRESET_NAMES",
           "build_scenario", "MODEL_NAMES"]

MODEL_NAMES = ("jaynes-cummings", "dephasing", "hadamard-demo", "custom")

_PRESETS: dict[str, dict[str, str]] = {
    # Damped qubit in a lossless cavity, the published witness scenario.
    "example1": {
        "model": "jaynes-cummings",
        "grid.t_end": "10",
        "grid.dt": "0.01",
        "jc.coupling": "1.0",
        "jc.alpha": "5",
        "jc.epsilon": "0.2",
        "jc.n_max": "80",
        "jc.truncation_guard": "true",
    },
    # Two-qubit dephasing with a frozen environment.
    "example2": {
        "model": "dephasing",
        "grid.t_end": "10",
        "grid.dt": "0.05",
        "dephasing.p0": "0.5",
        "dephasing.initial": "plus",
        "record.discord": "true",
        "record.witness": "true",
    },
    # Local Hadamard mixing channel on a classically correlated pair; the
    # output blocks stay commuting, so discord and witness remain zero.
    "hadamard-demo": {
        "model": "hadamard-demo",
        "grid.t_end": "0.5",
        "grid.dt": "0.01",
        "record.discord": "true",
        "record.witness": "true",
    },
}
_PRESET_ALIASES = {"jaynes-cummings": "example1", "dephasing": "example2"}

PRESET_NAMES = tuple(_PRESETS) + tuple(_PRESET_ALIASES)

_KNOWN_KEYS = {
    "model", "grid.t_end", "grid.dt", "grid.tau", "entropy.log_base",
    "record.discord", "record.witness", "output.plots", "output.dir",
    "thresholds.detection",
    "jc.coupling", "jc.alpha", "jc.epsilon", "jc.n_max", "jc.truncation_guard",
    "dephasing.p0", "dephasing.initial",
    "custom.h_system", "custom.h_environment", "custom.h_interaction",
    "custom.coupling", "custom.rho_system", "custom.rho_environment",
    "sweep.couplings",
}


@dataclass(frozen=True)
class ScenarioConfig:
    model: str = "jaynes-cummings"
    t_end: float = 10.0
    dt: float = 0.01
    tau: float | None = None
    log_base_name: str = "2"
    record_discord: bool = False
    record_witness: bool = False
    plots: bool = True
    out_dir: str = "out"
    detection_threshold: float = 1e-6
    jc_coupling: float = 1.0
    jc_alpha: complex = 5.0 + 0.0j
    jc_epsilon: float = 0.2
    jc_n_max: int = 80
    jc_truncation_guard: bool = True
    dephasing_p0: float = 0.5
    dephasing_initial: str = "plus"
    custom_h_system: str | None = None
    custom_h_environment: str | None = None
    custom_h_interaction: str | None = None
    custom_coupling: float = 1.0
    custom_rho_system: str | None = None
    custom_rho_environment: str | None = None
    sweep_couplings: tuple[float, ...] | None = None

    @property
    def log_base(self) -> float:
        return resolve_log_base(self.log_base_name)

    def describe(self) -> dict:
        """Settings echo for the summary file; enough to reproduce the run."""
        out = {
            "model": self.model,
            "t_end": self.t_end,
            "dt": self.dt,
            "tau": self.t_end if self.tau is None else self.tau,
            "log_base": self.log_base_name,
            "record_discord": self.record_discord,
            "record_witness": self.record_witness,
            "detection_threshold": self.detection_threshold,
        }
        if self.model == "jaynes-cummings":
            out["jaynes_cummings"] = {
                "coupling": self.jc_coupling,
                "alpha": repr(self.jc_alpha),
                "epsilon": self.jc_epsilon,
                "n_max": self.jc_n_max,
                "truncation_guard": self.jc_truncation_guard,
            }
        elif self.model == "dephasing":
            out["dephasing"] = {"p0": self.dephasing_p0,
                                "initial": self.dephasing_initial}
        elif self.model == "custom":
            out["custom"] = {"coupling": self.custom_coupling}
        if self.sweep_couplings is not None:
            out["sweep_couplings"] = list(self.sweep_couplings)
        return out


_FIELD_NAMES = {f.name for f in fields(ScenarioConfig)}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, blanks ignored."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key in mapping:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def load_preset(name: str) -> dict[str, str]:
    canonical = _PRESET_ALIASES.get(name, name)
    if canonical not in _PRESETS:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESET_NAMES))}"
        )
    return dict(_PRESETS[canonical])


def _parse_bool(key: str, value: str) -> bool:
    low = value.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_float(key: str, value: str) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: value must be finite, got {value!r}")
    return x


def _parse_complex(key: str, value: str) -> complex:
    try:
        return complex(value.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"{key}: expected a complex number, got {value!r}") from None


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def parse_matrix(key: str, value: str) -> np.ndarray:
    """Rows separated by ';', entries by ','; entries are Python complex
    literals, e.g. ``0,1;1,0`` or ``0.5,0.5j;-0.5j,0.5``."""
    rows = []
    for row_text in value.split(";"):
        entries = [e.strip() for e in row_text.split(",")]
        try:
            rows.append([complex(e) for e in entries])
        except ValueError:
            raise ConfigError(f"{key}: cannot parse matrix row {row_text!r}") from None
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ConfigError(f"{key}: ragged matrix rows")
    return np.array(rows, dtype=complex)


def build_scenario(mapping: dict[str, str], overrides: dict | None = None) -> ScenarioConfig:
    """Typed ScenarioConfig from a raw key=value mapping. Unknown keys are
    rejected; overrides (already typed, from CLI flags) are applied last."""
    unknown = sorted(set(mapping) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")

    kw: dict = {}
    m = dict(mapping)
    if "model" in m:
        model = m["model"].strip()
        if model not in MODEL_NAMES:
            raise ConfigError(f"model: unknown model {model!r}; choose from {MODEL_NAMES}")
        kw["model"] = model
    if "grid.t_end" in m:
        kw["t_end"] = _parse_float("grid.t_end", m["grid.t_end"])
    if "grid.dt" in m:
        kw["dt"] = _parse_float("grid.dt", m["grid.dt"])
    if "grid.tau" in m:
        kw["tau"] = _parse_float("grid.tau", m["grid.tau"])
    if "entropy.log_base" in m:
        name = m["entropy.log_base"].strip().lower()
        if name not in ("e", "2"):
            raise ConfigError(f"entropy.log_base: expected 'e' or '2', got {name!r}")
        kw["log_base_name"] = name
    if "record.discord" in m:
        kw["record_discord"] = _parse_bool("record.discord", m["record.discord"])
    if "record.witness" in m:
        kw["record_witness"] = _parse_bool("record.witness", m["record.witness"])
    if "output.plots" in m:
        kw["plots"] = _parse_bool("output.plots", m["output.plots"])
    if "output.dir" in m:
        kw["out_dir"] = m["output.dir"]
    if "thresholds.detection" in m:
        kw["detection_threshold"] = _parse_float("thresholds.detection",
                                                 m["thresholds.detection"])
    if "jc.coupling" in m:
        kw["jc_coupling"] = _parse_float("jc.coupling", m["jc.coupling"])
    if "jc.alpha" in m:
        kw["jc_alpha"] = _parse_complex("jc.alpha", m["jc.alpha"])
    if "jc.epsilon" in m:
        kw["jc_epsilon"] = _parse_float("jc.epsilon", m["jc.epsilon"])
    if "jc.n_max" in m:
        kw["jc_n_max"] = _parse_int("jc.n_max", m["jc.n_max"])
    if "jc.truncation_guard" in m:
        kw["jc_truncation_guard"] = _parse_bool("jc.truncation_guard",
                                                m["jc.truncation_guard"])
    if "dephasing.p0" in m:
        kw["dephasing_p0"] = _parse_float("dephasing.p0", m["dephasing.p0"])
    if "dephasing.initial" in m:
        kw["dephasing_initial"] = m["dephasing.initial"].strip()
    for cfg_key, field_name in (("custom.h_system", "custom_h_system"),
                                ("custom.h_environment", "custom_h_environment"),
                                ("custom.h_interaction", "custom_h_interaction"),
                                ("custom.rho_system", "custom_rho_system"),
                                ("custom.rho_environment", "custom_rho_environment")):
        if cfg_key in m:
            kw[field_name] = m[cfg_key]
    if "custom.coupling" in m:
        kw["custom_coupling"] = _parse_float("custom.coupling", m["custom.coupling"])
    if "sweep.couplings" in m:
        parts = [p for p in m["sweep.couplings"].split(",") if p.strip()]
        if not parts:
            raise ConfigError("sweep.couplings: empty list")
        kw["sweep_couplings"] = tuple(_parse_float("sweep.couplings", p) for p in parts)

    cfg = ScenarioConfig(**kw)
    if overrides:
        cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    _validate(cfg)
    return cfg


def _validate(cfg: ScenarioConfig):
    if cfg.dt <= 0.0:
        raise ConfigError(f"grid.dt must be positive, got {cfg.dt}")
    if cfg.t_end < cfg.dt:
        raise ConfigError(f"grid.t_end {cfg.t_end} must be at least grid.dt {cfg.dt}")
    if cfg.tau is not None and not 0.0 < cfg.tau <= cfg.t_end:
        raise ConfigError(f"grid.tau {cfg.tau} must lie in (0, t_end]")
    if not 0.0 <= cfg.jc_epsilon <= 1.0:
        raise ConfigError(f"jc.epsilon {cfg.jc_epsilon} outside [0, 1]")
    if cfg.jc_n_max < 1:
        raise ConfigError(f"jc.n_max must be >= 1, got {cfg.jc_n_max}")
    if not 0.0 <= cfg.dephasing_p0 <= 1.0:
        raise ConfigError(f"dephasing.p0 {cfg.dephasing_p0} outside [0, 1]")
    if cfg.detection_threshold <= 0.0:
        raise ConfigError("thresholds.detection must be positive")
    if cfg.sweep_couplings is not None and cfg.model not in ("jaynes-cummings", "custom"):
        raise ConfigError("sweep.couplings only applies to coupling-parametrized models")
    if cfg.model == "custom":
        for key in ("custom_h_system", "custom_h_environment", "custom_h_interaction",
                    "custom_rho_system", "custom_rho_environment"):
            if getattr(cfg, key) is None:
                raise ConfigError(f"custom model needs {key.replace('_', '.', 1)}")


def _parse_qubit_state(key: str, spec: str) -> DensityMatrix:
    name = spec.strip().lower()
    inv = 1.0 / math.sqrt(2.0)
    kets = {
        "plus": np.array([inv, inv]),
        "minus": np.array([inv, -inv]),
        "zero": np.array([1.0, 0.0]),
        "one": np.array([0.0, 1.0]),
    }
    try:
        if name in kets:
            v = kets[name].astype(complex)
            return DensityMatrix(np.outer(v, v.conj()), (2,), ("S",))
        if name.startswith("mixed:"):
            eps = _parse_float(key, name.split(":", 1)[1])
            if not 0.0 <= eps <= 1.0:
                raise ConfigError(f"{key}: mixed weight {eps} outside [0, 1]")
            return DensityMatrix(np.diag([eps, 1.0 - eps]), (2,), ("S",))
        matrix = parse_matrix(key, spec)
        return DensityMatrix(matrix, (2,), ("S",))
    except InvalidStateError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def build_model(cfg: ScenarioConfig, coupling: float | None = None):
    """Instantiate the configured model; None for the channel demo.

    State and operator validation failures surface as ConfigError since they
    originate in the scenario description.
    """
    try:
        if cfg.model == "jaynes-cummings":
            return JaynesCummingsModel(
                coupling=cfg.jc_coupling if coupling is None else coupling,
                alpha=cfg.jc_alpha, epsilon=cfg.jc_epsilon, n_max=cfg.jc_n_max)
        if cfg.model == "dephasing":
            return DephasingModel(p0=cfg.dephasing_p0,
                                  initial_system=_parse_qubit_state(
                                      "dephasing.initial", cfg.dephasing_initial))
        if cfg.model == "custom":
            rho_s = DensityMatrix(parse_matrix("custom.rho_system", cfg.custom_rho_system),
                                  labels=("S",))
            rho_e = DensityMatrix(parse_matrix("custom.rho_environment",
                                               cfg.custom_rho_environment),
                                  labels=("E",))
            return CustomHamiltonianModel(
                system_hamiltonian=parse_matrix("custom.h_system", cfg.custom_h_system),
                environment_hamiltonian=parse_matrix("custom.h_environment",
                                                     cfg.custom_h_environment),
                interaction=parse_matrix("custom.h_interaction", cfg.custom_h_interaction),
                initial_system=rho_s, initial_environment=rho_e,
                coupling=cfg.custom_coupling if coupling is None else coupling)
        if cfg.model == "hadamard-demo":
            return None
    except InvalidStateError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown model {cfg.model!r}")
