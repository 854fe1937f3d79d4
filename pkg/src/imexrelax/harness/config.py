"""key = value experiment configuration.

Sections: [model], [scheme], [grid], [time], [output].  Example:

    [model]
    name = r13
    experiment = convergence
    eps = 1e-6, 1e-4, 1e-2
    g = 0.0
    prepared = true

    [scheme]
    name = imex-midpoint-trapezoid

    [grid]
    sizes = 50, 150, 450
    x_left = -1
    x_right = 1
    boundary = periodic

    [time]
    t_end = 1.0
    dt_coeff = 0.3
    dt_power = 1

    [output]
    path = sweep.csv
    norms = l1, linf
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from ..errors import ConfigurationError

KNOWN_MODELS = ("r13", "diffusive2x2", "klf", "broadwell", "vdp")
KNOWN_EXPERIMENTS = ("convergence", "steady_state", "klf_demo")


def _convert(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _convert_list(text: str):
    return [_convert(tok) for tok in text.split(",") if tok.strip()]


@dataclass
class ExperimentConfig:
    model: str
    experiment: str
    scheme: str
    eps_list: list
    grid_sizes: list
    t_end: float
    x_left: float = -1.0
    x_right: float = 1.0
    boundary: str = "periodic"
    dt: float | None = None
    dt_coeff: float | None = None
    dt_power: float = 1.0
    norms: list = field(default_factory=lambda: ["l1", "linf"])
    output_path: str | None = None
    profiles_path: str | None = None
    registry_path: str | None = None
    order_floor: float = 1.8
    seed: int = 0  # reserved; every shipped study is deterministic
    model_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in KNOWN_MODELS:
            raise ConfigurationError(f"unknown model {self.model!r} (known: {KNOWN_MODELS})")
        if self.experiment not in KNOWN_EXPERIMENTS:
            raise ConfigurationError(
                f"unknown experiment {self.experiment!r} (known: {KNOWN_EXPERIMENTS})"
            )
        sizes = list(self.grid_sizes)
        if sorted(sizes) != sizes or len(set(sizes)) != len(sizes):
            raise ConfigurationError("grid sizes must be strictly increasing")
        if len(sizes) >= 3:
            ratios = {round(sizes[i + 1] / sizes[i], 12) for i in range(len(sizes) - 1)}
            if len(ratios) != 1:
                raise ConfigurationError("refinement ratio must be constant across the ladder")
        if (self.dt is None) == (self.dt_coeff is None):
            raise ConfigurationError("pick exactly one of dt / dt_coeff (+ dt_power)")

    def step_dt(self, dx: float) -> float:
        if self.dt is not None:
            return self.dt
        return self.dt_coeff * dx**self.dt_power

    @property
    def ratio(self) -> float:
        if len(self.grid_sizes) < 2:
            return 1.0
        return self.grid_sizes[1] / self.grid_sizes[0]


def load_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"config file not found: {path}")
    try:
        model_sec = dict(parser["model"])
        scheme_sec = dict(parser["scheme"]) if parser.has_section("scheme") else {}
        grid_sec = dict(parser["grid"])
        time_sec = dict(parser["time"])
        out_sec = dict(parser["output"]) if parser.has_section("output") else {}
    except KeyError as exc:
        raise ConfigurationError(f"missing config section {exc}") from exc

    known_model_keys = {"name", "experiment", "eps"}
    params = {
        k: _convert(v) for k, v in model_sec.items() if k not in known_model_keys
    }
    try:
        cfg = ExperimentConfig(
            model=model_sec["name"],
            experiment=model_sec.get("experiment", "convergence"),
            scheme=scheme_sec.get("name", "imex-midpoint-trapezoid"),
            eps_list=_convert_list(model_sec.get("eps", "1e-6")),
            grid_sizes=_convert_list(grid_sec["sizes"]),
            t_end=float(time_sec["t_end"]),
            x_left=float(grid_sec.get("x_left", -1.0)),
            x_right=float(grid_sec.get("x_right", 1.0)),
            boundary=grid_sec.get("boundary", "periodic"),
            dt=float(time_sec["dt"]) if "dt" in time_sec else None,
            dt_coeff=float(time_sec["dt_coeff"]) if "dt_coeff" in time_sec else None,
            dt_power=float(time_sec.get("dt_power", 1.0)),
            norms=[str(x) for x in _convert_list(out_sec.get("norms", "l1, linf"))],
            output_path=out_sec.get("path"),
            profiles_path=out_sec.get("profiles_path"),
            registry_path=scheme_sec.get("registry"),
            order_floor=float(out_sec.get("order_floor", 1.8)),
            seed=int(out_sec.get("seed", 0)),
            model_params=params,
        )
    except KeyError as exc:
        raise ConfigurationError(f"missing config key {exc}") from exc
    return cfg
