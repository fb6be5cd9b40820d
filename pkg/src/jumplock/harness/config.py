"""Run configuration: flat ``key = value`` presets plus overrides.

A preset is a plain text file with one ``key = value`` per line and ``#``
comments.  Recognized keys (controller quantities are in controller units,
i.e. Gamma-units for the two-level atom and gamma-units for the Lambda plants):

=============  ==============================================================
model          ``two-level``, ``lambda-reduced`` or ``lambda-full``
u_bar, v_bar   two-level drive and modulation amplitudes
omega          modulation frequency (controller units)
epsilon        Lambda modulation depth
omega1/2       Lambda Rabi frequencies
Gamma1/2       Lambda excited-state decay rates
delta_e        full Lambda excited detuning (reference units)
gain           feedback gain ``delta``
c_bound        clip bound ``C``
dead_time      dead time ``T``
clip_mode      ``paper`` or ``symmetric``
delta0         initial detuning
eta            detection efficiency, or one per channel separated by commas
rho0           ``reset``, ``ground``, ``excited``, ``g1``, ``g2``, ``bright``, ``dark``
ensemble       number of trajectories
seed           master seed
clicks         matured detected clicks per trajectory
time           time horizon per trajectory (controller units)
dt             integration step (plant units); empty for the default
engine         ``periodic`` or ``stepwise``
workers        worker processes for the ensemble
svg            write SVG plots (``true``/``false``)
=============  ==============================================================
"""
from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..dynamics import FullLambdaParams, ReducedLambdaParams, TwoLevelParams
from ..errors import ConfigurationError
from ..feedback import FeedbackConfig
from ..jumps import DetectionModel
from ..qstate import KET_E, KET_G, KET_G1, KET_G2, embed_ground, projector

MODELS = ("two-level", "lambda-reduced", "lambda-full")
PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"


@dataclass(frozen=True)
class RunConfig:
    model: str = "two-level"
    u_bar: float = 0.06
    v_bar: float = 0.06
    omega: float = 1.0
    epsilon: float = 0.03
    omega1: float = 1.0
    omega2: float = 1.0
    Gamma1: float = 3.0
    Gamma2: float = 3.0
    delta_e: float = 0.0
    gain: float = 9e-4
    c_bound: float = 0.5
    dead_time: float = 0.0
    clip_mode: str = "paper"
    delta0: float = 0.5
    eta: tuple = (1.0,)
    rho0: str = "reset"
    ensemble: int = 1
    seed: int = 0
    clicks: int | None = None
    time: float | None = None
    dt: float | None = None
    engine: str = "periodic"
    workers: int = 1
    svg: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigurationError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.ensemble < 1:
            raise ConfigurationError("ensemble size must be at least 1")
        if self.clicks is None and self.time is None:
            raise ConfigurationError("set a stop condition: clicks or time")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")

    # -- construction -------------------------------------------------------------

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in fields:
                raise ConfigurationError(f"unknown configuration key {key!r}")
            kwargs[key] = _coerce(key, raw)
        return cls(**kwargs)

    @classmethod
    def from_preset(cls, path, overrides: dict | None = None) -> "RunConfig":
        values = read_preset(path)
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_mapping(values)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{k: _coerce(k, v) for k, v in changes.items()})

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["eta"] = list(self.eta)
        return out

    # -- derived objects ----------------------------------------------------------

    @property
    def unit_scale(self) -> float:
        if self.model == "lambda-full":
            return 4 * (self.omega1**2 + self.omega2**2) / (self.Gamma1 + self.Gamma2)
        return 1.0

    def build_model(self, delta: float | None = None):
        """Plant at controller detuning ``delta`` (defaults to ``delta0``)."""
        delta = self.delta0 if delta is None else float(delta)
        if self.model == "two-level":
            return TwoLevelParams(delta, self.u_bar, self.v_bar, self.omega)
        if self.model == "lambda-reduced":
            return ReducedLambdaParams.from_rabi(delta, self.epsilon, self.omega, self.omega1,
                                                 self.omega2, self.Gamma1, self.Gamma2)
        scale = self.unit_scale
        return FullLambdaParams(delta * scale, self.omega1, self.omega2, self.Gamma1, self.Gamma2,
                                self.epsilon, self.omega * scale, self.delta_e)

    def feedback_config(self) -> FeedbackConfig:
        if self.model == "two-level":
            return FeedbackConfig(self.c_bound, self.gain, self.omega, self.dead_time,
                                  clip_mode=self.clip_mode)
        return FeedbackConfig(self.c_bound, self.gain, self.omega, self.dead_time, variant="lambda",
                              alpha=math.atan2(self.omega2, self.omega1), clip_mode=self.clip_mode)

    def detection(self) -> DetectionModel:
        return DetectionModel.for_model(self.build_model(), self.eta)

    def initial_state(self):
        """Initial density matrix, or ``None`` for the model's first reset state."""
        if self.rho0 == "reset":
            return None
        model = self.build_model()
        if self.model == "two-level":
            kets = {"ground": KET_G, "excited": KET_E}
            if self.rho0 not in kets:
                raise ConfigurationError(f"rho0 {self.rho0!r} is not a two-level state")
            return projector(kets[self.rho0])
        basis = model.basis
        kets = {"g1": KET_G1[:2], "g2": KET_G2[:2], "ground": KET_G1[:2],
                "bright": basis.bright, "dark": basis.dark}
        if self.rho0 == "excited" and self.model == "lambda-full":
            return np.diag([0, 0, 1]).astype(complex)
        if self.rho0 not in kets:
            raise ConfigurationError(f"rho0 {self.rho0!r} is not a Lambda ground state")
        rho = projector(kets[self.rho0])
        return embed_ground(rho) if self.model == "lambda-full" else rho


def _coerce(key: str, raw):
    if raw is None:
        return None
    if key == "eta":
        if isinstance(raw, str):
            raw = [v for v in raw.replace(",", " ").split() if v]
        return tuple(float(v) for v in np.atleast_1d(raw))
    if key in ("model", "clip_mode", "rho0", "engine"):
        return str(raw).strip()
    if key in ("ensemble", "seed", "workers", "clicks"):
        if isinstance(raw, str) and raw.strip().lower() in ("", "none"):
            return None if key == "clicks" else 0
        return int(raw)
    if key == "svg":
        if isinstance(raw, str):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return bool(raw)
    if isinstance(raw, str) and raw.strip().lower() in ("", "none"):
        return None
    return float(raw)


def read_preset(path) -> dict:
    """Parse a flat ``key = value`` file into a dictionary of strings."""
    path = Path(path)
    if not path.exists() and not path.suffix:
        path = PRESET_DIR / f"{path.name}.preset"
    elif not path.exists() and (PRESET_DIR / path.name).exists():
        path = PRESET_DIR / path.name
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read preset {path}: {exc}") from exc
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str  # keep Gamma1 / Gamma2 case
    parser.read_string("[run]\n" + text, source=str(path))
    return dict(parser["run"])


def preset_path(name: str) -> Path:
    return PRESET_DIR / f"{name}.preset"
