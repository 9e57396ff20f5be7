"""Scenario files: TOML sections parsed into pydantic models.

Every section forbids unknown keys. The hash of a config is the SHA-256 of
its canonical JSON dump, so key order and whitespace in the file do not
matter.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import tomli
import tomli_w
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.reporting import sha256_of
from ..models.base import Component, ConfigError

_CLI = Component.CLI.value

Coefficient = Union[float, str]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class DomainSection(_Section):
    n: int = 2
    cells: List[int] = Field(default_factory=lambda: [32, 32])
    extents: List[List[float]] = Field(default_factory=lambda: [[0.0, 1.0], [0.0, 1.0]])

    @model_validator(mode="after")
    def _shapes(self) -> "DomainSection":
        if len(self.cells) != self.n or len(self.extents) != self.n:
            raise ValueError(f"cells and extents need {self.n} entries each")
        if any(len(e) != 2 for e in self.extents):
            raise ValueError("each extent is a [lo, hi] pair")
        return self


class LawSection(_Section):
    preset: str = "two_term"
    a: Optional[Coefficient] = 1.0
    b: Optional[Coefficient] = 1.0
    c: Optional[Coefficient] = None
    m: Optional[float] = None
    exponents: Optional[List[float]] = None
    coefficients: Optional[List[Coefficient]] = None

    def to_params(self) -> Dict[str, Any]:
        return {
            k: v
            for k, v in self.model_dump(exclude={"preset"}).items()
            if v is not None
        }


class ScenarioSection(_Section):
    name: str = "scenario"
    phi: str = "constant:1"
    lam: Optional[float] = Field(default=None, alias="lambda")
    gamma: Optional[float] = None
    cz: float = 0.0
    direction: Optional[List[float]] = None
    psi: str = "constant:0"
    psi_times: Optional[List[float]] = None
    psi_scales: Optional[List[float]] = None
    u0: str = "constant:1"
    t_final: float = 0.1

    @model_validator(mode="after")
    def _exponent(self) -> "ScenarioSection":
        if self.lam is not None and self.gamma is not None:
            raise ValueError("give lambda or gamma, not both")
        if self.lam is None and self.gamma is None:
            self.lam = 0.5
        return self


class BoundsSection(_Section):
    r1: Optional[float] = None
    r: Optional[float] = None
    alpha0: float = 40.0
    alpha: Optional[float] = None
    kappa_tilde: float = 1.03
    p1: Optional[float] = None
    p2: Optional[float] = None
    p3: Optional[float] = None
    p4: Optional[float] = None
    p5: Optional[float] = None
    epsilon: float = 0.01
    epsilon_fraction: Optional[float] = None
    beta: Optional[float] = None
    curve_points: int = 101
    oracle: bool = False
    horizon_fraction: Optional[float] = None
    optimize: bool = False
    optimize_points: int = 5
    constants: Optional[Dict[str, float]] = None

    @model_validator(mode="after")
    def _fractions(self) -> "BoundsSection":
        for name in ("horizon_fraction", "epsilon_fraction"):
            value = getattr(self, name)
            if value is not None and not 0 < value < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.curve_points < 2 or self.optimize_points < 1:
            raise ValueError("need curve_points >= 2 and optimize_points >= 1")
        return self

    def p_overrides(self) -> Dict[str, float]:
        return {
            k: v
            for k, v in (
                ("p1", self.p1),
                ("p2", self.p2),
                ("p3", self.p3),
                ("p4", self.p4),
                ("p5", self.p5),
            )
            if v is not None
        }


class SolverConfig(_Section):
    """Time-stepping controls; dt_min only limits halving, never the last step."""

    dt_initial: float = 1e-4
    dt_min: float = 1e-10
    dt_max: float = 1e-2
    picard_tol: float = 1e-10
    picard_max: int = 50
    output_every: int = 10
    alpha_list: List[float] = Field(default_factory=lambda: [2.0])

    @model_validator(mode="after")
    def _ordering(self) -> "SolverConfig":
        if not 0 < self.dt_min <= self.dt_initial <= self.dt_max:
            raise ValueError("need 0 < dt_min <= dt_initial <= dt_max")
        if self.picard_max < 1 or self.output_every < 1:
            raise ValueError("picard_max and output_every must be >= 1")
        if not self.picard_tol > 0:
            raise ValueError("picard_tol must be positive")
        return self


class HarnessSection(_Section):
    seed: int = 42
    count: int = 64
    max_frequency: int = 4
    decay: float = 2.0
    include_constant: bool = True
    include_linear: bool = True
    include_bump: bool = True
    safety_factor: Optional[float] = None
    rs: Optional[List[float]] = None
    alphas: Optional[List[float]] = None
    epsilons: Optional[List[float]] = None
    T: float = 1.0


class OutputSection(_Section):
    directory: str = "out"
    cadence: int = 10
    write_fields: bool = True


class RunConfig(_Section):
    domain: DomainSection = Field(default_factory=DomainSection)
    law: LawSection = Field(default_factory=LawSection)
    scenario: ScenarioSection = Field(default_factory=ScenarioSection)
    bounds: BoundsSection = Field(default_factory=BoundsSection)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    harness: HarnessSection = Field(default_factory=HarnessSection)
    output: OutputSection = Field(default_factory=OutputSection)

    def solver_config(self) -> SolverConfig:
        """The [solver] section with the [output] cadence applied."""
        return self.solver.model_copy(update={"output_every": self.output.cadence})

    def as_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data: Dict[str, Any], source: str = "<config>") -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{source}: {_describe(e)}", _CLI, e) from e


def loads_config(text: str, source: str = "<string>") -> RunConfig:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        raise ConfigError(f"{source}: {e}", _CLI, e) from e
    return parse_config(data, source)


def load_config(path: Union[str, Path]) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {p}: {e}", _CLI, e) from e
    return loads_config(text, str(p))


def dump_config(cfg: RunConfig) -> str:
    return tomli_w.dumps(cfg.as_dict())


def config_hash(cfg: RunConfig) -> str:
    return sha256_of(cfg.as_dict())
