"""Validated run configuration echoed into every report.

A report's ``config`` is :meth:`RunConfig.echo`; feeding it back through
:meth:`RunConfig.model_validate` reproduces the run.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from relhyp.core.errors import RelHypError

Command = Literal[
    "gen", "cosets", "bowditch", "coneoff", "check", "divergence", "treeapprox"
]
CheckName = Literal[
    "alpha1", "alpha2", "proj", "rh0", "rh1", "rh2", "rh3", "bcp", "gg", "stability"
]
Mode = Literal["exhaustive", "sample"]

OUTPUT_FIELDS = frozenset({"out", "csv", "store"})


class ConfigurationError(RelHypError):
    """Inputs are missing or contradict each other."""

    error_category = "config"


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    check: CheckName | None = None

    # model source: a generated ball or loaded files
    group: str | None = None
    group_config: str | None = None
    radius: int | None = Field(default=None, ge=1)
    radii: tuple[int, ...] = ()
    cosets: tuple[str, ...] = ()
    min_coset_size: int | None = Field(default=None, ge=0)
    graph: str | None = None
    peripherals: str | None = None

    # auxiliary inputs
    paths: str | None = None
    pairs: tuple[tuple[str, str], ...] = ()
    gg_family: str | None = None
    tree_graded: str | None = None
    points: tuple[int, ...] = ()
    members: tuple[int, ...] = ()

    # numeric flags
    K: float = Field(default=1.0, ge=0)
    epsilon: float = Field(default=0.25, gt=0, lt=1)
    M: float = Field(default=1.0, ge=0)
    mu: float = Field(default=1.0, ge=0)
    c: float = Field(default=2.0, ge=0)
    R_grid: tuple[float, ...] = (2.0, 4.0, 8.0)
    L_grid: tuple[float, ...] = (2.0, 4.0)
    k: float | None = Field(default=None, gt=0)
    R_net: float = Field(default=2.0, gt=0)
    depth: int | None = Field(default=None, ge=1)
    atg_delta: float = Field(default=2.0, ge=0)
    delta: float = Field(default=0.5, gt=0, lt=1)
    gamma: float = Field(default=0.0, ge=0)
    closed_ball: bool = False
    n_max: int = Field(default=8, ge=2)
    margin: int | None = Field(default=None, ge=0)
    cap: float | None = Field(default=None, gt=0)
    pool_size: int = Field(default=12, ge=3)

    # sampling and execution
    mode: Mode = "exhaustive"
    count: int = Field(default=200, ge=1)
    seed: int | None = Field(default=None, ge=0)
    threads: int | None = Field(default=None, ge=1)

    # outputs
    out: str | None = None
    csv: str | None = None
    save_graph: str | None = None
    save_family: str | None = None
    store: bool = False

    @model_validator(mode="after")
    def _check_consistency(self) -> RunConfig:
        if self.mode == "sample" and self.seed is None:
            raise ValueError("--seed is required in sample mode")
        if (self.command == "check") != (self.check is not None):
            raise ValueError("a check name is required exactly for the 'check' command")
        if self.radius is not None and self.radii:
            raise ValueError("use either --radius or --radii, not both")
        if self.radii and self.command != "check":
            raise ValueError("--radii is only accepted by the check command")
        if any(r < 1 for r in self.radii):
            raise ValueError("radii must be >= 1")
        if list(self.radii) != sorted(set(self.radii)):
            raise ValueError("radii must be strictly increasing")
        if any(v <= 0 for v in (*self.R_grid, *self.L_grid)):
            raise ValueError("R and L grids must be positive")
        return self

    @property
    def from_group(self) -> bool:
        return self.group is not None or self.group_config is not None

    def echo(self) -> dict[str, Any]:
        """Config as stored in a report; output destinations are not part of the run."""
        return self.model_dump(mode="json", exclude=set(OUTPUT_FIELDS))

    def radius_list(self) -> tuple[int, ...]:
        if self.radii:
            return self.radii
        return (self.radius,) if self.radius is not None else ()
