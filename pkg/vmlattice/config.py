"""Runtime configuration: tolerances, limits, environment and CLI settings."""

from __future__ import annotations

import logging
import os
from enum import Enum
from pathlib import Path
from typing import Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

load_dotenv()

# Limits
int64_max = 2**63 - 1
direct_convolution_threshold = 64
# largest N for the O(N) closed forms, which hold several float vectors of length N
closed_form_max_N = 10**7

# Tolerances
weight_sum_tolerance = 1e-12
negative_clamp_tolerance = 1e-12
decomposition_rtol = 1e-10
closed_form_rtol = 1e-9
fibonacci_halves_rtol = 1e-12

JOBS_ENV = "VMLATTICE_JOBS"

logger = logging.getLogger(__name__)


def resolve_jobs(flag: Optional[int] = None) -> int:
    """Number of worker threads for multi-N commands.

    ``VMLATTICE_JOBS`` wins over the ``--jobs`` flag; without either the
    available CPU count is used.
    """
    env = os.getenv(JOBS_ENV)
    if env:
        try:
            jobs = int(env)
        except ValueError:
            logger.warning("ignoring non-integer %s=%r", JOBS_ENV, env)
        else:
            if jobs >= 1:
                return jobs
            logger.warning("ignoring non-positive %s=%r", JOBS_ENV, env)
    if flag is not None and flag >= 1:
        return flag
    return os.cpu_count() or 1


def configure_logging(verbosity: int = 0) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("vmlattice").setLevel(level)


class Scheme(str, Enum):
    plain = "plain"
    trapezoidal = "trapezoidal"
    optimal = "optimal"


class KorobovConvention(str, Enum):
    """Scaling of the Korobov part reported next to the Sobolev error.

    ``exact`` is the part the Sobolev kernel actually contains, kernel factors
    1 + gamma_j B_2 / 2 (weights gamma / (2 pi)^2). ``table`` uses factors
    1 + gamma_j B_2 (weights gamma / (2 pi^2)), the scaling of the published
    optimal-generator table.
    """

    exact = "exact"
    table = "table"

    @property
    def b2_factor(self) -> float:
        return 0.5 if self is KorobovConvention.exact else 1.0


class RunConfig(BaseModel):
    """Validated settings of one CLI invocation."""

    model_config = ConfigDict(frozen=True)

    command: Literal["weights", "wce", "search", "fib", "conjecture", "plotdata"]
    N: tuple[int, ...] = ()
    z: Optional[tuple[int, ...]] = None
    s: Optional[int] = None
    k: tuple[int, ...] = ()
    gamma: tuple[float, ...] = (1.0,)
    scheme: Scheme = Scheme.optimal
    output: Optional[Path] = None
    format: Literal["csv", "json"] = "csv"
    full: bool = False
    jobs: int = 1

    @field_validator("gamma")
    @classmethod
    def _positive_gamma(cls, gamma: tuple[float, ...]) -> tuple[float, ...]:
        if not gamma:
            raise ValueError("gamma needs at least one entry")
        for j, g in enumerate(gamma, start=1):
            if not g > 0:
                raise ValueError(f"gamma_{j} = {g} must be positive")
        return gamma

    @model_validator(mode="after")
    def _consistent_dimensions(self) -> "RunConfig":
        if self.z is not None:
            if self.s is not None and len(self.z) != self.s:
                raise ValueError(f"|z| = {len(self.z)} does not match s = {self.s}")
            dim = len(self.z)
        else:
            dim = self.s
        if dim is not None and len(self.gamma) not in (1, dim):
            raise ValueError(f"|gamma| = {len(self.gamma)} must be 1 or s = {dim}")
        return self

    @property
    def dimension(self) -> int:
        if self.z is not None:
            return len(self.z)
        if self.s is not None:
            return self.s
        return 2

    def gamma_vector(self, s: Optional[int] = None) -> tuple[float, ...]:
        s = self.dimension if s is None else s
        if len(self.gamma) == 1:
            return self.gamma * s
        return self.gamma
