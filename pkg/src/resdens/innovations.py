"""Innovation distributions and reproducible random streams.

Every stochastic routine in the package draws through an :class:`RngStream`,
a (seed, stream_id) pair mapped onto a counter-based Philox generator.  Equal
pairs reproduce bit-identical draw sequences across runs and platforms;
distinct stream ids give statistically independent streams, which is what the
Monte Carlo harness relies on when it assigns one stream per replication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

GAUSSIAN = "gaussian"
STUDENT_T = "student_t"
STD_STUDENT_T = "std_student_t"

_FAMILIES = (GAUSSIAN, STUDENT_T, STD_STUDENT_T)

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class InnovationSpec:
    """Law of the i.i.d. innovation sequence driving a model.

    family : one of "gaussian", "student_t", "std_student_t"
    dof    : degrees of freedom; ignored for the Gaussian family.

    "student_t" is the raw Student law (variance dof/(dof-2)); the
    standardized variant rescales it to unit variance, which is what the
    volatility recursions assume of their innovations.
    """

    family: str
    dof: float = 0.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown innovation family {self.family!r}")
        if self.family == STUDENT_T and not self.dof > 0:
            raise ValueError("student_t requires dof > 0")
        if self.family == STD_STUDENT_T and not self.dof > 2:
            raise ValueError("std_student_t requires dof > 2 for unit variance")

    @property
    def variance(self) -> float:
        """Variance of one innovation; inf when the raw t has dof <= 2."""
        if self.family == GAUSSIAN or self.family == STD_STUDENT_T:
            return 1.0
        if self.dof <= 2:
            return math.inf
        return self.dof / (self.dof - 2.0)


@dataclass(frozen=True)
class RngStream:
    """Reproducible stream identified by (seed, stream_id)."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not (0 <= int(v) < 2**64):
                raise ValueError(f"{name} must fit in 64 bits, got {v}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def _as_generator(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, RngStream):
        return stream.generator()
    raise TypeError("stream must be an RngStream or numpy Generator")


def sample(spec: InnovationSpec, stream, size=None):
    """Draw from the innovation law.

    `stream` may be an :class:`RngStream` (a fresh generator is created, so
    repeated calls with the same stream repeat the same values) or an already
    materialized numpy Generator whose state advances across calls.
    """
    gen = _as_generator(stream)
    if spec.family == GAUSSIAN:
        return gen.standard_normal(size)
    draws = gen.standard_t(spec.dof, size)
    if spec.family == STD_STUDENT_T:
        draws = draws / math.sqrt(spec.dof / (spec.dof - 2.0))
    return draws


def density(spec: InnovationSpec, x):
    """Evaluate the innovation density pointwise (vectorized over x)."""
    x = np.asarray(x, dtype=float)
    if spec.family == GAUSSIAN:
        return np.exp(-0.5 * x * x) / _SQRT_2PI
    if spec.family == STUDENT_T:
        return _t_pdf(x, spec.dof)
    c = math.sqrt(spec.dof / (spec.dof - 2.0))
    return c * _t_pdf(c * x, spec.dof)


def _t_pdf(x, dof):
    logc = gammaln((dof + 1.0) / 2.0) - gammaln(dof / 2.0) - 0.5 * math.log(dof * math.pi)
    return np.exp(logc - 0.5 * (dof + 1.0) * np.log1p(x * x / dof))
