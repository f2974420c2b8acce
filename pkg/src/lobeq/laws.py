"""Probability laws for efficient-price jumps and noise-trader volumes.

Two closed families are supported:

* jump laws -- the magnitude of an efficient-price jump, strictly positive
  support: ``Pareto``, ``Exponential`` and ``PointMass``.  Besides the CDF
  they expose the tail expectation ``E[B 1_{B>x}]`` and the ratio
  ``E[max(B/x, 1)]``, the two functionals every book-shape and spread
  formula consumes.
* volume laws -- signed noise-trader volumes with median exactly zero:
  ``NormalVolume`` and ``LaplaceVolume``.  The zero median is load-bearing
  (the half-spread construction inverts the CDF at 1/2), so constructors
  reject anything else by design: the location parameter simply does not
  exist.

All laws are immutable and safe to share across threads.  Sampling takes an
explicit ``numpy.random.Generator`` owned by the caller; there is no hidden
global RNG state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "JumpLaw",
    "VolumeLaw",
    "Pareto",
    "Exponential",
    "PointMass",
    "NormalVolume",
    "LaplaceVolume",
    "jump_law_from_config",
    "volume_law_from_config",
    "law_to_config",
]


def _maybe_scalar(x, out):
    """Return a float for scalar input, the ndarray otherwise."""
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Jump laws
# ---------------------------------------------------------------------------


class JumpLaw:
    """Law of a positive jump magnitude with finite mean.

    ``cdf`` is right-continuous (``P[B <= x]``), and ``tail_expectation``
    uses the strict event ``{B > x}``.  With those conventions the identity

        emax_ratio(x) = tail_expectation(x) / x + cdf(x)

    holds exactly, including for laws with atoms.
    """

    mean: float
    support_inf: float

    def cdf(self, x):
        raise NotImplementedError

    def tail_expectation(self, x):
        """E[B 1_{B>x}] for x >= 0."""
        raise NotImplementedError

    def emax_ratio(self, x):
        """E[max(B/x, 1)] for x > 0; decreasing, >= 1, -> 1 as x -> inf."""
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr <= 0.0):
            raise ValueError("emax_ratio requires x > 0")
        out = self.tail_expectation(x_arr) / x_arr + self.cdf(x_arr)
        return _maybe_scalar(x, out)

    def p_gt(self, x):
        """P[B > x] (strict)."""
        out = 1.0 - np.asarray(self.cdf(x), dtype=float)
        return _maybe_scalar(x, out)

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError


@dataclass(frozen=True)
class Pareto(JumpLaw):
    """Pareto law on [scale, inf) with tail exponent ``shape`` > 1."""

    shape: float
    scale: float

    def __post_init__(self):
        if not self.shape > 1.0:
            raise ValueError("Pareto shape must exceed 1 for a finite mean")
        if not self.scale > 0.0:
            raise ValueError("Pareto scale must be positive")

    @property
    def mean(self) -> float:
        return self.shape * self.scale / (self.shape - 1.0)

    @property
    def support_inf(self) -> float:
        return self.scale

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        xx = np.maximum(x_arr, self.scale)
        out = np.where(x_arr < self.scale, 0.0, 1.0 - (self.scale / xx) ** self.shape)
        return _maybe_scalar(x, out)

    def tail_expectation(self, x):
        a, s = self.shape, self.scale
        x_arr = np.asarray(x, dtype=float)
        xx = np.maximum(x_arr, s)
        tail = a * s**a * xx ** (1.0 - a) / (a - 1.0)
        out = np.where(x_arr <= s, self.mean, tail)
        return _maybe_scalar(x, out)

    def sample(self, rng: np.random.Generator, size=None):
        u = rng.random(size)
        return self.scale * (1.0 - u) ** (-1.0 / self.shape)


@dataclass(frozen=True)
class Exponential(JumpLaw):
    """Exponential law on (0, inf) with the given rate (per price unit)."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0.0:
            raise ValueError("Exponential rate must be positive")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def support_inf(self) -> float:
        return 0.0

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = np.where(x_arr <= 0.0, 0.0, -np.expm1(-self.rate * np.maximum(x_arr, 0.0)))
        return _maybe_scalar(x, out)

    def tail_expectation(self, x):
        x_arr = np.maximum(np.asarray(x, dtype=float), 0.0)
        out = (x_arr + self.mean) * np.exp(-self.rate * x_arr)
        return _maybe_scalar(x, out)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(self.mean, size)


@dataclass(frozen=True)
class PointMass(JumpLaw):
    """Degenerate law: every jump has the same positive magnitude."""

    value: float

    def __post_init__(self):
        if not self.value > 0.0:
            raise ValueError("PointMass value must be positive")

    @property
    def mean(self) -> float:
        return self.value

    @property
    def support_inf(self) -> float:
        return self.value

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = np.where(x_arr >= self.value, 1.0, 0.0)
        return _maybe_scalar(x, out)

    def tail_expectation(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = np.where(x_arr < self.value, self.value, 0.0)
        return _maybe_scalar(x, out)

    def sample(self, rng: np.random.Generator, size=None):
        rng.random(size)  # consume the slot so draw streams stay aligned
        if size is None:
            return self.value
        return np.full(size, self.value)


# ---------------------------------------------------------------------------
# Volume laws
# ---------------------------------------------------------------------------


class VolumeLaw:
    """Law of the signed noise-trader volume; continuous, strictly
    increasing CDF with median exactly zero."""

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, p):
        """Inverse CDF on (0, 1); quantile(1/2) == 0 exactly."""
        raise NotImplementedError

    def p_gt(self, x):
        out = 1.0 - np.asarray(self.cdf(x), dtype=float)
        return _maybe_scalar(x, out)

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    @staticmethod
    def _check_p(p):
        p_arr = np.asarray(p, dtype=float)
        if np.any(p_arr <= 0.0) or np.any(p_arr >= 1.0):
            raise ValueError("quantile requires 0 < p < 1")
        return p_arr


@dataclass(frozen=True)
class NormalVolume(VolumeLaw):
    """Centered normal volumes with standard deviation ``sigma``."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError("sigma must be positive")

    def cdf(self, x):
        out = ndtr(np.asarray(x, dtype=float) / self.sigma)
        return _maybe_scalar(x, out)

    def quantile(self, p):
        p_arr = self._check_p(p)
        return _maybe_scalar(p, self.sigma * ndtri(p_arr))

    def sample(self, rng: np.random.Generator, size=None):
        return rng.normal(0.0, self.sigma, size)


@dataclass(frozen=True)
class LaplaceVolume(VolumeLaw):
    """Centered Laplace volumes with scale ``b`` (heavier tails than normal)."""

    b: float

    def __post_init__(self):
        if not self.b > 0.0:
            raise ValueError("b must be positive")

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = np.where(
            x_arr < 0.0,
            0.5 * np.exp(np.minimum(x_arr, 0.0) / self.b),
            1.0 - 0.5 * np.exp(-np.maximum(x_arr, 0.0) / self.b),
        )
        return _maybe_scalar(x, out)

    def quantile(self, p):
        p_arr = self._check_p(p)
        out = np.where(
            p_arr < 0.5,
            self.b * np.log(2.0 * np.minimum(p_arr, 0.5)),
            -self.b * np.log(2.0 * (1.0 - np.maximum(p_arr, 0.5))),
        )
        return _maybe_scalar(p, out)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.laplace(0.0, self.b, size)


# ---------------------------------------------------------------------------
# Tagged-record configuration (the wire format used by the CLI)
# ---------------------------------------------------------------------------

_JUMP_KINDS = {
    "pareto": (Pareto, ("shape", "scale")),
    "exponential": (Exponential, ("rate",)),
    "pointmass": (PointMass, ("value",)),
}

_VOLUME_KINDS = {
    "normal": (NormalVolume, ("sigma",)),
    "laplace": (LaplaceVolume, ("b",)),
}

_KIND_BY_CLASS = {
    Pareto: "pareto",
    Exponential: "exponential",
    PointMass: "pointmass",
    NormalVolume: "normal",
    LaplaceVolume: "laplace",
}


def _law_from_config(config: dict, kinds: dict, family: str):
    if not isinstance(config, dict) or "type" not in config:
        raise ValueError(f"{family} law config must be an object with a 'type' field")
    kind = config["type"]
    if kind not in kinds:
        raise ValueError(f"unknown {family} law type {kind!r}; expected one of {sorted(kinds)}")
    cls, fields = kinds[kind]
    missing = [f for f in fields if f not in config]
    if missing:
        raise ValueError(f"{family} law {kind!r} missing fields: {missing}")
    extra = set(config) - set(fields) - {"type"}
    if extra:
        raise ValueError(f"{family} law {kind!r} has unknown fields: {sorted(extra)}")
    return cls(**{f: float(config[f]) for f in fields})


def jump_law_from_config(config: dict) -> JumpLaw:
    return _law_from_config(config, _JUMP_KINDS, "jump")


def volume_law_from_config(config: dict) -> VolumeLaw:
    return _law_from_config(config, _VOLUME_KINDS, "volume")


def law_to_config(law) -> dict:
    kind = _KIND_BY_CLASS[type(law)]
    fields = (_JUMP_KINDS.get(kind) or _VOLUME_KINDS[kind])[1]
    out = {"type": kind}
    out.update({f: getattr(law, f) for f in fields})
    return out
