"""Truncated Fock-space populations and thermal state preparation.

Populations live in the log domain. After N ground-state measurements the
weight of Fock level n has shrunk by |coef_n|**(2N); with N up to a few
hundred these factors underflow linear floats, while their logarithms stay
comfortably finite. The log of the total unnormalized mass doubles as the
cumulative survival probability of the measurement record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .params import HBAR, KB

DEFAULT_EPSILON_TAIL = 1e-12
DEFAULT_HARD_CAP = 65536


class CapacityError(RuntimeError):
    """A distribution would need more Fock levels than the configured cap."""


def thermal_occupation(omega_m: float, temperature: float) -> float:
    """Bose-Einstein mean occupancy 1 / (exp(hbar*omega_m / kB*T) - 1).

    Parameters
    ----------
    omega_m : float
        Resonator angular frequency in rad/s, > 0.
    temperature : float
        Bath temperature in kelvin, > 0.
    """
    if not omega_m > 0.0:
        raise ValueError(f"omega_m must be positive, got {omega_m}")
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    return 1.0 / math.expm1(HBAR * omega_m / (KB * temperature))


@dataclass(frozen=True)
class ThermalSpec:
    """Thermal initial state, given either as (T, omega_m) or as n_bar_th.

    Exactly one of ``temperature`` (with ``omega_m``) or ``n_bar_th`` must
    be provided. ``epsilon_tail`` bounds the geometric tail mass discarded
    by the Fock truncation and must lie in (0, 1e-6].
    """

    temperature: float | None = None
    omega_m: float | None = None
    n_bar_th: float | None = None
    epsilon_tail: float = DEFAULT_EPSILON_TAIL

    def __post_init__(self):
        if (self.temperature is None) == (self.n_bar_th is None):
            raise ValueError("give exactly one of temperature or n_bar_th")
        if self.temperature is not None:
            if self.omega_m is None:
                raise ValueError("temperature requires omega_m")
            if not self.temperature > 0.0:
                raise ValueError(f"temperature must be positive, got {self.temperature}")
        if self.n_bar_th is not None and self.n_bar_th < 0.0:
            raise ValueError(f"n_bar_th must be nonnegative, got {self.n_bar_th}")
        if not 0.0 < self.epsilon_tail <= 1e-6:
            raise ValueError(f"epsilon_tail must be in (0, 1e-6], got {self.epsilon_tail}")

    @property
    def n_bar(self) -> float:
        """Mean occupancy implied by the spec."""
        if self.n_bar_th is not None:
            return self.n_bar_th
        return thermal_occupation(self.omega_m, self.temperature)


@dataclass(frozen=True, eq=False)
class PopulationDistribution:
    """Diagonal Fock-state weights, stored as logs.

    ``log_weights[n]`` is the log of the unnormalized weight of level n
    (``-inf`` marks zero population). ``norm_log`` is the log of the total
    mass, kept equal to ``logsumexp(log_weights)``; for a state evolved
    from a normalized start it is the log of the cumulative survival
    probability. Instances are treated as immutable values.
    """

    log_weights: np.ndarray
    norm_log: float = None  # type: ignore[assignment]

    def __post_init__(self):
        lw = np.asarray(self.log_weights, dtype=float)
        if lw.ndim != 1 or lw.size == 0:
            raise ValueError("log_weights must be a nonempty 1-d array")
        if np.any(np.isnan(lw)) or np.any(lw == np.inf):
            raise ValueError("log_weights must be finite or -inf")
        object.__setattr__(self, "log_weights", lw)
        if self.norm_log is None:
            object.__setattr__(self, "norm_log", float(logsumexp(lw)))

    @classmethod
    def from_probabilities(cls, probs) -> "PopulationDistribution":
        """Build from linear-domain weights (zeros become -inf logs)."""
        p = np.asarray(probs, dtype=float)
        if np.any(p < 0.0):
            raise ValueError("probabilities must be nonnegative")
        with np.errstate(divide="ignore"):
            return cls(np.log(p))

    @property
    def n_max(self) -> int:
        return self.log_weights.size - 1

    @property
    def survival_probability(self) -> float:
        """Total unnormalized mass, exp(norm_log)."""
        return float(np.exp(self.norm_log))

    def probabilities(self) -> np.ndarray:
        """Normalized view; the conditional post-measurement populations."""
        if self.norm_log == -np.inf:
            raise ValueError("distribution has no surviving population")
        return np.exp(self.log_weights - self.norm_log)

    def renormalized(self) -> "PopulationDistribution":
        """Same shape with total mass reset to one."""
        if self.norm_log == -np.inf:
            raise ValueError("distribution has no surviving population")
        return PopulationDistribution(self.log_weights - self.norm_log)


def mean_occupation(d: PopulationDistribution) -> float:
    """Mean Fock number of the normalized view, sum_n n p_n."""
    p = d.probabilities()
    return float(np.dot(np.arange(p.size, dtype=float), p))


def _tail_n_max(n_bar: float, epsilon_tail: float) -> int:
    """Smallest truncation whose geometric tail mass is below epsilon_tail.

    One extra level is kept beyond the bare bound so the truncated mean
    stays within epsilon_tail * n_max of the untruncated one.
    """
    r = n_bar / (1.0 + n_bar)
    log_r = math.log(r)
    m = max(0, math.ceil(math.log(epsilon_tail) / log_r - 1.0))
    while (m + 1) * log_r >= math.log(epsilon_tail):
        m += 1
    return m + 1


def thermal_distribution(spec: ThermalSpec, *, n_max_floor: int = 0,
                         hard_cap: int = DEFAULT_HARD_CAP) -> PopulationDistribution:
    """Truncated geometric distribution p_n = n_bar^n / (1 + n_bar)^(n+1).

    The truncation keeps the discarded tail mass below ``spec.epsilon_tail``
    and never falls under ``n_max_floor`` (used by the protocol layer to
    cover cooling-free indices). The result is normalized over the kept
    levels.

    Raises
    ------
    CapacityError
        If the required truncation exceeds ``hard_cap``.
    """
    n_bar = spec.n_bar
    if n_bar == 0.0:
        n_max = max(0, n_max_floor)
        lw = np.full(n_max + 1, -np.inf)
        lw[0] = 0.0
        return PopulationDistribution(lw, norm_log=0.0)
    n_max = max(_tail_n_max(n_bar, spec.epsilon_tail), n_max_floor, 0)
    if n_max > hard_cap:
        raise CapacityError(
            f"thermal state with n_bar={n_bar:g} needs n_max={n_max}, "
            f"above the hard cap {hard_cap}"
        )
    n = np.arange(n_max + 1, dtype=float)
    lw = n * math.log(n_bar / (1.0 + n_bar)) - math.log1p(n_bar)
    lw -= logsumexp(lw)
    return PopulationDistribution(lw, norm_log=0.0)
