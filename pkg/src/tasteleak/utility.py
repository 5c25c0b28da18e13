"""Utility of the noisy score and the privacy/utility trade-off."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .inference import exact_joint
from .population import PopulationTable
from .programs import LINEAR_SCORE, NOISY_SCORE, NoiseSpec, WeightConfig, noise_kernel

DEFAULT_DELTAS = (0.1, 0.5, 1.0)
DEFAULT_UTILITY_THRESHOLD = 0.9
HDI_MASS = 0.94


def _fold(noise: NoiseSpec) -> tuple[np.ndarray, np.ndarray]:
    offsets, masses = noise_kernel(noise)
    reach = int(offsets[-1])
    folded = masses[reach:].copy()
    folded[1:] += masses[:reach][::-1]
    return np.arange(reach + 1, dtype=np.int64), folded


def abs_difference_distribution(
    weights: WeightConfig, table: PopulationTable, noise: NoiseSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Distribution of |noisy score - score| over centi bins ``0..D``.

    Mixture over the prior score distribution. Every disclosed score sits on
    the centi grid, so each component is the same folded kernel; the mixture
    is kept so a non-grid score model would slot in here.
    """
    marginal = exact_joint(table, LINEAR_SCORE, weights).output_marginal
    diffs, folded = _fold(noise)
    probs = np.zeros_like(folded)
    for p in marginal:
        probs += p * folded
    return diffs, probs / probs.sum()


def _centi_bound(delta) -> Fraction:
    return Fraction(repr(float(delta))) * 100


def error_bound_probability(noise: NoiseSpec, delta: float) -> float:
    """p(|score - noisy score| < delta), strict on the centi grid."""
    if isinstance(delta, bool) or not isinstance(delta, (int, float)) or math.isnan(delta) or delta <= 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    diffs, folded = _fold(noise)
    if math.isinf(delta):
        return float(folded.sum())
    bound = _centi_bound(delta)
    return float(folded[diffs < bound].sum())


def hdi(values: np.ndarray, probs: np.ndarray, mass: float = HDI_MASS) -> tuple[int, int]:
    """Narrowest contiguous window of ``values`` holding at least ``mass``."""
    cum = np.concatenate([[0.0], np.cumsum(probs)])
    best = (0, len(values) - 1)
    hi = 0
    for lo in range(len(values)):
        hi = max(hi, lo)
        while hi < len(values) and cum[hi + 1] - cum[lo] < mass - 1e-12:
            hi += 1
        if hi == len(values):
            break
        if values[hi] - values[lo] < values[best[1]] - values[best[0]]:
            best = (lo, hi)
    return int(values[best[0]]), int(values[best[1]])


@dataclass(frozen=True)
class UtilityReport:
    sigma: float
    differences: np.ndarray  # centi units
    probabilities: np.ndarray
    error_bounds: dict
    hdi: tuple
    bayes_vulnerability: float | None = None

    @property
    def mode(self) -> int:
        return int(self.differences[np.argmax(self.probabilities)])


def utility_report(
    weights: WeightConfig,
    table: PopulationTable,
    noise: NoiseSpec,
    deltas: Sequence[float] = DEFAULT_DELTAS,
    bayes_vulnerability: float | None = None,
) -> UtilityReport:
    diffs, probs = abs_difference_distribution(weights, table, noise)
    return UtilityReport(
        sigma=noise.sigma,
        differences=diffs,
        probabilities=probs,
        error_bounds={d: error_bound_probability(noise, d) for d in deltas},
        hdi=hdi(diffs, probs),
        bayes_vulnerability=bayes_vulnerability,
    )


@dataclass(frozen=True)
class FrontierRow:
    program: str
    sigma: float | None
    delta: float
    bayes_vulnerability: float
    error_bound: float
    utility_ok: bool
    privacy_ok: bool
    recommended: bool = False

    def as_dict(self) -> dict:
        return {
            "program": self.program,
            "sigma": self.sigma,
            "delta": self.delta,
            "bayes_vulnerability": round(self.bayes_vulnerability, 12),
            "error_bound_probability": round(self.error_bound, 12),
            "utility_ok": self.utility_ok,
            "privacy_ok": self.privacy_ok,
            "recommended": self.recommended,
        }


def tradeoff_frontier(
    linear_vulnerability: float,
    noisy_vulnerabilities: Mapping[float, float],
    deltas: Sequence[float] = DEFAULT_DELTAS,
    utility_threshold: float = DEFAULT_UTILITY_THRESHOLD,
    vulnerability_threshold: float = 0.35,
    enforce_privacy: bool = False,
) -> list[FrontierRow]:
    """One row per (score program, sigma, delta).

    For each delta the recommended row is the least vulnerable one that meets
    the utility threshold (and the vulnerability threshold when
    ``enforce_privacy`` is set). The noiseless score has error bound 1.
    """
    rows = []
    for delta in deltas:
        block = [(LINEAR_SCORE, None, linear_vulnerability, 1.0)]
        for sigma in sorted(noisy_vulnerabilities):
            eb = error_bound_probability(NoiseSpec(sigma), delta)
            block.append((NOISY_SCORE, sigma, noisy_vulnerabilities[sigma], eb))
        built = [
            FrontierRow(p, s, delta, v, eb, eb >= utility_threshold, v <= vulnerability_threshold)
            for p, s, v, eb in block
        ]
        eligible = [r for r in built if r.utility_ok and (r.privacy_ok or not enforce_privacy)]
        if eligible:
            pick = min(eligible, key=lambda r: (r.bayes_vulnerability, -r.error_bound))
            built = [FrontierRow(**{**r.__dict__, "recommended": r is pick}) for r in built]
        rows.extend(built)
    return rows


def recommended(rows: Sequence[FrontierRow], delta: float) -> FrontierRow | None:
    for r in rows:
        if r.delta == delta and r.recommended:
            return r
    return None
