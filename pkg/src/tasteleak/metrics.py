"""Privacy risk metrics over a joint p(ethnicity, output)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .inference import JointDistribution, PosteriorSlice, condition_on_output, format_output
from .population import ETHNICITIES

DEFAULT_VULNERABILITY_THRESHOLD = 0.35


def output_privacy_heatmap(j: JointDistribution) -> list[PosteriorSlice]:
    """Posterior p(E | O=v) for every output with non-zero probability."""
    pv = j.output_marginal
    return [condition_on_output(j, v) for v, p in zip(j.outputs, pv) if p > 0]


def conditional_table(j: JointDistribution) -> tuple[tuple, np.ndarray]:
    """Observable outputs and the (4, n) matrix of p(E=e | O=v)."""
    pv = j.output_marginal
    keep = pv > 0
    outputs = tuple(v for v, k in zip(j.outputs, keep) if k)
    return outputs, j.table[:, keep] / pv[keep]


def program_privacy(j: JointDistribution) -> np.ndarray:
    j.check_invariants(prior_marginals=False)
    return j.table


@dataclass(frozen=True)
class MaxOutputPrivacy:
    score: float
    witnesses: tuple  # (ethnicity, output) pairs attaining the maximum


def max_output_privacy(j: JointDistribution) -> MaxOutputPrivacy:
    outputs, cond = conditional_table(j)
    best = float(cond.max())
    rows, cols = np.nonzero(cond >= best * (1 - 1e-12))
    return MaxOutputPrivacy(best, tuple((ETHNICITIES[r], outputs[c]) for r, c in zip(rows, cols)))


def bayes_vulnerability(j: JointDistribution) -> float:
    """Expected probability of guessing the ethnicity after seeing the output."""
    return float(j.table.max(axis=0).sum())


@dataclass(frozen=True)
class RiskReport:
    program: str
    sigma: float | None
    slices: list
    joint: JointDistribution
    max_output_privacy: MaxOutputPrivacy
    bayes_vulnerability: float
    threshold: float

    @property
    def exceeds_threshold(self) -> bool:
        return self.bayes_vulnerability > self.threshold

    def summary(self) -> dict:
        return {
            "program": self.program,
            "sigma": self.sigma,
            "bayes_vulnerability": round(self.bayes_vulnerability, 12),
            "max_output_privacy": round(self.max_output_privacy.score, 12),
            "max_output_privacy_witnesses": [
                {"ethnicity": e, "output": format_output(v)} for e, v in self.max_output_privacy.witnesses
            ],
            "vulnerability_threshold": self.threshold,
            "exceeds_threshold": self.exceeds_threshold,
            "n_outputs": len(self.slices),
        }


def risk_report(j: JointDistribution, threshold: float = DEFAULT_VULNERABILITY_THRESHOLD) -> RiskReport:
    return RiskReport(
        program=j.program,
        sigma=j.provenance.get("sigma"),
        slices=output_privacy_heatmap(j),
        joint=j,
        max_output_privacy=max_output_privacy(j),
        bayes_vulnerability=bayes_vulnerability(j),
        threshold=threshold,
    )
