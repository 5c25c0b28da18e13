"""Exact joint p(ethnicity, output) by enumeration, conditioning, and a
forward Monte Carlo sampler used as an independent cross-check."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Hashable

import numpy as np

from . import kernels
from .errors import InvariantViolation, UnobservableOutputError
from .population import (
    ETHNICITIES,
    HAPLOTYPES,
    R16,
    R38,
    CategoricalDistribution,
    Genotype,
    PopulationTable,
    canonical_pairs,
    ethnicity_prior,
    pair_probabilities,
)
from .programs import (
    NOISY_SCORE,
    PROGRAMS,
    NoiseSpec,
    WeightConfig,
    add_rounded_noise,
    deterministic_output,
    format_centi,
    noise_kernel,
)

SUM_TOL = 1e-9
N_ETH = len(ETHNICITIES)

Program = str | Callable[[Genotype], Hashable]


def format_output(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return format_centi(int(v))
    return str(v)


def _sorted_outputs(values) -> list:
    uniq = list(dict.fromkeys(values))
    try:
        return sorted(uniq)
    except TypeError:
        return uniq


@dataclass(frozen=True)
class JointDistribution:
    """Dense table p(e, o); rows follow ``ETHNICITIES``, columns ``outputs``."""

    outputs: tuple
    table: np.ndarray
    provenance: dict = field(default_factory=dict)
    counts: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.float64)
        if t.shape != (N_ETH, len(self.outputs)):
            raise ValueError(f"table shape {t.shape} does not match {N_ETH} x {len(self.outputs)}")
        t.setflags(write=False)
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.outputs)})

    @property
    def program(self) -> str:
        return self.provenance.get("program", "custom")

    @property
    def output_marginal(self) -> np.ndarray:
        return self.table.sum(axis=0)

    @property
    def ethnicity_marginal(self) -> np.ndarray:
        return self.table.sum(axis=1)

    @property
    def samples(self) -> int | None:
        return None if self.counts is None else int(self.counts.sum())

    def index_of(self, v) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnobservableOutputError(f"output {format_output(v)} is not in the output alphabet") from None

    def p(self, ethnicity: str, v) -> float:
        return float(self.table[ETHNICITIES.index(ethnicity), self.index_of(v)])

    def p_output(self, v) -> float:
        return float(self.output_marginal[self.index_of(v)])

    def standard_errors(self) -> np.ndarray:
        """Per-cell binomial standard error sqrt(p(1-p)/N) of an empirical joint."""
        if self.counts is None:
            raise ValueError("standard errors are only defined for Monte Carlo joints")
        n = self.samples
        return np.sqrt(self.table * (1.0 - self.table) / n)

    def check_invariants(self, prior_marginals: bool = True, tol: float = SUM_TOL) -> None:
        t = self.table
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise InvariantViolation(f"{self.program}: negative or non-finite probability")
        total = t.sum()
        if abs(total - 1.0) > tol:
            raise InvariantViolation(f"{self.program}: joint sums to {total!r}")
        if prior_marginals:
            dev = np.abs(self.ethnicity_marginal - ethnicity_prior().probs).max()
            if dev > tol:
                raise InvariantViolation(f"{self.program}: ethnicity marginal off prior by {dev:.3g}")

    def to_csv(self) -> str:
        """Rows are ethnicities, columns the outputs in ascending order."""
        buf = io.StringIO()
        buf.write(",".join(["ethnicity"] + [format_output(v) for v in self.outputs]) + "\n")
        for e, name in enumerate(ETHNICITIES):
            buf.write(",".join([name] + [f"{x:.6f}" for x in self.table[e]]) + "\n")
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "provenance": dict(self.provenance),
            "ethnicities": list(ETHNICITIES),
            "outputs": [format_output(v) for v in self.outputs],
            "table": [[round(float(x), 12) for x in row] for row in self.table],
        }


@dataclass(frozen=True)
class PosteriorSlice:
    output: Hashable
    posterior: CategoricalDistribution
    p_output: float


def _program_id(program: Program) -> str:
    if callable(program):
        return getattr(program, "__name__", "custom")
    if program not in PROGRAMS:
        raise ValueError(f"unknown program {program!r}, expected one of {PROGRAMS}")
    return program


def _check_args(program: Program, weights, noise):
    if program == NOISY_SCORE:
        if noise is None:
            raise ValueError("noisy_score requires a NoiseSpec")
    elif noise is not None:
        raise ValueError(f"a NoiseSpec only applies to {NOISY_SCORE}")


def _genotype_outputs(program: Program, weights: WeightConfig | None):
    pairs38, pairs16 = canonical_pairs(R38), canonical_pairs(R16)
    outs = []
    for a in pairs38:
        for b in pairs16:
            g = Genotype(a, b)
            outs.append(program(g) if callable(program) else deterministic_output(program, g, weights))
    return outs


def _provenance(program: Program, weights, noise, method: str, **extra) -> dict:
    prov = {"program": _program_id(program), "method": method}
    if weights is not None:
        prov["weights"] = weights.digest()
    if noise is not None:
        prov["sigma"] = noise.sigma
    prov.update(extra)
    return prov


def exact_joint(
    table: PopulationTable,
    program: Program,
    weights: WeightConfig | None = None,
    noise: NoiseSpec | None = None,
) -> JointDistribution:
    """Push the attacker prior through ``program`` by exhaustive enumeration.

    Atoms are (ethnicity, unordered r38 pair, unordered r16 pair); the noisy
    score is handled analytically by spreading each score's mass over the
    binned Gaussian kernel.
    """
    _check_args(program, weights, noise)
    prior = ethnicity_prior().probs
    outs = _genotype_outputs(program, weights)
    alphabet = _sorted_outputs(outs)
    col = {v: i for i, v in enumerate(alphabet)}
    out_idx = np.array([col[v] for v in outs], dtype=np.int64)

    n_geno = len(outs)
    eth = np.repeat(np.arange(N_ETH), n_geno)
    probs = np.concatenate([
        prior[e] * np.outer(
            pair_probabilities(table.row(e, R38)), pair_probabilities(table.row(e, R16))
        ).ravel()
        for e in range(N_ETH)
    ])
    joint = kernels.scatter_joint(eth, np.tile(out_idx, N_ETH), probs, N_ETH, len(alphabet))

    if noise is not None:
        offsets, masses = noise_kernel(noise)
        scores = np.array(alphabet, dtype=np.int64)
        lo = int(scores[0] + offsets[0])
        width = int(scores[-1] - scores[0]) + len(offsets)
        smeared = kernels.smear(joint, scores - scores[0], masses, width)
        keep = smeared.sum(axis=0) > 0
        alphabet = (np.arange(width, dtype=np.int64)[keep] + lo).tolist()
        joint = smeared[:, keep]

    return JointDistribution(tuple(alphabet), joint, _provenance(program, weights, noise, "exact"))


def condition_on_output(j: JointDistribution, v) -> PosteriorSlice:
    col = j.table[:, j.index_of(v)]
    pv = float(col.sum())
    if pv <= 0:
        raise UnobservableOutputError(f"output {format_output(v)} has zero probability; posterior undefined")
    return PosteriorSlice(v, CategoricalDistribution(ETHNICITIES, col / pv), pv)


def _pair_lookup(gene: str) -> np.ndarray:
    n = len(HAPLOTYPES[gene])
    lut = np.empty((n, n), dtype=np.int64)
    for k, p in enumerate(canonical_pairs(gene)):
        lut[p.first, p.second] = lut[p.second, p.first] = k
    return lut


def monte_carlo_joint(
    table: PopulationTable,
    program: Program,
    weights: WeightConfig | None = None,
    noise: NoiseSpec | None = None,
    samples: int = 100_000,
    seed: int = 0,
) -> JointDistribution:
    """Empirical joint from ancestral sampling of (ethnicity, haplotypes, noise).

    Deterministic for a given seed. The result carries integer ``counts``.
    """
    _check_args(program, weights, noise)
    if isinstance(samples, bool) or not isinstance(samples, (int, np.integer)) or samples < 1:
        raise ValueError(f"sample count must be a positive integer, got {samples!r}")
    rng = np.random.default_rng(seed)
    eth = rng.integers(0, N_ETH, size=samples)
    u = rng.random((samples, 4))
    cdf38 = np.cumsum(table.freqs[R38], axis=1)
    cdf16 = np.cumsum(table.freqs[R16], axis=1)
    h = [kernels.categorical_draws(u[:, i], eth, cdf38 if i < 2 else cdf16) for i in range(4)]
    geno = _pair_lookup(R38)[h[0], h[1]] * len(canonical_pairs(R16)) + _pair_lookup(R16)[h[2], h[3]]

    outs = _genotype_outputs(program, weights)
    if noise is not None:
        scores = np.array(outs, dtype=np.int64)[geno]
        observed = add_rounded_noise(scores, noise, rng)
        alphabet = np.unique(observed)
        out_idx = np.searchsorted(alphabet, observed)
        alphabet = alphabet.tolist()
    else:
        alphabet = _sorted_outputs(outs[g] for g in np.unique(geno))
        col = {v: i for i, v in enumerate(alphabet)}
        geno_col = np.array([col.get(v, -1) for v in outs], dtype=np.int64)
        out_idx = geno_col[geno]

    counts = kernels.count_cells(eth, out_idx, N_ETH, len(alphabet))
    prov = _provenance(program, weights, noise, "monte_carlo", samples=int(samples), seed=seed)
    return JointDistribution(tuple(alphabet), counts / samples, prov, counts=counts)


def align(a: JointDistribution, b: JointDistribution) -> tuple[tuple, np.ndarray, np.ndarray]:
    """Both tables over the union of their output alphabets."""
    alphabet = tuple(_sorted_outputs(list(a.outputs) + list(b.outputs)))
    col = {v: i for i, v in enumerate(alphabet)}
    ta = np.zeros((N_ETH, len(alphabet)))
    tb = np.zeros((N_ETH, len(alphabet)))
    ta[:, [col[v] for v in a.outputs]] = a.table
    tb[:, [col[v] for v in b.outputs]] = b.table
    return alphabet, ta, tb


def total_variation(a: JointDistribution, b: JointDistribution) -> float:
    _, ta, tb = align(a, b)
    return 0.5 * float(np.abs(ta - tb).sum())


def crosscheck_scores(exact: JointDistribution, empirical: JointDistribution) -> np.ndarray:
    """Per-cell |empirical - exact| in standard-error units.

    The empirical standard error degenerates to zero on empty cells, so the
    larger of the empirical and exact-probability errors is used, floored at
    one count (1/N).
    """
    if exact.program != empirical.program:
        raise ValueError(f"program mismatch: {exact.program} vs {empirical.program}")
    n = empirical.samples
    if n is None:
        raise ValueError("second joint must be a Monte Carlo joint")
    _, te, tm = align(exact, empirical)
    var = np.maximum(te * (1.0 - te), tm * (1.0 - tm)) / n
    se = np.maximum(np.sqrt(var), 1.0 / n)
    return np.abs(tm - te) / se
