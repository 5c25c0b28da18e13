"""Disclosure programs: taster phenotypes, the linear polygenic score and its
noise-perturbed variant.

Scores are carried as integers. Weights live in milli-score units and the
disclosed score in centi-score units (``931`` means 9.31), so no float ever
ends up as a table key.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from .errors import ConfigError
from .population import GENES, HAPLOTYPES, R16, R38, CategoricalDistribution, Genotype, HaplotypePair

TASTER = "taster"
NON_TASTER = "non-taster"

PHENOTYPE_R38 = "phenotype_r38"
PHENOTYPE_R16 = "phenotype_r16"
LINEAR_SCORE = "linear_score"
NOISY_SCORE = "noisy_score"
PROGRAMS = (PHENOTYPE_R38, PHENOTYPE_R16, LINEAR_SCORE, NOISY_SCORE)
DETERMINISTIC_PROGRAMS = (PHENOTYPE_R38, PHENOTYPE_R16, LINEAR_SCORE)

# Support of the binned noise density is cut at this many standard deviations.
# The dropped tail (~5.6e-10) stays below the 1e-9 interval-mass tolerance.
TRUNCATION_SIGMAS = 6.2


@dataclass(frozen=True)
class WeightConfig:
    """Per-haplotype milli-score weights and per-gene rational coefficients.

    The genotype weight of a pair is ``alpha[gene] * (w[h0] + w[h1])``.
    """

    haplotype_weights: dict
    alpha: dict

    def __post_init__(self):
        for g in GENES:
            ws = self.haplotype_weights.get(g)
            if ws is None or len(ws) != len(HAPLOTYPES[g]):
                raise ConfigError(f"weights.{g}: need one weight per haplotype {list(HAPLOTYPES[g])}")
            if g not in self.alpha:
                raise ConfigError(f"weights.alpha.{g}: missing gene coefficient")

    def genotype_weight(self, pair: HaplotypePair) -> Fraction:
        ws = self.haplotype_weights[pair.gene]
        return self.alpha[pair.gene] * (ws[pair.first] + ws[pair.second])

    def milli_score(self, g: Genotype) -> Fraction:
        return self.genotype_weight(g.r38) + self.genotype_weight(g.r16)

    def digest(self) -> str:
        payload = json.dumps(weights_to_dict(self), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def weights_from_dict(doc) -> WeightConfig:
    errors = []
    hw = doc.get("haplotype_weights", {}) if isinstance(doc, dict) else {}
    alpha_doc = doc.get("alpha", {}) if isinstance(doc, dict) else {}
    weights, alpha = {}, {}
    for g in GENES:
        table = hw.get(g)
        if not isinstance(table, dict):
            errors.append(f"weights.haplotype_weights.{g}: missing table")
            continue
        row = []
        for h in HAPLOTYPES[g]:
            v = table.get(h)
            if isinstance(v, bool) or not isinstance(v, int):
                errors.append(f"weights.haplotype_weights.{g}.{h}: integer milli-weight required")
                continue
            row.append(v)
        weights[g] = tuple(row)
        try:
            alpha[g] = Fraction(str(alpha_doc.get(g, "1")))
        except (ValueError, ZeroDivisionError):
            errors.append(f"weights.alpha.{g}: not a rational number")
    if errors:
        raise ConfigError("; ".join(errors), errors)
    return WeightConfig(weights, alpha)


def weights_to_dict(w: WeightConfig) -> dict:
    return {
        "units": "milli-score",
        "alpha": {g: str(w.alpha[g]) for g in GENES},
        "haplotype_weights": {
            g: dict(zip(HAPLOTYPES[g], w.haplotype_weights[g])) for g in GENES
        },
    }


def load_weight_config(source=None) -> WeightConfig:
    if isinstance(source, dict):
        return weights_from_dict(source)
    if source is None or source == "builtin":
        text = resources.files("tasteleak.data").joinpath("weights.json").read_text("utf-8")
    else:
        try:
            text = Path(source).read_text("utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read weight config {source}: {exc}") from exc
    try:
        return weights_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"weight config is not valid JSON: {exc}") from exc


def zero_weights() -> WeightConfig:
    return WeightConfig({g: (0,) * len(HAPLOTYPES[g]) for g in GENES}, {g: Fraction(1) for g in GENES})


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float

    def __post_init__(self):
        s = self.sigma
        if isinstance(s, bool) or not isinstance(s, (int, float)) or not math.isfinite(s) or s <= 0:
            raise ValueError(f"sigma must be positive, got {s!r}")


def round_milli_to_centi(milli: Fraction | int) -> int:
    """Half-away-from-zero rounding of an exact milli value to centi units."""
    q = Fraction(milli) / 10
    mag = math.floor(abs(q) + Fraction(1, 2))
    return mag if q >= 0 else -mag


def format_centi(v: int) -> str:
    sign = "-" if v < 0 else ""
    return f"{sign}{abs(v) // 100}.{abs(v) % 100:02d}"


def parse_centi(text: str) -> int:
    return round_milli_to_centi(Fraction(text) * 1000)


def taster_phenotype_r38(pair: HaplotypePair) -> str:
    avi = HAPLOTYPES[R38].index("AVI")
    return NON_TASTER if pair.first == avi and pair.second == avi else TASTER


def taster_phenotype_r16(pair: HaplotypePair) -> str:
    cd = HAPLOTYPES[R16].index("HAP-CD")
    return NON_TASTER if pair.first == cd and pair.second == cd else TASTER


def linear_score(g: Genotype, w: WeightConfig) -> int:
    """Polygenic score in centi units, e.g. ``931`` for 9.31."""
    return round_milli_to_centi(w.milli_score(g))


def noise_kernel(noise: NoiseSpec) -> tuple[np.ndarray, np.ndarray]:
    """Binned zero-mean Gaussian on the centi grid.

    Returns offsets ``-D..D`` (centi units) and their renormalised masses, with
    ``D`` the largest offset whose bin centre lies within the truncation
    radius. The dropped tail is below 1e-9.
    """
    sd = noise.sigma * 100.0
    reach = int(math.floor(TRUNCATION_SIGMAS * sd * (1 + 1e-12)))
    d = np.arange(0, reach + 1, dtype=np.float64)
    # upper-tail differences keep precision far from the mode
    half = ndtr(-(d - 0.5) / sd) - ndtr(-(d + 0.5) / sd)
    masses = np.concatenate([half[:0:-1], half])
    masses /= masses.sum()
    return np.arange(-reach, reach + 1, dtype=np.int64), masses


def noisy_score_density(g: Genotype, w: WeightConfig, noise: NoiseSpec) -> CategoricalDistribution:
    """Exact distribution of the disclosed noisy score for one genotype.

    Noise is added to the already-rounded score and the sum is rounded again
    to two decimals.
    """
    offsets, masses = noise_kernel(noise)
    return CategoricalDistribution(tuple((linear_score(g, w) + offsets).tolist()), masses)


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def add_rounded_noise(centi: np.ndarray, noise: NoiseSpec, rng: np.random.Generator) -> np.ndarray:
    nu = rng.normal(0.0, noise.sigma, size=np.shape(centi))
    return _round_half_away(np.asarray(centi, dtype=np.float64) + 100.0 * nu)


def sample_noisy_score(g: Genotype, w: WeightConfig, noise: NoiseSpec, seed, size=None):
    """Draw the noisy score (centi units); an int when ``size`` is None."""
    rng = np.random.default_rng(seed)
    base = np.full(1 if size is None else size, linear_score(g, w), dtype=np.int64)
    draws = add_rounded_noise(base, noise, rng)
    return int(draws[0]) if size is None else draws


def deterministic_output(program: str, g: Genotype, w: WeightConfig | None = None):
    if program == PHENOTYPE_R38:
        return taster_phenotype_r38(g.r38)
    if program == PHENOTYPE_R16:
        return taster_phenotype_r16(g.r16)
    if program in (LINEAR_SCORE, NOISY_SCORE):
        if w is None:
            raise ConfigError(f"program {program} requires a weight config")
        return linear_score(g, w)
    raise ValueError(f"unknown program {program!r}, expected one of {PROGRAMS}")
