"""Ethnicities, haplotypes, population frequencies and the attacker prior."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError

ETHNICITIES = ("African", "Asian", "European", "American")
R38 = "TAS2R38"
R16 = "TAS2R16"
HAPLOTYPES = {
    R38: ("PAV", "AVI", "AAV", "AVV", "PAI", "PVI", "AAI", "PVV"),
    R16: ("HAP-CD", "HAP-A", "HAP-B"),
}
GENES = (R38, R16)

ROW_SUM_TOLERANCE = 0.01
SUM_TOL = 1e-9


def ethnicity_index(label: str | int) -> int:
    if isinstance(label, (int, np.integer)):
        if not 0 <= label < len(ETHNICITIES):
            raise ValueError(f"ethnicity index out of range: {label}")
        return int(label)
    try:
        return ETHNICITIES.index(label)
    except ValueError:
        raise ValueError(f"unknown ethnicity: {label!r}") from None


def _check_gene(gene: str) -> str:
    if gene not in HAPLOTYPES:
        raise ValueError(f"unknown gene {gene!r}, expected one of {GENES}")
    return gene


@dataclass(frozen=True)
class CategoricalDistribution:
    """Finite distribution over an ordered label list.

    Probabilities are renormalised on construction; negative entries or a
    zero total are rejected.
    """

    labels: tuple
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or len(p) != len(self.labels):
            raise ValueError("labels and probabilities must have equal length")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and non-negative")
        total = p.sum()
        if total <= 0:
            raise ValueError("distribution has zero total mass")
        p = p / total
        p.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "probs", p)

    def __getitem__(self, label) -> float:
        return float(self.probs[self.labels.index(label)])

    def __len__(self) -> int:
        return len(self.labels)

    def items(self):
        return zip(self.labels, self.probs.tolist())

    def argmax(self) -> list:
        """All labels attaining the maximum probability (ties included)."""
        m = self.probs.max()
        return [lab for lab, p in zip(self.labels, self.probs) if p == m]


@dataclass(frozen=True)
class HaplotypePair:
    """Unordered pair of haplotype indices of one gene, stored sorted."""

    gene: str
    first: int
    second: int

    @classmethod
    def of(cls, gene: str, a: str | int, b: str | int) -> "HaplotypePair":
        labels = HAPLOTYPES[_check_gene(gene)]
        ia = labels.index(a) if isinstance(a, str) else int(a)
        ib = labels.index(b) if isinstance(b, str) else int(b)
        for i in (ia, ib):
            if not 0 <= i < len(labels):
                raise ValueError(f"haplotype index out of range for {gene}: {i}")
        lo, hi = (ia, ib) if ia <= ib else (ib, ia)
        return cls(gene, lo, hi)

    @classmethod
    def parse(cls, gene: str, text: str) -> "HaplotypePair":
        """Parse ``"PAV/AVI"``-style text. HAP-xx labels contain dashes, not slashes."""
        a, b = text.split("/")
        return cls.of(gene, a.strip(), b.strip())

    @property
    def labels(self) -> tuple[str, str]:
        hs = HAPLOTYPES[self.gene]
        return hs[self.first], hs[self.second]

    def canonical(self) -> "HaplotypePair":
        return HaplotypePair.of(self.gene, self.first, self.second)

    def __str__(self) -> str:
        return "/".join(self.labels)


@dataclass(frozen=True)
class Genotype:
    r38: HaplotypePair
    r16: HaplotypePair

    @classmethod
    def parse(cls, r38: str, r16: str) -> "Genotype":
        return cls(HaplotypePair.parse(R38, r38), HaplotypePair.parse(R16, r16))

    def __str__(self) -> str:
        return f"{self.r38} {self.r16}"


def canonical_pairs(gene: str) -> list[HaplotypePair]:
    """Every unordered pair of a gene, in lexicographic index order."""
    n = len(HAPLOTYPES[_check_gene(gene)])
    return [HaplotypePair(gene, i, j) for i in range(n) for j in range(i, n)]


@dataclass(frozen=True)
class PopulationTable:
    """Per-ethnicity haplotype frequencies for both genes.

    ``raw`` keeps the document values; ``freqs`` holds the renormalised rows
    used everywhere downstream. Arrays have shape (n_ethnicities, n_haplotypes).
    """

    raw: dict
    freqs: dict

    def frequency(self, ethnicity, gene: str, haplotype: str, normalized: bool = True) -> float:
        src = self.freqs if normalized else self.raw
        e = ethnicity_index(ethnicity)
        return float(src[_check_gene(gene)][e, HAPLOTYPES[gene].index(haplotype)])

    def row(self, ethnicity, gene: str) -> np.ndarray:
        return self.freqs[_check_gene(gene)][ethnicity_index(ethnicity)]


def _validate_population_doc(doc) -> tuple[dict, list[str]]:
    errors: list[str] = []
    raw = {g: np.zeros((len(ETHNICITIES), len(HAPLOTYPES[g]))) for g in GENES}
    if not isinstance(doc, dict) or "frequencies" not in doc:
        return raw, ["population: missing 'frequencies' section"]
    genes = doc.get("genes", {})
    for g in GENES:
        if g in genes and tuple(genes[g]) != HAPLOTYPES[g]:
            errors.append(f"population.genes.{g}: haplotype labels must be {list(HAPLOTYPES[g])}")
    freqs = doc["frequencies"]
    for e, eth in enumerate(ETHNICITIES):
        if eth not in freqs:
            errors.append(f"population.frequencies.{eth}: missing ethnicity")
            continue
        for g in GENES:
            path = f"population.frequencies.{eth}.{g}"
            vec = freqs[eth].get(g)
            if isinstance(vec, dict):
                missing = [h for h in HAPLOTYPES[g] if h not in vec]
                if missing:
                    errors.append(f"{path}: missing haplotype entries {missing}")
                    continue
                vec = [vec[h] for h in HAPLOTYPES[g]]
            if vec is None:
                errors.append(f"{path}: missing gene vector")
                continue
            if len(vec) != len(HAPLOTYPES[g]):
                errors.append(f"{path}: expected {len(HAPLOTYPES[g])} entries, got {len(vec)}")
                continue
            try:
                row = np.array([float(x) for x in vec])
            except (TypeError, ValueError):
                errors.append(f"{path}: entries must be numbers")
                continue
            if np.any(row < 0) or not np.all(np.isfinite(row)):
                errors.append(f"{path}: negative or non-finite entry")
                continue
            total = row.sum()
            if abs(total - 1.0) > ROW_SUM_TOLERANCE:
                errors.append(f"{path}: row sum out of tolerance ({total:.4f} not in [0.99, 1.01])")
                continue
            raw[g][e] = row
    return raw, errors


def population_from_dict(doc) -> PopulationTable:
    raw, errors = _validate_population_doc(doc)
    if errors:
        raise ConfigError("; ".join(errors), errors)
    freqs = {}
    for g, arr in raw.items():
        norm = arr / arr.sum(axis=1, keepdims=True)
        norm.setflags(write=False)
        arr.setflags(write=False)
        freqs[g] = norm
    return PopulationTable(raw=raw, freqs=freqs)


def default_population_text() -> str:
    return resources.files("tasteleak.data").joinpath("population.json").read_text("utf-8")


def load_population_table(source: str | Path | dict | None = None) -> PopulationTable:
    """Load and validate a population config.

    ``source`` may be a parsed document, a path, or ``None``/``"builtin"`` for
    the bundled default frequencies.
    """
    if isinstance(source, dict):
        return population_from_dict(source)
    if source is None or source == "builtin":
        text = default_population_text()
    else:
        try:
            text = Path(source).read_text("utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read population config {source}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"population config is not valid JSON: {exc}") from exc
    return population_from_dict(doc)


def ethnicity_prior() -> CategoricalDistribution:
    return CategoricalDistribution(ETHNICITIES, np.full(len(ETHNICITIES), 1.0 / len(ETHNICITIES)))


def pair_probabilities(freq: np.ndarray) -> np.ndarray:
    """Unordered-pair probabilities for one frequency row, in canonical order."""
    n = len(freq)
    out = np.empty(n * (n + 1) // 2)
    k = 0
    for i in range(n):
        for j in range(i, n):
            out[k] = freq[i] * freq[j] if i == j else 2.0 * freq[i] * freq[j]
            k += 1
    return out


def pair_distribution(table: PopulationTable, ethnicity, gene: str) -> CategoricalDistribution:
    """Distribution of the unordered haplotype pair of ``gene`` given ethnicity.

    Two independent draws from the population row, collapsed so that the
    off-diagonal pair {a, b} carries 2 f(a) f(b).
    """
    probs = pair_probabilities(table.row(ethnicity, gene))
    return CategoricalDistribution(tuple(canonical_pairs(gene)), probs)


def prior_joint_heatmap(table: PopulationTable, gene: str) -> tuple[list[HaplotypePair], np.ndarray]:
    """Prior joint p(E=e, pair) as a (4, n_pairs) matrix."""
    prior = ethnicity_prior().probs
    pairs = canonical_pairs(gene)
    mat = np.stack([prior[e] * pair_probabilities(table.row(e, gene)) for e in range(len(ETHNICITIES))])
    return pairs, mat
