"""Privacy risk (ethnicity inference) and utility of genetic-data disclosure programs."""

from .errors import ConfigError, InvariantViolation, UnobservableOutputError
from .inference import (
    JointDistribution,
    PosteriorSlice,
    condition_on_output,
    exact_joint,
    monte_carlo_joint,
)
from .metrics import (
    bayes_vulnerability,
    max_output_privacy,
    output_privacy_heatmap,
    program_privacy,
    risk_report,
)
from .population import (
    ETHNICITIES,
    HAPLOTYPES,
    CategoricalDistribution,
    Genotype,
    HaplotypePair,
    PopulationTable,
    ethnicity_prior,
    load_population_table,
    pair_distribution,
    prior_joint_heatmap,
)
from .programs import (
    LINEAR_SCORE,
    NOISY_SCORE,
    PHENOTYPE_R16,
    PHENOTYPE_R38,
    NoiseSpec,
    WeightConfig,
    linear_score,
    load_weight_config,
    noisy_score_density,
    sample_noisy_score,
    taster_phenotype_r16,
    taster_phenotype_r38,
)
from .utility import abs_difference_distribution, error_bound_probability, tradeoff_frontier

__version__ = "0.1.0"

__all__ = [
    "CategoricalDistribution",
    "ConfigError",
    "ETHNICITIES",
    "Genotype",
    "HAPLOTYPES",
    "HaplotypePair",
    "InvariantViolation",
    "JointDistribution",
    "LINEAR_SCORE",
    "NOISY_SCORE",
    "NoiseSpec",
    "PHENOTYPE_R16",
    "PHENOTYPE_R38",
    "PopulationTable",
    "PosteriorSlice",
    "UnobservableOutputError",
    "WeightConfig",
    "abs_difference_distribution",
    "bayes_vulnerability",
    "condition_on_output",
    "error_bound_probability",
    "ethnicity_prior",
    "exact_joint",
    "linear_score",
    "load_population_table",
    "load_weight_config",
    "max_output_privacy",
    "monte_carlo_joint",
    "noisy_score_density",
    "output_privacy_heatmap",
    "pair_distribution",
    "prior_joint_heatmap",
    "program_privacy",
    "risk_report",
    "sample_noisy_score",
    "taster_phenotype_r16",
    "taster_phenotype_r38",
    "tradeoff_frontier",
]
