"""refaudit: a meta-evaluation workbench that audits reference-free NLG
metrics against spurious correlates (word overlap, length, perplexity) and
demonstrates adversarial debiasing of a faithfulness scorer at desk scale."""

__version__ = "0.1.0"

from .corpus import Dataset, ExampleRecord, TokenSequence, load_dataset, save_dataset, tokenize
from .overlap import FragmentSet, annotate_correlates, coverage, density, extract_fragments
from .stats import (
    BootstrapResult,
    PairedSample,
    bootstrap_mean,
    bootstrap_one_tailed_test,
    pearson,
    spearman,
)

__all__ = [
    "Dataset",
    "ExampleRecord",
    "TokenSequence",
    "load_dataset",
    "save_dataset",
    "tokenize",
    "FragmentSet",
    "annotate_correlates",
    "coverage",
    "density",
    "extract_fragments",
    "BootstrapResult",
    "PairedSample",
    "bootstrap_mean",
    "bootstrap_one_tailed_test",
    "pearson",
    "spearman",
]
