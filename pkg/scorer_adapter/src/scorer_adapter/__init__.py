"""scorer-adapter: perplexity correlate scoring for workbench dataset files."""

__version__ = "0.1.0"

from .models import BUILTIN_MODEL_ID, ModelUnavailableError, load_model
from .scoring import ScoreFile, load_score_file, merge_scores, save_score_file, score_perplexity

__all__ = [
    "BUILTIN_MODEL_ID",
    "ModelUnavailableError",
    "load_model",
    "ScoreFile",
    "load_score_file",
    "merge_scores",
    "save_score_file",
    "score_perplexity",
]
