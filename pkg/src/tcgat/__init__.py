"""Temporal-causal token labeling with relation-typed graph attention."""

from .corpus import (AnnotatedSentence, CorpusError, CorpusStats,
                     corpus_stats, dump_corpus, parse_corpus, split_corpus,
                     validate_record)
from .graphs import (CausalKG, TimeMatrices, build_causal_kg,
                     build_time_matrices, sentence_causal_adj)
from .autodiff import Tensor, grad_check
from .config import ConfigError, TrainConfig, load_config
from .metrics import EvalReport, build_report, macro_f1
from .model import ModelConfig, TCGATModel, VARIANTS
from .synth import GeneratorConfig, generate_synthetic
from .training import (NumericalError, TrainResult, evaluate, load_model,
                       run_ablation, train)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSentence", "CausalKG", "ConfigError", "CorpusError",
    "CorpusStats", "EvalReport", "GeneratorConfig", "ModelConfig",
    "NumericalError", "TCGATModel", "Tensor", "TimeMatrices", "TrainConfig",
    "TrainResult", "VARIANTS", "build_causal_kg", "build_report",
    "build_time_matrices", "corpus_stats", "dump_corpus", "evaluate",
    "generate_synthetic", "grad_check", "load_config", "load_model",
    "macro_f1", "parse_corpus", "run_ablation", "sentence_causal_adj",
    "split_corpus", "train", "validate_record",
]
