"""Spoken-number grammar, corpus curation, scoring and model descriptors
for small closed-vocabulary digit recognizers."""

from .grammar import (
    VOCABULARY,
    OutOfVocabulary,
    ParsePolicy,
    Token,
    canonical_verbalization,
    parse,
    tokenize,
    verbalizations,
)
from .evaluation import align, corpus_wer, rtf, wer
from .constrained_decode import constrained_transcript, snap_to_vocab
from .model_spec import build_network, emit_config, param_count, parse_config

__version__ = "0.1.0"
