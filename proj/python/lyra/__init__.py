"""French/Monégasque translation toolkit: metrics, standardization, retrieval and reports."""

import json

from ._lyra import (
    EmbeddingIndex,
    LyraError,
    cosine_similarity,
    fallback_embed,
    load_corpus,
    render_prompt,
    score,
    sentence_bleu,
    spell_number_fr,
    standardize_text,
    tokenize,
)
from . import _lyra

__all__ = [
    "EmbeddingIndex",
    "LyraError",
    "cosine_similarity",
    "fallback_embed",
    "load_corpus",
    "render_prompt",
    "run_experiment",
    "score",
    "score_table",
    "sentence_bleu",
    "spell_number_fr",
    "standardize_text",
    "tokenize",
    "training_manifest",
]


def training_manifest(label):
    """Fine-tuning recipe for LYRA-L, LYRA-G, LYRA-M or NLLB as a dict."""
    return json.loads(_lyra.training_manifest_json(label))


def score_table(cells, layout="bleu_meteor"):
    """Render report cells; returns (text, table dict)."""
    text, table = _lyra.score_table(json.dumps(cells), layout)
    return text, json.loads(table)


def run_experiment(config_path, write=True):
    """Run an experiment config and return its record as a dict."""
    return json.loads(_lyra.run_experiment_json(str(config_path), write))
