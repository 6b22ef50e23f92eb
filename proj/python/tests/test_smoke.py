import json
import math
from pathlib import Path

import pytest

import lyra

FIXTURES = Path(__file__).resolve().parents[2] / "tests" / "fixtures"


def test_identity_scores():
    pairs = [("le chat dort .", "le chat dort ."), ("la mer", "la mer")]
    assert lyra.score("bleu", pairs)["corpus_value"] == 100.0
    assert lyra.score("chrf++", pairs)["corpus_value"] == 100.0
    meteor = lyra.score("meteor", [("le chat dort .", "le chat dort .")])["corpus_value"]
    assert math.isclose(meteor, 1 - 0.5 / 4**3, abs_tol=1e-12)


def test_sentence_bleu_short_hypothesis():
    assert math.isclose(lyra.sentence_bleu("the cat sat", "the cat sat on the mat"),
                        100 * math.exp(-1), abs_tol=1e-9)


def test_standardize_numbers_and_ellipsis():
    text, hits = lyra.standardize_text("19 sous-officiers et 97 hommes", "fr")
    assert text == "dix-neuf sous-officiers et quatre vingt dix-sept hommes."
    assert hits["digits"] == 1 and hits["final_period"] == 1
    assert lyra.spell_number_fr(71) == "soixante et onze"


def test_index_round_trip(tmp_path):
    texts = ["le chat dort", "la mer est belle", "le port attend"]
    vecs = [lyra.fallback_embed(t, 32) for t in texts]
    idx = lyra.EmbeddingIndex.build(["a", "b", "c"], vecs, "fallback-trigram-32")
    hits = idx.query(lyra.fallback_embed("le chat dort", 32), 2)
    assert hits[0][0] == "a"
    assert math.isclose(hits[0][1], 1.0, abs_tol=1e-6)
    idx.save(tmp_path / "i.lyra")
    again = lyra.EmbeddingIndex.load(tmp_path / "i.lyra")
    assert len(again) == 3 and again.dim == 32 and again.model == "fallback-trigram-32"


def test_manifest_values():
    assert lyra.training_manifest("LYRA-G")["learning_rate"] == 3e-5
    nllb = lyra.training_manifest("NLLB")
    assert (nllb["learning_rate"], nllb["batch_size"]) == (1e-5, 32)
    with pytest.raises(lyra.LyraError):
        lyra.training_manifest("GPT")


def test_table2_bold():
    cells = json.loads((FIXTURES / "table2_cells.json").read_text())["cells"]
    _, table = lyra.score_table(cells, "chrfpp")
    bold = [c["value"] for r in table["rows"] for c in r["cells"] if c["bold"]]
    assert sorted(bold) == [57.90, 71.89]


def test_prompt_and_corpus():
    rows = lyra.load_corpus(FIXTURES / "corpus50.jsonl")
    assert len(rows) == 50 and rows[0]["id"] == "fx-001"
    prompt = lyra.render_prompt("Bonjour", "fr-mo", [(rows[0]["fr"], rows[0]["mo"])])
    assert prompt.endswith("French: Bonjour\nMonégasque:")
