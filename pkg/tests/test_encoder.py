import math
import random

import pytest

from automlgpt.cards import DataCard
from automlgpt.encoder import (
    DIM,
    Embedding,
    HashEmbedder,
    card_text,
    embed_hash_v1,
    fnv1a64,
    similarity,
)
from automlgpt.errors import DimensionMismatch
from conftest import load_data_card
from gencards import random_data_card
from reference_fnv import ref_bag_cosine, ref_bucket, ref_fnv1a64


def nonzero_buckets(embedding: Embedding) -> set[int]:
    return {i for i, v in enumerate(embedding.values) if v != 0.0}


def test_hash_agrees_with_independent_reference():
    rng = random.Random(7)
    for _ in range(200):
        token = "".join(rng.choices("abcdefghijklmnopqrstuvwxyz0123456789", k=rng.randint(1, 12)))
        assert fnv1a64(token.encode()) == ref_fnv1a64(token.encode())


class TestCardText:
    def test_fixed_order_concatenation(self):
        card = DataCard(name="pets", input_type="image",
                        label_space=("cat", "dog"),
                        task_description="classify pets",
                        eval_metrics=("accuracy",), scale=5000)
        assert card_text(card) == "5000 classify pets cat dog image"

    def test_missing_scale_starts_at_task(self):
        card = DataCard(name="pets", input_type="image",
                        label_space=("cat", "dog"),
                        task_description="classify pets",
                        eval_metrics=("accuracy",))
        assert card_text(card) == "classify pets cat dog image"

    def test_equal_cards_equal_text(self):
        rng = random.Random(11)
        for _ in range(50):
            card = random_data_card(rng)
            assert card_text(card) == card_text(card)


class TestEmbedHashV1:
    def test_empty_text_is_zero_vector(self):
        emb = embed_hash_v1("")
        assert emb.is_zero
        assert len(emb.values) == DIM

    def test_repetition_does_not_change_direction(self):
        assert embed_hash_v1("cat cat") == embed_hash_v1("cat")

    def test_mass_lands_in_reference_buckets(self):
        # Bucket indices derived with the independent FNV-1a reference:
        # dog -> 233, cat -> 39 (no collision).
        assert ref_bucket("dog") == 233
        assert ref_bucket("cat") == 39
        emb = embed_hash_v1("dog cat")
        assert nonzero_buckets(emb) == {233, 39}
        assert emb.values[233] == pytest.approx(1 / math.sqrt(2))

    def test_unit_norm_or_zero(self):
        rng = random.Random(13)
        for _ in range(100):
            card = random_data_card(rng)
            emb = embed_hash_v1(card_text(card))
            assert emb.norm() == pytest.approx(1.0, abs=1e-9)


class TestSimilarity:
    def test_self_similarity_is_one(self):
        emb = embed_hash_v1("dog cat bird")
        assert similarity(emb, emb) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_tokens_zero(self):
        # Reference script confirms no bucket collision for this pair.
        assert ref_bucket("dog") != ref_bucket("cat")
        assert similarity(embed_hash_v1("dog"), embed_hash_v1("cat")) == 0.0

    def test_unseen_scenario_similarities(self):
        """The A/B fixture cards score exactly 0.6 and 0.4 against New."""
        new = embed_hash_v1(card_text(load_data_card("new")))
        a = embed_hash_v1(card_text(load_data_card("dataset_a")))
        b = embed_hash_v1(card_text(load_data_card("dataset_b")))
        assert similarity(new, a) == pytest.approx(0.6, abs=1e-12)
        assert similarity(new, b) == pytest.approx(0.4, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            similarity(Embedding((1.0,)), Embedding((1.0, 0.0)))

    def test_zero_vector_scores_zero(self):
        assert similarity(embed_hash_v1(""), embed_hash_v1("dog")) == 0.0

    def test_symmetry(self):
        rng = random.Random(17)
        for _ in range(50):
            a = embed_hash_v1(card_text(random_data_card(rng)))
            b = embed_hash_v1(card_text(random_data_card(rng)))
            assert similarity(a, b) == similarity(b, a)

    def test_agrees_with_reference_bag_cosine(self):
        rng = random.Random(19)
        for _ in range(50):
            ta = card_text(random_data_card(rng))
            tb = card_text(random_data_card(rng))
            got = similarity(embed_hash_v1(ta), embed_hash_v1(tb))
            assert got == pytest.approx(ref_bag_cosine(ta, tb), abs=1e-12)


def test_embedder_id():
    assert HashEmbedder().id == "hash-v1"


def test_http_embedder_normalizes_and_reads_env(monkeypatch):
    import httpx

    from automlgpt.encoder import HttpEmbedder

    def fake_post(url, json=None, timeout=None):
        assert json == {"input": "dog cat"}
        return httpx.Response(200, json={"embedding": [3.0, 4.0]},
                              request=httpx.Request("POST", url))

    monkeypatch.setenv("AUTOMLGPT_EMBED_URL", "http://embed.local/v1")
    monkeypatch.setattr(httpx, "post", fake_post)
    embedder = HttpEmbedder()
    assert embedder.url == "http://embed.local/v1"
    emb = embedder.embed("dog cat")
    assert emb.values == (0.6, 0.8)
    assert emb.norm() == pytest.approx(1.0, abs=1e-12)


def test_scale_invariance_of_repeated_text():
    rng = random.Random(23)
    for _ in range(30):
        text = card_text(random_data_card(rng))
        if not text:
            continue
        repeated = " ".join([text] * rng.randint(2, 5))
        got = embed_hash_v1(repeated)
        want = embed_hash_v1(text)
        assert got.values == pytest.approx(want.values, abs=1e-15)
        # doubling is exact in binary floating point
        assert embed_hash_v1(f"{text} {text}") == want
