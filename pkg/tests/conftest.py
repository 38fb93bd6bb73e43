import json
import pathlib
import sys

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

from dialaug.corpus import Corpus, corpus_from_json, load_canonical
from dialaug.synth import synth_corpus

DATA = pathlib.Path(__file__).resolve().parents[1] / "src" / "dialaug" / "data"


@pytest.fixture(scope="session")
def mini_corpus() -> Corpus:
    return load_canonical(DATA / "mini_corpus.json")


@pytest.fixture(scope="session")
def mini_corpus_json() -> dict:
    with open(DATA / "mini_corpus.json", encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture(scope="session")
def synth30() -> Corpus:
    return synth_corpus(30, seed=0)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(1234))


def random_token_seq(rng: np.random.Generator, min_len: int = 1, max_len: int = 12) -> list[str]:
    alphabet = ["the", "a", "cheap", "place", "food", "[food]", "[area]", "in", ".", "?", "want", "find"]
    n = int(rng.integers(min_len, max_len + 1))
    return [alphabet[int(rng.integers(len(alphabet)))] for _ in range(n)]


@pytest.fixture(scope="session")
def tiny_setup():
    """Small corpus + vocab + config for neural tests; built once per session."""
    from dialaug.augment import ALL_LOSSES, build_instances
    from dialaug.evaluation import _reserved_tokens, _vocab_sequences
    from dialaug.neural import ModelConfig, Vocab

    corpus = synth_corpus(6, seed=1)
    instances = build_instances(
        corpus, None, paraphrase_source="none", epoch_seed=0, losses=ALL_LOSSES, self_paraphrase=True
    )
    vocab = Vocab.build(_vocab_sequences(instances), reserved=_reserved_tokens(corpus))
    cfg = ModelConfig(embed_dim=8, hidden_dim=8, seed=3).with_vocab(len(vocab))
    return corpus, instances, vocab, cfg
