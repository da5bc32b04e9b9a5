import os

import numpy as np
import pytest

from clozegen import toydata
from clozegen.embeddings import EmbeddingTable
from clozegen.lexicon import load_lexicon

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def toy_lex():
    return load_lexicon(os.path.join(DATA_DIR, "toy_lexicon"))


@pytest.fixture(scope="session")
def toy_resources(tmp_path_factory):
    d = tmp_path_factory.mktemp("toyres")
    return toydata.write_toy_resources(str(d), n_pairs=20, seed=0)


def make_table(words, dim=8, seed=0):
    rng = np.random.default_rng(seed)
    table = EmbeddingTable(dim=dim)
    for w in words:
        table.add(w, rng.normal(size=dim))
    return table


def relative_error(a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    denom = max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12)
    return np.linalg.norm(a - b) / denom
