"""Deterministic toy resources: lexicon, embeddings, ratings, corpus.

Used by the test suite and by `clozegen make-fixtures` so the pipeline can
be exercised end-to-end without the real lexical databases or vector
files. Target words form a shallow noun hierarchy (depth 2), never occur
in their passages, and have near-orthogonal vectors, so a clean run keeps
them through all three filters.
"""

from __future__ import annotations

import json
import os

import numpy as np


def target_words(n):
    return [f"idea{i}" for i in range(n)]


def filler_words(n):
    return [f"thing{i}" for i in range(n)]


def write_toy_lexicon(directory, n_targets=12):
    os.makedirs(directory, exist_ok=True)
    lines = [
        "entity|noun|entity|that which exists||",
        "abstraction|noun|abstraction|a general concept formed from "
        "particulars|entity|",
    ]
    for w in target_words(n_targets):
        lines.append(f"{w}|noun|{w}|an abstract notion named {w}|abstraction|")
    with open(os.path.join(directory, "synsets.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _unit_vectors(words, dim, rng, max_cos=0.8):
    vecs = {}
    for w in words:
        while True:
            v = rng.normal(0, 1, dim)
            v /= np.linalg.norm(v)
            if all(abs(float(v @ u)) <= max_cos for u in vecs.values()):
                vecs[w] = v
                break
    return vecs


def write_toy_embeddings(path, n_targets=12, n_fillers=40, dim=16, seed=0):
    rng = np.random.default_rng(seed)
    words = target_words(n_targets) + filler_words(n_fillers)
    vecs = _unit_vectors(words, dim, rng)
    with open(path, "w", encoding="utf-8") as fh:
        for w, v in vecs.items():
            fh.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")


def write_toy_ratings(path, n_targets=12, n_fillers=40, seed=0):
    rng = np.random.default_rng(seed + 7)
    with open(path, "w", encoding="utf-8") as fh:
        for w in target_words(n_targets):
            fh.write(f"{w}\t{int(rng.integers(158, 240))}\n")
        for w in filler_words(n_fillers):
            fh.write(f"{w}\t{int(rng.integers(590, 671))}\n")


def write_toy_corpus(path, n_pairs=20, n_targets=12, n_fillers=40, seed=0):
    rng = np.random.default_rng(seed + 13)
    targets = target_words(n_targets)
    fillers = filler_words(n_fillers)
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(n_pairs):
            t1 = targets[(2 * i) % n_targets]
            t2 = targets[(2 * i + 1) % n_targets]
            body = [fillers[int(j)] for j in rng.integers(0, n_fillers, 18)]
            passage = ("The " + " and the ".join(body[:6]) + " met the "
                       + " while the ".join(body[6:12]) + " kept the "
                       + " near the ".join(body[12:]) + " .")
            summary = f"The {t1} of the {body[0]} shaped the {t2} ."
            rec = {"id": f"pair{i:04d}", "passage": passage, "summary": summary}
            fh.write(json.dumps(rec) + "\n")


def write_toy_resources(directory, n_pairs=20, n_targets=12, n_fillers=40,
                        dim=16, seed=0):
    """Write all toy resource files under ``directory``; returns their paths."""
    os.makedirs(directory, exist_ok=True)
    lexdir = os.path.join(directory, "lexicon")
    write_toy_lexicon(lexdir, n_targets=n_targets)
    emb = os.path.join(directory, "embeddings.txt")
    write_toy_embeddings(emb, n_targets=n_targets, n_fillers=n_fillers,
                         dim=dim, seed=seed)
    ratings = os.path.join(directory, "ratings.tsv")
    write_toy_ratings(ratings, n_targets=n_targets, n_fillers=n_fillers,
                      seed=seed)
    corpus = os.path.join(directory, "corpus.jsonl")
    write_toy_corpus(corpus, n_pairs=n_pairs, n_targets=n_targets,
                     n_fillers=n_fillers, seed=seed)
    return {"lexicon": lexdir, "embeddings": emb, "ratings": ratings,
            "corpus": corpus}
