"""Static word vectors, cosine similarity, and contextual-vector records."""

from __future__ import annotations

import json

import numpy as np

from .errors import OOVError, ParseError, ResourceError


class EmbeddingTable:
    """Case-insensitive word -> fixed-dimension vector lookup."""

    def __init__(self, dim: int):
        self.dim = dim
        self.vectors: dict[str, np.ndarray] = {}

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def add(self, word: str, vec) -> None:
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise ParseError(f"vector for {word!r} has dim {vec.shape}, "
                             f"expected ({self.dim},)")
        self.vectors.setdefault(word.lower(), vec)

    def get(self, word: str) -> np.ndarray:
        try:
            return self.vectors[word.lower()]
        except KeyError:
            raise OOVError(f"no vector for word {word!r}") from None


def load_embeddings(path) -> EmbeddingTable:
    """Load "token v1 ... vd" lines; dim inferred from the first line."""
    table = None
    try:
        fh = open(path, encoding="utf-8", errors="replace")
    except OSError as exc:
        raise ResourceError(f"cannot open embedding file: {exc}")
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            parts = raw.rstrip("\n").split(" ")
            if len(parts) < 2 or not raw.strip():
                raise ParseError("embedding line needs a token and values",
                                 filename=str(path), line=lineno)
            token, values = parts[0], parts[1:]
            if table is None:
                table = EmbeddingTable(dim=len(values))
            if len(values) != table.dim:
                raise ParseError(
                    f"expected {table.dim} values, got {len(values)}",
                    filename=str(path), line=lineno)
            try:
                vec = np.array([float(v) for v in values])
            except ValueError:
                raise ParseError("non-numeric embedding value",
                                 filename=str(path), line=lineno)
            # duplicate tokens keep the first occurrence
            table.add(token, vec)
    if table is None:
        raise ParseError("empty embedding file", filename=str(path))
    return table


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"cosine: shape mismatch {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


class ContextualVectors:
    """Per (document key, token index) vectors from a precomputed file."""

    def __init__(self, dim: int):
        self.dim = dim
        self._vecs: dict[tuple[str, int], np.ndarray] = {}

    def add(self, doc_id: str, token_index: int, vec) -> None:
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise ParseError(f"contextual vector dim {vec.shape[0]} != {self.dim}")
        self._vecs[(doc_id, int(token_index))] = vec

    def get(self, doc_id: str, token_index: int):
        return self._vecs.get((doc_id, int(token_index)))


def load_contextual_vectors(path) -> ContextualVectors:
    """Load line-delimited {"doc_id", "token_index", "vector"} records."""
    ctx = None
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"cannot open contextual vector file: {exc}")
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
                vec = rec["vector"]
                if ctx is None:
                    ctx = ContextualVectors(dim=len(vec))
                ctx.add(rec["doc_id"], rec["token_index"], vec)
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise ParseError(f"bad contextual record: {exc}",
                                 filename=str(path), line=lineno)
    if ctx is None:
        raise ParseError("empty contextual vector file", filename=str(path))
    return ctx


def max_similarity_to_passage(word, passage_tokens, table,
                              ctx=None, ctx_query=None, ctx_passage=None):
    """Maximum cosine between ``word`` and any passage token.

    ``passage_tokens`` is a list of lowercase token strings. With a
    :class:`ContextualVectors` source, ``ctx_query`` is the (doc key, index)
    of the query token and ``ctx_passage`` the passage doc key; the result
    is the max over both the static and contextual similarities.
    """
    if not passage_tokens:
        raise ValueError("passage must be nonempty")
    wvec = table.get(word)  # raises OOVError when absent
    best = None
    for tok in passage_tokens:
        if tok.lower() in table:
            s = cosine(wvec, table.get(tok))
            best = s if best is None else max(best, s)
    if ctx is not None and ctx_query is not None and ctx_passage is not None:
        qvec = ctx.get(*ctx_query)
        if qvec is not None:
            for i in range(len(passage_tokens)):
                pvec = ctx.get(ctx_passage, i)
                if pvec is not None:
                    s = cosine(qvec, pvec)
                    best = s if best is None else max(best, s)
    if best is None:
        raise OOVError(f"no passage token comparable to {word!r}")
    return best
