"""Abstractness scorers.

Two notions are implemented: a small regression network that predicts a
concreteness value in (0,1) from a word's static vector (low = abstract),
and a hypernym-depth score where the chosen sense comes from an adapted
Lesk disambiguation over extended gloss signatures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import lexicon as lx
from .errors import (DataValidationError, NoSenseError, OOVError, ParseError,
                     ResourceError)
from .optim import Adam

RATING_MIN = 158
RATING_MAX = 670

# Fixed stopword list for Lesk contexts and signatures; overlap on function
# words is noise.
STOPWORDS = frozenset("""
a an the and or but if while of to in on at by for with from into over under
is are was were be been being am do does did doing have has had having it its
this that these those he she they them his her their we you i me my your our
us as not no nor so than then too very can will just should now s t don
""".split())

_WORD_RE = re.compile(r"[a-z0-9']+")


def content_lemmas(text: str) -> list[str]:
    """Lowercase word tokens of ``text`` with stopwords removed."""
    return [w for w in _WORD_RE.findall(text.lower()) if w not in STOPWORDS]


# -- rating scale --------------------------------------------------------


@dataclass
class RatingRecord:
    word: str
    raw_rating: int

    def __post_init__(self):
        if not (RATING_MIN <= self.raw_rating <= RATING_MAX):
            raise DataValidationError(
                f"rating {self.raw_rating} for {self.word!r} outside "
                f"[{RATING_MIN}, {RATING_MAX}]")


def scale_rating(raw: int) -> float:
    """Map a raw concreteness rating linearly to [0, 1]."""
    if not (RATING_MIN <= raw <= RATING_MAX):
        raise DataValidationError(
            f"rating {raw} outside [{RATING_MIN}, {RATING_MAX}]")
    return (raw - RATING_MIN) / (RATING_MAX - RATING_MIN)


def load_ratings(path) -> list[RatingRecord]:
    """Load a line-delimited "word<TAB>raw_rating" database."""
    records = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"cannot open rating database: {exc}")
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            parts = raw.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ParseError("expected word<TAB>rating",
                                 filename=str(path), line=lineno)
            try:
                rating = int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer rating {parts[1]!r}",
                                 filename=str(path), line=lineno)
            records.append(RatingRecord(parts[0].lower(), rating))
    return records


# -- regression scorer ---------------------------------------------------


class RegressionScorer:
    """ReLU-ReLU-sigmoid network mapping a word vector to (0, 1)."""

    def __init__(self, d, h1, h2, seed=0):
        rng = np.random.default_rng(seed)
        self.d, self.h1, self.h2 = d, h1, h2
        self.params = {
            "W1": rng.normal(0, np.sqrt(2.0 / d), (h1, d)),
            "b1": np.zeros(h1),
            "W2": rng.normal(0, np.sqrt(2.0 / h1), (h2, h1)),
            "b2": np.zeros(h2),
            "w3": rng.normal(0, np.sqrt(2.0 / h2), h2),
            "b3": np.zeros(1),
        }

    def forward(self, X: np.ndarray) -> np.ndarray:
        """Predictions for a batch of row vectors; output in (0, 1)."""
        p = self.params
        Z1 = X @ p["W1"].T + p["b1"]
        A1 = np.maximum(Z1, 0.0)
        Z2 = A1 @ p["W2"].T + p["b2"]
        A2 = np.maximum(Z2, 0.0)
        z3 = A2 @ p["w3"] + p["b3"][0]
        return 1.0 / (1.0 + np.exp(-z3))

    def loss_and_grads(self, X, targets):
        """Mean-square-error loss and analytic parameter gradients."""
        p = self.params
        n = X.shape[0]
        Z1 = X @ p["W1"].T + p["b1"]
        A1 = np.maximum(Z1, 0.0)
        Z2 = A1 @ p["W2"].T + p["b2"]
        A2 = np.maximum(Z2, 0.0)
        z3 = A2 @ p["w3"] + p["b3"][0]
        y = 1.0 / (1.0 + np.exp(-z3))
        diff = y - targets
        loss = float(np.mean(diff ** 2))

        dz3 = (2.0 / n) * diff * y * (1.0 - y)
        grads = {
            "w3": A2.T @ dz3,
            "b3": np.array([dz3.sum()]),
        }
        dA2 = np.outer(dz3, p["w3"])
        dZ2 = dA2 * (Z2 > 0)
        grads["W2"] = dZ2.T @ A1
        grads["b2"] = dZ2.sum(axis=0)
        dA1 = dZ2 @ p["W2"]
        dZ1 = dA1 * (Z1 > 0)
        grads["W1"] = dZ1.T @ X
        grads["b1"] = dZ1.sum(axis=0)
        return loss, grads

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("clozegen-scorer v1\n")
            fh.write(f"{self.d} {self.h1} {self.h2}\n")
            for name in ("W1", "b1", "W2", "b2", "w3", "b3"):
                arr = self.params[name]
                fh.write(f"{name} {' '.join(str(s) for s in arr.shape)}\n")
                fh.write(" ".join(repr(float(v)) for v in arr.ravel()) + "\n")

    @classmethod
    def load(cls, path):
        try:
            fh = open(path, encoding="utf-8")
        except OSError as exc:
            raise ResourceError(f"cannot open scorer checkpoint: {exc}")
        with fh:
            magic = fh.readline().strip()
            if magic != "clozegen-scorer v1":
                raise ParseError(f"bad scorer checkpoint header {magic!r}",
                                 filename=str(path), line=1)
            d, h1, h2 = (int(v) for v in fh.readline().split())
            scorer = cls(d, h1, h2)
            for _ in range(6):
                header = fh.readline().split()
                name, shape = header[0], tuple(int(v) for v in header[1:])
                values = np.array([float(v) for v in fh.readline().split()])
                scorer.params[name] = values.reshape(shape)
        return scorer


@dataclass
class ScorerTrainResult:
    scorer: RegressionScorer
    final_train_mse: float
    n_dropped_oov: int
    epoch_losses: list[float] = field(default_factory=list)


def train_scorer(data, table, hyper=None) -> ScorerTrainResult:
    """Fit the regression scorer on rating records with Adam on MSE.

    Records whose words lack a static vector are dropped (counted in the
    result). Deterministic given ``hyper['seed']``.
    """
    hyper = dict(hyper or {})
    h1 = hyper.get("h1", 128)
    h2 = hyper.get("h2", 64)
    lr = hyper.get("lr", 1e-3)
    epochs = hyper.get("epochs", 200)
    batch = hyper.get("batch", 32)
    seed = hyper.get("seed", 0)

    kept = [r for r in data if r.word in table]
    n_dropped = len(data) - len(kept)
    if not kept:
        raise DataValidationError("no rating record has an in-vocabulary word")
    X = np.stack([table.get(r.word) for r in kept])
    t = np.array([scale_rating(r.raw_rating) for r in kept])

    scorer = RegressionScorer(table.dim, h1, h2, seed=seed)
    opt = Adam(scorer.params, lr=lr)
    rng = np.random.default_rng(seed)
    epoch_losses = []
    n = len(kept)
    for _ in range(epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            loss, grads = scorer.loss_and_grads(X[idx], t[idx])
            opt.step(grads)
            losses.append(loss)
        epoch_losses.append(float(np.mean(losses)))
    final_mse, _ = scorer.loss_and_grads(X, t)
    return ScorerTrainResult(scorer, final_mse, n_dropped, epoch_losses)


def imperceptibility(word, scorer, table) -> float:
    """Concreteness prediction for one word; low values mean abstract."""
    vec = table.get(word)  # raises OOVError
    return float(scorer.forward(vec[None, :])[0])


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("pearson needs two equal-length vectors, n >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc ** 2).sum() * (yc ** 2).sum())
    if denom == 0.0:
        raise ValueError("pearson undefined: zero variance")
    return float((xc * yc).sum() / denom)


# -- adapted Lesk + nonspecificity ---------------------------------------


@dataclass
class SenseChoice:
    word: str
    chosen_synset: str
    score: float


def phrase_overlap_score(signature, context) -> int:
    """Sum of squared lengths of maximal shared contiguous lemma sequences.

    Repeatedly removes the longest common word-level substring from both
    sequences and adds its squared length.
    """
    sig = list(signature)
    ctx = list(context)
    total = 0
    while True:
        best_len = 0
        best = None
        for i in range(len(sig)):
            for j in range(len(ctx)):
                if sig[i] != ctx[j]:
                    continue
                k = 1
                while (i + k < len(sig) and j + k < len(ctx)
                       and sig[i + k] == ctx[j + k]):
                    k += 1
                if k > best_len:
                    best_len, best = k, (i, j)
        if best_len == 0:
            return total
        total += best_len ** 2
        i, j = best
        del sig[i:i + best_len]
        del ctx[j:j + best_len]


def sense_signature(sid: str, lex: lx.Lexicon) -> list[str]:
    """Extended gloss signature: own gloss/examples plus those of direct
    hypernyms and hyponyms, as content lemmas."""
    syn = lex.synsets[sid]
    parts = [syn.gloss] + list(syn.examples)
    for rel in list(syn.hypernyms) + list(syn.hyponyms):
        other = lex.synsets[rel]
        parts.append(other.gloss)
        parts.extend(other.examples)
    out = []
    for p in parts:
        out.extend(content_lemmas(p))
    return out


def candidate_senses(word: str, lex: lx.Lexicon, pos=None) -> list[str]:
    """Sense ids of all lemmatizations of ``word``, in sense-rank order."""
    pos_list = (pos,) if pos else lx.ALL_POS
    seen = []
    for p in pos_list:
        for lemma in lex.lemmatize(word, p):
            for sid in lex.senses(lemma, p):
                if sid not in seen:
                    seen.append(sid)
    return seen


def disambiguate(word, context_tokens, lex, pos=None) -> SenseChoice:
    """Adapted Lesk: pick the sense whose extended signature best overlaps
    the context; ties break toward the lowest sense rank."""
    senses = candidate_senses(word, lex, pos=pos)
    if not senses:
        raise NoSenseError(f"no sense for {word!r}"
                           + (f" as {pos}" if pos else ""))
    context = [t for t in context_tokens if t not in STOPWORDS]
    best_sid, best_score = senses[0], -1.0
    for sid in senses:
        score = phrase_overlap_score(sense_signature(sid, lex), context)
        if score > best_score:
            best_sid, best_score = sid, score
    return SenseChoice(word=word, chosen_synset=best_sid, score=max(best_score, 0.0))


def nonspecificity(word, summary_tokens, passage_tokens, lex, pos) -> int:
    """Hypernym depth of the sense disambiguated against summary+passage."""
    if pos not in (lx.NOUN, lx.VERB):
        raise DataValidationError(
            f"nonspecificity applies to nouns and verbs, got {pos!r}")
    context = list(summary_tokens) + list(passage_tokens)
    choice = disambiguate(word, context, lex, pos=pos)
    return lex.hypernym_depth(choice.chosen_synset)
