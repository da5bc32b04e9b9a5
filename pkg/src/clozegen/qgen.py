"""Target selection, filtering, and k-fold distractor generation."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import abstractness as ab
from . import corpus as cp
from . import lexicon as lx
from .embeddings import max_similarity_to_passage
from .errors import DataValidationError, NoSenseError, OOVError
from .readers import ReaderItem, ReaderModel, TrainingConfig, predict_topk, train

IMPERCEPTIBILITY = "imperceptibility"
NONSPECIFICITY = "nonspecificity"
SUBTASKS = (IMPERCEPTIBILITY, NONSPECIFICITY)

PLACEHOLDER = "@placeholder"
SCORE_THRESHOLD = 0.35   # strict less-than
DEPTH_THRESHOLD = 6      # strict less-than
SIMILARITY_THRESHOLD = 0.85  # strict greater-than rejects


@dataclass
class QuestionDraft:
    pair_id: str
    target_surface: str
    target_lemma: str
    target_pos: str
    token_index: int
    question_text: str
    subtask: str

    def __post_init__(self):
        if self.question_text.count(PLACEHOLDER) != 1:
            raise DataValidationError(
                f"draft {self.pair_id}:{self.token_index} must contain "
                f"exactly one {PLACEHOLDER}")

    @property
    def id(self) -> str:
        return f"{self.pair_id}:{self.token_index}"


@dataclass
class Question:
    pair_id: str
    passage: str
    question: str
    options: list[str]
    label: int

    def __post_init__(self):
        if len(self.options) != 5 or len(set(self.options)) != 5:
            raise DataValidationError("a question needs 5 distinct options")
        if not 0 <= self.label <= 4:
            raise DataValidationError("label must be in 0..4")

    @property
    def gold(self) -> str:
        return self.options[self.label]

    def to_record(self) -> dict:
        rec = {"article": self.passage, "question": self.question}
        for i, opt in enumerate(self.options):
            rec[f"option_{i}"] = opt
        rec["label"] = self.label
        return rec


def question_to_reader_item(record: dict, item_id: str) -> ReaderItem:
    """Build a reader item from an emitted question record."""
    passage = [s.lower() for s, _ in cp.tokenize(record["article"])]
    summary = [s if s == PLACEHOLDER else s.lower()
               for s, _ in cp.tokenize(record["question"].replace(
                   PLACEHOLDER, " @placeholder "))]
    # tokenize splits "@placeholder" into two tokens; re-join
    summary = _rejoin_placeholder(summary)
    options = [record[f"option_{i}"] for i in range(5)]
    return ReaderItem(id=item_id, passage=passage, summary=summary,
                      candidates=options, gold_index=int(record["label"]))


def _rejoin_placeholder(tokens):
    out = []
    i = 0
    while i < len(tokens):
        if tokens[i] == "@" and i + 1 < len(tokens) and tokens[i + 1] == "placeholder":
            out.append(PLACEHOLDER)
            i += 2
        else:
            out.append(tokens[i])
            i += 1
    return out


# -- target selection ----------------------------------------------------


def select_targets(analyzed: cp.AnalyzedPair, subtask: str, *, lex=None,
                   scorer=None, table=None):
    """Qualifying summary tokens as drafts; returns (drafts, n_skipped).

    Imperceptibility: content-POS tokens with regression score < 0.35.
    Nonspecificity: noun/verb tokens with hypernym depth < 6. Tokens the
    scorer cannot assess (OOV / no sense) are skipped and counted.
    """
    if subtask not in SUBTASKS:
        raise DataValidationError(f"unknown subtask {subtask!r}")
    drafts = []
    skipped = 0
    summary_text = analyzed.pair.summary
    summary_lemmas = [t.lemma for t in analyzed.summary_tokens]
    passage_lemmas = [t.lemma for t in analyzed.passage_tokens]
    for i, tok in enumerate(analyzed.summary_tokens):
        if subtask == IMPERCEPTIBILITY:
            if tok.pos not in cp.CONTENT_POS:
                continue
            try:
                score = ab.imperceptibility(tok.lower, scorer, table)
            except OOVError:
                skipped += 1
                continue
            if not score < SCORE_THRESHOLD:
                continue
        else:
            if tok.pos not in (lx.NOUN, lx.VERB):
                continue
            try:
                depth = ab.nonspecificity(tok.lower, summary_lemmas,
                                          passage_lemmas, lex, tok.pos)
            except NoSenseError:
                skipped += 1
                continue
            if not depth < DEPTH_THRESHOLD:
                continue
        question_text = (summary_text[:tok.char_offset] + PLACEHOLDER
                         + summary_text[tok.char_offset + len(tok.surface):])
        drafts.append(QuestionDraft(
            pair_id=analyzed.pair.id,
            target_surface=tok.surface,
            target_lemma=tok.lemma,
            target_pos=tok.pos,
            token_index=i,
            question_text=question_text,
            subtask=subtask,
        ))
    return drafts, skipped


# -- filters -------------------------------------------------------------


def filter_lemma(draft: QuestionDraft, passage_tokens) -> bool:
    """Reject when the target lemma occurs among the passage lemmas."""
    return draft.target_lemma not in {t.lemma for t in passage_tokens}


def filter_synonym_antonym(draft: QuestionDraft, passage_tokens, lex) -> bool:
    """Reject when any pooled synonym/antonym of the target is in the passage."""
    pool = lex.synonym_antonym_pool(draft.target_surface)
    passage_lemmas = {t.lemma for t in passage_tokens} | {t.lower for t in passage_tokens}
    return not (pool & passage_lemmas)


def filter_similarity(draft: QuestionDraft, passage_tokens, table, ctx=None,
                      ctx_query=None, ctx_passage=None):
    """Reject when max similarity to any passage token is above 0.85.

    Returns (keep, oov_warning): an OOV target keeps the draft but is
    reported in the run manifest.
    """
    lowers = [t.lower for t in passage_tokens]
    try:
        sim = max_similarity_to_passage(draft.target_surface, lowers, table,
                                        ctx=ctx, ctx_query=ctx_query,
                                        ctx_passage=ctx_passage)
    except OOVError:
        return True, True
    return not sim > SIMILARITY_THRESHOLD, False


# -- distractor generation ----------------------------------------------


@dataclass
class PoolPrediction:
    """Provenance of one model's top-k contribution for one draft."""
    draft_id: str
    fold: int
    model: str
    trained_on_folds: tuple[int, ...]
    topk: list[tuple[str, int]]  # (word, rank starting at 1)


@dataclass
class GenerationResult:
    questions: list[Question]
    provenance: list[PoolPrediction]
    n_dropped: int
    dropped_ids: list[str] = field(default_factory=list)


def default_model_factory(table, cfg: TrainingConfig):
    """Build fresh GA/ATT/AMWG models over a vocabulary and its glosses."""
    from .readers.models import GA, ATT, AMWG

    def make(vocab, glosses, seed):
        out = []
        for variant in (GA, ATT, AMWG):
            c = TrainingConfig(embedding_dim=cfg.embedding_dim,
                               hidden=cfg.hidden, hops=cfg.hops,
                               batch=cfg.batch, lr=cfg.lr,
                               dropout=cfg.dropout, epochs=cfg.epochs,
                               seed=seed)
            out.append((variant, ReaderModel(variant, vocab, table, c,
                                             glosses=glosses)))
        return out
    return make


def _draft_reader_item(ctx, vocab, vocab_index):
    draft, passage_lower, summary_tokens = ctx
    gold = draft.target_surface.lower()
    return ReaderItem(id=draft.id, passage=passage_lower,
                      summary=summary_tokens, candidates=list(vocab),
                      gold_index=vocab_index.get(gold, 0))


def select_distractors(pool, gold, table, lex, n=4):
    """Pick the n most frequent surviving word types from the pool.

    ``pool`` is a list of (word, rank) tokens. Words too similar to the
    gold (> 0.85 static cosine), synonyms/antonyms of the gold, and the
    gold itself are excluded. Ties: higher frequency first, then best
    (lowest) rank across models, then lexicographic.
    """
    gold_l = gold.lower()
    synonyms = lex.synonym_antonym_pool(gold_l) if lex is not None else set()
    surviving = []
    for word, rank in pool:
        w = word.lower()
        if w == gold_l or w in synonyms:
            continue
        if table is not None and w in table and gold_l in table:
            from .embeddings import cosine
            if cosine(table.get(w), table.get(gold_l)) > SIMILARITY_THRESHOLD:
                continue
        surviving.append((w, rank))
    freq = Counter(w for w, _ in surviving)
    best_rank = {}
    for w, rank in surviving:
        best_rank[w] = min(rank, best_rank.get(w, rank))
    ordered = sorted(freq, key=lambda w: (-freq[w], best_rank[w], w))
    return ordered[:n]


def generate_distractors(draft_contexts, make_models, *, table=None, lex=None,
                         folds=4, vocab=None, seed=0,
                         gloss_lookup=None) -> GenerationResult:
    """K-fold distractor mining: train the three readers on the other folds,
    collect top-10 predictions per model, and assemble 5-option questions.

    ``draft_contexts`` is a list of (draft, passage_lower_tokens,
    summary_tokens_with_placeholder, passage_text) tuples.
    """
    if len(draft_contexts) < folds:
        raise DataValidationError(
            f"need at least {folds} drafts for {folds}-fold generation")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(draft_contexts))
    fold_of = {}
    for pos, idx in enumerate(order):
        fold_of[idx] = pos % folds

    provenance = []
    pools = {c[0].id: [] for c in draft_contexts}

    for f in range(folds):
        train_idx = [i for i in range(len(draft_contexts)) if fold_of[i] != f]
        test_idx = [i for i in range(len(draft_contexts)) if fold_of[i] == f]
        if not test_idx:
            continue
        if vocab is not None:
            fold_vocab = list(vocab)
        else:
            # candidate vocabulary = gold words of the training folds
            fold_vocab = sorted({draft_contexts[i][0].target_surface.lower()
                                 for i in train_idx})
        vindex = {w: i for i, w in enumerate(fold_vocab)}
        glosses = {w: gloss_lookup(w) for w in fold_vocab} if gloss_lookup else {}
        train_items = []
        for i in train_idx:
            d, plower, stoks, _ = draft_contexts[i]
            gold = d.target_surface.lower()
            if gold not in vindex:
                continue
            train_items.append(ReaderItem(
                id=d.id, passage=plower, summary=stoks,
                candidates=list(fold_vocab), gold_index=vindex[gold]))
        trained_on = tuple(x for x in range(folds) if x != f)
        for name, model in make_models(fold_vocab, glosses, seed + f):
            train(model, train_items)
            for i in test_idx:
                d, plower, stoks, _ = draft_contexts[i]
                item = ReaderItem(id=d.id, passage=plower, summary=stoks,
                                  candidates=list(fold_vocab), gold_index=0)
                topk = predict_topk(model, item, fold_vocab, k=10)
                ranked = [(w, r + 1) for r, (w, _) in enumerate(topk)]
                provenance.append(PoolPrediction(
                    draft_id=d.id, fold=f, model=name,
                    trained_on_folds=trained_on, topk=ranked))
                pools[d.id].extend(ranked)

    questions = []
    dropped = []
    for i, (draft, _, _, passage_text) in enumerate(draft_contexts):
        gold = draft.target_surface.lower()
        distractors = select_distractors(pools[draft.id], gold, table, lex)
        if len(distractors) < 4:
            dropped.append(draft.id)
            continue
        options = distractors[:4] + [gold]
        perm = rng.permutation(5)
        options = [options[p] for p in perm]
        questions.append(Question(
            pair_id=draft.pair_id,
            passage=passage_text,
            question=draft.question_text,
            options=options,
            label=options.index(gold),
        ))
    return GenerationResult(questions=questions, provenance=provenance,
                            n_dropped=len(dropped), dropped_ids=dropped)
