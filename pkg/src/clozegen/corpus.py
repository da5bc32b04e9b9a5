"""Passage/summary ingestion, tokenization, POS tagging, lemmatization."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from . import lexicon as lx
from .errors import DataValidationError, ParseError, ResourceError

PUNCT = "punct"
OTHER = "other"
CONTENT_POS = (lx.NOUN, lx.VERB, lx.ADJ, lx.ADV)

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)

# Closed-class words the baseline tagger never treats as content words.
CLOSED_CLASS = frozenset("""
a an the this that these those some any each every no
i you he she it we they me him her us them my your his its our their
and or but nor so yet if because although while when where
of to in on at by for with from into over under about against between
is are was were be been being am do does did have has had will would
can could shall should may might must not there
""".split())


@dataclass
class DocumentPair:
    id: str
    passage: str
    summary: str

    def __post_init__(self):
        if not self.id:
            raise DataValidationError("document pair with empty id")
        if not self.passage.strip() or not self.summary.strip():
            raise DataValidationError(
                f"document pair {self.id!r} has an empty passage or summary")


@dataclass
class Token:
    surface: str
    lower: str
    lemma: str
    pos: str
    char_offset: int


@dataclass
class AnalyzedPair:
    pair: DocumentPair
    passage_tokens: list[Token] = field(default_factory=list)
    summary_tokens: list[Token] = field(default_factory=list)


def ingest(path) -> list[DocumentPair]:
    """Load line-delimited {"id","passage","summary"} records, in file order."""
    pairs = []
    seen = set()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"cannot open corpus file: {exc}")
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON: {exc}", filename=str(path),
                                 line=lineno)
            if not isinstance(rec, dict) or not {"id", "passage", "summary"} <= rec.keys():
                raise ParseError("record must carry id, passage, summary",
                                 filename=str(path), line=lineno)
            if rec["id"] in seen:
                raise DataValidationError(
                    f"duplicate document id {rec['id']!r} at line {lineno}")
            seen.add(rec["id"])
            pair = DocumentPair(rec["id"], rec["passage"], rec["summary"])
            # optional pre-tagged token arrays bypass the built-in tagger
            pair.pretagged = {
                "passage": rec.get("passage_tokens"),
                "summary": rec.get("summary_tokens"),
            }
            pairs.append(pair)
    return pairs


def tokenize(text: str):
    """(surface, char_offset) pairs: word runs and single punctuation marks."""
    return [(m.group(0), m.start()) for m in _TOKEN_RE.finditer(text)]


class LexiconTagger:
    """Baseline tagger: closed-class list, suffix heuristics, then the POS
    with the most senses in the lexicon."""

    def __init__(self, lex: lx.Lexicon):
        self.lex = lex

    def tag(self, surface: str) -> str:
        w = surface.lower()
        if not re.search(r"\w", w):
            return PUNCT
        if w in CLOSED_CLASS:
            return OTHER
        if (w.endswith("ed") or w.endswith("ing")) and self.lex.lemmatize(w, lx.VERB):
            return lx.VERB
        counts = {}
        for pos in CONTENT_POS:
            n = sum(len(self.lex.senses(lemma, pos))
                    for lemma in self.lex.lemmatize(w, pos))
            if n:
                counts[pos] = n
        if counts:
            best = max(counts.values())
            for pos in CONTENT_POS:  # fixed priority on ties
                if counts.get(pos) == best:
                    return pos
        if w.endswith("ly"):
            return lx.ADV
        return OTHER


def _lemma_for(lex, lower, pos):
    if pos in CONTENT_POS:
        cands = lex.lemmatize(lower, pos)
        if cands:
            return cands[0]
    return lower


def _analyze_text(text, lex, tagger, pretagged=None):
    tokens = []
    if pretagged:
        cursor = 0
        for i, rec in enumerate(pretagged):
            surface, pos = rec["surface"], rec["pos"]
            at = text.find(surface, cursor)
            if at < 0:
                raise DataValidationError(
                    f"pre-tagged token {surface!r} (#{i}) not found in text")
            cursor = at + len(surface)
            lower = surface.lower()
            tokens.append(Token(surface, lower, _lemma_for(lex, lower, pos),
                                pos, at))
        return tokens
    for surface, offset in tokenize(text):
        lower = surface.lower()
        pos = tagger.tag(surface)
        tokens.append(Token(surface, lower, _lemma_for(lex, lower, pos),
                            pos, offset))
    return tokens


def analyze(pair: DocumentPair, lex: lx.Lexicon, tagger=None) -> AnalyzedPair:
    """Tokenize, tag, and lemmatize one document pair."""
    tagger = tagger or LexiconTagger(lex)
    pretagged = getattr(pair, "pretagged", None) or {}
    return AnalyzedPair(
        pair=pair,
        passage_tokens=_analyze_text(pair.passage, lex, tagger,
                                     pretagged.get("passage")),
        summary_tokens=_analyze_text(pair.summary, lex, tagger,
                                     pretagged.get("summary")),
    )
