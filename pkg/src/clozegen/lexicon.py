"""Sense inventory: WNdb-style database parsing and lexical queries.

Supports two on-disk layouts:

* the standard WNdb 3.0 plain-text layout (``index.noun``/``data.noun`` etc.
  plus ``noun.exc``-style exception lists), and
* a toy fixture format used in tests: one synset per line,
  ``id|pos|lemma1,lemma2|gloss|hypernym-ids|antonym-pairs[|examples]``
  where antonym pairs are ``lemma:other-lemma`` and examples are separated
  by ``;;``.

The loaded :class:`Lexicon` is immutable and safe for concurrent reads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .errors import DataValidationError, ParseError, ResourceError

NOUN = "noun"
VERB = "verb"
ADJ = "adj"
ADV = "adv"
ALL_POS = (NOUN, VERB, ADJ, ADV)

_SS_TYPE_TO_POS = {"n": NOUN, "v": VERB, "a": ADJ, "s": ADJ, "r": ADV}
_POS_FILE_SUFFIX = {NOUN: "noun", VERB: "verb", ADJ: "adj", ADV: "adv"}

# Morphy-style detachment suffix rules, applied once per candidate.
DETACHMENT_RULES = {
    NOUN: [
        ("ses", "s"), ("xes", "x"), ("zes", "z"), ("ches", "ch"),
        ("shes", "sh"), ("men", "man"), ("ies", "y"), ("es", "e"),
        ("es", ""), ("s", ""),
    ],
    VERB: [
        ("ies", "y"), ("es", "e"), ("es", ""), ("ed", "e"), ("ed", ""),
        ("ing", "e"), ("ing", ""), ("s", ""),
    ],
    ADJ: [("er", ""), ("est", ""), ("er", "e"), ("est", "e")],
    ADV: [],
}


@dataclass
class Synset:
    id: str
    pos: str
    lemmas: list[str]
    gloss: str
    examples: list[str] = field(default_factory=list)
    hypernyms: list[str] = field(default_factory=list)
    hyponyms: list[str] = field(default_factory=list)
    antonym_pairs: list[tuple[str, str]] = field(default_factory=list)


class Lexicon:
    """In-memory sense inventory with hypernym-depth and pool queries."""

    def __init__(self, synsets, sense_index, exception_lists):
        self.synsets: dict[str, Synset] = synsets
        self.sense_index: dict[tuple[str, str], list[str]] = sense_index
        self.exception_lists: dict[str, dict[str, list[str]]] = exception_lists
        self._depth_cache: dict[str, int] = {}
        self._validate()

    def _validate(self):
        for sid, syn in self.synsets.items():
            for hid in syn.hypernyms:
                if hid not in self.synsets:
                    raise DataValidationError(
                        f"synset {sid} has unknown hypernym {hid}")
                if self.synsets[hid].pos != syn.pos:
                    raise DataValidationError(
                        f"hypernym edge {sid} -> {hid} crosses POS "
                        f"({syn.pos} -> {self.synsets[hid].pos})")
        for (lemma, pos), ids in self.sense_index.items():
            for sid in ids:
                if sid not in self.synsets:
                    raise DataValidationError(
                        f"sense index entry ({lemma},{pos}) references "
                        f"unknown synset {sid}")
        self._reject_cycles()

    def _reject_cycles(self):
        # Depth is undefined on cyclic hypernym data; fail loudly at load.
        color = {}  # 0 in progress, 1 done
        for start in self.synsets:
            if start in color:
                continue
            stack = [(start, iter(self.synsets[start].hypernyms))]
            color[start] = 0
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    if color.get(nxt) == 0:
                        raise DataValidationError(
                            f"hypernym cycle detected through synset {nxt}")
                    if nxt not in color:
                        color[nxt] = 0
                        stack.append((nxt, iter(self.synsets[nxt].hypernyms)))
                        advanced = True
                        break
                if not advanced:
                    color[node] = 1
                    stack.pop()

    # -- queries ---------------------------------------------------------

    def senses(self, lemma: str, pos: str) -> list[str]:
        return list(self.sense_index.get((lemma.lower(), pos), []))

    def lemmatize(self, word: str, pos: str) -> list[str]:
        """Candidate base forms of ``word`` known to the sense index.

        Exception-list lookup runs first, then the identity form, then
        one application of each detachment suffix rule. May be empty.
        """
        if not word:
            raise DataValidationError("lemmatize: empty word")
        w = word.lower()
        out: list[str] = []

        def add(candidate):
            if candidate not in out and (candidate, pos) in self.sense_index:
                out.append(candidate)

        for base in self.exception_lists.get(pos, {}).get(w, []):
            add(base)
        add(w)
        for suffix, repl in DETACHMENT_RULES.get(pos, []):
            if w.endswith(suffix) and len(w) > len(suffix):
                add(w[: -len(suffix)] + repl)
        return out

    def synonym_antonym_pool(self, word: str) -> set[str]:
        """Union over all POS and senses of co-member and antonym lemmas."""
        pool: set[str] = set()
        for pos in ALL_POS:
            for lemma in self.lemmatize(word, pos):
                for sid in self.senses(lemma, pos):
                    syn = self.synsets[sid]
                    pool.update(syn.lemmas)
                    pool.update(other for _, other in syn.antonym_pairs)
        return pool

    def hypernym_depth(self, sid: str) -> int:
        """Longest hypernym path from ``sid`` to a root (roots are depth 0)."""
        if sid not in self.synsets:
            raise KeyError(f"unknown synset id: {sid}")
        syn = self.synsets[sid]
        if syn.pos not in (NOUN, VERB):
            raise DataValidationError(
                f"hypernym depth undefined for POS {syn.pos!r} ({sid})")
        return self._depth(sid)

    def _depth(self, sid: str) -> int:
        cached = self._depth_cache.get(sid)
        if cached is not None:
            return cached
        hypers = self.synsets[sid].hypernyms
        d = 0 if not hypers else 1 + max(self._depth(h) for h in hypers)
        self._depth_cache[sid] = d
        return d

    def max_depth(self, pos: str) -> int:
        return max(
            (self._depth(sid) for sid, s in self.synsets.items() if s.pos == pos),
            default=0,
        )

    def gloss_for_candidate(self, word: str) -> str:
        """First-sense glosses per POS, joined with POS-tag delimiters."""
        tags = {NOUN: "<NOUN>", VERB: "<VERB>", ADJ: "<ADJ>", ADV: "<ADV>"}
        parts = []
        for pos in ALL_POS:
            for lemma in self.lemmatize(word, pos):
                ids = self.senses(lemma, pos)
                if ids:
                    parts.append(f"{tags[pos]} {self.synsets[ids[0]].gloss}")
                    break
        return " ".join(parts)


# -- loading -------------------------------------------------------------


def load_lexicon(resource_directory) -> Lexicon:
    """Load a lexicon from a WNdb 3.0 directory or a toy fixture directory."""
    d = str(resource_directory)
    if not os.path.isdir(d):
        raise ResourceError(f"lexicon directory not found: {d}")
    toy = os.path.join(d, "synsets.txt")
    if os.path.isfile(toy):
        return _load_toy(d)
    if os.path.isfile(os.path.join(d, "data.noun")):
        return _load_wndb(d)
    raise ResourceError(
        f"{d} contains neither synsets.txt (toy format) nor data.noun (WNdb)")


def _load_toy(directory) -> Lexicon:
    synsets: dict[str, Synset] = {}
    sense_index: dict[tuple[str, str], list[str]] = {}
    path = os.path.join(directory, "synsets.txt")
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("|")
            if len(fields) not in (6, 7):
                raise ParseError(
                    f"expected 6 or 7 |-separated fields, got {len(fields)}",
                    filename=path, line=lineno)
            sid, pos, lemmas_s, gloss, hyp_s, ant_s = fields[:6]
            examples = [e for e in fields[6].split(";;") if e] if len(fields) == 7 else []
            if pos not in ALL_POS:
                raise ParseError(f"bad POS {pos!r}", filename=path, line=lineno)
            if sid in synsets:
                raise ParseError(f"duplicate synset id {sid}",
                                 filename=path, line=lineno)
            lemmas = [w.strip().lower() for w in lemmas_s.split(",") if w.strip()]
            if not lemmas:
                raise ParseError("synset with no lemmas", filename=path, line=lineno)
            hypernyms = [h.strip() for h in hyp_s.split(",") if h.strip()]
            antonyms = []
            for pair in ant_s.split(","):
                pair = pair.strip()
                if not pair:
                    continue
                if ":" not in pair:
                    raise ParseError(f"bad antonym pair {pair!r}",
                                     filename=path, line=lineno)
                a, b = pair.split(":", 1)
                antonyms.append((a.strip().lower(), b.strip().lower()))
            synsets[sid] = Synset(
                id=sid, pos=pos, lemmas=lemmas, gloss=gloss,
                examples=examples, hypernyms=hypernyms, antonym_pairs=antonyms)
            for lemma in lemmas:
                sense_index.setdefault((lemma, pos), []).append(sid)
    _fill_hyponyms(synsets)
    exceptions = _load_exception_lists(directory)
    return Lexicon(synsets, sense_index, exceptions)


def _fill_hyponyms(synsets):
    for syn in synsets.values():
        for hid in syn.hypernyms:
            if hid in synsets and syn.id not in synsets[hid].hyponyms:
                synsets[hid].hyponyms.append(syn.id)


def _load_exception_lists(directory):
    exceptions: dict[str, dict[str, list[str]]] = {p: {} for p in ALL_POS}
    for pos, suffix in _POS_FILE_SUFFIX.items():
        path = os.path.join(directory, f"{suffix}.exc")
        if not os.path.isfile(path):
            continue
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                parts = raw.split()
                if not parts:
                    continue
                if len(parts) < 2:
                    raise ParseError("exception entry needs inflected form "
                                     "and at least one base form",
                                     filename=path, line=lineno)
                exceptions[pos][parts[0].lower()] = [p.lower() for p in parts[1:]]
    return exceptions


def _clean_wn_word(token: str) -> str:
    # Strip adjective syntax markers like "galore(ip)"; underscores join
    # collocations in WNdb.
    if token.endswith(")") and "(" in token:
        token = token[: token.rindex("(")]
    return token.replace("_", " ").lower()


def _load_wndb(directory) -> Lexicon:
    synsets: dict[str, Synset] = {}
    sense_index: dict[tuple[str, str], list[str]] = {}
    word_lists: dict[str, list[str]] = {}  # synset id -> ordered raw words
    pending_antonyms = []  # (src_id, src_word_num, dst_id, dst_word_num)

    for pos, suffix in _POS_FILE_SUFFIX.items():
        data_path = os.path.join(directory, f"data.{suffix}")
        if not os.path.isfile(data_path):
            raise ResourceError(f"missing WNdb data file: {data_path}")
        with open(data_path, encoding="utf-8", errors="replace") as fh:
            for lineno, raw in enumerate(fh, start=1):
                if raw.startswith(" ") or not raw.strip():
                    continue  # license header
                try:
                    sid, syn, words, ants = _parse_wndb_data_line(raw, pos)
                except ParseError:
                    raise
                except Exception as exc:
                    raise ParseError(f"malformed data record: {exc}",
                                     filename=data_path, line=lineno)
                if sid in synsets:
                    raise ParseError(f"duplicate synset id {sid}",
                                     filename=data_path, line=lineno)
                synsets[sid] = syn
                word_lists[sid] = words
                pending_antonyms.extend(ants)

    # Antonym pointers reference word numbers; resolve once all synsets load.
    for src_id, src_n, dst_id, dst_n in pending_antonyms:
        if src_id not in word_lists or dst_id not in word_lists:
            continue
        src_words, dst_words = word_lists[src_id], word_lists[dst_id]
        if src_n == 0 or dst_n == 0:
            # semantic antonymy: pair every lemma combination
            pairs = [(a, b) for a in src_words for b in dst_words]
        else:
            pairs = [(src_words[src_n - 1], dst_words[dst_n - 1])]
        for pair in pairs:
            if pair not in synsets[src_id].antonym_pairs:
                synsets[src_id].antonym_pairs.append(pair)

    for pos, suffix in _POS_FILE_SUFFIX.items():
        index_path = os.path.join(directory, f"index.{suffix}")
        if not os.path.isfile(index_path):
            raise ResourceError(f"missing WNdb index file: {index_path}")
        with open(index_path, encoding="utf-8", errors="replace") as fh:
            for lineno, raw in enumerate(fh, start=1):
                if raw.startswith(" ") or not raw.strip():
                    continue
                parts = raw.split()
                try:
                    lemma = _clean_wn_word(parts[0])
                    pos_char = parts[1]
                    p_cnt = int(parts[3])
                    offsets = parts[6 + p_cnt:]
                    ids = [f"{_SS_TYPE_TO_POS[pos_char]}:{off}" for off in offsets]
                except Exception as exc:
                    raise ParseError(f"malformed index record: {exc}",
                                     filename=index_path, line=lineno)
                sense_index[(lemma, pos)] = ids

    _fill_hyponyms(synsets)
    exceptions = {p: {} for p in ALL_POS}
    for pos, suffix in _POS_FILE_SUFFIX.items():
        path = os.path.join(directory, f"{suffix}.exc")
        if os.path.isfile(path):
            exceptions.update({pos: _load_exception_lists_one(path)})
    return Lexicon(synsets, sense_index, exceptions)


def _load_exception_lists_one(path):
    out = {}
    with open(path, encoding="utf-8", errors="replace") as fh:
        for raw in fh:
            parts = raw.split()
            if len(parts) >= 2:
                out[_clean_wn_word(parts[0])] = [_clean_wn_word(p) for p in parts[1:]]
    return out


def _parse_wndb_data_line(raw: str, pos: str):
    """Parse one data.<pos> record into (id, Synset, words, antonym refs)."""
    body, _, glosspart = raw.partition("|")
    tokens = body.split()
    if len(tokens) < 5:
        raise ValueError("truncated record")
    offset = tokens[0]
    ss_type = tokens[2]
    sid = f"{_SS_TYPE_TO_POS[ss_type]}:{offset}"
    w_cnt = int(tokens[3], 16)
    words = []
    i = 4
    for _ in range(w_cnt):
        words.append(_clean_wn_word(tokens[i]))
        i += 2  # word, lex_id
    p_cnt = int(tokens[i])
    i += 1
    hypernyms = []
    antonym_refs = []
    for _ in range(p_cnt):
        symbol, p_offset, p_pos, st = tokens[i: i + 4]
        i += 4
        target = f"{_SS_TYPE_TO_POS[p_pos]}:{p_offset}"
        if symbol in ("@", "@i"):
            hypernyms.append(target)
        elif symbol == "!":
            src_n = int(st[:2], 16)
            dst_n = int(st[2:], 16)
            antonym_refs.append((sid, src_n, target, dst_n))
    gloss, examples = _split_gloss(glosspart.strip())
    syn = Synset(id=sid, pos=_SS_TYPE_TO_POS[ss_type], lemmas=words,
                 gloss=gloss, examples=examples, hypernyms=hypernyms)
    return sid, syn, words, antonym_refs


def _split_gloss(text: str):
    """Split a WNdb gloss field into definition and quoted examples."""
    examples = []
    definition = text
    if '"' in text:
        first = text.index('"')
        definition = text[:first].rstrip().rstrip(";").rstrip()
        rest = text[first:]
        chunk = []
        in_quote = False
        for ch in rest:
            if ch == '"':
                if in_quote:
                    examples.append("".join(chunk))
                    chunk = []
                in_quote = not in_quote
            elif in_quote:
                chunk.append(ch)
    return definition, examples
