"""End-to-end question generation with a reconciled run manifest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import corpus as cp
from . import qgen
from .readers import TrainingConfig


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int
    input_hashes: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "input_hashes": self.input_hashes,
            "counts": self.counts,
            "warnings": self.warnings,
        }, sort_keys=True, indent=2)

    def reconciles(self) -> bool:
        c = self.counts
        return c.get("drafts", 0) == (
            c.get("emitted", 0) + c.get("rejected_lemma", 0)
            + c.get("rejected_synonym_antonym", 0)
            + c.get("rejected_similarity", 0)
            + c.get("dropped_distractor_stage", 0))


def file_hash(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


def generate_questions(pairs, lex, table, subtask, *, scorer=None, ctx=None,
                       reader_cfg: TrainingConfig, folds=4, seed=0,
                       tagger=None, make_models=None):
    """Run selection, the three filters, and distractor generation.

    Returns (questions, manifest, provenance).
    """
    manifest = RunManifest(
        command="generate",
        config={"subtask": subtask, "folds": folds,
                "reader": {"hidden": reader_cfg.hidden,
                           "hops": reader_cfg.hops,
                           "epochs": reader_cfg.epochs,
                           "embedding_dim": reader_cfg.embedding_dim,
                           "batch": reader_cfg.batch,
                           "lr": reader_cfg.lr,
                           "dropout": reader_cfg.dropout}},
        seed=seed,
    )
    if ctx is None:
        manifest.warnings.append(
            "no contextual vectors supplied; similarity filter uses the "
            "static arm only")

    counts = {"pairs": len(pairs), "drafts": 0, "skipped_unscorable": 0,
              "rejected_lemma": 0, "rejected_synonym_antonym": 0,
              "rejected_similarity": 0, "oov_passed_similarity": 0,
              "dropped_distractor_stage": 0, "emitted": 0}
    draft_contexts = []
    for pair in pairs:
        analyzed = cp.analyze(pair, lex, tagger=tagger)
        drafts, skipped = qgen.select_targets(
            analyzed, subtask, lex=lex, scorer=scorer, table=table)
        counts["drafts"] += len(drafts)
        counts["skipped_unscorable"] += skipped
        for draft in drafts:
            if not qgen.filter_lemma(draft, analyzed.passage_tokens):
                counts["rejected_lemma"] += 1
                continue
            if not qgen.filter_synonym_antonym(draft, analyzed.passage_tokens, lex):
                counts["rejected_synonym_antonym"] += 1
                continue
            keep, oov = qgen.filter_similarity(
                draft, analyzed.passage_tokens, table, ctx=ctx,
                ctx_query=(f"{pair.id}:summary", draft.token_index),
                ctx_passage=f"{pair.id}:passage")
            if oov:
                counts["oov_passed_similarity"] += 1
                manifest.warnings.append(
                    f"OOV target {draft.target_surface!r} in {draft.id} "
                    "passed the similarity filter unchecked")
            if not keep:
                counts["rejected_similarity"] += 1
                continue
            passage_lower = [t.lower for t in analyzed.passage_tokens]
            summary_tokens = [
                qgen.PLACEHOLDER if i == draft.token_index else t.lower
                for i, t in enumerate(analyzed.summary_tokens)]
            draft_contexts.append((draft, passage_lower, summary_tokens,
                                   pair.passage))

    make_models = make_models or qgen.default_model_factory(table, reader_cfg)
    result = qgen.generate_distractors(
        draft_contexts, make_models, table=table, lex=lex, folds=folds,
        seed=seed, gloss_lookup=lex.gloss_for_candidate)
    counts["dropped_distractor_stage"] = result.n_dropped
    counts["emitted"] = len(result.questions)
    manifest.counts = counts
    return result.questions, manifest, result.provenance


def write_questions(questions, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for q in questions:
            fh.write(json.dumps(q.to_record(), sort_keys=True) + "\n")


def write_manifest(manifest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(manifest.to_json() + "\n")
