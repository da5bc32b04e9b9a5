"""Accuracy, MRR, recall@k, and the cross-task evaluation report."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict


@dataclass
class RankedPrediction:
    id: str
    ranking: list[str]   # best first; gold may be absent
    gold: str


@dataclass
class EvalReport:
    accuracy: float
    mrr: float
    recall_at: dict[int, float]
    n_items: int
    provenance: dict[str, str] = field(default_factory=dict)
    delta_vs_same_task: float | None = None

    def to_json(self) -> str:
        d = asdict(self)
        d["recall_at"] = {str(k): v for k, v in self.recall_at.items()}
        return json.dumps(d, sort_keys=True)

    def to_table(self) -> str:
        rows = [("items", str(self.n_items)),
                ("accuracy", f"{self.accuracy:.4f}"),
                ("mrr", f"{self.mrr:.4f}")]
        for k in sorted(self.recall_at):
            rows.append((f"recall@{k}", f"{self.recall_at[k]:.4f}"))
        if self.delta_vs_same_task is not None:
            arrow = "down" if self.delta_vs_same_task < 0 else "up"
            rows.append(("delta", f"{self.delta_vs_same_task:+.4f} ({arrow})"))
        for key, val in sorted(self.provenance.items()):
            rows.append((key, val))
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def accuracy(predicted, gold) -> float:
    if len(predicted) != len(gold):
        raise ValueError("accuracy: length mismatch")
    if not predicted:
        raise ValueError("accuracy: empty input")
    return sum(int(p == g) for p, g in zip(predicted, gold)) / len(predicted)


def mrr(preds) -> float:
    """Mean reciprocal rank of the gold word; absent gold contributes 0."""
    if not preds:
        raise ValueError("mrr: empty input")
    total = 0.0
    for p in preds:
        if p.gold in p.ranking:
            total += 1.0 / (p.ranking.index(p.gold) + 1)
    return total / len(preds)


def recall_at_k(preds, k: int) -> float:
    if k < 1:
        raise ValueError("recall_at_k: k must be >= 1")
    if not preds:
        raise ValueError("recall_at_k: empty input")
    return sum(int(p.gold in p.ranking[:k]) for p in preds) / len(preds)


def ranking_report(preds, provenance=None) -> EvalReport:
    golds = [p.gold for p in preds]
    top1 = [p.ranking[0] if p.ranking else None for p in preds]
    return EvalReport(
        accuracy=accuracy(top1, golds),
        mrr=mrr(preds),
        recall_at={k: recall_at_k(preds, k) for k in (1, 5, 10)},
        n_items=len(preds),
        provenance=dict(provenance or {}),
    )


def evaluate_questions(model, questions, train_source, test_source,
                       same_task_accuracy=None) -> EvalReport:
    """5-way evaluation of a reader on a question set.

    ``questions`` are dicts in the emitted question-file schema. Option
    surface forms unknown to the model vocabulary fall back to UNK inside
    the model. The delta is cross minus same-task accuracy (drop negative).
    """
    from .readers import ReaderItem
    from .qgen import question_to_reader_item

    preds = []
    for i, q in enumerate(questions):
        item = question_to_reader_item(q, item_id=str(i))
        probs = model.predict_probs(item)
        order = sorted(range(len(probs)),
                       key=lambda t: (-probs[t], item.candidates[t]))
        preds.append(RankedPrediction(
            id=item.id,
            ranking=[item.candidates[t] for t in order],
            gold=item.candidates[item.gold_index]))
    report = ranking_report(
        preds, provenance={"train_source": train_source,
                           "test_source": test_source})
    if same_task_accuracy is not None:
        report.delta_vs_same_task = report.accuracy - same_task_accuracy
    return report
