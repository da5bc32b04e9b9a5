"""Annotation capture, persistence, and validity-based selection.

Records live in an append-only JSONL log; resubmission by the same
annotator for the same question replaces the earlier record (latest
entry wins at load time). The selection rules are:

* drop every record from annotators whose accuracy against gold labels
  is not strictly above 40%;
* drop records with an empty passage or question span;
* drop records rated easy but answered incorrectly.

A question is kept iff it retains at least one surviving correct record.
"""

import datetime
import json
import os
import threading
from dataclasses import dataclass, field, asdict

from .errors import DataValidationError, ResourceError

DIFFICULTIES = ("easy", "medium", "hard")
ACCURACY_GATE = 0.40  # strict greater-than keeps


@dataclass
class AnnotationRecord:
    question_id: str
    annotator_id: str
    chosen_option: int
    passage_span: tuple[int, int]
    question_span: tuple[int, int]
    difficulty: str
    timestamp: str = ""

    def validate(self, passage_len=None, question_len=None) -> None:
        if not 0 <= self.chosen_option <= 4:
            raise DataValidationError("chosen_option must be in 0..4")
        if self.difficulty not in DIFFICULTIES:
            raise DataValidationError(f"difficulty must be one of {DIFFICULTIES}")
        for name, (start, end), limit in (
                ("passage_span", self.passage_span, passage_len),
                ("question_span", self.question_span, question_len)):
            if start < 0 or start >= end:
                raise DataValidationError(f"{name} must be nonempty: "
                                          f"({start}, {end})")
            if limit is not None and end > limit:
                raise DataValidationError(f"{name} exceeds text length {limit}")

    def has_empty_span(self) -> bool:
        return (self.passage_span[0] >= self.passage_span[1]
                or self.question_span[0] >= self.question_span[1])

    def to_record(self) -> dict:
        d = asdict(self)
        d["passage_span"] = list(self.passage_span)
        d["question_span"] = list(self.question_span)
        return d

    @classmethod
    def from_record(cls, d: dict) -> "AnnotationRecord":
        return cls(
            question_id=d["question_id"],
            annotator_id=d["annotator_id"],
            chosen_option=int(d["chosen_option"]),
            passage_span=tuple(d["passage_span"]),
            question_span=tuple(d["question_span"]),
            difficulty=d["difficulty"],
            timestamp=d.get("timestamp", ""),
        )


class AnnotationStore:
    """Append-only JSONL log with latest-wins (question, annotator) keys."""

    def __init__(self, path):
        self.path = str(path)
        self._lock = threading.Lock()
        self._records: dict[tuple[str, str], AnnotationRecord] = {}
        if os.path.exists(self.path):
            with open(self.path, encoding="utf-8") as fh:
                for raw in fh:
                    if raw.strip():
                        rec = AnnotationRecord.from_record(json.loads(raw))
                        self._records[(rec.question_id, rec.annotator_id)] = rec

    def submit(self, record: AnnotationRecord) -> None:
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_record(), sort_keys=True) + "\n")
            self._records[(record.question_id, record.annotator_id)] = record

    def records(self) -> list[AnnotationRecord]:
        with self._lock:
            return list(self._records.values())

    def compact(self) -> None:
        with self._lock:
            tmp = self.path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                for rec in self._records.values():
                    fh.write(json.dumps(rec.to_record(), sort_keys=True) + "\n")
            os.replace(tmp, self.path)


@dataclass
class SelectionResult:
    kept_question_ids: set[str]
    rejected: dict[str, str]
    annotator_stats: dict[str, dict]

    def to_json(self) -> str:
        return json.dumps({
            "kept_question_ids": sorted(self.kept_question_ids),
            "rejected": dict(sorted(self.rejected.items())),
            "annotator_stats": dict(sorted(self.annotator_stats.items())),
        }, indent=2)


def select(records, gold_labels: dict[str, int]) -> SelectionResult:
    """Apply the three validity criteria; deterministic and order-independent."""
    for rec in records:
        if rec.question_id not in gold_labels:
            raise DataValidationError(
                f"record references unknown question {rec.question_id!r}")

    by_annotator: dict[str, list[AnnotationRecord]] = {}
    for rec in records:
        by_annotator.setdefault(rec.annotator_id, []).append(rec)

    stats = {}
    passing_annotators = set()
    for ann, recs in by_annotator.items():
        correct = sum(int(r.chosen_option == gold_labels[r.question_id])
                      for r in recs)
        acc = correct / len(recs)
        stats[ann] = {"n": len(recs), "accuracy": acc}
        if acc > ACCURACY_GATE:
            passing_annotators.add(ann)

    surviving_correct: dict[str, int] = {}
    rejected: dict[str, str] = {}
    seen_questions = set()
    for rec in sorted(records, key=lambda r: (r.question_id, r.annotator_id)):
        qid = rec.question_id
        seen_questions.add(qid)
        if rec.annotator_id not in passing_annotators:
            reason = "annotator accuracy not above 40%"
        elif rec.has_empty_span():
            reason = "empty span"
        elif (rec.difficulty == "easy"
                and rec.chosen_option != gold_labels[qid]):
            reason = "rated easy but answered incorrectly"
        else:
            if rec.chosen_option == gold_labels[qid]:
                surviving_correct[qid] = surviving_correct.get(qid, 0) + 1
            continue
        rejected.setdefault(qid, reason)

    kept = {q for q, n in surviving_correct.items() if n >= 1}
    rejected = {q: r for q, r in rejected.items() if q not in kept}
    for qid in seen_questions - kept:
        rejected.setdefault(qid, "no surviving correct record")
    return SelectionResult(kept_question_ids=kept, rejected=rejected,
                           annotator_stats=stats)


# -- HTTP API ------------------------------------------------------------


def create_app(questions: list[dict], store: AnnotationStore):
    """FastAPI app serving questions and collecting annotation records.

    ``questions`` are emitted question records; ids are their zero-based
    positions as strings unless an "id" field is present.
    """
    from fastapi import FastAPI, HTTPException
    from pydantic import BaseModel

    qindex = {}
    for i, q in enumerate(questions):
        qid = str(q.get("id", i))
        qindex[qid] = dict(q, id=qid)

    class SubmitBody(BaseModel):
        question_id: str
        annotator_id: str
        chosen_option: int
        passage_span: tuple[int, int]
        question_span: tuple[int, int]
        difficulty: str

    app = FastAPI(title="clozegen annotation service")

    def public_view(q):
        return {k: v for k, v in q.items() if k != "label"}

    @app.get("/api/questions/next")
    def next_question(annotator: str):
        done = {r.question_id for r in store.records()
                if r.annotator_id == annotator}
        for qid, q in qindex.items():
            if qid not in done:
                return {"question": public_view(q),
                        "remaining": len(qindex) - len(done)}
        return {"question": None, "remaining": 0}

    @app.get("/api/questions/{qid}")
    def get_question(qid: str):
        if qid not in qindex:
            raise HTTPException(status_code=404, detail="unknown question")
        return public_view(qindex[qid])

    @app.post("/api/annotations")
    def post_annotation(body: SubmitBody):
        if body.question_id not in qindex:
            raise HTTPException(status_code=404, detail="unknown question")
        q = qindex[body.question_id]
        rec = AnnotationRecord(
            question_id=body.question_id,
            annotator_id=body.annotator_id,
            chosen_option=body.chosen_option,
            passage_span=tuple(body.passage_span),
            question_span=tuple(body.question_span),
            difficulty=body.difficulty,
            timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        )
        try:
            rec.validate(passage_len=len(q["article"]),
                         question_len=len(q["question"]))
        except DataValidationError as exc:
            raise HTTPException(status_code=422,
                                detail={"reason": "invalid_span",
                                        "message": str(exc)})
        store.submit(rec)
        return {"status": "stored", "question_id": body.question_id,
                "annotator_id": body.annotator_id}

    @app.get("/api/export")
    def export():
        return {"records": [r.to_record() for r in store.records()]}

    @app.get("/api/selection")
    def selection():
        gold = {qid: int(q["label"]) for qid, q in qindex.items()}
        result = select(store.records(), gold)
        return json.loads(result.to_json())

    return app


def load_questions_file(path) -> list[dict]:
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"cannot open question file: {exc}")
    with fh:
        return [json.loads(line) for line in fh if line.strip()]
