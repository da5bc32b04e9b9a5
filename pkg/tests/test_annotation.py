import random

import pytest
from fastapi.testclient import TestClient

from clozegen import annotation as an
from clozegen.annotation import AnnotationRecord, AnnotationStore, select
from clozegen.errors import DataValidationError


def _rec(qid, ann, chosen, difficulty="medium", pspan=(0, 3), qspan=(0, 3)):
    return AnnotationRecord(question_id=qid, annotator_id=ann,
                            chosen_option=chosen, passage_span=pspan,
                            question_span=qspan, difficulty=difficulty)


# -- record validation ---------------------------------------------------


def test_record_validation():
    _rec("q0", "a", 0).validate(passage_len=10, question_len=10)
    with pytest.raises(DataValidationError):
        _rec("q0", "a", 5).validate()
    with pytest.raises(DataValidationError):
        _rec("q0", "a", 0, difficulty="trivial").validate()
    with pytest.raises(DataValidationError):
        _rec("q0", "a", 0, pspan=(3, 3)).validate()
    with pytest.raises(DataValidationError):
        _rec("q0", "a", 0, pspan=(-1, 2)).validate()
    with pytest.raises(DataValidationError):
        _rec("q0", "a", 0, qspan=(0, 20)).validate(passage_len=10,
                                                   question_len=10)


def test_record_roundtrip():
    rec = _rec("q1", "ann", 3, difficulty="hard", pspan=(2, 9), qspan=(1, 4))
    back = AnnotationRecord.from_record(rec.to_record())
    assert back == rec


# -- store ---------------------------------------------------------------


def test_store_latest_wins_and_persists(tmp_path):
    path = tmp_path / "log.jsonl"
    store = AnnotationStore(path)
    store.submit(_rec("q0", "a", 0))
    store.submit(_rec("q0", "a", 2))   # resubmission replaces
    store.submit(_rec("q1", "a", 1))
    assert {(r.question_id, r.chosen_option) for r in store.records()} == \
        {("q0", 2), ("q1", 1)}
    # the log is append-only: three physical lines
    assert len(path.read_text().splitlines()) == 3
    # a fresh load applies latest-wins
    reloaded = AnnotationStore(path)
    assert {(r.question_id, r.chosen_option) for r in reloaded.records()} == \
        {("q0", 2), ("q1", 1)}
    reloaded.compact()
    assert len(path.read_text().splitlines()) == 2


# -- selection rules -----------------------------------------------------

GOLD = {"q0": 0, "q1": 1, "q2": 2, "q3": 3, "q4": 4}


def test_accuracy_exactly_40_percent_is_dropped():
    # annotator "low" answers 2 of 5 correctly -> exactly 0.40, dropped
    recs = [
        _rec("q0", "low", 0), _rec("q1", "low", 1),
        _rec("q2", "low", 0), _rec("q3", "low", 0), _rec("q4", "low", 0),
    ]
    res = select(recs, GOLD)
    assert res.annotator_stats["low"]["accuracy"] == pytest.approx(0.40)
    assert res.kept_question_ids == set()
    assert all("40%" in r for r in res.rejected.values())


def test_accuracy_above_40_percent_passes():
    recs = [
        _rec("q0", "ok", 0), _rec("q1", "ok", 1),
        _rec("q2", "ok", 2), _rec("q3", "ok", 0), _rec("q4", "ok", 0),
    ]
    res = select(recs, GOLD)   # 3/5 = 0.6
    assert res.kept_question_ids == {"q0", "q1", "q2"}
    assert res.rejected["q3"] == "no surviving correct record"


def test_empty_span_record_dropped():
    recs = [
        _rec("q0", "ok", 0, pspan=(3, 3)),
        _rec("q1", "ok", 1),
    ]
    res = select(recs, GOLD)   # accuracy 1.0, but q0's span is empty
    assert res.kept_question_ids == {"q1"}
    assert res.rejected["q0"] == "empty span"


def test_easy_but_wrong_dropped():
    recs = [
        _rec("q0", "ok", 0),
        _rec("q1", "ok", 0, difficulty="easy"),   # wrong and rated easy
        _rec("q2", "ok", 2),
    ]
    res = select(recs, GOLD)   # accuracy 2/3 > 0.4
    assert res.kept_question_ids == {"q0", "q2"}
    assert res.rejected["q1"] == "rated easy but answered incorrectly"


def test_hard_but_wrong_survives_as_record_but_not_kept():
    # a wrong non-easy record survives filtering yet is not a correct record
    recs = [_rec("q0", "ok", 1, difficulty="hard"), _rec("q1", "ok", 1)]
    res = select(recs, GOLD)
    assert res.kept_question_ids == {"q1"}
    assert res.rejected["q0"] == "no surviving correct record"


def test_question_kept_with_one_surviving_correct_record():
    recs = [
        _rec("q0", "good", 0),                      # correct, survives
        _rec("q0", "bad", 3), _rec("q1", "bad", 3),  # 0% accuracy annotator
    ]
    res = select(recs, GOLD)
    assert "q0" in res.kept_question_ids
    assert res.rejected["q1"] == "annotator accuracy not above 40%"


def test_unknown_question_rejected():
    with pytest.raises(DataValidationError):
        select([_rec("mystery", "a", 0)], GOLD)


def test_selection_is_order_independent():
    rng = random.Random(0)
    recs = [
        _rec("q0", "good", 0), _rec("q1", "good", 1),
        _rec("q2", "good", 0, difficulty="easy"),
        _rec("q0", "bad", 2), _rec("q3", "bad", 1),
        _rec("q4", "mid", 4), _rec("q3", "mid", 0, pspan=(1, 1)),
    ]
    base = select(list(recs), GOLD)
    for _ in range(10):
        rng.shuffle(recs)
        res = select(list(recs), GOLD)
        assert res.kept_question_ids == base.kept_question_ids
        assert res.rejected == base.rejected
        assert res.annotator_stats == base.annotator_stats


def test_adding_correct_record_is_monotone():
    recs = [_rec("q0", "good", 0)]
    before = select(recs, GOLD).kept_question_ids
    recs.append(_rec("q1", "second", 1))
    after = select(recs, GOLD).kept_question_ids
    assert before <= after


# -- HTTP API ------------------------------------------------------------

QUESTIONS = [
    {"article": "alpha beta gamma delta words here", "question": "a @placeholder b",
     "option_0": "v", "option_1": "w", "option_2": "x", "option_3": "y",
     "option_4": "z", "label": 2},
    {"article": "more passage text for the second", "question": "c @placeholder d",
     "option_0": "v", "option_1": "w", "option_2": "x", "option_3": "y",
     "option_4": "z", "label": 0},
]


@pytest.fixture()
def client(tmp_path):
    store = AnnotationStore(tmp_path / "log.jsonl")
    app = an.create_app([dict(q) for q in QUESTIONS], store)
    return TestClient(app)


def _body(qid="0", ann="a1", chosen=2, pspan=(0, 5), qspan=(0, 1),
          difficulty="medium"):
    return {"question_id": qid, "annotator_id": ann, "chosen_option": chosen,
            "passage_span": list(pspan), "question_span": list(qspan),
            "difficulty": difficulty}


def test_api_next_question_hides_label(client):
    r = client.get("/api/questions/next", params={"annotator": "a1"})
    assert r.status_code == 200
    q = r.json()["question"]
    assert "label" not in q and q["id"] == "0"
    assert r.json()["remaining"] == 2


def test_api_next_advances_after_submission(client):
    client.post("/api/annotations", json=_body(qid="0"))
    r = client.get("/api/questions/next", params={"annotator": "a1"})
    assert r.json()["question"]["id"] == "1"
    client.post("/api/annotations", json=_body(qid="1"))
    r = client.get("/api/questions/next", params={"annotator": "a1"})
    assert r.json() == {"question": None, "remaining": 0}
    # a different annotator still sees everything
    r = client.get("/api/questions/next", params={"annotator": "a2"})
    assert r.json()["question"]["id"] == "0"


def test_api_get_question_and_404(client):
    assert client.get("/api/questions/1").json()["id"] == "1"
    assert client.get("/api/questions/99").status_code == 404


def test_api_submit_and_export_idempotent(client):
    assert client.post("/api/annotations",
                       json=_body(chosen=1)).status_code == 200
    assert client.post("/api/annotations",
                       json=_body(chosen=2)).status_code == 200
    recs = client.get("/api/export").json()["records"]
    assert len(recs) == 1
    assert recs[0]["chosen_option"] == 2
    assert recs[0]["timestamp"]


def test_api_invalid_span_reason_code(client):
    r = client.post("/api/annotations", json=_body(pspan=(4, 4)))
    assert r.status_code == 422
    assert r.json()["detail"]["reason"] == "invalid_span"
    r = client.post("/api/annotations", json=_body(pspan=(0, 10_000)))
    assert r.status_code == 422
    assert r.json()["detail"]["reason"] == "invalid_span"


def test_api_unknown_question_404(client):
    assert client.post("/api/annotations",
                       json=_body(qid="42")).status_code == 404


def test_api_selection_endpoint(client):
    # annotator answers both gold labels correctly -> both questions kept
    client.post("/api/annotations", json=_body(qid="0", chosen=2))
    client.post("/api/annotations", json=_body(qid="1", chosen=0))
    out = client.get("/api/selection").json()
    assert out["kept_question_ids"] == ["0", "1"]
    assert out["annotator_stats"]["a1"]["accuracy"] == 1.0


def test_load_questions_file(tmp_path):
    import json
    p = tmp_path / "qs.jsonl"
    p.write_text("".join(json.dumps(q) + "\n" for q in QUESTIONS))
    assert an.load_questions_file(p) == QUESTIONS
