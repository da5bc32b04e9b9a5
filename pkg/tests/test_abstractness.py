import math

import numpy as np
import pytest

from clozegen import abstractness as ab
from clozegen import lexicon as lx
from clozegen.errors import (DataValidationError, NoSenseError, OOVError,
                             ParseError)

from conftest import make_table, relative_error


# -- rating scale --------------------------------------------------------


def test_scale_rating_endpoints_and_midpoint():
    assert ab.scale_rating(158) == 0.0
    assert ab.scale_rating(670) == 1.0
    assert ab.scale_rating(414) == pytest.approx(0.5)


def test_scale_rating_out_of_range():
    with pytest.raises(DataValidationError):
        ab.scale_rating(157)
    with pytest.raises(DataValidationError):
        ab.scale_rating(671)


def test_rating_record_validation():
    ab.RatingRecord("ok", 300)
    with pytest.raises(DataValidationError):
        ab.RatingRecord("bad", 100)


def test_load_ratings(tmp_path):
    p = tmp_path / "ratings.tsv"
    p.write_text("Apple\t600\n\nidea\t230\n")
    recs = ab.load_ratings(p)
    assert [(r.word, r.raw_rating) for r in recs] == \
        [("apple", 600), ("idea", 230)]


def test_load_ratings_bad_line(tmp_path):
    p = tmp_path / "ratings.tsv"
    p.write_text("apple 600\n")
    with pytest.raises(ParseError):
        ab.load_ratings(p)


# -- pearson -------------------------------------------------------------


def test_pearson_hand_value():
    # x=(1,2,3), y=(2,1,3): cov terms give r = 1/2
    assert ab.pearson([1, 2, 3], [2, 1, 3]) == pytest.approx(0.5)
    assert ab.pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert ab.pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)


def test_pearson_matches_numpy_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.normal(size=30)
        y = rng.normal(size=30)
        assert ab.pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1])


def test_pearson_zero_variance():
    with pytest.raises(ValueError):
        ab.pearson([1, 1, 1], [1, 2, 3])


# -- scorer gradients ----------------------------------------------------


def test_scorer_gradients_match_finite_differences():
    rng = np.random.default_rng(11)
    scorer = ab.RegressionScorer(d=5, h1=4, h2=3, seed=1)
    X = rng.normal(size=(7, 5))
    t = rng.uniform(0.1, 0.9, size=7)
    _, grads = scorer.loss_and_grads(X, t)
    eps = 1e-6
    for name, g in grads.items():
        p = scorer.params[name]
        num = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = p[idx]
            p[idx] = orig + eps
            lp, _ = scorer.loss_and_grads(X, t)
            p[idx] = orig - eps
            lm, _ = scorer.loss_and_grads(X, t)
            p[idx] = orig
            num[idx] = (lp - lm) / (2 * eps)
        assert relative_error(g, num) < 1e-4, name


def test_scorer_memorizes_single_record():
    table = make_table(["solo"], dim=6, seed=2)
    data = [ab.RatingRecord("solo", 600)]
    res = ab.train_scorer(data, table,
                          {"h1": 8, "h2": 4, "epochs": 400, "seed": 0})
    pred = ab.imperceptibility("solo", res.scorer, table)
    assert pred == pytest.approx(ab.scale_rating(600), abs=0.05)


def test_scorer_drops_oov_records():
    table = make_table(["known"], dim=4)
    data = [ab.RatingRecord("known", 400), ab.RatingRecord("ghost", 300)]
    res = ab.train_scorer(data, table, {"h1": 4, "h2": 3, "epochs": 1})
    assert res.n_dropped_oov == 1


def test_scorer_all_oov_rejected():
    table = make_table(["known"], dim=4)
    with pytest.raises(DataValidationError):
        ab.train_scorer([ab.RatingRecord("ghost", 300)], table)


def test_full_batch_training_loss_nonincreasing():
    rng = np.random.default_rng(5)
    words = [f"w{i}" for i in range(16)]
    table = make_table(words, dim=6, seed=4)
    data = [ab.RatingRecord(w, int(rng.integers(158, 671))) for w in words]
    res = ab.train_scorer(data, table,
                          {"h1": 8, "h2": 4, "epochs": 40, "batch": 16,
                           "lr": 1e-3, "seed": 0})
    losses = res.epoch_losses
    # small-step full-batch optimization should trend down monotonically
    assert all(b <= a + 1e-8 for a, b in zip(losses, losses[1:]))


def test_scorer_learns_synthetic_signal():
    # targets are a smooth function of the vector -> high test correlation
    rng = np.random.default_rng(9)
    words = [f"w{i}" for i in range(200)]
    table = make_table(words, dim=8, seed=7)
    def target(w):
        return 1.0 / (1.0 + math.exp(-table.get(w).mean() * 3.0))
    data = [ab.RatingRecord(
        w, int(round(158 + target(w) * (670 - 158)))) for w in words]
    train, test = data[:160], data[160:]
    res = ab.train_scorer(train, table,
                          {"h1": 32, "h2": 16, "epochs": 300, "seed": 0})
    preds = [ab.imperceptibility(r.word, res.scorer, table) for r in test]
    gold = [ab.scale_rating(r.raw_rating) for r in test]
    assert ab.pearson(preds, gold) >= 0.95


def test_scorer_training_is_deterministic():
    words = [f"w{i}" for i in range(12)]
    table = make_table(words, dim=5, seed=1)
    data = [ab.RatingRecord(w, 200 + 30 * i) for i, w in enumerate(words)]
    h = {"h1": 6, "h2": 4, "epochs": 5, "seed": 3}
    r1 = ab.train_scorer(data, table, h)
    r2 = ab.train_scorer(data, table, h)
    for name in r1.scorer.params:
        np.testing.assert_array_equal(r1.scorer.params[name],
                                      r2.scorer.params[name])


def test_scorer_checkpoint_roundtrip(tmp_path):
    scorer = ab.RegressionScorer(d=5, h1=4, h2=3, seed=8)
    path = tmp_path / "scorer.txt"
    scorer.save(path)
    loaded = ab.RegressionScorer.load(path)
    X = np.random.default_rng(0).normal(size=(4, 5))
    np.testing.assert_array_equal(scorer.forward(X), loaded.forward(X))


def test_scorer_checkpoint_bad_magic(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("something else\n")
    with pytest.raises(ParseError):
        ab.RegressionScorer.load(p)


def test_imperceptibility_oov():
    table = make_table(["known"], dim=4)
    scorer = ab.RegressionScorer(d=4, h1=3, h2=2)
    with pytest.raises(OOVError):
        ab.imperceptibility("ghost", scorer, table)


# -- phrase overlap / Lesk -----------------------------------------------


def test_phrase_overlap_squares_contiguity():
    # shared bigram scores 4 > two isolated unigrams at 1 + 1
    assert ab.phrase_overlap_score(["deep", "blue", "sea"],
                                   ["deep", "blue", "sky"]) == 4
    assert ab.phrase_overlap_score(["a", "b"], ["a", "b"]) == 4
    assert ab.phrase_overlap_score(["a", "x", "b"], ["a", "y", "b"]) == 2
    assert ab.phrase_overlap_score(["a", "b", "c"], ["a", "b", "c"]) == 9
    assert ab.phrase_overlap_score(["a", "b"], ["b", "a"]) == 2
    assert ab.phrase_overlap_score([], ["a"]) == 0
    assert ab.phrase_overlap_score(["a"], []) == 0


def test_phrase_overlap_removes_matched_spans():
    # "a b" matches as a bigram; leftover "a" matches the remaining "a"
    assert ab.phrase_overlap_score(["a", "b", "a"],
                                   ["a", "b", "c", "a"]) == 4 + 1
    # identical sequences collapse to one maximal run
    assert ab.phrase_overlap_score(["a", "b", "a"], ["a", "b", "a"]) == 9


def test_phrase_overlap_zero_when_disjoint():
    assert ab.phrase_overlap_score(["x", "y"], ["p", "q"]) == 0


def test_sense_signature_includes_relatives(toy_lex):
    sig = ab.sense_signature("n.whale", toy_lex)
    # own gloss + example + hypernym gloss words present, stopwords gone
    assert "marine" in sig and "surfaced" in sig and "backbone" in sig
    assert "the" not in sig


def test_disambiguate_bank_river_sense(toy_lex):
    ctx = ("the water rose over the sloping land beside the river".split())
    choice = ab.disambiguate("bank", ctx, toy_lex, pos=lx.NOUN)
    assert choice.chosen_synset == "n.bank_river"
    ctx2 = "he made a deposits of money at the financial institution".split()
    choice2 = ab.disambiguate("bank", ctx2, toy_lex, pos=lx.NOUN)
    assert choice2.chosen_synset == "n.bank_money"


def test_disambiguate_zero_overlap_falls_to_first_sense(toy_lex):
    choice = ab.disambiguate("bank", ["zebra", "quartz"], toy_lex,
                             pos=lx.NOUN)
    assert choice.chosen_synset == toy_lex.senses("bank", lx.NOUN)[0]
    assert choice.score == 0.0


def test_disambiguate_no_sense(toy_lex):
    with pytest.raises(NoSenseError):
        ab.disambiguate("zzzqx", ["context"], toy_lex)


def test_disambiguate_ignores_context_order_for_unigrams(toy_lex):
    ctx = "river water sloping land".split()
    a = ab.disambiguate("bank", ctx, toy_lex, pos=lx.NOUN)
    b = ab.disambiguate("bank", list(reversed(ctx)), toy_lex, pos=lx.NOUN)
    assert a.chosen_synset == b.chosen_synset


def test_nonspecificity_depths(toy_lex):
    ctx = "that whale surfaced near the boat".split()
    assert ab.nonspecificity("whale", ctx, [], toy_lex, lx.NOUN) == 4
    assert ab.nonspecificity("entity", [], ["exists"], toy_lex, lx.NOUN) == 0
    assert ab.nonspecificity("grow", [], ["size"], toy_lex, lx.VERB) == 0


def test_nonspecificity_rejects_adjectives(toy_lex):
    with pytest.raises(DataValidationError):
        ab.nonspecificity("big", [], [], toy_lex, lx.ADJ)


def test_content_lemmas_strips_stopwords():
    assert ab.content_lemmas("The whale and the boat") == ["whale", "boat"]
