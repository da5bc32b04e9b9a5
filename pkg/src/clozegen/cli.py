"""Command-line entry point.

Exit codes: 0 ok, 2 usage, 3 resource, 4 data validation, 5 divergence.
Relative resource paths are also resolved against $CLOZEGEN_RESOURCE_ROOT.
Configuration precedence: flags > --config file > defaults.
"""

from __future__ import annotations

import csv
import json
import os
import sys

import click
import numpy as np

from . import abstractness as ab
from . import annotation as an
from . import lexicon as lx
from . import metrics as mt
from . import pipeline, qgen, toydata
from .embeddings import load_contextual_vectors, load_embeddings
from .errors import (ClozegenError, ConfigError, DataValidationError,
                     DivergenceError, ParseError, ResourceError)
from .readers import ReaderModel, TrainingConfig, load_checkpoint, train
from .readers.models import VARIANTS


def _rpath(path):
    """Resolve a path, falling back to $CLOZEGEN_RESOURCE_ROOT."""
    if path is None:
        return None
    if os.path.exists(path) or os.path.isabs(path):
        return path
    root = os.environ.get("CLOZEGEN_RESOURCE_ROOT")
    if root:
        candidate = os.path.join(root, path)
        if os.path.exists(candidate):
            return candidate
    return path


@click.group()
@click.option("--config", type=click.Path(exists=True), default=None,
              help="JSON file with per-subcommand option defaults.")
@click.pass_context
def cli(ctx, config):
    if config:
        with open(config, encoding="utf-8") as fh:
            ctx.default_map = json.load(fh)


reader_options = [
    click.option("--hidden", default=150, show_default=True,
                 help="GRU hidden size per direction."),
    click.option("--hops", default=3, show_default=True),
    click.option("--batch", default=32, show_default=True),
    click.option("--lr", default=1e-3, show_default=True),
    click.option("--dropout", default=0.3, show_default=True),
    click.option("--epochs", default=10, show_default=True),
]


def with_options(opts):
    def deco(f):
        for opt in reversed(opts):
            f = opt(f)
        return f
    return deco


def _reader_cfg(table, hidden, hops, batch, lr, dropout, epochs, seed):
    return TrainingConfig(embedding_dim=table.dim, hidden=hidden, hops=hops,
                          batch=batch, lr=lr, dropout=dropout,
                          epochs=epochs, seed=seed)


@cli.command("make-fixtures")
@click.option("--out", required=True, type=click.Path())
@click.option("--pairs", default=20, show_default=True)
@click.option("--seed", default=0, show_default=True)
def make_fixtures(out, pairs, seed):
    """Write the deterministic toy corpus, lexicon, embeddings, ratings."""
    paths = toydata.write_toy_resources(out, n_pairs=pairs, seed=seed)
    click.echo(json.dumps(paths, indent=2))


@cli.command("train-scorer")
@click.option("--ratings", required=True)
@click.option("--embeddings", "embeddings_path", required=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--h1", default=128, show_default=True)
@click.option("--h2", default=64, show_default=True)
@click.option("--lr", default=1e-3, show_default=True)
@click.option("--epochs", default=200, show_default=True)
@click.option("--batch", default=32, show_default=True)
@click.option("--seed", default=0, show_default=True)
def train_scorer_cmd(ratings, embeddings_path, out, h1, h2, lr, epochs,
                     batch, seed):
    """Train the concreteness regression scorer and report Pearson r."""
    table = load_embeddings(_rpath(embeddings_path))
    records = ab.load_ratings(_rpath(ratings))
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(records))
    # the 2,148/1,877 split applies when the full 4,025-word database is given
    n_train = 2148 if len(records) == 4025 else max(2, int(0.8 * len(records)))
    train_recs = [records[i] for i in order[:n_train]]
    test_recs = [records[i] for i in order[n_train:]]
    result = ab.train_scorer(train_recs, table,
                             {"h1": h1, "h2": h2, "lr": lr, "epochs": epochs,
                              "batch": batch, "seed": seed})
    result.scorer.save(out)
    report = {"final_train_mse": result.final_train_mse,
              "n_dropped_oov": result.n_dropped_oov,
              "n_train": len(train_recs), "n_test": len(test_recs)}
    for name, recs in (("train", train_recs), ("test", test_recs)):
        kept = [r for r in recs if r.word in table]
        if len(kept) >= 2:
            preds = [ab.imperceptibility(r.word, result.scorer, table)
                     for r in kept]
            gold = [ab.scale_rating(r.raw_rating) for r in kept]
            try:
                report[f"{name}_pearson"] = ab.pearson(preds, gold)
            except ValueError:
                report[f"{name}_pearson"] = None
    click.echo(json.dumps(report, indent=2))


@cli.command("score")
@click.option("--word", required=True)
@click.option("--embeddings", "embeddings_path", default=None)
@click.option("--scorer", "scorer_path", default=None)
@click.option("--lexicon", "lexicon_dir", default=None)
def score_cmd(word, embeddings_path, scorer_path, lexicon_dir):
    """Print both abstractness values for one word."""
    out = {"word": word}
    if scorer_path and embeddings_path:
        table = load_embeddings(_rpath(embeddings_path))
        scorer = ab.RegressionScorer.load(_rpath(scorer_path))
        try:
            out["imperceptibility"] = ab.imperceptibility(word, scorer, table)
        except ClozegenError as exc:
            out["imperceptibility"] = None
            out["imperceptibility_error"] = str(exc)
    if lexicon_dir:
        lex = lx.load_lexicon(_rpath(lexicon_dir))
        depths = {}
        for pos in (lx.NOUN, lx.VERB):
            try:
                choice = ab.disambiguate(word, [], lex, pos=pos)
                depths[pos] = lex.hypernym_depth(choice.chosen_synset)
            except ClozegenError:
                continue
        out["nonspecificity"] = depths or None
    click.echo(json.dumps(out, indent=2))


@cli.command("generate")
@click.option("--corpus", "corpus_path", required=True)
@click.option("--lexicon", "lexicon_dir", required=True)
@click.option("--embeddings", "embeddings_path", required=True)
@click.option("--subtask", required=True,
              type=click.Choice(list(qgen.SUBTASKS)))
@click.option("--scorer", "scorer_path", default=None,
              help="Required for the imperceptibility subtask.")
@click.option("--contextual", "contextual_path", default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--manifest", "manifest_path", default=None, type=click.Path())
@click.option("--folds", default=4, show_default=True)
@click.option("--seed", default=0, show_default=True)
@with_options(reader_options)
def generate_cmd(corpus_path, lexicon_dir, embeddings_path, subtask,
                 scorer_path, contextual_path, out, manifest_path, folds,
                 seed, hidden, hops, batch, lr, dropout, epochs):
    """Generate 5-option cloze questions from a passage/summary corpus."""
    from . import corpus as cp

    lex = lx.load_lexicon(_rpath(lexicon_dir))
    table = load_embeddings(_rpath(embeddings_path))
    pairs = cp.ingest(_rpath(corpus_path))
    scorer = None
    if subtask == qgen.IMPERCEPTIBILITY:
        if not scorer_path:
            raise click.UsageError(
                "--scorer is required for the imperceptibility subtask")
        scorer = ab.RegressionScorer.load(_rpath(scorer_path))
    ctx = load_contextual_vectors(_rpath(contextual_path)) \
        if contextual_path else None
    cfg = _reader_cfg(table, hidden, hops, batch, lr, dropout, epochs, seed)
    questions, manifest, _ = pipeline.generate_questions(
        pairs, lex, table, subtask, scorer=scorer, ctx=ctx,
        reader_cfg=cfg, folds=folds, seed=seed)
    manifest.input_hashes = {
        "corpus": pipeline.file_hash(_rpath(corpus_path)),
        "embeddings": pipeline.file_hash(_rpath(embeddings_path)),
    }
    pipeline.write_questions(questions, out)
    pipeline.write_manifest(manifest, manifest_path or out + ".manifest.json")
    click.echo(f"emitted {len(questions)} questions "
               f"({manifest.counts['drafts']} drafts)")


@cli.command("train-reader")
@click.option("--variant", required=True, type=click.Choice(list(VARIANTS)))
@click.option("--questions", "questions_path", required=True)
@click.option("--embeddings", "embeddings_path", required=True)
@click.option("--lexicon", "lexicon_dir", default=None,
              help="Gloss source for the amwg variant.")
@click.option("--out", required=True, type=click.Path())
@click.option("--curve", "curve_path", default=None, type=click.Path())
@click.option("--seed", default=0, show_default=True)
@with_options(reader_options)
def train_reader_cmd(variant, questions_path, embeddings_path, lexicon_dir,
                     out, curve_path, seed, hidden, hops, batch, lr,
                     dropout, epochs):
    """Train one reader variant on an emitted question file."""
    table = load_embeddings(_rpath(embeddings_path))
    records = an.load_questions_file(_rpath(questions_path))
    items = [qgen.question_to_reader_item(r, str(i))
             for i, r in enumerate(records)]
    vocab = sorted({w for it in items for w in it.candidates})
    glosses = {}
    if lexicon_dir:
        lex = lx.load_lexicon(_rpath(lexicon_dir))
        glosses = {w: lex.gloss_for_candidate(w) for w in vocab}
    cfg = _reader_cfg(table, hidden, hops, batch, lr, dropout, epochs, seed)
    model = ReaderModel(variant, vocab, table, cfg, glosses=glosses)
    result = train(model, items)
    model.save(out)
    if curve_path:
        with open(curve_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "split", "loss", "accuracy"])
            for epoch, loss, acc in result.curve:
                writer.writerow([epoch, "train", f"{loss:.6f}", f"{acc:.6f}"])
    final = result.curve[-1]
    click.echo(f"trained {variant}: loss {final[1]:.4f} "
               f"accuracy {final[2]:.4f}")


@cli.command("predict")
@click.option("--model", "model_path", required=True)
@click.option("--questions", "questions_path", required=True)
@click.option("--embeddings", "embeddings_path", required=True)
@click.option("--out", required=True, type=click.Path())
def predict_cmd(model_path, questions_path, embeddings_path, out):
    """Rank each question's options with a trained reader."""
    table = load_embeddings(_rpath(embeddings_path))
    model = load_checkpoint(_rpath(model_path), table)
    records = an.load_questions_file(_rpath(questions_path))
    with open(out, "w", encoding="utf-8") as fh:
        for i, rec in enumerate(records):
            item = qgen.question_to_reader_item(rec, str(rec.get("id", i)))
            probs = model.predict_probs(item)
            order = sorted(range(len(probs)),
                           key=lambda t: (-probs[t], item.candidates[t]))
            fh.write(json.dumps({
                "id": item.id,
                "label": int(np.argmax(probs)),
                "ranking": [item.candidates[t] for t in order],
            }) + "\n")
    click.echo(f"wrote predictions for {len(records)} questions")


@cli.command("evaluate")
@click.option("--predictions", "pred_path", required=True)
@click.option("--gold", "gold_path", required=True)
@click.option("--out", "out_path", default=None, type=click.Path())
def evaluate_cmd(pred_path, gold_path, out_path):
    """Score a prediction file against a gold question file."""
    golds = an.load_questions_file(_rpath(gold_path))
    with open(_rpath(pred_path), encoding="utf-8") as fh:
        preds = {str(p["id"]): p
                 for p in (json.loads(line) for line in fh if line.strip())}
    pred_labels, gold_labels, ranked = [], [], []
    for i, g in enumerate(golds):
        qid = str(g.get("id", i))
        if qid not in preds:
            raise DataValidationError(f"missing prediction for question {qid}")
        p = preds[qid]
        gold_word = g[f"option_{g['label']}"]
        gold_labels.append(int(g["label"]))
        if "label" in p:
            pred_labels.append(int(p["label"]))
        elif "ranking" in p:
            options = [g[f"option_{t}"] for t in range(5)]
            pred_labels.append(options.index(p["ranking"][0]))
        else:
            raise DataValidationError(f"prediction {qid} has no label/ranking")
        if "ranking" in p:
            ranked.append(mt.RankedPrediction(qid, p["ranking"], gold_word))
    report = {"accuracy": mt.accuracy(pred_labels, gold_labels),
              "n_items": len(gold_labels)}
    if ranked:
        rr = mt.ranking_report(ranked)
        report.update({"mrr": rr.mrr,
                       "recall_at": {str(k): v for k, v in rr.recall_at.items()}})
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    click.echo(text)


@cli.command("cross-eval")
@click.option("--model", "model_path", required=True)
@click.option("--questions", "questions_path", required=True)
@click.option("--embeddings", "embeddings_path", required=True)
@click.option("--train-source", required=True)
@click.option("--test-source", required=True)
@click.option("--same-task-accuracy", type=float, default=None,
              help="Same-task accuracy for the degradation delta.")
@click.option("--out", "out_path", default=None, type=click.Path())
def cross_eval_cmd(model_path, questions_path, embeddings_path, train_source,
                   test_source, same_task_accuracy, out_path):
    """Evaluate a reader trained on one subtask against another's testset."""
    table = load_embeddings(_rpath(embeddings_path))
    model = load_checkpoint(_rpath(model_path), table)
    questions = an.load_questions_file(_rpath(questions_path))
    report = mt.evaluate_questions(model, questions, train_source,
                                   test_source,
                                   same_task_accuracy=same_task_accuracy)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    click.echo(report.to_table())


@cli.command("serve")
@click.option("--questions", "questions_path", required=True)
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve_cmd(questions_path, store_path, host, port):
    """Run the annotation HTTP service."""
    import uvicorn

    questions = an.load_questions_file(_rpath(questions_path))
    store = an.AnnotationStore(store_path)
    app = an.create_app(questions, store)
    uvicorn.run(app, host=host, port=port)


@cli.command("select")
@click.option("--records", "records_path", required=True)
@click.option("--questions", "questions_path", required=True)
@click.option("--out", "out_path", default=None, type=click.Path())
def select_cmd(records_path, questions_path, out_path):
    """Apply the annotation validity criteria and report kept questions."""
    questions = an.load_questions_file(_rpath(questions_path))
    gold = {str(q.get("id", i)): int(q["label"])
            for i, q in enumerate(questions)}
    store = an.AnnotationStore(_rpath(records_path))
    result = an.select(store.records(), gold)
    text = result.to_json()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    click.echo(text)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except ResourceError as exc:
        click.echo(f"resource error: {exc}", err=True)
        return 3
    except (ParseError, DataValidationError, ConfigError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return 4
    except DivergenceError as exc:
        click.echo(f"divergence: {exc}", err=True)
        return 5
    except ClozegenError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
