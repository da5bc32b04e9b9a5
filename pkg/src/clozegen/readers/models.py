"""The three baseline cloze readers and their training loop.

All variants share the same skeleton: bidirectional GRU encoders over
passage and summary, the encoder state at the "@placeholder" position as
the summary representation, bilinear attention over passage states, and a
bilinear score against candidate-word representations. ``GA`` adds
gated-attention hops before the attention, ``AMWG`` adds an attended
gloss encoding to each candidate representation, and ``ATT`` is the
gloss-free variant of ``AMWG``.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DivergenceError, ParseError, ResourceError
from ..optim import Adam
from . import autodiff as ad
from .autodiff import Tensor
from .gru import BiGRUEncoder

GA = "ga"
ATT = "att"
AMWG = "amwg"
VARIANTS = (GA, ATT, AMWG)

PLACEHOLDER = "@placeholder"
UNK = "<unk>"


@dataclass
class TrainingConfig:
    embedding_dim: int = 300
    hidden: int = 150       # per direction
    hops: int = 3           # GA only
    batch: int = 32
    lr: float = 1e-3
    dropout: float = 0.3
    epochs: int = 10
    seed: int = 0

    def __post_init__(self):
        if min(self.embedding_dim, self.hidden, self.hops,
               self.batch, self.epochs) <= 0 or self.lr <= 0:
            raise ConfigError("hyperparameters must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must be in [0, 1)")


@dataclass
class ReaderItem:
    id: str
    passage: list[str]          # lowercase tokens
    summary: list[str]          # lowercase tokens, contains "@placeholder"
    candidates: list[str]
    gold_index: int

    @property
    def placeholder_index(self) -> int:
        try:
            return self.summary.index(PLACEHOLDER)
        except ValueError:
            raise ConfigError(f"item {self.id}: summary has no {PLACEHOLDER}")


def tokenize_gloss(text: str) -> list[str]:
    # POS delimiter tags like <noun> stay single tokens
    return re.findall(r"<[a-z]+>|[\w']+", text.lower())


class ReaderModel:
    """One of the three reader variants with its parameters and vocab."""

    def __init__(self, variant, vocab, table, cfg: TrainingConfig,
                 glosses=None):
        if variant not in VARIANTS:
            raise ConfigError(f"unknown variant {variant!r}")
        if table.dim != cfg.embedding_dim:
            raise ConfigError(
                f"embedding table dim {table.dim} != configured "
                f"{cfg.embedding_dim}")
        self.variant = variant
        self.cfg = cfg
        self.table = table
        self.vocab = list(vocab)
        self.vocab_index = {w: i for i, w in enumerate(self.vocab)}
        self.unk_index = len(self.vocab)
        self.glosses = {w: tokenize_gloss(g) for w, g in (glosses or {}).items()}

        e, h = cfg.embedding_dim, cfg.hidden
        rng = np.random.default_rng(cfg.seed)
        self.params: dict[str, np.ndarray] = {}
        self.passage_enc = BiGRUEncoder("penc", e, h)
        self.summary_enc = BiGRUEncoder("senc", e, h)
        self.passage_enc.init_params(self.params, rng)
        self.summary_enc.init_params(self.params, rng)

        # candidate token embeddings, trainable, UNK row appended
        emb = np.stack([
            table.get(w) if w in table else rng.normal(0, 0.1, e)
            for w in self.vocab
        ] + [rng.normal(0, 0.1, e)])
        self.params["cand_emb"] = emb

        k = 1.0 / np.sqrt(2 * h)
        if variant == GA:
            self.params["W_att"] = rng.uniform(-k, k, (2 * h, 2 * h))
            self.params["W_p"] = rng.uniform(-k, k, (e, 4 * h))
        else:
            self.params["W_att_p"] = rng.uniform(-k, k, (2 * h, 2 * h))
            if variant == AMWG:
                self.gloss_enc = BiGRUEncoder("genc", e, h)
                self.gloss_enc.init_params(self.params, rng)
                gvocab = sorted({t for toks in self.glosses.values() for t in toks})
                self.gloss_vocab = gvocab
                self.gloss_index = {w: i for i, w in enumerate(gvocab)}
                # gloss text keeps its own trainable embeddings
                gemb = np.stack([
                    table.get(w) if w in table else rng.normal(0, 0.1, e)
                    for w in gvocab
                ] + [rng.normal(0, 0.1, e)]) if gvocab else rng.normal(0, 0.1, (1, e))
                self.params["gloss_emb"] = gemb
                self.params["W_att_g"] = rng.uniform(-k, k, (2 * h, 4 * h))
                self.params["b_att_g"] = np.zeros(2 * h)
                self.params["W_pred"] = rng.uniform(-k, k, (e + 2 * h, 4 * h))
            else:
                self.params["W_pred"] = rng.uniform(-k, k, (e, 4 * h))

    # -- embedding helpers ------------------------------------------------

    def _embed_text(self, tokens) -> Tensor:
        e = self.cfg.embedding_dim
        rows = np.zeros((len(tokens), e))
        for i, tok in enumerate(tokens):
            if tok in self.table:
                rows[i] = self.table.get(tok)
        return Tensor(rows)

    def _candidate_indices(self, words):
        return [self.vocab_index.get(w, self.unk_index) for w in words]

    def _dropout(self, t: Tensor, rng) -> Tensor:
        p = self.cfg.dropout
        if rng is None or p == 0.0:
            return t
        mask = rng.binomial(1, 1.0 - p, size=t.data.shape) / (1.0 - p)
        return ad.mul(t, Tensor(mask))

    # -- forward ----------------------------------------------------------

    def forward(self, P: dict, item: ReaderItem, rng=None) -> Tensor:
        """Candidate logits; ``rng`` enables dropout (training mode)."""
        if not item.passage or not item.summary:
            raise ConfigError(f"item {item.id}: empty sequence")
        q = item.placeholder_index
        E_p = self._dropout(self._embed_text(item.passage), rng)
        E_s = self._dropout(self._embed_text(item.summary), rng)
        H_p = self.passage_enc(P, E_p)
        H_s = self.summary_enc(P, E_s)

        if self.variant == GA:
            # gated-attention hops: soft-attend each passage state over the
            # summary states, then gate by elementwise multiplication
            for _ in range(self.cfg.hops):
                scores = ad.matmul(H_p, ad.transpose(H_s))
                attn = ad.row_softmax(scores)
                ctx = ad.matmul(attn, H_s)
                H_p = ad.mul(H_p, ctx)
            h_q = ad.get_row(H_s, q)
            e = ad.matmul(H_p, ad.matmul(P["W_att"], h_q))
            alpha = ad.row_softmax(e)
            p_vec = ad.matmul(alpha, H_p)
            v = ad.concat([h_q, p_vec])
            v = self._dropout(v, rng)
            A_e = ad.gather_rows(P["cand_emb"],
                                 self._candidate_indices(item.candidates))
            return ad.matmul(A_e, ad.matmul(P["W_p"], v))

        h_q = ad.get_row(H_s, q)
        e = ad.matmul(H_p, ad.matmul(P["W_att_p"], h_q))
        alpha = ad.row_softmax(e)
        p_vec = ad.matmul(alpha, H_p)
        v = ad.concat([p_vec, h_q])
        v = self._dropout(v, rng)
        A_e = ad.gather_rows(P["cand_emb"],
                             self._candidate_indices(item.candidates))
        if self.variant == ATT:
            return ad.matmul(A_e, ad.matmul(P["W_pred"], v))

        # AMWG: attended gloss summary per candidate
        gloss_vecs = []
        u = ad.tanh(ad.add(ad.matmul(P["W_att_g"], v), P["b_att_g"]))
        for word in item.candidates:
            toks = self.glosses.get(word, [])
            if not toks:
                gloss_vecs.append(Tensor(np.zeros(2 * self.cfg.hidden)))
                continue
            idx = [self.gloss_index.get(t, len(self.gloss_vocab)) for t in toks]
            E_g = self._dropout(ad.gather_rows(P["gloss_emb"], idx), rng)
            H_g = self.gloss_enc(P, E_g)
            beta = ad.row_softmax(ad.matmul(H_g, u))
            gloss_vecs.append(ad.matmul(beta, H_g))
        A_g = ad.stack_rows(gloss_vecs)
        A_full = ad.concat([A_g, A_e], axis=1)
        return ad.matmul(A_full, ad.matmul(P["W_pred"], v))

    def tensors(self) -> dict:
        return {k: Tensor(v, requires_grad=True) for k, v in self.params.items()}

    def loss(self, P, item, rng=None) -> Tensor:
        return ad.nll_loss(self.forward(P, item, rng=rng), item.gold_index)

    def predict_probs(self, item: ReaderItem) -> np.ndarray:
        logits = self.forward(self.tensors(), item).data
        e = np.exp(logits - logits.max())
        return e / e.sum()

    # -- persistence ------------------------------------------------------

    def vocab_hash(self) -> str:
        return hashlib.sha256("\n".join(self.vocab).encode()).hexdigest()[:16]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("clozegen-reader v1\n")
            fh.write(f"variant {self.variant}\n")
            fh.write(f"dims {self.cfg.embedding_dim} {self.cfg.hidden} "
                     f"{self.cfg.hops}\n")
            fh.write(f"vocab_hash {self.vocab_hash()}\n")
            fh.write(f"vocab {len(self.vocab)}\n")
            for w in self.vocab:
                fh.write(w + "\n")
            glosses = [(w, " ".join(toks)) for w, toks in self.glosses.items()]
            fh.write(f"glosses {len(glosses)}\n")
            for w, g in glosses:
                fh.write(f"{w}\t{g}\n")
            fh.write(f"params {len(self.params)}\n")
            for name in sorted(self.params):
                arr = self.params[name]
                fh.write(f"{name} {' '.join(str(s) for s in arr.shape)}\n")
                fh.write(" ".join(repr(float(v)) for v in arr.ravel()) + "\n")


def load_checkpoint(path, table) -> ReaderModel:
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"cannot open reader checkpoint: {exc}")
    with fh:
        if fh.readline().strip() != "clozegen-reader v1":
            raise ParseError("bad reader checkpoint header", filename=str(path))
        variant = fh.readline().split()[1]
        _, e, h, hops = fh.readline().split()
        saved_hash = fh.readline().split()[1]
        n_vocab = int(fh.readline().split()[1])
        vocab = [fh.readline().rstrip("\n") for _ in range(n_vocab)]
        n_gloss = int(fh.readline().split()[1])
        glosses = {}
        for _ in range(n_gloss):
            w, _, g = fh.readline().rstrip("\n").partition("\t")
            glosses[w] = g
        cfg = TrainingConfig(embedding_dim=int(e), hidden=int(h), hops=int(hops))
        model = ReaderModel(variant, vocab, table, cfg, glosses=glosses)
        if model.vocab_hash() != saved_hash:
            raise ParseError("vocab hash mismatch in checkpoint",
                             filename=str(path))
        n_params = int(fh.readline().split()[1])
        for _ in range(n_params):
            header = fh.readline().split()
            name, shape = header[0], tuple(int(v) for v in header[1:])
            values = np.array([float(v) for v in fh.readline().split()])
            model.params[name] = values.reshape(shape)
    return model


# -- training ------------------------------------------------------------


@dataclass
class TrainResult:
    model: ReaderModel
    curve: list[tuple[int, float, float]] = field(default_factory=list)
    # (epoch, mean train loss, train accuracy)


def evaluate_accuracy(model: ReaderModel, dataset) -> float:
    correct = sum(
        int(np.argmax(model.predict_probs(item)) == item.gold_index)
        for item in dataset)
    return correct / len(dataset)


def train(model: ReaderModel, dataset, cfg=None,
          stop_at_accuracy=None) -> TrainResult:
    """Minimize gold-candidate NLL with Adam; deterministic given the seed."""
    cfg = cfg or model.cfg
    if not dataset:
        raise ConfigError("empty training dataset")
    opt = Adam(model.params, lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed + 1)
    curve = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(dataset))
        epoch_losses = []
        for bstart in range(0, len(dataset), cfg.batch):
            idx = order[bstart:bstart + cfg.batch]
            P = model.tensors()
            losses = [model.loss(P, dataset[i], rng=rng) for i in idx]
            total = ad.scale(ad.add_n(losses), 1.0 / len(losses))
            if not np.isfinite(total.data):
                raise DivergenceError(
                    f"non-finite loss at epoch {epoch}, batch {bstart // cfg.batch}",
                    epoch=epoch, batch=bstart // cfg.batch)
            total.backward()
            opt.step({k: t.grad for k, t in P.items()})
            epoch_losses.append(float(total.data))
        acc = evaluate_accuracy(model, dataset)
        curve.append((epoch, float(np.mean(epoch_losses)), acc))
        if stop_at_accuracy is not None and acc >= stop_at_accuracy:
            break
    return TrainResult(model, curve)


def predict_topk(model: ReaderModel, item: ReaderItem, vocab, k=10):
    """Top-k (word, probability) over ``vocab``; ties break lexicographically."""
    probe = ReaderItem(id=item.id, passage=item.passage, summary=item.summary,
                       candidates=list(vocab), gold_index=0)
    probs = model.predict_probs(probe)
    ranked = sorted(zip(vocab, probs), key=lambda wp: (-wp[1], wp[0]))
    return ranked[:k]
