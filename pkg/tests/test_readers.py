import numpy as np
import pytest

from conftest import make_table, relative_error

from clozegen.readers import autodiff as ad
from clozegen.readers import kernels
from clozegen.readers.autodiff import Tensor
from clozegen.readers.gru import BiGRUEncoder, gru
from clozegen.readers.kernels import gru_numpy
from clozegen.readers.models import (AMWG, ATT, GA, VARIANTS, ReaderItem,
                                     ReaderModel, TrainingConfig,
                                     evaluate_accuracy, load_checkpoint,
                                     predict_topk, tokenize_gloss, train)
from clozegen.errors import ConfigError, ParseError


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _reference_gru(x, h0, W, U, b):
    """Step-by-step recurrence oracle in plain numpy."""
    h = h0.shape[0]
    hp = h0.copy()
    out = []
    for t in range(x.shape[0]):
        pre = x[t] @ W + hp @ U + b
        z = _sigmoid(pre[:h])
        r = _sigmoid(pre[h:2 * h])
        c = np.tanh(x[t] @ W[:, 2 * h:] + (r * hp) @ U[:, 2 * h:] + b[2 * h:])
        hp = (1 - z) * hp + z * c
        out.append(hp.copy())
    return np.stack(out)


def _rand_gru_params(rng, d, h):
    return (rng.normal(size=(d, 3 * h)), rng.normal(size=(h, 3 * h)) * 0.5,
            rng.normal(size=3 * h) * 0.1)


# -- kernels -------------------------------------------------------------


def test_gru_forward_matches_hand_recurrence():
    rng = np.random.default_rng(0)
    d, h = 3, 2
    W, U, b = _rand_gru_params(rng, d, h)
    x = rng.normal(size=(2, d))
    h0 = np.zeros(h)
    H, _ = kernels.gru_forward(x, h0, W, U, b)
    np.testing.assert_allclose(H, _reference_gru(x, h0, W, U, b),
                               rtol=1e-12, atol=1e-12)


def test_gru_two_token_hand_computed_scalar():
    # 1-d input, 1-d hidden: every gate is a scalar we can write out
    W = np.array([[0.5, -0.3, 0.8]])
    U = np.array([[0.2, 0.1, -0.4]])
    b = np.array([0.1, 0.0, -0.2])
    x = np.array([[1.0], [2.0]])
    H, _ = kernels.gru_forward(x, np.zeros(1), W, U, b)
    z1 = _sigmoid(0.5 + 0.1)
    c1 = np.tanh(0.8 - 0.2)
    h1 = z1 * c1
    z2 = _sigmoid(2 * 0.5 + h1 * 0.2 + 0.1)
    r2 = _sigmoid(2 * -0.3 + h1 * 0.1)
    c2 = np.tanh(2 * 0.8 + r2 * h1 * -0.4 - 0.2)
    h2 = (1 - z2) * h1 + z2 * c2
    np.testing.assert_allclose(H.ravel(), [h1, h2], rtol=1e-12)


def test_kernel_backends_agree():
    assert kernels.BACKEND in ("cython", "numpy")
    backends = kernels.available_backends()
    rng = np.random.default_rng(1)
    d, h, T = 4, 3, 5
    W, U, b = _rand_gru_params(rng, d, h)
    x = rng.normal(size=(T, d))
    h0 = rng.normal(size=h)
    H_np, cache_np = gru_numpy.gru_forward(x, h0, W, U, b)
    dH = rng.normal(size=H_np.shape)
    g_np = gru_numpy.gru_backward(cache_np, dH)
    if "cython" in backends:
        from clozegen.readers.kernels import _gru_cy
        H_cy, cache_cy = _gru_cy.gru_forward(x, h0, W, U, b)
        np.testing.assert_allclose(H_cy, H_np, rtol=1e-13, atol=1e-13)
        g_cy = _gru_cy.gru_backward(cache_cy, dH)
        for a, b_ in zip(g_np[:4], g_cy[:4]):
            np.testing.assert_allclose(a, b_, rtol=1e-12, atol=1e-12)


def test_gru_backward_matches_finite_differences():
    rng = np.random.default_rng(2)
    d, h, T = 3, 2, 4
    W, U, b = _rand_gru_params(rng, d, h)
    x = rng.normal(size=(T, d))
    h0 = np.zeros(h)
    proj = rng.normal(size=(T, h))  # scalar loss = sum(H * proj)

    def loss(Wv, Uv, bv, xv):
        H, _ = kernels.gru_forward(xv, h0, Wv, Uv, bv)
        return float((H * proj).sum())

    _, cache = kernels.gru_forward(x, h0, W, U, b)
    dx, dW, dU, db, _ = kernels.gru_backward(cache, proj)
    eps = 1e-6
    for arr, grad, pick in ((W, dW, 0), (U, dU, 1), (b, db, 2), (x, dx, 3)):
        num = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = arr[idx]
            arr[idx] = orig + eps
            lp = loss(W, U, b, x)
            arr[idx] = orig - eps
            lm = loss(W, U, b, x)
            arr[idx] = orig
            num[idx] = (lp - lm) / (2 * eps)
        assert relative_error(grad, num) < 1e-6


# -- encoder -------------------------------------------------------------


def _encoder_setup(seed=3, d=3, h=2):
    rng = np.random.default_rng(seed)
    enc = BiGRUEncoder("enc", d, h)
    params = {}
    enc.init_params(params, rng)
    P = {k: Tensor(v, requires_grad=True) for k, v in params.items()}
    return enc, P, rng


def test_encoder_output_width_and_length_one():
    enc, P, rng = _encoder_setup()
    x = Tensor(rng.normal(size=(1, 3)))
    H = enc(P, x)
    assert H.shape == (1, 4)
    # for a single token, forward and backward directions see the same input
    hf = gru(x, P["enc.Wf"], P["enc.Uf"], P["enc.bf"]).data
    np.testing.assert_allclose(H.data[0, :2], hf[0])


def test_encoder_reversal_symmetry():
    # reversing the input swaps the roles of the two directions when the
    # direction parameters are tied
    enc, P, rng = _encoder_setup()
    P["enc.Wb"], P["enc.Ub"], P["enc.bb"] = (P["enc.Wf"], P["enc.Uf"],
                                             P["enc.bf"])
    x = rng.normal(size=(4, 3))
    H_fwd = enc(P, Tensor(x)).data
    H_rev = enc(P, Tensor(x[::-1].copy())).data
    h = 2
    np.testing.assert_allclose(H_fwd[:, :h], H_rev[::-1, h:], atol=1e-12)
    np.testing.assert_allclose(H_fwd[:, h:], H_rev[::-1, :h], atol=1e-12)


# -- autodiff spot checks ------------------------------------------------


def test_row_softmax_rows_sum_to_one():
    rng = np.random.default_rng(4)
    t = ad.row_softmax(Tensor(rng.normal(size=(5, 7))))
    np.testing.assert_allclose(t.data.sum(axis=1), np.ones(5), atol=1e-9)
    assert (t.data >= 0).all()


def test_autodiff_composite_gradient():
    rng = np.random.default_rng(5)
    A = Tensor(rng.normal(size=(3, 4)), requires_grad=True)
    x = Tensor(rng.normal(size=4), requires_grad=True)

    def compute(Av, xv):
        y = np.tanh(Av @ xv)
        p = np.exp(y - y.max())
        p = p / p.sum()
        return float(-np.log(p[1]))

    loss = ad.nll_loss(ad.tanh(ad.matmul(A, x)), 1)
    loss.backward()
    eps = 1e-6
    for t in (A, x):
        num = np.zeros_like(t.data)
        it = np.nditer(t.data, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = t.data[idx]
            t.data[idx] = orig + eps
            lp = compute(A.data, x.data)
            t.data[idx] = orig - eps
            lm = compute(A.data, x.data)
            t.data[idx] = orig
            num[idx] = (lp - lm) / (2 * eps)
        assert relative_error(t.grad, num) < 1e-6


def test_diamond_graph_accumulates_both_paths():
    x = Tensor(np.array(2.0), requires_grad=True)
    y = ad.add(ad.mul(x, x), x)  # d/dx (x^2 + x) = 2x + 1 = 5
    y.backward()
    assert y.data == pytest.approx(6.0)
    assert x.grad == pytest.approx(5.0)


# -- reader models -------------------------------------------------------

WORDS = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta",
         "theta", "@placeholder"]
GLOSSES = {
    "alpha": "<noun> first letter of the greek alphabet",
    "beta": "<noun> second letter of the greek alphabet",
    "gamma": "<noun> third letter",
    "delta": "<noun> river mouth deposit",
    "epsilon": "<noun> small quantity",
}


def _tiny_cfg(**kw):
    base = dict(embedding_dim=6, hidden=3, hops=2, batch=4, lr=5e-3,
                dropout=0.0, epochs=3, seed=0)
    base.update(kw)
    return TrainingConfig(**base)


def _item(i=0, gold=0, cands=None):
    cands = cands or ["alpha", "beta", "gamma", "delta", "epsilon"]
    return ReaderItem(
        id=f"it{i}",
        passage=["alpha", "beta", "gamma", "delta"],
        summary=["zeta", "@placeholder", "eta"],
        candidates=cands,
        gold_index=gold,
    )


def _model(variant, **cfg_kw):
    cfg = _tiny_cfg(**cfg_kw)
    table = make_table(WORDS, dim=cfg.embedding_dim, seed=6)
    return ReaderModel(variant, WORDS[:-1], table, cfg, glosses=GLOSSES)


@pytest.mark.parametrize("variant", VARIANTS)
def test_forward_logit_shape(variant):
    m = _model(variant)
    logits = m.forward(m.tensors(), _item())
    assert logits.shape == (5,)
    p = m.predict_probs(_item())
    assert p.sum() == pytest.approx(1.0)
    assert (p >= 0).all()


@pytest.mark.parametrize("variant", VARIANTS)
def test_model_gradients_match_finite_differences(variant):
    m = _model(variant)
    item = _item(gold=2)
    P = m.tensors()
    loss = m.loss(P, item)
    loss.backward()
    rng = np.random.default_rng(7)
    eps = 1e-6
    for name, t in P.items():
        if t.grad is None:
            continue
        flat = m.params[name].ravel()
        gflat = t.grad.ravel()
        # probe a handful of coordinates per parameter
        picks = rng.choice(flat.size, size=min(6, flat.size), replace=False)
        for j in picks:
            orig = flat[j]
            flat[j] = orig + eps
            lp = float(m.loss(m.tensors(), item).data)
            flat[j] = orig - eps
            lm = float(m.loss(m.tensors(), item).data)
            flat[j] = orig
            num = (lp - lm) / (2 * eps)
            diff = abs(num - gflat[j])
            # near-zero gradients are dominated by finite-difference noise
            assert diff < 1e-7 or \
                diff / (abs(num) + abs(gflat[j])) < 1e-4, (variant, name, j)


@pytest.mark.parametrize("variant", [GA, ATT])
def test_candidate_permutation_equivariance(variant):
    m = _model(variant)
    base = _item(gold=0)
    perm = [2, 0, 4, 1, 3]
    permuted = _item(gold=perm.index(0),
                     cands=[base.candidates[j] for j in perm])
    p1 = m.predict_probs(base)
    p2 = m.predict_probs(permuted)
    np.testing.assert_allclose(p2, p1[perm], atol=1e-12)


def test_seed_bit_stability():
    a = _model(GA, seed=5)
    b = _model(GA, seed=5)
    for name in a.params:
        np.testing.assert_array_equal(a.params[name], b.params[name])
    c = _model(GA, seed=6)
    assert any(not np.array_equal(a.params[n], c.params[n]) for n in a.params)


@pytest.mark.parametrize("variant", VARIANTS)
def test_checkpoint_roundtrip(variant, tmp_path):
    m = _model(variant)
    path = tmp_path / "reader.txt"
    m.save(path)
    table = make_table(WORDS, dim=m.cfg.embedding_dim, seed=6)
    loaded = load_checkpoint(path, table)
    assert loaded.variant == variant
    item = _item(gold=1)
    np.testing.assert_allclose(loaded.predict_probs(item),
                               m.predict_probs(item), atol=1e-12)


def test_checkpoint_bad_header(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("nope\n")
    table = make_table(WORDS, dim=6)
    with pytest.raises(ParseError):
        load_checkpoint(p, table)


def test_untrained_accuracy_near_chance():
    # many seeds, balanced gold positions -> empirical accuracy near 1/5
    rng = np.random.default_rng(8)
    hits = trials = 0
    for seed in range(10):
        m = _model(ATT, seed=seed)
        for gold in range(5):
            item = _item(i=gold, gold=gold)
            item.passage = list(rng.permutation(WORDS[:-1])[:4])
            hits += int(np.argmax(m.predict_probs(item)) == gold)
            trials += 1
    assert 0.05 <= hits / trials <= 0.45


@pytest.mark.parametrize("variant", VARIANTS)
def test_training_learns_tiny_task(variant):
    cfg = _tiny_cfg(epochs=150, lr=2e-2, seed=1)
    table = make_table(WORDS, dim=cfg.embedding_dim, seed=6)
    m = ReaderModel(variant, WORDS[:-1], table, cfg, glosses=GLOSSES)
    data = [_item(i=i, gold=i % 5) for i in range(5)]
    for i, it in enumerate(data):
        it.summary = [it.candidates[(it.gold_index + 1) % 5], "@placeholder"]
    res = train(m, data, cfg, stop_at_accuracy=1.0)
    assert res.curve[-1][2] == 1.0
    assert evaluate_accuracy(m, data) == 1.0


def test_training_deterministic():
    cfg = _tiny_cfg(epochs=2, seed=4, dropout=0.3)
    table = make_table(WORDS, dim=cfg.embedding_dim, seed=6)
    data = [_item(i=i, gold=i % 5) for i in range(6)]
    outs = []
    for _ in range(2):
        m = ReaderModel(GA, WORDS[:-1], table, cfg, glosses=GLOSSES)
        res = train(m, data, cfg)
        outs.append((res.curve, {k: v.copy() for k, v in m.params.items()}))
    assert outs[0][0] == outs[1][0]
    for name in outs[0][1]:
        np.testing.assert_array_equal(outs[0][1][name], outs[1][1][name])


def test_predict_topk_ranked_and_tiebroken():
    m = _model(ATT)
    item = _item()
    out = predict_topk(m, item, WORDS[:-1], k=4)
    assert len(out) == 4
    probs = [p for _, p in out]
    assert probs == sorted(probs, reverse=True)
    # equal-probability words must appear in lexicographic order
    for (w1, p1), (w2, p2) in zip(out, out[1:]):
        if p1 == p2:
            assert w1 < w2


def test_empty_item_rejected():
    m = _model(ATT)
    bad = _item()
    bad.passage = []
    with pytest.raises(ConfigError):
        m.forward(m.tensors(), bad)


def test_missing_placeholder_rejected():
    m = _model(ATT)
    bad = _item()
    bad.summary = ["zeta", "eta"]
    with pytest.raises(ConfigError):
        m.forward(m.tensors(), bad)


def test_tokenize_gloss_keeps_pos_tags():
    assert tokenize_gloss("<NOUN> a big, well-known thing") == \
        ["<noun>", "a", "big", "well", "known", "thing"]


def test_config_validation():
    with pytest.raises(ConfigError):
        TrainingConfig(dropout=1.0)
    with pytest.raises(ConfigError):
        TrainingConfig(hidden=0)
