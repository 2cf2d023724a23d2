import itertools
import json

import numpy as np
import pytest

import idr


def test_rao_stirling_matches_pair_sum():
    rng = np.random.default_rng(1)
    for _ in range(20):
        k = int(rng.integers(2, 9))
        p = rng.random(k)
        d = rng.random((k, k))
        d = (d + d.T) / 2
        np.fill_diagonal(d, 0.0)
        q = p / p.sum()
        expected = sum(q[i] * q[j] * d[i, j] for i, j in itertools.permutations(range(k), 2))
        assert idr.rao_stirling(p.tolist(), d) == pytest.approx(expected, abs=1e-12)


def test_uniform_unit_distances_give_one_minus_inverse_k():
    k = 4
    d = np.ones((k, k)) - np.eye(k)
    assert idr.rao_stirling([1.0] * k, d) == pytest.approx(1 - 1 / k, abs=1e-15)
    assert idr.rao_stirling([0.0, 1.0, 0.0, 0.0], d) == 0.0


def test_cosine_distance_matrix_properties():
    rng = np.random.default_rng(2)
    vecs = rng.random((5, 7))
    d = idr.cosine_distance_matrix(vecs.tolist())
    assert d.shape == (5, 5)
    assert np.allclose(d, d.T)
    assert np.all(np.diag(d) == 0.0)
    assert np.all((d >= 0) & (d <= 1))
    scaled = vecs.copy()
    scaled[0] *= 10.0
    assert np.allclose(idr.cosine_distance_matrix(scaled.tolist()), d, atol=1e-12)
    assert idr.compare_distance_matrices(d, d) == pytest.approx(1.0)


def test_ols_matches_numpy_lstsq():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(200, 3))
    y = 1.0 + x @ np.array([0.5, -2.0, 0.25]) + rng.normal(size=200)
    r = idr.ols(x, y, ["a", "b", "c"])
    design = np.column_stack([np.ones(200), x])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    assert r["names"] == ["(intercept)", "a", "b", "c"]
    assert np.allclose(r["coef"], beta, atol=1e-10)
    resid = y - design @ beta
    cov = resid @ resid / (200 - 4) * np.linalg.inv(design.T @ design)
    assert np.allclose(r["se"], np.sqrt(np.diag(cov)), atol=1e-10)
    assert 0.0 <= r["r2"] <= 1.0


def test_pipeline_on_synthetic_corpus(tmp_path):
    idr.synth_citation(str(tmp_path), seed=3, n_grants=200)
    corpus = idr.Corpus.load(str(tmp_path))
    assert corpus.k == 6
    assert corpus.n_grants > 0 and corpus.n_links > 0

    d_cit = corpus.distances("citations")
    d_ref = corpus.distances("references")
    assert d_cit.shape == (6, 6)
    assert idr.compare_distance_matrices(d_ref, d_cit) > 0.9

    scores = corpus.paper_scores(d_cit, "references")
    assert len(scores) > 0
    assert all(0.0 <= rs <= 1.0 for _, rs in scores)

    impact = corpus.impact()
    assert len(impact) > 0
    assert {"paper_id", "c10", "hit"} <= set(impact[0])

    model = idr.Model.train(corpus, iterations=30, burn_in=15)
    assert model.phi.shape == (6, model.vocab_size)
    assert np.allclose(model.phi.sum(axis=1), 1.0)
    path = tmp_path / "model.bin"
    model.save(str(path))
    again = idr.Model.load(str(path))
    assert np.array_equal(again.phi, model.phi)


def test_inference_and_errors(tmp_path):
    idr.synth_citation(str(tmp_path), seed=4, n_grants=150)
    model = idr.Model.train(idr.Corpus.load(str(tmp_path)), iterations=20, burn_in=10)
    text = first_grant_abstract(tmp_path)
    theta = model.infer(text, iterations=40, burn_in=20)
    assert len(theta) == model.k
    assert sum(theta) == pytest.approx(1.0)
    with pytest.raises(idr.IdrError, match="unscorable abstract"):
        model.infer("zzzz qqqq", iterations=10, burn_in=5)
    with pytest.raises(idr.IdrError):
        idr.Corpus.load(str(tmp_path / "missing"))


def first_grant_abstract(corpus_dir):
    with open(corpus_dir / "grants.jsonl") as f:
        return json.loads(f.readline())["abstract"]
