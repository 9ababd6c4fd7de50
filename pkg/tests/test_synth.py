"""Generator tests: determinism, stream independence, moments."""

import numpy as np
import pytest

from sscavi.synth import (
    GenSpec,
    gen_design,
    gen_response,
    make_beta,
    make_dataset,
    mix_seed,
    replicate_seed,
)


def test_design_deterministic():
    spec = GenSpec(n=50, p=10, s=5, seed=123)
    np.testing.assert_array_equal(gen_design(spec), gen_design(spec))


def test_different_seeds_differ():
    a = gen_design(GenSpec(n=20, p=5, s=0, seed=1))
    b = gen_design(GenSpec(n=20, p=5, s=0, seed=2))
    assert np.any(a != b)


def test_design_independent_of_sparsity_and_amplitude():
    base = gen_design(GenSpec(n=30, p=6, s=0, seed=9))
    for s, amp in ((3, 1.0), (6, 2.5)):
        np.testing.assert_array_equal(
            gen_design(GenSpec(n=30, p=6, s=s, amplitude=amp, seed=9)), base
        )


def test_noise_stream_independent_of_design_stream():
    spec = GenSpec(n=1000, p=2, s=0, seed=77)
    X = gen_design(spec)
    y = gen_response(X, np.zeros(2), 1.0, spec.seed)
    # same master seed, distinct streams: no correlation between noise and columns
    corr = np.corrcoef(X[:, 0], y)[0, 1]
    assert abs(corr) < 0.1


def test_design_moments():
    X = gen_design(GenSpec(n=10_000, p=1, s=0, seed=4))
    assert abs(X.mean()) < 4 / np.sqrt(10_000)
    assert abs(X.var() - 1.0) < 0.1


def test_response_noiseless_and_pure_noise():
    spec = GenSpec(n=10_000, p=3, s=3, seed=11)
    X = gen_design(spec)
    beta = make_beta(spec)
    np.testing.assert_array_equal(gen_response(X, beta, 0.0, spec.seed), X @ beta)
    noise = gen_response(X, np.zeros(3), 4.0, spec.seed)
    assert noise.var() == pytest.approx(4.0, rel=0.1)


def test_response_reproducible():
    spec = GenSpec(n=40, p=4, s=2, seed=8)
    X = gen_design(spec)
    beta = make_beta(spec)
    np.testing.assert_array_equal(
        gen_response(X, beta, 1.0, spec.seed), gen_response(X, beta, 1.0, spec.seed)
    )


def test_make_dataset_pipeline_reproducible():
    a = make_dataset(GenSpec(n=25, p=5, s=2, amplitude=1.5, sigma2=2.0, seed=13))
    b = make_dataset(GenSpec(n=25, p=5, s=2, amplitude=1.5, sigma2=2.0, seed=13))
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.y, b.y)
    np.testing.assert_array_equal(a.beta_true, b.beta_true)
    assert a.beta_true[:2].tolist() == [1.5, 1.5]
    assert np.all(a.beta_true[2:] == 0)


def test_genspec_validation():
    with pytest.raises(ValueError):
        GenSpec(n=0, p=5, s=2)
    with pytest.raises(ValueError):
        GenSpec(n=5, p=5, s=6)
    with pytest.raises(ValueError):
        GenSpec(n=5, p=5, s=2, sigma2=-1.0)


def test_seed_mixing_is_stable():
    assert mix_seed(0) == mix_seed(0)
    assert replicate_seed(0, 1) != replicate_seed(0, 2)
    assert replicate_seed(0, 1) != replicate_seed(1, 1)
    assert 0 <= replicate_seed(123, 456) < 2**64
