"""Backend dispatcher tests: both kernel implementations must agree."""

import numpy as np
import pytest

from sscavi import backend
from sscavi.model import Hyperparams, inclusion_logit_offset, inclusion_prob, precompute
from sscavi.synth import GenSpec, make_dataset

HYPER = Hyperparams(pi=0.5, tau=1.0, sigma2=1.0)

needs_compiled = pytest.mark.skipif(
    not backend.HAVE_COMPILED, reason="compiled kernels not built"
)


def _instance(p=20, seed=5):
    ds = make_dataset(GenSpec(n=80, p=p, s=p // 2, seed=seed))
    pre = precompute(ds, HYPER)
    rng = np.random.default_rng(seed)
    mu = rng.standard_normal(p)
    alpha = inclusion_prob(mu, pre.a, HYPER)
    return pre, mu, alpha


def test_dispatcher_exposes_active_backend():
    assert backend.BACKEND in ("compiled", "python")
    assert backend.BACKEND in backend.available_backends()
    with pytest.raises(ValueError):
        backend.get_backend("fortran")


@needs_compiled
@pytest.mark.parametrize("kernel", ["seq_sweep", "par_sweep"])
def test_compiled_and_python_kernels_agree(kernel):
    pre, mu, alpha = _instance()
    outs = []
    for name in ("compiled", "python"):
        impl = getattr(backend.get_backend(name), kernel)
        mu_new = np.empty_like(mu)
        impl(mu_new, mu, alpha, pre.xtx, pre.a, pre.xty, HYPER.sigma2)
        outs.append(mu_new)
    np.testing.assert_allclose(outs[0], outs[1], atol=1e-12)


@needs_compiled
def test_refresh_kernels_agree():
    pre, mu, alpha = _instance()
    offsets = inclusion_logit_offset(pre.a, HYPER)
    outs = []
    for name in ("compiled", "python"):
        impl = backend.get_backend(name).seq_sweep_refresh
        mu_new = np.empty_like(mu)
        alpha_work = alpha.copy()
        impl(mu_new, mu, alpha_work, pre.xtx, pre.a, pre.xty, HYPER.sigma2, offsets)
        outs.append((mu_new, alpha_work))
    np.testing.assert_allclose(outs[0][0], outs[1][0], atol=1e-12)
    np.testing.assert_allclose(outs[0][1], outs[1][1], atol=1e-12)


def test_import_falls_back_when_extension_missing(monkeypatch):
    import importlib
    import sys

    from sscavi import backend as backend_mod

    class _Blocker:
        def find_spec(self, name, path=None, target=None):
            if name == "sscavi._sweeps":
                raise ImportError("blocked for the fallback test")
            return None

    import sscavi

    monkeypatch.delitem(sys.modules, "sscavi._sweeps", raising=False)
    monkeypatch.delattr(sscavi, "_sweeps", raising=False)
    monkeypatch.setattr(sys, "meta_path", [_Blocker()] + sys.meta_path)
    try:
        reloaded = importlib.reload(backend_mod)
        assert reloaded.BACKEND == "python"
        assert reloaded.available_backends() == ["python"]
        assert not reloaded.HAVE_COMPILED
    finally:
        monkeypatch.undo()
        importlib.reload(backend_mod)


def test_python_kernels_propagate_nonfinite():
    pre, mu, alpha = _instance(p=6, seed=2)
    mu = mu.copy()
    mu[0] = np.nan
    mu_new = np.empty_like(mu)
    backend.get_backend("python").par_sweep(
        mu_new, mu, alpha, pre.xtx, pre.a, pre.xty, HYPER.sigma2
    )
    assert np.any(~np.isfinite(mu_new))
