import os
import subprocess
import sys

import numpy as np
import pytest

from corrph import _pykernels, hyperexponential, kernels
from corrph.montecarlo import PHSampler

try:
    from corrph import _ckernels
except ImportError:
    _ckernels = None

needs_compiled = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def test_fallback_selected_by_environment():
    env = dict(os.environ, CORRPH_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import corrph; print(corrph.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
def test_default_backend_is_compiled():
    if os.environ.get("CORRPH_PURE_PYTHON", "") not in ("", "0"):
        pytest.skip("fallback forced")
    assert kernels.BACKEND == "cython"


@needs_compiled
def test_faddeeva_backends_agree():
    rng = np.random.default_rng(5)
    z = rng.normal(scale=5, size=5000) + 1j * rng.uniform(-4, 6, 5000)
    a, b = _ckernels.faddeeva(z), _pykernels.faddeeva(z)
    assert np.all(np.abs(a - b) <= 1e-13 * np.maximum(np.abs(a), 1e-300))


@pytest.mark.parametrize("mod", [_pykernels] + ([_ckernels] if _ckernels else []),
                         ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_ph_sums_distribution(mod):
    d = hyperexponential([0.3, 0.7], [0.5, 3.0])
    s = PHSampler(d)
    counts = np.full(100_000, 3, dtype=np.int64)
    counts[::2] = 0
    out = mod.ph_sums(np.random.Philox(8), counts, s.init_cum, s.jump_cum, s.rates)
    assert np.all(out[::2] == 0)
    draws = out[1::2]
    mean, var1 = d.mean, 2 * (0.3 / 0.25 + 0.7 / 9) - d.mean**2
    assert abs(draws.mean() - 3 * mean) < 4 * np.sqrt(3 * var1 / draws.size)
    again = mod.ph_sums(np.random.Philox(8), counts, s.init_cum, s.jump_cum, s.rates)
    assert np.array_equal(out, again)
