import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropos import _kernels_py, kernels

try:
    from tropos import _kernels as compiled
except ImportError:
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def reverse_digits(p, k, M):
    """Numerator over p**M by an explicit digit loop; k < 0 via k + p**j plus 1/p**j."""
    j, tail = 0, 0
    if k < 0:
        while k + p**j <= 0:
            j += 1
        k += p**j
        tail = p ** (M - j)
    num, place = 0, p**M
    while k:
        k, d = divmod(k, p)
        place //= p
        num += d * place
    return num + tail


@given(st.sampled_from([2, 3, 5, 7]), st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=40))
def test_fallback_matches_digit_loop(p, ks):
    M = kernels.digits_needed(p, max(abs(k) for k in ks)) + 1
    got = _kernels_py.radical_inverse_num(p, np.array(ks, dtype=np.int64), M)
    assert got.tolist() == [reverse_digits(p, k, M) for k in ks]


@needs_compiled
@given(st.sampled_from([2, 3, 5, 11]), st.lists(st.integers(-10**9, 10**9), min_size=1, max_size=60))
def test_compiled_radical_inverse_parity(p, ks):
    ks = np.array(ks, dtype=np.int64)
    M = kernels.digits_needed(p, int(np.abs(ks).max()))
    assert np.array_equal(compiled.radical_inverse_num(p, ks, M), _kernels_py.radical_inverse_num(p, ks, M))


@needs_compiled
@given(st.integers(0, 2**31 - 1), st.integers(1, 6))
def test_compiled_expsum_parity(seed, n):
    rng = np.random.default_rng(seed)
    lam = np.sort(rng.uniform(0, 3, n))
    coef = rng.normal(size=n) + 1j * rng.normal(size=n)
    s = rng.uniform(-2, 2, 50) + 1j * rng.uniform(-500, 500, 50)
    a = compiled.expsum_eval(lam, coef, s)
    b = _kernels_py.expsum_eval(lam, coef, s)
    direct = np.array([np.sum(coef * np.exp(-lam * z)) for z in s])
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)
    assert np.allclose(b, direct, rtol=1e-12, atol=1e-12)


def test_overflow_guard():
    with pytest.raises(OverflowError):
        kernels.radical_inverse_num(2, [1], 63)
    with pytest.raises(ValueError):
        kernels.radical_inverse_num(2, [1000], 3)


def test_expsum_shape():
    out = kernels.expsum_eval([0.0, 1.0], [1, 1], np.zeros((2, 3)))
    assert out.shape == (2, 3) and np.allclose(out, 2)


def test_backend_switch():
    code = "from tropos import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, TROPOS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    forced = os.environ.get("TROPOS_PURE_PYTHON", "") not in ("", "0")
    assert kernels.BACKEND == ("compiled" if compiled is not None and not forced else "python")
