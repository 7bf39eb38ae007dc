"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``TROPOS_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from tropos import _kernels_py

_impl = _kernels_py
BACKEND = "python"
if os.environ.get("TROPOS_PURE_PYTHON", "") in ("", "0"):
    try:
        from tropos import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py

# p**M must fit comfortably in int64
_INT64_LIMIT = 2**62


def digits_needed(p: int, kmax: int) -> int:
    """Smallest ``M >= 1`` with ``p**M > kmax``; enough digits for ``|k| <= kmax``."""
    M, pw = 1, p
    while pw <= kmax:
        pw *= p
        M += 1
    return M


def radical_inverse_num(p: int, ks, M: int | None = None):
    """Exact digit-reversal values as ``(numerators, p**M)``."""
    ks = np.ascontiguousarray(ks, dtype=np.int64)
    need = digits_needed(p, int(np.abs(ks).max()) if ks.size else 0)
    M = need if M is None else M
    if M < need:
        raise ValueError(f"M={M} digits cannot represent |k| up to {int(np.abs(ks).max())}")
    if p**M >= _INT64_LIMIT:
        raise OverflowError(f"{p}**{M} exceeds the int64 kernel range")
    return _impl.radical_inverse_num(int(p), ks, int(M)), p**M


def radical_inverse(p: int, ks):
    """Digit-reversal values as float64 (exact while ``p**M < 2**53``)."""
    num, den = radical_inverse_num(p, ks)
    return num / float(den)


def expsum_eval(lam, coef, s):
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    s = np.ascontiguousarray(s, dtype=np.complex128)
    shape = s.shape
    return np.asarray(_impl.expsum_eval(lam, coef, s.ravel())).reshape(shape)
