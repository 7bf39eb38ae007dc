"""Pure numpy fallbacks for the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def radical_inverse_num(p, ks, M):
    """Numerators ``N`` with ``U(k) = N / p**M`` for the base-``p`` digit
    reversal sequence, negative ``k`` included."""
    ks = np.ascontiguousarray(ks, dtype=np.int64)
    pM = np.int64(p) ** M
    out = np.zeros(ks.shape, dtype=np.int64)

    pos = ks >= 0
    x = ks[pos].copy()
    acc = np.zeros(x.shape, dtype=np.int64)
    place = np.full(x.shape, pM, dtype=np.int64)
    while np.any(x > 0):
        live = x > 0
        place[live] //= p
        acc[live] += (x[live] % p) * place[live]
        x[live] //= p
    out[pos] = acc

    neg = ~pos
    if np.any(neg):
        x = ks[neg]
        pk = np.ones(x.shape, dtype=np.int64)
        kk = np.zeros(x.shape, dtype=np.int64)
        while np.any(x + pk <= 0):
            grow = x + pk <= 0
            pk[grow] *= p
            kk[grow] += 1
        y = x + pk
        acc = np.zeros(x.shape, dtype=np.int64)
        place = np.full(x.shape, pM, dtype=np.int64)
        for j in range(int(kk.max())):
            live = kk > j
            place[live] //= p
            acc[live] += (y[live] % p) * place[live]
            y[live] //= p
        out[neg] = acc + pM // pk
    return out


def expsum_eval(lam, coef, s):
    """``sum_k coef[k] * exp(-lam[k] * s)`` at every point of ``s``."""
    lam = np.asarray(lam, dtype=float)
    coef = np.asarray(coef, dtype=complex)
    s = np.asarray(s, dtype=complex)
    out = np.zeros(s.shape, dtype=complex)
    for lk, ck in zip(lam, coef):
        out += ck * np.exp(-lk * s)
    return out
