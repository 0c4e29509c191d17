"""Integer list kernels: truncated convolution and power-series inversion.

Coefficient lists are plain Python ``int`` sequences indexed by grid position.
Large products go through Kronecker substitution (pack both operands into one
big integer each, multiply with GMP, unpack); the result is bit-identical to
schoolbook convolution.
"""

from __future__ import annotations

from typing import Sequence

import gmpy2

# below these sizes the Python loops beat packing overhead
_SCHOOLBOOK_CUTOFF = 40
_SPARSE_NNZ_CUTOFF = 24


def _nonzero(a: Sequence[int]) -> list[tuple[int, int]]:
    return [(i, c) for i, c in enumerate(a) if c]


def mul_schoolbook(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """Reference convolution, first ``n`` coefficients of ``a*b``."""
    out = [0] * n
    nb = len(b)
    for i, ai in enumerate(a):
        if not ai or i >= n:
            continue
        for j in range(min(nb, n - i)):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return out


def _mul_sparse(sparse: list[tuple[int, int]], dense: Sequence[int], n: int) -> list[int]:
    out = [0] * n
    nd = len(dense)
    for i, c in sparse:
        if i >= n:
            break
        stop = min(nd, n - i)
        if c == 1:
            for j in range(stop):
                out[i + j] += dense[j]
        elif c == -1:
            for j in range(stop):
                out[i + j] -= dense[j]
        else:
            for j in range(stop):
                out[i + j] += c * dense[j]
    return out


def _pack(a: Sequence[int], nbytes: int):
    zero = bytes(nbytes)
    pos = b"".join(c.to_bytes(nbytes, "little") if c > 0 else zero for c in a)
    value = gmpy2.mpz(int.from_bytes(pos, "little"))
    if any(c < 0 for c in a):
        neg = b"".join((-c).to_bytes(nbytes, "little") if c < 0 else zero for c in a)
        value -= gmpy2.mpz(int.from_bytes(neg, "little"))
    return value


def mul_kronecker(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """First ``n`` coefficients of ``a*b`` by Kronecker substitution."""
    a = a[:n]
    b = b[:n]
    ba = max((abs(c).bit_length() for c in a), default=0)
    bb = max((abs(c).bit_length() for c in b), default=0)
    if ba == 0 or bb == 0:
        return [0] * n
    bits = ba + bb + min(len(a), len(b)).bit_length() + 1
    nbytes = (bits + 7) // 8
    bits = 8 * nbytes
    prod = _pack(a, nbytes) * _pack(b, nbytes)
    m = min(n, len(a) + len(b) - 1)
    # balanced digits: adding 2^(bits-1) to each of the low m slots makes them
    # nonnegative; everything above slot m is a multiple of 2^(m*bits)
    width = m * bits
    one = gmpy2.mpz(1)
    prod += (((one << width) - 1) // ((one << bits) - 1)) << (bits - 1)
    prod = gmpy2.f_mod_2exp(prod, width)
    raw = int(prod).to_bytes(nbytes * m, "little")
    half = 1 << (bits - 1)
    out = [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(m)]
    if m < n:
        out.extend([0] * (n - m))
    return out


def mul_trunc(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """First ``n`` coefficients of ``a*b``; picks the cheapest exact method."""
    if n <= 0:
        return []
    a = a[:n]
    b = b[:n]
    if not a or not b:
        return [0] * n
    if min(len(a), len(b)) <= _SCHOOLBOOK_CUTOFF:
        return mul_schoolbook(a, b, n)
    sa = _nonzero(a)
    if len(sa) <= _SPARSE_NNZ_CUTOFF:
        return _mul_sparse(sa, b, n)
    sb = _nonzero(b)
    if len(sb) <= _SPARSE_NNZ_CUTOFF:
        return _mul_sparse(sb, a, n)
    return mul_kronecker(a, b, n)


def inverse_unit(a: Sequence[int], n: int) -> list[int]:
    """First ``n`` coefficients of ``1/a`` where ``a[0]`` is ``+1`` or ``-1``."""
    a0 = a[0]
    if a0 not in (1, -1):
        raise ValueError("inverse_unit needs a leading coefficient of +-1")
    nz = _nonzero(a[1:n])
    # sparse input: direct recurrence is O(n * nnz)
    if len(nz) * n < 4_000_000 or n <= 256:
        b = [0] * n
        b[0] = a0
        terms = [(i + 1, c) for i, c in nz]
        for k in range(1, n):
            s = 0
            for i, c in terms:
                if i > k:
                    break
                s += c * b[k - i]
            b[k] = -s if a0 == 1 else s
        return b
    # Newton iteration b <- b + b(1 - ab), doubling precision
    b = [a0]
    k = 1
    while k < n:
        k2 = min(2 * k, n)
        ab = mul_trunc(a[:k2], b, k2)
        r = ab[k:k2]
        delta = mul_trunc(b, r, k2 - k)
        b = b + [-d for d in delta]
        k = k2
    return b
