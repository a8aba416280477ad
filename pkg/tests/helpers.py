"""Independent reference implementations used as test oracles."""
import itertools

import numpy as np


def all_signs(m):
    # lexicographic order, independent of the library's table order
    return [np.array(s) for s in itertools.product((1, -1), repeat=m)]


def walsh(S, sigma):
    out = 1
    for i in S:
        out *= sigma[i]
    return out


def subsets(m):
    for k in range(m + 1):
        yield from itertools.combinations(range(m), k)


def mask(S):
    return sum(1 << i for i in S)


def fourier_by_loops(fn, m):
    """fhat(S) = 2^-m sum_sigma f(sigma) W_S(sigma) with explicit double loop."""
    signs = all_signs(m)
    return {mask(S): sum(fn(s) * walsh(S, s) for s in signs) / 2**m for S in subsets(m)}


def eval_terms_reversed(coeffs, inputs):
    """Term-by-term polynomial evaluation, accumulating subsets in reverse mask order."""
    n = inputs[0].shape[0]
    out = np.zeros((n, n), dtype=complex)
    for s in sorted(coeffs, reverse=True):
        prod = np.eye(n, dtype=complex)
        for i in range(s.bit_length()):
            if s >> i & 1:
                prod = prod @ inputs[i]
        out = out + coeffs[s] @ prod
    return out
