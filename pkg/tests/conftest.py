"""Shared independent oracles for the test suite.

These deliberately use plain Python loops and textbook formulas rather
than the library's own code paths, so expected values are derived on a
separate route from the implementation under test.
"""

import math


def chain_oracle(sigmas, doubled=True):
    """Reference gap/entropy/variation chain for a descending sequence.

    Returns (gaps, gamma, energies, variations), all plain lists, computed
    with scalar arithmetic only.
    """
    sigmas = [float(s) for s in sigmas]
    r = len(sigmas)
    scale = 2.0 if doubled else 1.0
    gaps = []
    for k in range(1, r + 1):
        nxt = sigmas[k] if k < r else 0.0
        gaps.append(scale * nxt * nxt)
    gamma = sum(gaps)
    energies = []
    for g in gaps:
        p = g / gamma if gamma > 0 else 0.0
        energies.append(-p * math.log(p) if p > 0 else 0.0)
    variations = []
    prev = 0.0
    for k in range(r - 1):
        variations.append(energies[k] - prev)
        prev = energies[k]
    return gaps, gamma, energies, variations


def argmax_oracle(variations):
    """1-based argmax with smallest-index tie break, by linear scan."""
    best, best_val = 1, variations[0]
    for i, v in enumerate(variations[1:], start=2):
        if v > best_val:
            best, best_val = i, v
    return best


def sym_eig_2x2(m):
    """Eigenvalues of a symmetric 2x2 matrix by the quadratic formula."""
    a, b, c = float(m[0][0]), float(m[0][1]), float(m[1][1])
    half_tr = (a + c) / 2.0
    disc = math.sqrt(max(half_tr * half_tr - (a * c - b * b), 0.0))
    return half_tr + disc, half_tr - disc


def random_rect(rng, min_rows=10, max_rows=24, min_cols=3, max_cols=8):
    """Random rectangular Gaussian matrix with a comfortable aspect margin,
    keeping the smallest singular value well away from zero."""
    n = int(rng.integers(min_cols, max_cols + 1))
    m = int(rng.integers(max(min_rows, n + 4), max_rows + 1))
    return rng.standard_normal((m, n))
