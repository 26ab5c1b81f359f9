"""Pure-Python (numpy) versions of the hot kernels.

Signatures match ``_kernels.pyx`` exactly; ``hilbsam.kernels`` picks one.
"""

import numpy as np


def composition_array(k, n):
    """All compositions of n into k parts as an int64 array, descending lex."""
    if k == 1:
        return np.array([[n]], dtype=np.int64)
    rows = []
    for first in range(n, -1, -1):
        rest = composition_array(k - 1, n - first)
        col = np.full((rest.shape[0], 1), first, dtype=np.int64)
        rows.append(np.hstack([col, rest]))
    return np.vstack(rows)


def superadditive_scan(offsets, degrees, values, max_degree):
    """First pair (a, b), a <= b, with v[a] + v[b] > v[a+b]; (-1, -1) if none.

    ``offsets`` are dense-array positions of the indices, sorted by degree, so
    the position of u+v is ``offsets[a] + offsets[b]``.
    """
    offsets = np.asarray(offsets, dtype=np.int64)
    degrees = np.asarray(degrees, dtype=np.int64)
    values = np.asarray(values, dtype=np.int64)
    count = len(offsets)
    for a in range(count):
        limit = max_degree - degrees[a]
        if limit < degrees[a]:
            break
        stop = int(np.searchsorted(degrees, limit, side="right"))
        if stop <= a:
            continue
        ob = offsets[a:stop]
        diff = values[offsets[a]] + values[ob] - values[offsets[a] + ob]
        hits = np.nonzero(diff > 0)[0]
        if hits.size:
            return a, a + int(hits[0])
    return -1, -1


def count_standard(gens, k, n):
    """Number of degree-n monomials in k variables divisible by no row of ``gens``."""
    gens = np.asarray(gens, dtype=np.int64).reshape(-1, k)
    mons = composition_array(k, n)
    if gens.shape[0] == 0:
        return int(mons.shape[0])
    hit = np.zeros(mons.shape[0], dtype=bool)
    for g in gens:
        if g.sum() > n:
            continue
        hit |= (mons >= g).all(axis=1)
    return int((~hit).sum())


def polytope_slice_sum(points, neg_inf, k, n):
    """Sum over |m| = n of max_p <p, m>, skipping p where m hits a -inf coordinate.

    Returns ``(total, undefined)`` where ``undefined`` counts slice points with
    no admissible p (support value -inf there).
    """
    points = np.asarray(points, dtype=np.int64).reshape(-1, k)
    neg_inf = np.asarray(neg_inf, dtype=np.uint8).reshape(-1, k).astype(bool)
    mons = composition_array(k, n)
    best = np.full(mons.shape[0], np.iinfo(np.int64).min, dtype=np.int64)
    valid_any = np.zeros(mons.shape[0], dtype=bool)
    positive = mons > 0
    for p, mask in zip(points, neg_inf):
        ok = ~(positive & mask).any(axis=1)
        vals = mons @ np.where(mask, 0, p)
        best = np.where(ok & (vals > best), vals, best)
        valid_any |= ok
    total = int(best[valid_any].sum()) if valid_any.any() else 0
    return total, int((~valid_any).sum())
