"""Vectorized numpy implementation of the orbit kernels.

Matrices are rows ``[ar, ai, br, bi, cr, ci, dr, di]`` of a float64 array and
circles are rows ``[x, y, r]``.  Complex arithmetic is spelled out on real
parts in the same order as the compiled core, so both backends produce the
same bits for products and circle images.
"""

import numpy as np

LINE_TOL = 1e-9
SMALL = 1e-13


def mat_mul(A, B):
    """Row-wise product ``A @ B`` of packed 2x2 complex matrices."""
    ar, ai, br, bi, cr, ci, dr, di = (A[:, j] for j in range(8))
    er, ei, fr, fi, gr, gi, hr, hi = (B[:, j] for j in range(8))
    out = np.empty((A.shape[0], 8))
    out[:, 0] = (ar * er - ai * ei) + (br * gr - bi * gi)
    out[:, 1] = (ar * ei + ai * er) + (br * gi + bi * gr)
    out[:, 2] = (ar * fr - ai * fi) + (br * hr - bi * hi)
    out[:, 3] = (ar * fi + ai * fr) + (br * hi + bi * hr)
    out[:, 4] = (cr * er - ci * ei) + (dr * gr - di * gi)
    out[:, 5] = (cr * ei + ci * er) + (dr * gi + di * gr)
    out[:, 6] = (cr * fr - ci * fi) + (dr * hr - di * hi)
    out[:, 7] = (cr * fi + ci * fr) + (dr * hi + di * hr)
    return out


def circle_images(mats, circles):
    """Image of ``circles[i]`` under ``mats[i]``; ``bad`` flags near-lines."""
    mats = np.ascontiguousarray(mats, dtype=np.float64)
    circles = np.ascontiguousarray(circles, dtype=np.float64)
    ar, ai, br, bi, cr, ci, dr, di = (mats[:, j] for j in range(8))
    px, py, r = circles[:, 0], circles[:, 1], circles[:, 2]
    wr = (cr * px - ci * py) + dr
    wi = (cr * py + ci * px) + di
    w2 = wr * wr + wi * wi
    c2 = (cr * cr + ci * ci) * (r * r)
    den = w2 - c2
    bad = np.abs(den) <= LINE_TOL * (w2 + c2)
    nr = (ar * px - ai * py) + br
    ni = (ar * py + ai * px) + bi
    t1r = nr * wr + ni * wi
    t1i = ni * wr - nr * wi
    rr = r * r
    t2r = (ar * cr + ai * ci) * rr
    t2i = (ai * cr - ar * ci) * rr
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.empty_like(circles)
        out[:, 0] = (t1r - t2r) / den
        out[:, 1] = (t1i - t2i) / den
        out[:, 2] = r / np.abs(den)
    return out, bad.astype(np.uint8)


def spherical_diameters(circles):
    x, y, r = circles[:, 0], circles[:, 1], circles[:, 2]
    s = np.sqrt(x * x + y * y)
    x1 = s - r
    x2 = s + r
    return 4.0 * r / np.sqrt((1.0 + x1 * x1) * (1.0 + x2 * x2))


def small_caps(circles):
    """Discs covering at most a hemisphere (then diameter is monotone under nesting)."""
    x, y, r = circles[:, 0], circles[:, 1], circles[:, 2]
    return r * r <= 1.0 + (x * x + y * y)


def _csqrt(x, y):
    m = np.sqrt(x * x + y * y)
    with np.errstate(divide="ignore", invalid="ignore"):
        tp = np.sqrt((m + x) * 0.5)
        tn = np.sqrt((m - x) * 0.5)
        pos_r, pos_i = tp, np.where(tp == 0.0, 0.0, y / (2.0 * tp))
        neg_r = np.where(tn == 0.0, 0.0, np.abs(y) / (2.0 * tn))
        neg_i = np.copysign(tn, y)
    sel = x >= 0.0
    return np.where(sel, pos_r, neg_r), np.where(sel, pos_i, neg_i)


def attracting_fixed_points(mats):
    """Attracting fixed point of each (loxodromic) matrix."""
    mats = np.ascontiguousarray(mats, dtype=np.float64)
    ar, ai, br, bi, cr, ci, dr, di = (mats[:, j] for j in range(8))
    tr_r = ar + dr
    tr_i = ai + di
    sr, si = _csqrt((tr_r * tr_r - tr_i * tr_i) - 4.0, 2.0 * tr_r * tr_i)
    k1r = (tr_r + sr) * 0.5
    k1i = (tr_i + si) * 0.5
    k2r = (tr_r - sr) * 0.5
    k2i = (tr_i - si) * 0.5
    first = (k1r * k1r + k1i * k1i) >= (k2r * k2r + k2i * k2i)
    kr = np.where(first, k1r, k2r)
    ki = np.where(first, k1i, k2i)
    # z = (k - d)/c  or  z = b/(k - a); use the larger denominator
    ur = kr - ar
    ui = ki - ai
    c_mod = cr * cr + ci * ci
    u_mod = ur * ur + ui * ui
    use_c = c_mod >= u_mod
    scale = (ar * ar + ai * ai) + (br * br + bi * bi) + (c_mod + (dr * dr + di * di))
    at_inf = np.maximum(c_mod, u_mod) <= (SMALL * SMALL) * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        vr = kr - dr
        vi = ki - di
        za_r = (vr * cr + vi * ci) / c_mod
        za_i = (vi * cr - vr * ci) / c_mod
        zb_r = (br * ur + bi * ui) / u_mod
        zb_i = (bi * ur - br * ui) / u_mod
    out = np.empty((mats.shape[0], 2))
    out[:, 0] = np.where(use_c, za_r, zb_r)
    out[:, 1] = np.where(use_c, za_i, zb_i)
    out[at_inf] = 0.0
    return out, at_inf.astype(np.uint8)


def _children(mats, last, gens):
    """All reduced one-letter extensions, parent-major then letter order."""
    n, g = mats.shape[0], gens.shape[0]
    letters = np.tile(np.arange(g), n)
    parents = np.repeat(np.arange(n), g)
    keep = letters != (np.repeat(last, g) ^ 1)
    letters, parents = letters[keep], parents[keep]
    return parents, letters


def word_tree(gens, first, depth):
    """Subtree of reduced words starting with ``first``, levels ``1..depth``.

    Returns ``(mats, last, parent, offsets)`` with level ``m`` occupying rows
    ``offsets[m-1]:offsets[m]``; ``parent`` indexes into the same arrays.
    """
    gens = np.ascontiguousarray(gens, dtype=np.float64)
    mats_l = [gens[first:first + 1].copy()]
    last_l = [np.array([first], dtype=np.int64)]
    parent_l = [np.array([-1], dtype=np.int64)]
    offsets = [0, 1]
    for _ in range(1, depth):
        parents, letters = _children(mats_l[-1], last_l[-1], gens)
        mats_l.append(mat_mul(mats_l[-1][parents], gens[letters]))
        last_l.append(letters.astype(np.int64))
        parent_l.append(parents.astype(np.int64) + offsets[-2])
        offsets.append(offsets[-1] + len(letters))
    return (
        np.concatenate(mats_l),
        np.concatenate(last_l),
        np.concatenate(parent_l),
        np.array(offsets, dtype=np.int64),
    )


_IDENTITY = np.array([[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]])


def level_stats(gens, base, first, depth, threshold):
    """Per-depth count, max/sum of spherical diameters, and count above ``threshold``.

    Covers the edge circles of the subtree starting with letter ``first``.
    """
    gens = np.ascontiguousarray(gens, dtype=np.float64)
    base = np.ascontiguousarray(base, dtype=np.float64)
    count = np.zeros(depth, dtype=np.int64)
    maxd = np.zeros(depth)
    sumd = np.zeros(depth)
    large = np.zeros(depth, dtype=np.int64)
    mats = _IDENTITY
    last = np.array([-1], dtype=np.int64)
    letters = np.array([first])
    parents = np.array([0])
    for m in range(depth):
        circ, _ = circle_images(mats[parents], base[letters])
        diam = spherical_diameters(circ)
        count[m] = diam.shape[0]
        maxd[m] = diam.max()
        # sequential sum: same order and rounding as the depth-first core
        sumd[m] = np.cumsum(diam)[-1]
        large[m] = np.count_nonzero(diam > threshold)
        if m + 1 < depth:
            mats = mat_mul(mats[parents], gens[letters])
            last = letters.astype(np.int64)
            parents, letters = _children(mats, last, gens)
    return count, maxd, sumd, large


def census(gens, base, first, depth, threshold, budget):
    """Pruned count of edge circles with diameter above ``threshold`` per depth.

    A subtree is skipped once its circle is a small cap with diameter at most
    ``threshold``; nested descendants cannot be larger.  Returns
    ``(counts, maxd, sumd, visited)``, the diameter max and sum taken over
    the counted circles, with ``visited = -1`` when the budget ran out.
    """
    gens = np.ascontiguousarray(gens, dtype=np.float64)
    base = np.ascontiguousarray(base, dtype=np.float64)
    counts = np.zeros(depth, dtype=np.int64)
    maxd = np.zeros(depth)
    sumd = np.zeros(depth)
    visited = 0
    mats = _IDENTITY
    letters = np.array([first])
    parents = np.array([0])
    for m in range(depth):
        if letters.shape[0] == 0:
            break
        visited += letters.shape[0]
        if visited > budget:
            return counts, maxd, sumd, -1
        circ, _ = circle_images(mats[parents], base[letters])
        diam = spherical_diameters(circ)
        big = diam > threshold
        counts[m] = np.count_nonzero(big)
        if counts[m]:
            maxd[m] = diam[big].max()
            sumd[m] = np.cumsum(diam[big])[-1]
        if m + 1 < depth:
            alive = big | ~small_caps(circ)
            mats = mat_mul(mats[parents[alive]], gens[letters[alive]])
            parents, letters = _children(mats, letters[alive].astype(np.int64), gens)
    return counts, maxd, sumd, visited
