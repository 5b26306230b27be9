"""Array kernels for words in a free group.

Letters are signed integers: ``+k`` is the generator ``x_k`` and ``-k`` its
inverse.  An automorphism that fixes inverses of images is stored as an
image table ``img`` of shape ``(rank + 1, 3)`` plus ``img_len`` of shape
``(rank + 1,)``; row ``g`` holds the image of ``x_g`` (row 0 unused).  The
image of ``-g`` is the reversed, negated row.

Every kernel here is compiled with numba unless ``WHMIN_DISABLE_NUMBA`` is
set, in which case the plain python (or vectorised numpy) path runs.
"""

import numpy as np

from ._accel import jit

LETTER_DTYPE = np.int32
MAX_IMAGE = 3


# --- free and cyclic reduction -------------------------------------------


@jit
def free_reduce_array(raw):
    buf = np.empty(raw.shape[0], raw.dtype)
    top = 0
    for i in range(raw.shape[0]):
        c = raw[i]
        if top > 0 and buf[top - 1] == -c:
            top -= 1
        else:
            buf[top] = c
            top += 1
    return buf[:top].copy()


@jit
def cyclic_bounds(word):
    lo = 0
    hi = word.shape[0]
    while hi - lo >= 2 and word[lo] == -word[hi - 1]:
        lo += 1
        hi -= 1
    return lo, hi


@jit
def is_freely_reduced(word):
    for i in range(word.shape[0] - 1):
        if word[i] == -word[i + 1]:
            return False
    return True


# --- automorphism substitution -------------------------------------------


@jit
def _substitute(word, img, img_len, buf):
    # Writes the freely reduced image into buf; returns the stack height.
    top = 0
    for i in range(word.shape[0]):
        c0 = word[i]
        if c0 > 0:
            g = c0
            for j in range(img_len[g]):
                c = img[g, j]
                if top > 0 and buf[top - 1] == -c:
                    top -= 1
                else:
                    buf[top] = c
                    top += 1
        else:
            g = -c0
            for j in range(img_len[g] - 1, -1, -1):
                c = -img[g, j]
                if top > 0 and buf[top - 1] == -c:
                    top -= 1
                else:
                    buf[top] = c
                    top += 1
    return top


@jit
def _cyclic_length(buf, top):
    lo = 0
    hi = top
    while hi - lo >= 2 and buf[lo] == -buf[hi - 1]:
        lo += 1
        hi -= 1
    return hi - lo


@jit
def apply_table(word, img, img_len):
    """Image of ``word``, freely and cyclically reduced."""
    buf = np.empty(MAX_IMAGE * word.shape[0] + 1, word.dtype)
    top = _substitute(word, img, img_len, buf)
    lo = 0
    hi = top
    while hi - lo >= 2 and buf[lo] == -buf[hi - 1]:
        lo += 1
        hi -= 1
    return buf[lo:hi].copy()


@jit
def image_length(word, img, img_len):
    buf = np.empty(MAX_IMAGE * word.shape[0] + 1, word.dtype)
    return _cyclic_length(buf, _substitute(word, img, img_len, buf))


@jit
def first_reducing(word, imgs, lens, order, target):
    """Scan ``order`` for the first table whose image is shorter than ``target``.

    Returns ``(position, steps)``; position is -1 when nothing reduces, and
    steps is the number of images computed.
    """
    buf = np.empty(MAX_IMAGE * word.shape[0] + 1, word.dtype)
    for p in range(order.shape[0]):
        k = order[p]
        top = _substitute(word, imgs[k], lens[k], buf)
        if _cyclic_length(buf, top) < target:
            return p, p + 1
    return -1, order.shape[0]


@jit
def image_lengths(word, imgs, lens, order):
    buf = np.empty(MAX_IMAGE * word.shape[0] + 1, word.dtype)
    out = np.empty(order.shape[0], np.int64)
    for p in range(order.shape[0]):
        k = order[p]
        out[p] = _cyclic_length(buf, _substitute(word, imgs[k], lens[k], buf))
    return out


# --- Whitehead graph ------------------------------------------------------


def _edge_counts_numpy(word, rank, cyclic):
    v = 2 * rank
    d = rank * (2 * rank - 1)
    m = word.shape[0]
    if m == 0:
        return np.zeros(d, np.int64)
    a = word.astype(np.int64)
    b = np.roll(a, -1) if cyclic else a[1:]
    if not cyclic:
        a = a[:-1]
    p = 2 * (np.abs(a) - 1) + (a < 0)
    q = 2 * (np.abs(b) - 1) + (b > 0)  # vertex of b^{-1}
    lo = np.minimum(p, q)
    hi = np.maximum(p, q)
    keep = lo != hi
    lo, hi = lo[keep], hi[keep]
    idx = lo * (2 * v - lo - 1) // 2 + (hi - lo - 1)
    return np.bincount(idx, minlength=d).astype(np.int64)


@jit(fallback=_edge_counts_numpy)
def edge_counts(word, rank, cyclic):
    """Counts of Whitehead-graph edges ``{a, b^-1}`` over adjacent pairs ``(a, b)``."""
    v = 2 * rank
    d = rank * (2 * rank - 1)
    counts = np.zeros(d, np.int64)
    m = word.shape[0]
    stop = m if cyclic else m - 1
    for i in range(stop):
        a = word[i]
        b = word[(i + 1) % m]
        p = 2 * (abs(a) - 1) + (1 if a < 0 else 0)
        q = 2 * (abs(b) - 1) + (1 if b > 0 else 0)
        if p == q:
            continue
        if p > q:
            p, q = q, p
        counts[p * (2 * v - p - 1) // 2 + (q - p - 1)] += 1
    return counts


# --- random words ---------------------------------------------------------


@jit
def build_reduced_word(rank, first, offsets):
    """Reduced word from vertex index ``first`` and non-backtracking offsets.

    Vertex index ``2(k-1)`` is ``x_k`` and ``2(k-1)+1`` its inverse.  Each
    offset lies in ``[0, 2n - 1)`` and picks one of the letters that do not
    cancel the previous one.
    """
    v = 2 * rank
    m = offsets.shape[0] + 1
    out = np.empty(m, LETTER_DTYPE)
    idx = first
    out[0] = (idx // 2 + 1) * (1 - 2 * (idx % 2))
    for i in range(1, m):
        idx = ((idx ^ 1) + 1 + offsets[i - 1]) % v
        out[i] = (idx // 2 + 1) * (1 - 2 * (idx % 2))
    return out
