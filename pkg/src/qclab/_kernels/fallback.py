"""Pure-numpy reduction kernels.

These implement the exact same floating-point operation order as the compiled
lane in ``_core.pyx`` so that results agree bit for bit regardless of which
lane the import selected:

* the input is cut into blocks of ``BLOCK`` values; each block is accumulated
  sequentially with Neumaier compensation (trailing ragged positions behave as
  literal ``0.0`` terms),
* the per-block totals are combined with a fixed pairwise tree, padded with
  zeros to a power of two.

The numpy code vectorizes *across* blocks (the ``j``-th term of every block is
processed in one array op), which preserves the per-block sequential order.
"""

from __future__ import annotations

import numpy as np

LANE = "fallback"
BLOCK = 64


def _block_tree_sum(values: np.ndarray) -> float:
    """Deterministic sum: blockwise Neumaier, then a pairwise tree."""
    x = np.ascontiguousarray(values, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        return 0.0
    nb = -(-n // BLOCK)
    padded = np.zeros(nb * BLOCK, dtype=np.float64)
    padded[:n] = x
    a = padded.reshape(nb, BLOCK)

    s = np.zeros(nb, dtype=np.float64)
    c = np.zeros(nb, dtype=np.float64)
    for j in range(BLOCK):
        xj = a[:, j]
        t = s + xj
        big = np.abs(s) >= np.abs(xj)
        c = c + np.where(big, (s - t) + xj, (xj - t) + s)
        s = t
    totals = s + c

    size = 1
    while size < nb:
        size *= 2
    buf = np.zeros(size, dtype=np.float64)
    buf[:nb] = totals
    while buf.shape[0] > 1:
        buf = buf[0::2] + buf[1::2]
    return float(buf[0])


def ordered_sum(values: np.ndarray) -> float:
    """Sum a float64 vector in the canonical deterministic order."""
    return _block_tree_sum(np.asarray(values, dtype=np.float64))


def ordered_dot(weights: np.ndarray, values: np.ndarray) -> float:
    """Dot product: elementwise multiply, then the canonical sum."""
    w = np.asarray(weights, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if w.shape != v.shape:
        raise ValueError("weights and values must have the same shape")
    return _block_tree_sum(w * v)


def pompeiu_sum(
    cr: np.ndarray,
    ci: np.ndarray,
    wt: np.ndarray,
    vr: np.ndarray,
    vi: np.ndarray,
    wr: float,
    wi: float,
    mask: np.ndarray,
) -> tuple[float, float]:
    """Accumulate ``sum(v * wt / (center - w))`` over unmasked cells.

    ``cr, ci``: cell-center coordinates; ``wt``: quadrature weights;
    ``vr, vi``: field values at centers; ``(wr, wi)``: the target point;
    ``mask``: uint8, nonzero entries contribute exactly 0.0.

    Returns the real and imaginary parts as two canonical sums.  The complex
    division is spelled out in real arithmetic so both lanes share it verbatim.
    """
    dr = cr - wr
    di = ci - wi
    with np.errstate(divide="ignore", invalid="ignore"):
        den = dr * dr + di * di
        nr = vr * wt
        ni = vi * wt
        re = (nr * dr + ni * di) / den
        im = (ni * dr - nr * di) / den
    dead = mask != 0
    re = np.where(dead, 0.0, re)
    im = np.where(dead, 0.0, im)
    return _block_tree_sum(re), _block_tree_sum(im)
