"""Pure-numpy kernels; reference behaviour for the compiled ones in ``_ckernels``."""
import numpy as np

_BATCH = 1 << 14


def partition_costs(S, masks, extra_a, extra_b):
    """Cost of each bipartition when both sides take their column majority.

    Bit ``i`` of a mask labels row ``i`` as A.  Per column a side costs
    ``(count - |sum|) / 2``; ``extra_a[i]`` / ``extra_b[i]`` are added for row
    ``i`` on side A / B.
    """
    S = np.asarray(S, dtype=np.int64)
    A = np.abs(S)
    n = S.shape[0]
    masks = np.asarray(masks, dtype=np.int64)
    extra_a = np.asarray(extra_a, dtype=np.int64)
    extra_b = np.asarray(extra_b, dtype=np.int64)
    tot_sum = S.sum(axis=0)
    tot_cnt = A.sum(axis=0)
    shifts = np.arange(n, dtype=np.int64)
    out = np.empty(len(masks), dtype=np.int64)
    for lo in range(0, len(masks), _BATCH):
        chunk = masks[lo:lo + _BATCH]
        bits = (chunk[:, None] >> shifts) & 1
        sa = bits @ S
        ca = bits @ A
        sb = tot_sum - sa
        cb = tot_cnt - ca
        col = (ca - np.abs(sa) + cb - np.abs(sb)).sum(axis=1) // 2
        out[lo:lo + _BATCH] = col + bits @ extra_a + (1 - bits) @ extra_b
    return out


def pair_cost_matrix(D):
    """``out[s, t] = sum_i min(D[i, s], D[i, t])`` for ``s <= t``; -1 below the diagonal."""
    D = np.asarray(D, dtype=np.int64)
    P = D.shape[1]
    out = np.full((P, P), -1, dtype=np.int64)
    for s in range(P):
        out[s, s:] = np.minimum(D[:, s:s + 1], D[:, s:]).sum(axis=0)
    return out
