"""Compiled segment-neighbourhood search.

The kernel walks the same generator string as ``segments._enumerate_placements``
but, instead of materialising moves, scores every completion under one
objective and keeps a uniformly random minimiser (reservoir sampling over
ties). Scores are the move-dependent part of each objective; the constant
part cancels in the argmin.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numba import njit

from .lattice import BASIS, reachable_offsets

BASIS_ARR = np.array(BASIS, dtype=np.int64)

KIND_H1 = 0
KIND_H2 = 1
KIND_H3 = 2


@lru_cache(maxsize=None)
def reach_table(max_steps: int) -> np.ndarray:
    """``table[s, dx+R, dy+R, dz+R]`` is true iff the offset is reachable in exactly s steps."""
    r = max(max_steps, 1)
    w = 2 * r + 1
    table = np.zeros((r + 1, w, w, w), dtype=np.bool_)
    for s in range(r + 1):
        for x, y, z in reachable_offsets(s):
            table[s, x + r, y + r, z + r] = True
    return table


@njit(cache=True)
def search_segment(
    occ,            # int8 grid: 1 where a fixed monomer sits
    hfix,           # int8 grid: 1 where a fixed H monomer sits
    slot_is_h,      # (k,) bool
    slot_monomer,   # (k,) int64
    slot_prev,      # (k,) bool: anchored on the previous slot
    slot_anchor,    # (k, 3) grid coordinates
    slot_target,    # (k, 3) grid coordinates
    slot_steps,     # (k,) int64, 0 = no target
    slot_adj_h,     # (k,) fixed H chain neighbours (always in contact)
    slot_old,       # (k, 3) current grid coordinates
    reach,          # reach table
    n_fixed_h,
    fixed_sum,      # (3,) sum of fixed H grid coordinates
    fixed_norm,     # sum of squared norms of fixed H grid coordinates
    n_h,
    kind,
    seed,
):
    k = slot_monomer.shape[0]
    R = (reach.shape[1] - 1) // 2
    np.random.seed(seed)

    digits = np.full(k, -1, dtype=np.int64)
    pts = np.zeros((k, 3), dtype=np.int64)
    placed = np.zeros(k, dtype=np.bool_)
    same = np.zeros(k + 1, dtype=np.int64)   # slots at their old point, prefix count
    acc1 = np.zeros(k + 1, dtype=np.int64)   # contacts (negated)
    acc2 = np.zeros(k + 1, dtype=np.int64)   # all-pair distance part
    accx = np.zeros(k + 1, dtype=np.int64)
    accy = np.zeros(k + 1, dtype=np.int64)
    accz = np.zeros(k + 1, dtype=np.int64)
    accn = np.zeros(k + 1, dtype=np.int64)

    best = np.zeros((k, 3), dtype=np.int64)
    best_key = np.int64(0)
    ties = 0
    count = 0

    t = 0
    while t >= 0:
        if placed[t]:
            occ[pts[t, 0], pts[t, 1], pts[t, 2]] = 0
            placed[t] = False
        digits[t] += 1
        if digits[t] == 12:
            digits[t] = -1
            t -= 1
            continue
        if slot_prev[t]:
            bx = pts[t - 1, 0]
            by = pts[t - 1, 1]
            bz = pts[t - 1, 2]
        else:
            bx = slot_anchor[t, 0]
            by = slot_anchor[t, 1]
            bz = slot_anchor[t, 2]
        d = digits[t]
        x = bx + BASIS_ARR[d, 0]
        y = by + BASIS_ARR[d, 1]
        z = bz + BASIS_ARR[d, 2]
        if occ[x, y, z] != 0:
            continue
        s = slot_steps[t]
        if s > 0:
            ox = slot_target[t, 0] - x
            oy = slot_target[t, 1] - y
            oz = slot_target[t, 2] - z
            if abs(ox) > s or abs(oy) > s or abs(oz) > s:
                continue
            if not reach[s, ox + R, oy + R, oz + R]:
                continue

        pts[t, 0] = x
        pts[t, 1] = y
        pts[t, 2] = z
        occ[x, y, z] = 2
        placed[t] = True

        is_same = x == slot_old[t, 0] and y == slot_old[t, 1] and z == slot_old[t, 2]
        same[t + 1] = same[t] + (1 if is_same else 0)
        c1 = 0
        c2 = 0
        if slot_is_h[t]:
            nb = 0
            for dd in range(12):
                nb += hfix[x + BASIS_ARR[dd, 0], y + BASIS_ARR[dd, 1], z + BASIS_ARR[dd, 2]]
            c1 = -(nb - slot_adj_h[t])
            norm = x * x + y * y + z * z
            c2 = n_fixed_h * norm - 2 * (x * fixed_sum[0] + y * fixed_sum[1] + z * fixed_sum[2]) + fixed_norm
            m = slot_monomer[t]
            for u in range(t):
                if not slot_is_h[u]:
                    continue
                dx = x - pts[u, 0]
                dy = y - pts[u, 1]
                dz = z - pts[u, 2]
                d2 = dx * dx + dy * dy + dz * dz
                c2 += d2
                if d2 == 2 and abs(m - slot_monomer[u]) > 1:
                    c1 -= 1
            accx[t + 1] = accx[t] + x
            accy[t + 1] = accy[t] + y
            accz[t + 1] = accz[t] + z
            accn[t + 1] = accn[t] + norm
        else:
            accx[t + 1] = accx[t]
            accy[t + 1] = accy[t]
            accz[t + 1] = accz[t]
            accn[t + 1] = accn[t]
        acc1[t + 1] = acc1[t] + c1
        acc2[t + 1] = acc2[t] + c2

        if t < k - 1:
            t += 1
            continue

        # complete placement
        if same[k] == k:
            continue
        count += 1
        if kind == 0:
            key = acc1[k]
        elif kind == 1:
            key = acc2[k]
        else:
            sx = fixed_sum[0] + accx[k]
            sy = fixed_sum[1] + accy[k]
            sz = fixed_sum[2] + accz[k]
            key = n_h * (fixed_norm + accn[k]) - (sx * sx + sy * sy + sz * sz)
        if count == 1 or key < best_key:
            best_key = key
            ties = 1
            best[:, :] = pts
        elif key == best_key:
            ties += 1
            if np.random.randint(0, ties) == 0:
                best[:, :] = pts

    return count, best, best_key
