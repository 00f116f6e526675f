"""Stage 2: sort each block's (seg_id, offset) pairs by segment id.

Sorting is strictly per block, never global.  The order is the stable
total order (seg_id, offset, original position), so the compressed stream
is bit-identical across runs and worker counts.
"""

from __future__ import annotations

import numpy as np

from .model import QuantizedBlock

__all__ = ["sort_block"]


def sort_block(qb: QuantizedBlock) -> QuantizedBlock:
    if qb.count <= 1:
        return qb
    # lexsort is stable with the last key primary; original position
    # breaks remaining ties implicitly.
    order = np.lexsort((qb.offsets, qb.seg_ids))
    return QuantizedBlock(
        geometry=qb.geometry,
        seg_ids=qb.seg_ids[order],
        offsets=qb.offsets[order],
        ranks=None if qb.ranks is None else qb.ranks[order],
    )
