"""Block-parallel error-bounded lossy compression for particle positions.

Four stages: spatial quantization of coordinates into (segment id,
offset) integer pairs within the error bound, a per-block sort by
segment id, lossless run-length + delta + fixed-width coding, and
compaction of the variable-length block payloads into one contiguous
container.  Decompression inverts everything but the sort.

>>> import numpy as np, gpz
>>> ds = gpz.Dataset.from_axes([np.random.rand(4096).astype(np.float32)])
>>> blob = gpz.compress(ds, gpz.CompressConfig(error_bound=1e-3))
>>> out = gpz.decompress(blob)
"""

from .bench import GenKind, GenSpec, generate, run_bench
from .errors import CorruptData, DomainError, GpzError, WidthOverflow
from .metrics import (
    aggregate_psnr,
    bitrate,
    compression_ratio,
    evaluate,
    nrmse,
    pair_blocks,
    verify_bound,
)
from .model import (
    BlockGeometry,
    CompressConfig,
    Dataset,
    EbMode,
    Precision,
    QuantizedBlock,
    resolve_absolute_bound,
)
from .pipeline import compress, decompress, iter_block_slices, iter_decompressed_blocks

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "CompressConfig",
    "Precision",
    "EbMode",
    "BlockGeometry",
    "QuantizedBlock",
    "compress",
    "decompress",
    "iter_block_slices",
    "iter_decompressed_blocks",
    "resolve_absolute_bound",
    "compression_ratio",
    "bitrate",
    "nrmse",
    "aggregate_psnr",
    "pair_blocks",
    "verify_bound",
    "evaluate",
    "GenKind",
    "GenSpec",
    "generate",
    "run_bench",
    "GpzError",
    "DomainError",
    "WidthOverflow",
    "CorruptData",
    "__version__",
]
