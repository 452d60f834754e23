"""Counter-based random streams.

Every stream is a Philox generator whose key is derived from
(master seed, stream id); the Philox counter then indexes the draws. A
replicate block always reads the same stream no matter which worker runs it,
so results do not depend on scheduling.
"""

import zlib

import numpy as np


def _word(part):
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("stream id parts must be nonnegative")
        return int(part)
    return zlib.crc32(str(part).encode("utf-8"))


def stream(master_seed, *stream_id):
    """Independent generator for `stream_id` (ints or strings) under `master_seed`."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(_word(s) for s in stream_id))
    key = ss.generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def block_sizes(total, block_size):
    """Sizes of the fixed replicate blocks covering `total` replicates."""
    full, rest = divmod(int(total), int(block_size))
    return [int(block_size)] * full + ([rest] if rest else [])
