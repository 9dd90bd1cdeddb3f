"""
Counter-based random substreams.

One root seed keys a Philox generator; replication block b reads the stream
starting at counter b, so block b draws the same numbers whichever worker runs
it and in whatever order.
"""

from typing import Iterator, Tuple

import numpy as np

from utils.errors import DomainError

DEFAULT_BLOCK_SIZE = 1000


def _check_seed(seed: int) -> int:
    if int(seed) != seed or seed < 0 or seed >= 2 ** 64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return int(seed)


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Generator for replication block `block` under root `seed`."""
    seed = _check_seed(seed)
    if int(block) != block or block < 0:
        raise DomainError(f"block index must be a nonnegative integer, got {block}")
    # high counter word separates blocks; low words advance within a block
    bit_generator = np.random.Philox(key=seed, counter=[0, 0, 0, int(block)])
    return np.random.Generator(bit_generator)


def iter_blocks(reps: int, block_size: int = DEFAULT_BLOCK_SIZE) -> Iterator[Tuple[int, int]]:
    """(block index, replications in block) covering reps replications."""
    if block_size < 1:
        raise DomainError(f"block size must be positive, got {block_size}")
    full, rest = divmod(int(reps), int(block_size))
    for block in range(full):
        yield block, block_size
    if rest:
        yield full, rest
