"""Block-allocating surrogate-key source.

Workers draw disjoint id blocks from one shared counter per entity, so
ids are unique across a parallel run without per-id locking. Unused tail
ids of a block are simply never handed out again (gaps are fine).
"""

import multiprocessing


def shared_counters(entities):
    """One lockable shared counter per entity, inheritable by forked workers."""
    return {name: multiprocessing.Value("q", 0) for name in entities}


class IdAllocator:
    def __init__(self, counters, block_size=1000):
        if block_size < 1:
            raise ValueError("block_size must be >= 1")
        self._counters = counters
        self._block_size = block_size
        self._blocks = {}  # entity -> [next id, remaining]

    def next_id(self, entity) -> int:
        block = self._blocks.get(entity)
        if not block or block[1] == 0:
            counter = self._counters[entity]
            with counter.get_lock():
                start = counter.value + 1
                counter.value += self._block_size
            block = self._blocks[entity] = [start, self._block_size]
        value = block[0]
        block[0] += 1
        block[1] -= 1
        return value
