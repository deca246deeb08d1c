"""Deterministic random stream derivation for replicated runs.

Every run owns exactly one generator, derived from (master_seed, run_index).
Streams for distinct run indices are statistically independent, and the same
pair always yields the same sequence, so results never depend on how many
worker processes executed the batch or in which order runs finished.
"""

from __future__ import annotations

import numpy as np

RngStream = np.random.Generator


def derive_stream(master_seed: int, run_index: int) -> RngStream:
    """Return the generator for one run of a replication batch."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(run_index,))
    return np.random.Generator(np.random.PCG64(seq))
