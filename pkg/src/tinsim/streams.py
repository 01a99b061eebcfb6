"""Deterministic random streams.

Every stochastic element draws from its own counter-based Philox stream,
keyed as (seed, stream_id).  Mechanical mode k uses stream_id = k, so adding
or removing a mode never perturbs the noise seen by the others.  Shot noise
and classical detuning noise use reserved ids far above any plausible mode
count.
"""

from __future__ import annotations

import numpy as np

# Reserved stream ids; mode streams occupy 0 .. 2**32 - 1.
STREAM_SHOT = 1 << 32
STREAM_DETUNING_NOISE = (1 << 32) + 1


def stream(seed: int, stream_id: int) -> np.random.Generator:
    """Generator for the (seed, stream_id) Philox stream."""
    key = np.array([np.uint64(seed), np.uint64(stream_id)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def mode_stream(seed: int, mode_index: int) -> np.random.Generator:
    if not 0 <= mode_index < STREAM_SHOT:
        raise ValueError("mode index out of stream range")
    return stream(seed, mode_index)


def shot_stream(seed: int) -> np.random.Generator:
    return stream(seed, STREAM_SHOT)


def detuning_noise_stream(seed: int) -> np.random.Generator:
    return stream(seed, STREAM_DETUNING_NOISE)
