"""Seeded random streams.

Each component draws from its own named stream so that, for example, new
permutations can be drawn for a fixed dataset by changing only the seed
given to :func:`rps.services.region.initialize`. Streams use the
counter-based Philox generator keyed by a ``SeedSequence``.
"""

import hashlib
from typing import Sequence, Union

import numpy as np

from rps.core.errors import ParameterError

Seed = Union[int, Sequence[int]]

INPUT = "input"
NOISE = "noise"
REGRESSORS = "regressors"
PERMUTATIONS = "permutations"
TIEBREAK = "tiebreak"
SIGNS = "signs"


def _tag(name: str) -> int:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], byteorder="big")


def _entropy(seed: Seed) -> Union[int, list]:
    if isinstance(seed, (int, np.integer)):
        if seed < 0:
            raise ParameterError(f"seed must be nonnegative, got {seed}")
        return int(seed)
    entropy = [int(s) for s in seed]
    if any(s < 0 for s in entropy):
        raise ParameterError(f"seed entries must be nonnegative, got {entropy}")
    return entropy


def stream(seed: Seed, name: str) -> np.random.Generator:
    """Generator for the named substream of ``seed``"""
    seq = np.random.SeedSequence(_entropy(seed), spawn_key=(_tag(name),))
    return np.random.Generator(np.random.Philox(seq))


def derive_seed(seed: Seed, *path: int) -> int:
    """Child seed for e.g. (sample size, trial index); independent of call order"""
    seq = np.random.SeedSequence(_entropy(seed), spawn_key=tuple(int(p) for p in path))
    return int(seq.generate_state(1, dtype=np.uint64)[0])
