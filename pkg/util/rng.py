import numpy as np

from util.settings import settings


def make_stream(seed: int | None = None, *keys: int) -> np.random.Generator:
    """
    Build an independent random stream from a 64-bit seed and integer keys.

    Streams are Philox (counter-based) generators keyed through a SeedSequence, so
    the stream for a given (seed, keys) tuple does not depend on the order in which
    other streams were created.

    Parameters
    ----------
    seed : int, optional
        Base seed; defaults to the QLAB_SEED setting.
    *keys : int
        Non-negative identifiers of the experiment cell, replication, restart, ...
    """
    base = settings.seed if seed is None else seed
    entropy = [int(base) & 0xFFFFFFFFFFFFFFFF] + [int(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def split(stream: np.random.Generator, count: int) -> list[np.random.Generator]:
    """Spawn `count` child streams; deterministic given the parent's history."""
    return stream.spawn(count)
