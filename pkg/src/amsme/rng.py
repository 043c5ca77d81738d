"""Keyed random streams.

Every consumer of randomness asks for a stream by a tuple of integer keys
(seed, purpose, counter...). The stream is a Philox counter-based generator
whose key is derived from the whole tuple, so draws do not depend on call
order or on how work is scheduled.
"""
import numpy as np


def stream(seed, *keys) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), *(int(k) for k in keys)])
    return np.random.Generator(np.random.Philox(ss))
