"""Seeded, splittable random streams.

``prng_stream(seed, stream_id)`` returns a numpy ``Generator`` driven by the
Philox-4x64 counter-based bit generator.  Its key is derived by
``SeedSequence(seed, spawn_key=(stream_id,))``, so each ``(seed, stream_id)``
pair gets an independent, platform-stable sequence and no entropy is read from
the environment.
"""
import numpy as np


def prng_stream(seed, stream_id=0):
    if seed is None:
        raise ValueError("an explicit seed is required")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.Philox(ss))


def random_unit_vector(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)
