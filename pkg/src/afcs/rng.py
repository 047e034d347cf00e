"""Seeded random streams.

Each Monte Carlo trial owns an independent PCG64 stream keyed by
``(master_seed, trial_index)``, so trials can be generated in any order or in
parallel and still reproduce.  Normal variates come from the Box-Muller
transform so the method is fixed and documented independently of numpy's
internal sampler.
"""

import numpy as np

NORMAL_METHOD = "box-muller (PCG64 uniforms, pairs emitted as r*cos, r*sin)"


def trial_generator(master_seed: int, trial_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(trial_index),))
    return np.random.Generator(np.random.PCG64(seq))


def standard_normals(gen: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent N(0, 1) draws.

    Consumes ``2 * ceil(size / 2)`` uniforms; an odd trailing variate is
    discarded.
    """
    pairs = (size + 1) // 2
    u1 = 1.0 - gen.random(pairs)  # (0, 1], keeps log finite
    u2 = gen.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(theta)
    z[1::2] = radius * np.sin(theta)
    return z[:size]
