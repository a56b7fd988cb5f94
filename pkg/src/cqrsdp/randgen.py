"""Seeded random instance generation for benchmarks and test sweeps.

Generator identity: numpy's Philox 4x64 counter-based bit generator with
ziggurat standard normals ("philox4x64-ziggurat").  Each instance derives its
own stream from (seed, n, beta-bits, index) through SeedSequence, so any
instance can be regenerated in isolation and worker scheduling cannot change
the data.  The seed is recorded in every report that involves generated
instances.

Recipe per instance: g has independent standard-normal entries; a full
standard-normal square matrix is drawn and symmetrized as H = (H1 + H1t)/2
(the source recipe prints this without the transpose, which would leave H
non-symmetric -- presumed typo, the transposed form is implemented);
f0 = 0; sigma = 4 unless overridden; beta as requested.
"""

from __future__ import annotations

import numpy as np

from .core import CqrProblem

__all__ = ["GENERATOR_NAME", "instance_rng", "make_instance"]

GENERATOR_NAME = "philox4x64-ziggurat"


def _beta_bits(beta: float) -> int:
    """Stable 64-bit encoding of beta for seed derivation (handles -0.0, fractions)."""
    return int(np.float64(beta).view(np.uint64))


def instance_rng(
    seed: int, n: int, beta: float, index: int, salt: int = 0
) -> np.random.Generator:
    """Philox stream for one instance; salt separates auxiliary draws
    (e.g. weak-duality sample points) from the instance data itself."""
    ss = np.random.SeedSequence(
        [int(seed), int(n), _beta_bits(beta), int(index), int(salt)]
    )
    return np.random.Generator(np.random.Philox(ss))


def make_instance(
    seed: int,
    n: int,
    beta: float,
    index: int,
    sigma: float = 4.0,
) -> CqrProblem:
    rng = instance_rng(seed, n, beta, index)
    g = rng.standard_normal(n)
    h1 = rng.standard_normal((n, n))
    return CqrProblem(
        f0=0.0,
        g=g,
        H=0.5 * (h1 + h1.T),
        beta=float(beta),
        sigma=float(sigma),
        name=f"rand-n{n}-beta{beta:g}-seed{seed}-i{index}",
    )
