"""Seeded random chain specs and subspaces for property tests and demos."""

from __future__ import annotations

import random
from typing import Sequence

from .exact import ZERO, Matrix, Scalar, rank
from .jordan import JordanStructure
from .subspace import Chain, ChainSpec, nil_apply, vector_height

__all__ = ["random_scalar", "random_chain_spec", "random_structure"]


def random_scalar(rng: random.Random, complex_ok: bool = False, density: float = 0.6) -> Scalar:
    if rng.random() > density:
        return Scalar(0)
    re = rng.randint(-4, 4)
    den = rng.choice([1, 1, 1, 2, 3])
    im = rng.randint(-2, 2) if complex_ok and rng.random() < 0.3 else 0
    return Scalar(f"{re}/{den}", im)


def random_chain_spec(
    s: JordanStructure, rng: random.Random, complex_ok: bool = False, tries: int = 50
) -> ChainSpec:
    """Independent random chains; the number of chains per eigenvalue is random (possibly zero)."""
    for _ in range(tries):
        chains = []
        vectors: list = []
        for lam, blocks in s.groups():
            count = rng.randint(0, len(blocks))
            for _ in range(count):
                gen = [ZERO] * s.n
                for b in blocks:
                    o, size = s.offsets[b], s.sizes[b]
                    for p in range(rng.randint(0, size)):
                        gen[o + p] = random_scalar(rng, complex_ok)
                gen = tuple(gen)
                h = vector_height(s, gen)
                if h == 0:
                    continue
                k = h
                chain_vecs = [gen]
                for _ in range(k - 1):
                    chain_vecs.append(nil_apply(s, chain_vecs[-1]))
                trial = vectors + chain_vecs
                if rank(Matrix.from_columns(trial)) != len(trial):
                    continue
                vectors = trial
                chains.append(Chain(gen, k, lam))
        return ChainSpec(s, chains)
    raise RuntimeError("could not draw a chain spec")


def random_structure(rng: random.Random, max_blocks: int = 3, max_size: int = 4,
                     max_eigs: int = 2) -> JordanStructure:
    nb = rng.randint(1, max_blocks)
    eigs = rng.sample(range(max_eigs), rng.randint(1, min(max_eigs, nb)))
    blocks = []
    for lam in sorted(eigs):
        blocks.append((lam, rng.randint(1, max_size)))
    while len(blocks) < nb:
        lam = rng.choice(sorted(eigs))
        blocks.append((lam, rng.randint(1, max_size)))
    blocks.sort(key=lambda b: (b[0], -b[1]))
    return JordanStructure(blocks)
