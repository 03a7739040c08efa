"""Reproducible simulated datasets.

Three generators: the low-dimensional binomial designs (J=20 columns, each
with its own alphabet size and per-cluster success probability), the
nucleotide-style high-dimensional simulator (five signal blocks plus a
noise block over the four-letter alphabet), and plain IID uniform noise.
Columns (low-dim) and blocks (high-dim) draw from substreams keyed by
``(seed, replicate, ...)``, so replicates are independent and generation
order never matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CategoricalMatrix, Clustering
from .rng import substream

NUCLEOTIDES = ("A", "T", "C", "G")

# P(C) = P(G) = 1/3 and P(A) = P(T) = 1/6 in A, T, C, G order
SIGNAL_DIST = (1 / 6, 1 / 6, 1 / 3, 1 / 3)


@dataclass(frozen=True)
class Design:
    """A low-dimensional cluster-size pattern."""

    name: str
    K: int
    sizes: tuple[int, ...]
    J: int = 20

    def __post_init__(self) -> None:
        if len(self.sizes) != self.K or any(s < 1 for s in self.sizes):
            raise ValueError("need one positive size per cluster")
        if self.J < 1:
            raise ValueError("J must be >= 1")

    @property
    def n(self) -> int:
        return sum(self.sizes)


DESIGNS: dict[str, Design] = {
    d.name: d
    for d in (
        Design("D1", 5, (25, 25, 25, 25, 25)),
        Design("D2", 5, (9, 29, 29, 29, 29)),
        Design("D3", 5, (10, 10, 35, 35, 35)),
        Design("D4", 5, (10, 10, 10, 47, 48)),
        Design("D5", 5, (10, 10, 10, 10, 85)),
        Design("D6", 5, (10, 25, 25, 25, 40)),
        Design("D7", 5, (10, 10, 30, 30, 45)),
        Design("D8", 5, (10, 10, 10, 35, 60)),
        Design("D9", 5, (10, 10, 25, 40, 40)),
        Design("D10", 2, (25, 25), 20),
        Design("D11", 2, (15, 35), 20),
    )
}


@dataclass(frozen=True)
class SeqDesign:
    """High-dimensional sequence simulator configuration.

    The ``J`` columns split into six blocks by a multinomial over
    ``block_probs``; in block ``r < 5`` only cluster ``r`` draws from the
    skewed signal distribution, everyone else (and the whole sixth block)
    draws uniformly over the four symbols.
    """

    block_probs: tuple[float, ...] = (0.15, 0.15, 0.15, 0.15, 0.15, 0.25)
    J: int = 50_000
    sizes: tuple[int, ...] = (10, 10, 10, 10, 10)
    signal_dist: tuple[float, ...] = SIGNAL_DIST

    def __post_init__(self) -> None:
        if len(self.block_probs) != 6 or abs(sum(self.block_probs) - 1.0) > 1e-9:
            raise ValueError("block_probs must be six probabilities summing to 1")
        if len(self.sizes) != 5 or any(s < 1 for s in self.sizes):
            raise ValueError("need five positive cluster sizes")
        if len(self.signal_dist) != 4 or abs(sum(self.signal_dist) - 1.0) > 1e-9:
            raise ValueError("signal_dist must be four probabilities summing to 1")
        if self.J < 6:
            raise ValueError("J must cover at least one column per block")

    @property
    def n(self) -> int:
        return sum(self.sizes)


SEQ_LOW_NOISE = SeqDesign(block_probs=(0.15, 0.15, 0.15, 0.15, 0.15, 0.25))
SEQ_HIGH_NOISE = SeqDesign(block_probs=(0.1, 0.1, 0.1, 0.1, 0.1, 0.5))


def _truth(sizes: tuple[int, ...]) -> Clustering:
    return Clustering(labels=np.repeat(np.arange(len(sizes)), sizes), K=len(sizes))


def gen_lowdim(
    design: Design,
    seed: int = 0,
    replicate: int = 0,
    return_params: bool = False,
):
    """One draw of a low-dimensional design.

    Per column ``j``: alphabet bound ``a_j ~ DUnif[3, 20]``, per-cluster
    success probabilities ``p_jk ~ Unif(0.1, 0.9)``, and the entries of
    cluster ``k`` are IID ``Bin(a_j, p_jk)`` (values ``0..a_j``, recorded
    cardinality ``a_j + 1``).  The probability spread is calibrated so the
    published classification rates of the hierarchical methods on these
    designs are reproduced.
    """
    sizes = design.sizes
    n, J, K = design.n, design.J, design.K
    codes = np.empty((n, J), dtype=np.int32)
    cards = np.empty(J, dtype=np.int64)
    bounds = np.empty(J, dtype=np.int64)
    probs = np.empty((J, K), dtype=np.float64)
    for j in range(J):
        rng = substream(seed, replicate, j)
        a = int(rng.integers(3, 21))
        p = rng.uniform(0.1, 0.9, size=K)
        codes[:, j] = np.concatenate(
            [rng.binomial(a, p[k], size=sizes[k]) for k in range(K)]
        )
        cards[j] = a + 1
        bounds[j] = a
        probs[j] = p
    x = CategoricalMatrix(codes=codes, cardinalities=cards)
    if return_params:
        return x, _truth(sizes), bounds, probs
    return x, _truth(sizes)


def _draw_categorical(rng: np.random.Generator, probs, shape) -> np.ndarray:
    cum = np.cumsum(np.asarray(probs, dtype=np.float64))
    return np.searchsorted(cum, rng.random(size=shape), side="right").astype(np.int32)


def gen_highdim(sd: SeqDesign, seed: int = 0, replicate: int = 0):
    """One draw of the high-dimensional sequence simulator."""
    widths = substream(seed, replicate).multinomial(sd.J, sd.block_probs)
    n = sd.n
    codes = np.empty((n, sd.J), dtype=np.int32)
    starts = np.concatenate(([0], np.cumsum(widths)))
    row_starts = np.concatenate(([0], np.cumsum(sd.sizes)))
    for b in range(6):
        rng = substream(seed, replicate, b)
        lo, hi = starts[b], starts[b + 1]
        w = hi - lo
        if w == 0:
            continue
        block = rng.integers(0, 4, size=(n, w), dtype=np.int32)
        if b < 5:
            r0, r1 = row_starts[b], row_starts[b + 1]
            block[r0:r1] = _draw_categorical(rng, sd.signal_dist, (r1 - r0, w))
        codes[:, lo:hi] = block
    labels = tuple(tuple(NUCLEOTIDES) for _ in range(sd.J))
    x = CategoricalMatrix(
        codes=codes,
        cardinalities=np.full(sd.J, 4, dtype=np.int64),
        labels=labels,
    )
    return x, _truth(sd.sizes)


def gen_noise(n: int, J: int, s: int, seed: int = 0, replicate: int = 0) -> CategoricalMatrix:
    """IID uniform table over an ``s``-symbol alphabet."""
    if s < 2:
        raise ValueError("alphabet size must be >= 2")
    codes = substream(seed, replicate).integers(0, s, size=(n, J), dtype=np.int32)
    return CategoricalMatrix(codes=codes, cardinalities=np.full(J, s, dtype=np.int64))
