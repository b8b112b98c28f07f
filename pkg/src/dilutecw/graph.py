"""Deterministic sampling and serialization of directed Bernoulli graphs.

Sampling is counter-based: edge (i, j) gets the 64-bit counter c = i*n + j,
which is mixed with the master seed through the SplitMix64 finalizer, and the
top 53 bits of the mix decide the edge against a fixed integer threshold
round(p * 2^53).  Consequences worth having:

* the same (seed, n, p) always yields the same graph, on any platform,
  with no dependence on numpy's generator internals;
* edges are independent across counters, and any sub-block of the adjacency
  matrix can be regenerated in isolation;
* p = 1 gives the complete graph exactly (threshold 2^53 always wins).

The text format is deliberately dumb so other tools can read it:

    dilute-cw-graph v1 N=<n>
    <row 0: n characters, each '0' or '1'>
    ...
    <row n-1>

Character j of row i is the indicator of edge (i, j).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, GraphFormatError
from .model import DisorderGraph, ModelParams

__all__ = ["GraphSeed", "sample_graph", "write_graph", "read_graph", "DEFAULT_BIT_LIMIT"]

# Refuse to materialize adjacency matrices beyond this many bits (2^33 bits
# = 1 GiB packed); sample_graph and read_graph both honor it.
DEFAULT_BIT_LIMIT = 1 << 33

_HEADER_PREFIX = "dilute-cw-graph v1 N="

# SplitMix64 constants (Steele, Lea, Flood 2014).
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MIX1 = 0xBF58476D1CE4E5B9
_SM_MIX2 = 0x94D049BB133111EB


@dataclass(frozen=True)
class GraphSeed:
    """Master seed for graph sampling, a 64-bit unsigned integer."""

    master_seed: int

    def __post_init__(self):
        if not isinstance(self.master_seed, int) or isinstance(self.master_seed, bool):
            raise ValueError(f"master_seed must be an integer, got {self.master_seed!r}")
        if not 0 <= self.master_seed < (1 << 64):
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")


def bernoulli_threshold(p: float) -> int:
    """Integer threshold t such that a uniform 53-bit value u gives an edge iff u < t."""
    return round(p * (1 << 53))


def sample_graph(
    params: ModelParams,
    seed: GraphSeed,
    *,
    bit_limit: int = DEFAULT_BIT_LIMIT,
) -> DisorderGraph:
    """Sample a directed Bernoulli(p) graph with loops, deterministically in the seed."""
    n = params.n
    if n * n > bit_limit:
        raise CapacityError(
            f"adjacency matrix needs {n * n} bits, above the cap of {bit_limit}; "
            "pass a larger bit_limit to override"
        )
    thr = np.uint64(bernoulli_threshold(params.p))
    base = np.uint64(seed.master_seed)
    gamma = np.uint64(_SM_GAMMA)
    mix1 = np.uint64(_SM_MIX1)
    mix2 = np.uint64(_SM_MIX2)
    cols = np.arange(n, dtype=np.uint64)
    rows = []
    with np.errstate(over="ignore"):
        for i in range(n):
            # SplitMix64 finalizer of (seed + (counter+1) * golden gamma); the
            # +1 keeps counter 0 from collapsing to the bare seed.
            z = base + (np.uint64(i * n) + cols + np.uint64(1)) * gamma
            z = (z ^ (z >> np.uint64(30))) * mix1
            z = (z ^ (z >> np.uint64(27))) * mix2
            z = z ^ (z >> np.uint64(31))
            hits = (z >> np.uint64(11)) < thr
            packed = np.packbits(hits, bitorder="little").tobytes()
            rows.append(int.from_bytes(packed, "little"))
    return DisorderGraph(n=n, rows=tuple(rows))


def _row_to_text(row: int, n: int) -> str:
    # format() prints the most significant bit first; reverse so that
    # character j corresponds to bit j.
    return format(row, f"0{n}b")[::-1]


def write_graph(g: DisorderGraph, destination) -> None:
    """Write a graph in the v1 text format to a path or text file object."""
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="ascii") as fh:
            write_graph(g, fh)
        return
    destination.write(f"{_HEADER_PREFIX}{g.n}\n")
    for row in g.rows:
        destination.write(_row_to_text(row, g.n))
        destination.write("\n")


def read_graph(source, *, bit_limit: int = DEFAULT_BIT_LIMIT) -> DisorderGraph:
    """Parse the v1 text format from a path or a text file object.

    Raises GraphFormatError with a 1-based line number on malformed input
    (the header is line 1) and CapacityError when the declared size exceeds
    ``bit_limit``.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="ascii") as fh:
            return read_graph(fh, bit_limit=bit_limit)

    header = source.readline()
    if header == "":
        raise GraphFormatError("empty input, expected header", line=1)
    header = header.rstrip("\n")
    if not header.startswith(_HEADER_PREFIX):
        raise GraphFormatError(
            f"bad header {header!r}, expected '{_HEADER_PREFIX}<n>'", line=1
        )
    size_text = header[len(_HEADER_PREFIX):]
    try:
        n = int(size_text)
    except ValueError:
        raise GraphFormatError(f"bad size field {size_text!r} in header", line=1) from None
    if n < 1:
        raise GraphFormatError(f"declared size must be positive, got {n}", line=1)
    if n * n > bit_limit:
        raise CapacityError(
            f"declared size n={n} needs {n * n} bits, above the cap of {bit_limit}"
        )

    rows = []
    for i in range(n):
        line = source.readline()
        lineno = i + 2
        if line == "":
            raise GraphFormatError(
                f"file ends after {i} of {n} rows", line=lineno
            )
        line = line.rstrip("\n")
        if len(line) != n:
            raise GraphFormatError(
                f"row has {len(line)} characters, expected {n}", line=lineno
            )
        bad = set(line) - {"0", "1"}
        if bad:
            raise GraphFormatError(
                f"row contains {sorted(bad)!r}, expected only '0'/'1'", line=lineno
            )
        rows.append(int(line[::-1], 2))
    trailing = source.readline()
    if trailing.strip():
        raise GraphFormatError("unexpected content after last row", line=n + 2)
    return DisorderGraph(n=n, rows=tuple(rows))
