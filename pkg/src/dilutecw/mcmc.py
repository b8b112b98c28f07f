"""Glauber heat-bath dynamics for the magnetization under fixed disorder.

One sweep visits sites 0 .. n-1 in order.  At site i the conditional Gibbs
law given the rest depends only on the integer field

    S_i = sum_{j != i} (eps[i,j] + eps[j,i]) * s_j

(the diagonal term cancels because s_i^2 = 1), and the heat-bath update sets
s_i = +1 with probability 1 / (1 + exp(-beta * S_i / (n p))) regardless of
the current value.  S_i is an AND-and-popcount against two per-site masks
(weight-1 and weight-2 symmetric neighbors), and since S_i only takes the
integer values -2n .. 2n, the acceptance probabilities come from one
precomputed table per (graph shape, beta).  That keeps the inner loop at two
popcounts, one table lookup, and one comparison per site, which is what lets
a pure-Python chain do n = 4096 sweeps in a few milliseconds.

Randomness is replayable by construction.  A chain seed plus replica index
derives two 64-bit streams (initial state, dynamics) through repeated
SplitMix64 finalizer application; every uniform then comes from a
numpy Generator seeded with the derived value.  Replicas are therefore
independent of each other and of how many run, and rerunning any subset
reproduces it bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import GraphSeed, sample_graph
from .model import DisorderGraph, ModelParams, SpinConfig
from .stats import EmpiricalMeasure, NormalRef, ks_distance, levy_distance, summarize

__all__ = [
    "ChainConfig",
    "MagnetizationSample",
    "SpinUpdateTables",
    "build_update_tables",
    "default_burn_in",
    "derive_seed",
    "local_field",
    "glauber_sweep",
    "run_chain",
    "GraphRun",
    "ExperimentRecord",
    "quenched_experiment",
]

_MASK64 = (1 << 64) - 1
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MIX1 = 0xBF58476D1CE4E5B9
_SM_MIX2 = 0x94D049BB133111EB


def _finalize(z: int) -> int:
    z = (z ^ (z >> 30)) * _SM_MIX1 & _MASK64
    z = (z ^ (z >> 27)) * _SM_MIX2 & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Derive an independent 64-bit stream seed from a master seed and indices.

    Chained SplitMix64: each index advances the state by (index + 1) golden
    steps and refinalizes, so (seed, 1, 2) and (seed, 2, 1) land far apart.
    """
    h = _finalize(master & _MASK64)
    for v in indices:
        h = _finalize((h + (int(v) + 1) * _SM_GAMMA) & _MASK64)
    return h


def default_burn_in(n: int) -> int:
    """Default burn-in, 10 sqrt(n) sweeps, tuned for the fast-mixing regime.

    Above the transition the chain needs far longer than any fixed rule to
    hop between the two magnetized branches; callers studying that regime
    should set burn-in explicitly.
    """
    return math.ceil(10.0 * math.sqrt(n))


@dataclass(frozen=True)
class ChainConfig:
    """Sweep budget and seeding for one or more replicas of a chain.

    ``sweeps`` counts all sweeps including burn-in; a value is recorded every
    ``thin`` sweeps once past ``burn_in``, so floor((sweeps - burn_in)/thin)
    values are retained per replica.  ``burn_in=None`` applies the default
    rule at run time.
    """

    sweeps: int
    burn_in: int | None = None
    thin: int = 1
    replicas: int = 1
    chain_seed: int = 0

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValueError(f"sweeps must be positive, got {self.sweeps}")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError(f"burn_in must be nonnegative, got {self.burn_in}")
        if self.thin < 1:
            raise ValueError(f"thin must be positive, got {self.thin}")
        if self.replicas < 1:
            raise ValueError(f"replicas must be positive, got {self.replicas}")
        if not 0 <= self.chain_seed < (1 << 64):
            raise ValueError(f"chain_seed must fit in 64 bits, got {self.chain_seed}")

    def resolved_burn_in(self, n: int) -> int:
        return default_burn_in(n) if self.burn_in is None else self.burn_in

    def retained(self, n: int) -> int:
        kept = (self.sweeps - self.resolved_burn_in(n)) // self.thin
        return max(kept, 0)


@dataclass(frozen=True)
class MagnetizationSample:
    """Retained scaled-magnetization values of one replica.

    ``values[j]`` was recorded at sweep ``first_sweep + j * thin`` (1-based
    sweep count).
    """

    graph_seed: int | None
    replica_id: int
    first_sweep: int
    thin: int
    values: tuple[float, ...]


@dataclass(frozen=True)
class SpinUpdateTables:
    """Per-site neighbor masks for the heat-bath field.

    ``w1[i]`` and ``w2[i]`` mark the neighbors j with eps[i,j] + eps[j,i]
    equal to 1 and 2; ``base[i]`` is the field offset when every neighbor is
    down.  Scale-free: tables depend on the graph only.
    """

    n: int
    w1: tuple[int, ...]
    w2: tuple[int, ...]
    base: tuple[int, ...]


def build_update_tables(g: DisorderGraph) -> SpinUpdateTables:
    """Build the symmetric neighbor masks, vectorized so large graphs are cheap."""
    n = g.n
    nb = (n + 7) // 8
    buf = b"".join(row.to_bytes(nb, "little") for row in g.rows)
    adj = np.unpackbits(
        np.frombuffer(buf, dtype=np.uint8).reshape(n, nb), axis=1, bitorder="little"
    )[:, :n]
    weight = adj.astype(np.int8) + adj.T.astype(np.int8)
    np.fill_diagonal(weight, 0)

    def pack_rows(mask: np.ndarray) -> tuple[int, ...]:
        packed = np.packbits(mask, axis=1, bitorder="little")
        return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)

    w1 = pack_rows(weight == 1)
    w2 = pack_rows(weight == 2)
    base = tuple(int(v) for v in weight.sum(axis=1, dtype=np.int64))
    return SpinUpdateTables(n=n, w1=w1, w2=w2, base=base)


def local_field(g: DisorderGraph, sigma: SpinConfig, i: int, params: ModelParams) -> float:
    """The field h_i = S_i / (2 n p) seen by site i in configuration sigma.

    The energy cost of flipping site i is 2 s_i h_i.  This walks the masks
    directly; the chain itself uses the same arithmetic through precomputed
    tables.
    """
    if g.n != sigma.n or g.n != params.n:
        raise ValueError(
            f"incompatible sizes: graph n={g.n}, spins n={sigma.n}, params n={params.n}"
        )
    if not 0 <= i < g.n:
        raise ValueError(f"site index {i} out of range for n={g.n}")
    self_bit = 1 << i
    col = 0
    for j, row in enumerate(g.rows):
        if (row >> i) & 1:
            col |= 1 << j
    both = (g.rows[i] | col) & ~self_bit
    two = (g.rows[i] & col) & ~self_bit
    one = both & ~two
    bits = sigma.bits
    s = (
        2 * ((one & bits).bit_count() + 2 * (two & bits).bit_count())
        - one.bit_count()
        - 2 * two.bit_count()
    )
    return s / (2.0 * params.n * params.p)


def _plus_probabilities(params: ModelParams, n: int) -> list[float]:
    """P(new spin = +1) indexed by S_i + 2n, S_i in [-2n, 2n]."""
    rate = params.beta / (params.n * params.p)
    table = []
    for s in range(-2 * n, 2 * n + 1):
        exponent = min(max(-rate * s, -700.0), 700.0)
        table.append(1.0 / (1.0 + math.exp(exponent)))
    return table


def _sweep_bits(bits, n, w1, w2, base, plus, offset, uniforms):
    """One sequential heat-bath sweep on raw integer state; returns new bits."""
    for i in range(n):
        s = (
            2 * ((w1[i] & bits).bit_count() + 2 * (w2[i] & bits).bit_count())
            - base[i]
        )
        if uniforms[i] < plus[s + offset]:
            bits |= 1 << i
        else:
            bits &= ~(1 << i)
    return bits


def glauber_sweep(
    sigma: SpinConfig,
    g: DisorderGraph,
    params: ModelParams,
    rng: np.random.Generator,
    *,
    tables: SpinUpdateTables | None = None,
) -> SpinConfig:
    """One full sweep of heat-bath updates in site order, as a pure function.

    Draws exactly n uniforms from ``rng``.  Pass ``tables`` when calling
    repeatedly so the masks are not rebuilt each sweep.
    """
    if sigma.n != g.n or g.n != params.n:
        raise ValueError(
            f"incompatible sizes: graph n={g.n}, spins n={sigma.n}, params n={params.n}"
        )
    if tables is None:
        tables = build_update_tables(g)
    elif tables.n != g.n:
        raise ValueError(f"incompatible sizes: tables n={tables.n}, graph n={g.n}")
    plus = _plus_probabilities(params, g.n)
    uniforms = rng.random(g.n).tolist()
    bits = _sweep_bits(sigma.bits, g.n, tables.w1, tables.w2, tables.base, plus, 2 * g.n, uniforms)
    return SpinConfig(n=g.n, bits=bits)


# Uniforms are drawn from the generator in blocks of this many sweeps, which
# amortizes the numpy call without holding a large buffer.
_SWEEP_BLOCK = 4096


def _run_replica(
    tables: SpinUpdateTables,
    params: ModelParams,
    cfg: ChainConfig,
    replica_id: int,
    graph_seed: int | None,
) -> MagnetizationSample:
    n = tables.n
    init_rng = np.random.default_rng(derive_seed(cfg.chain_seed, replica_id, 0))
    dyn_rng = np.random.default_rng(derive_seed(cfg.chain_seed, replica_id, 1))
    spins = init_rng.integers(0, 2, size=n, dtype=np.uint8)
    bits = int.from_bytes(np.packbits(spins, bitorder="little").tobytes(), "little")

    burn_in = cfg.resolved_burn_in(n)
    plus = _plus_probabilities(params, n)
    offset = 2 * n
    w1, w2, base = tables.w1, tables.w2, tables.base
    root = math.sqrt(n)
    values = []
    sweep = 0
    remaining = cfg.sweeps
    while remaining > 0:
        block = min(remaining, _SWEEP_BLOCK)
        flat = dyn_rng.random(block * n).tolist()
        for b in range(block):
            bits = _sweep_bits(
                bits, n, w1, w2, base, plus, offset, flat[b * n : (b + 1) * n]
            )
            sweep += 1
            if sweep > burn_in and (sweep - burn_in) % cfg.thin == 0:
                values.append((2 * bits.bit_count() - n) / root)
        remaining -= block
    return MagnetizationSample(
        graph_seed=graph_seed,
        replica_id=replica_id,
        first_sweep=burn_in + cfg.thin,
        thin=cfg.thin,
        values=tuple(values),
    )


def run_chain(
    g: DisorderGraph,
    params: ModelParams,
    cfg: ChainConfig,
    *,
    graph_seed: int | None = None,
    tables: SpinUpdateTables | None = None,
) -> list[MagnetizationSample]:
    """Run every replica of the chain on one fixed graph.

    Returns one MagnetizationSample per replica, in replica order; the
    replica streams are derived from cfg.chain_seed, so the result is a pure
    function of (graph, params, cfg).
    """
    if g.n != params.n:
        raise ValueError(f"incompatible sizes: graph n={g.n}, params n={params.n}")
    if cfg.retained(g.n) < 1:
        raise ValueError(
            f"no samples retained: sweeps={cfg.sweeps}, "
            f"burn_in={cfg.resolved_burn_in(g.n)}, thin={cfg.thin}"
        )
    if tables is None:
        tables = build_update_tables(g)
    return [
        _run_replica(tables, params, cfg, replica_id, graph_seed)
        for replica_id in range(cfg.replicas)
    ]


@dataclass(frozen=True)
class GraphRun:
    """Distances and moments of the pooled samples from one disorder graph."""

    graph_seed: int
    n_samples: int
    sample_mean: float
    sample_variance: float
    levy: float
    ks: float


@dataclass(frozen=True)
class ExperimentRecord:
    """Quenched verification run: per-graph distances plus pooled statistics.

    ``exceed_fraction`` is the fraction of graphs whose Levy distance to the
    Gaussian reference exceeds the epsilon the experiment was called with.
    """

    reference: NormalRef
    epsilon: float
    runs: tuple[GraphRun, ...]
    pooled_count: int
    pooled_mean: float
    pooled_variance: float
    exceed_fraction: float


def _one_graph_run(
    params: ModelParams, cfg: ChainConfig, master_seed: int, index: int, epsilon_ref: NormalRef
) -> GraphRun:
    gseed = derive_seed(master_seed, 1, index)
    g = sample_graph(params, GraphSeed(gseed))
    chain_cfg = ChainConfig(
        sweeps=cfg.sweeps,
        burn_in=cfg.burn_in,
        thin=cfg.thin,
        replicas=cfg.replicas,
        chain_seed=derive_seed(master_seed, 2, index),
    )
    samples = run_chain(g, params, chain_cfg, graph_seed=gseed)
    pooled = [v for sample in samples for v in sample.values]
    stats = summarize(pooled)
    law = EmpiricalMeasure.from_samples(pooled)
    return GraphRun(
        graph_seed=gseed,
        n_samples=stats.count,
        sample_mean=stats.mean,
        sample_variance=stats.variance,
        levy=levy_distance(law, epsilon_ref),
        ks=ks_distance(law, epsilon_ref),
    )


def quenched_experiment(
    params: ModelParams,
    cfg: ChainConfig,
    n_graphs: int,
    *,
    master_seed: int,
    epsilon: float = 0.1,
    threads: int = 1,
) -> ExperimentRecord:
    """Sample fresh graphs, run chains on each, compare laws to the Gaussian.

    The reference is the centered Gaussian with variance 1/(1 - beta), which
    requires beta < 1.  Graph seeds and chain seeds both derive from
    ``master_seed``, so the whole experiment replays from one integer.
    ``threads`` > 1 distributes whole graphs over a thread pool; results are
    identical to the sequential order either way.
    """
    if not params.beta < 1.0:
        raise ValueError(f"Gaussian reference requires beta < 1, got {params.beta}")
    if n_graphs < 1:
        raise ValueError(f"n_graphs must be positive, got {n_graphs}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}")
    reference = NormalRef(mean=0.0, variance=1.0 / (1.0 - params.beta))
    if threads == 1:
        runs = [
            _one_graph_run(params, cfg, master_seed, i, reference)
            for i in range(n_graphs)
        ]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(
                pool.map(
                    lambda i: _one_graph_run(params, cfg, master_seed, i, reference),
                    range(n_graphs),
                )
            )
    pooled_counts = sum(r.n_samples for r in runs)
    pooled_mean = sum(r.sample_mean * r.n_samples for r in runs) / pooled_counts
    # pooled variance via the law of total variance over equal-weight samples
    within = sum((r.n_samples - 1) * r.sample_variance for r in runs)
    between = sum(r.n_samples * (r.sample_mean - pooled_mean) ** 2 for r in runs)
    pooled_variance = (within + between) / (pooled_counts - 1)
    exceed = sum(1 for r in runs if r.levy > epsilon) / n_graphs
    return ExperimentRecord(
        reference=reference,
        epsilon=epsilon,
        runs=tuple(runs),
        pooled_count=pooled_counts,
        pooled_mean=pooled_mean,
        pooled_variance=pooled_variance,
        exceed_fraction=exceed,
    )
