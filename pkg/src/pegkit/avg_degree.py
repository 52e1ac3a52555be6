"""Average-degree estimation under erasures.

The refinement step turns a crude estimate into a sharper one by averaging a
capped per-vertex statistic: sample a vertex u and a uniform entry of its
list, and credit deg(u) when u is low-degree and the entry is either erased
or a vertex ranked above u. Ranking is by (degree, id), so every mutual edge
is credited exactly once; crediting erased entries is what buys erasure
resilience at the cost of counting some erased edges twice.

The driver searches crude estimates n/2^i in decreasing powers of two and
returns the first refined median that overtakes its crude input.

The coefficient defaults (SAMPLE_COEFF=660, REP_COEFF=12, THRESHOLD_COEFF=4)
match the analyzed guarantees. They can be overridden for fast desk-scale
experiments; any override marks the run non-conforming.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import ERASED
from .oracle import QuerySession, split_seed

SAMPLE_COEFF = 660.0
REP_COEFF = 12.0
THRESHOLD_COEFF = 4.0

# Relative slack for the floating-point degree-threshold comparison.
_THRESHOLD_RTOL = 1e-12

_CHUNK = 1 << 19


def precedes(g, u, v):
    """Strict total vertex order: degree first, id as tie-break."""
    return (g.degree(u), u) < (g.degree(v), v)


def d_plus(g, u):
    """Number of non-erased neighbors of u ranked above u."""
    du = g.degree(u)
    return sum(1 for w in g.listed(u) if (du, u) < (g.degree(w), w))


def d_bot(g, u):
    """Number of erased slots in u's list."""
    return g.erased_count(u)


def chi_threshold(n, crude, epsilon, coeff=THRESHOLD_COEFF):
    """Degree cutoff above which samples contribute zero."""
    return coeff * math.sqrt(n * crude / epsilon)


@dataclass
class DegreeEstimatorConfig:
    epsilon: float
    delta: float = 0.25
    crude: "float | None" = None
    seed: int = 0
    sample_coeff: float = SAMPLE_COEFF
    threshold_coeff: float = THRESHOLD_COEFF

    @property
    def conforming(self):
        return self.sample_coeff == SAMPLE_COEFF and self.threshold_coeff == THRESHOLD_COEFF

    def validate(self):
        if not 0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        if not 0 < self.delta < 1 / 3:
            raise ValueError("delta must lie in (0, 1/3)")
        if self.crude is None or self.crude <= 0:
            raise ValueError("a positive crude estimate is required")


@dataclass
class DegreeEstimate:
    value: float
    samples: int
    degree_queries: int
    neighbor_queries: int
    crude: "float | None" = None
    iteration: "int | None" = None
    seed: "int | None" = None
    conforming: bool = True
    trace: "list | None" = None

    def to_dict(self):
        return {
            "value": self.value,
            "iteration": self.iteration,
            "crude_used": self.crude,
            "samples": self.samples,
            "queries": {"degree": self.degree_queries, "neighbor": self.neighbor_queries},
            "seed": self.seed,
            "conforming": self.conforming,
        }


def sample_count(n, cfg):
    """ceil(coeff * ln(2/delta) * sqrt(n / (eps^5 * crude)))."""
    return math.ceil(
        cfg.sample_coeff * math.log(2 / cfg.delta) * math.sqrt(n / (cfg.epsilon**5 * cfg.crude))
    )


def chi_sample(session, cfg):
    """One credit sample (scalar reference path).

    Charges one degree query for the sampled vertex, one neighbor query for
    the drawn slot unless the vertex is isolated, and one more degree query
    when the drawn entry is non-erased.
    """
    g = session.graph
    tau = chi_threshold(g.num_vertices, cfg.crude, cfg.epsilon, cfg.threshold_coeff)
    u = session.random_vertex()
    du = session.degree(u)
    if du == 0:
        return 0.0
    entry = session.random_neighbor(u)
    if entry is ERASED:
        credit = True
    else:
        dv = session.degree(entry)
        credit = (du, u) < (dv, entry)
    if credit and du <= tau * (1 + _THRESHOLD_RTOL):
        return float(du)
    return 0.0


def refine_estimate(g, cfg, session=None, keep_trace=False):
    """Sharpen a crude average-degree estimate (batch sampling path).

    Draws the configured number of independent credit samples with a
    seeded numpy generator and returns twice their mean. Query accounting is
    exact and charged to the session in bulk: one degree query per sample,
    one neighbor query per non-isolated sample, one extra degree query per
    non-erased drawn entry.
    """
    cfg.validate()
    n = g.num_vertices
    s = sample_count(n, cfg)
    tau = chi_threshold(n, cfg.crude, cfg.epsilon, cfg.threshold_coeff)
    tau_eff = tau * (1 + _THRESHOLD_RTOL)
    degrees, offsets, flat = g.flat_adjacency()
    rng = np.random.default_rng(cfg.seed & (2**64 - 1))
    if session is None:
        session = QuerySession(g, seed=cfg.seed)

    total = 0.0
    zero_degree = 0
    nonerased = 0
    trace = [] if keep_trace else None
    remaining = s
    while remaining > 0:
        batch = min(remaining, _CHUNK)
        remaining -= batch
        u = rng.integers(0, n, size=batch)
        du = degrees[u]
        nz = du > 0
        u_nz = u[nz]
        du_nz = du[nz]
        zero_degree += batch - int(nz.sum())
        if u_nz.size:
            slots = rng.integers(0, du_nz)
            entries = flat[offsets[u_nz] + slots]
            erased = entries == -1
            nonerased += int((~erased).sum())
            dv = degrees[np.where(erased, 0, entries)]
            ranked_above = (~erased) & ((du_nz < dv) | ((du_nz == dv) & (u_nz < entries)))
            chi = np.where((du_nz <= tau_eff) & (erased | ranked_above), du_nz, 0)
            total += float(chi.sum())
            if keep_trace:
                full = np.zeros(batch)
                full[nz] = chi
                trace.extend(full.tolist())
        elif keep_trace:
            trace.extend([0.0] * batch)

    session.charge_bulk(degree=s + nonerased, neighbor=s - zero_degree)
    return DegreeEstimate(
        value=2.0 * total / s,
        samples=s,
        degree_queries=session.degree_queries,
        neighbor_queries=session.neighbor_queries,
        crude=cfg.crude,
        seed=cfg.seed,
        conforming=cfg.conforming,
        trace=trace,
    )


def _lower_median(values):
    return sorted(values)[(len(values) - 1) // 2]


def estimate_avg_degree(
    g,
    epsilon,
    seed=0,
    sample_coeff=SAMPLE_COEFF,
    rep_coeff=REP_COEFF,
    threshold_coeff=THRESHOLD_COEFF,
):
    """Estimate the average degree with no prior crude estimate.

    For i = 0..ceil(log2 n) runs the refinement repeatedly at crude = n/2^i
    (kept as an exact real) and takes the lower median; returns the first
    median that exceeds its crude input, or 1 if none does. Each refinement
    run gets its own split seed and session.
    """
    n = g.num_vertices
    if n < 2:
        raise ValueError("estimation needs at least two vertices")
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    t = math.ceil(rep_coeff * math.log(4 * math.log2(n)))
    conforming = sample_coeff == SAMPLE_COEFF and rep_coeff == REP_COEFF
    degree_q = 0
    neighbor_q = 0
    samples = 0
    run_idx = 0
    for i in range(math.ceil(math.log2(n)) + 1):
        crude = n / 2**i
        values = []
        for _ in range(t):
            cfg = DegreeEstimatorConfig(
                epsilon=epsilon,
                delta=0.25,
                crude=crude,
                seed=split_seed(seed, run_idx),
                sample_coeff=sample_coeff,
                threshold_coeff=threshold_coeff,
            )
            run_idx += 1
            est = refine_estimate(g, cfg)
            values.append(est.value)
            degree_q += est.degree_queries
            neighbor_q += est.neighbor_queries
            samples += est.samples
        med = _lower_median(values)
        if med > crude:
            return DegreeEstimate(
                value=med,
                samples=samples,
                degree_queries=degree_q,
                neighbor_queries=neighbor_q,
                crude=crude,
                iteration=i,
                seed=seed,
                conforming=conforming,
            )
    return DegreeEstimate(
        value=1.0,
        samples=samples,
        degree_queries=degree_q,
        neighbor_queries=neighbor_q,
        crude=None,
        iteration=None,
        seed=seed,
        conforming=conforming,
    )
