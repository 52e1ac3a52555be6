"""Exact ground-truth oracles for desk-scale verification.

Everything here is brute force and exact: completions are enumerated
outright, distances and expectations are computed as rationals, and witness
inventories are built from full reachability rather than sampling. Intended
for instances up to a few hundred vertices.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .avg_degree import d_bot, d_plus
from .connectedness import (
    mid_alpha_bfs_cap,
    small_alpha_schedule,
    small_alpha_uses_vertex_cap,
    witness_size_bound,
)
from .graph import Completion, validate

LN3 = math.log(3)


class Uncompletable(ValueError):
    """The graph admits no completion."""


class SearchBoundExceeded(RuntimeError):
    """The completion search would exceed the configured slot bound."""


@dataclass
class CompletionSet:
    completions: list
    exhaustive: bool

    def __len__(self):
        return len(self.completions)

    def __iter__(self):
        return iter(self.completions)


_STRUCTURAL = {"entry-range", "self-loop", "duplicate-entry", "degree-overflow", "odd-entry-total"}


def enumerate_completions(g, cap=None, slot_bound=20):
    """Enumerate completions up to slot-permutation equivalence.

    Phase 1 resolves forced fills: every half-erased edge w->u consumes one
    erased slot of u. Phase 2 enumerates the ways the remaining free slots
    can be paired into new edges between distinct, non-adjacent vertices.
    Completions are deduplicated by resulting edge set; each erased slot is
    filled with its partners in sorted order.

    `cap` limits the number of completions emitted (exhaustive=False when
    hit). `slot_bound` limits the number of free slots phase 2 may search
    over; beyond it SearchBoundExceeded is raised. Returns an empty
    exhaustive set when the graph is uncompletable.
    """
    violations = validate(g)
    if any(v.code in _STRUCTURAL for v in violations):
        return CompletionSet([], True)
    n = g.num_vertices
    listed = [g.listed(u) for u in range(n)]
    forced = [set() for _ in range(n)]
    for w in range(n):
        for u in listed[w]:
            if w not in listed[u]:
                forced[u].add(w)
    free = [g.erased_count(u) - len(forced[u]) for u in range(n)]
    if any(f < 0 for f in free) or sum(free) % 2 == 1:
        return CompletionSet([], True)
    if sum(free) > slot_bound:
        raise SearchBoundExceeded(
            f"{sum(free)} free erased slots exceed the search bound {slot_bound}"
        )

    base_pairs = set()
    for u in range(n):
        for w in listed[u]:
            base_pairs.add((u, w) if u < w else (w, u))

    open_vertices = sorted(u for u in range(n) if free[u] > 0)
    solutions = []
    exhaustive = True

    def backtrack(chosen, chosen_set):
        nonlocal exhaustive
        if cap is not None and len(solutions) >= cap:
            exhaustive = False
            return
        u = next((v for v in open_vertices if free[v] > 0), None)
        if u is None:
            solutions.append(tuple(chosen))
            return
        candidates = [
            w
            for w in open_vertices
            if w != u
            and free[w] > 0
            and ((u, w) if u < w else (w, u)) not in base_pairs
            and ((u, w) if u < w else (w, u)) not in chosen_set
        ]
        k = free[u]
        if len(candidates) < k:
            return
        for combo in itertools.combinations(candidates, k):
            pairs = [((u, w) if u < w else (w, u)) for w in combo]
            free[u] = 0
            for w in combo:
                free[w] -= 1
            chosen.extend(pairs)
            chosen_set.update(pairs)
            backtrack(chosen, chosen_set)
            for p in pairs:
                chosen.remove(p)
                chosen_set.remove(p)
            for w in combo:
                free[w] += 1
            free[u] = k
            if cap is not None and len(solutions) >= cap:
                exhaustive = False
                return

    backtrack([], set())

    completions = []
    for extra in solutions:
        partners = [sorted(forced[u]) for u in range(n)]
        for a, b in extra:
            partners[a].append(b)
            partners[b].append(a)
        fills = {}
        for u in range(n):
            slots = g.erased_slots(u)
            for slot, w in zip(slots, sorted(partners[u])):
                fills[(u, slot)] = w
        completions.append(Completion.from_dict(fills))
    return CompletionSet(completions, exhaustive)


def components(g):
    """Connected components treating every listed entry as an undirected link."""
    n = g.num_vertices
    adj = [set() for _ in range(n)]
    for u in range(n):
        for w in g.listed(u):
            adj[u].add(w)
            adj[w].add(u)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        comp = {s}
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.add(w)
                    queue.append(w)
        comps.append(frozenset(comp))
    return comps


def distance_to_connectedness(g, slot_bound=20):
    """Exact distance: (min completion components - 1) / m, as a fraction."""
    cs = enumerate_completions(g, slot_bound=slot_bound)
    if not cs.completions:
        raise Uncompletable("graph has no completion")
    min_comp = min(len(components(c.apply(g))) for c in cs.completions)
    if min_comp == 1:
        return Fraction(0)
    m = g.num_edges
    if m == 0:
        raise ValueError("distance undefined for an edgeless disconnected graph")
    return Fraction(min_comp - 1, m)


def reach_listed(g, start):
    """Vertices reachable from start by following non-erased entries."""
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in g.listed(u):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


@dataclass
class WitnessInventory:
    plain: list  # list of frozensets
    generalized: list  # list of (frozenset, frozenset-of-anchors)

    def generalized_sets(self):
        return [c for c, _ in self.generalized]


def _erasure_holder(g, C):
    for u in sorted(C):
        if g.erased_count(u) > 0:
            return u
    return None


def inventory_witnesses(g):
    """All witnesses to disconnectedness, plain and generalized.

    Candidate sets are the reachable closures of each vertex; a closure is a
    plain witness when it is erasure-free, internally symmetric and a proper
    subset, and a generalized witness when it has at most one erased slot
    whose half-erased partner edge provides an anchor that reaches the whole
    set. Zero-erasure witnesses are generalized too, with every vertex an
    anchor.
    """
    n = g.num_vertices
    reach = {}

    def get_reach(v):
        if v not in reach:
            reach[v] = reach_listed(g, v)
        return reach[v]

    plain = set()
    generalized = {}
    for v in range(n):
        C = get_reach(v)
        if len(C) >= n:
            continue
        erasures = sum(g.erased_count(u) for u in C)
        if erasures == 0:
            if all(u in g.listed(w) for u in C for w in g.listed(u)):
                plain.add(C)
                generalized[C] = set(C)
        elif erasures == 1:
            holder = _erasure_holder(g, C)
            listed_holder = g.listed(holder)
            anchors = {
                w
                for w in C
                if w != holder
                and w not in listed_holder
                and holder in g.listed(w)
                and get_reach(w) == C
            }
            if anchors:
                generalized.setdefault(C, set()).update(anchors)
    plain_list = sorted(plain, key=sorted)
    gen_list = [(C, frozenset(a)) for C, a in sorted(generalized.items(), key=lambda kv: sorted(kv[0]))]
    return WitnessInventory(plain_list, gen_list)


def is_small(C, eps_star, g):
    """Small/big classification of a vertex set at parameter eps_star.

    High average degree: small means few vertices; low average degree: small
    means short representation length (sum of degrees).
    """
    davg = Fraction(g.num_entries, g.num_vertices)
    if davg == 0:
        raise ValueError("classification needs at least one edge")
    eps_star = Fraction(eps_star)
    if not 0 < eps_star < 2 / davg:
        raise ValueError("eps_star must lie in (0, 2/davg)")
    if eps_star >= 4 / davg**2:
        return len(C) <= Fraction(4) / (eps_star * davg)
    return sum(g.degree(v) for v in C) <= Fraction(4) / eps_star


def high_degree_set(g, d_hat, eps, coeff=4):
    """Vertices with degree above coeff * sqrt(n * d_hat / eps), exactly."""
    d_hat = Fraction(d_hat)
    eps = Fraction(eps)
    n = g.num_vertices
    cutoff_sq = Fraction(coeff**2) * n * d_hat / eps
    return {u for u in range(n) if Fraction(g.degree(u)) ** 2 > cutoff_sq}


def exact_exp_chi(g, d_hat, eps):
    """Exact expectation of one credit sample, as a fraction.

    Equals (1/n) * sum over low-degree vertices of (ranked-above neighbor
    count + erased slot count).
    """
    H = high_degree_set(g, d_hat, eps)
    total = sum(d_plus(g, u) + d_bot(g, u) for u in range(g.num_vertices) if u not in H)
    return Fraction(total, g.num_vertices)


def quality_vertex_variant(g):
    """Per-vertex quality, vertex-count flavor: 1/|C| inside a plain witness."""
    q = {v: Fraction(0) for v in range(g.num_vertices)}
    for C in inventory_witnesses(g).plain:
        share = Fraction(1, len(C))
        for v in C:
            q[v] = share
    return q


def quality_edge_variant(g, completed):
    """Per-vertex quality, edge-count flavor, relative to one completion.

    Components holding any erasure (in g) score zero; an edgeless component
    scores one; otherwise each vertex scores deg(v) / (2 * component edges).
    """
    q = {}
    for C in components(completed):
        erased = sum(g.erased_count(v) for v in C)
        edges2 = sum(completed.degree(v) for v in C)
        for v in C:
            if erased > 0:
                q[v] = Fraction(0)
            elif edges2 == 0:
                q[v] = Fraction(1)
            else:
                q[v] = Fraction(g.degree(v), edges2)
    return q


@dataclass
class ExactReport:
    completions_count: int
    exhaustive: bool
    min_components: "int | None"
    distance_to_connectedness: "Fraction | None"
    plain_witnesses: list
    generalized_witnesses: list
    exp_chi: "Fraction | None" = None

    def to_dict(self):
        def frac(x):
            return None if x is None else f"{x.numerator}/{x.denominator}"

        return {
            "completions_count": self.completions_count,
            "exhaustive": self.exhaustive,
            "min_components": self.min_components,
            "distance_to_connectedness": frac(self.distance_to_connectedness),
            "plain_witnesses": [sorted(c) for c in self.plain_witnesses],
            "generalized_witnesses": [
                {"vertices": sorted(c), "anchors": sorted(a)}
                for c, a in self.generalized_witnesses
            ],
            "exp_chi": frac(self.exp_chi),
        }


def exact_report(g, d_hat=None, eps=None, slot_bound=20):
    cs = enumerate_completions(g, slot_bound=slot_bound)
    min_comp = None
    dist = None
    if cs.completions and cs.exhaustive:
        min_comp = min(len(components(c.apply(g))) for c in cs.completions)
        if min_comp == 1:
            dist = Fraction(0)
        elif g.num_edges > 0:
            dist = Fraction(min_comp - 1, g.num_edges)
    inv = inventory_witnesses(g)
    chi = None
    if d_hat is not None and eps is not None:
        chi = exact_exp_chi(g, d_hat, eps)
    return ExactReport(
        completions_count=len(cs.completions),
        exhaustive=cs.exhaustive,
        min_components=min_comp,
        distance_to_connectedness=dist,
        plain_witnesses=inv.plain,
        generalized_witnesses=inv.generalized,
        exp_chi=chi,
    )


# ---------------------------------------------------------------------------
# Exact per-run rejection probabilities of the samplers, from the inventory
# and the sampling schedules. Used to calibrate statistical tests. Both
# assume the hard query cap never binds on the instance (true for the small
# bounded-degree instances these are used on).
# ---------------------------------------------------------------------------


def small_alpha_rejection_probability(g, epsilon, alpha, davg):
    n = g.num_vertices
    b = witness_size_bound(epsilon, alpha, davg)
    vertex_case = small_alpha_uses_vertex_cap(b, davg)
    inv = inventory_witnesses(g)
    accept = 1.0
    for i, reps in small_alpha_schedule(b):
        detected = 0
        for C in inv.plain:
            rep_len = sum(g.degree(v) for v in C)
            if vertex_case:
                if len(C) <= 2**i:
                    detected += len(C)
            else:
                detected += sum(1 for v in C if rep_len <= 2 ** (i - 1) * g.degree(v) + 1)
        accept *= (1 - detected / n) ** reps
    return 1.0 - accept


def _generalized_detector_fires(g, C):
    """Mirror of the tester-side check on a fully scanned closure C."""
    if len(C) >= g.num_vertices:
        return False
    erasures = sum(g.erased_count(u) for u in C)
    if erasures > 1:
        return False
    if erasures == 0:
        return True
    holder = _erasure_holder(g, C)
    listed_holder = g.listed(holder)
    return any(
        w != holder
        and w not in listed_holder
        and holder in g.listed(w)
        and reach_listed(g, w) == C
        for w in C
    )


def mid_alpha_rejection_probability(g, epsilon, alpha, davg):
    n = g.num_vertices
    b = 4.0 / ((epsilon - alpha) * davg)
    reps = math.ceil(b * LN3)
    qcap = mid_alpha_bfs_cap(epsilon, alpha, davg)
    detected = 0
    for s in range(n):
        C = reach_listed(g, s)
        if sum(g.degree(v) for v in C) <= qcap and _generalized_detector_fires(g, C):
            detected += 1
    p = detected / n
    return 1.0 - (1.0 - p) ** reps
