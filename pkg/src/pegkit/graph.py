"""Adjacency-list graphs with erased entries.

A graph is stored as one ordered adjacency list per vertex. Each list slot
holds either a vertex id or the ERASED mark. Slot order is significant:
neighbor queries address slots by index, and serialization preserves the
order byte for byte.

Vertex labels are dense integers 0..n-1. The number of edges m is always
derived as half the total list length, never stored separately.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path


class _ErasedMark:
    """Singleton placeholder for an erased adjacency entry."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "*"


ERASED = _ErasedMark()

# An adjacency entry is a vertex id or the erasure mark.
AdjEntry = "int | _ErasedMark"


class EdgeStatus(enum.Enum):
    NONERASED = "nonerased"
    HALF_ERASED = "half-erased"
    ABSENT = "absent"


class PartiallyErasedGraph:
    """Immutable adjacency-list graph whose entries may be erased.

    Construction accepts arbitrary int entries (including invalid ones such
    as out-of-range ids); use :func:`validate` to obtain the list of
    invariant violations. Algorithm contracts only cover graphs that
    validate cleanly and admit a completion.
    """

    __slots__ = ("_adj", "_n", "_erased_total", "_listed", "_arrays")

    def __init__(self, adjacency, num_vertices=None):
        adj = [tuple(row) for row in adjacency]
        n = len(adj) if num_vertices is None else int(num_vertices)
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        if len(adj) > n:
            raise ValueError(f"{len(adj)} adjacency rows for {n} vertices")
        while len(adj) < n:
            adj.append(())
        erased = 0
        for u, row in enumerate(adj):
            for e in row:
                if e is ERASED:
                    erased += 1
                elif not isinstance(e, int) or isinstance(e, bool):
                    raise TypeError(f"entry {e!r} in list of {u} is not a vertex id")
        self._adj = tuple(adj)
        self._n = n
        self._erased_total = erased
        self._listed = [None] * n
        self._arrays = None

    @property
    def num_vertices(self):
        return self._n

    @property
    def num_entries(self):
        """Total adjacency list length; equals 2m for a valid graph."""
        return sum(len(row) for row in self._adj)

    @property
    def num_edges(self):
        return self.num_entries // 2

    @property
    def avg_degree(self):
        return self.num_entries / self._n

    @property
    def erased_total(self):
        return self._erased_total

    def degree(self, u):
        if not 0 <= u < self._n:
            raise IndexError(f"vertex {u} out of range [0, {self._n})")
        return len(self._adj[u])

    def neighbor(self, u, i):
        """Return the i-th entry of u's list. Indices are 1-based."""
        if not 0 <= u < self._n:
            raise IndexError(f"vertex {u} out of range [0, {self._n})")
        row = self._adj[u]
        if not 1 <= i <= len(row):
            raise IndexError(f"slot {i} out of range [1, {len(row)}] for vertex {u}")
        return row[i - 1]

    def entries(self, u):
        """The full stored list of u (direct access, not a charged query)."""
        return self._adj[u]

    def listed(self, u):
        """Frozenset of the non-erased entries of u's list."""
        cached = self._listed[u]
        if cached is None:
            cached = frozenset(e for e in self._adj[u] if e is not ERASED)
            self._listed[u] = cached
        return cached

    def erased_slots(self, u):
        """0-based indices of the erased slots in u's list."""
        return tuple(i for i, e in enumerate(self._adj[u]) if e is ERASED)

    def erased_count(self, u):
        return sum(1 for e in self._adj[u] if e is ERASED)

    def erasure_fraction(self):
        """Erased entries as an exact fraction of all entries (0 if no entries)."""
        total = self.num_entries
        if total == 0:
            return Fraction(0)
        return Fraction(self._erased_total, total)

    def classify_pair(self, u, v):
        """Classify the pair {u, v}: returns (EdgeStatus, lister).

        For a half-erased edge, `lister` is the vertex whose list contains
        the other one; otherwise it is None.
        """
        if u == v:
            raise ValueError("classify_pair needs two distinct vertices")
        uv = v in self.listed(u)
        vu = u in self.listed(v)
        if uv and vu:
            return EdgeStatus.NONERASED, None
        if uv:
            return EdgeStatus.HALF_ERASED, u
        if vu:
            return EdgeStatus.HALF_ERASED, v
        return EdgeStatus.ABSENT, None

    def flat_adjacency(self):
        """(degrees, offsets, entries) numpy views with -1 marking erasures.

        Built lazily and cached; used by the batch sampling paths.
        """
        if self._arrays is None:
            import numpy as np

            degrees = np.fromiter(
                (len(row) for row in self._adj), dtype=np.int64, count=self._n
            )
            offsets = np.zeros(self._n, dtype=np.int64)
            np.cumsum(degrees[:-1], out=offsets[1:])
            flat = np.fromiter(
                (-1 if e is ERASED else e for row in self._adj for e in row),
                dtype=np.int64,
                count=int(degrees.sum()),
            )
            self._arrays = (degrees, offsets, flat)
        return self._arrays

    def __eq__(self, other):
        if not isinstance(other, PartiallyErasedGraph):
            return NotImplemented
        return self._n == other._n and self._adj == other._adj

    def __hash__(self):
        return hash((self._n, self._adj))

    def __repr__(self):
        return (
            f"PartiallyErasedGraph(n={self._n}, entries={self.num_entries}, "
            f"erased={self._erased_total})"
        )


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by validate()."""

    code: str
    subject: tuple
    detail: str


def validate(g):
    """Check all structural invariants plus necessary completability conditions.

    Returns a list of Violation records; empty means the graph is valid and
    passes the counting conditions every completable graph must satisfy.
    Never raises on bad content.
    """
    violations = []
    n = g.num_vertices
    structural_ok = True
    for u in range(n):
        row = g.entries(u)
        if len(row) > n - 1:
            violations.append(
                Violation("degree-overflow", (u,), f"degree {len(row)} exceeds n-1={n - 1}")
            )
            structural_ok = False
        seen = set()
        for i, e in enumerate(row):
            if e is ERASED:
                continue
            if not 0 <= e < n:
                violations.append(Violation("entry-range", (u, i), f"entry {e} outside [0, {n})"))
                structural_ok = False
                continue
            if e == u:
                violations.append(Violation("self-loop", (u, i), f"vertex {u} lists itself"))
                structural_ok = False
            if e in seen:
                violations.append(Violation("duplicate-entry", (u, i), f"{e} listed twice by {u}"))
                structural_ok = False
            seen.add(e)
    if g.num_entries % 2 == 1:
        violations.append(Violation("odd-entry-total", (), "total list length is odd"))
    if structural_ok:
        # Every half-erased edge w->u must be absorbed by an erased slot of u,
        # and the leftover free slots must pair up across vertices.
        forced = [0] * n
        for w in range(n):
            for u in g.listed(w):
                if w not in g.listed(u):
                    forced[u] += 1
        free_total = 0
        overflow = False
        for u in range(n):
            free = g.erased_count(u) - forced[u]
            if free < 0:
                violations.append(
                    Violation(
                        "forced-overflow",
                        (u,),
                        f"{forced[u]} half-erased edges point at {u} "
                        f"but only {g.erased_count(u)} erased slots",
                    )
                )
                overflow = True
            else:
                free_total += free
        if not overflow and free_total % 2 == 1:
            violations.append(
                Violation("free-parity", (), "odd number of unforced erased slots")
            )
    return violations


@dataclass(frozen=True)
class Completion:
    """Assignment of vertex ids to erased slots.

    `assignment` maps (vertex, 0-based slot index) to the id that fills the
    slot; it is stored as a sorted tuple of pairs so completions are hashable.
    """

    assignment: tuple

    @staticmethod
    def from_dict(d):
        return Completion(tuple(sorted(d.items())))

    def as_dict(self):
        return dict(self.assignment)

    def apply(self, g):
        """Fill the erased slots of g; the result has no erasures."""
        fills = self.as_dict()
        rows = []
        for u in range(g.num_vertices):
            row = list(g.entries(u))
            for i, e in enumerate(row):
                if e is ERASED:
                    if (u, i) not in fills:
                        raise ValueError(f"no fill for erased slot ({u}, {i})")
                    row[i] = fills[(u, i)]
            rows.append(row)
        return PartiallyErasedGraph(rows)


def erase_slots(g, slots):
    """Return a copy of g with the given (vertex, slot-index) entries erased."""
    rows = [list(g.entries(u)) for u in range(g.num_vertices)]
    for u, i in slots:
        rows[u][i] = ERASED
    return PartiallyErasedGraph(rows)


# ---------------------------------------------------------------------------
# PEG text format.
#
#   peg 1
#   n <num_vertices>
#   v <id> <e1> <e2> ... <ek>
#
# Entries are decimal ids or `*` for erased. Vertices without a line have
# degree 0; the serializer omits them.
# ---------------------------------------------------------------------------


def format_peg(g):
    lines = ["peg 1", f"n {g.num_vertices}"]
    for u in range(g.num_vertices):
        row = g.entries(u)
        if not row:
            continue
        parts = " ".join("*" if e is ERASED else str(e) for e in row)
        lines.append(f"v {u} {parts}")
    return "\n".join(lines) + "\n"


def parse_peg(text):
    lines = [ln.rstrip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    if not lines or lines[0].split() != ["peg", "1"]:
        raise ValueError("missing 'peg 1' header")
    if len(lines) < 2 or not lines[1].startswith("n "):
        raise ValueError("missing 'n <count>' line")
    try:
        n = int(lines[1].split()[1])
    except (IndexError, ValueError) as exc:
        raise ValueError("bad vertex count line") from exc
    rows = [[] for _ in range(n)]
    seen = set()
    for lineno, ln in enumerate(lines[2:], start=3):
        parts = ln.split()
        if parts[0] != "v" or len(parts) < 2:
            raise ValueError(f"line {lineno}: expected 'v <id> ...'")
        try:
            u = int(parts[1])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad vertex id {parts[1]!r}") from exc
        if not 0 <= u < n:
            raise ValueError(f"line {lineno}: vertex id {u} outside [0, {n})")
        if u in seen:
            raise ValueError(f"line {lineno}: duplicate line for vertex {u}")
        seen.add(u)
        row = []
        for tok in parts[2:]:
            if tok == "*":
                row.append(ERASED)
            else:
                try:
                    row.append(int(tok))
                except ValueError as exc:
                    raise ValueError(f"line {lineno}: bad entry {tok!r}") from exc
        rows[u] = row
    return PartiallyErasedGraph(rows, num_vertices=n)


def save_peg(g, path):
    Path(path).write_text(format_peg(g))


def load_peg(path):
    return parse_peg(Path(path).read_text())
