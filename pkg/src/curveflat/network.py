"""Series-to-network transform and community-based knot selection.

A time series maps to its natural visibility graph: nodes are the time
points (1-based), and two points see each other when the straight chord
between them passes strictly above every intermediate value. Communities
of that graph segment the series in time; the boundaries between
contiguous community runs become interior spline knots.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence


@dataclass(frozen=True)
class VisibilityGraph:
    """Undirected graph over nodes 1..node_count; edges as (i, j) with i < j."""

    node_count: int
    edges: frozenset[tuple[int, int]]

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def degree(self, i: int) -> int:
        return sum(1 for e in self.edges if i in e)

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {i: set() for i in range(1, self.node_count + 1)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj


class KnotSource(str, Enum):
    PAPER_DEFAULT = "paper_default"
    DETECTED = "detected"
    USER = "user"


@dataclass(frozen=True)
class CommunityPartition:
    """Node -> community assignment; `assignment[i - 1]` is node i's id.

    Ids are contiguous from 0 in order of first appearance. `modularity`
    is the partition's score on the graph it was detected on, or None for
    partitions defined externally (no graph attached).
    """

    assignment: tuple[int, ...]
    modularity: float | None = None

    @property
    def node_count(self) -> int:
        return len(self.assignment)

    @property
    def community_count(self) -> int:
        return len(set(self.assignment)) if self.assignment else 0

    def members(self, community_id: int) -> tuple[int, ...]:
        return tuple(
            i + 1 for i, c in enumerate(self.assignment) if c == community_id
        )

    def contiguous_runs(self) -> tuple[tuple[int, int, int], ...]:
        """Maximal runs of equal community, as (first_node, last_node, id)."""
        runs: list[tuple[int, int, int]] = []
        for i, c in enumerate(self.assignment, start=1):
            if runs and runs[-1][2] == c and runs[-1][1] == i - 1:
                runs[-1] = (runs[-1][0], i, c)
            else:
                runs.append((i, i, c))
        return tuple(runs)


@dataclass(frozen=True)
class KnotPartition:
    """Strictly increasing interior knot positions plus their origin."""

    interior_knots: tuple[float, ...]
    source: KnotSource = KnotSource.USER

    def __post_init__(self):
        ks = self.interior_knots
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError(f"interior knots must be strictly increasing: {ks}")


def visibility_graph(values: Sequence[float]) -> VisibilityGraph:
    """Natural visibility graph of an ordered numeric series.

    Nodes a < b are linked iff every intermediate point lies strictly
    below the chord from (a, y_a) to (b, y_b); equivalently, iff the
    slope from a to b strictly exceeds the slope from a to every c in
    between. Consecutive points are always linked. O(n^2) via a running
    maximum of left slopes.
    """
    n = len(values)
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if not all(math.isfinite(v) for v in values):
        raise ValueError("series values must be finite")
    edges: set[tuple[int, int]] = set()
    for a in range(n - 1):
        edges.add((a + 1, a + 2))
        max_slope = values[a + 1] - values[a]
        for b in range(a + 2, n):
            slope = (values[b] - values[a]) / (b - a)
            if slope > max_slope:
                edges.add((a + 1, b + 1))
            max_slope = max(max_slope, slope)
    return VisibilityGraph(node_count=n, edges=frozenset(edges))


def modularity(graph: VisibilityGraph, assignment: Sequence[int]) -> float:
    """Newman modularity of a node assignment on an unweighted graph."""
    if len(assignment) != graph.node_count:
        raise ValueError("assignment length does not match node count")
    m = len(graph.edges)
    if m == 0:
        raise ValueError("graph has no edges")
    deg = {i: 0 for i in range(1, graph.node_count + 1)}
    intra = 0
    for a, b in graph.edges:
        deg[a] += 1
        deg[b] += 1
        if assignment[a - 1] == assignment[b - 1]:
            intra += 1
    degree_sums: dict[int, int] = {}
    for node, d in deg.items():
        c = assignment[node - 1]
        degree_sums[c] = degree_sums.get(c, 0) + d
    return intra / m - sum(s * s for s in degree_sums.values()) / (4 * m * m)


def _canonical(assignment: Sequence[int]) -> tuple[int, ...]:
    relabel: dict[int, int] = {}
    out = []
    for c in assignment:
        if c not in relabel:
            relabel[c] = len(relabel)
        out.append(relabel[c])
    return tuple(out)


def detect_communities(graph: VisibilityGraph, seed: int = 0) -> CommunityPartition:
    """Greedy modularity maximization (local moving + aggregation).

    Nodes start in singleton communities and are repeatedly moved, in a
    seed-shuffled order, to the neighboring community with the largest
    modularity gain (ties resolved toward the lowest community label);
    converged levels are aggregated and the process repeats until no
    move improves modularity. Deterministic for a fixed seed.
    """
    rng = random.Random(seed)

    # weighted adjacency with A[i][i] = 2 * internal weight after aggregation
    adj: dict[int, dict[int, float]] = {
        i: {} for i in range(1, graph.node_count + 1)
    }
    for a, b in sorted(graph.edges):
        adj[a][b] = adj[a].get(b, 0.0) + 1.0
        adj[b][a] = adj[b].get(a, 0.0) + 1.0
    two_m = sum(sum(nbrs.values()) for nbrs in adj.values())
    if two_m == 0:
        raise ValueError("graph has no edges")

    # membership[level] maps original node -> community at that level
    membership = {i: i for i in range(1, graph.node_count + 1)}

    while True:
        community = {i: i for i in adj}
        strength = {i: sum(nbrs.values()) for i, nbrs in adj.items()}
        comm_strength = dict(strength)
        improved = False

        def join_gain(links: dict[int, float], k_v: float, c: int) -> float:
            # modularity gain of attaching a detached node of strength k_v
            # to community c (whose strength excludes the node)
            return 2.0 * links.get(c, 0.0) / two_m - 2.0 * k_v * comm_strength[c] / (
                two_m * two_m
            )

        moved = True
        while moved:
            moved = False
            order = sorted(adj)
            rng.shuffle(order)
            for v in order:
                cv = community[v]
                k_v = strength[v]
                links: dict[int, float] = {}
                for u, w in adj[v].items():
                    if u != v:
                        links[community[u]] = links.get(community[u], 0.0) + w
                # detach v before evaluating gains
                comm_strength[cv] -= k_v
                base = join_gain(links, k_v, cv)
                best_c, best_delta = cv, 0.0
                for c in sorted(links):
                    if c == cv:
                        continue
                    delta = join_gain(links, k_v, c) - base
                    # ascending scan: on ties the lowest community id is kept
                    if delta > best_delta + 1e-12:
                        best_c, best_delta = c, delta
                comm_strength[best_c] += k_v
                if best_c != cv:
                    community[v] = best_c
                    moved = True
                    improved = True

        if not improved:
            break

        # aggregate: one supernode per community
        labels = sorted(set(community.values()))
        relabel = {old: new for new, old in enumerate(labels, start=1)}
        new_adj: dict[int, dict[int, float]] = {relabel[c]: {} for c in labels}
        for v, nbrs in adj.items():
            cv = relabel[community[v]]
            for u, w in nbrs.items():
                cu = relabel[community[u]]
                new_adj[cv][cu] = new_adj[cv].get(cu, 0.0) + w
        for node in membership:
            membership[node] = relabel[community[membership[node]]]
        adj = new_adj
        if len(adj) == 1:
            break

    assignment = _canonical([membership[i] for i in range(1, graph.node_count + 1)])
    return CommunityPartition(
        assignment=assignment, modularity=modularity(graph, assignment)
    )


def knots_from_partition(partition: CommunityPartition) -> KnotPartition:
    """Interior knots at the midpoints between adjacent community runs.

    Each community is split into maximal contiguous runs (a community may
    own several disjoint runs); every boundary between consecutive runs
    contributes one knot halfway between the last node of one run and the
    first node of the next. A single-community partition yields no knots.
    """
    runs = partition.contiguous_runs()
    knots = tuple(
        (runs[k][1] + runs[k + 1][0]) / 2.0 for k in range(len(runs) - 1)
    )
    return KnotPartition(interior_knots=knots, source=KnotSource.DETECTED)


def _partition_from_intervals(
    intervals: Mapping[int, Sequence[tuple[int, int]]], node_count: int
) -> CommunityPartition:
    assignment = [-1] * node_count
    for cid, spans in intervals.items():
        for lo, hi in spans:
            for node in range(lo, hi + 1):
                assignment[node - 1] = cid
    if any(c < 0 for c in assignment):
        raise ValueError("intervals do not cover every node")
    return CommunityPartition(assignment=_canonical(assignment), modularity=None)


#: Built-in five-part segmentation of the first 43 days of the Greek series
#: (the first community is non-convex: it owns two separate runs).
BUILTIN_GREEK_PARTITION = _partition_from_intervals(
    {
        0: [(1, 4), (9, 19)],
        1: [(5, 8)],
        2: [(20, 26)],
        3: [(27, 32)],
        4: [(33, 43)],
    },
    node_count=43,
)

#: Interior knots implied by BUILTIN_GREEK_PARTITION; the default knot
#: vector used by the spline CLI when no detection is requested.
BUILTIN_GREEK_KNOTS = KnotPartition(
    interior_knots=(4.5, 8.5, 19.5, 26.5, 32.5),
    source=KnotSource.PAPER_DEFAULT,
)
