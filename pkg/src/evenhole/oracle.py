"""Exponential-time ground-truth computations for tests and verification mode.

Every oracle refuses inputs over its budget with OverBudgetError rather than
silently approximating. All oracles are deterministic.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

from .errors import OverBudgetError
from .graph import Graph, bits, components_masks, cut_rank, is_connected, maximal_cliques


def _env_max_n(default: int) -> int:
    raw = os.environ.get("EVENHOLE_ORACLE_MAX_N")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


@dataclass
class OracleBudget:
    """Per-oracle input-size caps and an optional wall-clock limit."""

    max_chromatic: int = field(default_factory=lambda: _env_max_n(24))
    max_rank_width: int = 11
    max_star_cutset: int = 10
    max_subset_scan: int = 14
    time_limit: float | None = None

    def start_clock(self) -> float:
        return time.monotonic()

    def check_clock(self, t0: float, what: str) -> None:
        if self.time_limit is not None and time.monotonic() - t0 > self.time_limit:
            raise OverBudgetError(f"{what}: time limit {self.time_limit}s exceeded")


DEFAULT_BUDGET = OracleBudget()


def _require(n: int, cap: int, what: str) -> None:
    if n > cap:
        raise OverBudgetError(f"{what}: n={n} exceeds budget {cap}")


def brute_chromatic(g: Graph, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    """Exact chromatic number via DSATUR branch-and-bound.

    Lower-bounded by a maximum clique, upper-bounded by greedy DSATUR.
    """
    _require(g.n, budget.max_chromatic, "brute_chromatic")
    n = g.n
    if n == 0:
        return 0
    t0 = budget.start_clock()

    clique_lb = max((m.bit_count() for m in maximal_cliques(g)), default=1)

    # Greedy DSATUR for the initial upper bound.
    color = [-1] * n
    nbr_colors = [0] * n
    order_left = set(range(n))
    upper = 0
    while order_left:
        v = max(order_left, key=lambda u: (nbr_colors[u].bit_count(), g.degree(u), -u))
        c = 0
        while (nbr_colors[v] >> c) & 1:
            c += 1
        color[v] = c
        upper = max(upper, c + 1)
        order_left.remove(v)
        for w in bits(g.adj[v]):
            nbr_colors[w] |= 1 << c
    if upper == clique_lb:
        return upper

    best = upper
    color = [-1] * n
    nbr_colors = [0] * n

    def choose() -> int:
        v = -1
        key = (-1, -1, 0)
        for u in range(n):
            if color[u] == -1:
                k = (nbr_colors[u].bit_count(), g.degree(u), -u)
                if k > key:
                    key = k
                    v = u
        return v

    def backtrack(colored: int, used: int) -> None:
        nonlocal best
        budget.check_clock(t0, "brute_chromatic")
        if used >= best:
            return
        if colored == n:
            best = used
            return
        v = choose()
        cap = min(used + 1, best - 1)
        for c in range(cap):
            if (nbr_colors[v] >> c) & 1:
                continue
            color[v] = c
            touched = []
            for w in bits(g.adj[v]):
                if not (nbr_colors[w] >> c) & 1:
                    nbr_colors[w] |= 1 << c
                    touched.append(w)
            backtrack(colored + 1, max(used, c + 1))
            color[v] = -1
            for w in touched:
                nbr_colors[w] &= ~(1 << c)
            if best <= clique_lb:
                return
        return

    backtrack(0, 0)
    return best


def brute_rank_width(g: Graph, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    """Exact rank-width by dynamic programming over vertex subsets.

    h[S] = best achievable max cut-rank over all subtrees of a rooted binary
    branch tree on S, including the cut (S, V-S) itself; h[V] is rwd(G).
    Cut-ranks are memoized once per subset, using complement symmetry.
    """
    _require(g.n, budget.max_rank_width, "brute_rank_width")
    n = g.n
    if n <= 1:
        return 0
    full = g.full_mask
    half = 1 << (n - 1)

    cutrk = [0] * (1 << n)
    for m in range(1, half):  # complements fill every mask with the top bit set
        r = cut_rank(g, m)
        cutrk[m] = r
        cutrk[full ^ m] = r

    h = [0] * (1 << n)
    for v in range(n):
        h[1 << v] = cutrk[1 << v]
    order = sorted(range(1, 1 << n), key=lambda m: m.bit_count())
    for m in order:
        if m.bit_count() < 2:
            continue
        low = m & (m - 1)
        fixed = m & -m  # least vertex stays on one side: halves the splits
        rest = m ^ fixed
        best = None
        s = rest
        while s:
            part = max(h[fixed | (rest ^ s)], h[s])
            if best is None or part < best:
                best = part
            s = (s - 1) & rest
        h[m] = max(cutrk[m], best)
    return h[full]


def brute_star_cutset(g: Graph, budget: OracleBudget = DEFAULT_BUDGET):
    """Exhaustive star cutset search over every (center x, S subset of N[x]).

    Returns (center, cutset frozenset) for the first witness in scan order
    (ascending center, then ascending subset mask over N(x)), or None.
    """
    _require(g.n, budget.max_star_cutset, "brute_star_cutset")
    if not is_connected(g):
        raise ValueError("star cutset search expects a connected graph")
    for x in range(g.n):
        nx = list(bits(g.adj[x]))
        for sub in range(1 << len(nx)):
            s_mask = 1 << x
            for i, v in enumerate(nx):
                if (sub >> i) & 1:
                    s_mask |= 1 << v
            if len(components_masks(g, s_mask)) >= 2:
                return x, frozenset(bits(s_mask))
    return None


def brute_even_hole(g: Graph, budget: OracleBudget = DEFAULT_BUDGET):
    """Subset-enumeration oracle: least even chordless cycle as a sorted set.

    A subset induces a hole iff the induced subgraph is connected and
    2-regular; evenness is |subset| % 2 == 0. Returns a frozenset or None.
    """
    _require(g.n, budget.max_subset_scan, "brute_even_hole")
    hits = []
    for m in range(1, 1 << g.n):
        k = m.bit_count()
        if k < 4 or k % 2:
            continue
        if all((g.adj[v] & m).bit_count() == 2 for v in bits(m)) and is_connected(g, m):
            hits.append(frozenset(bits(m)))
    if not hits:
        return None
    return min(hits, key=lambda s: (len(s), sorted(s)))


def brute_holes(g: Graph, budget: OracleBudget = DEFAULT_BUDGET) -> list[frozenset]:
    """All chordless cycles of length >= 4, as vertex sets (subset scan)."""
    _require(g.n, budget.max_subset_scan, "brute_holes")
    out = []
    for m in range(1, 1 << g.n):
        if m.bit_count() < 4:
            continue
        if all((g.adj[v] & m).bit_count() == 2 for v in bits(m)) and is_connected(g, m):
            out.append(frozenset(bits(m)))
    return out


def brute_two_join(g: Graph, forbidden=(), budget: OracleBudget = DEFAULT_BUDGET):
    """Exhaustive 2-join search over all bipartitions of V.

    Returns the first valid split (as produced by twojoin.split_from_partition)
    in ascending X1-mask order with vertex 0 in X1, or None.
    """
    from .twojoin import split_from_partition

    _require(g.n, budget.max_subset_scan, "brute_two_join")
    n = g.n
    if n < 6:
        return None
    for m in range(1, 1 << (n - 1)):
        x1 = m | (1 << (n - 1))  # fix the top vertex in X1 to halve the scan
        s = split_from_partition(g, x1, forbidden)
        if s is not None:
            return s
    return None
