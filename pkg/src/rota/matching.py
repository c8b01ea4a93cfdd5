"""Maximum bipartite matching (Hopcroft-Karp) with a Hall-violation certificate."""

from __future__ import annotations

from collections import deque
from typing import Sequence

FREE = -1


def hopcroft_karp(adj: Sequence[Sequence[int]], m_right: int) -> tuple[list[int], list[int]]:
    """Maximum matching of a bipartite graph given by left adjacency lists.

    Returns ``(match_left, match_right)`` where unmatched entries are ``-1``.
    """
    m_left = len(adj)
    match_l = [FREE] * m_left
    match_r = [FREE] * m_right
    inf = m_left + m_right + 1
    while True:
        # BFS layers from the free left vertices
        dist = [inf] * m_left
        queue = deque()
        for u in range(m_left):
            if match_l[u] == FREE:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == FREE:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            return match_l, match_r
        # iterative DFS along the layering, one vertex-disjoint augmenting path per free vertex
        it = [0] * m_left
        for root in range(m_left):
            if match_l[root] != FREE:
                continue
            stack = [root]
            path_r = []
            while stack:
                u = stack[-1]
                advanced = False
                while it[u] < len(adj[u]):
                    v = adj[u][it[u]]
                    it[u] += 1
                    w = match_r[v]
                    if w == FREE:
                        path_r.append(v)
                        for uu, vv in zip(stack, path_r):
                            match_l[uu] = vv
                            match_r[vv] = uu
                        stack = []
                        advanced = True
                        break
                    if dist[w] == dist[u] + 1:
                        path_r.append(v)
                        stack.append(w)
                        advanced = True
                        break
                if not advanced:
                    dist[u] = inf
                    stack.pop()
                    if path_r:
                        path_r.pop()


def hall_violator(
    adj: Sequence[Sequence[int]], match_l: Sequence[int], match_r: Sequence[int]
) -> tuple[list[int], list[int]]:
    """Left set ``Z`` with ``|N(Z)| < |Z|`` from a maximum matching (empty if perfect).

    ``Z`` is everything reachable from the free left vertices by alternating
    paths; ``N(Z)`` is fully matched back into ``Z``, so
    ``|Z| - |N(Z)|`` equals the number of free left vertices.
    """
    seen_l = [False] * len(adj)
    seen_r = set()
    queue = deque(u for u in range(len(adj)) if match_l[u] == FREE)
    for u in queue:
        seen_l[u] = True
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v in seen_r:
                continue
            seen_r.add(v)
            w = match_r[v]
            if w != FREE and not seen_l[w]:
                seen_l[w] = True
                queue.append(w)
    return [u for u, s in enumerate(seen_l) if s], sorted(seen_r)
