"""Pure Python kernels: adjacency, reachability, lex-min shortest routes.

Semantics must match the compiled twin exactly; the parity tests compare
both backends element-wise on random inputs. Graphs are encoded as one
neighbour bitmask per node (node j adjacent to i iff bit j of masks[i]).
"""

from __future__ import annotations

BACKEND = "pure"


def adjacency_masks(xs, ys, radius, out) -> None:
    """Fill out[i] with the neighbour bitmask of node i.

    An edge exists when the euclidean distance is <= radius, endpoints
    excluded from their own mask.
    """
    n = len(xs)
    r2 = radius * radius
    for i in range(n):
        out[i] = 0
    for i in range(n):
        xi = xs[i]
        yi = ys[i]
        for j in range(i + 1, n):
            dx = xi - xs[j]
            dy = yi - ys[j]
            if dx * dx + dy * dy <= r2:
                out[i] |= 1 << j
                out[j] |= 1 << i


def reachable_mask(masks, n: int, src: int) -> int:
    """Bitmask of nodes reachable from src, src included."""
    seen = 1 << src
    frontier = seen
    while frontier:
        nxt = 0
        for i in range(n):
            if frontier >> i & 1:
                nxt |= int(masks[i])
        nxt &= ~seen
        seen |= nxt
        frontier = nxt
    return seen


def route_lexmin(masks, n: int, src: int, dst: int) -> list[int] | None:
    """Minimum-hop route from src to dst, lexicographically smallest.

    Returns the node sequence [src, ..., dst] or None when unreachable.
    src == dst is a caller error.
    """
    # BFS from dst gives distance-to-destination for every node; the
    # lex-min shortest path then falls out of a greedy walk from src
    # that always picks the lowest-numbered neighbour one step closer.
    dist = [-1] * n
    dist[dst] = 0
    queue = [dst]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        m = int(masks[u])
        du = dist[u] + 1
        for v in range(n):
            if m >> v & 1 and dist[v] < 0:
                dist[v] = du
                queue.append(v)
    if dist[src] < 0:
        return None
    hops = [src]
    u = src
    for k in range(dist[src], 0, -1):
        m = int(masks[u])
        for v in range(n):
            if m >> v & 1 and dist[v] == k - 1:
                u = v
                break
        hops.append(u)
    return hops
