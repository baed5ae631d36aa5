# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: adjacency, reachability, lex-min shortest routes.

Mirror of the pure Python module; both backends must produce identical
results for identical inputs. Node count is capped at 32 so a graph
fits in uint32 bitmasks.
"""

from libc.stdint cimport uint32_t

BACKEND = "compiled"

DEF MAXN = 32


def adjacency_masks(double[::1] xs, double[::1] ys, double radius, uint32_t[::1] out):
    cdef int n = xs.shape[0]
    cdef int i, j
    cdef double r2 = radius * radius
    cdef double dx, dy
    for i in range(n):
        out[i] = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = xs[i] - xs[j]
            dy = ys[i] - ys[j]
            if dx * dx + dy * dy <= r2:
                out[i] |= (<uint32_t> 1) << j
                out[j] |= (<uint32_t> 1) << i


def reachable_mask(uint32_t[::1] masks, int n, int src):
    cdef uint32_t seen = (<uint32_t> 1) << src
    cdef uint32_t frontier = seen
    cdef uint32_t nxt
    cdef int i
    while frontier:
        nxt = 0
        for i in range(n):
            if frontier >> i & 1:
                nxt |= masks[i]
        nxt &= ~seen
        seen |= nxt
        frontier = nxt
    return seen


def route_lexmin(uint32_t[::1] masks, int n, int src, int dst):
    cdef int dist[MAXN]
    cdef int queue[MAXN]
    cdef int head = 0, tail = 0
    cdef int i, u, v, du, k
    cdef uint32_t m
    for i in range(n):
        dist[i] = -1
    dist[dst] = 0
    queue[tail] = dst
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        m = masks[u]
        du = dist[u] + 1
        for v in range(n):
            if m >> v & 1 and dist[v] < 0:
                dist[v] = du
                queue[tail] = v
                tail += 1
    if dist[src] < 0:
        return None
    hops = [src]
    u = src
    for k in range(dist[src], 0, -1):
        m = masks[u]
        for v in range(n):
            if m >> v & 1 and dist[v] == k - 1:
                u = v
                break
        hops.append(u)
    return hops
