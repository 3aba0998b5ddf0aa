"""Compiled depth-first kernels for walk and polygon enumeration.

Vertices are rows of a neighbour table ``nbr[v, k]`` (``-1`` where direction
``k`` is not an edge). Row order is lexicographic in the coordinates, so
comparing row indices compares vertices.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def saw_histograms(nbr, start, nmax, pattern):
    """hist[t, k] = number of t-step SAWs from ``start`` with k occurrences of ``pattern``."""
    V, D = nbr.shape
    m = pattern.shape[0]
    hist = np.zeros((nmax + 1, nmax + 2), np.int64)
    hist[0, 0] = 1
    if nmax == 0:
        return hist
    visited = np.zeros(V, np.bool_)
    path = np.empty(nmax + 1, np.int64)
    dirs = np.empty(nmax + 1, np.int64)
    nextd = np.zeros(nmax + 1, np.int64)
    occ = np.zeros(nmax + 1, np.int64)
    path[0] = start
    visited[start] = True
    t = 0
    while t >= 0:
        if nextd[t] < D:
            k = nextd[t]
            nextd[t] += 1
            nb = nbr[path[t], k]
            if nb < 0 or visited[nb]:
                continue
            t1 = t + 1
            dirs[t1] = k
            o = occ[t]
            if m > 0 and t1 >= m:
                match = True
                for q in range(m):
                    if dirs[t1 - m + 1 + q] != pattern[q]:
                        match = False
                        break
                if match:
                    o += 1
            hist[t1, o] += 1
            if t1 < nmax:
                path[t1] = nb
                visited[nb] = True
                occ[t1] = o
                nextd[t1] = 0
                t = t1
        else:
            visited[path[t]] = False
            t -= 1
    return hist


@njit(cache=True)
def closing_walks(nbr, coords, start, nsteps, pattern, hist, out):
    """Enumerate canonical closing walks of ``nsteps`` steps from ``start``.

    A walk is kept when its endpoint is adjacent to ``start`` and its second site
    precedes its last site (the lexicographically smaller traversal of the polygon).
    ``hist[k]`` counts kept walks with k pattern occurrences. When ``out`` has rows,
    kept walks are written there. Returns the number of kept walks.
    """
    V, D = nbr.shape
    m = pattern.shape[0]
    dim = coords.shape[1]
    store = out.shape[0] > 0
    is_adj = np.zeros(V, np.bool_)
    for k in range(D):
        if nbr[start, k] >= 0:
            is_adj[nbr[start, k]] = True
    visited = np.zeros(V, np.bool_)
    path = np.empty(nsteps + 1, np.int64)
    dirs = np.empty(nsteps + 1, np.int64)
    nextd = np.zeros(nsteps + 1, np.int64)
    occ = np.zeros(nsteps + 1, np.int64)
    path[0] = start
    visited[start] = True
    count = 0
    t = 0
    while t >= 0:
        if nextd[t] < D:
            k = nextd[t]
            nextd[t] += 1
            nb = nbr[path[t], k]
            if nb < 0 or visited[nb]:
                continue
            t1 = t + 1
            dist = 0
            for c in range(dim):
                dist += abs(coords[nb, c] - coords[start, c])
            if dist - 1 > nsteps - t1:
                continue
            dirs[t1] = k
            o = occ[t]
            if m > 0 and t1 >= m:
                match = True
                for q in range(m):
                    if dirs[t1 - m + 1 + q] != pattern[q]:
                        match = False
                        break
                if match:
                    o += 1
            if t1 == nsteps:
                if is_adj[nb] and path[1] < nb:
                    hist[o] += 1
                    if store:
                        for s in range(nsteps):
                            out[count, s] = path[s]
                        out[count, nsteps] = nb
                    count += 1
                continue
            path[t1] = nb
            visited[nb] = True
            occ[t1] = o
            nextd[t1] = 0
            t = t1
        else:
            visited[path[t]] = False
            t -= 1
    return count


@njit(cache=True)
def _loops_touching(verts, nv, active, deg, inc, other, stamp, mark):
    """Number of distinct loops through the first ``nv`` entries of ``verts``."""
    count = 0
    for i in range(nv):
        v0 = verts[i]
        if deg[v0] != 2 or stamp[v0] == mark:
            continue
        count += 1
        _trace(v0, active, inc, other, stamp, mark)
    return count


@njit(cache=True)
def _trace(v0, active, inc, other, stamp, mark):
    """Mark the loop through ``v0`` and return its number of edges."""
    stamp[v0] = mark
    prev_e = -1
    v = v0
    length = 0
    while True:
        nxt = -1
        for q in range(inc.shape[1]):
            e = inc[v, q]
            if e >= 0 and active[e] and e != prev_e:
                nxt = e
                break
        if nxt < 0:
            return length
        length += 1
        prev_e = nxt
        v = other[nxt, 0] if other[nxt, 1] == v else other[nxt, 1]
        if v == v0:
            return length
        stamp[v] = mark


@njit(cache=True)
def _shift_degrees(faces, f, active, other, deg, sign):
    """Add (sign=1) or remove (sign=-1) the degree change of flipping face ``f`` from ``active``."""
    for q in range(faces.shape[1]):
        e = faces[f, q]
        delta = -sign if active[e] else sign
        deg[other[e, 0]] += delta
        deg[other[e, 1]] += delta


@njit(cache=True)
def flip_chain(active, deg, faces, inc, other, lam, n, face_seq, u_seq,
               steps_per_sweep, burn_in, marked, hist, full_recount, masks):
    """Run Metropolis face flips driven by ``face_seq``/``u_seq``; update ``active`` and ``deg`` in place.

    After every completed sweep past ``burn_in`` the loop length through each marked
    vertex is added to ``hist``. When ``masks`` has rows, the edge bitmask after
    each step is written there. Returns ``(accepted, loops, sum_edges, sum_loops,
    samples)`` where ``loops`` is the loop count of the final configuration.
    """
    V = deg.shape[0]
    E = active.shape[0]
    K = faces.shape[1]
    stamp = np.zeros(V, np.int64)
    mark = 1
    fverts = np.empty(2 * K, np.int64)
    all_verts = np.arange(V)
    o = 0
    for e in range(E):
        if active[e]:
            o += 1
    L = _loops_touching(all_verts, V, active, deg, inc, other, stamp, mark)
    accepted = 0
    sum_o = 0.0
    sum_L = 0.0
    samples = 0
    record = masks.shape[0] > 0
    for s in range(face_seq.shape[0]):
        f = face_seq[s]
        _shift_degrees(faces, f, active, other, deg, 1)
        valid = True
        nfv = 0
        d_o = 0
        for q in range(K):
            e = faces[f, q]
            d_o += -1 if active[e] else 1
            for r in range(2):
                w = other[e, r]
                if deg[w] != 0 and deg[w] != 2:
                    valid = False
                fverts[nfv] = w
                nfv += 1
        _shift_degrees(faces, f, active, other, deg, -1)
        if valid:
            mark += 1
            if full_recount:
                before = L
            else:
                before = _loops_touching(fverts, nfv, active, deg, inc, other, stamp, mark)
            _shift_degrees(faces, f, active, other, deg, 1)
            for q in range(K):
                active[faces[f, q]] = not active[faces[f, q]]
            mark += 1
            if full_recount:
                after = _loops_touching(all_verts, V, active, deg, inc, other, stamp, mark)
            else:
                after = _loops_touching(fverts, nfv, active, deg, inc, other, stamp, mark)
            d_L = after - before
            ratio = 1.0
            if d_o != 0:
                if lam == 0.0:
                    ratio = 0.0 if d_o > 0 else np.inf
                else:
                    ratio *= lam ** d_o
            if d_L != 0 and ratio > 0.0:
                if n == 0.0:
                    ratio = 0.0 if d_L > 0 else np.inf
                else:
                    ratio *= n ** d_L
            if u_seq[s] < ratio:
                accepted += 1
                o += d_o
                L += d_L
            else:
                for q in range(K):
                    active[faces[f, q]] = not active[faces[f, q]]
                _shift_degrees(faces, f, active, other, deg, -1)
        if record:
            m = 0
            for e in range(E):
                if active[e]:
                    m |= 1 << e
            masks[s] = m
        if (s + 1) % steps_per_sweep == 0 and (s + 1) // steps_per_sweep > burn_in:
            samples += 1
            sum_o += o
            sum_L += L
            for i in range(marked.shape[0]):
                v = marked[i]
                if deg[v] == 2:
                    mark += 1
                    hist[i, _trace(v, active, inc, other, stamp, mark)] += 1
                else:
                    hist[i, 0] += 1
    return accepted, L, sum_o, sum_L, samples
