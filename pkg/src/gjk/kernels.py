"""
Compiled GJK Kernels
Support search, simplex reduction and the distance loop on flat float64
arrays, compiled with numba.

Vectors are (x, y, z) tuples so the inner loop never allocates. A simplex is
a (4, 3) array W of Minkowski-difference points, newest first, plus its
length n. A reduction step is the tuple

    (direction, mask, barycentric, contains_origin)

where bit j of mask is set when row j of W survives; barycentric lists the
surviving rows in increasing row order.
"""

import numba
import numpy as np

# sin(angle) below which a triangle or tetrahedron is treated as flat
FLAT = 1e-10
_FLAT2 = FLAT * FLAT

# Distances at or below this, scaled by max(1, witness magnitude), are contact.
CONTACT_TOLERANCE = 1e-12

# gjk_loop status codes
STATUS_OK = 0
STATUS_NONCONVEX_P = 1
STATUS_NONCONVEX_Q = 2


@numba.njit(cache=True)
def _row(W, i):
    return (W[i, 0], W[i, 1], W[i, 2])


@numba.njit(cache=True)
def _sub(u, v):
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


@numba.njit(cache=True)
def _neg(u):
    return (-u[0], -u[1], -u[2])


@numba.njit(cache=True)
def _scale(s, u):
    return (s * u[0], s * u[1], s * u[2])


@numba.njit(cache=True)
def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


@numba.njit(cache=True)
def _cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


@numba.njit(cache=True)
def _normalized(w, m):
    w0 = max(w[0], 0.0)
    w1 = max(w[1], 0.0) if m > 1 else 0.0
    w2 = max(w[2], 0.0) if m > 2 else 0.0
    w3 = max(w[3], 0.0) if m > 3 else 0.0
    total = w0 + w1 + w2 + w3
    if total <= 0.0:
        return (1.0, 0.0, 0.0, 0.0)
    return (w0 / total, w1 / total, w2 / total, w3 / total)


@numba.njit(cache=True)
def _step(d, m, mask, weights):
    contains = d[0] == 0.0 and d[1] == 0.0 and d[2] == 0.0
    return (d, mask, _normalized(weights, m), contains)


@numba.njit(cache=True)
def _point(W, a):
    return _step(_neg(_row(W, a)), 1, 1 << a, (1.0, 0.0, 0.0, 0.0))


@numba.njit(cache=True)
def _line(W, a, b):
    A = _row(W, a)
    ab = _sub(_row(W, b), A)
    ao = _neg(A)
    length2 = _dot(ab, ab)
    along = _dot(ab, ao)
    if length2 == 0.0 or along <= 0.0:
        return _point(W, a)
    # The far side of B is ruled out because A improved on B.
    s = min(along / length2, 1.0)
    return _step(_sub(ao, _scale(s, ab)), 2, (1 << a) | (1 << b), (1.0 - s, s, 0.0, 0.0))


@numba.njit(cache=True)
def _face(W, a, b, c, normal):
    A = _row(W, a)
    nn = _dot(normal, normal)
    d = _scale(_dot(normal, _neg(A)) / nn, normal)
    point = _neg(d)
    pa = _sub(A, point)
    pb = _sub(_row(W, b), point)
    pc = _sub(_row(W, c), point)
    weights = (
        _dot(_cross(pb, pc), normal) / nn,
        _dot(_cross(pc, pa), normal) / nn,
        _dot(_cross(pa, pb), normal) / nn,
        0.0,
    )
    return _step(d, 3, (1 << a) | (1 << b) | (1 << c), weights)


@numba.njit(cache=True)
def _nearer(first, second):
    return first if _dot(first[0], first[0]) <= _dot(second[0], second[0]) else second


@numba.njit(cache=True)
def _triangle(W, a, b, c):
    A = _row(W, a)
    ab = _sub(_row(W, b), A)
    ac = _sub(_row(W, c), A)
    ao = _neg(A)
    abc = _cross(ab, ac)

    if _dot(abc, abc) <= _FLAT2 * _dot(ab, ab) * _dot(ac, ac):
        # Ties keep {A, B}, dropping the oldest witness.
        return _nearer(_line(W, a, b), _line(W, a, c))

    if _dot(_cross(abc, ac), ao) >= 0.0:
        if _dot(ac, ao) > 0.0:
            return _line(W, a, c)
        return _line(W, a, b)
    if _dot(_cross(ab, abc), ao) >= 0.0:
        return _line(W, a, b)
    return _face(W, a, b, c, abc)


@numba.njit(cache=True)
def _tetrahedron_weights(ab, ac, ad, ao):
    # Cramer's rule for [ab ac ad] x = ao.
    det = _dot(ab, _cross(ac, ad))
    if det == 0.0:
        return (1.0, 0.0, 0.0, 0.0)
    x0 = _dot(ao, _cross(ac, ad)) / det
    x1 = _dot(ab, _cross(ao, ad)) / det
    x2 = _dot(ab, _cross(ac, ao)) / det
    return (1.0 - (x0 + x1 + x2), x0, x1, x2)


@numba.njit(cache=True)
def _tetrahedron(W):
    A = _row(W, 0)
    B = _row(W, 1)
    C = _row(W, 2)
    D = _row(W, 3)
    ab = _sub(B, A)
    ac = _sub(C, A)
    ad = _sub(D, A)
    ao = _neg(A)
    abc = _cross(ab, ac)
    acd = _cross(ac, ad)
    abd = _cross(ab, ad)
    volume = _dot(abc, ad)

    if volume * volume <= _FLAT2 * _dot(abc, abc) * _dot(ad, ad):
        # Nearest face through A; ties go to the larger face, then to face order.
        s0 = _triangle(W, 0, 1, 2)
        s1 = _triangle(W, 0, 2, 3)
        s2 = _triangle(W, 0, 1, 3)
        d0, d1, d2 = _dot(s0[0], s0[0]), _dot(s1[0], s1[0]), _dot(s2[0], s2[0])
        r0, r1, r2 = _dot(abc, abc), _dot(acd, acd), _dot(abd, abd)
        best, bd, br = s0, d0, r0
        if d1 < bd or (d1 == bd and r1 > br):
            best, bd, br = s1, d1, r1
        if d2 < bd or (d2 == bd and r2 > br):
            best = s2
        return best

    # Orient each face normal to point away from the opposite vertex.
    sign = -1.0 if volume > 0.0 else 1.0
    out0 = _dot(_scale(sign, abc), ao) > 0.0
    out1 = _dot(_scale(sign, acd), ao) > 0.0
    out2 = _dot(_scale(-sign, abd), ao) > 0.0
    bcd = _cross(_sub(C, B), _sub(D, B))
    if _dot(bcd, _sub(A, B)) > 0.0:
        bcd = _neg(bcd)
    out_bcd = _dot(bcd, _neg(B)) > 0.0

    if not (out0 or out1 or out2):
        if not out_bcd:
            weights = _tetrahedron_weights(ab, ac, ad, ao)
            return ((0.0, 0.0, 0.0), 15, _normalized(weights, 4), True)
        out0 = out1 = out2 = True

    if out0:
        best = _triangle(W, 0, 1, 2)
    elif out1:
        best = _triangle(W, 0, 2, 3)
    else:
        best = _triangle(W, 0, 1, 3)
    if out0 and out1:
        best = _nearer(best, _triangle(W, 0, 2, 3))
    if (out0 or out1) and out2:
        best = _nearer(best, _triangle(W, 0, 1, 3))
    return best


@numba.njit(cache=True)
def reduce_simplex(W, n):
    """Closest feature of the first n rows of W to the origin."""
    if n == 1:
        return _point(W, 0)
    if n == 2:
        return _line(W, 0, 1)
    if n == 3:
        return _triangle(W, 0, 1, 2)
    return _tetrahedron(W)


@numba.njit(cache=True)
def support_index(vertices, d):
    """Index maximizing d.x over all vertices; lowest index on ties."""
    best = 0
    top = vertices[0, 0] * d[0] + vertices[0, 1] * d[1] + vertices[0, 2] * d[2]
    for i in range(1, vertices.shape[0]):
        s = vertices[i, 0] * d[0] + vertices[i, 1] * d[1] + vertices[i, 2] * d[2]
        if s > top:
            top = s
            best = i
    return best


@numba.njit(cache=True)
def climb(vertices, indptr, indices, d, start):
    """
    Walk to the best strictly-improving neighbour until none improves.

    Returns (vertex, moves); moves is -1 when the walk exceeded the vertex
    count, which only happens on a non-convex graph.
    """
    limit = vertices.shape[0]
    current = start
    best = vertices[current, 0] * d[0] + vertices[current, 1] * d[1] + vertices[current, 2] * d[2]
    moves = 0
    while True:
        lo = indptr[current]
        hi = indptr[current + 1]
        if lo == hi:
            break
        k = indices[lo]
        top = vertices[k, 0] * d[0] + vertices[k, 1] * d[1] + vertices[k, 2] * d[2]
        for j in range(lo + 1, hi):
            i = indices[j]
            s = vertices[i, 0] * d[0] + vertices[i, 1] * d[1] + vertices[i, 2] * d[2]
            if s > top:
                top = s
                k = i
        if top <= best:
            break
        current = k
        best = top
        moves += 1
        if moves > limit:
            return current, -1
    return current, moves


@numba.njit(cache=True)
def _local(rotation, placed, d):
    if not placed:
        return d
    # R^T d
    return (
        rotation[0, 0] * d[0] + rotation[1, 0] * d[1] + rotation[2, 0] * d[2],
        rotation[0, 1] * d[0] + rotation[1, 1] * d[1] + rotation[2, 1] * d[2],
        rotation[0, 2] * d[0] + rotation[1, 2] * d[1] + rotation[2, 2] * d[2],
    )


@numba.njit(cache=True)
def _world(vertices, rotation, translation, placed, i):
    x = (vertices[i, 0], vertices[i, 1], vertices[i, 2])
    if not placed:
        return x
    return (
        rotation[0, 0] * x[0] + rotation[0, 1] * x[1] + rotation[0, 2] * x[2] + translation[0],
        rotation[1, 0] * x[0] + rotation[1, 1] * x[1] + rotation[1, 2] * x[2] + translation[1],
        rotation[2, 0] * x[0] + rotation[2, 1] * x[1] + rotation[2, 2] * x[2] + translation[2],
    )


@numba.njit(cache=True)
def _put(W, j, x):
    W[j, 0] = x[0]
    W[j, 1] = x[1]
    W[j, 2] = x[2]


@numba.njit(cache=True)
def gjk_loop(
    vp, ptr_p, idx_p, rot_p, tra_p, placed_p,
    vq, ptr_q, idx_q, rot_q, tra_q, placed_q,
    hill, max_iterations, tolerance, cursor_p, cursor_q, warm, v0,
    closest, history, trace, trace_sizes,
):  # fmt: skip
    """
    GJK distance loop between two placed vertex graphs.

    Args:
        vp, vq: (n, 3) local vertices
        ptr_p, idx_p, ptr_q, idx_q: CSR adjacency
        rot_*, tra_*, placed_*: world placement; ignored when placed is False
        hill: hill-climbing support instead of the exhaustive scan
        cursor_p, cursor_q: start vertices for hill climbing
        warm: start from the witness (cursor_p, cursor_q) instead of v0
        v0: (3,) starting estimate for cold starts
        closest: (2, 3) output for the closest points on P and Q
        history: (max_iterations + 1,) output of ||v|| per step
        trace, trace_sizes: optional record of every simplex before reduction;
            rows beyond trace.shape[0] are not recorded

    Returns:
        (status, distance, colliding, converged, iterations,
         cursor_p, cursor_q, history length, recorded simplexes)
    """
    W = np.empty((4, 3))
    Wp = np.empty((4, 3))
    Wq = np.empty((4, 3))
    keys_p = np.empty(4, dtype=np.int64)
    keys_q = np.empty(4, dtype=np.int64)
    n = 0
    n_history = 0
    n_trace = 0
    iterations = 0
    colliding = False
    converged = False

    bary = (1.0, 0.0, 0.0, 0.0)
    if warm:
        p = _world(vp, rot_p, tra_p, placed_p, cursor_p)
        q = _world(vq, rot_q, tra_q, placed_q, cursor_q)
        _put(Wp, 0, p)
        _put(Wq, 0, q)
        _put(W, 0, _sub(p, q))
        keys_p[0] = cursor_p
        keys_q[0] = cursor_q
        n = 1
        first = _point(W, 0)
        v = _neg(first[0])
        history[0] = np.sqrt(_dot(v, v))
        n_history = 1
        colliding = first[3]
        converged = colliding
    else:
        v = (v0[0], v0[1], v0[2])
    if v[0] == 0.0 and v[1] == 0.0 and v[2] == 0.0:
        v = (1.0, 0.0, 0.0)

    scale = 1.0
    while not colliding and iterations < max_iterations:
        iterations += 1
        dp = _local(rot_p, placed_p, _neg(v))
        dq = _local(rot_q, placed_q, v)
        if hill:
            cursor_p, moves = climb(vp, ptr_p, idx_p, dp, cursor_p)
            if moves < 0:
                return STATUS_NONCONVEX_P, 0.0, False, False, iterations, cursor_p, cursor_q, n_history, n_trace
            cursor_q, moves = climb(vq, ptr_q, idx_q, dq, cursor_q)
            if moves < 0:
                return STATUS_NONCONVEX_Q, 0.0, False, False, iterations, cursor_p, cursor_q, n_history, n_trace
        else:
            cursor_p = support_index(vp, dp)
            cursor_q = support_index(vq, dq)
        p = _world(vp, rot_p, tra_p, placed_p, cursor_p)
        q = _world(vq, rot_q, tra_q, placed_q, cursor_q)
        w = _sub(p, q)
        scale = max(scale, abs(w[0]), abs(w[1]), abs(w[2]))

        if n > 0:
            vv = _dot(v, v)
            seen = False
            for j in range(n):
                if keys_p[j] == cursor_p and keys_q[j] == cursor_q:
                    seen = True
            if vv - _dot(v, w) <= tolerance * max(1.0, vv) or seen:
                converged = True
                break

        # Push the new witness as A.
        for j in range(n, 0, -1):
            W[j] = W[j - 1]
            Wp[j] = Wp[j - 1]
            Wq[j] = Wq[j - 1]
            keys_p[j] = keys_p[j - 1]
            keys_q[j] = keys_q[j - 1]
        _put(W, 0, w)
        _put(Wp, 0, p)
        _put(Wq, 0, q)
        keys_p[0] = cursor_p
        keys_q[0] = cursor_q
        n += 1

        if n_trace < trace.shape[0]:
            trace[n_trace, :n] = W[:n]
            trace_sizes[n_trace] = n
            n_trace += 1

        step = reduce_simplex(W, n)
        mask = step[1]
        m = 0
        for j in range(n):
            if mask & (1 << j):
                if m != j:
                    W[m] = W[j]
                    Wp[m] = Wp[j]
                    Wq[m] = Wq[j]
                    keys_p[m] = keys_p[j]
                    keys_q[m] = keys_q[j]
                m += 1
        n = m
        bary = step[2]
        v = _neg(step[0])
        norm = np.sqrt(_dot(v, v))
        history[n_history] = norm
        n_history += 1
        if step[3] or norm <= CONTACT_TOLERANCE * scale:
            colliding = True
            converged = True

    for axis in range(3):
        cp = 0.0
        cq = 0.0
        for j in range(n):
            cp += bary[j] * Wp[j, axis]
            cq += bary[j] * Wq[j, axis]
        closest[0, axis] = cp
        closest[1, axis] = cq
    distance = 0.0 if colliding else np.sqrt(_dot(v, v))
    return STATUS_OK, distance, colliding, converged, iterations, cursor_p, cursor_q, n_history, n_trace
