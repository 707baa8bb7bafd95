# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled free-group word kernels; mirrors pure.py exactly."""

from ..errors import ResourceCapError

cimport cython
from libc.stdlib cimport free, malloc


def free_ball_words(int k, int n, long long cap):
    """All reduced words of length <= n in F_k, length-lex ordered."""
    if k < 1:
        raise ValueError(f"free rank must be >= 1, got {k}")
    if n < 0:
        raise ValueError(f"radius must be >= 0, got {n}")
    cdef list letters = []
    cdef int i
    for i in range(1, k + 1):
        letters.append(i)
        letters.append(-i)
    cdef list words = [()]
    cdef long long total = 1
    if total > cap:
        raise ResourceCapError(f"ball of F_{k} at radius {n} exceeds cap {cap}")
    cdef list frontier = [()]
    cdef list nxt
    cdef tuple w
    cdef int last, v, depth
    for depth in range(n):
        nxt = []
        for w in frontier:
            last = w[len(w) - 1] if len(w) else 0
            for v in letters:
                if v == -last:
                    continue
                total += 1
                if total > cap:
                    raise ResourceCapError(
                        f"ball of F_{k} at radius {n} exceeds cap {cap}"
                    )
                nxt.append(w + (v,))
        words.extend(nxt)
        frontier = nxt
    return words


@cython.cdivision(True)
def free_t_count(int k, tuple t, int n, long long cap):
    """|{h in B_n : len(t h) <= n}| by exhaustive enumeration of B_n.

    Iterative depth-first walk over the reduced-word tree, tracking how many
    leading letters of h cancel against the tail of t.
    """
    if k < 1:
        raise ValueError(f"free rank must be >= 1, got {k}")
    if n < 0:
        raise ValueError(f"radius must be >= 0, got {n}")
    cdef int ell = len(t)
    cdef int m2 = 2 * k
    cdef int i
    cdef int *letters = <int *> malloc(m2 * sizeof(int))
    cdef int *tail = <int *> malloc((ell if ell else 1) * sizeof(int))
    # explicit stack: at most m2 pending frames per level
    cdef long long stack_cap = (<long long> n + 1) * m2 + 2
    cdef int *st_last = <int *> malloc(stack_cap * sizeof(int))
    cdef int *st_depth = <int *> malloc(stack_cap * sizeof(int))
    cdef int *st_match = <int *> malloc(stack_cap * sizeof(int))
    cdef char *st_flag = <char *> malloc(stack_cap * sizeof(char))
    if not letters or not tail or not st_last or not st_depth or not st_match or not st_flag:
        free(letters); free(tail); free(st_last); free(st_depth)
        free(st_match); free(st_flag)
        raise MemoryError()
    for i in range(k):
        letters[2 * i] = i + 1
        letters[2 * i + 1] = -(i + 1)
    for i in range(ell):
        tail[i] = -(<int> t[ell - 1 - i])

    cdef long long count = 0
    cdef long long visited = 0
    cdef long long sp = 0
    cdef int last, depth, matched, v, j
    cdef char matching
    cdef long long cap_hit = 0

    st_last[0] = 0
    st_depth[0] = 0
    st_match[0] = 0
    st_flag[0] = 1
    sp = 1
    while sp > 0:
        sp -= 1
        last = st_last[sp]
        depth = st_depth[sp]
        matched = st_match[sp]
        matching = st_flag[sp]
        visited += 1
        if visited > cap:
            cap_hit = 1
            break
        if ell + depth - 2 * matched <= n:
            count += 1
        if depth == n:
            continue
        for j in range(m2 - 1, -1, -1):
            v = letters[j]
            if v == -last:
                continue
            st_last[sp] = v
            st_depth[sp] = depth + 1
            if matching and depth < ell and v == tail[depth]:
                st_match[sp] = matched + 1
                st_flag[sp] = 1
            else:
                st_match[sp] = matched
                st_flag[sp] = 0
            sp += 1

    free(letters)
    free(tail)
    free(st_last)
    free(st_depth)
    free(st_match)
    free(st_flag)
    if cap_hit:
        raise ResourceCapError(f"ball of F_{k} at radius {n} exceeds cap {cap}")
    return count
