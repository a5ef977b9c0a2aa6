# cython: boundscheck=False, wraparound=False
"""Compiled edit-distance kernels.

Same contracts as weft._kernels_py; selected by weft.kernels at import.
"""

from libc.stdlib cimport free, malloc


def levenshtein(str a, str b):
    """Edit distance between two strings (insert/delete/substitute, unit cost)."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef Py_ssize_t i, j, cost, ins, dele, sub, best, result
    cdef Py_UCS4 ca
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef Py_ssize_t *prev = <Py_ssize_t *> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *cur = <Py_ssize_t *> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *swap
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()
    for j in range(lb + 1):
        prev[j] = j
    for i in range(1, la + 1):
        cur[0] = i
        ca = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ca == <Py_UCS4> b[j - 1] else 1
            ins = cur[j - 1] + 1
            dele = prev[j] + 1
            sub = prev[j - 1] + cost
            best = ins if ins < dele else dele
            cur[j] = best if best < sub else sub
        swap = prev
        prev = cur
        cur = swap
    result = prev[lb]
    free(prev)
    free(cur)
    return result


def levenshtein_seq(a, b):
    """Edit distance between two token sequences, tokens compared by equality."""
    # Map tokens to small ints so the DP loop compares C integers.
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef dict codes = {}
    cdef Py_ssize_t i, j, cost, ins, dele, sub, best, result
    cdef Py_ssize_t *ids = <Py_ssize_t *> malloc((la + lb) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *prev = <Py_ssize_t *> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *cur = <Py_ssize_t *> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *swap
    if ids == NULL or prev == NULL or cur == NULL:
        free(ids)
        free(prev)
        free(cur)
        raise MemoryError()
    try:
        for i in range(la):
            ids[i] = codes.setdefault(a[i], len(codes))
        for j in range(lb):
            ids[la + j] = codes.setdefault(b[j], len(codes))
    except BaseException:
        free(ids)
        free(prev)
        free(cur)
        raise
    for j in range(lb + 1):
        prev[j] = j
    for i in range(1, la + 1):
        cur[0] = i
        for j in range(1, lb + 1):
            cost = 0 if ids[i - 1] == ids[la + j - 1] else 1
            ins = cur[j - 1] + 1
            dele = prev[j] + 1
            sub = prev[j - 1] + cost
            best = ins if ins < dele else dele
            cur[j] = best if best < sub else sub
        swap = prev
        prev = cur
        cur = swap
    result = prev[lb]
    free(ids)
    free(prev)
    free(cur)
    return result


def common_prefix_len(a, b):
    """Number of equal leading tokens of two sequences."""
    cdef Py_ssize_t n = min(len(a), len(b))
    cdef Py_ssize_t i
    for i in range(n):
        if a[i] != b[i]:
            return i
    return n
