# cython: boundscheck=False, wraparound=False
"""Compiled sequence kernels: edit distance and longest common subsequence.

Operates on int32 buffers (array('i') or anything exposing the buffer
protocol). ocrkit.kernels handles the str/token encoding and falls back to
ocrkit._editpure when this module is not built.
"""

from libc.stdlib cimport free, malloc


cdef int *_alloc(Py_ssize_t count) except NULL:
    cdef int *buf = <int *> malloc(count * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    return buf


def edit_distance(const int[:] a, const int[:] b):
    """Minimum number of single-element insertions, deletions and
    substitutions turning ``a`` into ``b``."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    cdef int *prev = _alloc(m + 1)
    cdef int *curr
    cdef int *tmp
    cdef Py_ssize_t i, j
    cdef int best, cand, result
    try:
        curr = _alloc(m + 1)
    except MemoryError:
        free(prev)
        raise
    try:
        for j in range(m + 1):
            prev[j] = <int> j
        for i in range(1, n + 1):
            curr[0] = <int> i
            for j in range(1, m + 1):
                best = prev[j - 1]
                if a[i - 1] != b[j - 1]:
                    best += 1
                cand = prev[j] + 1
                if cand < best:
                    best = cand
                cand = curr[j - 1] + 1
                if cand < best:
                    best = cand
                curr[j] = best
            tmp = prev
            prev = curr
            curr = tmp
        result = prev[m]
    finally:
        free(prev)
        free(curr)
    return result


def lcs_length(const int[:] a, const int[:] b):
    """Length of the longest common subsequence of ``a`` and ``b``."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0 or m == 0:
        return 0
    cdef int *prev = _alloc(m + 1)
    cdef int *curr
    cdef int *tmp
    cdef Py_ssize_t i, j
    cdef int result
    try:
        curr = _alloc(m + 1)
    except MemoryError:
        free(prev)
        raise
    try:
        for j in range(m + 1):
            prev[j] = 0
        for i in range(1, n + 1):
            curr[0] = 0
            for j in range(1, m + 1):
                if a[i - 1] == b[j - 1]:
                    curr[j] = prev[j - 1] + 1
                elif prev[j] >= curr[j - 1]:
                    curr[j] = prev[j]
                else:
                    curr[j] = curr[j - 1]
            tmp = prev
            prev = curr
            curr = tmp
        result = prev[m]
    finally:
        free(prev)
        free(curr)
    return result


def lcs_hit_positions(const int[:] a, const int[:] b):
    """Positions in ``a`` covered by one longest common subsequence of
    ``a`` and ``b``, ascending.

    The backtrack is deterministic: on a tie it steps along ``a``, so both
    kernel backends mark the same positions.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0 or m == 0:
        return []
    cdef Py_ssize_t width = m + 1
    cdef int *table = _alloc((n + 1) * width)
    cdef Py_ssize_t i, j
    hits = []
    try:
        for j in range(width):
            table[j] = 0
        for i in range(1, n + 1):
            table[i * width] = 0
            for j in range(1, m + 1):
                if a[i - 1] == b[j - 1]:
                    table[i * width + j] = table[(i - 1) * width + j - 1] + 1
                elif table[(i - 1) * width + j] >= table[i * width + j - 1]:
                    table[i * width + j] = table[(i - 1) * width + j]
                else:
                    table[i * width + j] = table[i * width + j - 1]
        i = n
        j = m
        while i > 0 and j > 0:
            if a[i - 1] == b[j - 1]:
                hits.append(i - 1)
                i -= 1
                j -= 1
            elif table[i * width + j - 1] > table[(i - 1) * width + j]:
                j -= 1
            else:
                i -= 1
    finally:
        free(table)
    hits.reverse()
    return hits
