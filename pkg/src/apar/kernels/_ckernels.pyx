# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Matrices are packed buffers of native int64.  All arithmetic runs on
uint64_t so overflow wraps with defined behaviour, and every loop releases
the GIL so worker threads compute in parallel.
"""
from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_FromStringAndSize
from libc.stdint cimport int64_t, uint64_t
from libc.string cimport memset

NAME = "cython"


cdef inline uint64_t _next(uint64_t* state) noexcept nogil:
    state[0] += 0x9E3779B97F4A7C15ULL
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def splitmix64_next(uint64_t state):
    cdef uint64_t out = _next(&state)
    return state, out


def gen_matrix(uint64_t seed, Py_ssize_t rows, Py_ssize_t cols):
    cdef Py_ssize_t n = rows * cols, i
    cdef bytes result = PyBytes_FromStringAndSize(NULL, n * 8)
    cdef int64_t* cells = <int64_t*> PyBytes_AS_STRING(result)
    cdef uint64_t state = seed
    with nogil:
        for i in range(n):
            cells[i] = <int64_t> (_next(&state) % 201) - 100
    return result


def mat_mul(const unsigned char[::1] a, Py_ssize_t a_rows, Py_ssize_t a_cols,
            const unsigned char[::1] b, Py_ssize_t b_cols):
    cdef bytes result = PyBytes_FromStringAndSize(NULL, a_rows * b_cols * 8)
    cdef uint64_t* out = <uint64_t*> PyBytes_AS_STRING(result)
    cdef const uint64_t* pa = <const uint64_t*> &a[0]
    cdef const uint64_t* pb = <const uint64_t*> &b[0]
    cdef Py_ssize_t i, p, j
    cdef uint64_t s
    cdef uint64_t* orow
    cdef const uint64_t* brow
    with nogil:
        memset(out, 0, a_rows * b_cols * 8)
        # i-p-j order streams rows of b contiguously.
        for i in range(a_rows):
            orow = out + i * b_cols
            for p in range(a_cols):
                s = pa[i * a_cols + p]
                brow = pb + p * b_cols
                for j in range(b_cols):
                    orow[j] += s * brow[j]
    return result


def checksum(const unsigned char[::1] data):
    cdef const uint64_t* cells = <const uint64_t*> &data[0]
    cdef Py_ssize_t n = data.shape[0] // 8, i
    cdef uint64_t total = 0
    with nogil:
        for i in range(n):
            total += cells[i]
    return <int64_t> total
