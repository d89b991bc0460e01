"""Pure-Python kernel backend, used when the compiled extension is absent."""
from array import array
from operator import mul

NAME = "python"

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64_next(state):
    state = (state + _GAMMA) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def gen_matrix(seed, rows, cols):
    state = seed & _MASK
    cells = array("q", bytes(8 * rows * cols))
    for i in range(rows * cols):
        state, out = splitmix64_next(state)
        cells[i] = out % 201 - 100
    return cells.tobytes()


def mat_mul(a, a_rows, a_cols, b, b_cols):
    av = memoryview(a).cast("q")
    bv = memoryview(b).cast("q")
    # Columns of b as tuples; the exact integer dot product is reduced once,
    # which equals step-by-step wrapping because reduction is a ring map.
    bcols = [tuple(bv[j::b_cols]) for j in range(b_cols)]
    out = array("Q", bytes(8 * a_rows * b_cols))
    k = 0
    for i in range(a_rows):
        row = tuple(av[i * a_cols:(i + 1) * a_cols])
        for col in bcols:
            out[k] = sum(map(mul, row, col)) & _MASK
            k += 1
    return out.tobytes()


def checksum(data):
    total = sum(memoryview(data).cast("q")) & _MASK
    return total - (1 << 64) if total >> 63 else total
