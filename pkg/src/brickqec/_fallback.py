"""Pure-Python / numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` module. These also
serve exact arithmetic: :func:`gate_transfer` works on ``object`` arrays of
:class:`fractions.Fraction`.
"""
import numpy as np

_ONE = np.uint64(1)


def gate_transfer(v, n, x, y, factor):
    """Apply one gate's transfer step to a ``2**n`` weight vector, in place.

    Masks with unequal bits at ``x`` and ``y`` are emptied; each of the two
    equal-bit masks that agree with them elsewhere receives ``factor`` times
    their combined weight.
    """
    view = np.moveaxis(v.reshape((2,) * n), (n - 1 - x, n - 1 - y), (0, 1))
    moved = view[0, 1] + view[1, 0]
    view[0, 0] += factor * moved
    view[1, 1] += factor * moved
    view[0, 1] = 0
    view[1, 0] = 0


def apply_local_table(xs, zs, phases, qa, qb, table_image, table_phase):
    """Conjugate every tableau row by a 2-qubit gate on ``(qa, qb)``, in place."""
    ua, ub = np.uint64(qa), np.uint64(qb)
    local = (
        ((xs >> ua) & _ONE)
        | (((xs >> ub) & _ONE) << _ONE)
        | (((zs >> ua) & _ONE) << np.uint64(2))
        | (((zs >> ub) & _ONE) << np.uint64(3))
    ).astype(np.intp)
    out = table_image[local].astype(np.uint64)
    phases += table_phase[local]
    phases %= 4
    keep = ~((_ONE << ua) | (_ONE << ub))
    xs &= keep
    zs &= keep
    xs |= ((out & _ONE) << ua) | (((out >> _ONE) & _ONE) << ub)
    zs |= (((out >> np.uint64(2)) & _ONE) << ua) | (((out >> np.uint64(3)) & _ONE) << ub)


def _walls(mask, n):
    rot = (mask >> 1) | ((mask & 1) << (n - 1))
    return bin(mask ^ rot).count("1")


def enumerate_counts(n, gate_x, gate_y, init_masks):
    """Depth-first walk over every configuration trajectory.

    Returns int64 counts of shape ``(s + 1, n + 1, n + 1)`` indexed by
    (number of branching gates, final popcount, final domain-wall count).
    Every trajectory with ``j`` branchings carries weight ``(2/5)**j``.
    """
    gate_x = [int(g) for g in gate_x]
    gate_y = [int(g) for g in gate_y]
    s = len(gate_x)
    counts = np.zeros((s + 1, n + 1, n + 1), dtype=np.int64)
    for start in init_masks:
        stack = [(0, int(start), 0)]
        while stack:
            t, mask, j = stack.pop()
            while t < s:
                bx = (mask >> gate_x[t]) & 1
                by = (mask >> gate_y[t]) & 1
                if bx != by:
                    both = (1 << gate_x[t]) | (1 << gate_y[t])
                    stack.append((t + 1, mask | both, j + 1))
                    mask &= ~both
                    j += 1
                t += 1
            counts[j, bin(mask).count("1"), _walls(mask, n)] += 1
    return counts
