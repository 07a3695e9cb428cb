"""Permutations as 0-based tuples; ``p[i]`` is the image of i.

Products compose right to left: ``compose(s, t)[i] == s[t[i]]``.
"""

from functools import lru_cache
from itertools import permutations


def identity(n):
    return tuple(range(n))


def compose(s, t):
    return tuple(s[i] for i in t)


def inverse(s):
    out = [0] * len(s)
    for i, j in enumerate(s):
        out[j] = i
    return tuple(out)


def adjacent(a, n):
    """The transposition swapping a and a+1 (0-based)."""
    p = list(range(n))
    p[a], p[a + 1] = p[a + 1], p[a]
    return tuple(p)


@lru_cache(maxsize=None)
def word(s):
    """Indices a_1..a_k with s = s_{a_1} o ... o s_{a_k} (adjacent transpositions)."""
    p = list(s)
    swaps = []
    # right-multiplying by s_a swaps entries a, a+1 of the tuple
    changed = True
    while changed:
        changed = False
        for a in range(len(p) - 1):
            if p[a] > p[a + 1]:
                p[a], p[a + 1] = p[a + 1], p[a]
                swaps.append(a)
                changed = True
    return tuple(reversed(swaps))


def all_perms(n):
    return [tuple(p) for p in permutations(range(n))]


def block(s, sizes):
    """Move block i (of length sizes[i]) to slot s[i], keeping the inside order."""
    n = len(s)
    new_sizes = [0] * n
    for i in range(n):
        new_sizes[s[i]] = sizes[i]
    starts, acc = [], 0
    for k in new_sizes:
        starts.append(acc)
        acc += k
    out = []
    for i in range(n):
        base = starts[s[i]]
        out.extend(base + j for j in range(sizes[i]))
    return tuple(out)


def insert(n, i, t):
    """Permutation of arity n+len(t)-1 acting as t on the block starting at slot i."""
    m = len(t)
    out = []
    for k in range(n):
        if k < i:
            out.append(k)
        elif k == i:
            out.extend(i + x for x in t)
        else:
            out.append(k + m - 1)
    return tuple(out)


def sign_of(s):
    inv = sum(1 for i in range(len(s)) for j in range(i + 1, len(s)) if s[i] > s[j])
    return -1 if inv % 2 else 1
