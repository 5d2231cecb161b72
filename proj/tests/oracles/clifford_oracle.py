"""Independent reference values for the Clifford algebra tests.

The product is built only from e^a e^b + e^b e^a = 2 g^{ab} and
associativity (right absorption of one covector at a time); the Hodge star
from its determinant formula. Run to regenerate the frozen constants used in
tests/test_clifford_core.cpp.
"""
import itertools

import numpy as np

MASKS = [0] + [1 << i for i in range(4)]
MASKS += [(1 << a) | (1 << b) for a, b in itertools.combinations(range(4), 2)]
MASKS += [(1 << a) | (1 << b) | (1 << c) for a, b, c in itertools.combinations(range(4), 3)]
MASKS += [15]
INDEX = {m: i for i, m in enumerate(MASKS)}


def bits(m):
    return [i for i in range(4) if m >> i & 1]


def perm_sign(seq):
    s = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
            elif seq[i] == seq[j]:
                return 0
    return s


def e(*ix):
    out = np.zeros(16)
    s = perm_sign(list(ix))
    if s:
        m = 0
        for i in ix:
            m |= 1 << i
        out[INDEX[m]] = s
    return out


def wedge(u, v):
    out = np.zeros(16)
    for i, a in enumerate(MASKS):
        for j, b in enumerate(MASKS):
            if u[i] and v[j] and not a & b:
                out[INDEX[a | b]] += perm_sign(bits(a) + bits(b)) * u[i] * v[j]
    return out


def hodge(u, g):
    gi = np.linalg.inv(g)
    root = np.sqrt(-np.linalg.det(g))
    out = np.zeros(16)
    for A in MASKS:
        a = bits(A)
        up = 0.0
        for j, B in enumerate(MASKS):
            if len(bits(B)) == len(a) and u[j]:
                up += (np.linalg.det(gi[np.ix_(a, bits(B))]) if a else 1.0) * u[j]
        c = 15 ^ A
        out[INDEX[c]] += root * perm_sign(a + bits(c)) * up
    return out


def times_covector(x, v, gi):
    # X e^v = X ^ e^v + (X right-contracted with e^v)
    out = wedge(x, e(v))
    for i, m in enumerate(MASKS):
        b = bits(m)
        for p, w in enumerate(b):
            if x[i] and gi[w, v]:
                out[INDEX[m & ~(1 << w)]] += (-1) ** (len(b) - 1 - p) * gi[w, v] * x[i]
    return out


def times_blade(u, mask, gi):
    if mask == 0:
        return u.copy()
    b = bits(mask)
    rest = mask & ~(1 << b[0])
    first = times_blade(times_covector(u, b[0], gi), rest, gi)
    for j, w in enumerate(bits(rest)):
        if gi[b[0], w]:
            first -= (-1) ** j * gi[b[0], w] * times_blade(u, rest & ~(1 << w), gi)
    return first


def product(u, v, g):
    gi = np.linalg.inv(g)
    out = np.zeros(16)
    for j, m in enumerate(MASKS):
        if v[j]:
            out += v[j] * times_blade(u, m, gi)
    return out


G = np.array([[1.2, 0.1, 0.05, 0.0],
              [0.1, -0.9, 0.2, 0.0],
              [0.05, 0.2, -1.1, 0.1],
              [0.0, 0.0, 0.1, -1.0]])
U = np.array([0.5 - 0.1 * i if i % 2 else 0.2 * i - 0.7 for i in range(16)])
V = np.array([np.sin(i + 1.0) for i in range(16)])


def show(name, x):
    print(f"{name} = {{" + ", ".join(f"{c:.17g}" for c in x) + "}")


if __name__ == "__main__":
    np.set_printoptions(precision=17)
    show("U", U)
    show("V", V)
    show("UV", product(U, V, G))
    show("starU", hodge(U, G))
    show("eta_e01_e12", product(e(0, 1), e(1, 2), np.diag([1.0, -1, -1, -1])))
