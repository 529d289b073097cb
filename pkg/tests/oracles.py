"""Independent oracles used to cross-check the library's computations.

These are deliberately naive: Laplace determinants, Fraction-based row
reduction, exhaustive enumeration.  None of them share code with the
Smith-normal-form path they verify.
"""

from fractions import Fraction
from itertools import combinations, product
from math import gcd


def naive_det(rows):
    """Determinant by Laplace expansion along the first row."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j, a in enumerate(rows[0]):
        if a == 0:
            continue
        minor = [[r[col] for col in range(n) if col != j] for r in rows[1:]]
        total += (-1) ** j * a * naive_det(minor)
    return total


def determinantal_divisors(rows, ncols):
    """Expected Smith diagonal from gcds of k x k minors.

    d_k = G_k / G_{k-1} where G_k is the gcd of all k x k minors; the list
    stops at the first k with G_k = 0.
    """
    nrows = len(rows)
    limit = min(nrows, ncols)
    divisors = []
    prev = 1
    for k in range(1, limit + 1):
        g = 0
        for rsel in combinations(range(nrows), k):
            for csel in combinations(range(ncols), k):
                sub = [[rows[i][j] for j in csel] for i in rsel]
                g = gcd(g, naive_det(sub))
                if g == prev:
                    break
            if g == prev:
                break  # G_{k-1} divides G_k, so the gcd can sink no further
        if g == 0:
            break
        divisors.append(g // prev)
        prev = g
    divisors += [0] * (limit - len(divisors))
    return divisors


def rational_rank(rows, ncols):
    """Rank over Q by plain Gaussian elimination with Fractions."""
    m = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    col = 0
    nrows = len(m)
    while rank < nrows and col < ncols:
        piv = next((i for i in range(rank, nrows) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        m[rank] = [x / pv for x in m[rank]]
        for i in range(nrows):
            if i != rank and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def hom_count_cyclic(a, b):
    """|Hom(Z/a, Z/b)| by enumerating generator images (a=0 means Z)."""
    if a == 0:
        return 0 if b == 0 else b  # infinite target handled by caller
    if b == 0:
        return 1  # only the zero map
    return sum(1 for x in range(b) if (a * x) % b == 0)


def enumerate_kernel(order_list, matrix_rows):
    """All coordinate tuples killed by an integer matrix acting on a finite
    direct sum of cyclic groups Z/order (order >= 1)."""
    out = []
    for coords in product(*[range(o) for o in order_list]):
        img = [sum(m * c for m, c in zip(row, coords)) for row in matrix_rows]
        if all(v % o == 0 for v, o in zip(img, order_list)):
            out.append(coords)
    return out


def random_well_defined_matrix(rng, src_invariants, tgt_invariants):
    """A matrix that is a well-defined hom between canonical-form groups.

    src_invariants/tgt_invariants are (free_rank, torsion) pairs; column i
    of the result sends source generator i somewhere legal: entries into a
    free target row vanish for torsion sources, entries into a Z/b row are
    multiples of b // gcd(a, b).
    """
    fr_s, tor_s = src_invariants
    fr_t, tor_t = tgt_invariants
    a_orders = [0] * fr_s + list(tor_s)
    b_orders = [0] * fr_t + list(tor_t)
    rows = []
    for bj in b_orders:
        row = []
        for ai in a_orders:
            if bj == 0:
                row.append(rng.randint(-5, 5) if ai == 0 else 0)
            else:
                step = bj // gcd(ai, bj) if ai else 1
                row.append(step * rng.randint(-5, 5))
        rows.append(row)
    return rows


def pointwise_restriction(sub, sup, coords):
    """Restrict a function on sup (given by coordinates) to sub."""
    lookup = dict(zip(sup, coords))
    return [lookup[x] for x in sub]


def pointwise_extension(sub, sup, coords):
    lookup = dict(zip(sub, coords))
    return [lookup.get(x, 0) for x in sup]


def pointwise_product(coords_a, coords_b):
    return [x * y for x, y in zip(coords_a, coords_b)]
