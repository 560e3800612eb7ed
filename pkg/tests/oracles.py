"""Brute-force reference computations used only by the tests.

Everything here works on nested lists of ``fractions.Fraction`` with explicit
loops, sharing no code with the package.
"""

from fractions import Fraction


def frac_tensor(arr):
    """Nested lists of Fractions from an exact or integer numpy array."""
    if getattr(arr, "ndim", 0) == 0:
        return Fraction(int(arr.numerator), int(arr.denominator)) if hasattr(arr, "numerator") else Fraction(arr)
    return [frac_tensor(a) for a in arr]


def mat_inverse(m):
    n = len(m)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def koszul(c, g):
    """Gamma[k][i][j]: component k of nabla_{x_i} x_j, one triple at a time."""
    n = len(g)

    def inner_bracket(i, j, l):  # <[x_i, x_j], x_l>
        return sum(c[k][i][j] * g[k][l] for k in range(n))

    ginv = mat_inverse(g)
    low = [[[Fraction(1, 2) * (inner_bracket(i, j, l) - inner_bracket(j, l, i) + inner_bracket(l, i, j))
             for l in range(n)] for j in range(n)] for i in range(n)]
    return [[[sum(ginv[k][l] * low[i][j][l] for l in range(n)) for j in range(n)] for i in range(n)]
            for k in range(n)]


def curvature(c, gamma):
    """R[l][i][j][k]: component l of R(x_i, x_j) x_k."""
    n = len(c)

    def nabla(i, v):  # nabla_{x_i} of the vector v (constant coefficients)
        return [sum(gamma[l][i][a] * v[a] for a in range(n)) for l in range(n)]

    def nabla_vec(u, v):
        out = [Fraction(0)] * n
        for i in range(n):
            if u[i]:
                w = nabla(i, v)
                out = [o + u[i] * x for o, x in zip(out, w)]
        return out

    R = [[[[Fraction(0)] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            br = [c[m][i][j] for m in range(n)]
            for k in range(n):
                ek = [Fraction(int(a == k)) for a in range(n)]
                t1 = nabla(i, nabla(j, ek))
                t2 = nabla(j, nabla(i, ek))
                t3 = nabla_vec(br, ek)
                for l in range(n):
                    R[l][i][j][k] = t1[l] - t2[l] - t3[l]
    return R


def sectional_numerators(R, g):
    """<R(x_i, x_j) x_j, x_i> for all i < j."""
    n = len(g)
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            out[(i, j)] = sum(R[l][i][j][j] * g[l][i] for l in range(n))
    return out


def bracket_vec(c, u, v):
    n = len(c)
    return [sum(c[k][i][j] * u[i] * v[j] for i in range(n) for j in range(n)) for k in range(n)]


def apply(m, v):
    return [sum(m[a][b] * v[b] for b in range(len(v))) for a in range(len(m))]


def nijenhuis(c, J, i, j):
    """[x,y] - [Jx,Jy] + J[Jx,y] + J[x,Jy] for x = x_i, y = x_j."""
    n = len(c)
    x = [Fraction(int(a == i)) for a in range(n)]
    y = [Fraction(int(a == j)) for a in range(n)]
    Jx, Jy = apply(J, x), apply(J, y)
    t = [a - b for a, b in zip(bracket_vec(c, x, y), bracket_vec(c, Jx, Jy))]
    u = apply(J, [a + b for a, b in zip(bracket_vec(c, Jx, y), bracket_vec(c, x, Jy))])
    return [a + b for a, b in zip(t, u)]


def jacobi_max(c):
    n = len(c)
    best = Fraction(0)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                e = [[Fraction(int(a == b)) for a in range(n)] for b in range(n)]
                s1 = bracket_vec(c, bracket_vec(c, e[i], e[j]), e[k])
                s2 = bracket_vec(c, bracket_vec(c, e[j], e[k]), e[i])
                s3 = bracket_vec(c, bracket_vec(c, e[k], e[i]), e[j])
                best = max(best, max(abs(a + b + d) for a, b, d in zip(s1, s2, s3)))
    return best
