"""Slow, independent reference computations in plain Python loops.

None of these call into rbfcka; tests compare the library against them.
"""

import math


def distances(rows):
    n = len(rows)
    return [
        [math.sqrt(sum((a - b) ** 2 for a, b in zip(rows[i], rows[j]))) for j in range(n)]
        for i in range(n)
    ]


def median(values):
    v = sorted(values)
    m = len(v)
    return v[m // 2] if m % 2 else 0.5 * (v[m // 2 - 1] + v[m // 2])


def off_diagonal_median(dist):
    n = len(dist)
    return median([dist[i][j] for i in range(n) for j in range(n) if i != j])


def linear_gram(rows):
    return [[sum(a * b for a, b in zip(r, s)) for s in rows] for r in rows]


def euclidean_gram(rows):
    return [[sum((a - b) ** 2 for a, b in zip(r, s)) for s in rows] for r in rows]


def gaussian_gram(rows, sigma):
    dist = distances(rows)
    w = off_diagonal_median(dist) * sigma
    return [[math.exp(-(d * d) / (2 * w * w)) for d in row] for row in dist]


def center(k, mode):
    n = len(k)
    if mode == "none":
        return [row[:] for row in k]
    if mode == "column":
        means = [sum(k[i][j] for i in range(n)) / n for j in range(n)]
        return [[k[i][j] - means[j] for j in range(n)] for i in range(n)]
    if mode == "row":
        means = [sum(k[i]) / n for i in range(n)]
        return [[k[i][j] - means[i] for j in range(n)] for i in range(n)]
    if mode == "double":
        return center(center(k, "column"), "row")
    raise ValueError(mode)


def trace_product(a, b):
    n = len(a)
    return sum(a[i][j] * b[j][i] for i in range(n) for j in range(n))


def hsic(k, l, mode="column"):
    n = len(k)
    return trace_product(center(k, mode), center(l, mode)) / (n - 1) ** 2


def cka(k, l, mode="column"):
    return hsic(k, l, mode) / math.sqrt(hsic(k, k, mode) * hsic(l, l, mode))


def centered_features(rows):
    n, d = len(rows), len(rows[0])
    means = [sum(r[c] for r in rows) / n for c in range(d)]
    return [[r[c] - means[c] for c in range(d)] for r in rows]


def frobenius_cross(x, y):
    """||Y^T X||_F^2 for row-major lists."""
    dx, dy = len(x[0]), len(y[0])
    total = 0.0
    for a in range(dy):
        for b in range(dx):
            s = sum(y[i][a] * x[i][b] for i in range(len(x)))
            total += s * s
    return total


def linear_cka_features(x, y):
    """Linear CKA from explicitly centered features."""
    xc, yc = centered_features(x), centered_features(y)
    return frobenius_cross(xc, yc) / math.sqrt(frobenius_cross(xc, xc) * frobenius_cross(yc, yc))


def ols_slope(xs, ys):
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    return sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / sum((a - mx) ** 2 for a in xs)
