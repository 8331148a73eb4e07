"""Independent reference values, computed without the package under test."""

from fractions import Fraction

import numpy as np


def nk(k):
    n = 1
    for _ in range(k - 1):
        n = 3 * n + 2 * n * n
    return n


def ex1_log2_weight(i):
    """Exact log2 of the Example-1 weight w_i, straight from its definition."""
    if i == 1:
        return Fraction(0)
    k = 1
    while True:
        a, b = nk(k), nk(k + 1)
        if a < i <= 3 * a:
            return Fraction(-1)
        if 3 * a < i <= b:
            return Fraction(1, a)
        k += 1


def ex1_log2_product(i, j):
    """log2(w_i ... w_j), exact; empty product for j < i."""
    return sum((ex1_log2_weight(t) for t in range(i, j + 1)), Fraction(0))


def ex3_closed_norm_sq(m, blocks):
    """||x_m||^2 = sum_n n^-(1 + 2/m) for the joint-minimal Example-3 chain."""
    n = np.arange(1, blocks + 1, dtype=float)
    return float(np.sum(n ** -(1 + 2 / m)))


def ex3_weight_product(n, m):
    """w_1 ... w_m for block n by direct multiplication (w_1 = w_2 = 1)."""
    out = 1.0
    for i in range(3, m + 1):
        out *= (1.0 / n) ** (1.0 / (i - 1) - 1.0 / i)
    return out


def volterra_midpoint(m):
    """V_M with V + V* = P exactly: strict lower triangle 1/M, diagonal 1/(2M)."""
    h = 1.0 / m
    return np.tril(np.full((m, m), h), -1) + np.eye(m) * (h / 2)
