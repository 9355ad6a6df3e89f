"""Catalogue of standard first-order operators used as regression cases."""

import numpy as np

from .symbol import Operator


def gradient(n: int) -> Operator:
    """Scalar fields to R^n: ``A_i = e_i`` as a column."""
    coeffs = np.zeros((n, n, 1))
    for i in range(n):
        coeffs[i, i, 0] = 1.0
    return Operator(coeffs, name=f"grad_R{n}")


def divergence(n: int) -> Operator:
    coeffs = np.zeros((n, 1, n))
    for i in range(n):
        coeffs[i, 0, i] = 1.0
    return Operator(coeffs, name=f"div_R{n}")


def curl_2d() -> Operator:
    """Scalar rotation ``d1 v2 - d2 v1`` from R^2 to R."""
    return Operator.from_matrices([[[0.0, 1.0]], [[-1.0, 0.0]]], name="curl_R2")


def curl_3d() -> Operator:
    coeffs = np.zeros((3, 3, 3))
    for a in range(3):
        for i in range(3):
            for b in range(3):
                coeffs[i, a, b] = _levi_civita(a, i, b)
    return Operator(coeffs, name="curl_R3")


def cauchy_riemann() -> Operator:
    """``(d1 u1 - d2 u2, d2 u1 + d1 u2)``; invertible symbol off the origin."""
    return Operator.from_matrices([np.eye(2), [[0.0, -1.0], [1.0, 0.0]]], name="cauchy_riemann")


def symmetric_gradient_2d() -> Operator:
    """``u -> (d1 u1, d2 u1 + d1 u2, d2 u2)`` from R^2 to R^3.

    Constant rank 2 off the origin, yet no first-order ``Q`` completes it to an
    elliptic complex.
    """
    a1 = [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]
    a2 = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    return Operator.from_matrices([a1, a2], name="symmetric_gradient_R2")


def diagonal_2d() -> Operator:
    """Symbol ``diag(xi_1, xi_2)``: rank 2 off the axes, rank 1 on them."""
    return Operator.from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], name="diagonal_R2")


def zero(n: int, dim_u: int, dim_v: int) -> Operator:
    return Operator(np.zeros((n, dim_v, dim_u)), name="zero")


def _levi_civita(i, j, k):
    return float(np.linalg.det(np.eye(3)[[i, j, k]]).round()) + 0.0
