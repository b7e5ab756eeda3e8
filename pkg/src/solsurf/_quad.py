"""Gauss-Legendre quadrature helpers shared by the integrators.

Includes the spectral antiderivative matrix: given values of f at the
n Legendre nodes on [-1, 1], S @ f approximates int_{-1}^{x_m} f for
every node x_m, exactly whenever f is a polynomial of degree < n.  That
is what makes iterated (Picard) integrals affordable: each level is one
matrix product instead of a nested quadrature.
"""

import numpy as np

__all__ = ["QuadratureFailure", "gl_nodes", "integration_matrix", "adaptive_gl"]


class QuadratureFailure(ArithmeticError):
    """Adaptive quadrature exhausted its depth without meeting tolerance."""


_NODE_CACHE = {}
_MATRIX_CACHE = {}


def gl_nodes(n):
    """Gauss-Legendre nodes and weights on [-1, 1], cached."""
    if n not in _NODE_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _NODE_CACHE[n] = (x, w)
    return _NODE_CACHE[n]


def _legendre_values(nmax, x):
    # P[i, m] = P_i(x_m) for i = 0..nmax by the three-term recurrence
    p = np.empty((nmax + 1, x.size))
    p[0] = 1.0
    if nmax >= 1:
        p[1] = x
    for i in range(1, nmax):
        p[i + 1] = ((2 * i + 1) * x * p[i] - i * p[i - 1]) / (i + 1)
    return p


def integration_matrix(n):
    """(nodes, weights, S) with S[m, j] the antiderivative-from--1 weights.

    Built by expanding the node interpolant in Legendre polynomials and
    integrating term by term: int P_i = (P_{i+1} - P_{i-1})/(2i+1) for
    i >= 1 and int P_0 = P_1 + P_0, all vanishing at x = -1.
    """
    if n in _MATRIX_CACHE:
        return _MATRIX_CACHE[n]
    x, w = gl_nodes(n)
    p = _legendre_values(n, x)
    # coefficient extraction: c_i = (2i+1)/2 sum_m w_m P_i(x_m) f_m
    coef = ((2.0 * np.arange(n) + 1.0) / 2.0)[:, None] * p[:n] * w[None, :]
    anti = np.empty((n, n))
    anti[0] = p[1] + 1.0
    for i in range(1, n):
        anti[i] = (p[i + 1] - p[i - 1]) / (2 * i + 1)
    s = anti.T @ coef
    _MATRIX_CACHE[n] = (x, w, s)
    return _MATRIX_CACHE[n]


def _gl_segment(f, a, b, x, w):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    total = None
    for xm, wm in zip(x, w):
        v = wm * np.asarray(f(mid + half * xm), dtype=complex)
        total = v if total is None else total + v
    return half * total


def adaptive_gl(f, a, b, tol=1e-10, max_depth=24, n=15):
    """Integral of f along the straight segment a -> b, adaptively bisected.

    f may return a complex scalar or an ndarray.  The error indicator is
    the difference between the n-point rule on a segment and the summed
    rule on its halves; segments are split until it falls below the
    (absolute) tolerance share.
    """
    x, w = gl_nodes(n)

    def rec(a, b, tol, depth):
        whole = _gl_segment(f, a, b, x, w)
        m = 0.5 * (a + b)
        left = _gl_segment(f, a, m, x, w)
        right = _gl_segment(f, m, b, x, w)
        fine = left + right
        if not np.all(np.isfinite(fine)):
            raise QuadratureFailure("non-finite integrand on segment %r -> %r" % (a, b))
        err = float(np.max(np.abs(fine - whole)))
        if err <= tol:
            return fine
        if depth <= 0:
            raise QuadratureFailure("segment %r -> %r: error %.3e above tol %.3e"
                                    % (a, b, err, tol))
        return rec(a, m, 0.5 * tol, depth - 1) + rec(m, b, 0.5 * tol, depth - 1)

    if a == b:
        probe = np.asarray(f(a), dtype=complex)
        return probe * 0.0
    return rec(complex(a), complex(b), tol, max_depth)
