"""Shared numerical kernels: orthogonal polynomials, quadrature, basis change.

The quadrature entry points are deliberately small wrappers with explicit
failure modes: callers state a tolerance and get either a value that met it
or a :class:`QuadratureError`.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np
import scipy.integrate

__all__ = [
    "QuadratureError",
    "laguerre",
    "hermite",
    "hg_sample",
    "integrate_1d",
    "integrate_4d",
    "BasisChangeMatrix",
    "lg_hg_unitary",
]


class QuadratureError(RuntimeError):
    """A quadrature routine could not meet its tolerance within budget."""


def laguerre(p: int, alpha: float, x):
    """Generalized Laguerre polynomial L_p^alpha(x).

    Evaluated with the stable three-term recurrence

        (k+1) L_{k+1} = (2k + 1 + alpha - x) L_k - (k + alpha) L_{k-1}.

    Accepts scalar or ndarray ``x`` and broadcasts elementwise.
    """
    if p < 0:
        raise ValueError(f"degree must be >= 0, got {p}")
    xa = np.asarray(x, dtype=float)
    prev = np.zeros_like(xa)
    cur = np.ones_like(xa)
    for k in range(p):
        prev, cur = cur, ((2 * k + 1 + alpha - xa) * cur - (k + alpha) * prev) / (k + 1)
    if np.isscalar(x) or getattr(x, "ndim", None) == 0:
        return float(cur)
    return cur


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) via the three-term recurrence.

    H_{k+1} = 2 x H_k - 2 k H_{k-1}, H_0 = 1, H_1 = 2x.
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    xa = np.asarray(x, dtype=float)
    prev = np.zeros_like(xa)
    cur = np.ones_like(xa)
    for k in range(n):
        prev, cur = cur, 2.0 * xa * cur - 2.0 * k * prev
    if np.isscalar(x) or getattr(x, "ndim", None) == 0:
        return float(cur)
    return cur


def hg_sample(n: int, x):
    """Orthonormal 1-D Hermite-Gauss sample at unit scale.

    Returns H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi)), so that the
    squared samples integrate to 1 over the line.  The normalized
    recurrence

        psi_{k+1} = x sqrt(2/(k+1)) psi_k - sqrt(k/(k+1)) psi_{k-1}

    keeps every intermediate O(1), so the evaluation stays finite at
    orders where the bare polynomial would overflow.
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    xa = np.asarray(x, dtype=float)
    prev = np.zeros_like(xa)
    cur = np.pi ** -0.25 * np.exp(-0.5 * xa * xa)
    for k in range(n):
        prev, cur = cur, xa * math.sqrt(2.0 / (k + 1)) * cur - math.sqrt(
            k / (k + 1.0)
        ) * prev
    if np.isscalar(x) or getattr(x, "ndim", None) == 0:
        return float(cur)
    return cur


def integrate_1d(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-9,
    abs_tol: float = 0.0,
    budget: int = 200,
) -> float:
    """Adaptive 1-D quadrature of a real integrand over [a, b].

    Thin wrapper around QUADPACK's adaptive bisection with its embedded
    error estimate.  ``budget`` caps the number of subintervals; exceeding
    it (or any other convergence failure) raises :class:`QuadratureError`.
    """
    if not b >= a:
        raise ValueError(f"need b >= a, got [{a}, {b}]")
    if b == a:
        return 0.0
    out = scipy.integrate.quad(
        f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=budget, full_output=True
    )
    if len(out) > 3:
        raise QuadratureError(f"integrate_1d failed on [{a}, {b}]: {out[3]}")
    return out[0]


@functools.lru_cache(maxsize=64)
def _gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def gauss_legendre(a: float, b: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    nodes, weights = _gauss_legendre(order)
    half = 0.5 * (b - a)
    return a + half * (nodes + 1.0), half * weights


def _tensor_gl_4d(f, box, order: int) -> complex:
    axes = [gauss_legendre(a, b, order) for (a, b) in box]
    x1, w1 = axes[0]
    x2, w2 = axes[1]
    x3, w3 = axes[2]
    x4, w4 = axes[3]
    # Slab over the first axis so the working set stays at order^3 points.
    g2, g3, g4 = np.meshgrid(x2, x3, x4, indexing="ij")
    w234 = w2[:, None, None] * w3[None, :, None] * w4[None, None, :]
    total = 0.0 + 0.0j
    for i in range(order):
        vals = np.asarray(f(np.full_like(g2, x1[i]), g2, g3, g4))
        total += w1[i] * np.sum(vals * w234)
    return complex(total)


def integrate_4d(
    f,
    box: Sequence[Tuple[float, float]],
    order: int = 24,
    rel_tol: float = 1e-6,
    abs_floor: float = 0.0,
    max_doublings: int = 2,
) -> complex:
    """Tensor-product Gauss-Legendre cubature over a 4-D box.

    ``f`` must accept four equal-shape ndarrays and evaluate elementwise.
    The rule is applied at ``order`` points per axis and again at twice
    that; the result is accepted once doubling changes it by less than
    ``rel_tol`` relative (with ``abs_floor`` as a scale floor for
    near-zero integrals).  Raises :class:`QuadratureError` otherwise.
    """
    if len(box) != 4:
        raise ValueError("box must contain exactly four (lo, hi) intervals")
    coarse = _tensor_gl_4d(f, box, order)
    for _ in range(max_doublings):
        order *= 2
        fine = _tensor_gl_4d(f, box, order)
        scale = max(abs(fine), abs_floor)
        if abs(fine - coarse) <= rel_tol * scale:
            return fine
        coarse = fine
    raise QuadratureError(
        f"integrate_4d did not converge to rel_tol={rel_tol} by order {order}"
    )


@dataclass(frozen=True)
class BasisChangeMatrix:
    """Unitary expressing Laguerre-Gauss modes in the Hermite-Gauss basis.

    For total order ``order`` (= 2p + |l| = n + m), row ``i`` holds the
    coefficients of LG mode ``lg_modes[i]`` over the HG modes
    (n, order - n) for n = 0..order, where n counts the x index:

        LG_{p,l} = sum_n matrix[i, n] * HG_{n, order-n}.
    """

    order: int
    lg_modes: Tuple[Tuple[int, int], ...]
    matrix: np.ndarray

    def row(self, p: int, l: int) -> np.ndarray:
        return self.matrix[self.lg_modes.index((p, l))]


def _poly_coeffs_one_minus_t_one_plus_t(n: int, m: int) -> list:
    """Integer coefficients of (1 - t)^n (1 + t)^m, ascending powers."""
    a = [math.comb(n, j) * (-1) ** j for j in range(n + 1)]
    b = [math.comb(m, j) for j in range(m + 1)]
    out = [0] * (n + m + 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def lg_modes_of_order(order: int) -> Tuple[Tuple[int, int], ...]:
    """(p, l) pairs with 2p + |l| = order, sorted by ascending l."""
    return tuple(
        ((order - abs(l)) // 2, l) for l in range(-order, order + 1, 2)
    )


def lg_hg_unitary(order: int) -> BasisChangeMatrix:
    """Basis change between same-order LG and HG mode sets.

    The coefficient of HG_{N-k, k} in LG_{p,l} is (-1)^p i^k b(n, m, k)
    with n = p + max(-l, 0), m = p + max(l, 0), N = n + m and

        b(n, m, k) = sqrt((N-k)! k! / (2^N n! m!)) [t^k] (1-t)^n (1+t)^m,

    which makes l = m - n count positive helicity (exp(+i l theta) with
    theta measured from +x toward +y).  The (-1)^p row phase pins the
    radial convention where L_p^{|l|} enters with a positive leading
    sign; the whole matrix is validated against direct 2-D overlap
    integrals of the sampled mode patterns.
    """
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    modes = lg_modes_of_order(order)
    mat = np.zeros((order + 1, order + 1), dtype=complex)
    for row, (p, l) in enumerate(modes):
        n = p + max(-l, 0)
        m = p + max(l, 0)
        coeffs = _poly_coeffs_one_minus_t_one_plus_t(n, m)
        norm = (-1.0) ** p / math.sqrt(
            2 ** order * math.factorial(n) * math.factorial(m)
        )
        for k in range(order + 1):
            b = (
                math.sqrt(math.factorial(order - k) * math.factorial(k))
                * coeffs[k]
                * norm
            )
            # HG_{N-k, k}: x index is N - k.
            mat[row, order - k] = (1j) ** k * b
    return BasisChangeMatrix(order=order, lg_modes=modes, matrix=mat)
