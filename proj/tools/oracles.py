#!/usr/bin/env python3
"""Independent oracles for the expected values frozen into the C++ tests.

Run from the repo root:  python3 tools/oracles.py

Each oracle is computed here with numpy/mpmath, independently of the C++
implementation, and the printed values are copied verbatim into tests/.
Keep this script in sync if a frozen constant ever needs regeneration.
"""

import math

import mpmath
import numpy as np
from scipy import stats

mpmath.mp.dps = 40


def decay_recursion_three_steps():
    # xi_{k+1} = exp(-alpha/(k0+k+1)) xi_k + A/(k0+k+1)^(beta+1),
    # k0=1, alpha=2, beta=1, A=1, xi0=1, K=3.
    k0, alpha, beta, A = 1.0, 2.0, 1.0, 1.0
    xi = mpmath.mpf(1)
    for k in range(3):
        t = k0 + k + 1
        xi = mpmath.e ** (-alpha / mpmath.mpf(t)) * xi + A / mpmath.mpf(t) ** (beta + 1)
    return xi


def decay_bound_three_steps():
    # loose closed form at the same parameters:
    # (k0+1)^a xi0/(k0+K)^a + e^(a/(k0+1)) A [1/((a-b)(k0+K)^b) + 1/(k0+K)^(b+1)]
    k0, alpha, beta, A, xi0, K = 1.0, 2.0, 1.0, 1.0, 1.0, 3
    lead = (k0 + 1) ** alpha * xi0 / (k0 + K) ** alpha
    boost = mpmath.e ** (alpha / (k0 + 1))
    return lead + boost * A / ((alpha - beta) * (k0 + K) ** beta) + boost * A / (k0 + K) ** (beta + 1)


def gram_scalar_example():
    # d=1, n=2, a=(1,3), eta=1/32: E[S^T S] = ((1-eta)(1-3eta))^2 (commutative).
    eta = mpmath.mpf(1) / 32
    return ((1 - eta) * (1 - 3 * eta)) ** 2


def epoch_variant_inverse_sum(k0, lo, hi):
    return sum(1 / (k0 + mpmath.mpf(i)) for i in range(lo, hi + 1))


def epoch_variant_extremal(k0, alpha, beta, xi0, K, n, eps, a1, a2, a3=0, gamma=0):
    # xi_1 = exp(-alpha sum_{i=1..n} 1/(k0+i)) xi_0 + A1, then for k >= 1
    # xi_{k+1} = exp(-alpha sum 1/(k0+nk+i) + eps/k^2) xi_k
    #            + A2/(k0+n(k+1))^(beta+1) + A3/(k0+n(k+1))^(gamma+1).
    k0, alpha, beta = mpmath.mpf(k0), mpmath.mpf(alpha), mpmath.mpf(beta)
    eps, a1, a2 = mpmath.mpf(eps), mpmath.mpf(a1), mpmath.mpf(a2)
    a3, gamma = mpmath.mpf(a3), mpmath.mpf(gamma)
    xi = mpmath.e ** (-alpha * epoch_variant_inverse_sum(k0, 1, n)) * mpmath.mpf(xi0) + a1
    for k in range(1, K):
        factor = mpmath.e ** (-alpha * epoch_variant_inverse_sum(k0 + n * k, 1, n)
                              + eps / mpmath.mpf(k) ** 2)
        idx = k0 + n * (k + 1)
        xi = factor * xi + a2 / idx ** (beta + 1) + a3 / idx ** (gamma + 1)
    return xi


def pl_grid_constant():
    # min over x in [-20,20], step 1e-4, of F'(x)^2 / (2 (F(x)-F*)),
    # F(x) = x^2 + 3 sin^2 x, F* = 0. Same grid the C++ generator certifies.
    j = np.arange(0, 400001)
    x = -20.0 + j * 1e-4
    F = x * x + 3.0 * np.sin(x) ** 2
    dF = 2.0 * x + 3.0 * np.sin(2.0 * x)
    mask = F > 1e-300
    ratio = dF[mask] ** 2 / (2.0 * F[mask])
    i = int(np.argmin(ratio))
    return ratio[i], x[mask][i]


def main():
    print("decay recursion, 3 steps      :", mpmath.nstr(decay_recursion_three_steps(), 20))
    print("decay loose bound, same params:", mpmath.nstr(decay_bound_three_steps(), 20))
    print("scalar Gram example           :", mpmath.nstr(gram_scalar_example(), 20))
    print("const_pl eta (n=4, K=100)     : %.17g" % (2.0 * math.log(math.sqrt(4.0) * 100.0) / 400.0))
    m, arg = pl_grid_constant()
    print("PL grid constant              : %.17g  (at x = %.6f)" % (m, arg))
    print("chi2(df=5) 0.999 quantile     : %.17g" % stats.chi2.ppf(0.999, 5))
    print("chi2(df=23) 0.999 quantile    : %.17g" % stats.chi2.ppf(0.999, 23))
    variant = epoch_variant_extremal(3, 4, 2, 1.5, 25, 4, 0.3, 0.7, 2)
    extended = epoch_variant_extremal(1.5, 6, 3, 0.2, 40, 7, 0.05, 0, 5, 0.4, 2.5)
    print("epoch-variant extremal        :", mpmath.nstr(variant, 20))
    print("extended-variant extremal     :", mpmath.nstr(extended, 20))


if __name__ == "__main__":
    main()
