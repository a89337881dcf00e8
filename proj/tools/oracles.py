#!/usr/bin/env python3
# Reference values frozen into tests/. Run: python3 tools/oracles.py
import mpmath as mp
import numpy as np
from scipy.linalg import eigh_tridiagonal

mp.mp.dps = 60


def ml_series(a, b, z):
    # partial sums until the terms are below 1e-40 relative, tail is geometric there
    a, b, z = mp.mpf(a), mp.mpf(b), mp.mpf(z)
    s, k = mp.mpf(0), 0
    while True:
        t = z**k * mp.rgamma(a * k + b)
        s += t
        if k > 20 and abs(t) < mp.mpf(10) ** -40 * max(1, abs(s)):
            return s
        k += 1


print("# Mittag-Leffler")
for a, b, z in [(0.5, 1, -1), (0.7, 1, -10), (0.9, 1, -3), (0.8, 1.5, 2), (0.3, 1, -0.5), (1.5, 1, -4), (0.9, 0.9, -(0.5**0.9))]:
    print(f"E({a},{b},{z}) = {mp.nstr(ml_series(a, b, z), 17)}")
x = mp.mpf(20)
print("E(0.5,1,-20) = ", mp.nstr(mp.exp(x * x) * mp.erfc(x), 17), "(e^{x^2} erfc x)")
print("E(0.5,1,-1) check erfc:", mp.nstr(mp.exp(1) * mp.erfc(1), 17))
print("kernel(0.9,0.9,1,0.5) =", mp.nstr(mp.mpf(0.5) ** -0.1 * ml_series(0.9, 0.9, -(mp.mpf(0.5) ** 0.9)), 17))
print("bound(0.9,10,0.5) =", mp.nstr(1 + mp.gamma(0.1) * 10 * mp.mpf(0.5) ** 0.9, 17))

print("# d_alpha L2(0,1) norm, lambda = 25")
for a in [0.9, 0.99]:
    f = lambda t: (ml_series(a, 1, -25 * t**a) - mp.exp(-25 * t)) ** 2
    mp.mp.dps = 30
    print(f"alpha={a}: {mp.nstr(mp.sqrt(mp.quad(f, [0, 0.01, 0.1, 1])), 12)}")
    mp.mp.dps = 60

print("# Robin eigenvalues, sigma = 1, L = 1: u'(0) = s u(0), u'(L) = -s u(L)")
roots = []
for j in range(1, 4):
    F = lambda k: (1 - k * k) * mp.sin(k) + 2 * k * mp.cos(k)
    k = mp.findroot(F, (j - 0.5) * mp.pi if j > 1 else 1.3)
    roots.append(k)
    print(f"lambda_{j} = {mp.nstr(k * k, 17)}")


def fd_robin(n, s=1.0):
    # vertex grid, ghost points eliminated; the resulting tridiagonal matrix is
    # symmetrized with off-diagonals sqrt(a_{i,i+1} a_{i+1,i})
    h = 1.0 / (n - 1)
    d = np.full(n, 2.0 / h**2)
    d[0] += 2 * s / h
    d[-1] += 2 * s / h
    up = np.full(n - 1, -1.0 / h**2)
    lo = np.full(n - 1, -1.0 / h**2)
    up[0] = -2.0 / h**2
    lo[-1] = -2.0 / h**2
    e = -np.sqrt(up * lo)
    return eigh_tridiagonal(d, e, select="i", select_range=(0, 2))[0]


l1, l2 = fd_robin(2049), fd_robin(4097)
print("FD Richardson", (4 * l2 - l1) / 3)

print("# sqrt(2) int_0^1 (1+x+x^2) sin(j pi x) dx")
for j in (1, 2, 3, 10, 64):
    v = mp.sqrt(2) * mp.quad(lambda x: (1 + x + x * x) * mp.sin(j * mp.pi * x), [0, 1])
    print(j, mp.nstr(v, 17))

print("# one-sided schemes, Dirichlet L=1, f_j = 1/j^2, g_j = (-1)^(j+1)/j, 2a = 1.9, y = 1/3")
a2, y = mp.mpf("1.9"), mp.mpf(1) / 3
for j in range(1, 9):
    lam = (j * mp.pi) ** 2
    z = lam * y**a2
    fj, gj = mp.mpf(1) / j**2, mp.mpf((-1) ** (j + 1)) / j
    num = fj * ml_series(a2, 1, z) + gj * y * ml_series(a2, 2, z)
    den = ml_series(a2, 1, z) ** 2 - z * ml_series(a2, a2, z) * ml_series(a2, 2, z)
    print(j, mp.nstr(num, 17), mp.nstr(num / den, 17))
