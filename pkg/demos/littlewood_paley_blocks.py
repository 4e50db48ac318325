"""Dyadic blocks of a lacunary cosine and of a generic trigonometric polynomial.

Run: python demos/littlewood_paley_blocks.py
"""

import math

import numpy as np

from besov_lab import TrigPolynomial, build_partition, dyadic_block, lp_norm
from besov_lab.lacunary import lacunary_frequency

P = build_partition(4096)
print(f"partition with {P.J + 2} blocks, unity defect {P.unity_defect():.1e}")

# cos(λ_m x) with λ_m = (11/8)2^m sits entirely in block m
for m in (3, 6, 9):
    u = TrigPolynomial.cosine(lacunary_frequency(m))
    sizes = [lp_norm(dyadic_block(u, j, P), math.inf) for j in range(-1, 12)]
    print(f"m={m}  lambda={lacunary_frequency(m):5d}  sup norm per block:", np.round(sizes, 12))

# a generic polynomial spreads across neighbouring blocks, but the blocks still sum back to it
rng = np.random.default_rng(0)
k = np.arange(0, 200)
u = TrigPolynomial(k, rng.normal(size=k.size) / (1 + k), rng.normal(size=k.size) / (1 + k))
total = TrigPolynomial.zero()
for j in range(-1, P.J + 1):
    total = total + dyadic_block(u, j, P)
print(f"reconstruction error of a 200-mode polynomial: {lp_norm(total - u, math.inf):.2e}")
