"""Besov norms of lacunary profiles and the constant c0(p).

Run: python demos/besov_norms.py
"""

import math

from besov_lab import BesovIndex, besov_block_norms, besov_norm_scalar, build_profile, c0

for p in (1, 2, math.inf):
    print(f"c0({p}) = {c0(p):.12f}")

# the uniform profile has every weighted block equal to c0(p), so its B^s_{p,inf} norm is c0(p)
prof = build_profile(2.0, 12)
for p in (1, 2, math.inf):
    blocks = besov_block_norms(prof.poly, 2.0, p)
    print(f"p={p}: weighted blocks j=3..12 in [{blocks[4:14].min():.10f}, {blocks[4:14].max():.10f}]")

# the j^-2 profile is summable: its B^s_{p,1} norm stays bounded as J grows
for J in (8, 12, 16):
    f = build_profile(2.0, J, "jsq").poly
    print(f"jsq profile J={J}: B^2_(2,1) norm {besov_norm_scalar(f, BesovIndex(2.0, 2, 1)):.8f}")
