"""Norm gaps that do not shrink as n grows.

The traveling wave at time t_n stays a fixed Besov distance from its data,
so the gap divided by t_n^(1/2) grows. Drifts 1 and 1 + 1/n give data that
converge while the solutions stay a fixed distance apart.

Run: python demos/ill_posedness_gaps.py
"""

from besov_lab import thm1_gap, thm2_ratio, thm3_gap

print(" n        t_n      inviscid gap   Hölder ratio   data gap   solution gap")
for n in range(6, 13):
    a = thm1_gap(2.0, 2, 2, n, cross_check=False)
    b = thm2_ratio(2.0, 2, 1, 0.5, 2, n, cross_check=False)
    c = thm3_gap(2.0, 2, 2, n, cross_check=False)
    print(f"{n:2d}  {a.t_n:.3e}  {a.full_norm:12.8f}  {b.ratio:13.6f}  {c.initial_gap:9.6f}  {c.full_norm:12.8f}")
