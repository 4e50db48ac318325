"""Navier-Stokes with viscosity eps_n against Euler, exact and numerical.

The exact damped-wave solution keeps a block gap of (1 - 1/e)·c0·lift while
eps_n and t_n shrink. A pseudo-spectral run reproduces a resolved shear flow.

Run: python demos/inviscid_limit.py
"""

from besov_lab import SolverConfig2D, build_profile, thm4_gap
from besov_lab.pde_solvers import validate_solver

print(" n      eps_n        t_n      block gap   full gap")
for n in range(6, 13):
    r = thm4_gap(2.0, 2, 2, n, cross_check=False)
    print(f"{n:2d}  {r.eps_n:.3e}  {r.t_n:.3e}  {r.block_norm_at_n:.8f}  {r.full_norm:.8f}")

cfg = SolverConfig2D(N=128, dt=1e-3, eps=0.01, T=0.1)
out = validate_solver(cfg, build_profile(1.0, 4).poly)
print(f"solver vs shear closed form: {out['shear_error']:.2e} "
      f"(dt/2: {out['shear_error_half_dt']:.2e}, ratio {out['shear_error_ratio']:.1f})")
print(f"solver vs Taylor-Green: {out['taylor_green_error']:.2e}")
