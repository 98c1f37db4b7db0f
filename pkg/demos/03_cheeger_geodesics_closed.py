"""Exact geodesics of a deformed metric, and conjugate points from closure.

For Lambda = I + delta P (a bi-invariant form deformed along a subgroup H),
the geodesic with gamma(0) = id and gamma'(0) = u0 = p0 + q0 is exactly

    gamma(t) = exp(t Lambda u0) exp(-delta t p0),

with velocity u(t) = Ad_{exp(delta t p0)} u0.  Whenever the bi-invariant
factor closes up -- exp(tau Lambda u0) = id -- right translation by
gamma(tau) is an isometry and the explicit Jacobi field

    y(t) = Ad*_{gamma(t)} u0 - Ad_{gamma(t)^{-1}} u0

vanishes at 0 and tau, certifying a conjugate point by time tau.
"""

import numpy as np

import liegeo as lg

su2 = lg.build_su_basis(2, embed_so_subalgebra=True)
delta = -0.5
metric = lg.MetricOperator.cheeger(su2, delta)
u0 = su2.element([1.0, 1.0, 0.0])

print(f"Berger sphere: su(2) with h = so(2), delta = {delta}")
traj = lg.integrate_euler_arnold(metric, u0, T=6.0, dt=1e-3)
g_exact, u_exact = lg.cheeger_geodesic_exact(metric, u0, 6.0)
print(f"  RK4 vs exact frame at t=6:    {np.abs(traj.frames[-1] - g_exact.matrix).max():.2e}")
print(f"  conservation drift of (k, l): {traj.conservation_drift():.2e}")

tau = lg.closed_biinvariant_time(metric, u0, horizon=8.0)
print(f"\n  exp(t Lambda u0) returns to the identity at tau = {tau:.6f}")
print(f"  (eigenphase prediction 2 pi / |Lambda u0| = {2 * np.pi / np.sqrt(1.25):.6f})")

field = lg.explicit_closed_field(traj, tau)
verdict = lg.closed_geodesic_conjugacy(traj, tau)
print(f"  explicit Jacobi field norm at tau: {field.norm_biinv():.2e}")
print(f"  right-translation isometry check:  {verdict.isometry_ok}")

rep = lg.find_conjugate_times(traj)
print(f"\n  numeric detector finds conjugate times {[f'{t:.4f}' for t in rep.times]}")
print(f"  first one at {rep.first_time():.6f} <= tau = {tau:.6f}")
ref = lg.berger_first_conjugate_time(delta, 1.0, 1.0)
print(f"  closed-form first conjugate time ({ref.branch}): {ref.time:.6f}")
