"""The Zeitlin model: SU(3) with the metric shrunk by delta = -2/3 along SO(3).

This finite-dimensional model of 2-d ideal fluid flow is the Cheeger
deformation of the bi-invariant metric on SU(3) along its real orthogonal
subgroup.  Its Ricci tensor is block Einstein, every nonsteady geodesic
satisfies the index-form inequality for conjugate points, and the numeric
detector confirms a conjugate point well inside the predicted horizon.
"""

import numpy as np

import liegeo as lg

su3 = lg.build_su_basis(3, embed_so_subalgebra=True)
delta = -2.0 / 3.0
metric = lg.MetricOperator.cheeger(su3, delta)

print("Zeitlin model: SU(3), h = so(3), delta = -2/3")
print(f"  Cartan condition [h-perp, h-perp] in h: {lg.cartan_condition_check(su3)}")

beta_g, beta_h = lg.beta_constants(su3)
rep = lg.block_einstein_report(metric)
print(f"  beta_G = {beta_g:.1f}, beta_H = {beta_h:.1f}")
print(f"  Ricci blocks: C1 = {rep['C1']:.6f} on h, C2 = {rep['C2']:.6f} on h-perp")
print(f"  numeric block residual: {rep['residual']:.2e}")

rng = np.random.default_rng(5)
coords = rng.standard_normal(su3.dim)
coords /= np.linalg.norm(coords)
u0 = su3.element(coords)
p0, q0 = lg.project_h(u0), lg.project_h_perp(u0)
print(f"\nrandom unit initial velocity, |p0| = {p0.norm_biinv():.3f}, "
      f"|q0| = {q0.norm_biinv():.3f}")
print(f"  nonsteady inequality satisfied: {lg.cheeger_nonsteady_condition(delta, p0, q0)}")

probe = lg.integrate_euler_arnold(metric, u0, T=1.0, dt=2e-3)
verdict, frame = lg.nonsteady_quadratic_criterion(probe)
tau = lg.index_form_tau(verdict.psi_min, verdict.phi_min)
print(f"  psi = {verdict.psi_min:.4f}, phi = {verdict.phi_min:.4f} "
      f"(constant along Berger-Cheeger geodesics)")
print(f"  index form threshold tau = {tau:.3f}")

horizon = 3.0 * tau
traj = lg.integrate_euler_arnold(metric, u0, T=horizon, dt=horizon / 5000)
found = lg.find_conjugate_times(traj)
print(f"  numeric detector on [0, 3 tau]: first conjugate time = "
      f"{found.first_time():.4f} ({found.first_time() / tau:.2f} tau)")
