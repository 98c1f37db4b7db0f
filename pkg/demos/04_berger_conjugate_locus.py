"""The tangent conjugate locus of Berger spheres, for a family of deformations.

The solution operator of the Jacobi system on a Berger sphere has the closed
determinant (up to a positive factor t/R^4)

    sin(Rt) (-delta |q0|^2 R t cos(Rt) + (1+delta) S sin(Rt)),

so first conjugate times come from pi/R (delta >= 0) or a tangent equation
(delta < 0).  Sweeping the direction angle produces one slice of the locus, a
surface of revolution.

Writes locus.svg / locus.csv into demos/output/.  In the default unit
(momentum, |Lambda u0| = 1) the slices are nested, the deepest deformation
innermost, matching the family picture; with unit bi-invariant velocities the
near-fiber directions conjugate later and later as the fiber collapses, and
the slices poke far out along the axis instead.
"""

import os

import numpy as np

import liegeo as lg

deltas = [-0.001, -0.25, -0.5, -0.75, -0.95]
outdir = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(outdir, exist_ok=True)

slices = [lg.generate_locus_slice(d, n_angles=720) for d in deltas]
lg.emit_locus(slices, os.path.join(outdir, "locus.svg"), "svg")
lg.emit_locus(slices, os.path.join(outdir, "locus.csv"), "csv")
print(f"wrote {outdir}/locus.svg and locus.csv (unit: {slices[0].unit})")

print("\nradius of each slice at a few direction angles:")
angles = [0, 90, 180, 270, 360, 450, 540]  # indices into the 720-point grid
header = "theta(deg) " + "  ".join(f"d={d:+.3f}" for d in deltas)
print(header)
for idx in angles[:4]:
    row = "  ".join(f"{sl.t_star[idx]:8.4f}" for sl in slices)
    print(f"{np.degrees(slices[0].theta[idx]):9.1f}  {row}")

print("\nsame family with unit bi-invariant velocities (not nested near axis):")
bslices = [lg.generate_locus_slice(d, n_angles=720, unit="biinvariant") for d in deltas]
for idx in (20, 90, 180):
    row = "  ".join(f"{sl.t_star[idx]:8.4f}" for sl in bslices)
    print(f"{np.degrees(bslices[0].theta[idx]):9.1f}  {row}")
print("(first conjugate times along the collapsing fiber grow like pi/(1+delta))")
