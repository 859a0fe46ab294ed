"""The sub-calibration foliation of a vertical cylinder.

Above the sphere's upper graph the cylinder is foliated by vertical
translates of the graph; below it, by translates of the larger spheres'
graphs.  The downhill unit gradient of the leaf label is a calibration:
it matches the sphere normal on the sphere, half its divergence is the
leaf mean curvature, and the label grows along vertical segments at an
explicitly bounded rate.  Those growth bounds are the engine behind the
quantitative isoperimetric inequality.
"""

import math

import numpy as np

from heisenberg_cmc import ModelParams, Point, SphereSpec, outer_normal, profile_height
from heisenberg_cmc.foliation import (
    CylinderSpec,
    calibration_divergence,
    calibration_field,
    foliation_constants,
    leaf_label,
    vertical_label_bound,
)

spec = SphereSpec(ModelParams(1.0, 1.0), R=1.0)
cyl = CylinderSpec(spec, delta=0.3)
consts = foliation_constants(spec)
print(f"cylinder: radius {spec.R}, cut height t_cut = {cyl.t_cut:.6f} "
      f"(r_cut = {cyl.r_cut})")
print(f"constants: k = {consts.k:.6f}, C = {consts.C:.6e}, D = {consts.D:.6e}\n")

print("leaf labels along the vertical line r = 0.3:")
f_here = float(profile_height(spec, 0.3))
for t in np.linspace(cyl.t_cut + 0.02, f_here + 0.4, 7):
    lab = leaf_label(cyl, Point(0.3, 0.0, t))
    where = "inside the sphere" if lab > spec.R else "above the graph"
    print(f"  t = {t:.3f}:  u = {lab:.6f}  ({where})")

q = Point(0.4, 0.1, float(profile_height(spec, math.hypot(0.4, 0.1))))
v = calibration_field(cyl, q)
n = outer_normal(spec, q)
print(f"\non the sphere the calibration equals the outward normal: "
      f"|V - N| = {(v - n).norm():.2e}")

print("\nhalf the divergence is the leaf mean curvature (and never exceeds 1/(eps R)):")
for (r, t) in [(0.3, 1.05), (0.3, 1.15), (0.3, 1.45)]:
    div, h_lam = calibration_divergence(cyl, Point(r, 0.0, t))
    print(f"  (r, t) = ({r}, {t}):  div V / 2 = {0.5*div:.8f}, "
          f"leaf curvature = {h_lam:.8f}")

print("\nvertical growth of the label vs its guaranteed floor:")
for depth in (0.05, 0.1, 0.2):
    vb = vertical_label_bound(cyl, 0.3, depth)
    print(f"  depth {depth:.2f}: 1 - R/u = {vb.deficit:.6f} >= floor {vb.floor:.6f}  "
          f"({'ok' if vb.satisfied else 'VIOLATED'})")
