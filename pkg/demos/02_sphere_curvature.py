"""Curvature of the spheres, checked two independent ways.

The second fundamental form has a closed 2x2 expression in the adapted
tangent frame.  Here we evaluate it, confront it with a finite-difference
shape operator that only differentiates the foliation normal, and show
the special algebraic structure: the principal directions sit at a
constant angle, and the corrected operator (shape operator plus a rotated
vertical rank-one term) is a multiple of the identity, so its trace-free
part vanishes identically.
"""

import math

import numpy as np

from heisenberg_cmc import ModelParams, Point, SphereSpec, profile_height
from heisenberg_cmc.curvature import (
    corrected_shape,
    principal_angle,
    second_fundamental_form,
    shape_operator_fd,
    tangent_frame,
)

spec = SphereSpec(ModelParams(1.0, 1.0), R=1.0)
print(f"sphere: eps=1, sigma=1, R=1, H={spec.H}")
print(f"principal rotation angle = {principal_angle(spec.H, spec.params.tau):.12f} rad "
      f"(pi/8 = {math.pi/8:.12f} when tau = H)\n")

print("r      kappa_1        kappa_2        |analytic h - FD h|")
for r in (0.2, 0.45, 0.7, 0.9):
    q = Point(r, 0.0, float(profile_height(spec, r)))
    sd = second_fundamental_form(spec, q)
    fr = tangent_frame(spec, q)
    h_fd = np.empty((2, 2))
    for i, v in enumerate((fr.X1, fr.X2)):
        hv = shape_operator_fd(spec, q, v)
        h_fd[i] = (hv.dot(fr.X1), hv.dot(fr.X2))
    dev = np.max(np.abs(h_fd - sd.h))
    print(f"{r:.2f}  {sd.kappa1:.10f}  {sd.kappa2:.10f}  {dev:.2e}")

print("\ntrace is 2H everywhere; the mean curvature never varies along the sphere.")

print("\n== the corrected operator is scalar ==")
for r in (0.3, 0.6, 0.85):
    q = Point(0.0, r, float(profile_height(spec, r)))
    data = corrected_shape(spec, q)
    print(f"r = {r:.2f}:  k = {data.k[0,0]:.10f} * Id "
          f"(off-diagonal {data.k[0,1]:+.2e}),  |traceless part| = {data.k0_norm:.2e}")

print("\n== negative Gauss curvature near the equator for strong twist ==")
big = SphereSpec(ModelParams.from_tau(1.0, 3.0), R=2.0)
for r in (0.2, 0.8, 1.6, 1.95):
    q = Point(r, 0.0, float(profile_height(big, r)))
    sd = second_fundamental_form(big, q)
    gauss_sign = "<0" if sd.kappa1 * sd.kappa2 < 0 else ">=0"
    print(f"r = {r:.2f}:  kappa_2 = {sd.kappa2:+.6f}, extrinsic curvature product {gauss_sign}")
