"""Pole-to-pole geodesics from the foliation normal.

The normal field of the sphere family is not geodesic: its self-derivative
is a tangent field whose normalization M sweeps each sphere from the north
pole to the south pole.  Its integral curves are intrinsic geodesics; we
integrate one for the parameters R=2, eps=0.5, sigma=0.5 and write it out
as an OBJ polyline (twisted meridians replacing the great circles of the
round sphere).
"""

import math

from heisenberg_cmc import ModelParams, Point, SphereSpec, profile_height
from heisenberg_cmc.meridians import (
    integrate_meridian,
    meridian_geodesic_residual,
    pansu_geodesic_residual,
    pansu_meridian_field,
)

spec = SphereSpec(ModelParams(0.5, 0.5), R=2.0)
r0 = 0.04
start = Point(r0, 0.0, float(profile_height(spec, r0)))
curve = integrate_meridian(spec, start)

drift = max(
    abs(abs(pt) - float(profile_height(spec, min(math.hypot(px, py), spec.R))))
    for px, py, pt in curve.points
)
print(f"integrated {len(curve)} samples, arclength {curve.s[-1]:.4f}")
print(f"stays on the sphere to {drift:.2e}")
print(f"geodesic-equation residual along the curve: "
      f"{meridian_geodesic_residual(spec, curve):.2e}")
print(f"endpoint: r = {math.hypot(curve.points[-1,0], curve.points[-1,1]):.2e}, "
      f"t = {curve.points[-1,2]:+.6f} (south pole at t = "
      f"{-float(profile_height(spec, 0.0)):+.6f})")

with open("meridian.obj", "w") as fh:
    for px, py, pt in curve.points:
        fh.write(f"v {px!r} {py!r} {pt!r}\n")
    fh.write("l " + " ".join(str(i + 1) for i in range(len(curve))) + "\n")
print("wrote meridian.obj (load it in any mesh viewer)")

print("\n== the scaled field becomes a horizontal geodesic flow ==")
q = Point(0.5, 0.2, 0.4)
for eps in (0.5, 0.25, 0.125):
    params = ModelParams(eps, 1.0)
    from heisenberg_cmc.meridians import meridian_field

    m = meridian_field(params, q)
    bar = pansu_meridian_field(1.0, q)
    dev = math.sqrt(
        (m.aX - bar.aX) ** 2 + (m.aY - bar.aY) ** 2 + (eps**3 * m.aT - bar.aT) ** 2
    )
    print(f"eps = {eps}:  |scaled field - horizontal limit field| = {dev:.3e}")

res = pansu_geodesic_residual(sigma=1.0, R=1.0, r=0.5)
print(f"\nlimit field satisfies the horizontal-geodesic equation: residual {res:.2e}")
