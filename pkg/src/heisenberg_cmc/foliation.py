"""The calibration foliation of a vertical half-cylinder.

For a sphere of parameter R and 0 <= delta < R, the half-cylinder is

    C = { (z, t) : |z| < R,  t > t_cut },   r_cut = R - delta,
    t_cut = f(r_cut; R).

It is foliated by leaves of a continuous label u: above the upper
hemisphere graph the leaves are its vertical translates,
u(z, t) = f(|z|; R) - t + R <= R; below the graph (inside the enclosed
region) the label is the unique lam > R with

    F(|z|, t, lam) = f(|z|; lam) - f(r_cut; lam) + t_cut - t = 0,

whose leaves are vertical translates of the larger spheres' graphs.  The
downhill unit gradient V = -grad(u)/|grad(u)| is continuous on C, equals
the outward sphere normal on the sphere itself, and has
(1/2) div V = H_lam <= 1/(eps R) with H_lam = 1/(eps lam) for lam > R.
The growth of the label along vertical segments below the graph carries
the explicit lower bounds used by the quantitative isoperimetric
inequality; `vertical_label_bound` checks them pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .ambient import ModelParams, Point, TangentVector, vector_to_coordinates
from .errors import DomainError, NumericsError
from .sphere import SphereSpec, _f, _f_R, _f_r, _omega, profile_height

__all__ = [
    "CylinderSpec",
    "FoliationConstants",
    "VerticalBound",
    "foliation_constants",
    "leaf_equation",
    "leaf_label",
    "leaf_label_grid",
    "point_on_leaf",
    "calibration_field",
    "calibration_divergence",
    "vertical_label_bound",
]


@dataclass(frozen=True)
class CylinderSpec:
    """Vertical half-cylinder over the disk of radius R, cut at height t_cut."""

    spec: SphereSpec
    delta: float
    r_cut: float = 0.0
    t_cut: float = 0.0

    def __post_init__(self) -> None:
        R = self.spec.R
        if not (0.0 <= self.delta < R):
            raise DomainError(f"delta must lie in [0, R), got {self.delta!r}")
        object.__setattr__(self, "r_cut", R - self.delta)
        object.__setattr__(self, "t_cut", float(profile_height(self.spec, self.r_cut)))

    @property
    def params(self) -> ModelParams:
        return self.spec.params

    @property
    def R(self) -> float:
        return self.spec.R

    def contains(self, r: float, t: float) -> bool:
        return 0.0 <= r < self.R and t > self.t_cut


@dataclass(frozen=True)
class FoliationConstants:
    """Explicit constants of the quantitative isoperimetric bounds."""

    k: float
    C: float
    D: float


@dataclass(frozen=True)
class VerticalBound:
    """Leaf label below the graph at depth t, with its lower-bound check."""

    label: float
    deficit: float  # 1 - R/label = 1 - eps R H_label
    floor: float  # the applicable quadratic/linear lower bound
    satisfied: bool


def foliation_constants(spec: SphereSpec) -> FoliationConstants:
    """k = eps^3 w(R) sqrt(R) and the two deficit constants built from it."""
    e = spec.params.epsilon
    R = spec.R
    k = e**3 * float(_omega(spec.params, R)) * math.sqrt(R)
    f0 = float(profile_height(spec, 0.0))
    c = 1.0 / (4.0 * math.pi * e * R**3 * (R * k + f0))
    d = 1.0 / (12.0 * e * math.pi**2 * R**5 * (4.0 * R * k * k + f0 * f0))
    return FoliationConstants(k=k, C=c, D=d)


def _leaf_equation_raw(cyl: CylinderSpec, r, t, lam):
    params = cyl.params
    return _f(params, r, lam) - _f(params, cyl.r_cut, lam) + cyl.t_cut - np.asarray(t, dtype=float)


def leaf_equation(cyl: CylinderSpec, r: float, t: float, lam: float) -> float:
    """F(r, t, lam) whose zero in lam > R labels the leaf through (r, t).

    Positive as lam -> R+ (value f(r;R) - t), negative as lam -> infinity
    (value t_cut - t), and strictly decreasing in lam.
    """
    if not (0.0 <= r < cyl.r_cut):
        raise DomainError(f"need 0 <= r < r_cut = {cyl.r_cut}, got {r!r}")
    if not (cyl.t_cut < t < float(profile_height(cyl.spec, r))):
        raise DomainError(f"t = {t!r} outside (t_cut, f(r; R))")
    if not lam > cyl.R:
        raise DomainError(f"need lam > R = {cyl.R}, got {lam!r}")
    return float(_leaf_equation_raw(cyl, r, t, lam))


def _label_below_grid(cyl: CylinderSpec, r, t, n_iter: int = 100) -> np.ndarray:
    """Vectorized bisection for the below-graph label; F is monotone in lam."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    r, t = np.broadcast_arrays(r, t)
    R = cyl.R
    lo = np.full(r.shape, R, dtype=float)
    hi = np.full(r.shape, 2.0 * R, dtype=float)
    for _ in range(200):
        bad = _leaf_equation_raw(cyl, r, t, hi) > 0.0
        if not np.any(bad):
            break
        hi = np.where(bad, 2.0 * hi, hi)
    else:
        raise NumericsError("leaf bracket expansion failed")
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        pos = _leaf_equation_raw(cyl, r, t, mid) > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return 0.5 * (lo + hi)


def leaf_label_grid(cyl: CylinderSpec, r, t) -> np.ndarray:
    """Leaf label u on arrays of cylinder points (vectorized)."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    shape = np.broadcast_shapes(r.shape, t.shape)
    r, t = np.broadcast_arrays(r, t)
    r = np.atleast_1d(r)
    t = np.atleast_1d(t)
    if np.any(r < 0.0) or np.any(r >= cyl.R) or np.any(t <= cyl.t_cut):
        raise DomainError("points must lie inside the half-cylinder")
    f_here = _f(cyl.params, r, cyl.R)
    out = np.where(t >= f_here, f_here - t + cyl.R, np.nan)
    below = t < f_here
    if np.any(below):
        out[below] = _label_below_grid(cyl, r[below], t[below])
    return out.reshape(shape)


def leaf_label(cyl: CylinderSpec, point: Point) -> float:
    """Leaf label u at a cylinder point; u = R exactly on the sphere,
    u > R strictly inside the enclosed region, u < R above the graph."""
    r = point.r
    if not cyl.contains(r, point.t):
        raise DomainError(f"point (r, t) = ({r}, {point.t}) is outside the half-cylinder")
    f_here = float(_f(cyl.params, r, cyl.R))
    if point.t >= f_here:
        return f_here - point.t + cyl.R
    lo, hi = cyl.R, 2.0 * cyl.R
    for _ in range(200):
        if _leaf_equation_raw(cyl, r, point.t, hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise NumericsError("leaf bracket expansion failed")
    return brentq(
        lambda lam: float(_leaf_equation_raw(cyl, r, point.t, lam)),
        lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200,
    )


def point_on_leaf(cyl: CylinderSpec, r: float, lam: float) -> Point:
    """A point of the leaf with label lam on the vertical line at radius r."""
    if not (0.0 <= r < cyl.r_cut):
        raise DomainError(f"need 0 <= r < r_cut, got {r!r}")
    params = cyl.params
    if lam > cyl.R:
        t = float(_f(params, r, lam) - _f(params, cyl.r_cut, lam) + cyl.t_cut)
    else:
        t = float(_f(params, r, cyl.R)) + (cyl.R - lam)
    return Point(r, 0.0, t)


def _gradient_components(cyl: CylinderSpec, point: Point) -> tuple[float, float]:
    """(u_r, u_t) of the label in coordinates, by branch."""
    params = cyl.params
    r = point.r
    f_here = float(_f(params, r, cyl.R))
    if point.t >= f_here:
        u_r = float(_f_r(params, r, cyl.R)) if r > 0.0 else 0.0
        return u_r, -1.0
    lam = leaf_label(cyl, point)
    f_lam = float(_f_R(params, r, lam)) - float(_f_R(params, cyl.r_cut, lam))
    u_t = 1.0 / f_lam
    u_r = -float(_f_r(params, r, lam)) / f_lam if r > 0.0 else 0.0
    return u_r, u_t


def calibration_field(cyl: CylinderSpec, point: Point) -> TangentVector:
    """Unit field V = -grad(u)/|grad(u)|, continuous on the half-cylinder.

    The gradient is analytic above the graph and comes from implicit
    differentiation of the leaf equation below it; on the sphere V equals
    the outward normal.
    """
    if not cyl.contains(point.r, point.t):
        raise DomainError("point is outside the half-cylinder")
    params = cyl.params
    e, s = params.epsilon, params.sigma
    u_r, u_t = _gradient_components(cyl, point)
    r = point.r
    if r > 0.0:
        u_x, u_y = u_r * point.x / r, u_r * point.y / r
    else:
        u_x = u_y = 0.0
    gx = (u_x + s * point.y * u_t) / e
    gy = (u_y - s * point.x * u_t) / e
    gt = e * e * u_t
    nrm = math.sqrt(gx * gx + gy * gy + gt * gt)
    if nrm == 0.0:
        raise NumericsError("vanishing gradient of the leaf label")
    return TangentVector(-gx / nrm, -gy / nrm, -gt / nrm)


def calibration_divergence(
    cyl: CylinderSpec,
    point: Point,
    step: float | None = None,
) -> tuple[float, float]:
    """(div V, H_label) at a cylinder point off the sphere.

    The divergence is the coordinate divergence of V's coordinate
    components by central differences (the Riemannian volume is the
    Lebesgue measure, so the two divergences agree); H_label is
    1/(eps*label) on the inside leaves and 1/(eps*R) on and above the
    sphere.  The stencil must not cross the sphere or leave the cylinder.
    """
    h = step if step is not None else 1e-5 * cyl.R
    r = point.r
    f_here = float(_f(cyl.params, min(r, cyl.R), cyl.R))
    if abs(point.t - f_here) <= 3.0 * h:
        raise DomainError("stencil would straddle the sphere; pick a point farther away")

    def v_coords(pa: np.ndarray) -> np.ndarray:
        q = Point.from_array(pa)
        if not cyl.contains(q.r, q.t):
            raise DomainError("stencil leaves the half-cylinder")
        side_now = q.t >= float(_f(cyl.params, min(q.r, cyl.R), cyl.R))
        side_ref = point.t >= f_here
        if side_now != side_ref:
            raise DomainError("stencil crosses the sphere")
        return vector_to_coordinates(cyl.params, q, calibration_field(cyl, q))

    pa = point.as_array()
    div = 0.0
    for i in range(3):
        ei = np.zeros(3)
        ei[i] = h
        div += (v_coords(pa + ei)[i] - v_coords(pa - ei)[i]) / (2.0 * h)
    lam = leaf_label(cyl, point)
    e = cyl.params.epsilon
    h_lam = 1.0 / (e * lam) if lam > cyl.R else 1.0 / (e * cyl.R)
    return div, h_lam


def vertical_label_bound(cyl: CylinderSpec, r: float, depth: float) -> VerticalBound:
    """Label g(depth) = u(r, f(r;R) - depth) with its explicit lower bound.

    For delta = 0 the bound on 1 - R/g is quadratic in the depth,
    depth^2 / (4 R k^2 + f(0;R)^2); for delta > 0 it is linear,
    sqrt(delta) * depth / (R k + f(0;R)).
    """
    f_here = float(_f(cyl.params, r, cyl.R))
    if not (0.0 <= depth < f_here - cyl.t_cut):
        raise DomainError(f"depth must lie in [0, f(r;R) - t_cut), got {depth!r}")
    if not (0.0 <= r < cyl.r_cut):
        raise DomainError(f"need 0 <= r < r_cut, got {r!r}")
    t = f_here - depth
    g = leaf_label(cyl, Point(r, 0.0, t)) if depth > 0.0 else cyl.R
    consts = foliation_constants(cyl.spec)
    f0 = float(profile_height(cyl.spec, 0.0))
    if cyl.delta < 1e-14:
        floor = depth * depth / (4.0 * cyl.R * consts.k**2 + f0 * f0)
    else:
        floor = math.sqrt(cyl.delta) * depth / (cyl.R * consts.k + f0)
    deficit = 1.0 - cyl.R / g
    return VerticalBound(
        label=g,
        deficit=deficit,
        floor=floor,
        satisfied=bool(deficit + 1e-12 >= floor),
    )
