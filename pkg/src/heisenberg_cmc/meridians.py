"""The geodesic meridian foliation of the spheres.

The sphere family foliates R^3 minus the origin, so its outward unit
normal N is a field on that set.  Its self-derivative nabla_N N is
tangent to each sphere and vanishes exactly on the center axis and the
equatorial plane; the normalized, sign-corrected field

    M = sgn(t) * nabla_N N / |nabla_N N|
      = (x lam - y mu) X + (y lam + x mu) Y - (mu / tau eps) T,
    lam = sgn(t) sqrt(R^2-r^2) / (r R),   mu = tau eps r / (R w(r)),

extends smoothly across the equator and satisfies
nabla_M M = -(H / w(r)^2) N, so its integral curves are intrinsic
geodesics of the sphere running from the north to the south pole.

Two limit fields are provided: the Euclidean meridian field (sigma -> 0
at eps = 1) and the horizontal field tangent to the sub-Riemannian limit
sphere (eps -> 0 at fixed sigma, after scaling by eps), the latter
satisfying the characteristic horizontal-geodesic equation
nabla_M M = (2/R) J(M).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ambient import (
    ModelParams,
    Point,
    TangentVector,
    christoffel_frame,
    vector_to_coordinates,
)
from .errors import ContractError, DomainError, NumericsError
from .sphere import (
    SphereSpec,
    _ell,
    _f,
    _f_over_sqrt,
    _omega,
    _p_north,
    _radius_solve,
    foliation_normal,
    pansu_radius,
)

__all__ = [
    "FieldSample",
    "MeridianCurve",
    "normal_derivatives",
    "normal_acceleration",
    "meridian_field",
    "meridian_field_coordinates",
    "sample_field",
    "integrate_meridian",
    "meridian_geodesic_residual",
    "euclidean_meridian_field",
    "pansu_meridian_field",
    "limit_fields",
    "pansu_geodesic_residual",
]


@dataclass(frozen=True)
class FieldSample:
    """Foliation data at one point: normal, its acceleration, meridian field."""

    point: Point
    N: TangentVector
    dNN: TangentVector
    M: TangentVector


@dataclass(frozen=True)
class MeridianCurve:
    """An integrated meridian: arclength grid, points, unit velocities."""

    R: float
    s: np.ndarray
    points: np.ndarray  # (n, 3) coordinates
    velocities: np.ndarray  # (n, 3) frame coefficients of the field

    def __len__(self) -> int:
        return len(self.s)

    def point(self, i: int) -> Point:
        return Point.from_array(self.points[i])


def _require_off_axis(point: Point) -> None:
    if point.r == 0.0:
        raise DomainError("operation undefined on the center axis z = 0")


def normal_derivatives(params: ModelParams, point: Point) -> tuple[float, float]:
    """Derivatives along the foliation normal of the leaf radius R and of p.

    N R = ell(p) / eps and
    N p = eps tau^2 (R^2 w(r)^2 ell(p) - r^2 w(R)^2) / (R w(r)^4 p),
    the latter extended by 0 across the equatorial plane t = 0 where p
    vanishes identically along the normal direction.
    """
    if point.r == 0.0 and point.t == 0.0:
        raise DomainError("normal derivatives are undefined at the origin")
    e, tau = params.epsilon, params.tau
    R = float(_radius_solve(params, point.r, point.t))
    sg = float(np.sign(point.t))
    p = sg * float(_p_north(params, point.r, R))
    ell = float(_ell(p))
    nr = ell / e
    if point.t == 0.0 or tau == 0.0:
        return nr, 0.0
    w = float(_omega(params, point.r))
    wR = float(_omega(params, R))
    npv = e * tau * tau * (R * R * w * w * ell - point.r**2 * wR * wR) / (R * w**4 * p)
    return nr, npv


def normal_acceleration(params: ModelParams, point: Point) -> TangentVector:
    """nabla_N N: how far the normal lines are from ambient geodesics.

    Closed form D * [(y + x Phi) X - (x - y Phi) Y + (1/tau eps) T] with
    Phi = -w(r)^2 p / (tau eps r)^2 and D the normal derivative of p/R;
    identically zero on the equatorial plane and in the Euclidean
    degeneration tau = 0.
    """
    _require_off_axis(point)
    e, tau = params.epsilon, params.tau
    if point.t == 0.0 or tau == 0.0:
        return TangentVector(0.0, 0.0, 0.0)
    r = point.r
    R = float(_radius_solve(params, r, point.t))
    sg = float(np.sign(point.t))
    p = sg * float(_p_north(params, r, R))
    ell = float(_ell(p))
    w = float(_omega(params, r))
    wR = float(_omega(params, R))
    # D = N(p/R) = (R Np - p NR)/R^2
    d = -e * tau * tau * r * r * (wR * wR - ell * w * w) / (R * R * w**4 * p)
    phi = -(w * w * p) / (tau * e * r) ** 2
    return TangentVector(
        d * (point.y + point.x * phi),
        -d * (point.x - point.y * phi),
        d / (tau * e),
    )


def _lam_mu(params: ModelParams, r: float, t: float, R: float) -> tuple[float, float, float]:
    """lam, mu, and m = mu/(tau eps); m stays finite through tau = 0."""
    sg = 1.0 if t > 0.0 else (-1.0 if t < 0.0 else 0.0)
    gap = math.sqrt(max(R * R - r * r, 0.0))
    w = float(_omega(params, r))
    lam = sg * gap / (r * R)
    m = r / (R * w)
    mu = params.tau * params.epsilon * m
    return lam, mu, m


def meridian_field(params: ModelParams, point: Point) -> TangentVector:
    """The unit meridian field M, smooth across the equator.

    Equals sgn(t) * nabla_N N / |nabla_N N| away from the equatorial
    plane; the closed form below is regular there too.
    """
    _require_off_axis(point)
    R = float(_radius_solve(params, point.r, point.t))
    lam, mu, m = _lam_mu(params, point.r, point.t, R)
    return TangentVector(
        point.x * lam - point.y * mu,
        point.y * lam + point.x * mu,
        -m,
    )


def meridian_field_coordinates(params: ModelParams, point: Point) -> np.ndarray:
    """Coordinate components of the meridian field (for integration/limits)."""
    return vector_to_coordinates(params, point, meridian_field(params, point))


def sample_field(params: ModelParams, point: Point) -> FieldSample:
    """Normal, normal acceleration, and meridian field at one point."""
    return FieldSample(
        point=point,
        N=foliation_normal(params, point),
        dNN=normal_acceleration(params, point),
        M=meridian_field(params, point),
    )


# ------------------------------------------------------------- integration


def _field_on_sphere(params: ModelParams, R: float, x: float, y: float, t: float):
    """Coordinate velocity of the meridian field frozen on the sphere R.

    Scalar fast path used by the integrator; the t-component
    -eps^2 r w(r) / R is tau-free.
    """
    e = params.epsilon
    r = math.hypot(x, y)
    lam, mu, _ = _lam_mu(params, r, t, R)
    w = math.sqrt(1.0 + (params.tau * e * r) ** 2)
    vx = (x * lam - y * mu) / e
    vy = (y * lam + x * mu) / e
    vt = -e * e * r * w / R
    return vx, vy, vt


def _project_to_sphere(params: ModelParams, R: float, x: float, y: float, t: float,
                       tol: float) -> tuple[float, float, float]:
    """Move along the (frozen-R) normal until f(r; R)^2 = t^2.

    Newton on s with the stable products f*f' and f/sqrt(gap); quadratic
    and well conditioned across the equator.
    """
    e = params.epsilon
    for _ in range(12):
        r = math.hypot(x, y)
        gap2 = max(R * R - r * r, 0.0)
        gap = math.sqrt(gap2)
        w = math.sqrt(1.0 + (params.tau * e * r) ** 2)
        fos = float(_f_over_sqrt(params, r, R))
        f = gap * fos
        phi = f * f - t * t
        if abs(phi) <= tol * max(1.0, R) * (f + abs(t) + 1e-300):
            return x, y, t
        sg = 1.0 if t >= 0.0 else -1.0
        p = sg * params.tau * e * gap / w
        q3 = sg * e * e * w * gap / R
        nx = (x + y * p) / (e * R)
        ny = (y - x * p) / (e * R)
        ffr = -(e**3) * r * w * fos  # f * f_r, finite at the equator
        drds = (x * nx + y * ny) / r if r > 0.0 else 0.0
        dphi = 2.0 * (ffr * drds - t * q3)
        if dphi == 0.0:
            break
        s = -phi / dphi
        x, y, t = x + s * nx, y + s * ny, t + s * q3
    else:
        return x, y, t
    raise NumericsError("meridian projection failed")


def integrate_meridian(
    spec: SphereSpec,
    start: Point,
    step: float | None = None,
    max_len: float | None = None,
    pole_radius: float | None = None,
) -> MeridianCurve:
    """Integrate the meridian field on the sphere from `start` to the south pole.

    Fixed-step classical Runge-Kutta in arclength (the field is unit) with
    an on-sphere projection after every step, so leaf error stays at the
    projection tolerance instead of accumulating with the ODE error.
    Integration stops once the curve is within `pole_radius` of the south
    pole (then one exact pole sample is appended) or after `max_len`.
    """
    params, R = spec.params, spec.R
    f_start = float(_f(params, min(start.r, R), R))
    if abs(abs(start.t) - f_start) > 1e-8 * max(1.0, R):
        raise ContractError("start point is not on the sphere")
    if start.r <= 1e-6 * R:
        raise DomainError("start must be off the poles")
    h = step if step is not None else R / 2000.0
    e = params.epsilon
    # the radial approach speed near the poles is 1/eps, so the capture
    # disk must not be smaller than one step's radial travel
    pole_r = pole_radius if pole_radius is not None else max(1e-3 * R, 3.0 * h / e)
    if max_len is None:
        w_R = float(_omega(params, R))
        max_len = 20.0 * (R / e + e * w_R * R)
    tol = 1e-11

    def vel(x, y, t):
        return _field_on_sphere(params, R, x, y, t)

    x, y, t = start.x, start.y, start.t
    pts = [(x, y, t)]
    n_max = int(max_len / h) + 1
    for _ in range(n_max):
        k1 = vel(x, y, t)
        k2 = vel(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], t + 0.5 * h * k1[2])
        k3 = vel(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], t + 0.5 * h * k2[2])
        k4 = vel(x + h * k3[0], y + h * k3[1], t + h * k3[2])
        x = x + (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y = y + (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        t = t + (h / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        x, y, t = _project_to_sphere(params, R, x, y, t, tol)
        pts.append((x, y, t))
        if math.hypot(x, y) < pole_r and t < 0.0:
            break

    points = np.array(pts)
    s = h * np.arange(len(points))
    vels = np.empty_like(points)
    for i, (px, py, pt) in enumerate(points):
        r = math.hypot(px, py)
        lam, mu, m = _lam_mu(params, r, pt, R)
        vels[i] = (px * lam - py * mu, py * lam + px * mu, -m)
    if math.hypot(points[-1, 0], points[-1, 1]) < pole_r and points[-1, 2] < 0.0:
        f0 = float(_f(params, 0.0, R))
        points = np.vstack([points, [0.0, 0.0, -f0]])
        vels = np.vstack([vels, vels[-1]])
        s = np.append(s, s[-1] + h)
    return MeridianCurve(R=R, s=s, points=points, velocities=vels)


def meridian_geodesic_residual(spec: SphereSpec, curve: MeridianCurve,
                               r_min_frac: float = 0.1) -> float:
    """Max residual of nabla_M M + (H / w(r)^2) N along the curve.

    The derivative of the velocity's frame components is taken by
    4th-order finite differences in arclength and corrected with the
    connection table; samples with r < r_min_frac * R are skipped because
    the polar frame coefficients degenerate there.
    """
    params, R = spec.params, spec.R
    h = curve.s[1] - curve.s[0]
    m = curve.velocities
    n = len(curve.s)
    if n < 6:
        raise DomainError("curve too short for the residual stencil")
    gamma = christoffel_frame(params)
    worst = 0.0
    for i in range(2, n - 3):
        px, py, pt = curve.points[i]
        r = math.hypot(px, py)
        if r < r_min_frac * R:
            continue
        dm = (m[i - 2] - 8.0 * m[i - 1] + 8.0 * m[i + 1] - m[i + 2]) / (12.0 * h)
        conv = dm + np.einsum("i,j,ijk->k", m[i], m[i], gamma)
        w2 = 1.0 + (params.tau * params.epsilon * r) ** 2
        nvec = foliation_normal(params, Point(px, py, pt)).as_array()
        resid = conv + (spec.H / w2) * nvec
        worst = max(worst, float(np.linalg.norm(resid)))
    return worst


# ------------------------------------------------------------- limit fields


def euclidean_meridian_field(point: Point) -> TangentVector:
    """Meridian field of the round-sphere foliation (sigma -> 0, eps = 1).

    Components (x lam, y lam, -r/R) on (d_x, d_y, d_t) with
    lam = t / (r R) and R = sqrt(r^2 + t^2); azimuthal part is zero and
    the field is tangent to the Euclidean sphere through the point.
    """
    _require_off_axis(point)
    R = math.hypot(point.r, point.t)
    lam = point.t / (point.r * R)
    return TangentVector(point.x * lam, point.y * lam, -point.r / R)


def pansu_meridian_field(sigma: float, point: Point) -> TangentVector:
    """Scaled limit of the meridian field: horizontal, tangent to the
    sub-Riemannian limit sphere through the point.

    Coefficients are on the eps-independent horizontal frame
    (eps X, eps Y); the vertical coefficient is exactly zero.
    """
    _require_off_axis(point)
    r = point.r
    R = pansu_radius(sigma, r, point.t)
    sg = 1.0 if point.t > 0.0 else (-1.0 if point.t < 0.0 else 0.0)
    lam = sg * math.sqrt(max(R * R - r * r, 0.0)) / (r * R)
    mu = 1.0 / R
    return TangentVector(point.x * lam - point.y * mu, point.y * lam + point.x * mu, 0.0)


def limit_fields(params: ModelParams, point: Point) -> tuple[TangentVector, TangentVector]:
    """Both limit fields at a point: (Euclidean meridian, scaled horizontal)."""
    return euclidean_meridian_field(point), pansu_meridian_field(params.sigma, point)


def pansu_geodesic_residual(sigma: float, R: float, r: float, theta: float = 0.7) -> float:
    """Residual of nabla_M M = (2/R) J(M) for the scaled horizontal field.

    Evaluated on the limit sphere of parameter R at radius r (northern
    hemisphere) using exact partial derivatives of the coefficient
    functions; the connection terms cancel because the field is
    horizontal, so nabla_M M has components (M m1, M m2) on the
    horizontal frame.
    """
    if not (0.0 < r < R):
        raise DomainError(f"need 0 < r < R, got r = {r}, R = {R}")
    x, y = r * math.cos(theta), r * math.sin(theta)
    gap = math.sqrt(R * R - r * r)
    lam = gap / (r * R)
    dlam = -R / (r * r * gap)
    mu = 1.0 / R
    m1 = x * lam - y * mu
    m2 = y * lam + x * mu
    d1m1 = lam + x * x * dlam / r
    d2m1 = x * y * dlam / r - mu
    d1m2 = x * y * dlam / r + mu
    d2m2 = lam + y * y * dlam / r
    conv1 = m1 * d1m1 + m2 * d2m1
    conv2 = m1 * d1m2 + m2 * d2m2
    return math.hypot(conv1 + (2.0 / R) * m2, conv2 - (2.0 / R) * m1)
