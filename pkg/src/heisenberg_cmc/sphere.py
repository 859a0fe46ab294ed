"""The rotationally symmetric constant-mean-curvature spheres.

For each R > 0 the sphere is the set |t| = f(|z|; R) with profile

    f(r; R) = (eps^2 / 2 tau) [ w(R)^2 arctan(p) + w(r)^2 p ],
    w(r)    = sqrt(1 + tau^2 eps^2 r^2),
    p(r; R) = tau eps sqrt(R^2 - r^2) / w(r),

mean curvature H = 1/(eps R), and eps*H*R = 1.  The family foliates
R^3 minus the origin, which defines the radius field R(r, t) and the
outward foliation normal used throughout the package.

Numerically everything is written in forms that stay finite through
tau = 0 (Euclidean degeneration):

    f   = sqrt(R^2-r^2) * (eps^3 / 2 w(r)) [ w(R)^2 atanc(p) + w(r)^2 ],
    f_r = -eps^3 r w(r) / sqrt(R^2 - r^2),
    f_R =  eps^3 R w(r) / (sqrt(R^2 - r^2) * ell(p)),

with atanc(p) = arctan(p)/p and ell(p) = 1/(1 + p arctan p).  All profile
helpers broadcast over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .ambient import ModelParams, Point, TangentVector
from .errors import ContractError, DomainError, NumericsError

__all__ = [
    "SphereSpec",
    "ProfileQuantities",
    "RadiusField",
    "profile_height",
    "profile_height_r",
    "profile_height_R",
    "profile_quantities",
    "radius_field",
    "sphere_through",
    "outer_normal",
    "foliation_normal",
    "sphere_area",
    "sphere_volume",
    "euclidean_profile",
    "pansu_profile",
    "pansu_radius",
    "graph_mean_curvature_fd",
]

_DOMAIN_RTOL = 1e-12


@dataclass(frozen=True)
class SphereSpec:
    """One sphere of the family: parameters plus its radius parameter R."""

    params: ModelParams
    R: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.R) and self.R > 0.0):
            raise DomainError(f"R must be positive and finite, got {self.R!r}")

    @property
    def H(self) -> float:
        """Mean curvature; eps * H * R = 1."""
        return 1.0 / (self.params.epsilon * self.R)


@dataclass(frozen=True)
class ProfileQuantities:
    """Pointwise profile data at radius r on the sphere of parameter R."""

    omega_r: float
    p: float
    ell: float
    rho: float


@dataclass(frozen=True)
class RadiusField:
    """Radius R(r, t) of the sphere through (r, t) and its partials."""

    value: float
    R_r: float
    R_t: float


# ----------------------------------------------------------------- internals


def _omega(params: ModelParams, r):
    te = params.tau * params.epsilon
    return np.sqrt(1.0 + np.square(te * np.asarray(r, dtype=float)))


def _atanc(p):
    """arctan(p)/p, continuous with value 1 at p = 0."""
    p = np.asarray(p, dtype=float)
    small = np.abs(p) < 1e-8
    safe = np.where(small, 1.0, p)
    out = np.where(small, 1.0 - p * p / 3.0, np.arctan(safe) / safe)
    return out


def _ell(p):
    p = np.asarray(p, dtype=float)
    return 1.0 / (1.0 + p * np.arctan(p))


def _gap(r, R):
    """R^2 - r^2 clamped at 0 (tiny negatives from roundoff are clipped)."""
    r = np.asarray(r, dtype=float)
    R = np.asarray(R, dtype=float)
    return np.maximum(R * R - r * r, 0.0)


def _p_north(params: ModelParams, r, R):
    return params.tau * params.epsilon * np.sqrt(_gap(r, R)) / _omega(params, r)


def _f_over_sqrt(params: ModelParams, r, R):
    """f(r;R) / sqrt(R^2 - r^2); smooth and positive up to r = R and tau = 0."""
    e = params.epsilon
    w = _omega(params, r)
    wR2 = 1.0 + np.square(params.tau * e * np.asarray(R, dtype=float))
    p = _p_north(params, r, R)
    return (e**3 / (2.0 * w)) * (wR2 * _atanc(p) + w * w)


def _f(params: ModelParams, r, R):
    return np.sqrt(_gap(r, R)) * _f_over_sqrt(params, r, R)


def _f_r(params: ModelParams, r, R):
    e = params.epsilon
    return -(e**3) * np.asarray(r, dtype=float) * _omega(params, r) / np.sqrt(_gap(r, R))


def _f_R(params: ModelParams, r, R):
    e = params.epsilon
    p = _p_north(params, r, R)
    return e**3 * np.asarray(R, dtype=float) * _omega(params, r) / (np.sqrt(_gap(r, R)) * _ell(p))


def _check_profile_domain(R: float, r, *, closed: bool) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    hi = R * (1.0 + _DOMAIN_RTOL) if closed else R * (1.0 - 1e-15)
    if np.any(r < 0.0) or np.any(r > hi) or not np.all(np.isfinite(r)):
        kind = "[0, R]" if closed else "[0, R)"
        raise DomainError(f"radius must lie in {kind} with R = {R}, got {r!r}")
    return r


def _scalar_or_array(r_in, value):
    if np.isscalar(r_in) or (isinstance(r_in, np.ndarray) and r_in.ndim == 0):
        return float(value)
    return value


# ------------------------------------------------------------------- profile


def profile_height(spec: SphereSpec, r):
    """Height f(r; R) of the upper hemisphere graph; f(R; R) = 0."""
    rr = _check_profile_domain(spec.R, r, closed=True)
    return _scalar_or_array(r, _f(spec.params, rr, spec.R))


def profile_height_r(spec: SphereSpec, r):
    """Radial derivative of the profile; negative on (0, R), -inf at r -> R."""
    rr = _check_profile_domain(spec.R, r, closed=False)
    return _scalar_or_array(r, _f_r(spec.params, rr, spec.R))


def profile_height_R(spec: SphereSpec, r):
    """Derivative of the profile in the sphere parameter R; positive on [0, R)."""
    rr = _check_profile_domain(spec.R, r, closed=False)
    return _scalar_or_array(r, _f_R(spec.params, rr, spec.R))


def profile_quantities(spec: SphereSpec, r: float, hemisphere: int = +1) -> ProfileQuantities:
    """Pointwise profile data; `hemisphere` (+1 north, -1 south) signs p."""
    rr = float(_check_profile_domain(spec.R, r, closed=True))
    if hemisphere not in (+1, -1):
        raise ContractError(f"hemisphere must be +1 or -1, got {hemisphere!r}")
    p = hemisphere * float(_p_north(spec.params, rr, spec.R))
    return ProfileQuantities(
        omega_r=float(_omega(spec.params, rr)),
        p=p,
        ell=float(_ell(p)),
        rho=spec.params.tau * spec.params.epsilon * rr,
    )


# -------------------------------------------------------------- radius field


def _radius_solve(params: ModelParams, r, t, max_iter: int = 120):
    """Solve f(r; R) = |t| for R >= r, vectorized.

    Safeguarded Newton in w = R^2 - r^2 on g(w) = f^2 - t^2, which is
    increasing and smooth with g'(w) = eps^3 w(r) fos(w) / ell(p) bounded
    away from 0; the bracket [0, (|t|/eps^3)^2] comes from f >= eps^3 sqrt(w).
    """
    e = params.epsilon
    r0 = np.asarray(r, dtype=float)
    t0 = np.asarray(t, dtype=float)
    shape = np.broadcast_shapes(r0.shape, t0.shape)
    r, t = np.broadcast_arrays(r0, t0)
    r = np.atleast_1d(r).astype(float)
    t = np.abs(np.atleast_1d(t).astype(float))
    t2 = t * t

    lo = np.zeros_like(r)
    hi = (t / e**3) ** 2
    w = hi.copy()
    tol = 1e-12 * np.maximum(1.0, t)

    done = t == 0.0
    w[done] = 0.0
    for _ in range(max_iter):
        if np.all(done):
            break
        R = np.sqrt(r * r + w)
        fos = _f_over_sqrt(params, r, R)
        f = np.sqrt(w) * fos
        g = w * fos * fos - t2
        resid = np.abs(g) / (f + t + 1e-300)
        newly = resid <= tol
        done = done | newly
        above = g > 0.0
        hi = np.where(~done & above, w, hi)
        lo = np.where(~done & ~above, w, lo)
        p = _p_north(params, r, R)
        dg = e**3 * _omega(params, r) * fos / _ell(p)
        step = np.where(done, 0.0, g / np.where(dg > 0, dg, 1.0))
        w_new = w - step
        bad = ~done & ((w_new <= lo) | (w_new >= hi) | ~np.isfinite(w_new))
        w_new = np.where(bad, 0.5 * (lo + hi), w_new)
        w = np.where(done, w, w_new)
        done = done | (hi - lo <= 4.0 * np.finfo(float).eps * np.maximum(hi, 1e-300))
    else:
        if not np.all(done):
            raise NumericsError("radius solve did not converge")
    return np.sqrt(r * r + w).reshape(shape)


def radius_field(params: ModelParams, r: float, t: float) -> RadiusField:
    """Radius of the sphere through (r, t) plus its partial derivatives.

    R_r = r ell(p) / R and R_t = sgn(t) sqrt(R^2-r^2) ell(p) / (eps^3 R w(r)),
    both continuous across the equator plane t = 0 (where R = r, R_r = 1,
    R_t = 0).
    """
    if r == 0.0 and t == 0.0:
        raise DomainError("the radius field is undefined at the origin")
    if r < 0.0:
        raise DomainError(f"r must be nonnegative, got {r!r}")
    R = float(_radius_solve(params, r, t))
    p = float(_p_north(params, r, R))
    ell = float(_ell(p))
    w = float(_omega(params, r))
    e = params.epsilon
    gap = math.sqrt(max(R * R - r * r, 0.0))
    R_r = r * ell / R
    R_t = math.copysign(1.0, t) * gap * ell / (e**3 * R * w) if t != 0.0 else 0.0
    return RadiusField(value=R, R_r=R_r, R_t=R_t)


def sphere_through(params: ModelParams, point: Point) -> SphereSpec:
    """The member of the family passing through `point` (not the origin)."""
    return SphereSpec(params, radius_field(params, point.r, point.t).value)


# ------------------------------------------------------------------- normals


def _normal_components(params: ModelParams, point: Point, R: float) -> TangentVector:
    sg = float(np.sign(point.t))
    r = point.r
    gap = math.sqrt(max(R * R - r * r, 0.0))
    w = float(_omega(params, r))
    p = sg * params.tau * params.epsilon * gap / w
    q = sg * gap / w  # p / (tau * eps), finite for all tau
    return TangentVector(
        (point.x + point.y * p) / R,
        (point.y - point.x * p) / R,
        q / R,
    )


def outer_normal(spec: SphereSpec, point: Point, tol: float = 1e-8) -> TangentVector:
    """Outward unit normal of the sphere at a point on it.

    Well defined at the poles (where it is +/- T) and on the equator
    (where it is radial).  Points farther than `tol` from the sphere are
    rejected.
    """
    r = point.r
    scale = max(1.0, spec.R)
    if r > spec.R * (1.0 + _DOMAIN_RTOL) + tol:
        raise ContractError(f"point with |z| = {r} is not on the sphere R = {spec.R}")
    f = float(_f(spec.params, min(r, spec.R), spec.R))
    if abs(abs(point.t) - f) > tol * scale:
        raise ContractError(
            f"point is off the sphere: | |t| - f | = {abs(abs(point.t) - f):.3e}"
        )
    return _normal_components(spec.params, point, spec.R)


def foliation_normal(params: ModelParams, point: Point) -> TangentVector:
    """Outward unit normal of the sphere family at any point except the origin."""
    if point.r == 0.0 and point.t == 0.0:
        raise DomainError("the foliation normal is undefined at the origin")
    R = float(_radius_solve(params, point.r, point.t))
    return _normal_components(params, point, R)


# ------------------------------------------------------------- area / volume


def _quad(fun, a, b, what: str, epsabs=1e-13, epsrel=1e-11) -> float:
    val, err = quad(fun, a, b, epsabs=epsabs, epsrel=epsrel, limit=200)
    if not math.isfinite(val) or err > 1e-6 * max(1.0, abs(val)):
        raise NumericsError(f"quadrature for {what} did not converge (estimate {val}, err {err})")
    return val


def sphere_area(spec: SphereSpec) -> float:
    """Riemannian area of the full sphere (both hemisphere graphs).

    Integrates (1/eps) sqrt(eps^6 + f_r^2 + sigma^2 r^2) over the disk; the
    square-root rim singularity of f_r is removed exactly by r = R sin(phi),
    under which the integrand density becomes
    r * sqrt(eps^6 R^2 cos^2(phi) + eps^6 r^2 w(r)^2 + sigma^2 r^2 R^2 cos^2(phi)).
    """
    e, s = spec.params.epsilon, spec.params.sigma
    R = spec.R

    def integrand(phi: float) -> float:
        sn, cs = math.sin(phi), math.cos(phi)
        r = R * sn
        w2 = 1.0 + (spec.params.tau * e * r) ** 2
        c2 = (R * cs) ** 2
        return r * math.sqrt(e**6 * c2 + e**6 * r * r * w2 + s * s * r * r * c2)

    return (4.0 * math.pi / e) * _quad(integrand, 0.0, 0.5 * math.pi, "sphere area")


def sphere_volume(spec: SphereSpec) -> float:
    """Lebesgue volume enclosed by the sphere."""
    R = spec.R

    def integrand(phi: float) -> float:
        r = R * math.sin(phi)
        return float(_f(spec.params, r, R)) * r * R * math.cos(phi)

    return 4.0 * math.pi * _quad(integrand, 0.0, 0.5 * math.pi, "sphere volume")


# ------------------------------------------------------------ limit profiles


def euclidean_profile(R: float, r):
    """Limit profile sqrt(R^2 - r^2) (tau -> 0 at eps = 1)."""
    rr = _check_profile_domain(R, r, closed=True)
    return _scalar_or_array(r, np.sqrt(_gap(rr, R)))


def pansu_profile(sigma: float, R: float, r):
    """Sub-Riemannian limit profile (sigma/2)[R^2 arccos(r/R) + r sqrt(R^2-r^2)]."""
    rr = _check_profile_domain(R, r, closed=True)
    ratio = np.clip(np.asarray(rr, dtype=float) / R, 0.0, 1.0)
    val = 0.5 * sigma * (R * R * np.arccos(ratio) + rr * np.sqrt(_gap(rr, R)))
    return _scalar_or_array(r, val)


def pansu_radius(sigma: float, r: float, t: float) -> float:
    """Radius of the limit-profile sphere through (r, t); inverse of pansu_profile."""
    if sigma <= 0.0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    if r < 0.0 or (r == 0.0 and t == 0.0):
        raise DomainError(f"invalid point (r, t) = ({r}, {t})")
    ta = abs(t)
    if ta == 0.0:
        return r
    hi = max(2.0 * r, math.sqrt(4.0 * ta / sigma), 1e-12)
    for _ in range(200):
        if float(pansu_profile(sigma, hi, min(r, hi))) >= ta and hi >= r:
            break
        hi *= 2.0
    else:
        raise NumericsError("pansu_radius bracket expansion failed")
    return brentq(lambda R: float(pansu_profile(sigma, R, r)) - ta, max(r, 1e-300), hi,
                  xtol=1e-15, rtol=8.9e-16, maxiter=200)


# ----------------------------------------------------- finite-difference CMC


def graph_mean_curvature_fd(params: ModelParams, f, r, step: float):
    """Mean curvature of the radial graph t = f(r) by finite differences.

    Returns -(1/2 eps) * (1/r) * d/dr [ r f'(r) / sqrt(eps^6 + f'^2 + sigma^2 r^2) ]
    using only evaluations of `f` (4th-order central differences for both
    derivative levels).  This is the independent oracle for the constancy
    of the mean curvature on the sphere graphs, where the value must be
    1/(eps R).
    """
    e, s = params.epsilon, params.sigma
    r = np.asarray(r, dtype=float)
    d = step

    def fprime(x):
        return (f(x - 2 * d) - 8.0 * f(x - d) + 8.0 * f(x + d) - f(x + 2 * d)) / (12.0 * d)

    def flux(x):
        fp = fprime(x)
        return x * fp / np.sqrt(e**6 + fp * fp + s * s * x * x)

    h = step
    div = (flux(r - 2 * h) - 8.0 * flux(r - h) + 8.0 * flux(r + h) - flux(r + 2 * h)) / (12.0 * h)
    return -(0.5 / e) * div / r
