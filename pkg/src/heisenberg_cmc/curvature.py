"""Second fundamental form and the umbilicity correction of the spheres.

On the sphere of parameter R, away from the poles, the adapted tangent
frame (X1, X2) is orthonormal with X1 horizontal.  In that frame the
second fundamental form is the closed 2x2 matrix

    h = 1/(1+rho^2) [[H (1+2 rho^2), tau rho^2], [tau rho^2, H]],

rho = tau*eps*r, with principal curvatures H +/- rho^2/(1+rho^2) *
sqrt(H^2+tau^2) and principal directions rotated from (X1, X2) by the
r-independent angle arctan(tau / (H + sqrt(H^2+tau^2))).

The corrected operator adds a rotated rank-one vertical term to h,

    k = h + (2 tau^2 / sqrt(H^2+tau^2)) q (theta x theta) q^{-1},

with q the rotation by the same angle; its trace-free part vanishes
identically on the spheres, which is what the tests pin down.  A
finite-difference shape operator (differentiating the foliation normal)
serves as the independent oracle for all closed forms here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ambient import (
    Point,
    TangentVector,
    christoffel_frame,
    vector_to_coordinates,
)
from .errors import ContractError, DomainError
from .sphere import SphereSpec, _f, _omega, foliation_normal, outer_normal

__all__ = [
    "TangentFrame",
    "ShapeData",
    "CorrectedShapeData",
    "principal_angle",
    "tangent_frame",
    "second_fundamental_form",
    "shape_operator_fd",
    "assemble_corrected_shape",
    "corrected_shape",
]


@dataclass(frozen=True)
class TangentFrame:
    """Adapted orthonormal tangent frame at a non-pole sphere point."""

    X1: TangentVector
    X2: TangentVector
    a: float
    b: float
    c: float
    p: float


@dataclass(frozen=True)
class ShapeData:
    """Second fundamental form in the adapted frame, plus eigendata."""

    h: np.ndarray  # 2x2 symmetric
    kappa1: float
    kappa2: float
    beta: float
    K1: TangentVector | None
    K2: TangentVector | None


@dataclass(frozen=True)
class CorrectedShapeData:
    """The corrected operator, its trace-free part, and the rotation angle."""

    k: np.ndarray
    k0: np.ndarray
    alpha: float
    k0_norm: float


def principal_angle(H: float, tau: float) -> float:
    """Rotation angle of the principal directions relative to (X1, X2).

    Equals (1/2) arctan(tau/H), written in the form
    arctan(tau / (H + hypot(H, tau))) which lies in (-pi/4, pi/4).
    """
    if H <= 0.0:
        raise DomainError(f"the rotation angle needs H > 0, got {H!r}")
    return math.atan(tau / (H + math.hypot(H, tau)))


def _on_sphere_or_raise(spec: SphereSpec, point: Point, tol: float = 1e-8) -> None:
    r = point.r
    if r > spec.R * (1.0 + 1e-12) + tol:
        raise ContractError(f"point with |z| = {r} is not on the sphere R = {spec.R}")
    f = float(_f(spec.params, min(r, spec.R), spec.R))
    if abs(abs(point.t) - f) > tol * max(1.0, spec.R):
        raise ContractError(
            f"point is off the sphere: | |t| - f | = {abs(abs(point.t) - f):.3e}"
        )


def tangent_frame(spec: SphereSpec, point: Point) -> TangentFrame:
    """The adapted orthonormal frame (X1 horizontal, X2) at a sphere point.

    Undefined at the poles.  Signs are fixed so that X1 points along the
    positive-rotation direction (-y, x) and (X1, X2, outward normal) is
    positively oriented.
    """
    _on_sphere_or_raise(spec, point)
    r = point.r
    if r <= 1e-12 * spec.R:
        raise DomainError("the adapted tangent frame is undefined at the poles")
    params, R = spec.params, spec.R
    sg = 1.0 if point.t >= 0.0 else -1.0
    w_r = float(_omega(params, r))
    w_R = float(_omega(params, R))
    gap = math.sqrt(max(R * R - r * r, 0.0))
    a = w_r / (r * w_R)
    b = sg * gap / (r * R * w_R)
    c = r * w_R / (R * w_r)
    p = sg * params.tau * params.epsilon * gap / w_r
    x, y = point.x, point.y
    x1 = TangentVector(-a * (y - x * p), a * (x + y * p), 0.0)
    x2 = TangentVector(-b * (x + y * p), -b * (y - x * p), c)
    return TangentFrame(X1=x1, X2=x2, a=a, b=b, c=c, p=p)


def second_fundamental_form(spec: SphereSpec, point: Point) -> ShapeData:
    """Closed-form second fundamental form at a sphere point.

    At the poles the limit h = H * Id is returned and the principal
    directions are undefined (K1 = K2 = None).
    """
    _on_sphere_or_raise(spec, point)
    params, R, H = spec.params, spec.R, spec.H
    tau = params.tau
    rho = tau * params.epsilon * point.r
    den = 1.0 + rho * rho
    h = np.array(
        [
            [H * (1.0 + 2.0 * rho * rho) / den, tau * rho * rho / den],
            [tau * rho * rho / den, H / den],
        ]
    )
    spread = (rho * rho / den) * math.hypot(H, tau)
    kappa1, kappa2 = H + spread, H - spread
    beta = principal_angle(H, tau)
    if point.r <= 1e-12 * R:
        return ShapeData(h=h, kappa1=kappa1, kappa2=kappa2, beta=beta, K1=None, K2=None)
    fr = tangent_frame(spec, point)
    cb, sb = math.cos(beta), math.sin(beta)
    k1 = cb * fr.X1 + sb * fr.X2
    k2 = -sb * fr.X1 + cb * fr.X2
    return ShapeData(h=h, kappa1=kappa1, kappa2=kappa2, beta=beta, K1=k1, K2=k2)


def shape_operator_fd(
    spec: SphereSpec,
    point: Point,
    v: TangentVector,
    step: float = 1e-5,
) -> TangentVector:
    """Finite-difference shape operator: the derivative of the foliation
    normal along the tangent vector v, connection-corrected and projected
    back to the tangent plane.

    This is the independent oracle for the closed forms above; it never
    consults them.
    """
    _on_sphere_or_raise(spec, point)
    n0 = outer_normal(spec, point)
    if abs(v.dot(n0)) > 1e-8 * max(1.0, v.norm()):
        raise ContractError("shape_operator_fd requires a tangent vector")
    vn = v.norm()
    if vn == 0.0:
        return TangentVector(0.0, 0.0, 0.0)
    u = v * (1.0 / vn)
    params = spec.params
    ucoords = vector_to_coordinates(params, point, u)
    s = step * max(1.0, np.max(np.abs(point.as_array())))
    if s == 0.0:
        raise ContractError("degenerate step")
    pa = point.as_array()
    np_plus = foliation_normal(params, Point.from_array(pa + s * ucoords)).as_array()
    np_minus = foliation_normal(params, Point.from_array(pa - s * ucoords)).as_array()
    dn = (np_plus - np_minus) / (2.0 * s)
    gamma = christoffel_frame(params)
    corr = np.einsum("i,j,ijk->k", u.as_array(), n0.as_array(), gamma)
    res = TangentVector.from_array(dn + corr)
    res = res - res.dot(n0) * n0
    return vn * res


def assemble_corrected_shape(H: float, tau: float, h: np.ndarray, theta2: float) -> CorrectedShapeData:
    """Assemble k = h + (2 tau^2/sqrt(H^2+tau^2)) q (theta x theta) q^{-1}.

    `h` is the 2x2 second fundamental form in the adapted frame and
    `theta2` the vertical component of X2 (that of X1 vanishes by
    construction).  Exposed separately so negative controls can inject a
    perturbed h.
    """
    alpha = principal_angle(H, tau)
    ca, sa = math.cos(alpha), math.sin(alpha)
    q = np.array([[ca, -sa], [sa, ca]])
    vert = np.array([[0.0, 0.0], [0.0, theta2 * theta2]])
    k = np.asarray(h, dtype=float) + (2.0 * tau * tau / math.hypot(H, tau)) * (q @ vert @ q.T)
    k0 = k - 0.5 * np.trace(k) * np.eye(2)
    return CorrectedShapeData(k=k, k0=k0, alpha=alpha, k0_norm=float(np.linalg.norm(k0)))


def corrected_shape(spec: SphereSpec, point: Point) -> CorrectedShapeData:
    """The corrected operator at a non-pole sphere point (trace-free part ~ 0)."""
    shape = second_fundamental_form(spec, point)
    frame = tangent_frame(spec, point)
    return assemble_corrected_shape(spec.H, spec.params.tau, shape.h, frame.c)
