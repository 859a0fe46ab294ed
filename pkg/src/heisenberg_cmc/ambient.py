"""Left-invariant geometry of the ambient group.

The space is C x R ~ R^3 with coordinates (x, y, t).  For parameters
eps > 0 and sigma (twist), the orthonormal left-invariant frame is

    X = (1/eps) (d_x + sigma*y d_t),
    Y = (1/eps) (d_y - sigma*x d_t),
    T = eps^2 d_t,

with tau = sigma / eps^4, so that [X, Y] = -2*tau*T and
[X, T] = [Y, T] = 0.  The metric makes (X, Y, T) orthonormal; its volume
is the Lebesgue measure of R^3 for every (eps, sigma).  sigma -> 0 at
eps = 1 degenerates to flat Euclidean space; tau = 0 is admitted here even
though the group is then abelian, so that limit regimes can be evaluated.

Tangent vectors are stored as coefficients on (X, Y, T); in that basis the
metric is the identity and the Levi-Civita connection reduces to the
constant table `christoffel_frame`.  Curvature operations act on
constant-coefficient frame fields, which is all the rest of the package
needs (curvature is tensorial).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError

__all__ = [
    "ModelParams",
    "Point",
    "TangentVector",
    "frame_in_coordinates",
    "coordinate_metric",
    "vector_to_coordinates",
    "vector_from_coordinates",
    "vertical_component",
    "horizontal_rotation",
    "christoffel_frame",
    "covariant_derivative",
    "lie_bracket",
    "curvature_operator",
    "ricci",
]


@dataclass(frozen=True)
class ModelParams:
    """Metric family (eps, sigma); the twist tau = sigma/eps^4 is derived."""

    epsilon: float
    sigma: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise DomainError(f"epsilon must be positive and finite, got {self.epsilon!r}")
        if not math.isfinite(self.sigma):
            raise DomainError(f"sigma must be finite, got {self.sigma!r}")

    @property
    def tau(self) -> float:
        return self.sigma / self.epsilon**4

    @classmethod
    def from_tau(cls, epsilon: float, tau: float) -> "ModelParams":
        """Alternate constructor from (eps, tau); stores sigma = tau*eps^4."""
        return cls(epsilon, tau * epsilon**4)


@dataclass(frozen=True)
class Point:
    """A point (x, y, t) of C x R."""

    x: float
    y: float
    t: float

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.t], dtype=float)

    @classmethod
    def from_array(cls, a) -> "Point":
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class TangentVector:
    """Coefficients of a tangent vector on the orthonormal frame (X, Y, T)."""

    aX: float
    aY: float
    aT: float

    def as_array(self) -> np.ndarray:
        return np.array([self.aX, self.aY, self.aT], dtype=float)

    @classmethod
    def from_array(cls, a) -> "TangentVector":
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def dot(self, other: "TangentVector") -> float:
        return self.aX * other.aX + self.aY * other.aY + self.aT * other.aT

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.aX + other.aX, self.aY + other.aY, self.aT + other.aT)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.aX - other.aX, self.aY - other.aY, self.aT - other.aT)

    def __mul__(self, c: float) -> "TangentVector":
        return TangentVector(c * self.aX, c * self.aY, c * self.aT)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return self * -1.0


def frame_in_coordinates(params: ModelParams, p: Point) -> np.ndarray:
    """Coordinate components of the frame at p; row i is the i-th frame field."""
    e, s = params.epsilon, params.sigma
    return np.array(
        [
            [1.0 / e, 0.0, s * p.y / e],
            [0.0, 1.0 / e, -s * p.x / e],
            [0.0, 0.0, e * e],
        ]
    )


def coordinate_metric(params: ModelParams, p: Point) -> np.ndarray:
    """Metric tensor in the coordinates (x, y, t) at p."""
    a_inv = np.linalg.inv(frame_in_coordinates(params, p))
    return a_inv @ a_inv.T


def vector_to_coordinates(params: ModelParams, p: Point, v: TangentVector) -> np.ndarray:
    """Coordinate components of the frame vector v at p."""
    return frame_in_coordinates(params, p).T @ v.as_array()


def vector_from_coordinates(params: ModelParams, p: Point, coords) -> TangentVector:
    """Frame coefficients of the coordinate vector `coords` at p."""
    e, s = params.epsilon, params.sigma
    c1, c2, c3 = float(coords[0]), float(coords[1]), float(coords[2])
    return TangentVector(e * c1, e * c2, (c3 - s * (p.y * c1 - p.x * c2)) / (e * e))


def vertical_component(v: TangentVector) -> float:
    """The contact form applied to v, i.e. the inner product with T."""
    return v.aT


def horizontal_rotation(v: TangentVector, tol: float = 1e-12) -> TangentVector:
    """Rotate a horizontal vector by +pi/2 in the horizontal plane.

    Sends X to Y and Y to -X; squares to minus the identity on the
    horizontal distribution.
    """
    if abs(v.aT) > tol * max(1.0, v.norm()):
        raise ContractError(f"horizontal_rotation needs aT ~ 0, got {v.aT!r}")
    return TangentVector(-v.aY, v.aX, 0.0)


def christoffel_frame(params: ModelParams) -> np.ndarray:
    """Connection table G[i,j,k]: nabla_{e_i} e_j = sum_k G[i,j,k] e_k.

    Nonzero entries: nabla_X Y = -tau T, nabla_Y X = tau T,
    nabla_X T = nabla_T X = tau Y, nabla_Y T = nabla_T Y = -tau X.
    """
    t = params.tau
    g = np.zeros((3, 3, 3))
    g[0, 1, 2] = -t
    g[1, 0, 2] = t
    g[0, 2, 1] = t
    g[2, 0, 1] = t
    g[1, 2, 0] = -t
    g[2, 1, 0] = -t
    return g


def _connect(gamma: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("i,j,ijk->k", u, v, gamma)


def covariant_derivative(
    params: ModelParams,
    u: TangentVector,
    v: TangentVector,
    dv_along_u,
) -> TangentVector:
    """nabla_u v for a field v with frame coefficients v and derivatives dv.

    `dv_along_u` must be the 3 directional derivatives of v's frame
    coefficients along u (all zeros for a constant-coefficient field); it
    is combined with the constant connection table by the Leibniz rule.
    """
    if dv_along_u is None:
        raise ContractError("covariant_derivative requires the derivative data dv_along_u")
    dv = np.asarray(dv_along_u, dtype=float)
    if dv.shape != (3,):
        raise ContractError(f"dv_along_u must have shape (3,), got {dv.shape}")
    gamma = christoffel_frame(params)
    out = dv + _connect(gamma, u.as_array(), v.as_array())
    return TangentVector.from_array(out)


def lie_bracket(params: ModelParams, u: TangentVector, v: TangentVector) -> TangentVector:
    """[u, v] for constant-coefficient frame fields; only [X, Y] = -2 tau T survives."""
    c = u.aX * v.aY - u.aY * v.aX
    return TangentVector(0.0, 0.0, -2.0 * params.tau * c)


def curvature_operator(
    params: ModelParams,
    u: TangentVector,
    v: TangentVector,
    w: TangentVector,
) -> TangentVector:
    """R(u, v)w = nabla_u nabla_v w - nabla_v nabla_u w - nabla_[u,v] w.

    u, v, w are treated as constant-coefficient frame fields, which is
    sufficient because curvature is tensorial.
    """
    gamma = christoffel_frame(params)
    ua, va, wa = u.as_array(), v.as_array(), w.as_array()
    dvw = _connect(gamma, va, wa)
    duw = _connect(gamma, ua, wa)
    br = lie_bracket(params, u, v).as_array()
    out = _connect(gamma, ua, dvw) - _connect(gamma, va, duw) - _connect(gamma, br, wa)
    return TangentVector.from_array(out)


def ricci(params: ModelParams, n: TangentVector, tol: float = 1e-12) -> float:
    """Ricci curvature in the unit direction n: sum_i <R(e_i, n)n, e_i>."""
    if abs(n.norm() - 1.0) > tol:
        raise ContractError(f"ricci requires |n| = 1, got |n| = {n.norm()!r}")
    basis = (TangentVector(1, 0, 0), TangentVector(0, 1, 0), TangentVector(0, 0, 1))
    return sum(curvature_operator(params, e, n, n).dot(e) for e in basis)
