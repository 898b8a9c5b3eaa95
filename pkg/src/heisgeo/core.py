"""Flat pseudohermitian structure of the Heisenberg group H_n.

H_n is R^{2n+1} with coordinates ordered (x_1, y_1, ..., x_n, y_n, z),
the non-commutative group law

    (X, z) * (X', z') = (X + X', z + z' + sum_j (y_j x'_j - x_j y'_j)),

the contact form Theta = dz + sum_j (x_j dy_j - y_j dx_j), and the
left-invariant frame of the contact planes

    e_{x_j} = d/dx_j + y_j d/dz,    e_{y_j} = d/dy_j - x_j d/dz.

The Levi metric makes this frame orthonormal, so contact vectors are
stored as their 2n frame coefficients; left translation preserves those
coefficients exactly, which is what makes every transport in this
package allocation-free and exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Dim = int

BASE_POINT_TOL = 1e-12


def check_dim(n: int) -> int:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"Heisenberg index n must be a positive integer, got {n!r}")
    return n


def _check_finite(values, what: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not all(math.isfinite(v) for v in out):
        raise ValueError(f"{what} must have finite entries, got {out}")
    return out


@dataclass(frozen=True)
class HPoint:
    """A point of H_n, coordinates (x_1, y_1, ..., x_n, y_n, z)."""

    coords: tuple[float, ...]

    def __post_init__(self):
        coords = _check_finite(self.coords, "HPoint coords")
        if len(coords) < 3 or len(coords) % 2 == 0:
            raise ValueError(f"HPoint needs 2n+1 coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def origin(cls, n: Dim) -> "HPoint":
        return cls((0.0,) * (2 * check_dim(n) + 1))

    @classmethod
    def from_xy(cls, xy, z: float = 0.0) -> "HPoint":
        return cls(tuple(xy) + (z,))

    @property
    def n(self) -> Dim:
        return (len(self.coords) - 1) // 2

    def x(self, j: int) -> float:
        """x_j for j = 1..n."""
        return self.coords[2 * (j - 1)]

    def y(self, j: int) -> float:
        return self.coords[2 * (j - 1) + 1]

    @property
    def z(self) -> float:
        return self.coords[-1]

    @property
    def xy(self) -> tuple[float, ...]:
        return self.coords[:-1]


@dataclass(frozen=True)
class ContactVector:
    """A vector in the contact plane at ``base``.

    ``xi`` holds the frame coefficients (a_1, b_1, ..., a_n, b_n) on
    (e_{x_1}, e_{y_1}, ..., e_{x_n}, e_{y_n}); the Levi norm is the
    Euclidean norm of ``xi``.
    """

    base: HPoint
    xi: tuple[float, ...]

    def __post_init__(self):
        xi = _check_finite(self.xi, "ContactVector xi")
        if len(xi) != 2 * self.base.n:
            raise ValueError(
                f"xi must have 2n = {2 * self.base.n} entries, got {len(xi)}")
        object.__setattr__(self, "xi", xi)

    @property
    def n(self) -> Dim:
        return self.base.n

    def levi_norm(self) -> float:
        return math.sqrt(sum(a * a for a in self.xi))


@dataclass(frozen=True)
class AmbientVector:
    """Contact-frame coefficients plus a coefficient on the Reeb field T = d/dz.

    The Levi pairing with a contact vector discards ``t``; it is stored
    so ambient projection directions keep their full decomposition.
    """

    base: HPoint
    xi: tuple[float, ...]
    t: float

    def __post_init__(self):
        xi = _check_finite(self.xi, "AmbientVector xi")
        if len(xi) != 2 * self.base.n:
            raise ValueError(
                f"xi must have 2n = {2 * self.base.n} entries, got {len(xi)}")
        if not math.isfinite(self.t):
            raise ValueError("AmbientVector t must be finite")
        object.__setattr__(self, "xi", xi)

    def contact_part(self) -> ContactVector:
        return ContactVector(self.base, self.xi)


def _require_same_dim(p: HPoint, q: HPoint) -> None:
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: n={p.n} vs n={q.n}")


def group_mul(p: HPoint, q: HPoint) -> HPoint:
    """Left translation L_p(q) of the Heisenberg group law."""
    _require_same_dim(p, q)
    n = p.n
    out = [0.0] * (2 * n + 1)
    twist = 0.0
    for j in range(n):
        xj, yj = p.coords[2 * j], p.coords[2 * j + 1]
        xq, yq = q.coords[2 * j], q.coords[2 * j + 1]
        out[2 * j] = xj + xq
        out[2 * j + 1] = yj + yq
        twist += yj * xq - xj * yq
    out[-1] = p.z + q.z + twist
    return HPoint(tuple(out))


def group_inv(p: HPoint) -> HPoint:
    """Group inverse; negation of all coordinates (the twist term is odd)."""
    return HPoint(tuple(-c for c in p.coords))


def pushforward(p: HPoint, v: ContactVector) -> ContactVector:
    """Pushforward of v under the left translation L_p.

    The contact frame is left-invariant, so the frame coefficients are
    carried unchanged; only the base point moves.
    """
    _require_same_dim(p, v.base)
    return ContactVector(group_mul(p, v.base), v.xi)


def pushforward_ambient(p: HPoint, v: AmbientVector) -> AmbientVector:
    """Transport of a frame-decomposed ambient vector; T is left-invariant too."""
    _require_same_dim(p, v.base)
    return AmbientVector(group_mul(p, v.base), v.xi, v.t)


def levi_inner(u: ContactVector, v: ContactVector) -> float:
    """Levi inner product: Euclidean dot of frame coefficients at a shared base."""
    _require_same_dim(u.base, v.base)
    if any(abs(a - b) > BASE_POINT_TOL for a, b in zip(u.base.coords, v.base.coords)):
        raise ValueError("levi_inner requires vectors at the same base point")
    return sum(a * b for a, b in zip(u.xi, v.xi))


def apply_J(v: ContactVector) -> ContactVector:
    """The standard almost complex structure: (a_j, b_j) -> (-b_j, a_j)."""
    xi = []
    for j in range(v.n):
        a, b = v.xi[2 * j], v.xi[2 * j + 1]
        xi.extend((-b, a))
    return ContactVector(v.base, tuple(xi))


def theta_eval(p: HPoint, w) -> float:
    """Contact form dz + sum_j (x_j dy_j - y_j dx_j) on a coordinate vector w."""
    w = tuple(float(c) for c in w)
    if len(w) != 2 * p.n + 1:
        raise ValueError(f"coordinate vector needs {2 * p.n + 1} entries, got {len(w)}")
    s = w[-1]
    for j in range(p.n):
        s += p.coords[2 * j] * w[2 * j + 1] - p.coords[2 * j + 1] * w[2 * j]
    return s


def frame_to_coords(v: ContactVector) -> tuple[float, ...]:
    """Coordinate components of a contact vector; z-part = sum_j (a_j y_j - b_j x_j)."""
    base = v.base
    zcomp = 0.0
    for j in range(base.n):
        a, b = v.xi[2 * j], v.xi[2 * j + 1]
        zcomp += a * base.coords[2 * j + 1] - b * base.coords[2 * j]
    return v.xi + (zcomp,)


def coords_to_frame(base: HPoint, w) -> AmbientVector:
    """Decompose a coordinate tangent vector at ``base`` into frame + Reeb parts."""
    w = tuple(float(c) for c in w)
    if len(w) != 2 * base.n + 1:
        raise ValueError(f"coordinate vector needs {2 * base.n + 1} entries")
    xi = w[:-1]
    t = theta_eval(base, w)
    return AmbientVector(base, xi, t)


def unit_ball_volume(k: int) -> float:
    """Volume of the unit k-ball, pi^(k/2) / Gamma(k/2 + 1)."""
    if k < 0:
        raise ValueError("ball dimension must be >= 0")
    return math.pi ** (k / 2.0) / math.gamma(k / 2.0 + 1.0)


def sphere_surface_area(k: int) -> float:
    """Surface area of the unit k-sphere in R^{k+1}, 2 pi^((k+1)/2) / Gamma((k+1)/2)."""
    if k < 0:
        raise ValueError("sphere dimension must be >= 0")
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


@dataclass(frozen=True)
class Constants:
    """Dimensional constants of H_n at scale lambda.

    c_n   : sqrt(pi) Gamma(n + 1/2) / (lambda^{2n+1} Gamma(n+1))
    omega : volume of the unit (2n-1)-ball
    s     : surface area of the unit (2n-1)-sphere in R^{2n}
    s * c_n is the p-area of the Pansu sphere of radius 1/lambda.
    """

    n: Dim
    lam: float
    c_n: float
    omega: float
    s: float

    @property
    def pansu_area(self) -> float:
        return self.s * self.c_n

    @property
    def projection_constant(self) -> float:
        """Projected p-area of the Pansu sphere along any of its p-normals."""
        return 2.0 * self.c_n * self.omega


def constants(n: Dim, lam: float) -> Constants:
    check_dim(n)
    if not (lam > 0.0):
        raise ValueError(f"lambda must be positive, got {lam}")
    c_n = math.sqrt(math.pi) * math.gamma(n + 0.5) / (lam ** (2 * n + 1) * math.gamma(n + 1.0))
    return Constants(n=n, lam=float(lam), c_n=c_n,
                     omega=unit_ball_volume(2 * n - 1),
                     s=sphere_surface_area(2 * n - 1))


def direction_to_pansu_point(direction, lam: float, tol: float = 1e-10):
    """Equator point of the Pansu sphere whose p-normal transports to ``direction``.

    ``direction`` is a unit vector in R^{2n} read as frame coefficients at
    the origin.  Returns (p, normal) with p = direction/lam on the equator
    {z = 0} and ``normal`` the unit p-normal of the Pansu sphere at p; its
    frame coefficients equal ``direction`` because the sqrt(1 - lam^2 r^2)
    terms of the p-normal vanish at r = 1/lam.
    """
    if not (lam > 0.0):
        raise ValueError(f"lambda must be positive, got {lam}")
    d = _check_finite(direction, "direction")
    if len(d) % 2 != 0 or len(d) < 2:
        raise ValueError(f"direction needs 2n entries, got {len(d)}")
    norm = math.sqrt(sum(c * c for c in d))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"direction must be a unit vector, |d| = {norm}")
    p = HPoint(tuple(c / lam for c in d) + (0.0,))
    return p, ContactVector(p, d)
