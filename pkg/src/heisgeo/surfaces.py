"""Hypersurfaces in H_n with their p-area densities and p-normal vectors.

Three representations:

* ``GraphSurface``   -- z = f(x, y) over a closed disk, one or both signs;
* ``RotationalSurface`` -- profiles z = h+(r) >= 0 and z = h-(r) <= 0
  rotated about the z-axis;
* ``PansuSphere``    -- the rotationally symmetric double graph of

      f(r) = (lambda r sqrt(1 - lambda^2 r^2) + arccos(lambda r)) / (2 lambda^2)

  with equator radius 1/lambda and poles at z = +- pi/(4 lambda^2).

For a graph the p-area density at p = (x, y, z) is

    D(p) = [ sum_j (f_{x_j} - y_j)^2 + (f_{y_j} + x_j)^2 ]^{1/2},

and the unit p-normal is N(p) = -(1/D) sum_j [(f_{x_j} - y_j) e_{x_j}
+ (f_{y_j} + x_j) e_{y_j}].  For a rotational profile the cross terms
cancel and D reduces to sqrt(h_r^2 + r^2).  Points with D below
``SINGULAR_TOL`` are singular: the tangent plane coincides with the
contact plane, no p-normal exists, and integrands are defined as 0 there.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import exprparse
from .core import ContactVector, HPoint, check_dim, sphere_surface_area
from .quadrature import IntegralResult, QuadratureSpec, radial_integral, surface_integral

SINGULAR_TOL = 1e-10


class SingularPointError(ValueError):
    """Raised when a p-normal is requested at a singular point (D ~ 0)."""


class SchemaError(ValueError):
    """Raised by surface_from_spec with the offending field in the message."""


# ------------------------------------------------------------------ profiles

def pansu_height(lam: float, r: float) -> float:
    """Height of the upper Pansu graph at radius r, for 0 <= lam*r <= 1."""
    if not (lam > 0.0):
        raise ValueError("lambda must be positive")
    s = lam * r
    if s < 0.0 or s > 1.0 + 1e-12:
        raise ValueError(f"pansu_height needs 0 <= lambda*r <= 1, got {s}")
    s = min(s, 1.0)
    return (s * math.sqrt(1.0 - s * s) + math.acos(s)) / (2.0 * lam * lam)


def pansu_gradient(lam: float, x, y):
    """Gradient of the upper Pansu height: f_{x_j} = -lam x_j r / sqrt(1 - lam^2 r^2)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    r2 = float(np.dot(x, x) + np.dot(y, y))
    r = math.sqrt(r2)
    if lam * r >= 1.0:
        raise ValueError("gradient undefined at the equator lambda*r = 1")
    factor = -lam * r / math.sqrt(1.0 - lam * lam * r2)
    grad = np.empty(2 * x.size)
    grad[0::2] = factor * x
    grad[1::2] = factor * y
    return grad


@dataclass(frozen=True)
class PansuProfile:
    """h(r) = sign * pansu height; h_r = sign * (-lam r^2 / sqrt(1 - lam^2 r^2))."""

    lam: float
    sign: float = 1.0

    def value(self, r):
        r = np.asarray(r, dtype=float)
        s = np.clip(self.lam * r, 0.0, 1.0)
        return self.sign * (s * np.sqrt(1.0 - s * s) + np.arccos(s)) / (2.0 * self.lam ** 2)

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        s2 = np.clip(1.0 - (self.lam * r) ** 2, 0.0, None)
        with np.errstate(divide="ignore"):
            return self.sign * (-self.lam * r * r / np.sqrt(s2))

    singular_outer = True


@dataclass(frozen=True)
class SphereProfile:
    """h(r) = sign * sqrt(R^2 - r^2), the Euclidean hemisphere."""

    R: float
    sign: float = 1.0

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.sign * np.sqrt(np.clip(self.R ** 2 - r * r, 0.0, None))

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return self.sign * (-r / np.sqrt(np.clip(self.R ** 2 - r * r, 0.0, None)))

    singular_outer = True


@dataclass(frozen=True)
class ParaboloidProfile:
    """h(r) = sign * c * (R^2 - r^2)."""

    c: float
    R: float
    sign: float = 1.0

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.sign * self.c * (self.R ** 2 - r * r)

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        return self.sign * (-2.0 * self.c * r)

    singular_outer = False


@dataclass(frozen=True)
class FlatProfile:
    """h identically 0."""

    def value(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def deriv(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    singular_outer = False


@dataclass(frozen=True)
class ExpressionProfile:
    """Profile h(r) given as an expression in r (R, lambda, pi also bound)."""

    src: str
    R: float
    lam: float = 1.0
    ast: exprparse.Ast = field(compare=False, default=None)

    def __post_init__(self):
        ast = exprparse.parse_expr(self.src)
        extra = exprparse.free_variables(ast) - {"r", "R", "lambda", "pi"}
        if extra:
            name = sorted(extra)[0]
            pos = _variable_offset(ast, name)
            raise exprparse.UnboundVariableError(f"unbound variable {name!r}", pos)
        object.__setattr__(self, "ast", ast)

    def _bindings(self, r) -> dict:
        return {"r": r, "R": self.R, "lambda": self.lam, "pi": math.pi}

    def value(self, r):
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.broadcast_to(
            exprparse.eval_ast_array(self.ast, self._bindings(r_arr)), r_arr.shape)
        return out if np.ndim(r) else float(out[0])

    def deriv(self, r):
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        _, d = exprparse.eval_dual_array(self.ast, "r", self._bindings(r_arr))
        out = np.broadcast_to(d, r_arr.shape)
        return out if np.ndim(r) else float(out[0])

    @property
    def singular_outer(self) -> bool:
        # growth probe: a 1/sqrt(R - r)-type derivative grows ~1000x
        # between these radii, a smooth one stays flat
        try:
            d_near = float(self.deriv(self.R * (1.0 - 1e-6)))
            d_edge = float(self.deriv(self.R * (1.0 - 1e-12)))
        except exprparse.ExprError:
            return True
        if not (math.isfinite(d_near) and math.isfinite(d_edge)):
            return True
        return abs(d_edge) > 100.0 * max(abs(d_near), 1e-12)


def _variable_offset(ast, name: str) -> int | None:
    match ast:
        case exprparse.Variable(n) if n == name:
            return ast.pos if ast.pos >= 0 else None
        case exprparse.Unary(_, child):
            return _variable_offset(child, name)
        case exprparse.Binary(_, left, right):
            pos = _variable_offset(left, name)
            return pos if pos is not None else _variable_offset(right, name)
        case exprparse.Call(_, args):
            for a in args:
                pos = _variable_offset(a, name)
                if pos is not None:
                    return pos
    return None


BUILTIN_PROFILES = ("pansu", "sphere", "flat")  # plus "paraboloid:<c>"


def make_profile(spec: str, R: float, lam: float, sign: float):
    """Profile from a builtin name or an expression string in r."""
    text = spec.strip()
    if text == "pansu":
        return PansuProfile(lam, sign)
    if text == "sphere":
        return SphereProfile(R, sign)
    if text == "flat":
        return FlatProfile()
    if text.startswith("paraboloid:"):
        c = float(text.split(":", 1)[1])
        return ParaboloidProfile(c, R, sign)
    return ExpressionProfile(text, R, lam)


# ------------------------------------------------------------------ surfaces

@dataclass(frozen=True)
class SurfacePoint:
    """A quadrature point on a surface.

    ``params`` is (r, unit direction in R^{2n}, side); ``area_density``
    is the p-area density against the parameter measure dr dS, i.e.
    D * r^{2n-1}; ``normal`` is present iff the point is nonsingular.
    """

    params: tuple
    coords: HPoint
    area_density: float
    normal: ContactVector | None


def _apply_J_array(v: np.ndarray) -> np.ndarray:
    """(a_1, b_1, ...) -> (-b_1, a_1, ...) on interleaved pair coordinates."""
    out = np.empty_like(v)
    out[..., 0::2] = -v[..., 1::2]
    out[..., 1::2] = v[..., 0::2]
    return out


class _RotationalBase:
    """Shared machinery for profile-of-radius surfaces."""

    def side_keys(self):
        return ("upper", "lower")

    def profile(self, side):
        return self.h_plus if side == "upper" else self.h_minus

    def singular_outer(self, side) -> bool:
        return bool(self.profile(side).singular_outer)

    @property
    def param_radius(self) -> float:
        return self.R

    def density_radial(self, r, side):
        """D(r) = sqrt(h_r^2 + r^2), the rotational p-area density."""
        r = np.asarray(r, dtype=float)
        return np.hypot(self.profile(side).deriv(r), r)

    def gradient_combination(self, r: float, v: np.ndarray, side) -> np.ndarray:
        """The 2n-vector g with N = -g/D; g = h_r v + r J v for profiles."""
        h_r = float(self.profile(side).deriv(r))
        return h_r * v + r * _apply_J_array(v)

    def surface_point(self, r: float, v, side) -> SurfacePoint:
        v = np.asarray(v, dtype=float)
        xy = r * v
        z = float(self.profile(side).value(r))
        coords = HPoint(tuple(xy) + (z,))
        h_r = float(self.profile(side).deriv(r))
        D = math.hypot(h_r, r) if math.isfinite(h_r) else math.inf
        density = D * r ** (2 * self.n - 1) if math.isfinite(D) else math.inf
        normal = None
        if SINGULAR_TOL < D < math.inf:
            g = h_r * v + r * _apply_J_array(v)
            normal = ContactVector(coords, tuple(-g / D))
        return SurfacePoint((r, tuple(v), side), coords, density, normal)


@dataclass(frozen=True)
class RotationalSurface(_RotationalBase):
    """Double graph of radial profiles h+ >= 0 and h- <= 0 on [0, R]."""

    n: int
    R: float
    h_plus: object
    h_minus: object

    def __post_init__(self):
        check_dim(self.n)
        if not (self.R > 0.0):
            raise ValueError("R must be positive")
        grid = np.linspace(0.0, self.R, 65)
        hp = np.asarray(self.h_plus.value(grid), dtype=float)
        hm = np.asarray(self.h_minus.value(grid), dtype=float)
        if np.any(hp < -1e-12):
            raise ValueError("h_plus must be >= 0 on [0, R]")
        if np.any(hm > 1e-12):
            raise ValueError("h_minus must be <= 0 on [0, R]")

    def as_graph(self, side="upper") -> "GraphSurface":
        """The one-sided graph z = h(|xy|) induced by one profile."""
        return GraphSurface(self.n, self.R,
                            _RadialHeight(self.profile(side)), side="upper")


@dataclass(frozen=True)
class PansuSphere(_RotationalBase):
    """The Pansu sphere: double graph of the pansu profile, R = 1/lambda."""

    n: int
    lam: float

    def __post_init__(self):
        check_dim(self.n)
        if not (self.lam > 0.0):
            raise ValueError("lambda must be positive")

    @property
    def R(self) -> float:
        return 1.0 / self.lam

    @property
    def h_plus(self) -> PansuProfile:
        return PansuProfile(self.lam, 1.0)

    @property
    def h_minus(self) -> PansuProfile:
        return PansuProfile(self.lam, -1.0)

    def as_rotational(self) -> RotationalSurface:
        return RotationalSurface(self.n, self.R, self.h_plus, self.h_minus)


class _RadialHeight:
    """Height function f(x, y) = h(r) induced by a radial profile."""

    def __init__(self, profile):
        self.profile = profile

    def value_and_grad(self, xy: np.ndarray):
        r = float(np.linalg.norm(xy))
        h = float(self.profile.value(r))
        if r == 0.0:
            return h, np.zeros_like(xy)
        h_r = float(self.profile.deriv(r))
        return h, (h_r / r) * xy

    def value_and_grad_many(self, xys: np.ndarray):
        r = np.linalg.norm(xys, axis=1)
        h = np.broadcast_to(np.asarray(self.profile.value(r), dtype=float), r.shape)
        h_r = np.asarray(self.profile.deriv(r), dtype=float)
        safe = np.where(r == 0.0, 1.0, r)
        grads = (h_r / safe)[:, None] * xys
        grads[r == 0.0] = 0.0
        return h, grads


class _ExpressionHeight:
    """Height f(x, y) from an expression in x1..xn, y1..yn (R, lambda, pi bound)."""

    def __init__(self, src: str, n: int, R: float, lam: float = 1.0):
        self.src = src
        self.n = n
        self.R = R
        self.lam = lam
        self.ast = exprparse.parse_expr(src)
        self.names = []
        for j in range(1, n + 1):
            self.names.extend((f"x{j}", f"y{j}"))
        extra = exprparse.free_variables(self.ast) - set(self.names) - {"R", "lambda", "pi"}
        if extra:
            name = sorted(extra)[0]
            raise exprparse.UnboundVariableError(
                f"unbound variable {name!r}", _variable_offset(self.ast, name))
        self._free = exprparse.free_variables(self.ast)

    def _bindings(self, xy: np.ndarray) -> dict:
        b = {"R": self.R, "lambda": self.lam, "pi": math.pi}
        for k, name in enumerate(self.names):
            b[name] = float(xy[k])
        return b

    def value_and_grad(self, xy: np.ndarray):
        b = self._bindings(xy)
        value = exprparse.eval_ast(self.ast, b)
        grad = np.zeros(2 * self.n)
        for k, name in enumerate(self.names):
            if name in self._free:
                grad[k] = exprparse.eval_dual(self.ast, name, b).deriv
        return value, grad

    def value_and_grad_many(self, xys: np.ndarray):
        b = {"R": self.R, "lambda": self.lam, "pi": math.pi}
        for k, name in enumerate(self.names):
            b[name] = xys[:, k]
        count = xys.shape[0]
        values = np.broadcast_to(
            np.asarray(exprparse.eval_ast_array(self.ast, b), dtype=float), (count,))
        grads = np.zeros_like(xys)
        for k, name in enumerate(self.names):
            if name in self._free:
                _, d = exprparse.eval_dual_array(self.ast, name, b)
                grads[:, k] = np.broadcast_to(np.asarray(d, dtype=float), (count,))
        return values, grads


@dataclass(frozen=True)
class GraphSurface:
    """Graph z = f(x, y) (and/or z = -f) over the closed disk of radius R."""

    n: int
    R: float
    f: object  # value_and_grad(xy) -> (float, ndarray)
    side: str = "both"

    def __post_init__(self):
        check_dim(self.n)
        if not (self.R > 0.0):
            raise ValueError("R must be positive")
        if self.side not in ("upper", "lower", "both"):
            raise ValueError(f"side must be upper/lower/both, got {self.side!r}")

    @classmethod
    def from_expression(cls, src: str, n: int, R: float, side: str = "both",
                        lam: float = 1.0) -> "GraphSurface":
        return cls(n, R, _ExpressionHeight(src, n, R, lam), side)

    def side_keys(self):
        if self.side == "both":
            return ("upper", "lower")
        return (self.side,)

    @property
    def param_radius(self) -> float:
        return self.R

    def singular_outer(self, side) -> bool:
        del side
        return False  # unknown in general; the engine substitution is on by default

    def height_sign(self, side) -> float:
        return 1.0 if side == "upper" else -1.0

    def gradient_combination(self, xy: np.ndarray, side) -> np.ndarray:
        """g_j pairs = (f_{x_j} - y_j, f_{y_j} + x_j); N = -g/D, D = |g|."""
        sign = self.height_sign(side)
        _, grad = self.f.value_and_grad(xy)
        return sign * np.asarray(grad, dtype=float) + _apply_J_array(xy)

    def gradient_combination_many(self, xys: np.ndarray, side) -> np.ndarray:
        """Vectorized g over an (N, 2n) batch of points."""
        sign = self.height_sign(side)
        if hasattr(self.f, "value_and_grad_many"):
            _, grads = self.f.value_and_grad_many(xys)
        else:
            grads = np.stack([self.f.value_and_grad(xy)[1] for xy in xys])
        return sign * np.asarray(grads, dtype=float) + _apply_J_array(xys)

    def surface_point(self, r: float, v, side) -> SurfacePoint:
        v = np.asarray(v, dtype=float)
        xy = r * v
        sign = self.height_sign(side)
        value, grad = self.f.value_and_grad(xy)
        g = sign * np.asarray(grad, dtype=float) + _apply_J_array(xy)
        D = float(np.linalg.norm(g))
        coords = HPoint(tuple(xy) + (sign * float(value),))
        density = D * r ** (2 * self.n - 1) if math.isfinite(D) else math.inf
        normal = None
        if SINGULAR_TOL < D < math.inf:
            normal = ContactVector(coords, tuple(-g / D))
        return SurfacePoint((r, tuple(v), side), coords, density, normal)


Surface = GraphSurface | RotationalSurface | PansuSphere


def is_rotational(S) -> bool:
    return isinstance(S, _RotationalBase)


# ----------------------------------------------------------- local elements

def p_area_element_graph(S: GraphSurface, xy, side="upper") -> float:
    """D(p) for the graph at (x, y)."""
    xy = np.asarray(xy, dtype=float)
    if np.linalg.norm(xy) > S.R + 1e-12:
        raise ValueError("point outside the surface domain")
    return float(np.linalg.norm(S.gradient_combination(xy, side)))


def p_normal_graph(S: GraphSurface, xy, side="upper",
                   singular_tol: float = SINGULAR_TOL) -> ContactVector:
    """Unit p-normal of the graph; raises SingularPointError where D ~ 0."""
    xy = np.asarray(xy, dtype=float)
    g = S.gradient_combination(xy, side)
    D = float(np.linalg.norm(g))
    if not (D > singular_tol):
        raise SingularPointError(f"singular point: D = {D}")
    sign = S.height_sign(side)
    value, _ = S.f.value_and_grad(xy)
    base = HPoint(tuple(xy) + (sign * float(value),))
    return ContactVector(base, tuple(-g / D))


def p_area_element_rotational(S, r: float, side="upper") -> float:
    """D = sqrt(h_r^2 + r^2); the graph cross terms cancel identically."""
    if not (0.0 <= r <= S.R + 1e-12):
        raise ValueError("radius outside [0, R]")
    return float(np.hypot(float(S.profile(side).deriv(r)), r))


def p_normal_rotational(S, r: float, theta, side="upper",
                        singular_tol: float = SINGULAR_TOL) -> ContactVector:
    """Unit p-normal on a rotational surface at radius r and angles theta.

    For n = 1 ``theta`` is a single angle; generally it may be a unit
    vector in R^{2n} giving the angular position.
    """
    if np.ndim(theta) == 0:
        if S.n != 1:
            raise ValueError("scalar angle only valid for n = 1")
        v = np.array([math.cos(float(theta)), math.sin(float(theta))])
    else:
        v = np.asarray(theta, dtype=float)
        v = v / np.linalg.norm(v)
    h_r = float(S.profile(side).deriv(r))
    D = math.hypot(h_r, r)
    if not (singular_tol < D < math.inf):
        raise SingularPointError(f"singular point: D = {D}")
    g = h_r * v + r * _apply_J_array(v)
    xy = r * v
    base = HPoint(tuple(xy) + (float(S.profile(side).value(r)),))
    return ContactVector(base, tuple(-g / D))


# ------------------------------------------------------------------ p-areas

def pansu_area_closed_form(n: int, lam: float) -> float:
    """p-area of the Pansu sphere: S_{2n-1} sqrt(pi) Gamma(n+1/2) / (lam^{2n+1} Gamma(n+1))."""
    check_dim(n)
    if not (lam > 0.0):
        raise ValueError("lambda must be positive")
    return (sphere_surface_area(2 * n - 1) * math.sqrt(math.pi) * math.gamma(n + 0.5)
            / (lam ** (2 * n + 1) * math.gamma(n + 1.0)))


def p_area(S, spec: QuadratureSpec | None = None, excise: float = 0.0) -> IntegralResult:
    """Total p-area of the surface.

    Rotational surfaces factor exactly into S_{2n-1} times a radial
    integral of r^{2n-1} D(r); graphs go through the generic product
    quadrature.  ``excise`` removes a parameter-radius ball around the
    polar singular points (used to test that the singular set carries no
    p-area).
    """
    spec = spec or QuadratureSpec()
    if is_rotational(S):
        if spec.sphere_rule == "monte_carlo":
            return _p_area_mc_rotational(S, spec, excise)
        shell = sphere_surface_area(2 * S.n - 1)
        total = 0.0
        err = 0.0
        evals = 0
        converged = True
        for side in S.side_keys():
            side_spec = spec if not S.singular_outer(side) else spec.with_(singular_endpoint=True)

            def g(r, _side=side):
                return S.density_radial(r, _side) * r ** (2 * S.n - 1)

            res = radial_integral(g, S.param_radius, side_spec, a=excise)
            total += shell * res.value
            err += shell * res.error_estimate
            evals += res.evaluations
            converged = converged and res.converged
        return IntegralResult(total, err, evals, "radial_factored", converged)
    if excise > 0.0:
        raise ValueError("excise is only supported for rotational surfaces")
    return surface_integral(S, lambda q: 1.0, spec)


def _p_area_mc_rotational(S, spec: QuadratureSpec, excise: float) -> IntegralResult:
    """Vectorized Monte Carlo p-area; the sphere factor is exact (radial density).

    Samples r = R sin(t) with t uniform, which keeps per-sample values
    bounded through the 1/sqrt(R^2 - r^2) endpoint blow-up.
    """
    from .quadrature import mc_accumulate
    R = S.param_radius
    t_lo = math.asin(excise / R)
    span = 0.5 * math.pi - t_lo
    shell = sphere_surface_area(2 * S.n - 1)
    scale = span * R * shell
    sides = S.side_keys()

    def chunk(gen, count):
        t = t_lo + gen.random(count) * span
        r = R * np.sin(t)
        out = np.zeros(count)
        for side in sides:
            out += np.asarray(S.density_radial(r, side), dtype=float)
        return out * (r ** (2 * S.n - 1) * np.cos(t) * scale)

    mean, se, count = mc_accumulate(chunk, spec.mc_samples, spec.seed)
    return IntegralResult(mean, se, count, "monte_carlo",
                          se <= spec.rel_tol * max(abs(mean), 1e-300))


# ----------------------------------------------------- rotational conditions

def check_rotational_conditions(S, samples: int = 1000):
    """Check the sufficient profile conditions for direction-independence.

    Each profile must satisfy one of: (1) h_r continuous on [0, R]
    (finite with bounded increments on a sample grid), or (2)
    |h_r| <= r / sqrt(R^2 - r^2) on [0, R).  Sufficient, not necessary,
    so a failure warns rather than blocks.  Returns (ok, detail).
    """
    R = S.param_radius
    r = np.linspace(0.0, R, samples + 1)
    interior = r[1:-1]
    bound = interior / np.sqrt(R * R - interior * interior)
    details = []
    ok = True
    for side in S.side_keys():
        with np.errstate(divide="ignore", invalid="ignore"):
            d_all = np.asarray(S.profile(side).deriv(r), dtype=float)
        d_int = d_all[1:-1]
        cond1 = bool(np.all(np.isfinite(d_all)))
        if cond1:
            increments = np.abs(np.diff(d_all))
            scale = max(float(np.max(np.abs(d_all))), 1.0)
            cond1 = bool(np.max(increments) <= 50.0 * scale / math.sqrt(samples))
        cond2 = bool(np.all(np.abs(d_int) <= bound * (1.0 + 1e-9)))
        if not (cond1 or cond2):
            ok = False
            details.append(f"{side}: h_r neither continuous on [0,R] nor bounded by r/sqrt(R^2-r^2)")
    detail = "; ".join(details) if details else "conditions satisfied"
    if not ok:
        warnings.warn(f"rotational profile conditions not verified: {detail}",
                      stacklevel=2)
    return ok, detail


# ------------------------------------------------------------------- schema

def surface_from_spec(obj: dict):
    """Build a surface from the JSON specification object.

    Schema: {"kind": "pansu"|"rotational"|"graph", "n": int,
    "lambda": num?, "R": num?, "h_plus": str?, "h_minus": str?,
    "f": str?, "side": "both"|"upper"|"lower"}.  Profile strings may be
    expressions in r or the builtin names "pansu", "sphere",
    "paraboloid:<c>", "flat".
    """
    if not isinstance(obj, dict):
        raise SchemaError("surface spec must be a JSON object")
    kind = obj.get("kind")
    if kind not in ("pansu", "rotational", "graph"):
        raise SchemaError(f"kind: expected pansu/rotational/graph, got {kind!r}")
    n = obj.get("n", 1)
    if not isinstance(n, int) or n < 1:
        raise SchemaError(f"n: must be a positive integer, got {n!r}")
    lam = obj.get("lambda", 1.0)
    if not isinstance(lam, (int, float)) or lam <= 0:
        raise SchemaError(f"lambda: must be a positive number, got {lam!r}")

    if kind == "pansu":
        return PansuSphere(n, float(lam))

    R = obj.get("R")
    if not isinstance(R, (int, float)) or R <= 0:
        raise SchemaError(f"R: must be a positive number, got {R!r}")

    if kind == "rotational":
        profiles = {}
        for name, sign in (("h_plus", 1.0), ("h_minus", -1.0)):
            text = obj.get(name)
            if not isinstance(text, str):
                raise SchemaError(f"{name}: profile string required, got {text!r}")
            try:
                profiles[name] = make_profile(text, float(R), float(lam), sign)
            except exprparse.ExprError as err:
                raise SchemaError(f"{name}: {err}") from err
            except ValueError as err:
                raise SchemaError(f"{name}: {err}") from err
        try:
            return RotationalSurface(n, float(R), profiles["h_plus"], profiles["h_minus"])
        except ValueError as err:
            raise SchemaError(str(err)) from err

    src = obj.get("f")
    if not isinstance(src, str):
        raise SchemaError(f"f: height expression required, got {src!r}")
    side = obj.get("side", "both")
    if side not in ("both", "upper", "lower"):
        raise SchemaError(f"side: must be both/upper/lower, got {side!r}")
    try:
        return GraphSurface.from_expression(src, n, float(R), side, float(lam))
    except exprparse.ExprError as err:
        raise SchemaError(f"f: {err}") from err
