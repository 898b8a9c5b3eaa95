"""Deterministic and Monte Carlo integration tuned to three integrand classes:

* radial integrands with an inverse-square-root singularity at the outer
  endpoint (densities like r^k / sqrt(R^2 - r^2)) -- removed exactly by
  the substitution r = R sin(u), after which Gauss-Legendre converges
  spectrally;
* angular integrands |a cos(t) + b sin(t) + c| whose kinks are handled in
  closed form, so outer integrals never see them;
* sphere integrals of |c + w . v| over S^{m-1}, reduced one angle at a
  time with the innermost angle exact and outer angles split where the
  inner integral switches branch.

Monte Carlo estimates use a counter-based generator (Philox) on a fixed
chunk partition: identical (seed, index) gives identical draws, and the
pairwise/fsum accumulation order never depends on thread scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

TWO_PI = 2.0 * math.pi

MC_CHUNK = 1 << 17
MC_RESERVED_PER_SAMPLE = 16  # Philox counter advance reserved per sample slot


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration configuration shared across the package."""

    radial_nodes: int = 256
    angular_nodes: int = 512
    sphere_rule: str = "product_angles"  # or "monte_carlo"
    mc_samples: int = 1_000_000
    seed: int = 0
    rel_tol: float = 1e-8
    singular_endpoint: bool = True

    def __post_init__(self):
        if self.radial_nodes < 2 or self.angular_nodes < 2:
            raise ValueError("node counts must be >= 2")
        if self.rel_tol <= 0.0:
            raise ValueError("rel_tol must be positive")
        if self.sphere_rule not in ("product_angles", "monte_carlo"):
            raise ValueError(f"unknown sphere_rule {self.sphere_rule!r}")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.mc_samples < 2:
            raise ValueError("mc_samples must be >= 2")

    def with_(self, **kwargs) -> "QuadratureSpec":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    evaluations: int
    method: str
    converged: bool = True

    def __post_init__(self):
        if self.error_estimate < 0.0:
            raise ValueError("error_estimate must be >= 0")


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(m: int):
    cached = _GL_CACHE.get(m)
    if cached is None:
        cached = np.polynomial.legendre.leggauss(m)
        _GL_CACHE[m] = cached
    return cached


def gl_nodes(a: float, b: float, m: int):
    """Gauss-Legendre nodes/weights on [a, b]."""
    x, w = _gauss_legendre(m)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def radial_nodes_weights(R: float, m: int, singular_endpoint: bool, a: float = 0.0):
    """Nodes/weights for integrals over [a, R].

    With ``singular_endpoint`` the substitution r = R sin(u) absorbs any
    1/sqrt(R^2 - r^2) factor of the integrand into a smooth one; it is
    harmless (still spectral) for integrands that were already smooth.
    """
    if not (0.0 <= a < R):
        raise ValueError(f"need 0 <= a < R, got a={a}, R={R}")
    if singular_endpoint:
        u, wu = gl_nodes(math.asin(a / R), 0.5 * math.pi, m)
        r = R * np.sin(u)
        w = R * np.cos(u) * wu
    else:
        r, w = gl_nodes(a, R, m)
    return r, w


def _check_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise ValueError(f"non-finite {what} value at an interior node")


def radial_integral(g, R: float, spec: QuadratureSpec, a: float = 0.0,
                    max_doublings: int = 3) -> IntegralResult:
    """Integrate g over [a, R]; g must accept a numpy array of radii.

    The error estimate comes from node doubling; doubling continues past
    the configured node count until rel_tol is met or the cap is reached.
    """
    if not (R > 0.0):
        raise ValueError(f"R must be positive, got {R}")
    m = max(2, spec.radial_nodes // 2)
    evals = 0
    previous = None
    value = 0.0
    err = math.inf
    for _ in range(max_doublings + 2):
        r, w = radial_nodes_weights(R, m, spec.singular_endpoint, a)
        gv = np.asarray(g(r), dtype=float)
        _check_finite(gv, "integrand")
        value = float(np.dot(w, gv))
        evals += m
        if previous is not None:
            err = abs(value - previous)
            if err <= spec.rel_tol * max(abs(value), 1e-300):
                return IntegralResult(value, err, evals, "gauss_legendre_radial", True)
        previous = value
        m *= 2
    return IntegralResult(value, err, evals, "gauss_legendre_radial", False)


# ------------------------------------------------------- angular closed forms

def periodic_abs_sinusoid_integral(a: float, b: float, c: float = 0.0) -> float:
    """Exact full-period integral of |a cos t + b sin t + c|.

    With amplitude rho = hypot(a, b): equals 2 pi |c| when rho <= |c|,
    else 4 c psi + 4 rho sin(psi) - 2 pi c with psi = arccos(-c/rho).
    At c = 0 this is the familiar 4 rho.
    """
    rho = math.hypot(a, b)
    if rho <= abs(c):
        return TWO_PI * abs(c)
    if rho == 0.0:
        return 0.0
    psi = math.acos(max(-1.0, min(1.0, -c / rho)))
    return 4.0 * c * psi + 4.0 * rho * math.sin(psi) - TWO_PI * c


def angular_abs_cos_integral(amplitude: float, phase: float = 0.0) -> float:
    """Full-period integral of |amplitude * cos(t - phase)|: exactly 4|amplitude|."""
    del phase  # the kinks move with the phase but the integral does not
    return 4.0 * abs(amplitude)


def periodic_kink_split_integral(signed_fn, nodes: int, gl_order: int = 16,
                                 refine_iters: int = 40):
    """Integral of |f| over one period [0, 2 pi) for a signed periodic f.

    ``signed_fn`` must accept a numpy array of angles.  Sign changes are
    bracketed on a uniform scan grid and bisected (all brackets at once,
    one vector call per iteration); mislocating a kink by delta only
    perturbs the integral at O(delta^2), so ~40 halvings are plenty.
    Each smooth arc is then integrated with composite Gauss-Legendre
    panels.  Returns (value, evaluations).
    """
    nodes = max(nodes, 8)
    grid = np.linspace(0.0, TWO_PI, nodes, endpoint=False)
    fv = np.asarray(signed_fn(grid), dtype=float)
    _check_finite(fv, "integrand")
    evals = nodes

    sign = np.sign(fv)
    cuts = [float(grid[i]) for i in range(nodes) if sign[i] == 0.0]
    lo_list, hi_list, flo_list = [], [], []
    for i in range(nodes):
        j = (i + 1) % nodes
        if sign[i] != 0.0 and sign[j] != 0.0 and sign[i] != sign[j]:
            lo_list.append(grid[i])
            hi_list.append(grid[i] + TWO_PI / nodes)
            flo_list.append(fv[i])
    if lo_list:
        lo = np.array(lo_list)
        hi = np.array(hi_list)
        flo = np.array(flo_list)
        for _ in range(refine_iters):
            mid = 0.5 * (lo + hi)
            fm = np.asarray(signed_fn(mid), dtype=float)
            evals += mid.size
            same = (fm > 0) == (flo > 0)
            lo = np.where(same, mid, lo)
            flo = np.where(same, fm, flo)
            hi = np.where(same, hi, mid)
            if np.max(hi - lo) <= 1e-13 * TWO_PI:
                break
        cuts.extend((0.5 * (lo + hi)).tolist())

    if not cuts:
        arcs = [(0.0, TWO_PI)]
    else:
        cuts = sorted(set(cuts))
        arcs = [(cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1)]
        arcs.append((cuts[-1], cuts[0] + TWO_PI))

    total = 0.0
    panels_per_arc = max(1, nodes // (8 * max(len(arcs), 1)))
    for lo_arc, hi_arc in arcs:
        if hi_arc - lo_arc <= 1e-14:
            continue
        edges = np.linspace(lo_arc, hi_arc, panels_per_arc + 1)
        t_all, w_all = [], []
        for k in range(panels_per_arc):
            t, w = gl_nodes(edges[k], edges[k + 1], gl_order)
            t_all.append(t)
            w_all.append(w)
        t_all = np.concatenate(t_all)
        w_all = np.concatenate(w_all)
        total += float(np.dot(w_all, np.abs(signed_fn(t_all))))
        evals += t_all.size
    return total, evals


# ------------------------------------------------------------ sphere integrals

def abs_dot_moment(rho: float, c: float, m: int, gl_order: int = 64) -> float:
    """Integral of |c + rho * v_1| over S^{m-1} (axis-aligned weight).

    m = 1 and m = 2 are exact; m >= 3 reduces to a 1D polar-angle
    integral, split at the kink arccos(-c/rho) so each piece is smooth.
    """
    rho = abs(rho)
    if m < 1:
        raise ValueError("sphere factor needs m >= 1")
    if m == 1:
        return abs(c + rho) + abs(c - rho)
    if m == 2:
        return periodic_abs_sinusoid_integral(rho, 0.0, c)
    from .core import sphere_surface_area
    shell = sphere_surface_area(m - 2)
    pieces = [0.0, math.pi]
    if 0.0 < abs(c) < rho:
        pieces.insert(1, math.acos(-c / rho))
    total = 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        t, w = gl_nodes(lo, hi, gl_order)
        total += float(np.dot(w, np.abs(c + rho * np.cos(t)) * np.sin(t) ** (m - 2)))
    return shell * total


def sphere_abs_dot_integral(w, c: float = 0.0, gl_order: int = 48) -> IntegralResult:
    """Integral of |c + w . v| over the unit sphere S^{m-1}, m = len(w).

    The outermost angle is integrated in the given orientation of w (so
    the rule genuinely exercises every w); deeper levels use the
    axis-aligned reduction.  The outer interval is split where the inner
    integral switches branch (|offset| = amplitude), keeping every piece
    analytic; the error estimate comes from doubling the outer order.
    """
    w = np.asarray(w, dtype=float)
    m = w.size
    if m < 1:
        raise ValueError("direction vector must be non-empty")
    if m == 1:
        return IntegralResult(abs_dot_moment(abs(w[0]), c, 1), 0.0, 2, "exact")
    if m == 2:
        val = periodic_abs_sinusoid_integral(w[0], w[1], c)
        return IntegralResult(val, 0.0, 4, "exact_sinusoid")

    w1 = float(w[0])
    rho_rest = float(np.linalg.norm(w[1:]))

    def outer_values(phi: np.ndarray) -> np.ndarray:
        out = np.empty_like(phi)
        for i, p in enumerate(phi):
            out[i] = math.sin(p) ** (m - 2) * abs_dot_moment(
                rho_rest * math.sin(p), c + w1 * math.cos(p), m - 1, gl_order)
        return out

    # roots of c + w1 cos(phi) = +- rho_rest sin(phi) in (0, pi)
    cuts = {0.0, math.pi}
    for s in (1.0, -1.0):
        amp = math.hypot(w1, s * rho_rest)
        if amp > 0.0 and abs(c) <= amp:
            delta = math.atan2(s * rho_rest, w1)
            base = math.acos(max(-1.0, min(1.0, -c / amp)))
            for root in (delta + base, delta - base):
                root %= TWO_PI
                if 1e-14 < root < math.pi - 1e-14:
                    cuts.add(root)
    cuts = sorted(cuts)

    def pass_at(order: int):
        # the inner integral is analytic inside each piece but only C^1
        # with a half-power derivative at the piece boundaries; clustering
        # the nodes there (phi = lo + (hi-lo)(1 - cos(pi s))/2) restores
        # spectral accuracy
        value = 0.0
        evals = 0
        s_nodes, s_weights = gl_nodes(0.0, 1.0, order)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            half = 0.5 * (hi - lo)
            phi = lo + half * (1.0 - np.cos(math.pi * s_nodes))
            jac = half * math.pi * np.sin(math.pi * s_nodes)
            value += float(np.dot(s_weights * jac, outer_values(phi)))
            evals += order * (2 * gl_order if m > 3 else 1)
        return value, evals

    coarse, e1 = pass_at(gl_order)
    fine, e2 = pass_at(2 * gl_order)
    return IntegralResult(fine, abs(fine - coarse), e1 + e2, "sphere_split_product", True)


def _per_angle_nodes(k: int, spec: QuadratureSpec, budget: int = 2_000_000):
    """Per-angle node counts for a product rule on S^k that fit the budget."""
    nphi = min(128, max(16, spec.angular_nodes // 16))
    ntheta = min(256, max(16, spec.angular_nodes // 8))
    while nphi ** (k - 1) * ntheta > budget and nphi > 8:
        nphi = max(8, nphi // 2)
        ntheta = max(8, ntheta // 2)
    return nphi, ntheta


def sphere_surface_nodes(k: int, spec: QuadratureSpec):
    """Product-rule nodes/weights on the unit sphere S^k in R^{k+1}.

    k = 1 uses the periodic trapezoid (spectral for smooth periodic
    integrands); k >= 2 uses Gauss-Legendre in each polar angle with the
    sin-power Jacobians and the trapezoid in the final angle.
    Returns (points[N, k+1], weights[N]).
    """
    if k < 1:
        raise ValueError("sphere dimension must be >= 1")
    if k == 1:
        ntheta = spec.angular_nodes
        theta = np.arange(ntheta) * (TWO_PI / ntheta)
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return pts, np.full(ntheta, TWO_PI / ntheta)

    nphi, ntheta = _per_angle_nodes(k, spec)
    theta = np.arange(ntheta) * (TWO_PI / ntheta)
    pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    wts = np.full(ntheta, TWO_PI / ntheta)
    for level in range(2, k + 1):
        phi, wphi = gl_nodes(0.0, math.pi, nphi)
        sin_p = np.sin(phi)
        cos_p = np.cos(phi)
        jac = wphi * sin_p ** (level - 1)
        n_old = pts.shape[0]
        new_pts = np.empty((nphi * n_old, level + 1))
        new_pts[:, 0] = np.repeat(cos_p, n_old)
        new_pts[:, 1:] = np.repeat(sin_p, n_old)[:, None] * np.tile(pts, (nphi, 1))
        pts = new_pts
        wts = np.repeat(jac, n_old) * np.tile(wts, nphi)
    return pts, wts


def sphere_integral(h, k: int, spec: QuadratureSpec) -> IntegralResult:
    """Integral of h over the unit sphere S^k in R^{k+1}.

    ``h`` must be vectorized: it receives an (N, k+1) array of unit
    vectors and returns an (N,) array.  Deterministic product rule by
    default; Monte Carlo when spec.sphere_rule == "monte_carlo".
    """
    if k < 1:
        raise ValueError("sphere dimension must be >= 1")
    if spec.sphere_rule == "monte_carlo":
        from .core import sphere_surface_area
        area = sphere_surface_area(k)

        def chunk(gen, count):
            g = gen.standard_normal((count, k + 1))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            return area * np.asarray(h(g), dtype=float)

        mean, se, count = mc_accumulate(chunk, spec.mc_samples, spec.seed)
        return IntegralResult(mean, se, count, "monte_carlo",
                              se <= spec.rel_tol * max(abs(mean), 1e-300))

    pts, wts = sphere_surface_nodes(k, spec)
    hv = np.asarray(h(pts), dtype=float)
    _check_finite(hv, "sphere integrand")
    value = float(np.dot(wts, hv))
    coarse_spec = spec.with_(angular_nodes=max(8, spec.angular_nodes // 2))
    pts_c, wts_c = sphere_surface_nodes(k, coarse_spec)
    value_c = float(np.dot(wts_c, np.asarray(h(pts_c), dtype=float)))
    err = abs(value - value_c)
    return IntegralResult(value, err, len(wts) + len(wts_c), "sphere_product",
                          err <= spec.rel_tol * max(abs(value), 1e-300))


# ------------------------------------------------------------- Monte Carlo

def worker_count() -> int:
    """Worker cap from HEIS_THREADS (0 = auto, unset = single-threaded)."""
    raw = os.environ.get("HEIS_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    if n == 0:
        return os.cpu_count() or 1
    return max(1, n)


def _chunk_generator(seed: int, chunk_index: int) -> np.random.Generator:
    bg = np.random.Philox(key=seed)
    bg.advance(chunk_index * MC_CHUNK * MC_RESERVED_PER_SAMPLE)
    return np.random.Generator(bg)


def mc_stream(seed: int, count: int) -> np.ndarray:
    """Deterministic uniform [0, 1) stream; (seed, index) fixes each draw.

    The stream is produced on a fixed chunk partition of a counter-based
    generator, so the value at any index depends on neither how much of
    the stream is requested nor on thread scheduling.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    out = np.empty(count)
    done = 0
    chunk_index = 0
    while done < count:
        take = min(MC_CHUNK, count - done)
        gen = _chunk_generator(seed, chunk_index)
        out[done:done + take] = gen.random(take)
        done += take
        chunk_index += 1
    return out


def mc_accumulate(sample_chunk_fn, total: int, seed: int,
                  threads: int | None = None):
    """Mean, standard error, and count of ``total`` Monte Carlo samples.

    ``sample_chunk_fn(gen, count)`` returns a float array of per-sample
    values drawn from ``gen``.  Chunk boundaries are fixed independently
    of the worker count; per-chunk pairwise sums are combined with fsum
    in index order, so results are bitwise reproducible for any number of
    threads.
    """
    if total < 2:
        raise ValueError("Monte Carlo needs at least 2 samples")
    n_chunks = (total + MC_CHUNK - 1) // MC_CHUNK
    sizes = [MC_CHUNK] * (n_chunks - 1) + [total - MC_CHUNK * (n_chunks - 1)]

    def run(idx: int):
        gen = _chunk_generator(seed, idx)
        values = np.asarray(sample_chunk_fn(gen, sizes[idx]), dtype=float)
        if values.shape != (sizes[idx],):
            raise ValueError("sample_chunk_fn returned wrong shape")
        return float(np.sum(values)), float(np.sum(values * values))

    workers = worker_count() if threads is None else max(1, threads)
    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run, range(n_chunks)))
    else:
        partials = [run(i) for i in range(n_chunks)]

    s1 = math.fsum(p[0] for p in partials)
    s2 = math.fsum(p[1] for p in partials)
    mean = s1 / total
    var = max(s2 - total * mean * mean, 0.0) / (total - 1)
    se = math.sqrt(var / total)
    return mean, se, total


# ------------------------------------------------------------ surface engine

def surface_integral(surface, integrand, spec: QuadratureSpec) -> IntegralResult:
    """Integral of ``integrand`` against the p-area measure of ``surface``.

    ``integrand`` maps a SurfacePoint to a float and must return 0 at
    singular points (the p-area density, included by the engine, vanishes
    there as well).  Deterministic product rule (radial x sphere) with a
    half-resolution companion pass for the error estimate; Monte Carlo
    with the same endpoint substitution when spec.sphere_rule is
    "monte_carlo".
    """
    n = surface.n
    if spec.sphere_rule == "monte_carlo":
        return _surface_integral_mc(surface, integrand, spec)

    def pass_at(radial_m: int, ang_spec: QuadratureSpec):
        total = 0.0
        evals = 0
        pts, wts = sphere_surface_nodes(2 * n - 1, ang_spec)
        for side in surface.side_keys():
            r_nodes, r_weights = radial_nodes_weights(
                surface.param_radius, radial_m,
                spec.singular_endpoint or surface.singular_outer(side))
            for r, wr in zip(r_nodes, r_weights):
                acc = 0.0
                for v, wv in zip(pts, wts):
                    q = surface.surface_point(float(r), v, side)
                    acc += wv * integrand(q) * q.area_density
                    evals += 1
                total += wr * acc
        return total, evals

    fine, evals_f = pass_at(spec.radial_nodes, spec)
    coarse, evals_c = pass_at(max(2, spec.radial_nodes // 2),
                              spec.with_(angular_nodes=max(8, spec.angular_nodes // 2)))
    err = abs(fine - coarse)
    return IntegralResult(fine, err, evals_f + evals_c, "surface_product",
                          err <= spec.rel_tol * max(abs(fine), 1e-300))


def _surface_integral_mc(surface, integrand, spec: QuadratureSpec) -> IntegralResult:
    n = surface.n
    R = surface.param_radius
    sides = surface.side_keys()
    from .core import sphere_surface_area
    # r = R sin(t) importance substitution keeps the sample values bounded
    # for densities with the 1/sqrt(R^2 - r^2) endpoint blow-up
    scale = (0.5 * math.pi) * R * sphere_surface_area(2 * n - 1)

    def chunk(gen, count):
        t = gen.random(count) * (0.5 * math.pi)
        v = gen.standard_normal((count, 2 * n))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        r = R * np.sin(t)
        cos_t = np.cos(t)
        out = np.zeros(count)
        for i in range(count):
            for side in sides:
                q = surface.surface_point(float(r[i]), v[i], side)
                out[i] += integrand(q) * q.area_density
            out[i] *= cos_t[i]
        return out * scale

    mean, se, count = mc_accumulate(chunk, spec.mc_samples, spec.seed)
    return IntegralResult(mean, se, count, "monte_carlo",
                          se <= spec.rel_tol * max(abs(mean), 1e-300))
