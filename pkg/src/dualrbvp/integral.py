"""Contour quadrature, Cauchy-type integrals, and boundary limits.

The Cauchy-type integral of a density psi on a contour gamma is

    psi~(zeta) = (1 / (2 pi i)) * sum_k  psi(tau_k) (tau_k - zeta)^(-1) dtau_k,

a function of zeta that is monogenic off the curve and vanishes at infinity.
Off-curve evaluation uses the contour's native quadrature; points inside the
guard band switch to an 8x trigonometrically upsampled rule (smooth contours)
or to local panel subdivision (polygons).  Boundary values are obtained by
evaluating along the inward or outward normal at geometrically shrinking
offsets and extrapolating the offset to zero (Neville scheme); no
principal-value quadrature is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .algebra import DualComplex, PointE, dc_inv, dc_mul, dc_norm
from .contour import Contour
from .errors import (
    CornerNodeError,
    DegenerateTriangleError,
    FiberInconsistencyError,
    InputError,
    NoConvergenceError,
    NonIntegerResidueError,
    NotAFieldExpressionError,
    NotInvertibleError,
    NotInvertibleOnContourError,
    TooCloseToBoundaryError,
)
from . import expr as _expr

UPSAMPLE = 8
N_OFFSETS = 5
OFFSET_SPACING_FACTOR = 8.0
GL16_X, GL16_W = np.polynomial.legendre.leggauss(16)

FieldFn = Union["_expr.Expr", Callable[[PointE], DualComplex]]


# -- sampling helpers ----------------------------------------------------------

def _is_expr(f) -> bool:
    return isinstance(f, (_expr.Const, _expr.Var, _expr.Bin, _expr.Pow,
                          _expr.Call, _expr.Neg))


def field_eval(f: FieldFn, point: PointE) -> DualComplex:
    """Evaluate a field function given as an expression or a callable."""
    if _is_expr(f):
        if not _expr.is_field_expr(f):
            raise NotAFieldExpressionError(
                "field operation got an expression with boundary variables")
        return _expr.evaluate(f, z=point)
    if callable(f):
        return f(point)
    raise TypeError(f"cannot evaluate {type(f).__name__} as a field function")


def boundary_samples(f, contour: Contour) -> DualComplex:
    """Density samples at contour nodes from an expression, callable,
    or a precomputed sample set."""
    if isinstance(f, DualComplex):
        out = f
    elif _is_expr(f):
        out = _expr.evaluate(f, z=contour.points(), tau=contour.values(),
                             t=contour.t)
    elif callable(f):
        out = f(contour.points())
    else:
        raise TypeError(f"cannot sample {type(f).__name__} on a contour")
    c1 = np.array(np.broadcast_to(np.asarray(out.c1, dtype=complex), (contour.n,)))
    c2 = np.array(np.broadcast_to(np.asarray(out.c2, dtype=complex), (contour.n,)))
    return DualComplex(c1, c2)


# -- plain quadrature ------------------------------------------------------------

def contour_integral(contour: Contour, samples) -> DualComplex:
    """Closed-curve integral of node samples against the contour weights."""
    f = boundary_samples(samples, contour)
    w = contour.dtau()
    s1 = np.sum(f.c1 * w.c1)
    s2 = np.sum(f.c1 * w.c2 + f.c2 * w.c1)
    return DualComplex(s1, s2)


def _kernel_sum(tau: DualComplex, w: DualComplex, dens: DualComplex,
                z1: np.ndarray, z2: np.ndarray) -> DualComplex:
    """sum_k dens_k (tau_k - z)^(-1) w_k / (2 pi i), vectorized over targets."""
    t1 = np.asarray(tau.c1)
    t2 = np.asarray(tau.c2)
    d1 = np.broadcast_to(np.asarray(dens.c1), t1.shape)
    d2 = np.broadcast_to(np.asarray(dens.c2), t1.shape)
    w1 = np.asarray(w.c1)
    w2 = np.asarray(w.c2)
    m = z1.size
    out1 = np.empty(m, dtype=complex)
    out2 = np.empty(m, dtype=complex)
    chunk = max(1, int(4e6) // max(1, t1.size))
    for s in range(0, m, chunk):
        u = t1[None, :] - z1[s:s + chunk, None]
        v = t2[None, :] - z2[s:s + chunk, None]
        inv_u = 1.0 / u
        a1 = d1[None, :] * inv_u
        a2 = (d2[None, :] - d1[None, :] * v * inv_u) * inv_u
        out1[s:s + chunk] = (a1 * w1[None, :]).sum(axis=1)
        out2[s:s + chunk] = (a1 * w2[None, :] + a2 * w1[None, :]).sum(axis=1)
    scale = 1.0 / (2j * np.pi)
    return DualComplex(out1 * scale, out2 * scale)


# -- Cauchy-type integral ---------------------------------------------------------

@dataclass(eq=False)
class CauchyIntegralFn:
    """Evaluable Cauchy-type integral of a fixed density on a fixed contour."""

    contour: Contour
    density: DualComplex
    _cache: dict = field(default_factory=dict, repr=False)

    def min_eval_distance(self) -> float:
        c = self.contour
        if c.kind == "polygon":
            return c.max_spacing / 8.0
        return c.guard_band / UPSAMPLE

    def __call__(self, points: PointE) -> DualComplex:
        c = self.contour
        x = np.atleast_1d(np.asarray(points.x, dtype=float))
        y = np.atleast_1d(np.asarray(points.y, dtype=float))
        scalar = np.ndim(points.x) == 0
        z = PointE(x, y, c.basis).value()
        z1 = np.asarray(z.c1).ravel()
        z2 = np.asarray(z.c2).ravel()
        dist = c.dist_to(x, y)
        if np.any(dist < self.min_eval_distance()):
            raise TooCloseToBoundaryError(
                f"evaluation within {self.min_eval_distance():.3e} of the contour")
        near = dist < c.guard_band
        out1 = np.empty(len(z1), dtype=complex)
        out2 = np.empty(len(z1), dtype=complex)
        far = ~near
        if np.any(far):
            v = _kernel_sum(c.values(), c.dtau(), self.density, z1[far], z2[far])
            out1[far], out2[far] = v.c1, v.c2
        if np.any(near):
            v = self._near_eval(z1[near], z2[near])
            out1[near], out2[near] = v.c1, v.c2
        if scalar:
            return DualComplex(complex(out1[0]), complex(out2[0]))
        return DualComplex(out1.reshape(np.shape(points.x)),
                           out2.reshape(np.shape(points.x)))

    def at_infinity(self) -> DualComplex:
        return DualComplex(0j, 0j)

    def boundary(self, side: str) -> "BoundaryTable":
        key = ("boundary", side)
        if key not in self._cache:
            self._cache[key] = boundary_values(self, self.contour, side)
        return self._cache[key]

    # near-curve machinery

    def _near_eval(self, z1: np.ndarray, z2: np.ndarray) -> DualComplex:
        c = self.contour
        if c.kind == "polygon":
            return self._near_eval_polygon(z1, z2)
        if "up" not in self._cache:
            xy_up, w_up = c.refined_geometry(UPSAMPLE)
            tau_up = c.basis.vector(xy_up[:, 0], xy_up[:, 1])
            dens_up = c.upsample_samples(self.density, UPSAMPLE)
            self._cache["up"] = (tau_up, w_up, dens_up)
        tau_up, w_up, dens_up = self._cache["up"]
        return _kernel_sum(tau_up, w_up, dens_up, z1, z2)

    def _near_eval_polygon(self, z1: np.ndarray, z2: np.ndarray) -> DualComplex:
        c = self.contour
        base = _kernel_sum(c.values(), c.dtau(), self.density, z1, z2)
        out1 = np.asarray(base.c1, dtype=complex).copy()
        out2 = np.asarray(base.c2, dtype=complex).copy()
        xq, yq = c.basis.xy_from_xi1(z1)
        for m in range(len(z1)):
            for (start, p0, p1) in c.panels:
                plen = float(np.hypot(*(p1 - p0)))
                dist = _point_segment_dist(xq[m], yq[m], p0, p1)
                if dist >= 2.0 * plen:
                    continue
                idx = slice(start, start + len(_PANEL_S))
                # remove the panel's plain contribution, add a refined one
                plain = _kernel_sum(
                    DualComplex(np.asarray(c.values().c1)[idx],
                                np.asarray(c.values().c2)[idx]),
                    DualComplex(np.asarray(c.dtau().c1)[idx],
                                np.asarray(c.dtau().c2)[idx]),
                    DualComplex(np.asarray(self.density.c1)[idx],
                                np.asarray(self.density.c2)[idx]),
                    z1[m:m + 1], z2[m:m + 1])
                refined = _refined_panel_integral(
                    c, self.density, start, p0, p1, z1[m], z2[m],
                    (xq[m], yq[m]))
                out1[m] += refined.c1 - complex(plain.c1[0])
                out2[m] += refined.c2 - complex(plain.c2[0])
        return DualComplex(out1, out2)


def cauchy_integral(contour: Contour, density, point: PointE,
                    allow_near: bool = False) -> DualComplex:
    """Cauchy-type integral at a point (or points) off the curve.

    Without ``allow_near`` the point must lie outside the guard band of the
    contour, where the native quadrature meets its accuracy target.
    """
    dens = boundary_samples(density, contour)
    if not allow_near:
        d = contour.dist_to(point.x, point.y)
        if np.any(d < contour.guard_band):
            raise TooCloseToBoundaryError(
                f"point within guard band {contour.guard_band:.3e} of the contour")
    return CauchyIntegralFn(contour, dens)(point)


# polygon panel refinement ------------------------------------------------------

from .contour import _GL_X as _PANEL_GLX, _GL_W as _PANEL_GLW  # noqa: E402

_PANEL_S = (_PANEL_GLX + 1.0) / 2.0
_PANEL_BARY = np.array([1.0 / np.prod([_PANEL_S[j] - _PANEL_S[k]
                                       for k in range(len(_PANEL_S)) if k != j])
                        for j in range(len(_PANEL_S))])


def _point_segment_dist(px, py, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    s = 0.0 if denom == 0 else float(np.clip(((px - a[0]) * ab[0] + (py - a[1]) * ab[1]) / denom, 0, 1))
    cx, cy = a + s * ab
    return float(np.hypot(px - cx, py - cy))


def _panel_density_interp(dens: DualComplex, start: int, s: np.ndarray) -> DualComplex:
    """Barycentric interpolation of the panel's 8 node samples at s in [0, 1]."""
    d1 = np.asarray(dens.c1)[start:start + len(_PANEL_S)]
    d2 = np.asarray(dens.c2)[start:start + len(_PANEL_S)]
    diff = s[:, None] - _PANEL_S[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15)
    diff = np.where(exact, 1.0, diff)
    w = _PANEL_BARY[None, :] / diff
    num1 = (w * d1[None, :]).sum(axis=1)
    num2 = (w * d2[None, :]).sum(axis=1)
    den = w.sum(axis=1)
    out1 = num1 / den
    out2 = num2 / den
    hit = exact.any(axis=1)
    if np.any(hit):
        j = exact[hit].argmax(axis=1)
        out1[hit] = d1[j]
        out2[hit] = d2[j]
    return DualComplex(out1, out2)


def _refined_panel_integral(contour: Contour, dens: DualComplex, start: int,
                            p0: np.ndarray, p1: np.ndarray,
                            z1: complex, z2: complex, pxy) -> DualComplex:
    """Adaptive Gauss-Legendre integration of the panel against the Cauchy
    kernel, bisecting until each piece is no longer than its distance to
    the target."""
    basis = contour.basis
    edge = basis.vector(p1[0] - p0[0], p1[1] - p0[1])  # d tau over the panel
    plen = float(np.hypot(*(p1 - p0)))

    total1, total2 = 0j, 0j
    stack = [(0.0, 1.0, 0)]
    while stack:
        s0, s1, depth = stack.pop()
        a = p0 + (p1 - p0) * s0
        b = p0 + (p1 - p0) * s1
        size = plen * (s1 - s0)
        dist = _point_segment_dist(pxy[0], pxy[1], a, b)
        if dist < size and depth < 12:
            mid = (s0 + s1) / 2.0
            stack.append((s0, mid, depth + 1))
            stack.append((mid, s1, depth + 1))
            continue
        s = s0 + (_PANEL_S * (s1 - s0))
        pv = _panel_density_interp(dens, start, s)
        pts = p0[None, :] + (p1 - p0)[None, :] * s[:, None]
        tau = basis.vector(pts[:, 0], pts[:, 1])
        u = tau.c1 - z1
        v = tau.c2 - z2
        inv_u = 1.0 / u
        a1 = pv.c1 * inv_u
        a2 = (pv.c2 - pv.c1 * v * inv_u) * inv_u
        wgt = _PANEL_GLW / 2.0 * (s1 - s0)
        total1 += (a1 * wgt).sum() * edge.c1
        total2 += ((a1 * wgt).sum() * edge.c2 + (a2 * wgt).sum() * edge.c1)
    scale = 1.0 / (2j * np.pi)
    return DualComplex(total1 * scale, total2 * scale)


# -- boundary limits --------------------------------------------------------------

@dataclass
class BoundaryTable:
    """Extrapolated one-sided boundary values at the smooth contour nodes."""

    indices: np.ndarray
    values: DualComplex
    error_estimates: np.ndarray
    side: str


def _neville_to_zero(ds: np.ndarray, v1: list[np.ndarray], v2: list[np.ndarray]):
    p1 = [np.array(v, dtype=complex) for v in v1]
    p2 = [np.array(v, dtype=complex) for v in v2]
    j = len(ds)
    penult = None
    for m in range(1, j):
        if m == j - 1:
            penult = (p1[0].copy(), p2[0].copy())
        for i in range(j - m):
            a, b = ds[i], ds[i + m]
            p1[i] = (a * p1[i + 1] - b * p1[i]) / (a - b)
            p2[i] = (a * p2[i + 1] - b * p2[i]) / (a - b)
    final = DualComplex(p1[0], p2[0])
    err = dc_norm(DualComplex(p1[0] - penult[0], p2[0] - penult[1]))
    return final, np.asarray(err)


def boundary_values(evaluator: Callable[[PointE], DualComplex], contour: Contour,
                    side: str, indices: Optional[np.ndarray] = None,
                    base_offset: Optional[float] = None,
                    n_offsets: int = N_OFFSETS) -> BoundaryTable:
    """One-sided limits of an off-curve evaluator at contour nodes.

    Approaches each node along its inward ('+') or outward ('-') normal at
    offsets h, h/2, ..., h/2^(J-1) and extrapolates the offset to zero.
    The evaluator must accept array-valued points.
    """
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    if indices is None:
        indices = contour.smooth_indices()
    indices = np.asarray(indices, dtype=int)
    if np.any(contour.corner_mask[indices]):
        bad = indices[contour.corner_mask[indices]]
        raise CornerNodeError(f"boundary limit at corner node(s) {bad[:4].tolist()}")
    h0 = base_offset if base_offset is not None else \
        OFFSET_SPACING_FACTOR * contour.max_spacing
    sign = 1.0 if side == "+" else -1.0
    normals = contour.inward_normals()[indices]
    ds = h0 / (2.0 ** np.arange(n_offsets))
    vals1, vals2 = [], []
    for d in ds:
        px = contour.xy[indices, 0] + sign * d * normals[:, 0]
        py = contour.xy[indices, 1] + sign * d * normals[:, 1]
        v = evaluator(PointE(px, py, contour.basis))
        vals1.append(np.atleast_1d(np.asarray(v.c1, dtype=complex)))
        vals2.append(np.atleast_1d(np.asarray(v.c2, dtype=complex)))
    limit, err = _neville_to_zero(ds, vals1, vals2)
    return BoundaryTable(indices=indices, values=limit,
                         error_estimates=err, side=side)


def boundary_limit(fn, contour: Contour, node_index: int, side: str,
                   tol: float = 1e-3):
    """One-sided boundary value at a single smooth node.

    ``fn`` may be a CauchyIntegralFn or any vectorized off-curve evaluator.
    Raises CornerNodeError at polygon corner nodes and NoConvergenceError
    when the extrapolation's internal error estimate exceeds ``tol``
    relative to the value scale.
    """
    node_index = int(node_index) % contour.n
    if contour.corner_mask[node_index]:
        raise CornerNodeError(f"node {node_index} is a corner node")
    table = boundary_values(fn, contour, side, indices=np.array([node_index]))
    val = table.values.item(0)
    err = float(table.error_estimates[0])
    if err > tol * (1.0 + float(dc_norm(val))):
        raise NoConvergenceError(
            f"offset extrapolation error estimate {err:.3e} exceeds tolerance",
            error_estimate=err)
    return val


@dataclass
class JumpReport:
    """Residuals of the jump identity psi~+ - psi~- = psi at smooth nodes."""

    indices: np.ndarray
    residuals: np.ndarray
    max_residual: float
    skipped_corners: int
    plus_error: float
    minus_error: float


def jump_check(contour: Contour, density) -> JumpReport:
    dens = boundary_samples(density, contour)
    fn = CauchyIntegralFn(contour, dens)
    plus = fn.boundary("+")
    minus = fn.boundary("-")
    idx = plus.indices
    d_at = DualComplex(np.asarray(dens.c1)[idx], np.asarray(dens.c2)[idx])
    diff = DualComplex(plus.values.c1 - minus.values.c1 - d_at.c1,
                       plus.values.c2 - minus.values.c2 - d_at.c2)
    res = np.asarray(dc_norm(diff))
    return JumpReport(indices=idx, residuals=res,
                      max_residual=float(res.max()),
                      skipped_corners=int(contour.corner_mask.sum()),
                      plus_error=float(plus.error_estimates.max()),
                      minus_error=float(minus.error_estimates.max()))


# -- classical consequences as computations ----------------------------------------

def taylor_coeffs(f: FieldFn, center: PointE, contour: Contour,
                  n_max: int) -> list[DualComplex]:
    """Power series coefficients about an interior center.

    c_n = (1 / (2 pi i)) * closed integral of f(tau) (tau - center)^(-n-1).
    """
    d = float(contour.dist_to(center.x, center.y)[0])
    if d < contour.guard_band:
        raise TooCloseToBoundaryError("expansion center is inside the guard band")
    if int(np.rint(contour.winding_number(center.x, center.y)[0])) == 0:
        raise InputError("expansion center is not inside the contour")
    samples = boundary_samples(f, contour)
    tau = contour.values()
    w = contour.dtau()
    zc = center.value()
    shifted = DualComplex(tau.c1 - zc.c1, tau.c2 - zc.c2)
    q = dc_inv(shifted)
    power = q  # (tau - center)^(-1)
    coeffs = []
    scale = 1.0 / (2j * np.pi)
    for _ in range(n_max + 1):
        integrand = dc_mul(samples, power)
        s1 = np.sum(integrand.c1 * w.c1) * scale
        s2 = np.sum(integrand.c1 * w.c2 + integrand.c2 * w.c1) * scale
        coeffs.append(DualComplex(complex(s1), complex(s2)))
        power = dc_mul(power, q)
    return coeffs


@dataclass
class LogResidueReport:
    zeros: int
    raw: DualComplex
    rounding_distance: float
    region: str


def log_residue(phi: FieldFn, dphi: FieldFn, contour: Contour,
                region: str = "+", tol: float = 1e-3) -> LogResidueReport:
    """Zero count from the logarithmic residue integral.

    (1 / (2 pi i)) * closed integral of phi'(tau) phi(tau)^(-1) equals the
    number of zeros of the complex part enclosed by the curve (with sign
    flipped when the function's domain is the exterior region).
    """
    if region not in ("+", "-"):
        raise ValueError("region must be '+' or '-'")
    pv = boundary_samples(phi, contour)
    floor = 1e-12 * np.maximum(1.0, dc_norm(pv))
    bad = np.abs(np.asarray(pv.c1)) <= floor
    if np.any(bad):
        raise NotInvertibleOnContourError(
            "function vanishes on the contour",
            indices=np.nonzero(bad)[0])
    dv = boundary_samples(dphi, contour)
    integrand = dc_mul(dv, dc_inv(pv))
    total = contour_integral(contour, integrand)
    raw = DualComplex(total.c1 / (2j * np.pi), total.c2 / (2j * np.pi))
    nearest = int(np.rint(np.real(raw.c1)))
    distance = float(dc_norm(DualComplex(raw.c1 - nearest, raw.c2)))
    if distance > tol:
        raise NonIntegerResidueError(
            f"logarithmic residue {raw.c1:.6g} is {distance:.3e} from an integer",
            raw=raw, distance=distance)
    zeros = nearest if region == "+" else -nearest
    return LogResidueReport(zeros=zeros, raw=raw, rounding_distance=distance,
                            region=region)


def morera_triangle_check(f: FieldFn, v1: PointE, v2: PointE, v3: PointE) -> float:
    """Norm of the closed integral of f over a triangle boundary.

    Small for monogenic f; order-one for generically non-monogenic samples.
    """
    pts = np.array([[v1.x, v1.y], [v2.x, v2.y], [v3.x, v3.y]], dtype=float)
    area = 0.5 * abs((pts[1, 0] - pts[0, 0]) * (pts[2, 1] - pts[0, 1])
                     - (pts[2, 0] - pts[0, 0]) * (pts[1, 1] - pts[0, 1]))
    scale = max(np.hypot(*(pts[i] - pts[j])) for i, j in ((0, 1), (1, 2), (2, 0)))
    if area <= 1e-12 * max(scale, 1e-30) ** 2:
        raise DegenerateTriangleError("triangle vertices are collinear")
    basis = v1.basis
    total1, total2 = 0j, 0j
    for i in range(3):
        a, b = pts[i], pts[(i + 1) % 3]
        s = (GL16_X + 1.0) / 2.0
        px = a[0] + (b[0] - a[0]) * s
        py = a[1] + (b[1] - a[1]) * s
        vals = field_eval(f, PointE(px, py, basis))
        edge = basis.vector(b[0] - a[0], b[1] - a[1])
        w = GL16_W / 2.0
        f1 = np.sum(np.asarray(vals.c1) * w)
        f2 = np.sum(np.asarray(vals.c2) * w)
        total1 += f1 * edge.c1
        total2 += f1 * edge.c2 + f2 * edge.c1
    return float(dc_norm(DualComplex(total1, total2)))


@dataclass
class MonogenicityReport:
    point: PointE
    deltas: tuple
    quotients: list                 # per delta: list of DualComplex per direction
    raw_spread: np.ndarray          # spread of raw quotients, per delta
    direction_limits: list          # per direction, scale extrapolated to zero
    direction_spread: float         # spread of the extrapolated limits
    limit: DualComplex

    @property
    def is_direction_independent(self) -> bool:
        return bool(self.direction_spread < 100 * self.raw_spread[-1] ** 2 + 1e-9)


def monogenicity_check(f: FieldFn, point: PointE,
                       deltas: Sequence[float] = (1e-3, 5e-4, 2.5e-4)) -> MonogenicityReport:
    """Direction independence of the difference quotient at a point.

    Quotients (f(zeta + h) - f(zeta)) h^(-1) are formed for h along e1, e2,
    and their normalized sum, at a few shrinking scales.  Each direction's
    quotient is extrapolated to scale zero (the raw one-sided quotient
    carries an O(delta) bias even for monogenic functions); a monogenic
    function gives extrapolated limits that agree across directions.
    """
    basis = point.basis
    dirs = [(1.0, 0.0), (0.0, 1.0), (1.0 / np.sqrt(2), 1.0 / np.sqrt(2))]
    f0 = field_eval(f, point)
    quotients = []
    spreads = []
    for d in deltas:
        row = []
        for (ux, uy) in dirs:
            h = basis.vector(ux * d, uy * d)
            fv = field_eval(f, point.shifted(ux * d, uy * d))
            q = dc_mul(DualComplex(fv.c1 - f0.c1, fv.c2 - f0.c2), dc_inv(h))
            row.append(DualComplex(complex(q.c1), complex(q.c2)))
        quotients.append(row)
        spread = max(float(dc_norm(DualComplex(a.c1 - b.c1, a.c2 - b.c2)))
                     for i, a in enumerate(row) for b in row[i + 1:])
        spreads.append(spread)
    # first-order Richardson per direction on the two smallest scales
    last, prev = quotients[-1], quotients[-2]
    ratio = deltas[-2] / deltas[-1]
    direction_limits = [
        DualComplex((ratio * a.c1 - b.c1) / (ratio - 1.0),
                    (ratio * a.c2 - b.c2) / (ratio - 1.0))
        for a, b in zip(last, prev)
    ]
    dir_spread = max(float(dc_norm(DualComplex(a.c1 - b.c1, a.c2 - b.c2)))
                     for i, a in enumerate(direction_limits)
                     for b in direction_limits[i + 1:])
    lim1 = np.mean([v.c1 for v in direction_limits])
    lim2 = np.mean([v.c2 for v in direction_limits])
    return MonogenicityReport(point=point, deltas=tuple(deltas),
                              quotients=quotients,
                              raw_spread=np.asarray(spreads),
                              direction_limits=direction_limits,
                              direction_spread=dir_spread,
                              limit=DualComplex(complex(lim1), complex(lim2)))


@dataclass
class ComponentDecomposition:
    """Split of a field function into a holomorphic complex part and a
    rho part: f(zeta) = F(xi1) + f0(zeta) rho with F holomorphic."""

    complex_part: Callable          # F: complex -> complex
    rho_part: Callable              # PointE -> complex
    cr_residual: float
    fiber_residual: float


def component_decompose(f: FieldFn, grid: PointE,
                        tol: float = 1e-6) -> ComponentDecomposition:
    basis = grid.basis
    vals = field_eval(f, grid)
    scale = 1.0 + float(np.max(dc_norm(vals)))

    # the complex part must not see the rho coordinate
    fiber_residual = 0.0
    probe = grid.value()
    for shift in (0.37, -0.61):
        try:
            shifted = _eval_on_algebra(f, DualComplex(probe.c1, probe.c2 + shift))
        except TypeError:
            break
        fiber_residual = max(fiber_residual,
                             float(np.max(np.abs(shifted.c1 - vals.c1))))
    if fiber_residual > tol * scale:
        raise FiberInconsistencyError(
            f"complex part varies along rho-fibers by {fiber_residual:.3e}")

    def complex_part(w):
        x, y = basis.xy_from_xi1(np.asarray(w, dtype=complex))
        return field_eval(f, PointE(x, y, basis)).c1

    def rho_part(point: PointE):
        return field_eval(f, point).c2

    # Cauchy-Riemann finite differences of F on the grid's scale
    w0 = np.asarray(grid.value().c1).ravel()
    d = 1e-5 * (1.0 + np.abs(w0))
    fx = (complex_part(w0 + d) - complex_part(w0 - d)) / (2 * d)
    fy = (complex_part(w0 + 1j * d) - complex_part(w0 - 1j * d)) / (2 * d)
    cr = float(np.max(np.abs((fx + 1j * fy) / 2.0)))
    return ComponentDecomposition(complex_part=complex_part, rho_part=rho_part,
                                  cr_residual=cr, fiber_residual=fiber_residual)


def _eval_on_algebra(f, value: DualComplex) -> DualComplex:
    """Evaluate at a raw algebra element (off the plane E) when possible."""
    if _is_expr(f):
        return _expr.evaluate(f, z=value)
    return f(value)
