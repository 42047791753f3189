import numpy as np
import pytest

from dualrbvp import (
    DualComplex,
    boundary_limit,
    cauchy_integral,
    circle_contour,
    component_decompose,
    contour_integral,
    dc_inv,
    dc_mul,
    dc_norm,
    dc_sub,
    differentiate,
    ellipse_contour,
    evaluate,
    jump_check,
    log_residue,
    monogenicity_check,
    morera_triangle_check,
    parse,
    polygon_contour,
    taylor_coeffs,
)
from dualrbvp.algebra import PointE
from dualrbvp.integral import CauchyIntegralFn, boundary_samples, boundary_values
from dualrbvp.errors import (
    CornerNodeError,
    DegenerateTriangleError,
    FiberInconsistencyError,
    InputError,
    NonIntegerResidueError,
    NotInvertibleOnContourError,
    TooCloseToBoundaryError,
)

SQUARE = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]


def norm_of(c):
    return float(np.max(dc_norm(c)))


def sawtooth_density(contour, modes=6, rho_modes=4):
    """Smooth truncated-series surrogate for rough-but-continuous data."""
    t = contour.t
    g1 = sum(np.sin(2 * np.pi * k * t) / k ** 2 for k in range(1, modes + 1)) + 0.5
    g2 = 0.3 * sum(np.cos(2 * np.pi * k * t) / k ** 2 for k in range(1, rho_modes + 1))
    return DualComplex(g1.astype(complex), g2.astype(complex))


class TestContourIntegral:
    def test_constant_telescopes_exactly(self, bih, unit_circle):
        for c in (unit_circle, polygon_contour(bih, SQUARE, nodes=512),
                  ellipse_contour(bih, semi_axes=(1.5, 0.8), nodes=512)):
            v = contour_integral(c, parse("1"))
            assert norm_of(v) < 1e-13, c.kind

    def test_reciprocal_residue(self, unit_circle):
        v = contour_integral(unit_circle, parse("1/tau"))
        assert abs(v.c1 - 2j * np.pi) < 1e-12
        assert abs(v.c2) < 1e-12

    def test_monogenic_trace_vanishes(self, unit_circle):
        v = contour_integral(unit_circle, parse("exp(z)"))
        assert norm_of(v) < 1e-8

    def test_cauchy_theorem_corpus(self, bih):
        contours = [
            ("circle", circle_contour(bih, center=(0.1, -0.2), radius=1.3, nodes=512), 1e-8),
            ("ellipse", ellipse_contour(bih, semi_axes=(1.5, 0.8), nodes=512), 1e-8),
            ("square", polygon_contour(bih, SQUARE, nodes=512), 1e-6),
        ]
        fns = [f"z^{n}" for n in range(6)] + ["exp(z)", "z^2*exp(z)"]
        for name, c, tol in contours:
            for text in fns:
                v = contour_integral(c, parse(text))
                assert norm_of(v) <= tol, (name, text)


class TestCauchyIntegral:
    def test_constant_density_step(self, bih, unit_circle):
        inside = cauchy_integral(unit_circle, parse("1"), bih.embed(0.2, -0.1))
        outside = cauchy_integral(unit_circle, parse("1"), bih.embed(1.7, 0.4))
        assert norm_of(dc_sub(inside, DualComplex(1, 0))) < 1e-12
        assert norm_of(outside) < 1e-12

    def test_identity_density(self, bih, unit_circle):
        pt = bih.embed(-0.3, 0.25)
        v = cauchy_integral(unit_circle, parse("tau"), pt)
        assert norm_of(dc_sub(v, pt.value())) < 1e-12

    def test_reciprocal_density_exterior(self, bih, unit_circle):
        pe = bih.embed(1.9, -0.8)
        v = cauchy_integral(unit_circle, parse("1/tau"), pe)
        want = -1 * dc_inv(pe.value())
        assert norm_of(dc_sub(v, want)) < 1e-12

    def test_guard_band_enforced(self, bih, unit_circle):
        with pytest.raises(TooCloseToBoundaryError):
            cauchy_integral(unit_circle, parse("1"), bih.embed(0.99, 0.0))

    def test_reproduction_invariant(self, bih, unit_circle, rng):
        f = parse("exp(z)")
        fn = CauchyIntegralFn(unit_circle, boundary_samples(f, unit_circle))
        ang = rng.uniform(0, 2 * np.pi, 40)
        r_in = rng.uniform(0.0, 0.7, 40)
        pin = PointE(r_in * np.cos(ang), r_in * np.sin(ang), bih)
        err = dc_norm(dc_sub(fn(pin), evaluate(f, z=pin)))
        assert float(np.max(err)) <= 1e-8
        r_out = rng.uniform(1.5, 4.0, 40)
        pout = PointE(r_out * np.cos(ang), r_out * np.sin(ang), bih)
        assert norm_of(fn(pout)) <= 1e-8

    def test_near_boundary_upsampled_path(self, bih, unit_circle):
        fn = CauchyIntegralFn(unit_circle, boundary_samples(parse("tau"), unit_circle))
        pt = bih.embed(0.985, 0.0)  # inside the guard band, on the refined path
        v = fn(pt)
        assert norm_of(dc_sub(v, pt.value())) < 1e-9

    def test_polygon_near_boundary_refinement(self, bih):
        c = polygon_contour(bih, SQUARE, nodes=512)
        fn = CauchyIntegralFn(c, boundary_samples(parse("1"), c))
        pt = bih.embed(0.0, 0.97)  # distance 0.03 from the top edge
        assert norm_of(dc_sub(fn(pt), DualComplex(1, 0))) < 1e-8

    def test_decay_at_infinity(self, bih, unit_circle):
        fn = CauchyIntegralFn(unit_circle, boundary_samples(parse("1/tau"), unit_circle))
        radii = np.array([10.0, 100.0, 1000.0])
        mags = [norm_of(fn(bih.embed(r / np.sqrt(2), r / np.sqrt(2)))) for r in radii]
        slope = np.polyfit(np.log(radii), np.log(mags), 1)[0]
        assert abs(slope + 1.0) < 0.1
        assert norm_of(fn.at_infinity()) == 0.0


class TestBoundaryLimits:
    def test_constant_density_limits(self, unit_circle):
        fn = CauchyIntegralFn(unit_circle,
                              boundary_samples(parse("1"), unit_circle))
        plus = boundary_limit(fn, unit_circle, 10, "+")
        minus = boundary_limit(fn, unit_circle, 10, "-")
        assert norm_of(dc_sub(plus, DualComplex(1, 0))) < 1e-8
        assert norm_of(minus) < 1e-8

    def test_identity_density_limits(self, unit_circle):
        fn = CauchyIntegralFn(unit_circle,
                              boundary_samples(parse("tau"), unit_circle))
        k = 37
        tau_k = unit_circle.values().item(k)
        plus = boundary_limit(fn, unit_circle, k, "+")
        minus = boundary_limit(fn, unit_circle, k, "-")
        assert norm_of(dc_sub(plus, tau_k)) < 1e-8
        assert norm_of(minus) < 1e-8

    def test_corner_node_rejected(self, bih):
        c = polygon_contour(bih, SQUARE, nodes=512)
        fn = CauchyIntegralFn(c, boundary_samples(parse("1"), c))
        corner = int(np.nonzero(c.corner_mask)[0][0])
        with pytest.raises(CornerNodeError):
            boundary_limit(fn, c, corner, "+")

    def test_error_estimates_reported(self, unit_circle):
        fn = CauchyIntegralFn(unit_circle,
                              boundary_samples(parse("exp(z)"), unit_circle))
        table = boundary_values(fn, unit_circle, "+")
        assert table.error_estimates.shape == table.indices.shape
        assert float(table.error_estimates.max()) < 1e-6


class TestJumpCheck:
    def test_zero_density(self, unit_circle):
        zero = DualComplex(np.zeros(512, complex), np.zeros(512, complex))
        assert jump_check(unit_circle, zero).max_residual == 0.0

    def test_constant_density(self, unit_circle):
        jr = jump_check(unit_circle, parse("1"))
        assert jr.max_residual <= 1e-4

    def test_interior_factor_times_rough(self, unit_circle):
        g = sawtooth_density(unit_circle)
        h_plus = boundary_samples(parse("exp(z)"), unit_circle)
        jr = jump_check(unit_circle, dc_mul(h_plus, g))
        assert jr.max_residual <= 1e-3

    def test_exterior_factor_times_rough(self, unit_circle):
        g = sawtooth_density(unit_circle)
        h_minus = boundary_samples(parse("exp(1/tau)"), unit_circle)
        jr = jump_check(unit_circle, dc_mul(h_minus, g))
        assert jr.max_residual <= 1e-3

    def test_square_smooth_nodes(self, bih):
        c = polygon_contour(bih, SQUARE, nodes=512)
        jr = jump_check(c, parse("tau"))
        assert jr.skipped_corners > 0
        assert jr.max_residual <= 1e-3


class TestTaylor:
    def test_square_function(self, bih, unit_circle):
        coeffs = taylor_coeffs(parse("z^2"), bih.embed(0, 0), unit_circle, 3)
        want = [0, 0, 1, 0]
        for c, w in zip(coeffs, want):
            assert norm_of(dc_sub(c, DualComplex(w, 0))) < 1e-8

    def test_constant(self, bih, unit_circle):
        k = DualComplex(2.5, -1j)
        coeffs = taylor_coeffs(lambda p: DualComplex(
            np.full(np.shape(p.x), k.c1), np.full(np.shape(p.x), k.c2)),
            bih.embed(0, 0), unit_circle, 4)
        assert norm_of(dc_sub(coeffs[0], k)) < 1e-10
        assert all(norm_of(c) < 1e-10 for c in coeffs[1:])

    def test_exponential_series(self, bih, unit_circle):
        import math
        coeffs = taylor_coeffs(parse("exp(z)"), bih.embed(0, 0), unit_circle, 8)
        for n, c in enumerate(coeffs):
            want = 1.0 / math.factorial(n)
            assert abs(c.c1 - want) < 1e-8, n
            assert abs(c.c2) < 1e-8, n

    def test_center_must_be_interior(self, bih, unit_circle):
        with pytest.raises(InputError):
            taylor_coeffs(parse("z"), bih.embed(2.0, 0.0), unit_circle, 2)
        with pytest.raises(TooCloseToBoundaryError):
            taylor_coeffs(parse("z"), bih.embed(0.999, 0.0), unit_circle, 2)

    def test_series_reproduces_function(self, bih, unit_circle):
        f = parse("exp(z)*z^2")
        coeffs = taylor_coeffs(f, bih.embed(0, 0), unit_circle, 12)
        pt = bih.embed(0.3, 0.2)
        z = pt.value()
        acc = DualComplex(0j, 0j)
        power = DualComplex(1 + 0j, 0j)
        for c in coeffs:
            acc = acc + dc_mul(c, power)
            power = dc_mul(power, z)
        assert norm_of(dc_sub(acc, evaluate(f, z=pt))) < 1e-9


class TestLogResidue:
    def test_simple_zero(self, bih, unit_circle):
        phi = parse("z-(0.3+0.2i)")
        rep = log_residue(phi, differentiate(phi), unit_circle, "+")
        assert rep.zeros == 1
        assert rep.rounding_distance < 1e-6

    def test_constant_no_zeros(self, unit_circle):
        phi = parse("2+rho")
        rep = log_residue(phi, differentiate(phi), unit_circle, "+")
        assert rep.zeros == 0
        assert rep.rounding_distance < 1e-12

    def test_double_zero(self, bih, unit_circle):
        phi = parse("(z-0.4)^2")
        rep = log_residue(phi, differentiate(phi), unit_circle, "+")
        assert rep.zeros == 2
        assert rep.rounding_distance < 1e-6

    def test_exterior_region_counts(self, unit_circle):
        # zero at 3 (outside), pole at 0 (inside): counts one exterior zero
        phi = parse("(z-3)/z")
        rep = log_residue(phi, differentiate(phi), unit_circle, "-")
        assert rep.zeros == 1
        assert rep.rounding_distance < 1e-6

    def test_vanishing_on_contour_rejected(self, unit_circle):
        phi = parse("z-1")  # zero on the curve
        with pytest.raises(NotInvertibleOnContourError):
            log_residue(phi, differentiate(phi), unit_circle, "+")

    def test_inconsistent_derivative_detected(self, unit_circle):
        phi = parse("z-0.3")
        with pytest.raises(NonIntegerResidueError):
            log_residue(phi, parse("exp(z)"), unit_circle, "+")


class TestMorera:
    def test_monogenic_cube(self, bih, rng):
        for _ in range(5):
            pts = rng.uniform(-0.6, 0.6, size=(3, 2))
            u, v = pts[1] - pts[0], pts[2] - pts[0]
            if abs(u[0] * v[1] - u[1] * v[0]) < 0.05:
                continue
            res = morera_triangle_check(parse("z^3"),
                                        bih.embed(*pts[0]), bih.embed(*pts[1]),
                                        bih.embed(*pts[2]))
            assert res <= 1e-8

    def test_non_monogenic_conjugate_like(self, bih):
        def conj_like(p: PointE) -> DualComplex:
            return DualComplex(np.conjugate(p.xi1), np.zeros_like(p.xi1))

        res = morera_triangle_check(conj_like, bih.embed(0, 0),
                                    bih.embed(1, 0), bih.embed(0, 1))
        assert res > 1e-2  # 2 * area for the conjugate

    def test_nearest_node_lookup_promotion(self, bih, unit_circle):
        g = sawtooth_density(unit_circle)

        def promoted(p: PointE) -> DualComplex:
            ang = np.mod(np.arctan2(p.y, p.x) / (2 * np.pi), 1.0)
            k = np.asarray(np.rint(ang * unit_circle.n), dtype=int) % unit_circle.n
            return DualComplex(np.asarray(g.c1)[k], np.asarray(g.c2)[k])

        res = morera_triangle_check(promoted, bih.embed(0.1, 0.1),
                                    bih.embed(0.6, 0.2), bih.embed(0.3, 0.7))
        assert res > 1e-4

    def test_degenerate_triangle(self, bih):
        with pytest.raises(DegenerateTriangleError):
            morera_triangle_check(parse("z"), bih.embed(0, 0),
                                  bih.embed(1, 1), bih.embed(2, 2))


class TestMonogenicity:
    def test_square_at_e1(self, bih):
        rep = monogenicity_check(parse("z^2"), bih.embed(1.0, 0.0))
        want = dc_mul(DualComplex(2, 0), bih.embed(1.0, 0.0).value())
        for v in rep.direction_limits:
            assert norm_of(dc_sub(v, want)) <= 1e-5
        assert rep.direction_spread <= 1e-5
        assert rep.is_direction_independent

    def test_constant(self, bih):
        rep = monogenicity_check(parse("2+3i"), bih.embed(0.2, 0.4))
        assert norm_of(rep.limit) < 1e-10
        assert rep.direction_spread < 1e-10

    def test_log_derivative(self, bih):
        rep = monogenicity_check(parse("ln(z)"), bih.embed(2.0, 0.0))
        assert abs(rep.limit.c1 - 0.5) < 1e-4

    def test_matches_symbolic_derivative(self, bih, rng):
        for text in ("z^3", "exp(z)", "z*exp(z)", "1/(z+3)"):
            e = parse(text)
            p = bih.embed(float(rng.uniform(-0.4, 0.4)), float(rng.uniform(-0.4, 0.4)))
            rep = monogenicity_check(e, p)
            want = evaluate(differentiate(e), z=p)
            assert norm_of(dc_sub(rep.limit, want)) < 1e-4, text


class TestComponentDecompose:
    def grid(self, bih, rng):
        x = rng.uniform(-0.7, 0.7, 60)
        y = rng.uniform(-0.7, 0.7, 60)
        return PointE(x, y, bih)

    def test_square_function(self, bih, rng):
        g = self.grid(bih, rng)
        dec = component_decompose(parse("z^2"), g)
        w = np.asarray(g.value().c1)
        assert np.max(np.abs(dec.complex_part(w) - w ** 2)) < 1e-10
        want_rho = 2 * np.asarray(g.value().c1) * np.asarray(g.value().c2)
        assert np.max(np.abs(dec.rho_part(g) - want_rho)) < 1e-10
        assert dec.cr_residual < 1e-6
        assert dec.fiber_residual < 1e-12

    def test_constant(self, bih, rng):
        dec = component_decompose(parse("2+rho"), self.grid(bih, rng))
        assert abs(dec.complex_part(0.1 + 0.2j) - 2.0) < 1e-12
        assert dec.cr_residual < 1e-8

    def test_exponential(self, bih, rng):
        g = self.grid(bih, rng)
        dec = component_decompose(parse("exp(z)"), g)
        w = np.asarray(g.value().c1)
        assert np.max(np.abs(dec.complex_part(w) - np.exp(w))) < 1e-10
        want_rho = np.asarray(g.value().c2) * np.exp(w)
        assert np.max(np.abs(dec.rho_part(g) - want_rho)) < 1e-10
        assert dec.cr_residual < 1e-6

    def test_fiber_inconsistency_detected(self, bih, rng):
        def rho_leak(v: DualComplex) -> DualComplex:
            if isinstance(v, PointE):
                v = v.value()
            return DualComplex(v.c2, np.zeros_like(np.asarray(v.c1)))

        with pytest.raises(FiberInconsistencyError):
            component_decompose(rho_leak, self.grid(bih, rng))
