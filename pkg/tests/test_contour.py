import numpy as np
import pytest

from dualrbvp import (
    build_contour,
    circle_contour,
    ellipse_contour,
    explicit_contour,
    interior_test,
    polygon_contour,
    theta_measure,
)
from dualrbvp.errors import EmptySpecError, SelfIntersectingError

SQUARE = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]


class TestBuild:
    def test_circle_length(self, bih):
        c = circle_contour(bih, radius=1.0, nodes=512)
        assert abs(c.length - 2 * np.pi) < 1e-10

    def test_circle_length_stable_under_doubling(self, bih):
        c1 = circle_contour(bih, radius=1.0, nodes=512)
        c2 = c1.rebuilt(1024)
        assert abs(c2.length - c1.length) / c1.length < 1e-6

    def test_chord_length_second_order(self, bih):
        errs = []
        for n in (64, 128, 256):
            c = circle_contour(bih, radius=1.0, nodes=n)
            chord = np.hypot(*(np.roll(c.xy, -1, axis=0) - c.xy).T).sum()
            errs.append(abs(chord - 2 * np.pi))
        assert errs[0] / errs[1] > 3.5
        assert errs[1] / errs[2] > 3.5

    def test_square_perimeter(self, bih):
        c = polygon_contour(bih, SQUARE, nodes=512)
        assert c.length == pytest.approx(8.0, abs=1e-12)

    def test_clockwise_circle_reversed_with_warning(self, bih):
        with pytest.warns(UserWarning):
            c = circle_contour(bih, radius=1.0, nodes=128, clockwise=True)
        assert c.orientation_reversed
        assert c.xy_ccw
        ccw = circle_contour(bih, radius=1.0, nodes=128)
        assert np.allclose(c.xy, ccw.xy, atol=1e-12)
        assert np.allclose(c.w_xy, ccw.w_xy, atol=1e-12)

    def test_clockwise_polygon_reversed(self, bih):
        with pytest.warns(UserWarning):
            c = polygon_contour(bih, SQUARE[::-1], nodes=64)
        assert c.xy_ccw

    def test_invalid_specs(self, bih):
        with pytest.raises(EmptySpecError):
            circle_contour(bih, radius=-1.0)
        with pytest.raises(EmptySpecError):
            polygon_contour(bih, [[0, 0], [1, 1]])
        with pytest.raises(EmptySpecError):
            build_contour(bih, {})

    def test_self_intersection_detected(self, bih):
        bowtie = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]
        with pytest.raises(SelfIntersectingError):
            polygon_contour(bih, bowtie, nodes=64)
        polygon_contour(bih, bowtie, nodes=64, check_simple=False)

    def test_build_dispatch(self, bih):
        c = build_contour(bih, {"kind": "ellipse", "semi_axes": [1.5, 0.8],
                                "nodes": 256})
        assert c.kind == "ellipse"
        e = build_contour(bih, {"kind": "explicit",
                                "points": circle_contour(bih, nodes=64).xy.tolist()})
        assert e.kind == "explicit"

    def test_node_parameters_uniform(self, unit_circle):
        assert np.allclose(unit_circle.t, np.arange(512) / 512)


class TestInteriorTest:
    def test_unit_circle_origin(self, bih, unit_circle):
        assert interior_test(unit_circle, bih.embed(0.0, 0.0)) == "interior"

    def test_unit_circle_far_point(self, bih, unit_circle):
        assert interior_test(unit_circle, bih.embed(3.0, 0.0)) == "exterior"

    def test_near_boundary_guard(self, bih, unit_circle):
        assert interior_test(unit_circle, bih.embed(1.0 - 1e-9, 0.0)) == "near-boundary"

    def test_matches_analytic_sign_test(self, bih, rng):
        for kind, contour, inside in (
            ("circle", circle_contour(bih, center=(0.2, -0.1), radius=1.3, nodes=512),
             lambda x, y: np.hypot(x - 0.2, y + 0.1) < 1.3),
            ("ellipse", ellipse_contour(bih, semi_axes=(1.5, 0.8), nodes=512),
             lambda x, y: (x / 1.5) ** 2 + (y / 0.8) ** 2 < 1.0),
        ):
            x = rng.uniform(-2.5, 2.5, size=1000)
            y = rng.uniform(-2.5, 2.5, size=1000)
            code = contour.interior_mask(x, y)
            ok = code != -1
            assert np.array_equal(code[ok] == 1, inside(x, y)[ok]), kind


class TestThetaMeasure:
    def test_saturates_at_full_length(self, unit_circle):
        assert theta_measure(unit_circle, 0, 2.5) == pytest.approx(
            unit_circle.length, rel=1e-6)

    def test_small_ball_chord_to_arc(self, unit_circle):
        got = theta_measure(unit_circle, 0, 0.1)
        assert got == pytest.approx(4 * np.arcsin(0.05), abs=1e-3)

    def test_monotone_and_vanishing(self, unit_circle):
        eps = [0.4, 0.2, 0.1, 0.05, 0.025]
        vals = [theta_measure(unit_circle, 17, e) for e in eps]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 0.06
        assert all(v <= unit_circle.length + 1e-12 for v in vals)

    def test_rejects_nonpositive_eps(self, unit_circle):
        with pytest.raises(ValueError):
            theta_measure(unit_circle, 0, 0.0)


class TestGeometryHelpers:
    def test_point_at_matches_nodes(self, bih):
        for c in (circle_contour(bih, nodes=64),
                  ellipse_contour(bih, semi_axes=(1.5, 0.8), nodes=64),
                  explicit_contour(bih, circle_contour(bih, nodes=64).xy)):
            got = c.point_at(c.t)
            assert np.max(np.abs(got - c.xy)) < 1e-12, c.kind

    def test_polygon_point_at_lands_on_edges(self, bih):
        c = polygon_contour(bih, SQUARE, nodes=128)
        pts = c.point_at(np.linspace(0, 1, 37, endpoint=False))
        on_square = np.maximum(np.abs(pts[:, 0]), np.abs(pts[:, 1]))
        assert np.max(np.abs(on_square - 1.0)) < 1e-12

    def test_corner_mask_square(self, bih):
        c = polygon_contour(bih, SQUARE, nodes=512)
        assert c.corner_mask.any()
        assert (~c.corner_mask).sum() > 0.6 * c.n
        corner_xy = c.xy[c.corner_mask]
        vert_dist = np.min(
            [np.hypot(corner_xy[:, 0] - vx, corner_xy[:, 1] - vy)
             for vx, vy in SQUARE], axis=0)
        panel_len = 2.0 / 16  # edge length 2, 128 nodes per edge in 16 panels
        assert np.max(vert_dist) < 1.05 * panel_len

    def test_inward_normals_point_inside(self, bih, unit_circle):
        nrm = unit_circle.inward_normals()
        probe = unit_circle.xy + 0.05 * nrm
        assert np.all(np.hypot(probe[:, 0], probe[:, 1]) < 1.0)

    def test_content_hash_deterministic(self, bih):
        a = circle_contour(bih, nodes=128).content_hash()
        b = circle_contour(bih, nodes=128).content_hash()
        c = circle_contour(bih, nodes=256).content_hash()
        assert a == b != c

    def test_guard_band_scale(self, unit_circle):
        assert unit_circle.guard_band == pytest.approx(
            3 * unit_circle.max_spacing)
        assert unit_circle.max_spacing == pytest.approx(2 * np.pi / 512, rel=1e-3)
