import numpy as np
import pytest

from dualrbvp import (
    DualComplex,
    circle_contour,
    dini_estimate,
    modulus_of_continuity,
    parse,
    regularity_report,
    sup_norm,
)
from dualrbvp.algebra import PointE
from dualrbvp.integral import boundary_samples


class TestModulusOfContinuity:
    def test_constant_is_flat(self, unit_circle):
        eps, omega = modulus_of_continuity(unit_circle, parse("2+3i"))
        assert np.max(omega) == 0.0

    def test_identity_slope_matches_embedding(self, bih, unit_circle):
        eps, omega = modulus_of_continuity(unit_circle, parse("tau"))
        # g(tau) = tau is Lipschitz with constant max ||unit direction in E||
        ang = np.linspace(0, 2 * np.pi, 720)
        lip = float(np.max(np.hypot(np.abs(bih.embed(np.cos(ang), np.sin(ang)).xi1),
                                    np.abs(bih.embed(np.cos(ang), np.sin(ang)).xi2))))
        small = eps <= 0.25 * eps.max()
        slope = np.polyfit(eps[small], omega[small], 1)[0]
        assert abs(slope - lip) / lip < 0.1

    def test_saturation_at_diameter(self, unit_circle):
        vals = boundary_samples(parse("tau"), unit_circle)
        d1 = np.asarray(vals.c1)
        d2 = np.asarray(vals.c2)
        gap = np.hypot(np.abs(d1[:, None] - d1[None, :]),
                       np.abs(d2[:, None] - d2[None, :]))
        eps, omega = modulus_of_continuity(unit_circle, parse("tau"),
                                           eps_grid=[3.0])
        assert omega[0] == pytest.approx(float(gap.max()), rel=1e-12)

    def test_monotone(self, unit_circle):
        eps, omega = modulus_of_continuity(unit_circle, parse("exp(tau)"))
        assert np.all(np.diff(omega) >= -1e-15)


class TestDiniEstimate:
    def test_constant_is_zero(self, unit_circle):
        assert dini_estimate(unit_circle, parse("5")) == 0.0

    def test_lipschitz_ballpark_and_stability(self, bih):
        c = circle_contour(bih, radius=1.0, nodes=512)
        est = dini_estimate(c, parse("tau"), levels=40)
        # expected scale: integral of Lip * eta / eta against ~2 d eta
        lip = 1.118  # max unit-direction norm in the default basis
        assert 0.5 * 2 * lip < est < 2.0 * 2 * lip
        est_half = dini_estimate(c, parse("tau"), levels=20)
        assert abs(est - est_half) / est < 0.2

    def test_jump_flagged_as_divergent(self, bih):
        c = circle_contour(bih, radius=1.0, nodes=256)

        def with_jump(points: PointE) -> DualComplex:
            sign = np.where(points.y >= 0, 1.0, -1.0).astype(complex)
            return DualComplex(sign, np.zeros_like(sign))

        rep = regularity_report(c, with_jump)
        assert rep.divergence_suspected
        smooth = regularity_report(c, parse("exp(tau)"))
        assert not smooth.divergence_suspected

    def test_report_fields(self, unit_circle):
        rep = regularity_report(unit_circle, parse("tau"))
        assert not rep.is_constant
        assert rep.lipschitz_slope is not None
        assert rep.dini_estimate >= rep.dini_half_depth > 0
        const = regularity_report(unit_circle, parse("1"))
        assert const.is_constant


class TestSupNorm:
    def test_zero(self, bih, rng):
        pts = PointE(rng.normal(size=50), rng.normal(size=50), bih)
        assert sup_norm(parse("0"), pts) == 0.0

    def test_identity_on_disk_converges_from_below(self, bih, rng):
        vals = []
        for n in (100, 1000, 10000):
            ang = rng.uniform(0, 2 * np.pi, n)
            r = np.sqrt(rng.uniform(0, 1, n))
            pts = PointE(r * np.cos(ang), r * np.sin(ang), bih)
            vals.append(sup_norm(parse("z"), pts))
        assert vals[0] <= vals[2] + 1e-12
        assert vals[2] <= 1.118034 + 1e-6  # boundary maximum in this basis

    def test_monotone_under_inclusion(self, bih, rng):
        x = rng.normal(size=200)
        y = rng.normal(size=200)
        small = PointE(x[:50], y[:50], bih)
        large = PointE(x, y, bih)
        f = parse("exp(z)")
        assert sup_norm(f, small) <= sup_norm(f, large) + 1e-15

    def test_precomputed_samples(self, rng):
        vals = DualComplex(rng.normal(size=20) + 0j, rng.normal(size=20) + 0j)
        assert sup_norm(vals, None) == pytest.approx(
            float(np.max(np.hypot(np.abs(vals.c1), np.abs(vals.c2)))))
