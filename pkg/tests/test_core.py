"""Group structure, frames, contact form, and dimensional constants."""

import math

import numpy as np
import pytest

from heisgeo.core import (AmbientVector, ContactVector, HPoint, apply_J,
                          constants, coords_to_frame, direction_to_pansu_point,
                          frame_to_coords, group_inv, group_mul, levi_inner,
                          pushforward, pushforward_ambient,
                          sphere_surface_area, theta_eval, unit_ball_volume)


def random_point(rng, n, scale=2.0):
    return HPoint(tuple(rng.uniform(-scale, scale, 2 * n + 1)))


def coord_pushforward(g: HPoint, w):
    """Independent oracle: the coordinate Jacobian of left translation.

    Translation adds constants to x, y and twists z, so the differential
    is the identity on the x, y slots and dz' = dz + sum_j (g_{y_j} dx_j
    - g_{x_j} dy_j), independent of where the vector sits.
    """
    out = list(w)
    z = w[-1]
    for j in range(g.n):
        z += g.coords[2 * j + 1] * w[2 * j] - g.coords[2 * j] * w[2 * j + 1]
    out[-1] = z
    return out


class TestGroupLaw:
    def test_identity(self):
        q = HPoint((0.3, -1.2, 0.7))
        assert group_mul(HPoint.origin(1), q) == q
        assert group_mul(q, HPoint.origin(1)) == q

    def test_twist_example(self):
        p = HPoint((1.0, 0.0, 0.0))
        q = HPoint((0.0, 1.0, 0.0))
        assert group_mul(p, q).coords == (1.0, 1.0, -1.0)

    def test_non_commutative(self):
        p = HPoint((1.0, 0.0, 0.0))
        q = HPoint((0.0, 1.0, 0.0))
        assert group_mul(p, q).z == -1.0
        assert group_mul(q, p).z == 1.0

    def test_inverse_is_negation(self):
        p = HPoint((1.0, 2.0, 3.0))
        assert group_inv(p).coords == (-1.0, -2.0, -3.0)
        assert group_inv(group_inv(p)) == p

    def test_inverse_axiom_both_orders(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 3):
            for _ in range(50):
                p = random_point(rng, n)
                for prod in (group_mul(p, group_inv(p)), group_mul(group_inv(p), p)):
                    assert max(abs(c) for c in prod.coords) < 1e-12

    def test_associativity(self):
        rng = np.random.default_rng(1)
        for n in (1, 2, 3):
            for _ in range(1000):
                p, q, w = (random_point(rng, n) for _ in range(3))
                lhs = group_mul(group_mul(p, q), w)
                rhs = group_mul(p, group_mul(q, w))
                assert max(abs(a - b) for a, b in zip(lhs.coords, rhs.coords)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            group_mul(HPoint.origin(1), HPoint.origin(2))


class TestContactStructure:
    def test_theta_on_reeb(self):
        p = HPoint((0.4, -0.9, 2.0))
        assert theta_eval(p, (0.0, 0.0, 1.0)) == 1.0

    def test_theta_example(self):
        assert theta_eval(HPoint((1.0, 0.0, 0.0)), (0.0, 1.0, 0.0)) == 1.0

    def test_frame_vectors_span_kernel(self):
        rng = np.random.default_rng(2)
        for n in (1, 2):
            for _ in range(20):
                base = random_point(rng, n)
                v = ContactVector(base, tuple(rng.uniform(-1, 1, 2 * n)))
                assert abs(theta_eval(base, frame_to_coords(v))) < 1e-12

    def test_frame_to_coords_example(self):
        v = ContactVector(HPoint((0.0, 1.0, 0.0)), (1.0, 0.0))
        assert frame_to_coords(v) == (1.0, 0.0, 1.0)

    def test_frame_to_coords_origin(self):
        v = ContactVector(HPoint.origin(2), (1.0, 2.0, 3.0, 4.0))
        assert frame_to_coords(v)[-1] == 0.0

    def test_coords_to_frame_round_trip(self):
        rng = np.random.default_rng(3)
        base = random_point(rng, 2)
        v = ContactVector(base, tuple(rng.uniform(-1, 1, 4)))
        amb = coords_to_frame(base, frame_to_coords(v))
        assert amb.xi == v.xi
        assert abs(amb.t) < 1e-12

    def test_theta_left_invariance(self):
        # theta(L_p q, dL_p w) = theta(q, w) with the pushforward done by
        # the independent coordinate Jacobian
        rng = np.random.default_rng(4)
        for n in (1, 2):
            for _ in range(100):
                p, q = random_point(rng, n), random_point(rng, n)
                w = rng.uniform(-1, 1, 2 * n + 1)
                lhs = theta_eval(group_mul(p, q), coord_pushforward(p, w))
                assert abs(lhs - theta_eval(q, w)) < 1e-12


class TestPushforward:
    def test_coefficients_preserved(self):
        v = ContactVector(HPoint.origin(1), (1.0, 0.0))
        moved = pushforward(HPoint((3.0, 4.0, 5.0)), v)
        assert moved.xi == (1.0, 0.0)
        assert moved.base.coords[:2] == (3.0, 4.0)

    def test_functorial(self):
        rng = np.random.default_rng(5)
        p = random_point(rng, 2)
        v = ContactVector(random_point(rng, 2), tuple(rng.uniform(-1, 1, 4)))
        back = pushforward(group_inv(p), pushforward(p, v))
        assert back.xi == v.xi
        assert max(abs(a - b) for a, b in zip(back.base.coords, v.base.coords)) < 1e-12

    def test_composition_is_single_translation(self):
        rng = np.random.default_rng(6)
        p, q = random_point(rng, 1), random_point(rng, 1)
        v = ContactVector(p, (0.6, -0.8))
        chained = pushforward(q, pushforward(group_inv(p), v))
        direct = pushforward(group_mul(q, group_inv(p)), v)
        assert chained.xi == direct.xi
        assert max(abs(a - b) for a, b in
                   zip(chained.base.coords, direct.base.coords)) < 1e-12

    def test_agrees_with_coordinate_jacobian(self):
        # frame transport must match pushing the coordinate form through
        # the translation Jacobian and re-decomposing at the new base
        rng = np.random.default_rng(7)
        for n in (1, 2, 3):
            for _ in range(50):
                g = random_point(rng, n)
                base = random_point(rng, n)
                v = ContactVector(base, tuple(rng.uniform(-1, 1, 2 * n)))
                moved_coords = coord_pushforward(g, frame_to_coords(v))
                amb = coords_to_frame(group_mul(g, base), moved_coords)
                assert max(abs(a - b) for a, b in zip(amb.xi, v.xi)) < 1e-14
                assert abs(amb.t) < 1e-13

    def test_ambient_transport_keeps_reeb_part(self):
        v = AmbientVector(HPoint.origin(1), (0.3, 0.4), 0.9)
        moved = pushforward_ambient(HPoint((1.0, -2.0, 0.5)), v)
        assert moved.t == 0.9
        assert moved.xi == (0.3, 0.4)


class TestLeviMetric:
    def test_orthonormal_frame(self):
        base = HPoint((0.5, 0.5, 0.5))
        ex = ContactVector(base, (1.0, 0.0))
        ey = ContactVector(base, (0.0, 1.0))
        assert levi_inner(ex, ey) == 0.0
        assert levi_inner(ex, ex) == 1.0

    def test_norm_squared(self):
        v = ContactVector(HPoint.origin(1), (3.0, 4.0))
        assert levi_inner(v, v) == 25.0
        assert v.levi_norm() == 5.0

    def test_invariance_under_pushforward(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            g = random_point(rng, 2)
            base = random_point(rng, 2)
            u = ContactVector(base, tuple(rng.uniform(-1, 1, 4)))
            v = ContactVector(base, tuple(rng.uniform(-1, 1, 4)))
            assert levi_inner(pushforward(g, u), pushforward(g, v)) == levi_inner(u, v)

    def test_base_mismatch_rejected(self):
        u = ContactVector(HPoint.origin(1), (1.0, 0.0))
        v = ContactVector(HPoint((1.0, 0.0, 0.0)), (1.0, 0.0))
        with pytest.raises(ValueError, match="same base point"):
            levi_inner(u, v)


class TestAlmostComplexStructure:
    def test_rotates_frame_pairs(self):
        v = ContactVector(HPoint.origin(1), (1.0, 0.0))
        assert apply_J(v).xi == (0.0, 1.0)

    def test_square_is_minus_identity(self):
        v = ContactVector(HPoint.origin(2), (1.0, 2.0, 3.0, 4.0))
        assert apply_J(apply_J(v)).xi == (-1.0, -2.0, -3.0, -4.0)

    def test_jv_orthogonal_to_v(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            v = ContactVector(HPoint.origin(2), tuple(rng.uniform(-1, 1, 4)))
            assert abs(levi_inner(apply_J(v), v)) < 1e-15


class TestConstants:
    def test_h1(self):
        c = constants(1, 1.0)
        assert abs(c.c_n - math.pi / 2) < 1e-15
        assert abs(c.omega - 2.0) < 1e-14
        assert abs(c.s - 2 * math.pi) < 1e-14
        assert abs(c.pansu_area - math.pi ** 2) < 1e-12
        assert abs(c.projection_constant - 2 * math.pi) < 1e-13

    def test_h2(self):
        c = constants(2, 1.0)
        assert abs(c.c_n - 3 * math.pi / 8) < 1e-14
        assert abs(c.s - 2 * math.pi ** 2) < 1e-13
        assert abs(c.pansu_area - 3 * math.pi ** 3 / 4) < 1e-12
        # omega_3 is the unit-ball volume 4 pi / 3, making 2 C_2 omega_3 = pi^2
        assert abs(c.omega - 4 * math.pi / 3) < 1e-14
        assert abs(c.projection_constant - math.pi ** 2) < 1e-12

    def test_lambda_scaling(self):
        for n in (1, 2):
            base = constants(n, 1.0)
            for lam in (0.5, 2.0):
                scaled = constants(n, lam)
                assert abs(scaled.c_n * lam ** (2 * n + 1) - base.c_n) < 1e-12 * base.c_n

    def test_gamma_accuracy_half_integers(self):
        # the Gamma evaluations behind the constants, against exact values
        exact = {0.5: math.sqrt(math.pi), 1.0: 1.0, 1.5: math.sqrt(math.pi) / 2,
                 2.0: 1.0, 2.5: 3 * math.sqrt(math.pi) / 4, 3.0: 2.0,
                 5.5: 945 * math.sqrt(math.pi) / 32,
                 20.0: 121645100408832000.0}
        for x, want in exact.items():
            assert abs(math.gamma(x) - want) <= 1e-12 * want

    def test_ball_and_sphere_values(self):
        assert abs(unit_ball_volume(1) - 2.0) < 1e-15
        assert abs(unit_ball_volume(2) - math.pi) < 1e-15
        assert abs(unit_ball_volume(3) - 4 * math.pi / 3) < 1e-14
        assert abs(sphere_surface_area(1) - 2 * math.pi) < 1e-15
        assert abs(sphere_surface_area(2) - 4 * math.pi) < 1e-14
        assert abs(sphere_surface_area(3) - 2 * math.pi ** 2) < 1e-13

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            constants(0, 1.0)
        with pytest.raises(ValueError):
            constants(1, 0.0)
        with pytest.raises(ValueError):
            constants(1, -2.0)


class TestDirectionToPansuPoint:
    def test_axis_direction(self):
        p, normal = direction_to_pansu_point((1.0, 0.0), 1.0)
        assert p.coords == (1.0, 0.0, 0.0)
        assert normal.xi == (1.0, 0.0)

    def test_scaled(self):
        p, normal = direction_to_pansu_point((0.0, 1.0), 2.0)
        assert p.coords == (0.0, 0.5, 0.0)
        assert normal.xi == (0.0, 1.0)

    def test_matches_pansu_normal_formula(self):
        # at the equator r = 1/lam the normal coefficients reduce to
        # lam x_j on the e_x slots and lam y_j on the e_y slots
        rng = np.random.default_rng(10)
        for n in (1, 2):
            d = rng.standard_normal(2 * n)
            d /= np.linalg.norm(d)
            lam = 1.7
            p, normal = direction_to_pansu_point(tuple(d), lam)
            for j in range(n):
                assert abs(normal.xi[2 * j] - lam * p.x(j + 1)) < 1e-12
                assert abs(normal.xi[2 * j + 1] - lam * p.y(j + 1)) < 1e-12

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError, match="unit"):
            direction_to_pansu_point((1.0, 1.0), 1.0)
