import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from dovesagnac.errors import InvalidArgumentError, NoTotalInternalReflectionError
from dovesagnac.fresnel import (
    DoveParams,
    PrismGeometry,
    critical_angle,
    dove_params_from_physics,
    face_transmittances,
    fresnel_coefficients,
    fresnel_power,
    max_tir_phase,
    min_index_for_phase,
    ray_angles,
    tir_phase_complex,
    tir_relative_phase,
)

PI = math.pi


class TestRayAngles:
    def test_bk7_45deg(self):
        r = ray_angles(PrismGeometry(PI / 4, 1.52))
        assert math.degrees(r.theta1) == pytest.approx(45.0)
        assert math.degrees(r.theta2) == pytest.approx(27.72, abs=0.01)
        assert math.degrees(r.theta3) == pytest.approx(72.72, abs=0.01)

    def test_index_two(self):
        r = ray_angles(PrismGeometry(PI / 4, 2.0))
        assert r.theta2 == pytest.approx(math.asin(math.sqrt(2) / 4), abs=1e-15)
        assert math.degrees(r.theta2) == pytest.approx(20.70, abs=0.01)
        assert math.degrees(r.theta3) == pytest.approx(65.70, abs=0.01)

    def test_parallel_entry_always_totally_reflects(self):
        # near n = 1 the base incidence goes to grazing, which stays above critical
        for n in (1.0001, 1.05, 1.2, 3.0):
            for base in np.linspace(0.05, PI / 2 - 0.05, 30):
                r = ray_angles(PrismGeometry(base, n))
                assert math.sin(r.theta3) > 1 / n

    def test_tilted_ray_escapes(self):
        with pytest.raises(NoTotalInternalReflectionError):
            ray_angles(PrismGeometry(PI / 4, 1.5), theta1=-PI / 4)

    def test_theta1_domain(self):
        with pytest.raises(InvalidArgumentError):
            ray_angles(PrismGeometry(PI / 4, 1.5), theta1=PI / 2)


class TestTirPhase:
    def test_bk7_axial(self):
        assert tir_relative_phase(1.52, math.radians(72.72)) / PI == pytest.approx(0.141, abs=5e-4)

    def test_zero_at_critical(self):
        assert tir_relative_phase(1.52, critical_angle(1.52)) == pytest.approx(0.0, abs=1e-6)

    def test_zero_at_grazing(self):
        assert tir_relative_phase(1.52, PI / 2) == pytest.approx(0.0, abs=1e-15)

    def test_below_critical_raises(self):
        with pytest.raises(NoTotalInternalReflectionError):
            tir_relative_phase(1.52, math.radians(30))

    def test_positive_single_interior_max(self):
        crit = critical_angle(1.7)
        th = np.linspace(crit, PI / 2, 2001)[1:-1]
        phase = np.array([tir_relative_phase(1.7, t) for t in th])
        assert np.all(phase > 0)
        d = np.sign(np.diff(phase))
        assert np.count_nonzero(np.diff(d)) == 1

    @given(st.floats(1.3, 2.5), st.floats(1e-6, 1.0))
    def test_matches_independent_complex_route(self, n, u):
        theta = critical_angle(n) + u * (PI / 2 - critical_angle(n))
        assert tir_relative_phase(n, theta) == pytest.approx(oracles.tir_phase(n, theta), abs=1e-9)
        assert tir_phase_complex(n, theta) == pytest.approx(oracles.tir_phase(n, theta), abs=1e-9)


class TestMaxPhase:
    def test_bk7(self):
        assert max_tir_phase(1.52) / PI == pytest.approx(0.259, abs=1e-3)

    def test_no_contrast(self):
        assert max_tir_phase(1 + 1e-9) == pytest.approx(0.0, abs=1e-8)

    def test_quadrature_at_2414(self):
        assert max_tir_phase(2.414) == pytest.approx(PI / 2, abs=1e-3)
        assert max_tir_phase(1 + math.sqrt(2)) == pytest.approx(PI / 2, abs=1e-15)

    @pytest.mark.parametrize("n", [1.3, 1.52, 1.8, 2.2, 2.5])
    def test_equals_scan_maximum(self, n):
        assert max_tir_phase(n) == pytest.approx(oracles.max_phase_scan(n), abs=1e-9)


class TestMinIndex:
    def test_quadrature(self):
        assert min_index_for_phase(PI / 2) == pytest.approx(2.4142, abs=5e-3)

    def test_bk7_phase(self):
        assert min_index_for_phase(0.259 * PI) == pytest.approx(1.52, abs=0.01)

    def test_vanishing_target(self):
        assert min_index_for_phase(1e-9) == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("n", [1.4, 1.52, 1.8, 2.2])
    def test_inverse_of_max(self, n):
        assert min_index_for_phase(max_tir_phase(n)) == pytest.approx(n, abs=1e-6)

    def test_upper_bracket_grows(self):
        n = min_index_for_phase(0.9 * PI)
        assert max_tir_phase(n) == pytest.approx(0.9 * PI, abs=1e-8)

    @pytest.mark.parametrize("bad", [0.0, PI, -1.0, float("nan")])
    def test_domain(self, bad):
        with pytest.raises(InvalidArgumentError):
            min_index_for_phase(bad)


class TestFaces:
    def test_bk7(self):
        t_par, t_perp = face_transmittances(PrismGeometry(PI / 4, 1.52))
        assert t_par == pytest.approx(0.981, abs=5e-4)
        assert t_perp == pytest.approx(0.816, abs=5e-4)

    def test_index_near_one(self):
        t_par, t_perp = face_transmittances(PrismGeometry(PI / 4, 1 + 1e-9))
        assert t_par == pytest.approx(1.0, abs=1e-9)
        assert t_perp == pytest.approx(1.0, abs=1e-9)

    def test_normal_incidence_geometry_rejected(self):
        with pytest.raises(InvalidArgumentError):
            PrismGeometry(base_angle=PI / 2, refractive_index=1.52)

    def test_energy_conservation(self):
        for n in np.linspace(1.3, 2.5, 13):
            for th in np.linspace(0, PI / 2 - 1e-3, 40):
                Rs, Rp, Ts, Tp = fresnel_power(1.0, n, th)
                assert Rs + Ts == pytest.approx(1.0, abs=1e-12)
                assert Rp + Tp == pytest.approx(1.0, abs=1e-12)
            for th in np.linspace(0, critical_angle(n) - 1e-6, 40):
                Rs, Rp, Ts, Tp = fresnel_power(n, 1.0, th)
                assert Rs + Ts == pytest.approx(1.0, abs=1e-12)
                assert Rp + Tp == pytest.approx(1.0, abs=1e-12)

    def test_unit_reflectance_under_tir(self):
        for n in np.linspace(1.3, 2.5, 13):
            for th in np.linspace(critical_angle(n) + 1e-6, PI / 2, 40):
                r_s, r_p, _, _ = fresnel_coefficients(n, 1.0, th)
                assert abs(r_s) == pytest.approx(1.0, abs=1e-12)
                assert abs(r_p) == pytest.approx(1.0, abs=1e-12)


class TestDoveFromPhysics:
    def test_bk7(self):
        d = dove_params_from_physics(PrismGeometry(PI / 4, 1.52))
        assert d.t_par == pytest.approx(0.981, abs=5e-4)
        assert d.t_perp == pytest.approx(0.816, abs=5e-4)
        assert d.delta_phi / PI == pytest.approx(0.141, abs=5e-4)

    def test_index_two(self):
        d = dove_params_from_physics(PrismGeometry(PI / 4, 2.0))
        theta3 = PI / 4 + math.asin(math.sqrt(2) / 4)
        assert d.delta_phi == pytest.approx(tir_relative_phase(2.0, theta3), abs=1e-15)

    def test_threshold_limit(self):
        d = dove_params_from_physics(PrismGeometry(PI / 4, 1 + 1e-7))
        assert d.delta_phi == pytest.approx(0.0, abs=1e-3)


class TestDoveParams:
    @pytest.mark.parametrize(
        "args", [(0.0, 0.5, 0.1), (1.1, 0.5, 0.1), (0.5, 0.5, -0.1), (0.5, 0.5, PI), (float("nan"), 0.5, 0.1)]
    )
    def test_invalid(self, args):
        with pytest.raises(InvalidArgumentError):
            DoveParams(*args)
