import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dovesagnac.algebra import (
    Basis,
    CompositeState,
    Path,
    Pol,
    apply_path_phase,
    apply_pol_operator,
    is_unitary,
    jones_vector,
    mat_mul,
    normalize,
    rotation_matrix,
    total_probability,
)
from dovesagnac.errors import InvalidArgumentError

angles = st.floats(-10.0, 10.0, allow_nan=False)
amps = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


def two_path_state(h1, v1, h2, v2, l=0):
    return CompositeState(
        Basis.LOOP,
        {(Path.A, Pol.H, l): h1, (Path.A, Pol.V, l): v1, (Path.B, Pol.H, l): h2, (Path.B, Pol.V, l): v2},
    )


class TestRotation:
    def test_zero_is_identity(self):
        np.testing.assert_array_equal(rotation_matrix(0.0), np.eye(2))

    def test_quarter_turn(self):
        np.testing.assert_allclose(rotation_matrix(math.pi / 2), [[0, 1], [-1, 0]], atol=1e-15)

    def test_eighth_turn(self):
        h = math.sqrt(2) / 2
        np.testing.assert_allclose(rotation_matrix(math.pi / 4), [[h, h], [-h, h]], atol=1e-15)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidArgumentError):
            rotation_matrix(float("nan"))

    def test_angle_addition_1000_pairs(self, rng):
        for a, b in rng.uniform(-2 * math.pi, 2 * math.pi, size=(1000, 2)):
            np.testing.assert_allclose(
                rotation_matrix(a) @ rotation_matrix(b), rotation_matrix(a + b), atol=1e-12
            )

    @given(angles)
    def test_unitary(self, a):
        assert is_unitary(rotation_matrix(a))


class TestMatMul:
    def test_identity_left(self, rng):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        np.testing.assert_array_equal(mat_mul(np.eye(2), m), m)

    @given(angles)
    def test_rotation_inverse(self, a):
        np.testing.assert_allclose(mat_mul(rotation_matrix(-a), rotation_matrix(a)), np.eye(2), atol=1e-12)

    @given(angles, angles)
    def test_composition(self, a, b):
        np.testing.assert_allclose(mat_mul(rotation_matrix(a), rotation_matrix(b)), rotation_matrix(a + b), atol=1e-12)


class TestCompositeState:
    def test_from_polarization_defaults_to_port_d(self):
        s = CompositeState.from_polarization(jones_vector(1, 0), l=3)
        assert s.basis is Basis.PORTS
        assert s.amplitude(Path.D, Pol.H, 3) == 1
        assert s.amplitude(Path.D, Pol.V, 3) == 0

    def test_zero_amplitudes_dropped(self):
        s = CompositeState(Basis.PORTS, {(Path.C, Pol.H, 0): 0.0, (Path.D, Pol.V, 1): 0.5})
        assert list(s.amplitudes) == [(Path.D, Pol.V, 1)]

    def test_wrong_basis_path(self):
        with pytest.raises(InvalidArgumentError):
            CompositeState(Basis.PORTS, {(Path.A, Pol.H, 0): 1.0})

    def test_l_max_guard(self):
        with pytest.raises(InvalidArgumentError):
            CompositeState(Basis.PORTS, {(Path.D, Pol.H, 101): 1.0})
        CompositeState(Basis.PORTS, {(Path.D, Pol.H, 100): 1.0})

    def test_non_finite_amplitude(self):
        with pytest.raises(InvalidArgumentError):
            CompositeState(Basis.PORTS, {(Path.D, Pol.H, 0): complex("nan")})

    def test_add_across_bases_rejected(self):
        a = CompositeState(Basis.PORTS, {(Path.D, Pol.H, 0): 1.0})
        b = CompositeState(Basis.LOOP, {(Path.A, Pol.H, 0): 1.0})
        with pytest.raises(InvalidArgumentError):
            a + b

    def test_immutable(self):
        s = CompositeState(Basis.PORTS, {(Path.D, Pol.H, 0): 1.0})
        with pytest.raises(TypeError):
            s.amplitudes[(Path.C, Pol.H, 0)] = 1.0


class TestApplyPolOperator:
    def test_disjoint_filter_is_noop(self, rng):
        s = CompositeState(Basis.LOOP, {(Path.A, Pol.H, 1): 0.3, (Path.A, Pol.V, 1): 0.4j})
        m = rng.normal(size=(2, 2))
        assert apply_pol_operator(s, m, Path.B) == s

    def test_quarter_turn_on_h(self):
        s = CompositeState(Basis.PORTS, {(Path.D, Pol.H, 0): 1.0})
        out = apply_pol_operator(s, rotation_matrix(math.pi / 2))
        assert abs(out.amplitude(Path.D, Pol.H, 0)) < 1e-15
        assert out.amplitude(Path.D, Pol.V, 0) == pytest.approx(-1.0)

    def test_identity_unnormalized_two_path(self):
        s = two_path_state(0.9, 0.2j, -0.7, 0.1)
        assert apply_pol_operator(s, np.eye(2)) == s

    def test_filter_outside_basis(self):
        s = CompositeState(Basis.PORTS, {(Path.D, Pol.H, 0): 1.0})
        with pytest.raises(InvalidArgumentError):
            apply_pol_operator(s, np.eye(2), Path.A)

    @given(amps, amps, amps, amps, angles)
    def test_unitary_preserves_probability(self, h1, v1, h2, v2, a):
        s = two_path_state(h1, v1, h2, v2, l=2)
        out = apply_pol_operator(s, rotation_matrix(a))
        assert total_probability(out) == pytest.approx(total_probability(s), abs=1e-12)

    @given(amps, amps, amps, amps, angles)
    def test_linear(self, h1, v1, h2, v2, a):
        s1 = two_path_state(h1, v1, 0, 0)
        s2 = two_path_state(0, 0, h2, v2)
        m = rotation_matrix(a) @ np.diag([0.9, 0.7j])
        lhs = apply_pol_operator(s1 + s2, m)
        rhs = apply_pol_operator(s1, m) + apply_pol_operator(s2, m)
        for key in set(lhs.amplitudes) | set(rhs.amplitudes):
            assert abs(lhs.amplitude(*key) - rhs.amplitude(*key)) < 1e-12


class TestTotalProbability:
    def test_empty(self):
        assert total_probability(CompositeState(Basis.PORTS)) == 0.0

    def test_single(self):
        assert total_probability(CompositeState(Basis.PORTS, {(Path.C, Pol.V, -2): 1.0})) == 1.0

    def test_pythagorean(self):
        s = CompositeState(Basis.PORTS, {(Path.C, Pol.H, 0): 0.6, (Path.D, Pol.V, 0): 0.8})
        assert total_probability(s) == pytest.approx(1.0, abs=1e-15)

    def test_bit_identical_repeats(self, rng):
        amps_ = rng.normal(size=40) + 1j * rng.normal(size=40)
        s = CompositeState(Basis.PORTS, {(Path.C if i % 2 else Path.D, Pol(i % 4 // 2), i): a for i, a in enumerate(amps_)})
        first = total_probability(s)
        assert all(total_probability(s) == first for _ in range(20))


def test_apply_path_phase_filter():
    s = two_path_state(1, 0, 1, 0, l=3)
    out = apply_path_phase(s, lambda l: 1j ** l, Path.A)
    assert out.amplitude(Path.A, Pol.H, 3) == pytest.approx(-1j)
    assert out.amplitude(Path.B, Pol.H, 3) == 1


def test_normalize_zero_vector():
    with pytest.raises(InvalidArgumentError):
        normalize(np.zeros(2))
