import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SIX
from dovesagnac.algebra import CompositeState, Path
from dovesagnac.elements import POLARIZATIONS
from dovesagnac.errors import InvalidArgumentError
from dovesagnac.fresnel import LOSSLESS_DOVE, MEASURED_DOVE, DoveParams
from dovesagnac.interferometers import (
    InterferometerConfig,
    Kind,
    closed_form_pbssi,
    expected_port,
    pbssi_overlap,
    run_bssi,
    run_modified_bssi,
)
from dovesagnac.metrics import (
    bssi_fidelity,
    classical_fidelity,
    ideal_port_distribution,
    pbssi_fidelity,
    polarization_overlap,
    sorting_fidelity,
)

PI = math.pi
angles = st.floats(-4.0, 4.0, allow_nan=False)
vectors = st.tuples(*[st.floats(-1, 1)] * 4).filter(lambda t: sum(x * x for x in t) > 1e-3)


def cvec(t):
    return np.array([t[0] + 1j * t[1], t[2] + 1j * t[3]])


class TestBssiFidelity:
    def test_ideal_modified(self):
        cfg = InterferometerConfig(Kind.MODIFIED_BSSI, PI / 4, MEASURED_DOVE)
        out = run_modified_bssi(cfg, CompositeState.from_polarization(POLARIZATIONS["L"], 3))
        rep = bssi_fidelity(out, expected_port(PI / 4, 3))
        assert rep.fidelity == pytest.approx(1.0, abs=1e-12)
        assert rep.constructive_port is Path.C
        assert rep.destructive_polarization is None

    def test_design_angle(self):
        out = run_bssi(InterferometerConfig(Kind.BSSI, PI / 4, MEASURED_DOVE), CompositeState.from_polarization(POLARIZATIONS["H"]))
        rep = bssi_fidelity(out, Path.D)
        assert rep.fidelity == pytest.approx(0.939, abs=1e-3)
        assert abs(rep.destructive_polarization[1]) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", np.linspace(0, PI, 7))
    def test_lossless(self, alpha):
        out = run_bssi(InterferometerConfig(Kind.BSSI, alpha, LOSSLESS_DOVE), CompositeState.from_polarization(POLARIZATIONS["H"]))
        assert bssi_fidelity(out, Path.D).fidelity == pytest.approx(1.0, abs=1e-12)

    def test_port_resolved_from_design_not_argmax(self):
        # a strongly polarizing prism at quadrature-plus phase: intended port holds < 1/2
        d = DoveParams(1.0, 1.0, 0.9 * PI)
        out = run_bssi(InterferometerConfig(Kind.BSSI, PI / 4, d), CompositeState.from_polarization(POLARIZATIONS["H"]))
        rep = bssi_fidelity(out, Path.D)
        assert rep.fidelity < 0.5
        assert rep.constructive_port is Path.D

    def test_rejects_loop_port(self):
        out = run_bssi(InterferometerConfig(Kind.BSSI, 0.1, MEASURED_DOVE), CompositeState.from_polarization(POLARIZATIONS["H"]))
        with pytest.raises(InvalidArgumentError):
            bssi_fidelity(out, Path.A)

    def test_range_scan(self):
        for tp in (0.9, 0.95, 1.0):
            for ts in (0.9, 0.95, 1.0):
                for dphi in np.linspace(0.01, PI / 2, 12):
                    d = DoveParams(tp, ts, dphi)
                    for alpha in np.linspace(0, PI, 25):
                        for name in SIX:
                            out = run_bssi(InterferometerConfig(Kind.BSSI, alpha, d), CompositeState.from_polarization(POLARIZATIONS[name]))
                            f = bssi_fidelity(out, Path.D).fidelity
                            assert 0.5 - 1e-12 <= f <= 1 + 1e-12


class TestPbssiFidelity:
    def test_unrotated(self):
        assert pbssi_fidelity(MEASURED_DOVE, 0.0) == pytest.approx(0.99957, abs=1e-5)

    def test_design_angle_exact(self):
        assert pbssi_fidelity(MEASURED_DOVE, PI / 4) == 1.0

    @given(st.floats(0.1, 1), st.floats(0, 3.1), angles)
    def test_equal_transmissions(self, t, dphi, a):
        assert pbssi_fidelity(DoveParams(t, t, dphi), a) == 1.0

    @given(angles)
    def test_complements_overlap(self, a):
        assert pbssi_fidelity(MEASURED_DOVE, a) + pbssi_overlap(MEASURED_DOVE, a) == pytest.approx(1.0, abs=1e-16)


class TestOverlap:
    def test_same(self):
        assert polarization_overlap(POLARIZATIONS["H"], POLARIZATIONS["H"]) == 1.0

    def test_orthogonal(self):
        assert polarization_overlap(POLARIZATIONS["H"], POLARIZATIONS["V"]) == 0.0

    def test_zero_vector(self):
        with pytest.raises(InvalidArgumentError):
            polarization_overlap(np.zeros(2), POLARIZATIONS["H"])

    @given(vectors, vectors, st.floats(-PI, PI))
    def test_symmetric_and_phase_blind(self, a, b, phase):
        a, b = cvec(a), cvec(b)
        ab = polarization_overlap(a, b)
        assert ab == pytest.approx(polarization_overlap(b, a), abs=1e-12)
        assert ab == pytest.approx(polarization_overlap(cmath.exp(1j * phase) * a, b), abs=1e-12)

    @staticmethod
    def _inner_product_route(dove, alpha):
        # port-c polarizations of two orders whose sorting signs are opposite
        c1 = closed_form_pbssi(dove, alpha, 0.0, 0).state.polarization(Path.C, 0)
        l2 = 1 if math.isclose(alpha, PI / 4) else None
        if l2 is None:
            # opposite sign via the input phase instead of the OAM order
            c2 = closed_form_pbssi(dove, alpha, PI, 0).state.polarization(Path.C, 0)
        else:
            c2 = closed_form_pbssi(dove, alpha, 0.0, l2).state.polarization(Path.C, l2)
        return polarization_overlap(c1, c2)

    def test_two_routes_measured_params(self):
        for alpha in np.linspace(0, PI / 2, 17):
            assert self._inner_product_route(MEASURED_DOVE, alpha) == pytest.approx(pbssi_overlap(MEASURED_DOVE, alpha), abs=1e-12)

    def test_two_routes_parameter_grid(self):
        for tp in np.linspace(0.9, 1.0, 5):
            for ts in np.linspace(0.9, 1.0, 5):
                for dphi in np.linspace(0, PI / 2, 5):
                    d = DoveParams(tp, ts, dphi)
                    for alpha in np.linspace(0, PI / 2, 9):
                        assert self._inner_product_route(d, alpha) == pytest.approx(pbssi_overlap(d, alpha), abs=1e-12)


class TestSortingFidelity:
    @given(angles, st.integers(-10, 10), st.floats(0, 1))
    def test_ideal_distribution_normalized(self, a, l, T):
        pc, pd = ideal_port_distribution(a, l, T)
        assert pc + pd == pytest.approx(1.0, abs=1e-12)

    def test_reduces_to_port_probability(self):
        for l in range(-6, 7):
            out = run_bssi(InterferometerConfig(Kind.BSSI, PI / 4, MEASURED_DOVE), CompositeState.from_polarization(POLARIZATIONS["+"], l))
            port = expected_port(PI / 4, l)
            assert sorting_fidelity(out, PI / 4, l) == pytest.approx(out.probability(port), abs=1e-12)

    @given(angles, st.integers(-10, 10), st.sampled_from(SIX))
    def test_lossless_is_one(self, a, l, name):
        out = run_bssi(InterferometerConfig(Kind.BSSI, a, LOSSLESS_DOVE), CompositeState.from_polarization(POLARIZATIONS[name], l))
        assert sorting_fidelity(out, a, l) == pytest.approx(1.0, abs=1e-12)

    def test_classical_fidelity_bounds(self):
        assert classical_fidelity((1, 0), (0, 1)) == 0.0
        assert classical_fidelity((0.3, 0.7), (0.3, 0.7)) == pytest.approx(1.0)
