import math

import numpy as np
import pytest

from qugauge.dynamics import DegenerateSpectrumError, MixingConfig, SpectrumConfig, doublet_at, omega_elements
from qugauge.geometry import (
    aa_invariant,
    aa_invariant_quadrature,
    berry_phase,
    berry_phases,
    bloch_vector,
    energy_variance,
    energy_variance_from_state,
    fs_distance,
    fs_length_numerical,
    fs_rate_from_overlap,
    infidelity,
    overlap_convergence,
    overlap_expansion_check,
    sphere_correspondence,
)
from qugauge.gauge import ts_integral
from qugauge.linalg2 import DomainError

PI6 = math.pi / 6
TWO_PI = 2 * math.pi
S_PI6 = TWO_PI * math.sqrt(3) / 2


class TestBerryPhase:
    def test_unmixed(self, spec12):
        r = berry_phases(spec12, MixingConfig(0.0))
        assert (r.beta_phi, r.beta_psi) == (0.0, TWO_PI)

    def test_quarter_pi(self, spec12):
        m = MixingConfig(math.pi / 4)
        assert berry_phase(spec12, m) == pytest.approx(math.pi, abs=1e-15)
        assert abs(berry_phase(spec12, m, route="quadrature") - math.pi) <= 1e-8

    @pytest.mark.parametrize("w", [(1, 2), (3, 7)])
    def test_pi6_independent_of_frequencies(self, w):
        s = SpectrumConfig(*w)
        for route, tol in (("closed", 1e-15), ("quadrature", 1e-8), ("numerical", 1e-6)):
            assert abs(berry_phase(s, MixingConfig(PI6), "phi", route) - math.pi / 2) <= tol
            assert abs(berry_phase(s, MixingConfig(PI6), "psi", route) - 1.5 * math.pi) <= tol

    def test_report_fields(self, spec12, mix_pi6):
        r = berry_phases(spec12, mix_pi6)
        assert r.varphi == pytest.approx(-TWO_PI)
        assert r.period == pytest.approx(TWO_PI)

    def test_sum_is_two_pi(self, rng):
        s = SpectrumConfig(0.3, 1.9)
        for theta in rng.uniform(0, math.pi, 500):
            r = berry_phases(s, MixingConfig(theta))
            assert abs(r.beta_phi + r.beta_psi - TWO_PI) <= 1e-10
        for theta in rng.uniform(0, math.pi, 20):
            r = berry_phases(s, MixingConfig(theta), route="quadrature")
            assert abs(r.beta_phi + r.beta_psi - TWO_PI) <= 1e-10

    def test_invariant_under_shift_and_scale(self, rng):
        for _ in range(10):
            m = MixingConfig(rng.uniform(0, math.pi))
            w1, gap = rng.uniform(-2, 2), rng.uniform(0.3, 2)
            ref = berry_phase(SpectrumConfig(w1, w1 + gap), m, route="quadrature")
            c, k = rng.uniform(-3, 3), rng.uniform(0.2, 4)
            shifted = berry_phase(SpectrumConfig(w1 + c, w1 + gap + c), m, route="quadrature")
            scaled = berry_phase(SpectrumConfig(k * w1, k * (w1 + gap)), m, route="quadrature")
            assert abs(shifted - ref) <= 1e-8
            assert abs(scaled - ref) <= 1e-8

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateSpectrumError):
            berry_phase(SpectrumConfig(1.0, 1.0), MixingConfig(0.3))

    def test_bad_route_or_state(self, spec12, mix_pi6):
        with pytest.raises(DomainError):
            berry_phase(spec12, mix_pi6, route="magic")
        with pytest.raises(DomainError):
            berry_phase(spec12, mix_pi6, which="chi")


class TestVariance:
    @pytest.mark.parametrize(
        "theta, w, expected", [(0.0, (1, 2), 0.0), (PI6, (1, 2), 0.1875), (math.pi / 4, (1, 3), 1.0)]
    )
    def test_examples(self, theta, w, expected):
        assert energy_variance(SpectrumConfig(*w), MixingConfig(theta)).dw2 == pytest.approx(expected, abs=1e-14)

    def test_equals_w_ps_squared_for_both_states(self, rng):
        for _ in range(200):
            s = SpectrumConfig(*rng.uniform(-5, 5, 2))
            m = MixingConfig(rng.uniform(0, math.pi))
            dw2 = energy_variance(s, m).dw2
            assert dw2 >= -1e-12
            assert abs(dw2 - omega_elements(s, m).w_ps ** 2) <= 1e-11
            t = rng.uniform(-5, 5)
            for which in ("phi", "psi"):
                assert abs(energy_variance_from_state(s, m, t, which) - dw2) <= 1e-11


class TestAAInvariant:
    def test_zero_span(self, spec12, mix_pi6):
        assert aa_invariant(spec12, mix_pi6, 2.0, 2.0) == 0.0

    def test_pi6_one_period(self, spec12, mix_pi6):
        assert aa_invariant(spec12, mix_pi6, 0, TWO_PI) == pytest.approx(S_PI6, abs=1e-12)
        assert abs(aa_invariant_quadrature(spec12, mix_pi6, 0, TWO_PI) - S_PI6) <= 1e-9

    def test_quarter_pi(self, spec12):
        assert aa_invariant(spec12, MixingConfig(math.pi / 4), 0, TWO_PI) == pytest.approx(TWO_PI, abs=1e-12)


class TestOverlap:
    def test_unmixed(self, spec12):
        c = overlap_expansion_check(spec12, MixingConfig(0.0), 0.3, 1e-3)
        assert c.same_state_defect <= 1e-24 and c.cross_term == 0.0
        assert c.within_tolerance

    @pytest.mark.parametrize("theta, w, expected", [(PI6, (1, 2), 1.875e-7), (math.pi / 4, (1, 3), 1e-6)])
    def test_examples(self, theta, w, expected):
        c = overlap_expansion_check(SpectrumConfig(*w), MixingConfig(theta), 0.0, 1e-3)
        assert c.same_state_defect == pytest.approx(expected, rel=1e-2)
        assert c.within_tolerance

    def test_ratio_and_order(self, spec12, mix_pi6):
        conv = overlap_convergence(spec12, mix_pi6, 0.4)
        for c in conv.checks:
            assert abs(c.defect_ratio - 1) <= 10 * c.dt
            assert abs(c.cross_ratio - 1) <= 10 * c.dt
        assert conv.min_order >= 2

    def test_nonpositive_dt(self, spec12, mix_pi6):
        with pytest.raises(DomainError):
            overlap_expansion_check(spec12, mix_pi6, 0.0, 0.0)

    def test_infidelity_is_stable(self):
        a = np.array([1.0, 0.0], dtype=complex)
        b = np.array([math.cos(1e-9), math.sin(1e-9)], dtype=complex)
        assert infidelity(a, b) == pytest.approx(1e-18, rel=1e-6)


class TestFubiniStudy:
    def test_unmixed(self, spec12):
        assert fs_distance(spec12, MixingConfig(0.0), 0, 1).ds_dt == 0.0

    def test_pi6(self, spec12, mix_pi6):
        p = fs_distance(spec12, mix_pi6, 0, TWO_PI)
        assert p.ds_dt == pytest.approx(0.8660254, abs=1e-7)
        assert p.s_accum == pytest.approx(S_PI6, abs=1e-12)

    def test_rate_from_overlap(self, spec12, mix_pi6):
        assert abs(fs_rate_from_overlap(spec12, mix_pi6, 0.7) - math.sqrt(3) / 2) <= 1e-6

    def test_polygon_length(self, spec12, mix_pi6):
        assert abs(fs_length_numerical(spec12, mix_pi6, 0, TWO_PI, steps=20_000) - S_PI6) <= 1e-6

    def test_triple_equality(self, rng):
        for _ in range(50):
            w1 = rng.uniform(-3, 3)
            s = SpectrumConfig(w1, w1 + rng.uniform(0.2, 3))
            m = MixingConfig(rng.uniform(0, math.pi / 2))
            T = TWO_PI / s.gap
            fs = fs_distance(s, m, 0, T).s_accum
            assert abs(fs - aa_invariant(s, m, 0, T)) <= 1e-9
            assert abs(fs - ts_integral(s, m, 0, T)) <= 1e-9


class TestSphere:
    def test_bloch_vector_unit(self, rng):
        v = rng.normal(size=(50, 2)) + 1j * rng.normal(size=(50, 2))
        v /= np.linalg.norm(v, axis=1)[:, None]
        np.testing.assert_allclose(np.linalg.norm(bloch_vector(v), axis=1), 1.0, atol=1e-14)

    def test_unmixed(self, spec12):
        assert sphere_correspondence(spec12, MixingConfig(0.0), 0, 1) == 0.0

    def test_pi6_one_period(self, spec12, mix_pi6):
        assert abs(sphere_correspondence(spec12, mix_pi6, 0, TWO_PI) - S_PI6) <= 1e-8

    def test_quarter_pi_unit_span(self):
        s = SpectrumConfig(1.0, 3.0)
        assert abs(sphere_correspondence(s, MixingConfig(math.pi / 4), 0, 1) - 2.0) <= 1e-8

    def test_state_at_period_is_phase_of_initial(self, spec12, mix_pi6):
        z0, zT = doublet_at(spec12, mix_pi6, 0.0), doublet_at(spec12, mix_pi6, TWO_PI)
        assert abs(abs(np.vdot(z0[0], zT[0])) - 1) <= 1e-12
