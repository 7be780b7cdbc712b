import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from xenon_xpm.core import CavitySpec, derive_system
from xenon_xpm.errors import DomainError, NumericalError
from xenon_xpm.perturbation import (Scenario, e4_shift_per_atom, evaluate_perturbative,
                                    gaussian_ratio, make_scenario, n1_population, phi_gaussian,
                                    phi_uniform)

TWO_PI = 2 * math.pi


class TestE4:
    def test_no_control(self):
        assert e4_shift_per_atom(0.0, 1e6, 1e8, 1e7) == 0.0

    def test_arithmetic(self):
        assert e4_shift_per_atom(1e6, 1e6, 1e8, 1e7) == pytest.approx(10.0, rel=1e-15)

    def test_even_in_big_delta(self):
        assert e4_shift_per_atom(3e6, 2e6, -1e8, 1e7) == e4_shift_per_atom(3e6, 2e6, 1e8, 1e7)

    @pytest.mark.parametrize("big, small", [(0.0, 1e7), (1e8, 0.0)])
    def test_resonance(self, big, small):
        with pytest.raises(DomainError):
            e4_shift_per_atom(1e6, 1e6, big, small)

    @given(st.floats(-1e10, 1e10).filter(lambda x: abs(x) > 1),
           st.floats(-1e9, 1e9).filter(lambda x: abs(x) > 1))
    def test_sign_follows_small_delta(self, big, small):
        assert math.copysign(1, e4_shift_per_atom(1e6, 1e6, big, small)) == math.copysign(1, small)


class TestScenario:
    def test_delta3_identity(self, default_system):
        s = make_scenario(default_system, TWO_PI * 3e8, TWO_PI * 1e7)
        m = default_system.medium
        expected = (m.lower.angular_frequency - m.upper.angular_frequency) + s.small_delta - s.big_delta
        assert s.delta3 == pytest.approx(expected, rel=1e-9)
        assert s.n_eff == pytest.approx(s.n_total / 3, rel=1e-15)
        assert s.n_collective == s.n_eff

    def test_total_atoms_option(self, default_system):
        s = make_scenario(default_system, 1e9, 1e8, collective_atoms="total")
        assert s.n_collective == s.n_total
        with pytest.raises(DomainError):
            make_scenario(default_system, 1e9, 1e8, collective_atoms="all")


class TestPhiUniform:
    def test_empty_cavity(self, scenario_at):
        s = replace(scenario_at(1e9), n_eff=0.0)
        assert phi_uniform(s) == 0.0

    def test_matches_product(self, scenario_at):
        s = scenario_at(1e9)
        c = s.couplings
        assert phi_uniform(s) == s.n_eff * e4_shift_per_atom(
            c.g1, c.g2, s.big_delta, s.small_delta) * s.interaction_time

    def test_default_curve_is_inverse_square(self, scenario_at):
        a, b = phi_uniform(scenario_at(1e9)), phi_uniform(scenario_at(3e9))
        assert a / b == pytest.approx(9.0, rel=1e-12)

    def test_doubling_time(self, scenario_at):
        s = scenario_at(1e9)
        assert phi_uniform(replace(s, interaction_time=2 * s.interaction_time)) == pytest.approx(
            2 * phi_uniform(s), rel=1e-15)

    @settings(max_examples=50)
    @given(st.floats(0.1, 10.0), st.sampled_from(["n_eff", "interaction_time", "big_delta",
                                                   "small_delta", "g1", "g2"]))
    def test_scaling_laws(self, default_system, k, which):
        s = make_scenario(default_system, TWO_PI * 1e9, TWO_PI * 1e7)
        exponent = {"n_eff": 1, "interaction_time": 1, "big_delta": -2, "small_delta": -1,
                    "g1": 2, "g2": 2}[which]
        if which in ("g1", "g2"):
            scaled = replace(s, couplings=replace(s.couplings, **{which: k * getattr(s.couplings, which)}))
        else:
            scaled = replace(s, **{which: k * getattr(s, which)})
        assert phi_uniform(scaled) / phi_uniform(s) == pytest.approx(k**exponent, rel=1e-12)


class TestN1:
    def test_empty(self, scenario_at):
        assert n1_population(replace(scenario_at(1e9), n_eff=0.0)) == 0.0

    def test_value(self, default_system):
        s = Scenario(TWO_PI * 1e9, TWO_PI * 1e7, 8e13, replace(default_system.couplings, g1=7.5e6),
                     3.8e4, 1.14e5, 318e-9)
        assert n1_population(s) == pytest.approx(3.8e4 * 7.5e6**2 / (TWO_PI * 1e9) ** 2, rel=1e-14)
        assert n1_population(s) == pytest.approx(5.4e-2, rel=0.02)

    def test_halving_delta(self, scenario_at):
        s = scenario_at(1e9)
        assert n1_population(replace(s, big_delta=s.big_delta / 2)) == pytest.approx(
            4 * n1_population(s), rel=1e-15)

    def test_independent_of_signal(self, scenario_at):
        s = scenario_at(1e9)
        other = replace(s, small_delta=3 * s.small_delta,
                        couplings=replace(s.couplings, g2=5.0, g3=0.0))
        assert n1_population(other) == n1_population(s)

    def test_orientation_variant(self, scenario_at):
        s = scenario_at(1e9)
        assert n1_population(s, orientation_averaged=False) == pytest.approx(
            3 * n1_population(s), rel=1e-12)

    def test_resonance(self, scenario_at):
        with pytest.raises(DomainError):
            n1_population(replace(scenario_at(1e9), big_delta=0.0))


class TestEvaluate:
    def _with_n1(self, s, n1):
        g1 = math.sqrt(n1 / s.n_eff) * abs(s.big_delta)
        return replace(s, couplings=replace(s.couplings, g1=g1))

    def test_valid(self, scenario_at):
        r = evaluate_perturbative(self._with_n1(scenario_at(1e9), 0.05))
        assert r.n1 == pytest.approx(0.05) and r.valid

    def test_invalid(self, scenario_at):
        r = evaluate_perturbative(self._with_n1(scenario_at(1e9), 0.5))
        assert not r.valid

    def test_default_small_detuning_invalid(self, scenario_at):
        r = evaluate_perturbative(scenario_at(50e6))
        assert r.n1 > 1 and not r.valid

    def test_threshold(self, scenario_at):
        s = self._with_n1(scenario_at(1e9), 0.05)
        assert not evaluate_perturbative(s, threshold=0.01).valid


class TestGaussian:
    def test_empty_cavity(self, default_config, scenario_at):
        from xenon_xpm.config import build_system
        system = build_system(default_config.replace(density_cm3=0.0))
        assert phi_gaussian(system, scenario_at(1e9, system=system)) == 0.0

    def test_matches_analytic_ratio(self, default_system, scenario_at):
        s = scenario_at(1e9)
        ratio = phi_gaussian(default_system, s) / phi_uniform(s)
        zr, L = default_system.mode.rayleigh_range, default_system.cavity.mirror_spacing
        oracle = 2 * zr * math.atan(L / (2 * zr)) / L
        assert oracle == pytest.approx(0.983, abs=0.001)
        assert ratio == pytest.approx(oracle, rel=1e-6)
        assert 0.95 <= ratio <= 1.0

    def test_short_cavity_ratio_approaches_one(self, default_system, scenario_at):
        s = scenario_at(1e9)
        cav = default_system.cavity
        mode = default_system.mode
        # shrink the cavity but keep the mode shape
        short = replace(default_system, cavity=CavitySpec(cav.mirror_radius_of_curvature,
                                                          cav.mirror_spacing / 10, cav.finesse),
                        mode=replace(mode, cylinder_volume=mode.cylinder_volume / 10))
        # a tenth of the volume: a tenth of the atoms, sqrt(10) stronger couplings
        k = math.sqrt(10)
        s_short = replace(s, n_eff=s.n_eff / 10, n_total=s.n_total / 10,
                          couplings=replace(s.couplings, g1=k * s.couplings.g1,
                                            g2=k * s.couplings.g2))
        r_long = phi_gaussian(default_system, s) / phi_uniform(s)
        r_short = phi_gaussian(short, s_short) / phi_uniform(s_short)
        assert r_long < r_short < 1.0
        assert r_short == pytest.approx(gaussian_ratio(mode.rayleigh_range, cav.mirror_spacing / 10),
                                        rel=1e-6)

    def test_ratio_band_when_rayleigh_range_long(self):
        # ratio lies in [0.9, 1] whenever zR >= 2L
        for x in (2.0, 3.0, 10.0, 100.0):
            assert 0.9 <= gaussian_ratio(x, 1.0) <= 1.0

    def test_node_doubling_stable(self, default_system, scenario_at):
        s = scenario_at(2e9)
        a = phi_gaussian(default_system, s, nodes=64)
        b = phi_gaussian(default_system, s, nodes=128)
        assert abs(a - b) <= 1e-6 * abs(b)

    def test_sign(self, default_system, scenario_at):
        assert phi_gaussian(default_system, scenario_at(1e9, -1e7)) < 0

    def test_non_convergence_reported(self, default_system, scenario_at):
        with pytest.raises(NumericalError) as info:
            phi_gaussian(default_system, scenario_at(1e9), nodes=1, rtol=1e-300, max_refinements=1)
        assert "history" in info.value.diagnostics

    def test_resonance(self, default_system, scenario_at):
        with pytest.raises(DomainError):
            phi_gaussian(default_system, replace(scenario_at(1e9), small_delta=0.0))


def test_gaussian_with_other_cavity():
    from tests.test_core import xenon
    system = derive_system(xenon(), CavitySpec(0.01, 0.015, 1e4))
    s = make_scenario(system, TWO_PI * 5e9, TWO_PI * 2e7)
    ratio = phi_gaussian(system, s) / phi_uniform(s)
    assert ratio == pytest.approx(gaussian_ratio(system.mode.rayleigh_range, 0.015), rel=1e-6)
