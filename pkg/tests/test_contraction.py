import numpy as np
import pytest

from qmixing.contraction import (
    commuting_sum_bound,
    eta_ad_closed_form,
    eta_b_estimate,
    eta_pure_fixpoint_bounds,
    eta_sep_bounds,
    eta_sep_bruteforce,
    eta_tr_estimate,
    reevaluate_witness,
    tensor_embed_bound,
)
from qmixing.errors import ShapeError
from qmixing.liouville import (
    LindbladModel,
    TensorSumModel,
    build_liouvillian,
    random_gkls_model,
    tensor_sum,
)
from qmixing.models import amplitude_damping_model, depolarizing_model
from qmixing.spectral import spectral_report

LN2 = float(np.log(2.0))


def ad_liouvillian(gamma=1.0):
    return build_liouvillian(amplitude_damping_model(gamma))


class TestClosedForm:
    def test_time_zero(self):
        assert eta_ad_closed_form(1.0, 0.0) == 1.0

    def test_breakpoint_continuity(self):
        gamma = 1.0
        left = np.exp(-gamma * LN2)
        right = np.exp(-gamma * LN2 / 2) / np.sqrt(4 * (1 - np.exp(-gamma * LN2)))
        assert left == pytest.approx(0.5, abs=1e-15)
        assert right == pytest.approx(0.5, abs=1e-15)
        assert eta_ad_closed_form(gamma, LN2) == pytest.approx(0.5, abs=1e-12)

    def test_asymptotic_half_rate_decay(self):
        gamma = 1.0
        for t in (20.0, 30.0):
            ratio = eta_ad_closed_form(gamma, t) / (np.exp(-gamma * t / 2) / 2.0)
            assert ratio == pytest.approx(1.0, abs=1e-6)

    def test_known_value_at_t3(self):
        expected = np.exp(-1.5) / np.sqrt(4 * (1 - np.exp(-3.0)))
        assert eta_ad_closed_form(1.0, 3.0) == pytest.approx(expected, abs=1e-15)


class TestEtaTrEstimate:
    def test_breakpoint_witness_is_excited_state(self):
        L = ad_liouvillian(1.0)
        est = eta_tr_estimate(L, LN2, restarts=32, seed=0)
        assert est.eta_lower == pytest.approx(0.5, abs=1e-6)
        # witness |1>: overlap of the witness density with |1><1| near 1
        assert abs(est.witness[1]) ** 2 == pytest.approx(1.0, abs=1e-4)

    def test_time_zero_contraction_is_one(self):
        est = eta_tr_estimate(ad_liouvillian(), 0.0, restarts=8, seed=0)
        assert est.eta_lower == pytest.approx(1.0, abs=1e-10)

    def test_late_time_witness_superposition(self):
        t = 3.0
        est = eta_tr_estimate(ad_liouvillian(), t, restarts=32, seed=0)
        expected_eta = np.exp(-t / 2) / np.sqrt(4 * (1 - np.exp(-t)))
        assert est.eta_lower == pytest.approx(expected_eta, abs=1e-6)
        # predicted optimum is proportional to |1> + sqrt(1-2e^{-t}) |0>;
        # the objective is phase-insensitive, so compare component moduli
        a0 = np.sqrt(1 - 2 * np.exp(-t))
        pred = np.array([a0, 1.0]) / np.sqrt(1 + a0**2)
        np.testing.assert_allclose(np.abs(est.witness), pred, atol=1e-3)

    def test_estimate_tracks_closed_form_on_grid(self):
        L = ad_liouvillian()
        for t in (0.2, 0.5, LN2, 1.5, 3.0):
            est = eta_tr_estimate(L, t, restarts=32, seed=2)
            assert abs(est.eta_lower - eta_ad_closed_form(1.0, t)) <= 1e-4

    def test_witness_reproduces_lower_bound(self):
        for seed in range(4):
            L = build_liouvillian(random_gkls_model(2, 2, seed))
            est = eta_tr_estimate(L, 0.9, restarts=6, seed=seed)
            assert reevaluate_witness(L, est) == pytest.approx(est.eta_lower, abs=1e-10)
            assert 0.0 <= est.eta_lower <= est.eta_upper + 1e-6


class TestEtaBEstimate:
    def test_zero_generator_gives_zero(self):
        L = build_liouvillian(LindbladModel(dim=2))
        est = eta_b_estimate(L, 1.0, restarts=4, seed=0)
        assert est.eta_lower == pytest.approx(0.0, abs=1e-7)

    def test_chain_consistency_with_trace_estimate(self):
        L = ad_liouvillian()
        for t in (0.5, 1.0, 2.0):
            eb = eta_b_estimate(L, t, restarts=16, seed=1)
            et = eta_tr_estimate(L, t, restarts=16, seed=1)
            # d_B^2 <= d_tr <= sqrt(1-F^2) pointwise transfers to the suprema
            assert eb.eta_lower**2 <= et.eta_lower + 1e-6
            assert et.eta_lower <= np.sqrt(1 - (1 - eb.eta_lower**2) ** 2) + 1e-4

    def test_primitive_decay_window(self):
        L = build_liouvillian(depolarizing_model(2, 1.0))
        gap = spectral_report(L).gap
        ts = np.linspace(5.0 / gap, 10.0 / gap, 4)
        vals = [eta_b_estimate(L, t, restarts=8, seed=0).eta_lower for t in ts]
        slope = np.polyfit(ts, np.log(vals), 1)[0]
        assert -gap * 1.05 <= slope <= -gap * 0.95


class TestPureFixpointBounds:
    def test_single_factor(self):
        x = 0.37
        lo, up = eta_pure_fixpoint_bounds(x, 1)
        assert lo == pytest.approx(x, abs=1e-12)
        assert up == pytest.approx(np.sqrt(x), abs=1e-12)

    def test_supercritical_time_saturates(self):
        # x = n^{-1/2} at n = 1e4: bound is 1 - (1 - 0.01)^{1e4}, essentially 1
        lo, _ = eta_pure_fixpoint_bounds(1e-2, 10**4)
        assert lo >= 1 - 1e-40

    def test_subcritical_time_vanishes(self):
        # x = n^{-2} at n = 1e4
        _, up = eta_pure_fixpoint_bounds(1e-8, 10**4)
        assert up == pytest.approx(0.01, abs=1e-4)
        assert up <= 0.011

    def test_monotone_in_x_and_n(self):
        xs = np.linspace(0.0, 1.0, 21)
        los = [eta_pure_fixpoint_bounds(x, 100)[0] for x in xs]
        ups = [eta_pure_fixpoint_bounds(x, 100)[1] for x in xs]
        assert all(b >= a - 1e-14 for a, b in zip(los, los[1:]))
        assert all(b >= a - 1e-14 for a, b in zip(ups, ups[1:]))
        ns = [10, 10**3, 10**6, 10**9, 10**12]
        los_n = [eta_pure_fixpoint_bounds(1e-4, n)[0] for n in ns]
        assert all(b >= a - 1e-14 for a, b in zip(los_n, los_n[1:]))

    def test_lower_never_exceeds_upper(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            x = rng.uniform(0, 1)
            n = int(rng.integers(1, 10**6))
            lo, up = eta_pure_fixpoint_bounds(x, n)
            assert lo <= up + 1e-14

    def test_rejects_x_outside_unit_interval(self):
        with pytest.raises(ValueError):
            eta_pure_fixpoint_bounds(1.2, 10)


class TestSeparableBounds:
    def test_single_factor_collapses_to_channel_bracket(self):
        L = build_liouvillian(depolarizing_model(2, 1.0))
        lo, up = eta_sep_bounds(L, 1.0, 1, restarts=8, seed=0)
        eb = eta_b_estimate(L, 1.0, restarts=8, seed=0)
        assert lo == pytest.approx(eb.eta_lower**2, rel=1e-6)
        assert up >= lo - 1e-12

    def test_depolarizing_family_crossover(self):
        L = build_liouvillian(depolarizing_model(2, 1.0))
        gap = spectral_report(L).gap
        for n, c_lo_expected in ((10**3, 0.9), (10**6, 0.99)):
            t_n = np.log(n) / (2 * gap)
            lo, _ = eta_sep_bounds(L, 0.5 * t_n, n, restarts=8, seed=0)
            assert lo >= c_lo_expected
            _, up = eta_sep_bounds(L, 2.0 * t_n, n, restarts=8, seed=0)
            assert up <= 0.2 if n == 10**3 else up <= 0.02

    def test_two_factor_bruteforce_inside_bracket(self):
        L = build_liouvillian(depolarizing_model(2, 1.0))
        t = 0.8
        lo, up = eta_sep_bounds(L, t, 2, restarts=16, seed=0)
        brute = eta_sep_bruteforce(L, t, 2, restarts=16, seed=0)
        assert lo - 1e-3 <= brute.eta_lower <= up + 1e-6

    def test_rejects_non_primitive(self):
        with pytest.raises(ShapeError):
            eta_sep_bounds(ad_liouvillian(), 1.0, 4)


class TestCombinators:
    def test_commuting_sum_arithmetic(self):
        b = commuting_sum_bound([0.3, 0.2])
        assert b.raw == pytest.approx(0.5, abs=1e-15)
        assert b.clamped == pytest.approx(0.5, abs=1e-15)
        n, eta = 7, 0.21
        assert commuting_sum_bound([eta] * n).raw == pytest.approx(n * eta, abs=1e-12)
        assert commuting_sum_bound([eta] * n).clamped == 1.0

    def test_two_qubit_disjoint_decay_respects_sum_bound(self):
        site = amplitude_damping_model(1.0)
        joint = tensor_sum(TensorSumModel(site, 2))
        for t in (0.5, 1.0, 2.0):
            site_eta = eta_ad_closed_form(1.0, t)
            bound = commuting_sum_bound([site_eta, site_eta])
            measured = eta_tr_estimate(joint, t, restarts=16, seed=3)
            assert measured.eta_lower <= bound.raw + 1e-8

    def test_embed_bound_arithmetic(self):
        assert tensor_embed_bound(0.1, 2) == pytest.approx(0.8, abs=1e-15)
        assert tensor_embed_bound(0.0, 5) == 0.0

    def test_embedded_channel_respects_bound(self):
        site = amplitude_damping_model(1.0)
        embedded = tensor_sum(TensorSumModel(site, 2, placement=[0]))  # T (x) id
        for t in (0.5, 1.0, 2.0):
            eta_site = eta_ad_closed_form(1.0, t)
            measured = eta_tr_estimate(embedded, t, restarts=16, seed=4)
            assert measured.eta_lower <= tensor_embed_bound(eta_site, 2) + 1e-8


class TestAsymptoticSlope:
    def test_random_primitive_qubit_slope_matches_gap(self):
        from qmixing.models import random_primitive_liouvillian

        for seed in (0, 1, 2):
            L = build_liouvillian(random_primitive_liouvillian(2, seed))
            rep = spectral_report(L)
            assert rep.jordan_index == 1
            gap = rep.gap
            ts = np.linspace(5.0 / gap, 10.0 / gap, 4)
            vals = [eta_tr_estimate(L, t, restarts=8, seed=seed).eta_lower for t in ts]
            slope = np.polyfit(ts, np.log(vals), 1)[0]
            assert -gap * 1.02 <= slope <= -gap * 0.98
