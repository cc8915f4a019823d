import numpy as np
import pytest

from qmixing.cutoff import (
    CutoffCurve,
    CutoffReport,
    amplitude_damping_family,
    classify,
    cutoff_curve,
    estimate_cutoff_time,
    graph_state_family,
    precutoff_times,
    run_cutoff_experiment,
)
from qmixing.errors import NumericalError


class TestPrecutoffTimes:
    def test_arithmetic(self):
        t1, t2 = precutoff_times(0.5, int(np.e**2))
        n = int(np.e**2)
        assert t1 == pytest.approx(np.log(n), abs=1e-12)
        assert t2 == pytest.approx(2 * np.log(n), abs=1e-12)
        assert t1 == t2 / 2

    def test_amplitude_damping_values(self):
        t1, t2 = precutoff_times(0.5, 10**4)
        assert t1 == pytest.approx(np.log(10**4), abs=1e-9)  # 9.21
        assert t2 == pytest.approx(2 * np.log(10**4), abs=1e-9)  # 18.42

    def test_cutoff_time_inside_window(self):
        # the family converges at ln(n)/gamma, which saturates the lower edge
        # of the window; the measured half-crossing sits strictly inside
        gamma = 1.0
        fam = amplitude_damping_family(gamma)
        for n in (10**3, 10**6):
            t1, t2 = precutoff_times(gamma / 2, n)
            assert t1 - 1e-12 <= np.log(n) / gamma < t2
            ts = np.linspace(0.2 * t1, 1.5 * t2, 1200)
            curve = cutoff_curve(fam, n, ts)
            t_hat = estimate_cutoff_time(curve.t, curve.eta_lower)
            assert t1 < t_hat < t2

    def test_rejects_zero_gap(self):
        with pytest.raises(ValueError):
            precutoff_times(0.0, 100)


class TestCutoffCurve:
    def test_supercritical_lower_bound_saturates(self):
        fam = amplitude_damping_family(1.0)
        n = 10**6
        t = 0.8 * np.log(n)
        curve = cutoff_curve(fam, n, [t])
        assert curve.eta_lower[0] >= 1 - 1e-6

    def test_subcritical_upper_bound_small(self):
        fam = amplitude_damping_family(1.0)
        n = 10**6
        t = 2.0 * np.log(n)
        curve = cutoff_curve(fam, n, [t])
        assert curve.eta_upper[0] == pytest.approx(n**-0.5, rel=1e-2)

    def test_brute_force_agrees_with_scalable_bracket(self):
        fam = amplitude_damping_family(1.0)
        ts = [0.7, 1.4]
        scalable = cutoff_curve(fam, 2, ts)
        brute = cutoff_curve(fam, 2, ts, method="brute", restarts=16, seed=0)
        for j in range(len(ts)):
            assert scalable.eta_lower[j] - 1e-4 <= brute.eta_lower[j]
            assert brute.eta_lower[j] <= scalable.eta_upper[j] + 1e-6

    def test_site_decay_matches_exponential(self):
        fam = amplitude_damping_family(1.0)
        for t in (0.5, 2.0, 20.0):
            assert fam.x_of_t(t) == pytest.approx(np.exp(-t), rel=1e-10)


class TestEstimateCutoffTime:
    def test_sharp_step_location(self):
        t = np.array([0.0, 0.9999995, 1.0000005, 2.0])
        eta = np.array([1.0, 1.0, 0.0, 0.0])
        assert estimate_cutoff_time(t, eta) == pytest.approx(1.0, abs=1e-5)

    def test_amplitude_damping_crossing_matches_root_oracle(self):
        from scipy.optimize import brentq

        gamma = 1.0
        n = 10**4
        fam = amplitude_damping_family(gamma)
        ts = np.linspace(0.5, 25.0, 2000)
        curve = cutoff_curve(fam, n, ts)
        t_hat = estimate_cutoff_time(curve.t, curve.eta_lower)
        # oracle: solve 1 - (1 - e^{-t})^n = 1/2 directly
        t_star = brentq(lambda t: -np.expm1(n * np.log1p(-np.exp(-t))) - 0.5, 1.0, 25.0)
        assert t_hat == pytest.approx(t_star, rel=1e-4)
        assert abs(t_hat - np.log(n)) / np.log(n) <= 0.05

    def test_threshold_ordering(self):
        fam = amplitude_damping_family(1.0)
        ts = np.linspace(0.5, 30.0, 1500)
        curve = cutoff_curve(fam, 10**4, ts)
        t99 = estimate_cutoff_time(curve.t, curve.eta_lower, threshold=0.99)
        t50 = estimate_cutoff_time(curve.t, curve.eta_lower, threshold=0.5)
        t01 = estimate_cutoff_time(curve.t, curve.eta_lower, threshold=0.01)
        assert t99 < t50 < t01

    def test_no_crossing_raises(self):
        with pytest.raises(ValueError):
            estimate_cutoff_time([0.0, 1.0], [0.9, 0.8], threshold=0.5)
        with pytest.raises(ValueError):
            estimate_cutoff_time([0.0, 1.0], [0.3, 0.2], threshold=0.5)

    def test_non_monotone_rejected(self):
        with pytest.raises(NumericalError):
            estimate_cutoff_time([0.0, 1.0, 2.0], [1.0, 0.2, 0.9])


class TestClassify:
    def test_amplitude_damping_ladder_is_cutoff(self):
        fam = amplitude_damping_family(1.0)
        report = run_cutoff_experiment(fam, [10**3, 10**4, 10**6])
        v = report.verdict
        assert v.kind == "cutoff"
        assert v.nu_hat == pytest.approx(1.0, rel=0.05)
        assert v.rate_ratio == pytest.approx(2.0, rel=0.05)

    def test_variant_rate_stays_at_gamma_with_unit_gap(self):
        fam = amplitude_damping_family(1.0, 1.0, 1.0)
        report = run_cutoff_experiment(fam, [10**3, 10**4, 10**6])
        assert report.gap == pytest.approx(1.0, abs=1e-9)
        assert report.verdict.kind == "cutoff"
        assert report.verdict.nu_hat == pytest.approx(1.0, rel=0.05)
        assert report.verdict.rate_ratio == pytest.approx(1.0, rel=0.05)

    def test_graph_family_is_cutoff_at_gamma(self):
        report = run_cutoff_experiment(graph_state_family(1.0), [10**3, 10**4, 10**6])
        assert report.verdict.kind == "cutoff"
        assert report.verdict.nu_hat == pytest.approx(1.0, rel=0.05)

    def test_insufficient_ladder_rejected(self):
        fam = amplitude_damping_family(1.0)
        with pytest.raises(ValueError):
            run_cutoff_experiment(fam, [10**3, 10**4])

    def test_window_invariants(self):
        fam = amplitude_damping_family(1.0)
        report = run_cutoff_experiment(fam, [10**3, 10**4, 10**6])
        for i, n in enumerate(report.n_values):
            assert report.t1[i] == pytest.approx(report.t2[i] / 2, abs=1e-12)
            eps = 0.05 * report.t2[i]
            assert report.t1[i] - eps <= report.cutoff_times[i] <= report.t2[i] + eps

    def test_deterministic_given_curves(self):
        fam = amplitude_damping_family(1.0)
        r1 = run_cutoff_experiment(fam, [10**3, 10**4, 10**6])
        r2 = run_cutoff_experiment(fam, [10**3, 10**4, 10**6])
        assert r1.verdict.kind == r2.verdict.kind
        assert r1.verdict.nu_hat == r2.verdict.nu_hat
        assert classify(r1).nu_hat == r1.verdict.nu_hat

    def _synthetic_report(self, lower_fn, upper_fn):
        ns = [10**3, 10**4, 10**6]
        c_grid = [0.5, 0.8, 1.2, 2.0]
        curves = {}
        sandwich = {}
        for n in ns:
            lows = np.array([lower_fn(c, n) for c in c_grid])
            ups = np.array([upper_fn(c, n) for c in c_grid])
            curves[n] = CutoffCurve(
                n=n, t=np.array(c_grid), eta_lower=lows, eta_upper=ups,
                method="synthetic", c=np.array(c_grid),
            )
            sandwich[n] = (lower_fn(0.8, n), lower_fn(2.0, n), upper_fn(2.0, n))
        return CutoffReport(
            family="synthetic", gap=1.0, n_values=ns,
            t1=[np.log(n) / 2 for n in ns], t2=[np.log(n) for n in ns],
            cutoff_times=[np.log(n) for n in ns],
            curves=curves, sandwich=sandwich, threshold=0.5, c_grid=c_grid,
        )

    def test_synthetic_step_curves_classify_as_cutoff(self):
        rep = self._synthetic_report(
            lambda c, n: 1.0 if c < 1 else 0.0,
            lambda c, n: 1.0 if c < 1 else 0.0,
        )
        assert classify(rep).kind == "cutoff"

    def test_synthetic_flat_curves_are_inconclusive(self):
        rep = self._synthetic_report(lambda c, n: 0.5, lambda c, n: 0.6)
        assert classify(rep).kind == "inconclusive"

    def test_synthetic_wide_window_is_precutoff(self):
        # high plateau at the t1-based times, decayed at the t2-based times,
        # but mid-level values at c * t_hat so the sharp-transition test fails
        def lower(c, n):
            return 1.0 if c <= 0.5 else (0.97 if c < 1 else 0.3)

        def upper(c, n):
            return 1.0 if c < 1 else 0.35

        rep = self._synthetic_report(lower, upper)
        rep.sandwich = {n: (0.99, 0.05, 0.08) for n in rep.n_values}
        assert classify(rep).kind == "pre-cutoff"


class TestReportShape:
    def test_eta_pairs_ordered(self):
        report = run_cutoff_experiment(amplitude_damping_family(1.0), [10**3, 10**4, 10**6])
        for n in report.n_values:
            curve = report.curves[n]
            assert (curve.eta_lower <= curve.eta_upper + 1e-6).all()

    def test_scalable_threshold_properties(self):
        # lower bound at half the cutoff time stays near one for n >= 1e4
        fam = amplitude_damping_family(1.0)
        for n in (10**4, 10**6, 10**8):
            t = 0.5 * np.log(n)
            assert cutoff_curve(fam, n, [t]).eta_lower[0] > 0.99
        ups = [cutoff_curve(fam, n, [2.0 * np.log(n)]).eta_upper[0] for n in (10**4, 10**6, 10**8)]
        assert ups[0] <= 0.011
        assert ups[2] < ups[1] < ups[0]
