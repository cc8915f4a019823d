"""Cutoff experiments over families of tensor-power semigroups.

A family is a single-site generator with a unique pure fixed point, indexed
by the number n of tensor factors.  Contraction curves come from two paths:

* scalable: the per-site dual decay x(t) = ||T_t^*(1 - psi)||_inf is computed
  from the site generator alone and combined into two-sided bounds on the
  n-fold contraction, valid for any n;
* brute force: the explicit joint Liouvillian is built and the multistart
  witness search run on it, only possible at desk scale.

The graph-state family rides on the scalable path through its per-site
reduction in the stabilizer eigenbasis; the brute-force path uses the actual
graph generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .contraction import eta_pure_fixpoint_bounds, eta_tr_estimate
from .errors import CapExceededError, NumericalError, ShapeError
from .liouville import (
    LindbladModel,
    Superoperator,
    TensorSumModel,
    build_liouvillian,
    dual_superop,
    tensor_sum,
    unvec,
    vec,
)
from .matcore import DESK_SCALE_CAP, mat_exp, operator_norm
from .models import amplitude_damping_model, graph_state_model, path_graph, star_graph
from .spectral import spectral_report

DEFAULT_C_PROBE = (0.5, 0.8, 1.2, 2.0)
DEFAULT_HI_THRESHOLD = 0.95
DEFAULT_LO_THRESHOLD = 0.1


def precutoff_times(gap: float, n: int) -> tuple[float, float]:
    """The bracketing times (ln n / (2 gap), ln n / gap) for an n-fold tensor power."""
    gap = float(gap)
    if not gap > 0:
        raise ValueError("zero gap: bracketing times undefined")
    if n < 2:
        raise ValueError("n must be >= 2")
    ln = float(np.log(n))
    return (ln / (2.0 * gap), ln / gap)


@dataclass
class CutoffFamily:
    """Tensor-power family built from one site generator with a pure fixed point."""

    label: str
    site_model: LindbladModel
    site_fixed_point: np.ndarray
    joint_builder: Optional[Callable[[int], Superoperator]] = None

    @cached_property
    def site_liouvillian(self) -> Superoperator:
        return build_liouvillian(self.site_model)

    @cached_property
    def gap(self) -> float:
        return spectral_report(self.site_liouvillian).gap

    @cached_property
    def _dual_modes(self):
        # Decompose 1 - psi in the eigenmodes of the dual once; x(t) then
        # costs one small matrix sum per time, exact in the exponentials.
        dual = dual_superop(self.site_liouvillian)
        w, V = np.linalg.eig(dual.matrix)
        sv = np.linalg.svd(V, compute_uv=False)
        if sv[-1] <= 1e-8 * sv[0]:
            return None
        d = self.site_model.dim
        target = vec(np.eye(d) - self.site_fixed_point)
        coeff = np.linalg.solve(V, target)
        cmax = np.abs(coeff).max() if coeff.size else 0.0
        keep = np.abs(coeff) > 1e-12 * max(cmax, 1.0)
        modes = [(w[k], coeff[k] * unvec(V[:, k], d)) for k in np.nonzero(keep)[0]]
        return modes

    def x_of_t(self, t: float) -> float:
        """The per-site dual decay ||T_t^*(1 - psi)||_inf."""
        t = float(t)
        modes = self._dual_modes
        if modes is not None:
            d = self.site_model.dim
            acc = np.zeros((d, d), dtype=np.complex128)
            for lam, mat in modes:
                acc += np.exp(t * lam) * mat
            val = operator_norm(acc)
        else:
            dual = dual_superop(self.site_liouvillian)
            d = self.site_model.dim
            out = unvec(mat_exp(dual.matrix, t) @ vec(np.eye(d) - self.site_fixed_point), d)
            val = operator_norm(out)
        return float(min(1.0, max(0.0, val)))

    def joint_liouvillian(self, n: int) -> Superoperator:
        if self.joint_builder is not None:
            return self.joint_builder(n)
        return tensor_sum(TensorSumModel(self.site_model, n))


def amplitude_damping_family(gamma: float, alpha: float = 0.0, beta: float = 0.0) -> CutoffFamily:
    model = amplitude_damping_model(gamma, alpha, beta)
    psi = np.diag([1.0, 0.0]).astype(np.complex128)
    return CutoffFamily(
        label=f"amplitude_damping(gamma={gamma}, alpha={alpha}, beta={beta})",
        site_model=model,
        site_fixed_point=psi,
    )


def graph_state_family(gamma: float, graph: str = "path") -> CutoffFamily:
    """Dissipative graph-state preparation indexed by the number of vertices.

    The scalable path uses the per-vertex amplitude damping reduction valid in
    the stabilizer eigenbasis; the brute-force path builds the actual graph
    generator for the requested shape.
    """
    if graph == "path":
        builder_spec = path_graph
    elif graph == "star":
        builder_spec = star_graph
    else:
        raise ShapeError(f"unknown graph shape {graph!r} (use 'path' or 'star')")

    def joint(n: int) -> Superoperator:
        return build_liouvillian(graph_state_model(builder_spec(n, gamma)))

    site = amplitude_damping_model(gamma)
    psi = np.diag([1.0, 0.0]).astype(np.complex128)
    return CutoffFamily(
        label=f"graph_state/{graph}(gamma={gamma})",
        site_model=site,
        site_fixed_point=psi,
        joint_builder=joint,
    )


def family_from_model(model: LindbladModel, label: str = "") -> CutoffFamily:
    """Wrap an arbitrary site generator, verifying the unique-pure-fixed-point
    requirement of the scalable path."""
    L = build_liouvillian(model)
    rep = spectral_report(L)
    if len(rep.peripheral) != 1:
        raise ShapeError("no scalable path: the site generator has nontrivial peripheral spectrum")
    from .spectral import stationary_state

    rho = stationary_state(L)
    purity = float(np.trace(rho @ rho).real)
    if purity < 1.0 - 1e-8:
        raise ShapeError("no scalable path: the stationary state is not pure")
    return CutoffFamily(label=label or model.label, site_model=model, site_fixed_point=rho)


@dataclass
class CutoffCurve:
    """Contraction bounds of one family member on a time grid."""

    n: int
    t: np.ndarray
    eta_lower: np.ndarray
    eta_upper: np.ndarray
    method: str
    c: Optional[np.ndarray] = None  # grid in units of the estimated cutoff time


def cutoff_curve(
    family: CutoffFamily,
    n: int,
    t_grid: Sequence[float],
    method: str = "auto",
    restarts: int = 32,
    seed: int = 0,
) -> CutoffCurve:
    """Contraction bounds over a time grid for the n-fold family member."""
    t_arr = np.asarray([float(t) for t in t_grid], dtype=float)
    if t_arr.size == 0:
        raise ValueError("empty time grid")
    d = family.site_model.dim
    if method == "auto":
        method = "scalable"
    if method == "scalable":
        lows = np.empty_like(t_arr)
        ups = np.empty_like(t_arr)
        for i, t in enumerate(t_arr):
            lo, up = eta_pure_fixpoint_bounds(family.x_of_t(t), n)
            lows[i] = lo
            ups[i] = up
        return CutoffCurve(n=int(n), t=t_arr, eta_lower=lows, eta_upper=ups, method="scalable")
    if method == "brute":
        if float(d) ** (2 * n) > DESK_SCALE_CAP:
            raise CapExceededError(f"no valid brute-force path for n = {n} at d = {d}")
        L = family.joint_liouvillian(n)
        lows = np.empty_like(t_arr)
        ups = np.empty_like(t_arr)
        for i, t in enumerate(t_arr):
            est = eta_tr_estimate(L, t, restarts=restarts, seed=seed)
            lows[i] = est.eta_lower
            ups[i] = est.eta_upper
        return CutoffCurve(n=int(n), t=t_arr, eta_lower=lows, eta_upper=ups, method="brute")
    raise ValueError(f"unknown method {method!r}")


def estimate_cutoff_time(t: Sequence[float], eta: Sequence[float], threshold: float = 0.5) -> float:
    """Interpolated time at which a monotone-decreasing contraction curve
    crosses the threshold (mixing-time convention: one half)."""
    t = np.asarray(t, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if t.size != eta.size or t.size < 2:
        raise ValueError("need matching t and eta arrays with at least two points")
    rises = np.diff(eta)
    if rises.max(initial=0.0) > 0.05:
        raise NumericalError("curve is not monotone-decreasing within noise")
    above = eta >= threshold
    if not above[0]:
        raise ValueError("no crossing in grid: curve starts below the threshold")
    if above[-1]:
        raise ValueError("no crossing in grid: curve never drops below the threshold")
    i = int(np.nonzero(~above)[0][0])
    t0, t1 = t[i - 1], t[i]
    e0, e1 = eta[i - 1], eta[i]
    if e0 == e1:
        return float(0.5 * (t0 + t1))
    return float(t0 + (e0 - threshold) / (e0 - e1) * (t1 - t0))


@dataclass
class Verdict:
    kind: str  # "cutoff", "pre-cutoff", or "inconclusive"
    nu_hat: Optional[float] = None
    rate_ratio: Optional[float] = None  # nu_hat / gap
    window: Optional[tuple] = None      # (t1, t2) at the largest n
    details: dict = field(default_factory=dict)


@dataclass
class CutoffReport:
    """Everything one experiment produced: per-n curves at scaled times,
    bracketing times, estimated cutoff times and the classification verdict."""

    family: str
    gap: float
    n_values: list
    t1: list
    t2: list
    cutoff_times: list
    curves: dict            # n -> CutoffCurve sampled at c * t_hat(n)
    sandwich: dict          # n -> (eta_lower at 0.8 t1, eta_lower at 1.2 t2, eta_upper at 1.2 t2)
    threshold: float
    c_grid: list
    verdict: Optional[Verdict] = None


def _curve_value_at(curve: CutoffCurve, c: float, column: str) -> float:
    idx = np.nonzero(np.isclose(curve.c, c, rtol=0, atol=1e-12))[0]
    if idx.size == 0:
        raise ValueError(f"curve for n={curve.n} carries no point at c={c}")
    arr = curve.eta_lower if column == "lower" else curve.eta_upper
    return float(arr[int(idx[0])])


def classify(
    report: CutoffReport,
    c_probe: Sequence[float] = DEFAULT_C_PROBE,
    hi: float = DEFAULT_HI_THRESHOLD,
    lo: float = DEFAULT_LO_THRESHOLD,
    trend_tol: float = 0.02,
) -> Verdict:
    """Finite-size cutoff classification on an n ladder.

    Cutoff: at scaled times c * t_hat(n) the certified lower bound trends to 1
    for c < 1 and the bounds trend to 0 for c > 1, with the threshold tests
    evaluated at the largest n; the rate nu_hat comes from regressing the
    estimated cutoff times on ln n.  Pre-cutoff: only the two-sided time
    sandwich holds.  Deterministic given the curves.
    """
    ns = sorted(report.n_values)
    if len(ns) < 3:
        raise ValueError("insufficient n ladder: need at least 3 values")
    if max(ns) / min(ns) < 100:
        raise ValueError("insufficient n ladder: need at least two decades of spread")
    c_lo = [c for c in c_probe if c < 1.0]
    c_hi = [c for c in c_probe if c > 1.0]
    if not c_lo or not c_hi:
        raise ValueError("c_probe must contain values on both sides of 1")

    details: dict = {}
    trend_ok = True
    for c in c_lo:
        seq = [_curve_value_at(report.curves[n], c, "lower") for n in ns]
        details[f"eta_lower@c={c}"] = seq
        trend_ok = trend_ok and all(b >= a - trend_tol for a, b in zip(seq, seq[1:]))
    for c in c_hi:
        seq_l = [_curve_value_at(report.curves[n], c, "lower") for n in ns]
        seq_u = [_curve_value_at(report.curves[n], c, "upper") for n in ns]
        details[f"eta_lower@c={c}"] = seq_l
        details[f"eta_upper@c={c}"] = seq_u
        trend_ok = trend_ok and all(b <= a + trend_tol for a, b in zip(seq_l, seq_l[1:]))
        trend_ok = trend_ok and all(b <= a + trend_tol for a, b in zip(seq_u, seq_u[1:]))

    n_max = ns[-1]
    c_hi_edge = min(c_hi)
    c_lo_edge = max(c_lo)
    hi_ok = _curve_value_at(report.curves[n_max], c_lo_edge, "lower") >= hi
    lo_ok = _curve_value_at(report.curves[n_max], c_hi_edge, "lower") <= lo
    details["trend_ok"] = trend_ok
    details["hi_ok"] = hi_ok
    details["lo_ok"] = lo_ok

    window = (report.t1[-1], report.t2[-1])
    if trend_ok and hi_ok and lo_ok:
        lnn = np.log(np.asarray(ns, dtype=float))
        th = np.asarray([report.cutoff_times[report.n_values.index(n)] for n in ns])
        slope, intercept = np.polyfit(lnn, th, 1)
        nu_hat = float(1.0 / slope)
        details["fit_intercept"] = float(intercept)
        return Verdict(
            kind="cutoff",
            nu_hat=nu_hat,
            rate_ratio=float(nu_hat / report.gap),
            window=window,
            details=details,
        )

    lo_at_t1 = [report.sandwich[n][0] for n in ns]
    lo_at_t2 = [report.sandwich[n][1] for n in ns]
    up_at_t2 = [report.sandwich[n][2] for n in ns]
    sand_ok = (
        all(b >= a - trend_tol for a, b in zip(lo_at_t1, lo_at_t1[1:]))
        and all(b <= a + trend_tol for a, b in zip(up_at_t2, up_at_t2[1:]))
        and lo_at_t1[-1] >= hi
        and lo_at_t2[-1] <= lo
    )
    details["sandwich_ok"] = sand_ok
    if sand_ok:
        return Verdict(kind="pre-cutoff", window=window, details=details)
    return Verdict(kind="inconclusive", window=window, details=details)


def run_cutoff_experiment(
    family: CutoffFamily,
    n_values: Sequence[int],
    c_grid: Optional[Sequence[float]] = None,
    c_probe: Sequence[float] = DEFAULT_C_PROBE,
    threshold: float = 0.5,
    dense_points: int = 800,
    method: str = "scalable",
    restarts: int = 32,
    seed: int = 0,
) -> CutoffReport:
    """Full experiment: per-n threshold crossings on a dense grid, curves at
    scaled times c * t_hat(n), sandwich checks and the classification verdict."""
    gap = family.gap
    if not gap > 0:
        raise ValueError("family has zero gap")
    n_values = [int(n) for n in n_values]
    if c_grid is None:
        c_grid = sorted(set(np.round(np.linspace(0.25, 2.5, 10), 6)) | set(c_probe))
    else:
        c_grid = sorted(set(float(c) for c in c_grid) | set(c_probe))
    t1_list, t2_list, that_list = [], [], []
    curves = {}
    sandwich = {}
    for n in n_values:
        t1, t2 = precutoff_times(gap, n)
        dense_t = np.linspace(0.05 * t1, 3.0 * t2, dense_points)
        dense = cutoff_curve(family, n, dense_t, method=method, restarts=restarts, seed=seed)
        t_hat = estimate_cutoff_time(dense.t, dense.eta_lower, threshold)
        probe_t = [c * t_hat for c in c_grid]
        curve = cutoff_curve(family, n, probe_t, method=method, restarts=restarts, seed=seed)
        curve.c = np.asarray(c_grid, dtype=float)
        extra = cutoff_curve(
            family, n, [0.8 * t1, 1.2 * t2], method=method, restarts=restarts, seed=seed
        )
        sandwich[n] = (
            float(extra.eta_lower[0]),
            float(extra.eta_lower[1]),
            float(extra.eta_upper[1]),
        )
        t1_list.append(t1)
        t2_list.append(t2)
        that_list.append(t_hat)
        curves[n] = curve
    report = CutoffReport(
        family=family.label,
        gap=gap,
        n_values=n_values,
        t1=t1_list,
        t2=t2_list,
        cutoff_times=that_list,
        curves=curves,
        sandwich=sandwich,
        threshold=threshold,
        c_grid=list(c_grid),
    )
    report.verdict = classify(report, c_probe=c_probe)
    return report
