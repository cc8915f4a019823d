"""Distance measures between quantum states and the inequalities relating them.

Trace distance, fidelity, Bures distance, the quadratic (Huebner) expansion of
the squared Bures distance around a full-rank state, a sampling check of the
linear trace-vs-Bures bound near full-rank states, and the tensor-product
distance brackets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NumericalError, ShapeError, StateError
from .matcore import as_cmatrix, dagger, ginibre, herm_part, require_square

STATE_TRACE_TOL = 1e-9
STATE_EIG_TOL = 1e-9


def validate_state(rho, name: str = "state", tol: float = STATE_EIG_TOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity within tolerance."""
    rho = require_square(as_cmatrix(rho, name), name)
    scale = max(1.0, float(np.abs(rho).max()))
    if np.abs(rho - dagger(rho)).max() > 1e-8 * scale:
        raise StateError(f"{name} is not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > STATE_TRACE_TOL:
        raise StateError(f"{name} trace deviates from 1 by more than {STATE_TRACE_TOL}")
    w = np.linalg.eigvalsh(herm_part(rho))
    if w.min() < -tol:
        raise StateError(f"{name} has eigenvalue {w.min():.3e} below -{tol}")
    return rho


def _sqrtm_psd(A: np.ndarray) -> np.ndarray:
    # Hermitian eigendecomposition with clamping: negative roundoff dust -> 0.
    w, V = np.linalg.eigh(herm_part(A))
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ dagger(V)


def trace_distance(rho, sigma, validate: bool = True) -> float:
    """d_tr(rho, sigma) = ||rho - sigma||_1 / 2."""
    if validate:
        rho = validate_state(rho, "rho")
        sigma = validate_state(sigma, "sigma")
    diff = herm_part(as_cmatrix(rho) - as_cmatrix(sigma))
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def fidelity(rho, sigma, validate: bool = True) -> float:
    """F(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho)), computed as ||sqrt(rho) sqrt(sigma)||_1."""
    if validate:
        rho = validate_state(rho, "rho")
        sigma = validate_state(sigma, "sigma")
    a = _sqrtm_psd(as_cmatrix(rho))
    b = _sqrtm_psd(as_cmatrix(sigma))
    s = np.linalg.svd(a @ b, compute_uv=False)
    return float(min(1.0, s.sum()))


def bures_distance(rho, sigma, validate: bool = True) -> float:
    """d_B(rho, sigma) = sqrt(1 - F(rho, sigma))."""
    return float(np.sqrt(max(0.0, 1.0 - fidelity(rho, sigma, validate=validate))))


@dataclass
class DistancePair:
    """Trace distance, fidelity and Bures distance of one state pair."""

    d_tr: float
    fidelity: float
    d_B: float


def distance_pair(rho, sigma) -> DistancePair:
    rho = validate_state(rho, "rho")
    sigma = validate_state(sigma, "sigma")
    f = fidelity(rho, sigma, validate=False)
    return DistancePair(
        d_tr=trace_distance(rho, sigma, validate=False),
        fidelity=f,
        d_B=float(np.sqrt(max(0.0, 1.0 - f))),
    )


def hubner_form(rho, sigma, tol: float = STATE_EIG_TOL) -> float:
    """Quadratic term of d_B^2(rho, sigma) around a strictly positive sigma.

    Equals (1/4) sum_ij |<i|(rho - sigma)|j>|^2 / (l_i + l_j) in the
    eigenbasis of sigma.  The full d_B^2 differs from this by a cubic
    remainder in the trace distance.
    """
    rho = validate_state(rho, "rho")
    sigma = validate_state(sigma, "sigma")
    lam, V = np.linalg.eigh(herm_part(sigma))
    if lam.min() <= tol:
        raise StateError("sigma must be strictly positive (full rank)")
    delta = dagger(V) @ (rho - sigma) @ V
    denom = lam[:, None] + lam[None, :]
    return float(0.25 * (np.abs(delta) ** 2 / denom).sum())


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-like random unit vector in C^d."""
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random full-rank (or fixed-rank) density matrix, Ginibre construction."""
    r = d if rank is None else int(rank)
    G = ginibre(d, r, rng)
    rho = G @ dagger(G)
    return rho / np.trace(rho).real


def perturbed_state(sigma: np.ndarray, radius: float, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Sample a valid state at trace distance <= radius from sigma.

    Returns (rho, d_tr(rho, sigma)).  The perturbation direction is a random
    traceless Hermitian matrix; the step shrinks until positivity holds, so
    the returned distance is exact by construction.
    """
    d = sigma.shape[0]
    delta = herm_part(ginibre(d, d, rng))
    delta -= np.trace(delta).real / d * np.eye(d)
    nrm = np.abs(np.linalg.eigvalsh(delta)).sum()
    if nrm < 1e-14:
        return sigma.copy(), 0.0
    delta *= 2.0 / nrm  # now ||delta||_1 = 2, so rho = sigma + s*delta has d_tr = s
    s = radius * rng.uniform(0.25, 1.0)
    for _ in range(80):
        rho = sigma + s * delta
        if np.linalg.eigvalsh(herm_part(rho)).min() >= 0.0:
            return rho, float(s)
        s *= 0.5
    return sigma.copy(), 0.0


@dataclass
class Prop1Report:
    """Outcome of the sampled linear bound d_B <= d_tr / sqrt(lambda_min(sigma))."""

    radius: float
    samples: int
    violations: int
    max_ratio: float        # max over samples of d_B / d_tr
    bound: float            # 1 / sqrt(lambda_min(sigma))
    retries: int


def prop1_check(
    sigma,
    samples: int = 1000,
    radius: float = 0.1,
    seed: int = 0,
    tol: float = 1e-9,
    max_retries: int = 6,
) -> Prop1Report:
    """Sample the linear trace-vs-Bures bound around a full-rank sigma.

    The admissible neighborhood size is not known a priori, so on any
    violation the radius is halved and the sampling retried; the report
    carries the radius that finally held.
    """
    sigma = validate_state(sigma, "sigma")
    lam_min = float(np.linalg.eigvalsh(herm_part(sigma)).min())
    if lam_min <= tol:
        raise StateError("sigma must be full rank for the linear bound")
    bound = 1.0 / np.sqrt(lam_min)
    retries = 0
    r = float(radius)
    while True:
        rng = np.random.default_rng(seed + retries)
        violations = 0
        max_ratio = 0.0
        for _ in range(samples):
            rho, dtr = perturbed_state(sigma, r, rng)
            if dtr <= 0.0:
                continue
            db = bures_distance(rho, sigma, validate=False)
            ratio = db / dtr
            max_ratio = max(max_ratio, ratio)
            if db > dtr * bound + tol:
                violations += 1
        if violations == 0:
            return Prop1Report(
                radius=r, samples=samples, violations=0,
                max_ratio=max_ratio, bound=bound, retries=retries,
            )
        retries += 1
        if retries > max_retries:
            raise NumericalError(
                f"linear bound still violated at radius {r:.3e} after {max_retries} retries"
            )
        r *= 0.5


class ProductDistanceBounds(NamedTuple):
    tr_lower: float
    tr_upper: float
    bures_sq_lower: float
    bures_sq_upper: float


def product_distance_bounds(per_factor: Sequence[DistancePair]) -> ProductDistanceBounds:
    """Two-sided bounds on distances between tensor products from per-factor distances.

    Trace distance of the products lies in
    [1 - exp(-sum_i d_tr,i^2 / 2), sum_i d_tr,i]; the squared Bures distance
    lies in [1 - exp(-sum_i d_B,i^2), sum_i d_B,i^2].
    """
    dtr2 = 0.0
    dtr_sum = 0.0
    db2_sum = 0.0
    for k, p in enumerate(per_factor):
        if not (0.0 <= p.d_tr <= 1.0 + 1e-12 and 0.0 <= p.d_B <= 1.0 + 1e-12):
            raise ShapeError(f"per_factor[{k}] carries distances outside [0, 1]")
        dtr2 += p.d_tr**2
        dtr_sum += p.d_tr
        db2_sum += p.d_B**2
    return ProductDistanceBounds(
        tr_lower=float(-np.expm1(-0.5 * dtr2)),
        tr_upper=float(dtr_sum),
        bures_sq_lower=float(-np.expm1(-db2_sum)),
        bures_sq_upper=float(db2_sum),
    )
