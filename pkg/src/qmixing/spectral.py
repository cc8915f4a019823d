"""Spectral analysis of Liouvillians: gap, peripheral structure, asymptotic
projection, primitivity, Jordan diagnostics, and instance-specific decay
constants bracketing the trace-norm contraction.

Eigenvalue classification is scale-invariant: an eigenvalue counts as
peripheral iff |Re(lambda)| <= tol * ||L||, with tol defaulting to 1e-9.
Spectral projectors are computed from reordered Schur forms with a Sylvester
block-diagonalization, which stays well-defined for clustered eigenvalues.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .errors import NumericalError, ShapeError, StateError
from .liouville import Superoperator, dual_superop, unvec, vec
from .matcore import herm_part, operator_norm
from .metrics import validate_state

DEFAULT_PERIPHERAL_TOL = 1e-9
JORDAN_RANK_TOL = 1e-8


def _eigendata(M: np.ndarray):
    w, V = scipy.linalg.eig(M)
    R = M @ V - V * w[np.newaxis, :]
    residual = float(np.linalg.norm(R, axis=0).max()) if M.size else 0.0
    scale = operator_norm(M)
    return w, V, residual, scale


def _cluster_indices(values: np.ndarray, ctol: float) -> list[list[int]]:
    """Connected components of the eigenvalue set under distance <= ctol."""
    n = len(values)
    if n == 0:
        return []
    dist = np.abs(values[:, None] - values[None, :])
    adj = dist <= ctol
    seen = np.zeros(n, dtype=bool)
    clusters = []
    for i in range(n):
        if seen[i]:
            continue
        stack = [i]
        seen[i] = True
        comp = []
        while stack:
            j = stack.pop()
            comp.append(j)
            for k in np.nonzero(adj[j] & ~seen)[0]:
                seen[k] = True
                stack.append(int(k))
        clusters.append(sorted(comp))
    return clusters


def _schur_select_sorted(M: np.ndarray, select) -> tuple[np.ndarray, np.ndarray, int]:
    T, Z, sdim = scipy.linalg.schur(M, output="complex", sort=select)
    return T, Z, int(sdim)


def _cluster_projector(M: np.ndarray, cluster_values: np.ndarray, match_tol: float) -> np.ndarray:
    """Spectral projector onto the invariant subspace of an eigenvalue cluster."""
    vals = np.atleast_1d(cluster_values)

    def select(lam):
        return bool(np.min(np.abs(lam - vals)) <= match_tol)

    T, Z, sdim = _schur_select_sorted(M, select)
    if sdim != len(vals):
        raise NumericalError(
            f"ambiguous eigenvalue cluster: selected {sdim} Schur values, expected {len(vals)}"
        )
    n = M.shape[0]
    if sdim == n:
        return np.eye(n, dtype=np.complex128)
    if sdim == 0:
        return np.zeros((n, n), dtype=np.complex128)
    m = sdim
    T11, T12, T22 = T[:m, :m], T[:m, m:], T[m:, m:]
    X = scipy.linalg.solve_sylvester(T11, -T22, -T12)
    block = np.zeros((n, n), dtype=np.complex128)
    block[:m, :m] = np.eye(m)
    block[:m, m:] = -X
    return Z @ block @ Z.conj().T


def _peripheral_split(M: np.ndarray, ptol: float, expected: int):
    """Reordered Schur form with the peripheral block leading, block-diagonalized.

    Returns (kappa, T22) where kappa is the condition number of the full
    similarity taking M to blockdiag(peripheral, decaying) and T22 is the
    triangular decaying block (empty when everything is peripheral).
    """

    def select(lam):
        return bool(abs(lam.real) <= ptol)

    T, Z, sdim = _schur_select_sorted(M, select)
    if sdim != expected:
        raise NumericalError(
            f"ambiguous peripheral split: selected {sdim} Schur values, expected {expected}"
        )
    n = M.shape[0]
    if sdim in (0, n):
        return 1.0, (T if sdim == 0 else T[:0, :0])
    m = sdim
    T11, T12, T22 = T[:m, :m], T[:m, m:], T[m:, m:]
    X = scipy.linalg.solve_sylvester(T11, -T22, -T12)
    sx = np.linalg.svd(X, compute_uv=False)
    top = float(sx[0]) if sx.size else 0.0
    # W = Z [[I, X], [0, I]]; cond(W) = cond([[I, X], [0, I]]) has closed form.
    kappa = (top + np.sqrt(top * top + 4.0)) ** 2 / 4.0
    return float(kappa), T22


def _kernel_state(M: np.ndarray, w: np.ndarray, V: np.ndarray, dim: int) -> np.ndarray:
    """Density-matrix representative of a one-dimensional kernel."""
    idx = int(np.argmin(np.abs(w)))
    rho = herm_part(unvec(V[:, idx], dim))
    tr = float(np.trace(rho).real)
    if abs(tr) < 1e-12:
        raise NumericalError("kernel representative has vanishing trace")
    return rho / tr


class PrimitivityResult(NamedTuple):
    primitive: bool
    witness: Optional[np.ndarray]


def _primitivity(w: np.ndarray, V: np.ndarray, scale: float, dim: int, tol: float) -> PrimitivityResult:
    ktol = max(tol * max(scale, 1e-30), 1e-14)
    kernel = np.abs(w) <= ktol
    band = (np.abs(w) > ktol) & (np.abs(w) <= 10.0 * ktol)
    if band.any():
        raise NumericalError(
            "ambiguous kernel dimension: eigenvalues sit at the tolerance boundary"
        )
    n_kernel = int(kernel.sum())
    if n_kernel == 0:
        raise NumericalError("no zero eigenvalue found; input is not a Liouvillian")
    witness = None
    if n_kernel == 1:
        idx = int(np.argmin(np.abs(w)))
        rho = herm_part(unvec(V[:, idx], dim))
        tr = float(np.trace(rho).real)
        if abs(tr) > 1e-12:
            witness = rho / tr
    if n_kernel != 1:
        return PrimitivityResult(False, witness)
    ptol = max(tol * max(scale, 1e-30), 1e-14)
    peripheral_other = (np.abs(w.real) <= ptol) & ~kernel
    if peripheral_other.any():
        return PrimitivityResult(False, witness)
    if witness is None:
        return PrimitivityResult(False, None)
    lam_min = float(np.linalg.eigvalsh(witness).min())
    return PrimitivityResult(bool(lam_min > tol), witness)


@dataclass
class SpectralReport:
    """Spectral fingerprint of a Liouvillian."""

    eigenvalues: np.ndarray
    gap: float
    peripheral: list = field(default_factory=list)
    jordan_index: int = 1
    primitive: bool = False
    kappa: float = 1.0
    kappa_flagged: bool = False
    residual: float = 0.0
    scale: float = 0.0

    def subdominant_modulus(self, t: float) -> float:
        """Largest interior eigenvalue modulus of exp(t L), i.e. exp(-t * gap)."""
        return float(np.exp(-self.gap * float(t)))


def _jordan_index_at_gap(M: np.ndarray, w: np.ndarray, gap: float, scale: float, ctol: float) -> int:
    """Largest Jordan block among eigenvalue clusters at the gap, by rank tests."""
    if gap <= 0.0:
        return 1
    at_gap = [i for i in range(len(w)) if abs(-w[i].real - gap) <= max(ctol, 1e-12)]
    if not at_gap:
        return 1
    clusters = _cluster_indices(w[at_gap], ctol)
    J = 1
    n = M.shape[0]
    eye = np.eye(n)
    for cl in clusters:
        m_alg = len(cl)
        if m_alg == 1:
            continue
        lam = complex(np.mean(w[at_gap][cl]))
        A = M - lam * eye
        P = np.eye(n, dtype=np.complex128)
        for k in range(1, m_alg + 1):
            P = P @ A
            thr = JORDAN_RANK_TOL * max(scale, 1e-16) ** k
            sv = np.linalg.svd(P, compute_uv=False)
            rank = int((sv > thr).sum())
            if n - rank >= m_alg:
                J = max(J, k)
                break
        else:
            J = max(J, m_alg)
    return J


def spectral_report(L: Superoperator, tol: float = DEFAULT_PERIPHERAL_TOL) -> SpectralReport:
    """Eigenvalues, gap, peripheral set, Jordan index at the gap, primitivity
    and the condition number of the diagonalizing similarity."""
    M = L.matrix
    w, V, residual, scale = _eigendata(M)
    res_tol = 1e-8 * max(scale, 1.0)
    if residual > res_tol:
        raise NumericalError(f"eigen residual {residual:.3e} above tolerance {res_tol:.3e}")
    ptol = max(tol * max(scale, 1e-30), 1e-14)
    ctol = max(1e-8 * scale, 1e-12)
    peripheral = [int(i) for i in np.nonzero(np.abs(w.real) <= ptol)[0]]
    decaying = [i for i in range(len(w)) if abs(w[i].real) > ptol]
    gap = float(min(-w[i].real for i in decaying)) if decaying else 0.0
    J = _jordan_index_at_gap(M, w, gap, scale, ctol)
    sv = np.linalg.svd(V, compute_uv=False)
    if sv[-1] > 1e-8:
        kappa = float(sv[0] / sv[-1])
        flagged = False
    else:
        kappa, _ = _peripheral_split(M, ptol, len(peripheral))
        flagged = True
    prim = _primitivity(w, V, scale, L.dim, tol)
    return SpectralReport(
        eigenvalues=w,
        gap=gap,
        peripheral=peripheral,
        jordan_index=J,
        primitive=prim.primitive,
        kappa=kappa,
        kappa_flagged=flagged,
        residual=residual,
        scale=scale,
    )


def is_primitive(L: Superoperator, tol: float = DEFAULT_PERIPHERAL_TOL) -> PrimitivityResult:
    """True iff the kernel is one-dimensional, its state has full rank, and no
    other peripheral eigenvalue exists.  The witness is the stationary state
    whenever the kernel is one-dimensional."""
    w, V, residual, scale = _eigendata(L.matrix)
    return _primitivity(w, V, scale, L.dim, tol)


def stationary_state(L: Superoperator, tol: float = DEFAULT_PERIPHERAL_TOL) -> np.ndarray:
    """Density-matrix representative of a one-dimensional kernel of L."""
    w, V, residual, scale = _eigendata(L.matrix)
    ktol = max(tol * max(scale, 1e-30), 1e-14)
    n_kernel = int((np.abs(w) <= ktol).sum())
    if n_kernel != 1:
        raise NumericalError(f"kernel dimension {n_kernel}, expected 1")
    return _kernel_state(L.matrix, w, V, L.dim)


def asymptotic_projector(
    L: Superoperator,
    t: float = 0.0,
    tol: float = DEFAULT_PERIPHERAL_TOL,
    defect_tol: float = 1e-7,
) -> Superoperator:
    """Phase-preserving projection onto the peripheral eigenspaces at time t.

    Built as sum over peripheral eigenvalues of exp(t*lambda) P_lambda with
    spectral projectors P_lambda; peripheral Jordan blocks must be trivial,
    which is asserted numerically.
    """
    t = float(t)
    if t < 0:
        raise ValueError("asymptotic projector requires t >= 0")
    M = L.matrix
    w, V, residual, scale = _eigendata(M)
    ptol = max(tol * max(scale, 1e-30), 1e-14)
    ctol = max(1e-8 * scale, 1e-12)
    per_idx = np.nonzero(np.abs(w.real) <= ptol)[0]
    if per_idx.size == 0:
        raise NumericalError("no peripheral eigenvalue found; input is not a Liouvillian")
    per_vals = w[per_idx]
    out = np.zeros_like(M)
    match_tol = max(ctol / 2.0, 1e-12)
    for cl in _cluster_indices(per_vals, ctol):
        vals = per_vals[cl]
        center = complex(np.mean(vals))
        P = _cluster_projector(M, vals, match_tol)
        defect = operator_norm((M - center * np.eye(M.shape[0])) @ P)
        if defect > defect_tol * max(scale, 1.0):
            raise NumericalError(
                f"defective peripheral spectrum: nilpotent norm {defect:.3e}"
            )
        out = out + np.exp(1j * center.imag * t) * P
    return Superoperator(L.dim, out, L.basis)


def norm_bracket(T: Superoperator, T_phi: Superoperator, d: int) -> tuple[float, float]:
    """Two-sided bracket on the trace-norm contraction from the superoperator
    matrix distance:  ||T - T_phi|| / (8 sqrt(d)) <= eta <= sqrt(d)/2 * ||T - T_phi||."""
    if T.matrix.shape != T_phi.matrix.shape:
        raise ShapeError("superoperator shapes differ")
    nrm = operator_norm(T.matrix - T_phi.matrix)
    rd = np.sqrt(float(d))
    return (nrm / (8.0 * rd), 0.5 * rd * nrm)


def decay_constants(
    L: Superoperator,
    nu: float,
    tol: float = DEFAULT_PERIPHERAL_TOL,
) -> tuple[float, float]:
    """Instance-specific constants (L_lower, R_upper) such that

        L_lower * exp(-t*gap) <= eta_tr[exp(t L)] <= R_upper * exp(-t*nu)

    holds for all t >= 0, assembled from the condition number of the
    diagonalizing (or block-diagonalizing) similarity and the operator-norm
    bracket relating eta_tr to the superoperator matrix distance.
    """
    M = L.matrix
    d = L.dim
    w, V, residual, scale = _eigendata(M)
    ptol = max(tol * max(scale, 1e-30), 1e-14)
    decaying = np.abs(w.real) > ptol
    if not decaying.any():
        raise ValueError("zero gap: no decaying spectrum")
    gap = float((-w.real[decaying]).min())
    nu = float(nu)
    if not (0.0 < nu < gap):
        raise ValueError(f"nu must satisfy 0 < nu < gap ({gap:.6g}), got {nu:.6g}")
    ctol = max(1e-8 * scale, 1e-12)
    J = _jordan_index_at_gap(M, w, gap, scale, ctol)
    if J > 1:
        warnings.warn(
            f"Jordan index {J} at the gap: the polynomial factor widens the upper constant",
            stacklevel=2,
        )
    sv = np.linalg.svd(V, compute_uv=False)
    rd = np.sqrt(float(d))
    if sv[-1] > 1e-8:
        kappa = float(sv[0] / sv[-1])
        poly_sup = 1.0
    else:
        n_per = int((np.abs(w.real) <= ptol).sum())
        kappa, T22 = _peripheral_split(M, ptol, n_per)
        q = T22.shape[0]
        N22 = T22 - np.diag(np.diag(T22))
        nnorm = operator_norm(N22) if q else 0.0
        if q <= 1 or nnorm == 0.0:
            poly_sup = 1.0
        else:
            decay = gap - nu
            t_max = 3.0 * q * max(1.0, nnorm) / decay + 1.0
            ts = np.linspace(0.0, t_max, 4000)
            ks = np.arange(q)
            logterms = ks[None, :] * np.log(np.maximum(ts[:, None] * nnorm, 1e-300)) - gammaln(ks + 1)[None, :]
            Q = np.exp(logterms).sum(axis=1)
            Q[ts == 0.0] = 1.0
            poly_sup = float((Q * np.exp(-decay * ts)).max())
    L_lower = 1.0 / (8.0 * rd * kappa)
    R_upper = 0.5 * rd * kappa * poly_sup
    return (float(L_lower), float(R_upper))


def occupied_decay_rate(
    L: Superoperator,
    psi,
    tol: float = DEFAULT_PERIPHERAL_TOL,
    occupancy_tol: float = 1e-8,
) -> float:
    """Smallest |Re(lambda)| over the decaying eigenmodes of the dual that carry
    nonzero weight in the mode decomposition of the stationary state psi.

    psi must be the unique stationary state of L (asserted).  For generators
    with a unique pure fixed point the result lies between the gap and twice
    the gap.
    """
    psi = validate_state(psi, "psi")
    if psi.shape[0] != L.dim:
        raise ShapeError(f"psi must be {L.dim}x{L.dim}")
    M = L.matrix
    w, V, residual, scale = _eigendata(M)
    ktol = max(tol * max(scale, 1e-30), 1e-14)
    v_psi = vec(psi)
    if np.linalg.norm(M @ v_psi) > max(1e-8 * max(scale, 1.0), 1e-12):
        raise StateError("psi is not stationary for L")
    n_kernel = int((np.abs(w) <= ktol).sum())
    if n_kernel != 1:
        raise StateError(f"stationary state is not unique (kernel dimension {n_kernel})")
    dual = dual_superop(L)
    wd, Vd, res_d, scale_d = _eigendata(dual.matrix)
    sv = np.linalg.svd(Vd, compute_uv=False)
    if sv[-1] <= 1e-10 or sv[0] / sv[-1] > 1e10:
        raise NumericalError("ill-conditioned mode decomposition of the dual")
    coeff = np.linalg.solve(Vd, v_psi)
    cnorm = float(np.linalg.norm(coeff))
    ctol = max(1e-8 * scale_d, 1e-12)
    ptol = max(tol * max(scale_d, 1e-30), 1e-14)
    best = None
    for cl in _cluster_indices(wd, ctol):
        center = complex(np.mean(wd[cl]))
        weight = float(np.linalg.norm(coeff[cl]))
        if weight <= occupancy_tol * cnorm:
            continue
        if abs(center.real) <= ptol:
            continue
        rate = abs(center.real)
        if best is None or rate < best:
            best = rate
    if best is None:
        raise NumericalError("psi occupies no decaying mode of the dual")
    return float(best)
