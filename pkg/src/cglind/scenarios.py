"""Worked scenario families and the weak-coupling error sweep.

Two model classes get specialized generator constructions that are
cross-checked against the general build:

* Sector dynamics: a complete family of mutually orthogonal projectors
  commuting with the free Hamiltonian.  The state equation couples the
  per-sector density matrices through scattering amplitudes
  D[src][dst] = V_dst L V_src built from the coarse-grained
  perturbation, with a per-sector second-order energy renormalization.

* Heat bath: a system A coupled to a finite thermal bath B through
  lam * Q kron Phi.  The bath enters only through its correlation
  spectrum - a finite comb of lines (frequency, weight) with the
  zero-frequency bin carrying the connected subtraction - and the
  frequency integrals collapse to exact sums of dissipators built from
  frequency-translated coarse-grained system operators.

The sweep compares the exact projected evolution against the
semigroup approximation over the rescaled time window [0, tau/lam^2]
and records the error table; no convergence claim is attached, since
discrete spectra cannot satisfy the continuum decay hypotheses.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .coarsegrain import CoarseGrainSchedule, T_of_lambda, coarse_grained_L, \
    pv_gaussian
from .generator import GeneratorBundle, LindbladDecomposition, build_generator, \
    steady_state
from .linalg import (
    anticommutator_superop,
    commutator_superop,
    devectorize,
    expm,
    hermitian_eig,
    hermitize,
    max_abs,
    operator_norm,
    require_hermitian,
    sandwich_superop,
    trace_distance,
    trace_pairing_adjoint,
    vectorize,
)
from .subsystem import PhysicalSubsystem, build_projection, partial_trace_family, \
    sector_family, trivial_family

__all__ = [
    "QfgrModel",
    "ScatteringOperators",
    "QfgrGenerator",
    "qfgr_generator",
    "FgrRateRow",
    "fgr_rate_check",
    "HeatBathModel",
    "CorrelationData",
    "gibbs_state",
    "bath_correlation",
    "heat_bath_generator",
    "general_heat_bath_bundle",
    "dual_path_residual",
    "GibbsRow",
    "gibbs_limit_study",
    "SweepRow",
    "SweepResult",
    "projected_error_curve",
    "weak_coupling_sweep",
    "PRESETS",
    "two_sector_qubit_model",
    "qfgr_two_block_model",
    "heat_bath_qutrit_model",
    "reference_heat_bath_model",
    "quasi_continuum_model",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


# ---------------------------------------------------------------------------
# Sector dynamics
# ---------------------------------------------------------------------------

@dataclass
class QfgrModel:
    """Block-diagonal free Hamiltonian with an arbitrary Hermitian
    perturbation on a sector decomposition."""

    sector_dims: list
    H0: np.ndarray
    Hp: np.ndarray
    schedule: CoarseGrainSchedule

    def __post_init__(self):
        self.H0 = require_hermitian(self.H0, "H0")
        self.Hp = require_hermitian(self.Hp, "Hp")
        projs = sector_family(self.sector_dims).operators
        if projs[0].shape != self.H0.shape:
            raise ValueError("sector dims do not match Hamiltonian dimension")
        worst = max(max_abs(self.H0 @ P - P @ self.H0) for P in projs)
        if worst > 1e-12 * (1.0 + max_abs(self.H0)):
            raise ValueError(
                f"H0 must commute with every sector projector: defect {worst:.3e}")


@dataclass
class ScatteringOperators:
    """Scattering amplitudes between sectors and the per-sector
    second-order Hamiltonian corrections (as they enter the effective
    sector Hamiltonians)."""

    amplitudes: Dict[Tuple[int, int], np.ndarray]
    shifts: List[np.ndarray]


@dataclass
class QfgrGenerator:
    model: QfgrModel
    subsystem: PhysicalSubsystem
    scattering: ScatteringOperators
    effective_hamiltonian: np.ndarray
    rate_sum: np.ndarray
    schrodinger: np.ndarray
    bundle: GeneratorBundle
    residual_vs_general: float


def qfgr_generator(m: QfgrModel, verify: bool = True,
                   tol: float = 1e-8) -> QfgrGenerator:
    """Coupled per-sector state equations

        d rho_a = -i [H_a + lam H'_a + lam^2 H''_a, rho_a]
                  - (lam^2/2) sum_{b != a} {D[a][b]† D[a][b], rho_a}
                  + lam^2 sum_{b != a} D[b][a] rho_b D[b][a]†,

    with D[src][dst] = V_dst L V_src.  Note the jump term uses the
    amplitudes oriented source -> destination; the transposed indexing
    sometimes written for it annihilates every block-diagonal state and
    cannot reproduce the general construction.  The assembled
    superoperator is verified against the general generator restricted
    to block-diagonal states (max entry <= tol).
    """
    projs = sector_family(m.sector_dims).operators
    sub = build_projection(sector_family(m.sector_dims))
    lam = m.schedule.lam
    lam2 = lam * lam
    T = T_of_lambda(m.schedule)
    eig = hermitian_eig(m.H0, "H0")
    L = coarse_grained_L(eig, m.Hp, T, 0.0).matrix

    n_sec = len(projs)
    amplitudes = {}
    for src in range(n_sec):
        for dst in range(n_sec):
            if src != dst:
                amplitudes[(src, dst)] = projs[dst] @ L @ projs[src]

    from .coarsegrain import lamb_shift
    shift_add = -lamb_shift(eig, m.Hp, T, sub)
    shifts = [P @ shift_add @ P for P in projs]

    h_eff = sub.project(m.H0) + lam * sub.project(m.Hp) + lam2 * shift_add
    h_eff = hermitize(h_eff)
    d = sub.dim
    rate_sum = np.zeros((d, d), dtype=complex)
    for (src, dst), D in amplitudes.items():
        rate_sum += D.conj().T @ D

    S = -1j * commutator_superop(h_eff) \
        - 0.5 * lam2 * anticommutator_superop(rate_sum)
    for D in amplitudes.values():
        S += lam2 * np.kron(D.conj(), D)

    bundle = build_generator(sub, m.H0, m.Hp, m.schedule)
    P_star = sub.schrodinger
    general_q = P_star @ bundle.schrodinger @ P_star
    residual = max_abs((S - general_q) @ P_star)
    if verify and residual > tol:
        raise ValueError(
            f"sector equations disagree with the general generator: "
            f"max entry {residual:.3e} > {tol:.1e}")
    return QfgrGenerator(model=m, subsystem=sub,
                         scattering=ScatteringOperators(amplitudes, shifts),
                         effective_hamiltonian=h_eff,
                         rate_sum=lam2 * rate_sum,
                         schrodinger=S,
                         bundle=bundle,
                         residual_vs_general=residual)


@dataclass
class FgrRateRow:
    T: float
    integral: float
    peak: float
    half_width: float


def fgr_rate_check(T_values: Sequence[float],
                   n_points: int = 200001) -> List[FgrRateRow]:
    """Nascent-delta diagnostics of the transition-rate profile
    g_T(D) = 2 sqrt(pi) T exp(-T^2 D^2) (unit coupling entry).

    For each window width: the quadrature of g_T over the line (the
    normalization tends to 2 pi), the peak value 2 sqrt(pi) T, and the
    measured half width at half maximum (proportional to 1/T).  Only
    the finite-surrogate properties are computed; the genuine delta
    limit needs a continuum of levels.
    """
    rows = []
    for T in T_values:
        if T <= 0:
            raise ValueError(f"T must be positive, got {T}")
        R = 12.0 / T
        grid = np.linspace(-R, R, n_points)
        g = 2.0 * np.sqrt(np.pi) * T * np.exp(-(T * grid) ** 2)
        integral = float(np.trapezoid(g, grid))
        peak = float(g[n_points // 2])
        half = peak / 2.0
        above = grid[g >= half]
        half_width = float(above[-1] - above[0]) / 2.0
        rows.append(FgrRateRow(T=float(T), integral=integral, peak=peak,
                               half_width=half_width))
    return rows


# ---------------------------------------------------------------------------
# Heat bath
# ---------------------------------------------------------------------------

def gibbs_state(H: np.ndarray, beta: float) -> np.ndarray:
    """Thermal state exp(-beta H) / Z (shifted exponents, so large beta
    is safe; beta = 0 gives the maximally mixed state)."""
    H = require_hermitian(H, "Hamiltonian")
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    evals, evecs = np.linalg.eigh(H)
    w = np.exp(-beta * (evals - evals.min()))
    w = w / w.sum()
    return evecs @ np.diag(w) @ evecs.conj().T


@dataclass
class HeatBathModel:
    """System A coupled to a finite bath B at inverse temperature beta
    through the interaction lam * Q kron Phi."""

    H_A: np.ndarray
    H_B: np.ndarray
    Q: np.ndarray
    Phi: np.ndarray
    beta: float
    schedule: CoarseGrainSchedule

    def __post_init__(self):
        self.H_A = require_hermitian(self.H_A, "H_A")
        self.H_B = require_hermitian(self.H_B, "H_B")
        self.Q = require_hermitian(self.Q, "Q")
        self.Phi = require_hermitian(self.Phi, "Phi")
        if self.beta < 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")

    @property
    def dim_A(self) -> int:
        return self.H_A.shape[0]

    @property
    def dim_B(self) -> int:
        return self.H_B.shape[0]

    def bath_state(self) -> np.ndarray:
        return gibbs_state(self.H_B, self.beta)

    def full_hamiltonian_parts(self):
        H0 = np.kron(self.H_A, np.eye(self.dim_B)) \
            + np.kron(np.eye(self.dim_A), self.H_B)
        Hp = np.kron(self.Q, self.Phi)
        return H0, Hp


@dataclass
class CorrelationData:
    """Bath correlation spectrum: h(t) = sum_k c_k exp(i w_k t) with
    nonnegative weights, plus the connected weights in which the
    zero-frequency bin is reduced by mean^2."""

    mean: float
    frequencies: np.ndarray
    weights: np.ndarray
    connected_weights: np.ndarray

    def h(self, t):
        t = np.asarray(t, dtype=float)
        return np.sum(self.weights[:, None]
                      * np.exp(1j * self.frequencies[:, None] * t[None, :]),
                      axis=0) if t.ndim else np.sum(
            self.weights * np.exp(1j * self.frequencies * float(t)))

    def h_connected(self, t):
        return np.sum(self.connected_weights
                      * np.exp(1j * self.frequencies * float(t)))


def bath_correlation(m: HeatBathModel,
                     merge_tol: float = 1e-10) -> CorrelationData:
    """Exact spectral decomposition of the bath correlation function in
    the bath eigenbasis: a line at every level difference e_m - e_n
    with weight p_m |Phi_mn|^2 (Gibbs population of the first index).

    Lines closer than ``merge_tol`` are merged (weight-averaged
    position); the zero bin of the connected weights is reduced by the
    squared first-order mean, which never drives it negative beyond
    roundoff.
    """
    evals, evecs = np.linalg.eigh(m.H_B)
    w = np.exp(-m.beta * (evals - evals.min()))
    pops = w / w.sum()
    Phi_eig = evecs.conj().T @ m.Phi @ evecs
    mean = float(np.sum(pops * np.diag(Phi_eig).real))

    d = m.dim_B
    freqs = []
    weights = []
    for i in range(d):
        for j in range(d):
            c = pops[i] * abs(Phi_eig[i, j]) ** 2
            freqs.append(evals[i] - evals[j])
            weights.append(c)
    freqs = np.array(freqs)
    weights = np.array(weights)

    order = np.argsort(freqs, kind="stable")
    freqs, weights = freqs[order], weights[order]
    merged_f, merged_w = [], []
    start = 0
    for k in range(1, len(freqs) + 1):
        if k == len(freqs) or freqs[k] - freqs[k - 1] > merge_tol:
            chunk_w = weights[start:k]
            chunk_f = freqs[start:k]
            total = chunk_w.sum()
            pos = float(np.average(chunk_f, weights=chunk_w)) if total > 0 \
                else float(chunk_f.mean())
            merged_f.append(pos)
            merged_w.append(float(total))
            start = k
    merged_f = np.array(merged_f)
    merged_w = np.array(merged_w)

    connected = merged_w.copy()
    zero = np.abs(merged_f) <= merge_tol
    if mean != 0.0:
        if not np.any(zero):
            merged_f = np.append(merged_f, 0.0)
            merged_w = np.append(merged_w, 0.0)
            connected = np.append(connected, 0.0)
            zero = np.abs(merged_f) <= merge_tol
        idx = int(np.argmax(zero))
        connected[idx] -= mean * mean
        if -1e-12 <= connected[idx] < 0.0:
            connected[idx] = 0.0
    return CorrelationData(mean=mean, frequencies=merged_f, weights=merged_w,
                           connected_weights=connected)


def heat_bath_generator(m: HeatBathModel) -> GeneratorBundle:
    """Specialized generator on the system algebra B(H_A).

    The finite bath makes the correlation transform a weighted comb, so
    the frequency integral becomes an exact sum over spectral lines of
    dissipators built from the frequency-translated coarse-grained
    system operators Q_w; the zero line carries the connected
    subtraction, and the inner principal-value integral reduces to the
    Gaussian Hilbert transform.  First-order term: i * mean * [Q, .].
    """
    lam = m.schedule.lam
    if lam == 0.0:
        raise ValueError("lambda must be nonzero to build the generator")
    lam2 = lam * lam
    T = T_of_lambda(m.schedule)
    corr = bath_correlation(m)
    eigA = hermitian_eig(m.H_A, "H_A")
    U, eps = eigA.vectors, eigA.values
    Q_eig = U.conj().T @ m.Q @ U
    dA = m.dim_A

    weight_scale = max(1.0, float(np.max(np.abs(corr.connected_weights))))
    decay = np.zeros((dA, dA), dtype=complex)
    jump = np.zeros((dA * dA, dA * dA), dtype=complex)
    shift_pos = np.zeros((dA, dA), dtype=complex)
    a = T * T
    pref_gap = np.exp(-0.25 * a * np.subtract.outer(eps, eps) ** 2)
    for wk, ck in zip(corr.frequencies, corr.connected_weights):
        if abs(ck) <= 1e-15 * weight_scale:
            continue
        Qw = coarse_grained_L(eigA, m.Q, T, wk).matrix
        decay += ck * (Qw.conj().T @ Qw)
        jump += ck * sandwich_superop(Qw.conj().T, Qw)
        # inner PV integral in the eigenbasis, midpoint shifted by wk
        S_pre = np.zeros((dA, dA), dtype=complex)
        for n in range(dA):
            for q in range(dA):
                col = np.conj(Q_eig[:, n]) * Q_eig[:, q]
                if not np.any(col):
                    continue
                mid = eps - 0.5 * (eps[n] + eps[q]) - wk
                S_pre[n, q] = (T / np.sqrt(np.pi)) * pref_gap[q, n] \
                    * np.sum(col * pv_gaussian(mid, a))
        shift_pos += ck * (U @ S_pre @ U.conj().T)

    decay = hermitize(decay)
    shift_add = -hermitize(shift_pos)

    sub = build_projection(trivial_family(dA))
    dec = LindbladDecomposition(
        h_free=m.H_A.astype(complex),
        h_first=lam * corr.mean * m.Q,
        h_lamb=lam2 * shift_add,
        decay=lam2 * decay,
        jump_map=lam2 * jump,
    )
    heis = 1j * commutator_superop(dec.effective_hamiltonian()) \
        - 0.5 * anticommutator_superop(dec.decay) + dec.jump_map

    eye_vec = vectorize(np.eye(dA))
    psi_dev = max_abs(devectorize(dec.jump_map @ eye_vec, dA) - dec.decay)
    if psi_dev > 1e-10 * (1.0 + max_abs(dec.decay)):
        raise ValueError(f"line-sum jump map violates Psi(1) = A: {psi_dev:.3e}")

    return GeneratorBundle(
        decomposition=dec,
        heisenberg=heis,
        schrodinger=trace_pairing_adjoint(heis),
        schedule=m.schedule,
        subsystem=sub,
        T=T,
    )


def general_heat_bath_bundle(m: HeatBathModel) -> GeneratorBundle:
    """The same model through the general construction: partial-trace
    Kraus family on the full space."""
    sub = build_projection(partial_trace_family(m.dim_A, m.bath_state()))
    H0, Hp = m.full_hamiltonian_parts()
    return build_generator(sub, H0, Hp, m.schedule)


def dual_path_residual(m: HeatBathModel,
                       general: Optional[GeneratorBundle] = None,
                       specialized: Optional[GeneratorBundle] = None) -> float:
    """Max-entry mismatch of the two derivations of the same generator,
    compared through the Heisenberg action on an operator basis of the
    embedded system algebra."""
    spec_b = specialized if specialized is not None else heat_bath_generator(m)
    gen_b = general if general is not None else general_heat_bath_bundle(m)
    dA, dB = m.dim_A, m.dim_B
    eyeB = np.eye(dB, dtype=complex)
    worst = 0.0
    for r in range(dA):
        for c in range(dA):
            E = np.zeros((dA, dA), dtype=complex)
            E[r, c] = 1.0
            lhs = devectorize(gen_b.heisenberg @ vectorize(np.kron(E, eyeB)),
                              dA * dB)
            rhs = np.kron(devectorize(spec_b.heisenberg @ vectorize(E), dA),
                          eyeB)
            worst = max(worst, max_abs(lhs - rhs))
    return worst


@dataclass
class GibbsRow:
    lam: float
    distance: float
    nullspace_dim: int
    flagged: bool


def gibbs_limit_study(m: HeatBathModel,
                      lambda_grid: Sequence[float]) -> List[GibbsRow]:
    """Steady-state distance to the system Gibbs state over a coupling
    grid, for models with vanishing first-order term (Phi traceless
    against the bath state, so the mean drops out)."""
    corr = bath_correlation(m)
    if abs(corr.mean) > 1e-10 * (1.0 + max_abs(m.Phi)):
        raise ValueError(
            f"gibbs_limit_study needs a vanishing first-order term "
            f"(Tr(sigma Phi) = {corr.mean:.3e}); choose Phi traceless "
            "against the bath state")
    target = gibbs_state(m.H_A, m.beta)
    rows = []
    for lam in lambda_grid:
        model = replace(m, schedule=replace(m.schedule, lam=lam))
        bundle = heat_bath_generator(model)
        ss = steady_state(bundle)
        if ss.state is None:
            rows.append(GibbsRow(lam=lam, distance=float("nan"),
                                 nullspace_dim=ss.nullspace_dim, flagged=True))
        else:
            rows.append(GibbsRow(lam=lam,
                                 distance=trace_distance(ss.state, target),
                                 nullspace_dim=ss.nullspace_dim,
                                 flagged=ss.flagged))
    return rows


# ---------------------------------------------------------------------------
# Weak-coupling error sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepRow:
    lam: float
    t: float
    error: float


@dataclass
class SweepResult:
    rows: List[SweepRow]
    sup_error: Dict[float, float]


def projected_error_curve(sub: PhysicalSubsystem, H0: np.ndarray,
                          Hp: np.ndarray, sched: CoarseGrainSchedule,
                          times: Sequence[float],
                          bundle: Optional[GeneratorBundle] = None
                          ) -> np.ndarray:
    """Spectral-norm difference, on the observable image, between the
    exact projected evolution P0 exp(t(Z + lam A)) P0 and the
    semigroup approximation, per time point."""
    if bundle is None:
        bundle = build_generator(sub, H0, Hp, sched)
    lam = sched.lam
    d = sub.dim
    B = sub.heisenberg_image_basis()
    k = B.shape[1]
    Bmats = [devectorize(B[:, j], d) for j in range(k)]
    g, _ = bundle.restricted_heisenberg()

    evals, evecs = np.linalg.eigh(H0 + lam * Hp)
    errors = np.empty(len(list(times)))
    for idx, t in enumerate(times):
        U = evecs @ np.diag(np.exp(1j * evals * t)) @ evecs.conj().T
        cols = np.empty((d * d, k), dtype=complex)
        for j, Xj in enumerate(Bmats):
            cols[:, j] = vectorize(U @ Xj @ U.conj().T)
        w = B.conj().T @ (sub.heisenberg @ cols)
        errors[idx] = operator_norm(w - expm(t * g))
    return errors


def weak_coupling_sweep(sub: PhysicalSubsystem, H0: np.ndarray, Hp: np.ndarray,
                        schedules: Sequence[CoarseGrainSchedule],
                        tau_bar: float, n_times: int = 41) -> SweepResult:
    """Error table of the semigroup approximation over the rescaled
    window [0, tau_bar / lam^2] for each schedule.

    The table is recorded, not asserted against: a fixed discrete model
    cannot satisfy the integrability hypotheses a genuine weak-coupling
    limit needs, so any smallness is an empirical observation about
    this model only.
    """
    if sub.dim > 32:
        raise ValueError(f"sweep needs full-space dim <= 32, got {sub.dim}")
    if n_times < 2 or tau_bar <= 0:
        raise ValueError("need tau_bar > 0 and at least two time points")
    rows: List[SweepRow] = []
    sups: Dict[float, float] = {}
    for sched in schedules:
        lam = sched.lam
        times = np.linspace(0.0, tau_bar / (lam * lam), n_times)
        errs = projected_error_curve(sub, H0, Hp, sched, times)
        for t, e in zip(times, errs):
            rows.append(SweepRow(lam=lam, t=float(t), error=float(e)))
        sups[lam] = float(np.max(errs))
    return SweepResult(rows=rows, sup_error=sups)


# ---------------------------------------------------------------------------
# Frozen model presets
# ---------------------------------------------------------------------------

def two_sector_qubit_model(lam: float = 0.5) -> QfgrModel:
    """Two one-dimensional sectors; populations follow a classical
    two-state rate equation."""
    return QfgrModel(
        sector_dims=[1, 1],
        H0=np.diag([0.3, -0.5]).astype(complex),
        Hp=np.array([[0.2, 0.7], [0.7, -0.1]], dtype=complex),
        schedule=CoarseGrainSchedule(lam=lam, xi=1.0, T_ref=1.2),
    )


def qfgr_two_block_model(lam: float = 0.35) -> QfgrModel:
    """Two two-dimensional sectors with a fixed dense perturbation."""
    Hp = np.array([
        [0.10, 0.45 + 0.20j, 0.00, 0.65 - 0.10j],
        [0.45 - 0.20j, -0.30, 0.55 + 0.30j, 0.00],
        [0.00, 0.55 - 0.30j, 0.20, 0.40 + 0.15j],
        [0.65 + 0.10j, 0.00, 0.40 - 0.15j, -0.15],
    ], dtype=complex)
    return QfgrModel(
        sector_dims=[2, 2],
        H0=np.diag([0.0, 0.25, 0.8, 1.05]).astype(complex),
        Hp=Hp,
        schedule=CoarseGrainSchedule(lam=lam, xi=0.8, T_ref=0.9),
    )


def heat_bath_qutrit_model(lam: float = 0.45) -> HeatBathModel:
    """Qubit system, three-level bath, generic couplings."""
    return HeatBathModel(
        H_A=np.array([[0.7, 0.15], [0.15, -0.7]], dtype=complex),
        H_B=np.diag([0.0, 0.9, 1.7]).astype(complex),
        Q=np.array([[0.3, 1.0], [1.0, -0.3]], dtype=complex),
        Phi=np.array([[0.0, 0.8, 0.2],
                      [0.8, 0.1, 0.7],
                      [0.2, 0.7, -0.1]], dtype=complex),
        beta=1.0,
        schedule=CoarseGrainSchedule(lam=lam, xi=1.0, T_ref=1.0),
    )


def reference_heat_bath_model(lam: float = 0.3) -> HeatBathModel:
    """Reference thermalization model: qubit + four-level bath with all
    bath levels coupled and no first-order term (Phi has zero
    diagonal).

    The coupling weights are frozen so that the finite-coupling steady
    states approach the system Gibbs state from above: the 0 <-> 2.4
    pair is damped and the 0.7 <-> 2.4 pair boosted, which keeps the
    line mixture at larger couplings on the far side of the
    asymptotic detailed-balance point set by the 1.9 line.
    """
    phi = np.array([
        [0.0, 1.0, 1.0, 0.15],
        [1.0, 0.0, 1.0, 1.5],
        [1.0, 1.0, 0.0, 1.0],
        [0.15, 1.5, 1.0, 0.0],
    ], dtype=complex)
    return HeatBathModel(
        H_A=SIGMA_Z.copy(),
        H_B=np.diag([0.0, 0.7, 1.9, 2.4]).astype(complex),
        Q=SIGMA_X.copy(),
        Phi=phi,
        beta=1.0,
        schedule=CoarseGrainSchedule(lam=lam, xi=1.0, T_ref=1.0),
    )


QUASI_CONTINUUM_TAU_BAR = 0.2


def quasi_continuum_model(lam: float = 0.2) -> HeatBathModel:
    """Qubit + 16-level quasi-continuum bath: equally spaced levels with
    a smooth Gaussian coupling profile and no first-order term.  The
    parameters are frozen so the recorded error table is reproducible."""
    n = 16
    spacing = 0.1
    levels = spacing * np.arange(n)
    phi = np.zeros((n, n), dtype=complex)
    width = 0.4
    for i in range(n):
        for j in range(n):
            if i != j:
                phi[i, j] = np.exp(-((levels[i] - levels[j]) ** 2)
                                   / (2.0 * width * width))
    return HeatBathModel(
        H_A=0.4 * SIGMA_Z,
        H_B=np.diag(levels).astype(complex),
        Q=SIGMA_X.copy(),
        Phi=phi,
        beta=1.0,
        schedule=CoarseGrainSchedule(lam=lam, xi=1.0, T_ref=1.0),
    )


@dataclass
class Preset:
    name: str
    kind: str
    builder: object
    doc: str
    tau_bar: Optional[float] = None


PRESETS: Dict[str, Preset] = {
    "two-sector-qubit": Preset(
        "two-sector-qubit", "qfgr", two_sector_qubit_model,
        "two one-dimensional sectors; classical rate-equation limit"),
    "qfgr-two-blocks": Preset(
        "qfgr-two-blocks", "qfgr", qfgr_two_block_model,
        "two two-dimensional sectors, dense perturbation"),
    "heat-bath-qutrit": Preset(
        "heat-bath-qutrit", "heat_bath", heat_bath_qutrit_model,
        "qubit + 3-level bath, generic couplings"),
    "qubit-gibbs": Preset(
        "qubit-gibbs", "heat_bath", reference_heat_bath_model,
        "qubit + 4-level bath thermalization reference model"),
    "quasi-continuum": Preset(
        "quasi-continuum", "heat_bath", quasi_continuum_model,
        "qubit + 16-level quasi-continuum bath for the error sweep",
        tau_bar=QUASI_CONTINUUM_TAU_BAR),
}
