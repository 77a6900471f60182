"""Assembly of the second-order Markovian generator on a physical
subsystem, its time-domain quadrature oracle, state propagation, and
semigroup certificates.

The Heisenberg generator built here has the standard dissipative form

    G(X) = i [H_eff, X] - (1/2) {A, X} + Psi(X),

with H_eff = <H0> + lam <H'> + lam^2 * (frequency-integral shift),
A = lam^2 <W^2>, Psi(X) = lam^2 <W X W> and W = L - <L> the centered
coarse-grained perturbation at frequency zero.  Psi(1) = A holds by
construction, so exp(t G) is completely positive and unital on the
full operator space; on the subsystem image it coincides with the
projected weak-coupling semigroup exp((Z0 + lam A00 + lam^2 K_T) t).

The generator is represented on the full d x d operator space but is
only contractual on the subsystem image; the Schrödinger flow used for
states is the image-restricted (quotient) action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson

from .coarsegrain import CoarseGrainSchedule, T_of_lambda, coarse_grained_L, \
    lamb_shift
from .linalg import (
    anticommutator_superop,
    choi_matrix,
    commutator_superop,
    devectorize,
    expm,
    hermitian_eig,
    hermitize,
    is_psd,
    matrix_to_text,
    max_abs,
    operator_norm,
    require_hermitian,
    sandwich_superop,
    trace_norm,
    trace_pairing_adjoint,
    vectorize,
)
from .subsystem import PhysicalSubsystem

__all__ = [
    "LindbladDecomposition",
    "GeneratorBundle",
    "Trajectory",
    "QdsCertificate",
    "SteadyStateResult",
    "assemble_kt",
    "build_generator",
    "k_t_oracle",
    "evolve",
    "qds_certificate",
    "steady_state",
    "export_bundle",
]


@dataclass
class LindbladDecomposition:
    """Pieces of the generator: free and first-order Hamiltonians, the
    second-order Hamiltonian shift, the decay operator A = Psi(1), and
    the completely positive jump map Psi as a superoperator."""

    h_free: np.ndarray
    h_first: np.ndarray
    h_lamb: np.ndarray
    decay: np.ndarray
    jump_map: np.ndarray

    def effective_hamiltonian(self) -> np.ndarray:
        return self.h_free + self.h_first + self.h_lamb


@dataclass
class GeneratorBundle:
    decomposition: LindbladDecomposition
    heisenberg: np.ndarray
    schrodinger: np.ndarray
    schedule: CoarseGrainSchedule
    subsystem: PhysicalSubsystem
    T: float
    _quotient_schrodinger: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.subsystem.dim

    def in_image(self, X: np.ndarray, tol: float = 1e-9) -> bool:
        return self.subsystem.in_image(X, tol)

    def quotient_schrodinger(self) -> np.ndarray:
        """Schrödinger generator compressed to the predual image: the
        full dual leaks out of the image in general, and only the
        re-projected action is contractual."""
        if self._quotient_schrodinger is None:
            P = self.subsystem.schrodinger
            self._quotient_schrodinger = P @ self.schrodinger @ P
        return self._quotient_schrodinger

    def restricted_heisenberg(self):
        """(k x k matrix, basis) of the generator on an orthonormal basis
        of the observable image.  No re-projection is needed: the
        Heisenberg generator maps the image into itself exactly."""
        B = self.subsystem.heisenberg_image_basis()
        return B.conj().T @ self.heisenberg @ B, B

    def restricted_schrodinger(self):
        """(k x k matrix, basis) of the quotient Schrödinger generator on
        an orthonormal basis of the state image."""
        B = self.subsystem.schrodinger_image_basis()
        P = self.subsystem.schrodinger
        return B.conj().T @ P @ self.schrodinger @ B, B


def assemble_kt(sub: PhysicalSubsystem, h0_eig, Hp: np.ndarray, T: float):
    """Second-order superoperator K_T (no coupling factors) together
    with its pieces (hamiltonian shift, decay, jump map).

    The frequency-integral shift enters the effective Hamiltonian with
    a minus sign: expanding the ordered double integral against the odd
    1/w kernel, the even sandwich terms cancel in the principal value
    and the surviving commutator is -i [shift, X].  The returned
    ``shift`` is the additive Hamiltonian piece (minus the positive PV
    integral), so K = i[shift, .] - (1/2){decay, .} + jump.  The
    time-domain oracle pins this sign.
    """
    L0 = coarse_grained_L(h0_eig, Hp, T, 0.0).matrix
    W = L0 - sub.project(L0)
    decay = hermitize(sub.project(W @ W))
    jump = sub.heisenberg @ sandwich_superop(W, W)
    shift = -lamb_shift(h0_eig, Hp, T, sub)
    K = 1j * commutator_superop(shift) \
        - 0.5 * anticommutator_superop(decay) + jump
    return K, shift, decay, jump


def build_generator(sub: PhysicalSubsystem, H0: np.ndarray, Hp: np.ndarray,
                    sched: CoarseGrainSchedule,
                    comm_tol: float = 1e-10) -> GeneratorBundle:
    """Build the full generator bundle for a subsystem and a split
    Hamiltonian H0 + lam H'.

    Preconditions: H0 and H' Hermitian, lam nonzero, and the free
    commutator superoperator must commute with the projection (the
    construction needs a covariant projection); violation is rejected
    with the commutator-norm witness.
    """
    H0 = require_hermitian(H0, "H0")
    Hp = require_hermitian(Hp, "Hp")
    lam = sched.lam
    if lam == 0.0:
        raise ValueError("lambda must be nonzero to build the generator")
    Z = 1j * commutator_superop(H0)
    comm_dev = max_abs(Z @ sub.heisenberg - sub.heisenberg @ Z)
    if comm_dev > comm_tol * (1.0 + max_abs(H0)):
        raise ValueError(
            "free evolution does not commute with the projection: "
            f"||[Z, P0]||_max = {comm_dev:.3e}")

    T = T_of_lambda(sched)
    h0_eig = hermitian_eig(H0, "H0")
    _, shift, decay, jump = assemble_kt(sub, h0_eig, Hp, T)
    lam2 = lam * lam
    dec = LindbladDecomposition(
        h_free=hermitize(sub.project(H0)),
        h_first=lam * hermitize(sub.project(Hp)),
        h_lamb=lam2 * shift,
        decay=lam2 * decay,
        jump_map=lam2 * jump,
    )
    heis = 1j * commutator_superop(dec.effective_hamiltonian()) \
        - 0.5 * anticommutator_superop(dec.decay) + dec.jump_map

    d = sub.dim
    eye_vec = vectorize(np.eye(d))
    scale = 1.0 + max_abs(dec.decay)
    psi_unit_dev = max_abs(devectorize(dec.jump_map @ eye_vec, d) - dec.decay)
    if psi_unit_dev > 1e-10 * scale:
        raise ValueError(f"jump map violates Psi(1) = A: defect {psi_unit_dev:.3e}")
    unital_dev = max_abs(heis @ eye_vec)
    if unital_dev > 1e-10 * (1.0 + max_abs(heis)):
        raise ValueError(f"generator is not unital: ||G(1)||_max = {unital_dev:.3e}")

    return GeneratorBundle(
        decomposition=dec,
        heisenberg=heis,
        schrodinger=trace_pairing_adjoint(heis),
        schedule=sched,
        subsystem=sub,
        T=T,
    )


def k_t_oracle(sub: PhysicalSubsystem, H0: np.ndarray, Hp: np.ndarray,
               T: float, n_points: int = 1601,
               half_width: float = 8.0) -> np.ndarray:
    """Brute-force K_T by double time quadrature of the defining
    ordered integral

        (1 / (sqrt(pi) T)) int dt1 w(t1) A01(t1) int_{-inf}^{t1} dt2
                                w(t2) A10(t2),

    with w(t) = exp(-t^2 / 2 T^2) and A_ij(t) the projected interaction
    derivations in the free interaction picture.  Truncated at
    |t| <= half_width * T on a uniform grid; the inner cumulative
    integral uses Simpson's rule (the mid-domain error of a cumulative
    trapezoid is O(h^2) and would dominate the 1e-6 budget), the outer
    integral the trapezoid rule, which is spectrally accurate for the
    Gaussian-localized integrand.

    Returns the superoperator on the subsystem image (it annihilates
    the complement by construction).  Desk-scale only: dims above 12
    are rejected.
    """
    if T <= 0.0:
        raise ValueError(f"window width T must be positive, got {T}")
    H0 = require_hermitian(H0, "H0")
    Hp = require_hermitian(Hp, "Hp")
    d = sub.dim
    if d > 12:
        raise ValueError(f"time-domain oracle is desk-scale only (d <= 12), got {d}")

    eig = hermitian_eig(H0, "H0")
    U, eps = eig.vectors, eig.values
    Hp_eig = U.conj().T @ Hp @ U
    delta = np.subtract.outer(eps, eps)
    P0 = sub.heisenberg
    P1 = np.eye(d * d, dtype=complex) - P0

    ts = np.linspace(-half_width * T, half_width * T, n_points)
    h = ts[1] - ts[0]
    weights = np.exp(-ts ** 2 / (2.0 * T * T))

    dd = d * d
    M01 = np.empty((n_points, dd, dd), dtype=complex)
    F10 = np.empty((n_points, dd, dd), dtype=complex)
    for k, t in enumerate(ts):
        Hp_t = U @ (np.exp(-1j * delta * t) * Hp_eig) @ U.conj().T
        comm = 1j * commutator_superop(Hp_t)
        M01[k] = P0 @ comm @ P1
        F10[k] = weights[k] * (P1 @ comm @ P0)

    cum = cumulative_simpson(F10.real, dx=h, axis=0, initial=0) \
        + 1j * cumulative_simpson(F10.imag, dx=h, axis=0, initial=0)

    K = np.zeros((dd, dd), dtype=complex)
    for k in range(n_points):
        coeff = h if 0 < k < n_points - 1 else 0.5 * h
        K += coeff * weights[k] * (M01[k] @ cum[k])
    return K / (np.sqrt(np.pi) * T)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    trace_dev: np.ndarray
    min_eig: np.ndarray
    picture: str
    flags: list

    @property
    def max_trace_dev(self) -> float:
        return float(np.max(self.trace_dev)) if len(self.trace_dev) else 0.0

    @property
    def min_state_eig(self) -> float:
        return float(np.min(self.min_eig)) if len(self.min_eig) else 0.0


def evolve(bundle: GeneratorBundle, state0: np.ndarray, times: Sequence[float],
           picture: str = "schrodinger") -> Trajectory:
    """Propagate an initial operator along exp(t * generator).

    In the Schrödinger picture the initial state must be a density
    matrix in the predual image; evolution uses the image-restricted
    (quotient) generator, so trajectories stay representable on the
    subsystem.  Trace deviation and the minimum eigenvalue are recorded
    at every sampled time.  Negative times are evaluable but flagged.
    """
    times = np.asarray(list(times), dtype=float)
    flags = []
    if np.any(times < 0):
        flags.append("negative times requested; semigroup formula evaluated anyway")
    d = bundle.dim
    state0 = np.asarray(state0, dtype=complex)

    if picture == "schrodinger":
        require_hermitian(state0, "initial state", rtol=1e-10)
        if abs(np.trace(state0).real - 1.0) > 1e-9:
            raise ValueError(f"initial state trace {np.trace(state0).real!r} != 1")
        if not bundle.subsystem.state_in_image(state0, tol=1e-8):
            raise ValueError("initial state is outside the subsystem image")
        gen = bundle.quotient_schrodinger()
    elif picture == "heisenberg":
        gen = bundle.heisenberg
    else:
        raise ValueError(f"picture must be 'schrodinger' or 'heisenberg', got {picture!r}")

    v0 = vectorize(state0)
    states, tdev, mineig = [], [], []
    for t in times:
        X = devectorize(expm(t * gen) @ v0, d)
        states.append(X)
        tdev.append(abs(np.trace(X).real - np.trace(state0).real)
                    + abs(np.trace(X).imag))
        mineig.append(float(np.linalg.eigvalsh(hermitize(X))[0]))
    return Trajectory(times=times, states=states,
                      trace_dev=np.array(tdev), min_eig=np.array(mineig),
                      picture=picture, flags=flags)


@dataclass
class QdsCertificate:
    times: np.ndarray
    choi_min_eig: np.ndarray
    unitality_dev: np.ndarray
    trace_preservation_dev: np.ndarray
    restricted_heis_norm: np.ndarray
    semigroup_dev: float
    trace_norm_growth: float
    choi_slack: float
    passed: bool


def qds_certificate(bundle: GeneratorBundle,
                    time_samples: Sequence[float] = (0.1, 1.0, 10.0, 100.0),
                    rng=0, n_state_samples: int = 3,
                    choi_slack: float = 1e-9) -> QdsCertificate:
    """Certify semigroup properties at sampled times.

    Per time t: the Choi matrix of the Schrödinger propagator must be
    PSD within ``choi_slack``; the Heisenberg propagator must fix the
    identity (residual <= 1e-10) and its dual must preserve the trace
    functional (<= 1e-9).  The composition law exp((s+t)G) =
    exp(sG) exp(tG) is checked on all sample pairs (<= 1e-9), and the
    trace norm of evolved sampled states must not grow by more than
    1e-9.  The spectral norm of the image-restricted Heisenberg
    propagator is reported (not asserted; it is a Hilbert-Schmidt
    proxy, not the algebra norm).
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    times = np.asarray(list(time_samples), dtype=float)
    d = bundle.dim
    eye_vec = vectorize(np.eye(d))

    g_restricted, _ = bundle.restricted_heisenberg()
    quotient = bundle.quotient_schrodinger()

    schr_props = {}
    choi_min, unit_dev, tp_dev, rnorm = [], [], [], []
    for t in times:
        prop_s = expm(t * bundle.schrodinger)
        schr_props[float(t)] = prop_s
        choi_min.append(is_psd(choi_matrix(prop_s), tol=choi_slack).min_eig)
        prop_h = expm(t * bundle.heisenberg)
        unit_dev.append(max_abs(prop_h @ eye_vec - eye_vec))
        tp_dev.append(max_abs(eye_vec.conj() @ prop_s - eye_vec.conj()))
        rnorm.append(operator_norm(expm(t * g_restricted)))

    semi_dev = 0.0
    for i, s in enumerate(times):
        for t in times[i:]:
            lhs = expm((s + t) * bundle.schrodinger)
            rhs = schr_props[float(s)] @ schr_props[float(t)]
            semi_dev = max(semi_dev, max_abs(lhs - rhs))

    growth = 0.0
    for _ in range(n_state_samples):
        G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        rho = bundle.subsystem.project_state(G @ G.conj().T)
        rho = hermitize(rho) / np.trace(rho).real
        base = trace_norm(rho)
        for t in times:
            evolved = devectorize(expm(t * quotient) @ vectorize(rho), d)
            growth = max(growth, trace_norm(evolved) - base)

    choi_min = np.array(choi_min)
    unit_dev = np.array(unit_dev)
    tp_dev = np.array(tp_dev)
    passed = bool(
        np.all(choi_min >= -choi_slack * (1.0 + d))
        and np.all(unit_dev <= 1e-10)
        and np.all(tp_dev <= 1e-9)
        and semi_dev <= 1e-9
        and growth <= 1e-9
    )
    return QdsCertificate(times=times, choi_min_eig=choi_min,
                          unitality_dev=unit_dev,
                          trace_preservation_dev=tp_dev,
                          restricted_heis_norm=np.array(rnorm),
                          semigroup_dev=semi_dev,
                          trace_norm_growth=growth,
                          choi_slack=choi_slack,
                          passed=passed)


@dataclass
class SteadyStateResult:
    state: Optional[np.ndarray]
    nullspace_dim: int
    gap: float
    flagged: bool
    note: str = ""


def steady_state(bundle: GeneratorBundle, zero_tol: float = 1e-9,
                 gap_tol: float = 1e-6) -> SteadyStateResult:
    """Nullspace of the image-restricted Schrödinger generator,
    intersected with trace-one Hermitian PSD operators.

    Reports the nullspace dimension; when it is one, the unique state
    is returned trace-normalized.  An ambiguous singular-value gap or a
    multi-dimensional nullspace is flagged rather than resolved.
    """
    s, B = bundle.restricted_schrodinger()
    _, svals, vh = np.linalg.svd(s)
    smax = float(svals[0]) if svals.size else 0.0
    if smax == 0.0:
        null_mask = np.ones(len(svals), dtype=bool)
    else:
        null_mask = svals < zero_tol * smax
    dim_null = int(np.sum(null_mask))
    if dim_null == 0:
        return SteadyStateResult(None, 0, 0.0, True,
                                 note="no nullspace found at tolerance")
    if smax == 0.0 or dim_null == len(svals):
        gap = np.inf
    else:
        gap = float(svals[~null_mask].min() / smax) \
            - float(svals[null_mask].max() / smax)
    flagged = gap < gap_tol or dim_null > 1
    if dim_null > 1:
        return SteadyStateResult(None, dim_null, gap, True,
                                 note="nullspace is not one-dimensional")

    vec_img = vh[-1, :].conj()
    rho = devectorize(B @ vec_img, bundle.dim)
    rho = hermitize(rho)
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        return SteadyStateResult(None, 1, gap, True,
                                 note="null vector is traceless; cannot normalize")
    rho = rho / tr
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    note = ""
    if min_eig < -1e-9:
        flagged = True
        note = f"normalized null state not PSD (min eig {min_eig:.3e})"
    return SteadyStateResult(rho, 1, gap, flagged, note=note)


def export_bundle(bundle: GeneratorBundle, directory) -> None:
    """Write the Lindblad pieces as interchange-format matrices plus a
    plain-text manifest (schedule, dims, subsystem descriptor)."""
    import os

    os.makedirs(directory, exist_ok=True)
    dec = bundle.decomposition
    pieces = {
        "h_free.mat": dec.h_free,
        "h_first.mat": dec.h_first,
        "h_lamb.mat": dec.h_lamb,
        "decay.mat": dec.decay,
        "jump_map.mat": dec.jump_map,
        "heisenberg.mat": bundle.heisenberg,
        "schrodinger.mat": bundle.schrodinger,
    }
    for name, M in pieces.items():
        with open(os.path.join(directory, name), "w", encoding="ascii") as fh:
            fh.write(matrix_to_text(M))
    sched = bundle.schedule
    lines = [
        f"dim = {bundle.dim}",
        f"lambda = {sched.lam:.17g}",
        f"xi = {sched.xi:.17g}",
        f"T_ref = {sched.T_ref:.17g}",
        f"T = {bundle.T:.17g}",
        f"kraus_count = {len(bundle.subsystem.kraus.operators)}",
        f"commutant_dim = {bundle.subsystem.commutant_info.dimension}",
        "pieces = h_free h_first h_lamb decay jump_map heisenberg schrodinger",
    ]
    with open(os.path.join(directory, "manifest.txt"), "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    from .subsystem import kraus_to_text
    with open(os.path.join(directory, "kraus.mat"), "w", encoding="ascii") as fh:
        fh.write(kraus_to_text(bundle.subsystem.kraus))
