"""Dense complex linear algebra on operator space.

Conventions used throughout the package:

* Vectorization is column stacking, ``vec(X) = X.flatten(order="F")``,
  so ``vec(A X B) = (B.T kron A) vec(X)``.
* A superoperator is a ``d**2 x d**2`` complex matrix acting on
  vectorized ``d x d`` operators; composition is matrix product.
* Energies are dimensionless (hbar = 1); times carry inverse-energy
  units.

All matrices are plain ``numpy`` arrays.  Hermiticity, finiteness and
PSD requirements are enforced by explicit check functions rather than
wrapper classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, TextIO, Union

import numpy as np

__all__ = [
    "HERMITICITY_RTOL",
    "STRUCTURAL_TOL",
    "PSD_SLACK",
    "EigenSystem",
    "PsdResult",
    "max_abs",
    "hermitize",
    "hermiticity_defect",
    "require_hermitian",
    "require_square",
    "hermitian_eig",
    "expm",
    "vectorize",
    "devectorize",
    "sandwich_superop",
    "commutator_superop",
    "anticommutator_superop",
    "transpose_superop_apply",
    "trace_pairing_adjoint",
    "choi_matrix",
    "is_psd",
    "hs_inner",
    "operator_norm",
    "trace_norm",
    "trace_distance",
    "image_basis",
    "matrix_to_text",
    "matrix_from_text",
    "write_matrix",
    "read_matrix",
]

# Default tolerances: structural identities are checked at 1e-10
# relative, PSD tests get 1e-9 slack, Hermiticity at 1e-12 relative.
HERMITICITY_RTOL = 1e-12
STRUCTURAL_TOL = 1e-10
PSD_SLACK = 1e-9


def max_abs(M: np.ndarray) -> float:
    """Largest absolute entry (max norm)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(M)))


def require_square(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if not (np.all(np.isfinite(M.real)) and np.all(np.isfinite(M.imag))):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def hermitize(M: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M†)/2."""
    M = np.asarray(M, dtype=complex)
    return 0.5 * (M + M.conj().T)


def hermiticity_defect(M: np.ndarray) -> float:
    """Max-norm asymmetry ||M - M†||_max."""
    M = np.asarray(M, dtype=complex)
    return max_abs(M - M.conj().T)


def require_hermitian(M: np.ndarray, name: str = "matrix",
                      rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Validate Hermiticity to ``rtol * (1 + ||M||_max)``; return M as complex.

    Raises ``ValueError`` carrying the max-asymmetry witness otherwise.
    """
    M = require_square(M, name)
    defect = hermiticity_defect(M)
    if defect > rtol * (1.0 + max_abs(M)):
        raise ValueError(
            f"{name} is not Hermitian: max asymmetry {defect:.3e} "
            f"exceeds {rtol:.1e} * (1 + max entry)")
    return M


@dataclass
class EigenSystem:
    """Spectral data of a Hermitian matrix: ascending eigenvalues and a
    unitary matrix whose columns are the eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)


def hermitian_eig(M: np.ndarray, name: str = "matrix") -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    The input is validated against the Hermiticity invariant; rejection
    carries the asymmetry witness.  The returned eigenvalues are
    ascending and the reconstruction residual ``M U - U diag(eps)`` is
    checked at 1e-10 relative.
    """
    M = require_hermitian(M, name)
    values, vectors = np.linalg.eigh(M)
    scale = 1.0 + max_abs(M)
    resid = max_abs(M @ vectors - vectors * values[None, :])
    if resid > 1e-10 * scale:
        raise ValueError(f"eigendecomposition residual {resid:.3e} too large")
    ortho = max_abs(vectors.conj().T @ vectors - np.eye(len(values)))
    if ortho > 1e-10:
        raise ValueError(f"eigenvector unitarity defect {ortho:.3e} too large")
    return EigenSystem(values=values.real, vectors=vectors)


def expm(M: np.ndarray, taylor_order: int = 18,
         scale_target: float = 0.5) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a fixed-order
    Taylor core.

    The argument is scaled by 2**s until its 1-norm is below
    ``scale_target``, the series is evaluated by Horner's rule at order
    ``taylor_order`` (remainder < 1e-22 at norm 0.5), and the result is
    squared s times.  Accurate to ~1e-12 relative for the norm ranges
    used here (dims <= 64, ||M|| <~ 1e3).
    """
    M = require_square(M, "expm argument")
    d = M.shape[0]
    norm1 = float(np.max(np.sum(np.abs(M), axis=0))) if d else 0.0
    if norm1 == 0.0:
        return np.eye(d, dtype=complex)
    n_square = max(0, int(math.ceil(math.log2(norm1 / scale_target))))
    if n_square > 64:
        raise ValueError(f"expm argument norm {norm1:.3e} too large to scale")
    B = M / (2.0 ** n_square)
    eye = np.eye(d, dtype=complex)
    acc = eye.copy()
    for k in range(taylor_order, 0, -1):
        acc = eye + (B @ acc) / k
    for _ in range(n_square):
        acc = acc @ acc
    return acc


def vectorize(X: np.ndarray) -> np.ndarray:
    """Column-stacking vec."""
    return np.asarray(X, dtype=complex).flatten(order="F")


def devectorize(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    v = np.asarray(v, dtype=complex).ravel()
    if dim is None:
        dim = math.isqrt(v.size)
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a square matrix")
    return v.reshape((dim, dim), order="F")


def sandwich_superop(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Superoperator of X -> A X B under column stacking: B.T kron A."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape[1] != B.shape[0] or A.shape[0] != B.shape[1]:
        raise ValueError(
            f"incompatible sandwich dimensions {A.shape} and {B.shape}")
    return np.kron(B.T, A)


def commutator_superop(H: np.ndarray) -> np.ndarray:
    """Superoperator of X -> H X - X H."""
    H = require_square(H, "commutator generator")
    eye = np.eye(H.shape[0], dtype=complex)
    return np.kron(eye, H) - np.kron(H.T, eye)


def anticommutator_superop(A: np.ndarray) -> np.ndarray:
    """Superoperator of X -> A X + X A."""
    A = require_square(A, "anticommutator generator")
    eye = np.eye(A.shape[0], dtype=complex)
    return np.kron(eye, A) + np.kron(A.T, eye)


def transpose_superop_apply(M: np.ndarray) -> np.ndarray:
    """Conjugation T M T of a superoperator with the transpose map
    vec(X) -> vec(X.T), done by index permutation (no matmuls)."""
    dd = M.shape[0]
    d = math.isqrt(dd)
    if d * d != dd or M.shape != (dd, dd):
        raise ValueError(f"not a superoperator shape: {M.shape}")
    M4 = M.reshape(d, d, d, d)
    return np.ascontiguousarray(M4.transpose(1, 0, 3, 2)).reshape(dd, dd)


def trace_pairing_adjoint(M: np.ndarray) -> np.ndarray:
    """Adjoint superoperator w.r.t. the bilinear trace pairing Tr(rho X).

    If S has matrix M then its trace-pairing adjoint S* with
    Tr(S*(rho) X) = Tr(rho S(X)) has matrix T M.T T, with T the
    transpose map.
    """
    return transpose_superop_apply(np.asarray(M, dtype=complex).T)


def choi_matrix(S: np.ndarray) -> np.ndarray:
    """Choi matrix C = sum_ij E_ij kron S(E_ij) of a superoperator.

    S is completely positive iff C is positive semidefinite.
    """
    dd = S.shape[0]
    d = math.isqrt(dd)
    if d * d != dd or S.shape != (dd, dd):
        raise ValueError(f"not a superoperator shape: {S.shape}")
    C = np.zeros((dd, dd), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            block = devectorize(S @ vectorize(unit), d)
            C[i * d:(i + 1) * d, j * d:(j + 1) * d] = block
    return C


class PsdResult(NamedTuple):
    ok: bool
    min_eig: float


def is_psd(M: np.ndarray, tol: float = PSD_SLACK) -> PsdResult:
    """PSD test: true iff lambda_min >= -tol * (1 + ||M||), where ||M||
    is the spectral norm.  The minimum eigenvalue witness is returned
    either way."""
    M = require_hermitian(hermitize(M), "is_psd argument", rtol=np.inf)
    eigs = np.linalg.eigvalsh(M)
    min_eig = float(eigs[0])
    norm = float(np.max(np.abs(eigs))) if len(eigs) else 0.0
    return PsdResult(ok=min_eig >= -tol * (1.0 + norm), min_eig=min_eig)


def hs_inner(A: np.ndarray, B: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr(A† B)."""
    return complex(np.vdot(A, B))


def operator_norm(M: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(np.asarray(M, dtype=complex), 2))


def trace_norm(M: np.ndarray) -> float:
    """Trace norm (sum of singular values)."""
    return float(np.sum(np.linalg.svd(np.asarray(M, dtype=complex),
                                      compute_uv=False)))


def trace_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Trace distance (1/2)||A - B||_1."""
    return 0.5 * trace_norm(np.asarray(A) - np.asarray(B))


def image_basis(P: np.ndarray, zero_tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of a projection
    superoperator, from its SVD."""
    u, s, _ = np.linalg.svd(np.asarray(P, dtype=complex))
    if s.size == 0 or s[0] == 0.0:
        return u[:, :0]
    rank = int(np.sum(s > zero_tol * s[0]))
    return u[:, :rank]


# ---------------------------------------------------------------------------
# Matrix interchange format: first line "d_rows d_cols", then row-major
# entries as "re im" pairs, whitespace separated.
# ---------------------------------------------------------------------------

def matrix_to_text(M: np.ndarray) -> str:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError(f"interchange format needs a 2-d matrix, got {M.ndim}-d")
    lines = [f"{M.shape[0]} {M.shape[1]}"]
    for row in M:
        lines.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> np.ndarray:
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("interchange text too short: missing dimension header")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise ValueError(f"bad dimension header {tokens[:2]!r}") from exc
    if rows <= 0 or cols <= 0:
        raise ValueError(f"dimensions must be positive, got {rows} x {cols}")
    need = 2 * rows * cols
    body = tokens[2:]
    if len(body) != need:
        raise ValueError(
            f"expected {need} entry tokens for {rows} x {cols}, got {len(body)}")
    try:
        vals = np.array([float(t) for t in body], dtype=float)
    except ValueError as exc:
        raise ValueError(f"non-numeric entry in matrix body: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise ValueError("matrix body contains non-finite entries")
    flat = vals[0::2] + 1j * vals[1::2]
    return flat.reshape(rows, cols)


def write_matrix(target: Union[str, TextIO], M: np.ndarray) -> None:
    text = matrix_to_text(M)
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="ascii") as fh:
            fh.write(text)


def read_matrix(source: Union[str, TextIO]) -> np.ndarray:
    if hasattr(source, "read"):
        return matrix_from_text(source.read())
    with open(source, "r", encoding="ascii") as fh:
        return matrix_from_text(fh.read())
