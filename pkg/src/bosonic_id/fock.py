"""Truncated-Fock-space linear algebra.

Operators on the span of the first ``dim`` number states are plain complex
numpy matrices; density operators and binary POVM elements get thin wrapper
classes that enforce their defining constraints at construction time.

All entropies are in bits (log base two).  Rate bookkeeping that needs
natural-base exponentials (the binning machinery in :mod:`bosonic_id.idcode`)
converts at its own boundary via ``LN2 = log(2)``.
"""

from dataclasses import dataclass

import numpy as np

LN2 = float(np.log(2.0))

HERMITICITY_TOL = 1e-10
EIGENVALUE_TOL = 1e-10
TRACE_TOL = 1e-8
ENTROPY_EIG_FLOOR = 1e-15  # double-precision noise floor after eigh

# tensor() refuses to materialize anything bigger than this
TENSOR_DIM_CAP = 10_000


class FockSpaceError(ValueError):
    """Invalid operator handed to a Fock-space routine."""


def _as_square_complex(mat) -> np.ndarray:
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise FockSpaceError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise FockSpaceError("matrix has non-finite entries")
    return a


def hermiticity_defect(op: np.ndarray) -> float:
    return float(np.max(np.abs(op - op.conj().T))) if op.size else 0.0


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian PSD matrix of (approximately) unit trace on dim Fock levels.

    ``renormalized`` marks states whose truncated tail was folded back in;
    ``mass_loss`` marks states that lost noticeable trace to the cutoff and
    were left subnormalized.
    """

    mat: np.ndarray
    renormalized: bool = False
    mass_loss: bool = False

    def __post_init__(self):
        m = _as_square_complex(self.mat)
        defect = hermiticity_defect(m)
        if defect > HERMITICITY_TOL:
            raise FockSpaceError(f"density matrix not Hermitian: defect {defect:.3e}")
        tr = float(np.real(np.trace(m)))
        if tr > 1.0 + TRACE_TOL:
            raise FockSpaceError(f"density matrix trace {tr} exceeds 1")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.mat)))

    @property
    def subnormalized(self) -> bool:
        return self.trace < 1.0 - TRACE_TOL


@dataclass(frozen=True)
class BinaryPovm:
    """Accept/reject measurement; ``accept`` must satisfy 0 <= accept <= 1."""

    accept: np.ndarray

    def __post_init__(self):
        a = _as_square_complex(self.accept)
        defect = hermiticity_defect(a)
        if defect > HERMITICITY_TOL:
            raise FockSpaceError(f"POVM element not Hermitian: defect {defect:.3e}")
        w = np.linalg.eigvalsh(a)
        if w[0] < -EIGENVALUE_TOL or w[-1] > 1.0 + EIGENVALUE_TOL:
            raise FockSpaceError(
                f"POVM eigenvalues outside [0,1]: min {w[0]:.3e}, max {w[-1]:.3e}"
            )
        a.setflags(write=False)
        object.__setattr__(self, "accept", a)

    @property
    def dim(self) -> int:
        return self.accept.shape[0]


def hermitian_eig(op: np.ndarray):
    """Eigendecompose a Hermitian matrix.

    Returns (eigenvalues descending, eigenvector columns in matching order).
    """
    a = _as_square_complex(op)
    defect = hermiticity_defect(a)
    if defect > HERMITICITY_TOL:
        raise FockSpaceError(f"matrix not Hermitian: defect {defect:.3e}")
    vals, vecs = np.linalg.eigh(a)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def von_neumann_entropy(rho: DensityOperator) -> float:
    """Entropy -tr(rho log2 rho) in bits; eigenvalues below the floor count 0."""
    vals, _ = hermitian_eig(rho.mat)
    worst = float(vals[-1])
    if worst < -EIGENVALUE_TOL:
        raise FockSpaceError(f"negative eigenvalue {worst:.3e} beyond tolerance")
    kept = vals[vals > ENTROPY_EIG_FLOOR]
    return float(-np.sum(kept * np.log2(kept)))


def trace_norm(a) -> float:
    """Trace norm: sum of singular values."""
    m = _as_square_complex(a)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def tensor(a, b) -> np.ndarray:
    """Kronecker product with a guard against runaway dimensions."""
    am = _as_square_complex(a)
    bm = _as_square_complex(b)
    if am.shape[0] * bm.shape[0] > TENSOR_DIM_CAP:
        raise FockSpaceError(
            f"tensor dim {am.shape[0] * bm.shape[0]} exceeds cap {TENSOR_DIM_CAP}; "
            "n-fold products are handled implicitly elsewhere"
        )
    return np.kron(am, bm)


def povm_probability(povm: BinaryPovm, rho: DensityOperator) -> float:
    """Acceptance probability tr(accept * rho), clamped to [0, 1]."""
    if povm.dim != rho.dim:
        raise FockSpaceError(f"dimension mismatch: POVM {povm.dim}, state {rho.dim}")
    p = float(np.real(np.trace(povm.accept @ rho.mat)))
    if p < -EIGENVALUE_TOL or p > 1.0 + EIGENVALUE_TOL:
        raise FockSpaceError(f"probability {p} outside tolerance window")
    return min(max(p, 0.0), 1.0)


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def mean_photon_number(rho: DensityOperator) -> float:
    return float(np.real(np.trace(number_operator(rho.dim) @ rho.mat)))


def fock_projector(dim: int, levels: int) -> np.ndarray:
    """Projector keeping the lowest ``levels`` number states of a dim-space."""
    if not 0 <= levels <= dim:
        raise FockSpaceError(f"levels {levels} outside [0, {dim}]")
    d = np.zeros(dim)
    d[:levels] = 1.0
    return np.diag(d).astype(complex)
