"""Order relations between Hermitian matrices.

Three nested orders: the Loewner order (difference is PSD), entrywise
dominance of descending eigenvalue vectors, and weak majorization of the
eigenvalue partial sums.  Also the top-k frame bound and the Ky Fan
dominance scan tying weak majorization to the Ky Fan norm family.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import DimMismatch, NotOrthonormal, NotPSD
from .matcore import HermitianMatrix, NormSpec, eig

DEFAULT_TOL = 1e-9
FRAME_ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class OrderVerdict:
    """Outcome of a single order comparison.

    margin is signed: the smallest eigenvalue of the gap (Loewner) or the
    smallest entrywise surplus (dominance).  holds is margin >= -tol * scale
    with scale = max(1, magnitude of the operands).
    """

    holds: bool
    margin: float
    witness: object | None = None

    def to_jsonable(self) -> dict:
        out = {"holds": self.holds, "margin": self.margin}
        if self.witness is not None:
            w = self.witness
            out["witness"] = w.tolist() if isinstance(w, np.ndarray) else w
        return out


@dataclass(frozen=True)
class MajorizationReport:
    """Partial-sum comparison of two descending eigenvalue vectors."""

    partial_sums_a: np.ndarray
    partial_sums_b: np.ndarray
    deficits: np.ndarray
    holds: bool

    @property
    def min_deficit(self) -> float:
        return float(np.min(self.deficits))

    def to_jsonable(self) -> dict:
        return {
            "holds": self.holds,
            "margin": self.min_deficit,
            "deficits": self.deficits.tolist(),
            "partial_sums_a": self.partial_sums_a.tolist(),
            "partial_sums_b": self.partial_sums_b.tolist(),
        }


def _check_same_dim(a: HermitianMatrix, b: HermitianMatrix):
    if a.dim != b.dim:
        raise DimMismatch(f"dimensions differ: {a.dim} vs {b.dim}")


def loewner_leq(a: HermitianMatrix, b: HermitianMatrix, tol: float = DEFAULT_TOL) -> OrderVerdict:
    """Is a <= b in the Loewner order, i.e. is b - a PSD up to tolerance?"""
    _check_same_dim(a, b)
    gap = eig(b - a)
    margin = float(gap.values[-1])
    scale = max(1.0, gap.spectral_radius)
    holds = margin >= -tol * scale
    witness = None if holds else gap.vectors[:, -1]
    return OrderVerdict(holds=holds, margin=margin, witness=witness)


def eigen_dominance(a: HermitianMatrix, b: HermitianMatrix, tol: float = DEFAULT_TOL) -> OrderVerdict:
    """Is lambda_j(a) <= lambda_j(b) for every j (descending order)?"""
    _check_same_dim(a, b)
    la, lb = eig(a).values, eig(b).values
    gaps = lb - la
    j = int(np.argmin(gaps))
    margin = float(gaps[j])
    scale = max(1.0, float(np.max(np.abs(la))), float(np.max(np.abs(lb))))
    holds = margin >= -tol * scale
    return OrderVerdict(holds=holds, margin=margin, witness=None if holds else j)


def weak_majorization(a: HermitianMatrix, b: HermitianMatrix, tol: float = DEFAULT_TOL) -> MajorizationReport:
    """Compare all top-k eigenvalue partial sums of a against b."""
    _check_same_dim(a, b)
    psa = np.cumsum(eig(a).values)
    psb = np.cumsum(eig(b).values)
    deficits = psb - psa
    scale = max(1.0, float(np.max(np.abs(psa))), float(np.max(np.abs(psb))))
    holds = bool(np.min(deficits) >= -tol * scale)
    for arr in (psa, psb, deficits):
        arr.flags.writeable = False
    return MajorizationReport(partial_sums_a=psa, partial_sums_b=psb, deficits=deficits, holds=holds)


def unitary_witness(a: HermitianMatrix, b: HermitianMatrix, tol: float = DEFAULT_TOL) -> np.ndarray | None:
    """A unitary U with a <= U* b U, or None when eigenvalue dominance fails.

    Pairing eigenvectors by descending eigenvalue gives U = V_b V_a*; then
    U* b U = V_a diag(lambda(b)) V_a*, which dominates a exactly when the
    sorted eigenvalues do.  Any orthonormal choice inside degenerate
    eigenspaces works since only the sorted values matter.
    """
    _check_same_dim(a, b)
    if not eigen_dominance(a, b, tol).holds:
        return None
    va = eig(a).vectors
    vb = eig(b).vectors
    return vb @ va.conj().T


def top_k_frame_sum(h: HermitianMatrix, frame: np.ndarray) -> float:
    """Sum of quadratic forms <H x_j, x_j> over an orthonormal frame.

    Never exceeds the sum of the k largest eigenvalues of H (maximum
    principle); the frame must be orthonormal within FRAME_ORTHO_TOL.
    """
    frame = np.asarray(frame, dtype=complex)
    if frame.ndim == 1:
        frame = frame[:, None]
    if frame.shape[0] != h.dim:
        raise DimMismatch(f"frame vectors have length {frame.shape[0]}, expected {h.dim}")
    gram_err = float(np.max(np.abs(frame.conj().T @ frame - np.eye(frame.shape[1]))))
    if gram_err > FRAME_ORTHO_TOL:
        raise NotOrthonormal(f"frame Gram error {gram_err:.3e} exceeds {FRAME_ORTHO_TOL:.0e}")
    return float(np.trace(frame.conj().T @ h.entries @ frame).real)


@dataclass(frozen=True)
class KyFanScanReport:
    """Per-k agreement between weak majorization and Ky Fan norm ordering."""

    majorization: MajorizationReport
    norm_margins: np.ndarray
    agreement: np.ndarray = field(repr=False)

    @property
    def agree(self) -> bool:
        return bool(np.all(self.agreement))

    def to_jsonable(self) -> dict:
        return {
            "majorization": self.majorization.to_jsonable(),
            "norm_margins": self.norm_margins.tolist(),
            "agree": self.agree,
        }


def ky_fan_dominance_scan(a: HermitianMatrix, b: HermitianMatrix, tol: float = DEFAULT_TOL) -> KyFanScanReport:
    """For PSD inputs, check that each top-k partial-sum verdict matches the
    corresponding Ky Fan norm comparison (they must, since eigenvalues are
    the singular values)."""
    _check_same_dim(a, b)
    for label, m in (("first", a), ("second", b)):
        lam_min = float(eig(m).values[-1])
        if lam_min < -tol * max(1.0, matcore.operator_norm(m)):
            raise NotPSD(f"{label} argument has negative eigenvalue {lam_min:.3e}")
    report = weak_majorization(a, b, tol)
    n = a.dim
    margins = np.empty(n)
    agreement = np.empty(n, dtype=bool)
    scale = max(1.0, float(np.max(np.abs(report.partial_sums_a))),
                float(np.max(np.abs(report.partial_sums_b))))
    for k in range(1, n + 1):
        margins[k - 1] = matcore.ui_norm(b, NormSpec.ky_fan(k)) - matcore.ui_norm(a, NormSpec.ky_fan(k))
        norm_ok = margins[k - 1] >= -tol * scale
        sum_ok = report.deficits[k - 1] >= -tol * scale
        agreement[k - 1] = norm_ok == sum_ok
    margins.flags.writeable = False
    agreement.flags.writeable = False
    return KyFanScanReport(majorization=report, norm_margins=margins, agreement=agreement)
