"""Dense Hermitian matrices: construction, eigendecomposition, functional
calculus and the unitarily invariant norm family.

All values are immutable after construction and all operations are pure, so
everything here is safe to call from concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np

from .errors import (
    BadSpec,
    ConvergenceFailure,
    ExcessAsymmetryError,
    NonSquareError,
    SpectrumOutOfDomain,
)

if TYPE_CHECKING:  # pragma: no cover
    from .funcat import ScalarFunction

# Relative bound on the skew part of raw input before construction is refused.
ASYMMETRY_RTOL = 1e-10
# Relative bounds for eigendecomposition self-checks.
EIG_RECON_RTOL = 1e-10
EIG_ORTHO_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Square complex matrix with exact Hermitian symmetry.

    The constructor replaces the raw entries by their Hermitian part
    (M + M*)/2, which is exactly Hermitian in floating point, and records how
    far the raw input was from symmetric.  Inputs whose skew part exceeds
    ``ASYMMETRY_RTOL * max(1, max|entry|)`` are rejected.
    """

    entries: np.ndarray
    asymmetry_residual: float = 0.0

    def __post_init__(self):
        raw = np.asarray(self.entries, dtype=complex)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
            raise NonSquareError(f"expected a square grid, got shape {raw.shape}")
        herm = (raw + raw.conj().T) / 2.0
        residual = float(np.max(np.abs(raw - herm))) if raw.size else 0.0
        scale = max(1.0, float(np.max(np.abs(raw))) if raw.size else 0.0)
        if residual > ASYMMETRY_RTOL * scale:
            raise ExcessAsymmetryError(
                f"asymmetry residual {residual:.3e} exceeds "
                f"{ASYMMETRY_RTOL:.0e} * {scale:.3e}"
            )
        herm.flags.writeable = False
        object.__setattr__(self, "entries", herm)
        object.__setattr__(self, "asymmetry_residual", residual)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    # Real linear combinations of Hermitian matrices stay Hermitian, so a
    # little arithmetic sugar keeps checker code close to the formulas.
    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.entries + other.entries)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.entries - other.entries)

    def __mul__(self, scalar: float) -> "HermitianMatrix":
        return HermitianMatrix(self.entries * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "HermitianMatrix":
        return HermitianMatrix(self.entries / float(scalar))

    def __neg__(self) -> "HermitianMatrix":
        return HermitianMatrix(-self.entries)

    def conjugate_by(self, u: np.ndarray) -> "HermitianMatrix":
        """Return U* H U for a square matrix U (unitary in all intended uses)."""
        return HermitianMatrix(u.conj().T @ self.entries @ u)

    def __repr__(self) -> str:
        return f"HermitianMatrix(dim={self.dim}, residual={self.asymmetry_residual:.2e})"


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalues in descending order with orthonormal eigenvectors.

    ``values[j]`` pairs with column ``vectors[:, j]``; the source matrix is
    ``vectors @ diag(values) @ vectors*``.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


@dataclass(frozen=True)
class NormSpec:
    """Selector for a unitarily invariant norm.

    kind is one of "kyfan" (needs k), "schatten" (needs p >= 1) or "operator".
    """

    kind: str
    k: int | None = None
    p: float | None = None

    @staticmethod
    def ky_fan(k: int) -> "NormSpec":
        return NormSpec("kyfan", k=k)

    @staticmethod
    def schatten(p: float) -> "NormSpec":
        return NormSpec("schatten", p=float(p))

    @staticmethod
    def operator() -> "NormSpec":
        return NormSpec("operator")

    @staticmethod
    def parse(text: str) -> "NormSpec":
        """Parse "kyfan:K", "schatten:P" or "operator"."""
        head, _, arg = text.partition(":")
        if head == "kyfan":
            return NormSpec.ky_fan(int(arg))
        if head == "schatten":
            return NormSpec.schatten(float(arg))
        if head == "operator" and not arg:
            return NormSpec.operator()
        raise BadSpec(f"cannot parse norm spec {text!r}")

    def __str__(self) -> str:
        if self.kind == "kyfan":
            return f"kyfan:{self.k}"
        if self.kind == "schatten":
            return f"schatten:{self.p:g}"
        return "operator"


def hermitian_from(raw) -> HermitianMatrix:
    """Build a HermitianMatrix from any square complex grid, symmetrizing."""
    return HermitianMatrix(np.asarray(raw, dtype=complex))


def eig(h: HermitianMatrix) -> EigenSystem:
    """Eigendecomposition with eigenvalues sorted in descending order.

    The solver output is validated: reconstruction must match the input to
    ``EIG_RECON_RTOL`` relative to max(1, spectral radius) and the eigenvector
    matrix must be orthonormal entrywise to ``EIG_ORTHO_TOL``.
    """
    try:
        w, v = np.linalg.eigh(h.entries)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigh failed: {exc}") from exc
    # eigh returns ascending order; a stable flip gives descending while
    # preserving solver order inside ties.
    values = np.ascontiguousarray(w[::-1].astype(float))
    vectors = np.ascontiguousarray(v[:, ::-1])
    n = h.dim
    scale = max(1.0, float(np.max(np.abs(values))) if n else 0.0)
    recon_err = float(np.max(np.abs((vectors * values) @ vectors.conj().T - h.entries)))
    if recon_err > EIG_RECON_RTOL * scale:
        raise ConvergenceFailure(
            f"eigendecomposition reconstruction error {recon_err:.3e} "
            f"exceeds {EIG_RECON_RTOL:.0e} * {scale:.3e}"
        )
    ortho_err = float(np.max(np.abs(vectors.conj().T @ vectors - np.eye(n))))
    if ortho_err > EIG_ORTHO_TOL:
        raise ConvergenceFailure(f"eigenvectors not orthonormal: {ortho_err:.3e}")
    values.flags.writeable = False
    vectors.flags.writeable = False
    return EigenSystem(values=values, vectors=vectors)


def apply_function(f: "ScalarFunction", h: HermitianMatrix) -> HermitianMatrix:
    """Functional calculus f(H) via the spectral decomposition.

    Requires the spectrum of H to lie in the domain of f (endpoints are
    stretched by a small relative tolerance, see funcat.Interval.contains).
    """
    es = eig(h)
    bad = [float(x) for x in es.values if not f.domain.contains(float(x))]
    if bad:
        raise SpectrumOutOfDomain(
            f"eigenvalues {bad} of the argument lie outside domain {f.domain} of {f.name}",
            offending=bad,
        )
    fvals = f.eval_array(np.clip(es.values, *f.domain.clip_bounds()))
    result = (es.vectors * fvals) @ es.vectors.conj().T
    # Symmetrize so downstream construction is exact regardless of rounding.
    return HermitianMatrix((result + result.conj().T) / 2.0)


def singular_values(h: HermitianMatrix) -> np.ndarray:
    """Singular values of a Hermitian matrix: |eigenvalues|, descending."""
    return np.sort(np.abs(eig(h).values))[::-1]


def ui_norm(h: HermitianMatrix, spec: NormSpec) -> float:
    """Evaluate a unitarily invariant norm of a Hermitian matrix.

    kyfan:k  sum of the k largest singular values
    schatten:p  (sum of sigma_i^p)^(1/p), p >= 1
    operator  largest singular value
    """
    n = h.dim
    if spec.kind == "kyfan":
        if spec.k is None or not (1 <= int(spec.k) <= n):
            raise BadSpec(f"Ky Fan k must be in 1..{n}, got {spec.k}")
        sigma = singular_values(h)
        return float(np.sum(sigma[: int(spec.k)]))
    if spec.kind == "schatten":
        if spec.p is None or spec.p < 1.0:
            raise BadSpec(f"Schatten p must be >= 1, got {spec.p}")
        sigma = singular_values(h)
        return float(np.sum(sigma ** spec.p) ** (1.0 / spec.p))
    if spec.kind == "operator":
        return float(singular_values(h)[0]) if n else 0.0
    raise BadSpec(f"unknown norm kind {spec.kind!r}")


def operator_norm(h: HermitianMatrix) -> float:
    return ui_norm(h, NormSpec.operator())


# -- matrix literal format ---------------------------------------------------
#
# JSON object {"n": int, "re": [[...]], "im": [[...]]} with "im" optional.
# Entries may be numbers or strings; strings are parsed exactly as rationals
# ("1.75", "31/6") so fixed rational inputs survive the round trip.

def _parse_entry(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(float(x))


def _parse_grid(grid, n: int) -> list[list[Fraction]]:
    if len(grid) != n or any(len(row) != n for row in grid):
        raise NonSquareError(f"grid is not {n}x{n}")
    return [[_parse_entry(x) for x in row] for row in grid]


def matrix_from_json(obj: dict) -> HermitianMatrix:
    """Load a HermitianMatrix from the matrix literal format."""
    n = int(obj["n"])
    re = _parse_grid(obj["re"], n)
    im = _parse_grid(obj["im"], n) if obj.get("im") is not None else None
    raw = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            raw[i, j] = float(re[i][j]) + (1j * float(im[i][j]) if im else 0.0)
    return hermitian_from(raw)


def exact_matrix_from_json(obj: dict) -> np.ndarray:
    """Load the real part of a matrix literal as exact Fractions (object array)."""
    n = int(obj["n"])
    re = _parse_grid(obj["re"], n)
    if obj.get("im") is not None and any(x for row in _parse_grid(obj["im"], n) for x in row):
        raise BadSpec("exact loading supports real matrices only")
    return np.array(re, dtype=object)


def matrix_to_json(h: HermitianMatrix) -> dict:
    ent = h.entries
    out: dict = {"n": h.dim, "re": ent.real.tolist()}
    if np.any(ent.imag):
        out["im"] = ent.imag.tolist()
    return out
