"""Integration of the matrix segment curve t -> f(tA + (1-t)B) over [0, 1].

Gauss-Legendre quadrature with optional node doubling, plus an independent
word-expansion oracle for integer powers: (tA + (1-t)B)^r expands into
noncommutative words in {A, B} whose scalar coefficients integrate exactly
as Beta integrals.  The oracle is exponential in r by design; it exists to
certify the quadrature at small sizes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BadParams, DimMismatch, NoConvergence, RTooLarge, SpectrumOutOfDomain
from .funcat import ScalarFunction
from .matcore import HermitianMatrix, apply_function, eig, operator_norm

NODE_CAP = 1024  # refinement stops doubling at 2**10 nodes
WORD_CAP = 6  # 2**6 = 64 words


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre node count, optional adaptive doubling, and its rtol."""

    nodes: int = 16
    refine: bool = True
    rtol: float = 1e-11

    def __post_init__(self):
        if self.nodes < 1:
            raise BadParams(f"node count must be >= 1, got {self.nodes}")
        if not self.rtol > 0.0:
            raise BadParams(f"rtol must be positive, got {self.rtol}")


def _check_spectrum_in_domain(f: ScalarFunction, h: HermitianMatrix, label: str):
    bad = [float(x) for x in eig(h).values if not f.domain.contains(float(x))]
    if bad:
        raise SpectrumOutOfDomain(
            f"spectrum of {label} leaves domain {f.domain} of {f.name}: {bad}",
            offending=bad,
        )


def _gauss_pass(f: ScalarFunction, a: HermitianMatrix, b: HermitianMatrix, nodes: int) -> np.ndarray:
    x, w = np.polynomial.legendre.leggauss(nodes)
    ts = (x + 1.0) / 2.0
    ws = w / 2.0
    acc = np.zeros_like(a.entries)
    for t, weight in zip(ts, ws):
        node_matrix = float(t) * a + float(1.0 - t) * b
        acc = acc + weight * apply_function(f, node_matrix).entries
    return acc


def segment_integral(
    f: ScalarFunction,
    a: HermitianMatrix,
    b: HermitianMatrix,
    spec: QuadratureSpec = QuadratureSpec(),
) -> HermitianMatrix:
    """Integrate f(tA + (1-t)B) over t in [0, 1].

    Spectra are required to stay inside the domain of f; this is checked at
    the endpoints and at every quadrature node (the segment's spectral
    bounds are convex in t, so a dense check is unnecessary at these
    tolerances).  With refine=True the node count doubles until successive
    results agree to rtol in relative operator norm, capped at NODE_CAP.
    """
    if a.dim != b.dim:
        raise DimMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    _check_spectrum_in_domain(f, a, "the t=1 endpoint")
    _check_spectrum_in_domain(f, b, "the t=0 endpoint")
    nodes = spec.nodes
    current = _gauss_pass(f, a, b, nodes)
    if not spec.refine:
        return HermitianMatrix((current + current.conj().T) / 2.0)
    while True:
        if 2 * nodes > NODE_CAP:
            raise NoConvergence(
                f"quadrature did not settle to rtol={spec.rtol:g} below {NODE_CAP} nodes"
            )
        nodes *= 2
        refined = _gauss_pass(f, a, b, nodes)
        scale = max(1.0, float(np.max(np.abs(refined))))
        if float(np.max(np.abs(refined - current))) <= spec.rtol * scale:
            return HermitianMatrix((refined + refined.conj().T) / 2.0)
        current = refined


def _word_integral(a: np.ndarray, b: np.ndarray, r: int, exact: bool) -> np.ndarray:
    letters = (b, a)  # bit 1 selects A, bit 0 selects B
    acc = None
    for bits in itertools.product((0, 1), repeat=r):
        word = letters[bits[0]]
        for bit in bits[1:]:
            word = word.dot(letters[bit])
        j = sum(bits)
        coeff = Fraction(math.factorial(j) * math.factorial(r - j), math.factorial(r + 1))
        term = (coeff if exact else float(coeff)) * word
        acc = term if acc is None else acc + term
    return acc


def poly_segment_oracle(r: int, a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    """Exact-in-structure integral of (tA + (1-t)B)^r by word expansion.

    Each word w in {A, B}^r with j letters A contributes
    j! (r-j)! / (r+1)! times the matrix product w; no quadrature involved.
    """
    if a.dim != b.dim:
        raise DimMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    r = int(r)
    if r < 1:
        raise BadParams(f"power must be a positive integer, got {r}")
    if r > WORD_CAP:
        raise RTooLarge(f"word expansion capped at r={WORD_CAP}, got {r}")
    total = _word_integral(a.entries, b.entries, r, exact=False)
    return HermitianMatrix((total + total.conj().T) / 2.0)


def poly_segment_oracle_exact(r: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Word-expansion integral in exact rational arithmetic.

    Inputs are object arrays of Fractions (real symmetric); the result is an
    object array of Fractions.
    """
    r = int(r)
    if r < 1:
        raise BadParams(f"power must be a positive integer, got {r}")
    if r > WORD_CAP:
        raise RTooLarge(f"word expansion capped at r={WORD_CAP}, got {r}")
    return _word_integral(np.asarray(a, dtype=object), np.asarray(b, dtype=object), r, exact=True)


def scalar_segment_integral(f, x: float, y: float, rtol: float = 1e-12, nodes: int = 16) -> float:
    """Gauss-Legendre integral of a scalar function over [x, y], refined by
    node doubling until successive values agree to rtol."""
    if not y > x:
        raise BadParams(f"need x < y, got [{x}, {y}]")

    def one_pass(n: int) -> float:
        u, w = np.polynomial.legendre.leggauss(n)
        ts = x + (u + 1.0) * (y - x) / 2.0
        return float(sum(wi * f(t) for wi, t in zip(w, ts)) * (y - x) / 2.0)

    current = one_pass(nodes)
    while True:
        if 2 * nodes > NODE_CAP:
            raise NoConvergence(f"scalar quadrature did not settle below {NODE_CAP} nodes")
        nodes *= 2
        refined = one_pass(nodes)
        if abs(refined - current) <= rtol * max(1.0, abs(refined)):
            return refined
        current = refined
