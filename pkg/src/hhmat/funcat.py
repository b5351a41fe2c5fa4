"""Catalog of scalar test functions with declared analytic flags.

Theorem checkers gate their hypotheses on the declared flags (convex,
increasing, positive, operator convex, f(0) <= 0).  The catalog is fixed so
the flag assignments stay auditable; validate_flags spot-checks them
numerically and hunts for witnesses against flags declared false.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import matcore, orders
from .errors import BadParams, FlagContradicted, UnknownName

# Relative endpoint stretch used for domain membership of computed spectra.
DOMAIN_STRETCH_RTOL = 1e-9
# Tolerance for the midpoint-convexity and monotonicity grid tests.
FLAG_TEST_RTOL = 1e-10


@dataclass(frozen=True)
class Interval:
    """Closed interval or half-line; open endpoints are honored strictly."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BadParams(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def _pad(self, x: float) -> float:
        # Numerically computed spectra may fall marginally outside closed
        # endpoints; stretch by a small amount relative to the interval
        # length (or to the point's own scale on half-lines).
        if self.bounded:
            return DOMAIN_STRETCH_RTOL * (self.hi - self.lo)
        return DOMAIN_STRETCH_RTOL * max(1.0, abs(x))

    def contains(self, x: float) -> bool:
        pad = self._pad(x)
        lo_ok = x > self.lo if self.lo_open else x >= self.lo - pad
        hi_ok = x < self.hi if self.hi_open else x <= self.hi + pad
        return lo_ok and hi_ok

    def contains_interval(self, a: float, b: float) -> bool:
        lo_ok = a > self.lo if self.lo_open else a >= self.lo
        hi_ok = b < self.hi if self.hi_open else b <= self.hi
        return lo_ok and hi_ok and a <= b

    def clip_bounds(self) -> tuple[float, float]:
        """Bounds for clipping values already admitted by contains()."""
        return self.lo, self.hi

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class Flags:
    """Tri-state analytic declarations: True, False, or None for unknown."""

    convex: bool | None = None
    increasing: bool | None = None
    positive: bool | None = None
    operator_convex: bool | None = None
    f0_nonpositive: bool | None = None

    def as_dict(self) -> dict:
        return {
            "convex": self.convex,
            "increasing": self.increasing,
            "positive": self.positive,
            "operator_convex": self.operator_convex,
            "f0_nonpositive": self.f0_nonpositive,
        }


@dataclass(frozen=True)
class ScalarFunction:
    name: str
    fn: Callable[[float], float]
    domain: Interval
    flags: Flags

    def __call__(self, x: float) -> float:
        return self.fn(float(x))

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self.fn(float(x)) for x in np.asarray(xs).ravel()])

    def __repr__(self) -> str:
        return f"ScalarFunction({self.name!r} on {self.domain})"


def _require_params(name: str, params: tuple, count: int):
    if len(params) != count:
        raise BadParams(f"{name} expects {count} parameter(s), got {len(params)}")


def _is_integral(r: float) -> bool:
    return math.isfinite(r) and r == round(r)


def _power_eval(r: float) -> Callable[[float], float]:
    if _is_integral(r):
        k = int(round(r))
        return lambda x: float(x) ** k
    return lambda x: float(max(x, 0.0)) ** r


def _power_flags(r: float, dom: Interval) -> Flags:
    nonneg = dom.lo >= 0.0
    even = _is_integral(r) and int(round(r)) % 2 == 0
    odd = _is_integral(r) and int(round(r)) % 2 == 1
    return Flags(
        convex=True if (nonneg or even) else False,
        increasing=True if (nonneg or odd) else False,
        positive=dom.lo > 0.0 or (dom.lo == 0.0 and dom.lo_open),
        operator_convex=1.0 <= r <= 2.0,
        f0_nonpositive=True if dom.contains_interval(0.0, 0.0) else None,
    )


def _affine_flags(a: float, b: float, dom: Interval) -> Flags:
    if dom.bounded:
        positive = min(a * dom.lo + b, a * dom.hi + b) > 0.0
    else:
        positive = a == 0.0 and b > 0.0
    return Flags(
        convex=True,
        increasing=a >= 0.0,
        positive=positive,
        operator_convex=True,
        f0_nonpositive=(b <= 0.0) if dom.contains_interval(0.0, 0.0) else None,
    )


def _xlogx(x: float) -> float:
    return 0.0 if x <= 0.0 else x * math.log(x)


def builtin(name: str, *params: float, domain: tuple[float, float] | None = None) -> ScalarFunction:
    """Construct a catalog function, optionally restricted to a subinterval.

    Supported names: power(r), exp, identity, cube, neg_sqrt, inverse,
    xlogx, affine(a, b).  Restricting the domain recomputes flags (e.g.
    power(2) is increasing on [0, inf) but not on all of R).
    """
    if name == "power":
        _require_params(name, params, 1)
        r = float(params[0])
        if not r >= 1.0:
            raise BadParams(f"power exponent must be >= 1 for guaranteed convexity, got {r}")
        natural = Interval() if _is_integral(r) else Interval(lo=0.0)
        dom = _restrict(natural, domain, name)
        return ScalarFunction(f"power:{r:g}", _power_eval(r), dom, _power_flags(r, dom))
    if name == "cube":
        _require_params(name, params, 0)
        dom = _restrict(Interval(lo=0.0), domain, name)
        return ScalarFunction("cube", _power_eval(3.0), dom, _power_flags(3.0, dom))
    if name == "identity":
        _require_params(name, params, 0)
        dom = _restrict(Interval(), domain, name)
        return ScalarFunction("identity", lambda x: float(x), dom, _affine_flags(1.0, 0.0, dom))
    if name == "affine":
        _require_params(name, params, 2)
        a, b = float(params[0]), float(params[1])
        dom = _restrict(Interval(), domain, name)
        return ScalarFunction(
            f"affine:{a:g},{b:g}", lambda x: a * x + b, dom, _affine_flags(a, b, dom)
        )
    if name == "exp":
        _require_params(name, params, 0)
        dom = _restrict(Interval(), domain, name)
        flags = Flags(convex=True, increasing=True, positive=True,
                      operator_convex=False, f0_nonpositive=False)
        return ScalarFunction("exp", math.exp, dom, flags)
    if name == "neg_sqrt":
        _require_params(name, params, 0)
        dom = _restrict(Interval(lo=0.0), domain, name)
        flags = Flags(convex=True, increasing=False, positive=False,
                      operator_convex=True,
                      f0_nonpositive=True if dom.contains_interval(0.0, 0.0) else None)
        return ScalarFunction("neg_sqrt", lambda x: -math.sqrt(max(x, 0.0)), dom, flags)
    if name == "inverse":
        _require_params(name, params, 0)
        dom = _restrict(Interval(lo=0.0, lo_open=True), domain, name)
        flags = Flags(convex=True, increasing=False, positive=True,
                      operator_convex=True, f0_nonpositive=None)
        return ScalarFunction("inverse", lambda x: 1.0 / x, dom, flags)
    if name == "xlogx":
        _require_params(name, params, 0)
        dom = _restrict(Interval(lo=0.0), domain, name)
        flags = Flags(convex=True, increasing=False, positive=False,
                      operator_convex=True,
                      f0_nonpositive=True if dom.contains_interval(0.0, 0.0) else None)
        return ScalarFunction("xlogx", _xlogx, dom, flags)
    raise UnknownName(f"no catalog entry named {name!r}")


def _restrict(natural: Interval, domain: tuple[float, float] | None, name: str) -> Interval:
    if domain is None:
        return natural
    lo, hi = float(domain[0]), float(domain[1])
    if not natural.contains_interval(lo, hi) and not (
        # Allow restriction sharing the natural open endpoint, e.g. (0, 2].
        lo == natural.lo and natural.lo_open and hi <= natural.hi
    ):
        raise BadParams(f"domain [{lo}, {hi}] is not inside the natural domain of {name}")
    return Interval(lo=lo, hi=hi, lo_open=natural.lo_open and lo == natural.lo)


def from_descriptor(text: str) -> ScalarFunction:
    """Parse CLI descriptors like "exp", "power:1.5" or "power:2@0,inf"."""
    body, _, dom = text.partition("@")
    name, _, argstr = body.partition(":")
    params = tuple(float(a) for a in argstr.split(",")) if argstr else ()
    domain = None
    if dom:
        lo_s, _, hi_s = dom.partition(",")
        domain = (float(lo_s), float(hi_s))
    return builtin(name, *params, domain=domain)


CATALOG_DESCRIPTORS = (
    "identity",
    "affine:2,0.5",
    "power:1.5",
    "power:2",
    "power:2@0,inf",
    "power:4",
    "cube",
    "exp",
    "neg_sqrt",
    "inverse",
    "xlogx",
)
"""Representative instances used by the validation test sweep."""


# -- numeric flag validation --------------------------------------------------

@dataclass(frozen=True)
class FlagCheck:
    status: str  # confirmed | witnessed_false | no_witness | skipped
    witness: object | None = None


@dataclass(frozen=True)
class FlagReport:
    """Per-flag validation outcomes; contradictions raise before this exists."""

    function: str
    interval: tuple[float, float]
    checks: dict[str, FlagCheck] = field(default_factory=dict)


def _random_probe_pair(n: int, a: float, b: float, rng: np.random.Generator):
    """Two random Hermitian matrices with spectra inside [a, b]."""
    out = []
    for _ in range(2):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = (g + g.conj().T) / 2.0
        w, v = np.linalg.eigh(h)
        span = w[-1] - w[0]
        width = b - a
        if span < 1e-12:
            w = np.full(n, (a + b) / 2.0)
        else:
            w = a + 0.01 * width + (w - w[0]) * (0.98 * width / span)
        out.append(matcore.hermitian_from((v * w) @ v.conj().T))
    return out[0], out[1]


def _search_operator_convexity_violation(f, a, b, rng, trials):
    lams = (0.25, 0.5, 0.75)
    for n in (2, 3):
        for _ in range(trials):
            A, B = _random_probe_pair(n, a, b, rng)
            fa, fb = matcore.apply_function(f, A), matcore.apply_function(f, B)
            for lam in lams:
                mix = matcore.apply_function(f, lam * A + (1.0 - lam) * B)
                verdict = orders.loewner_leq(mix, lam * fa + (1.0 - lam) * fb)
                if not verdict.holds:
                    return (A, B, lam, verdict.margin)
    return None


def validate_flags(
    f: ScalarFunction,
    interval: tuple[float, float],
    grid_points: int = 201,
    *,
    rng: np.random.Generator | None = None,
    claims: dict | None = None,
    matrix_trials: int = 40,
) -> FlagReport:
    """Numerically confirm declared-true flags on a grid over ``interval``.

    A declared-true flag that fails raises FlagContradicted with a witness.
    For declared-false flags a directed search records a witness showing the
    property really fails (cube's operator convexity, for instance).  The
    ``claims`` mapping overrides declarations, so a caller can ask "what if
    this were operator convex" and get the refuting witness as an error.
    """
    a, b = float(interval[0]), float(interval[1])
    if not f.domain.contains_interval(a, b):
        raise BadParams(f"interval [{a}, {b}] not inside domain {f.domain} of {f.name}")
    rng = rng if rng is not None else np.random.default_rng(0)
    grid = np.linspace(a, b, max(int(grid_points), 3))
    vals = f.eval_array(grid)
    if not np.all(np.isfinite(vals)):
        raise BadParams(f"{f.name} is not finite on [{a}, {b}]")
    scale = max(1.0, float(np.max(np.abs(vals))))
    tol = FLAG_TEST_RTOL * scale

    effective = dict(f.flags.as_dict())
    if claims:
        effective.update(claims)
    checks: dict[str, FlagCheck] = {}

    def settle(flag: str, witness):
        declared = effective[flag]
        if declared is None:
            checks[flag] = FlagCheck("skipped")
        elif declared and witness is not None:
            raise FlagContradicted(
                f"{f.name}: flag {flag!r} declared true but refuted", flag, witness
            )
        elif declared:
            checks[flag] = FlagCheck("confirmed")
        elif witness is not None:
            checks[flag] = FlagCheck("witnessed_false", witness)
        else:
            checks[flag] = FlagCheck("no_witness")

    # Midpoint convexity on random grid pairs.
    witness = None
    for _ in range(10 * len(grid)):
        s, t = rng.choice(grid, size=2)
        gap = (f(s) + f(t)) / 2.0 - f((s + t) / 2.0)
        if gap < -tol:
            witness = (float(s), float(t), float(gap))
            break
    settle("convex", witness)

    # Monotonicity on ordered random pairs.
    witness = None
    for _ in range(10 * len(grid)):
        s, t = sorted(rng.choice(grid, size=2))
        drop = f(s) - f(t)
        if drop > tol:
            witness = (float(s), float(t), float(drop))
            break
    settle("increasing", witness)

    # Strict positivity on the grid.
    i_min = int(np.argmin(vals))
    witness = (float(grid[i_min]), float(vals[i_min])) if vals[i_min] <= 0.0 else None
    settle("positive", witness)

    # Operator convexity sampled on random 2x2 and 3x3 pairs.  The fixed
    # probe pair below is a known violator for cube-like functions.
    witness = _search_operator_convexity_violation(f, a, b, rng, matrix_trials)
    if witness is None and effective["operator_convex"] is False:
        fixed = _fixed_probe_pair(f, a, b)
        if fixed is not None:
            A, B = fixed
            fa, fb = matcore.apply_function(f, A), matcore.apply_function(f, B)
            mix = matcore.apply_function(f, 0.5 * A + 0.5 * B)
            verdict = orders.loewner_leq(mix, 0.5 * fa + 0.5 * fb)
            if not verdict.holds:
                witness = (A, B, 0.5, verdict.margin)
    if witness is not None:
        A, B, lam, margin = witness
        witness = {
            "a": A.entries.real.tolist(),
            "b": B.entries.real.tolist(),
            "lambda": lam,
            "margin": margin,
        }
    settle("operator_convex", witness)

    if effective["f0_nonpositive"] is None or not f.domain.contains(0.0):
        checks["f0_nonpositive"] = FlagCheck("skipped")
    else:
        v0 = f(0.0)
        settle("f0_nonpositive", (0.0, float(v0)) if v0 > tol else None)

    return FlagReport(function=f.name, interval=(a, b), checks=checks)


def _fixed_probe_pair(f, a, b):
    # Deterministic violating candidate for convex-but-not-operator-convex
    # functions; spectra are {(3 +- sqrt(5))/2} and {1, 0}.
    hi_needed = (3.0 + math.sqrt(5.0)) / 2.0
    if not (f.domain.contains(0.0) and f.domain.contains(hi_needed)):
        return None
    if a > 0.0 or b < hi_needed:
        return None
    A = matcore.hermitian_from([[2.0, 1.0], [1.0, 1.0]])
    B = matcore.hermitian_from([[1.0, 0.0], [0.0, 0.0]])
    return A, B
