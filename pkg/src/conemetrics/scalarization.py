"""Nonlinear scalarization of an ordered vector space.

For an interior point e of the cone P, the scalarization of y is

    xi_e(y) = inf { t in R : y in t*e - P },

the smallest multiple of e that dominates y in the cone order.  It is
positively homogeneous, monotone, and subadditive, but not strongly
monotone: distinct comparable points can scalarize equally.

Closed forms:

* orthant      xi_e(y) = max_i y_i / e_i
* lorentz      smallest root t of ||t e_h - y_h|| = t e_n - y_n with
               t e_n - y_n >= 0 (a scalar quadratic; the root is checked
               by substitution and degenerate cases fall back to bisection)
* polyhedral   xi_e(y) = max_i (A y)_i / (A e)_i, since membership of
               t e - y reduces to the row ratios

``xi_bisection`` is the independent oracle: membership of t e - y is
monotone in t, so a doubling bracket plus bisection converges without any
structural knowledge of the cone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketNotFound, DimensionMismatch, NonFiniteEntry
from .ordered_space import (
    Cone,
    Lorentz,
    Orthant,
    Polyhedral,
    as_vector,
    order_leq,
    sample_cone_points,
    sample_interior_points,
)
from .reporting import CheckOutcome, PropertyReport
from .sampling import SampleSpec, stream

DEFAULT_TOL = 1e-9

# Interior checks inside property evaluations use a margin well below the
# 10*tol membership offsets so the offsets dominate.
_CHECK_MARGIN_FACTOR = 1e-3


@dataclass(frozen=True)
class ScalarizationContext:
    """A cone, a certified interior direction e, and a working tolerance."""

    cone: Cone
    e: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not 0.0 < self.tol <= 1e-3:
            raise ValueError(f"tol must lie in (0, 1e-3], got {self.tol}")
        e = as_vector(self.e, dim=self.cone.dim)
        if not self.cone.strictly_contains(e):
            raise ValueError("e must be strictly interior to the cone")
        object.__setattr__(self, "e", e)

    @property
    def check_margin(self) -> float:
        return max(self.tol * _CHECK_MARGIN_FACTOR, 1e-15)


def xi(ctx: ScalarizationContext, y) -> float:
    """Scalarization value by closed form, per cone kind."""
    cone = ctx.cone
    y = np.asarray(y, dtype=float)
    if y.shape != (cone.dim,):
        raise DimensionMismatch(
            f"xi over R^{cone.dim} got vector of shape {y.shape}"
        )
    if not np.all(np.isfinite(y)):
        raise NonFiniteEntry(f"xi input has non-finite entries: {y}")
    if isinstance(cone, Orthant):
        return float(np.max(y / ctx.e))
    if isinstance(cone, Polyhedral):
        A = cone.matrix
        return float(np.max((A @ y) / (A @ ctx.e)))
    if isinstance(cone, Lorentz):
        return _xi_lorentz(ctx, y)
    raise TypeError(f"unknown cone type {type(cone)!r}")


def _xi_lorentz(ctx: ScalarizationContext, y: np.ndarray) -> float:
    """Minimal t with t*e - y in the second-order cone.

    Squaring the boundary condition gives a quadratic in t whose valid
    root must keep t*e_n - y_n >= 0; tangency or conditioning trouble
    falls back to the bisection oracle.
    """
    e = ctx.e
    eh, en = e[:-1], e[-1]
    yh, yn = y[:-1], y[-1]
    a = en * en - float(eh @ eh)
    beta = en * yn - float(eh @ yh)
    c = yn * yn - float(yh @ yh)
    if a <= 0:
        return xi_bisection(ctx, y)
    disc = beta * beta - a * c
    if disc < 0:
        if disc > -ctx.tol * max(1.0, abs(beta)):
            disc = 0.0
        else:
            return xi_bisection(ctx, y)
    root = math.sqrt(disc)
    candidates = [(beta - root) / a, (beta + root) / a]
    scale = max(1.0, float(np.max(np.abs(y))), abs(candidates[1]))
    for t in candidates:
        if t * en - yn >= -ctx.tol * scale:
            if ctx.cone.contains(t * e - y, 10.0 * ctx.tol * scale):
                return float(t)
    return xi_bisection(ctx, y)


def xi_bisection(ctx: ScalarizationContext, y) -> float:
    """Oracle scalarization via monotone membership of t*e - y.

    Brackets the flip point by step doubling from t = 0, then bisects the
    bracket down to width ``ctx.tol`` and returns the midpoint.
    """
    cone = ctx.cone
    e = ctx.e
    y = np.asarray(y, dtype=float)
    if y.shape != (cone.dim,):
        raise DimensionMismatch(
            f"xi_bisection over R^{cone.dim} got vector of shape {y.shape}"
        )
    if not np.all(np.isfinite(y)):
        raise NonFiniteEntry(f"xi_bisection input has non-finite entries: {y}")

    def member(t: float) -> bool:
        return cone._slack(t * e - y) >= 0.0

    if member(0.0):
        hi = 0.0
        lo = -1.0
        for _ in range(200):
            if not member(lo):
                break
            hi = lo
            lo *= 2.0
        else:
            raise BracketNotFound("no lower bracket within 200 doublings")
    else:
        lo = 0.0
        hi = 1.0
        for _ in range(200):
            if member(hi):
                break
            lo = hi
            hi *= 2.0
        else:
            raise BracketNotFound("no upper bracket within 200 doublings")

    while hi - lo > ctx.tol:
        mid = 0.5 * (lo + hi)
        if member(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Property evaluation
#
# Each property is a pure function of a JSON-compatible payload, so a
# failing sample can be replayed verbatim.  Violations are reported in the
# natural units of the property (constraint slack or scalar gap).
# ---------------------------------------------------------------------------


def _offset(ctx: ScalarizationContext) -> float:
    return 10.0 * ctx.tol


def eval_membership_above(ctx: ScalarizationContext, payload: dict) -> float:
    """(i): t >= xi(y) + offset implies y in t*e - P."""
    y = np.asarray(payload["y"], dtype=float)
    t = xi(ctx, y) + _offset(ctx)
    return max(0.0, -ctx.cone._slack(t * ctx.e - y))


def eval_membership_below(ctx: ScalarizationContext, payload: dict) -> float:
    """(ii): t <= xi(y) - offset implies y not in t*e - P."""
    y = np.asarray(payload["y"], dtype=float)
    t = xi(ctx, y) - _offset(ctx)
    return max(0.0, ctx.cone._slack(t * ctx.e - y))


def eval_interior_below_excluded(ctx: ScalarizationContext, payload: dict) -> float:
    """(iii): t <= xi(y) - offset implies y not in t*e - int(P)."""
    y = np.asarray(payload["y"], dtype=float)
    t = xi(ctx, y) - _offset(ctx)
    if ctx.cone.strictly_contains(t * ctx.e - y, ctx.check_margin):
        return ctx.cone._slack(t * ctx.e - y)
    return 0.0


def eval_interior_above_included(ctx: ScalarizationContext, payload: dict) -> float:
    """(iv): t >= xi(y) + offset implies y in t*e - int(P)."""
    y = np.asarray(payload["y"], dtype=float)
    t = xi(ctx, y) + _offset(ctx)
    v = t * ctx.e - y
    scale = max(1.0, float(np.max(np.abs(v))))
    return max(0.0, ctx.check_margin * scale - ctx.cone._slack(v))


def eval_homogeneity(ctx: ScalarizationContext, payload: dict) -> float:
    """(v): xi(lam*y) = lam*xi(y) for lam > 0, relative to magnitude."""
    y = np.asarray(payload["y"], dtype=float)
    lam = float(payload["lam"])
    base = xi(ctx, y)
    gap = abs(xi(ctx, lam * y) - lam * base)
    return gap / ((1.0 + lam) * (1.0 + abs(base)))


def eval_monotone(ctx: ScalarizationContext, payload: dict) -> float:
    """(vi): y1 in y2 + P implies xi(y2) <= xi(y1)."""
    y2 = np.asarray(payload["y2"], dtype=float)
    w = np.asarray(payload["w"], dtype=float)
    return max(0.0, xi(ctx, y2) - xi(ctx, y2 + w))


def eval_subadditive(ctx: ScalarizationContext, payload: dict) -> float:
    """(vii): xi(y1 + y2) <= xi(y1) + xi(y2)."""
    y1 = np.asarray(payload["y1"], dtype=float)
    y2 = np.asarray(payload["y2"], dtype=float)
    return max(0.0, xi(ctx, y1 + y2) - xi(ctx, y1) - xi(ctx, y2))


def eval_strictly_monotone(ctx: ScalarizationContext, payload: dict) -> float:
    """(viii): y1 in y2 + int(P) implies xi(y2) < xi(y1), strictly."""
    y2 = np.asarray(payload["y2"], dtype=float)
    w = np.asarray(payload["w"], dtype=float)
    gap = xi(ctx, y2 + w) - xi(ctx, y2)
    if gap > 0.0:
        return 0.0
    # Non-strict gap fails even when it rounds to zero.
    return max(2.0 * ctx.tol, -gap)


def eval_bisection_agreement(ctx: ScalarizationContext, payload: dict) -> float:
    """Closed form and bisection oracle agree within 10*tol."""
    y = np.asarray(payload["y"], dtype=float)
    return abs(xi(ctx, y) - xi_bisection(ctx, y))


PROPERTY_EVALUATORS = {
    "xi-membership-above": eval_membership_above,
    "xi-nonmembership-below": eval_membership_below,
    "xi-interior-below-excluded": eval_interior_below_excluded,
    "xi-interior-above-included": eval_interior_above_included,
    "xi-positive-homogeneity": eval_homogeneity,
    "xi-monotone": eval_monotone,
    "xi-subadditive": eval_subadditive,
    "xi-strictly-monotone": eval_strictly_monotone,
    "xi-closed-form-vs-bisection": eval_bisection_agreement,
}


def _property_payloads(
    ctx: ScalarizationContext, name: str, sampler: SampleSpec, count: int
):
    """Deterministic payload stream for one property."""
    lo, hi = sampler.coordinate_range
    d = ctx.cone.dim
    gen = stream(sampler.seed, f"{name}|{ctx.cone.descriptor()!r}")
    ys = gen.uniform(lo, hi, size=(count, d))
    if name == "xi-positive-homogeneity":
        lams = np.exp(gen.uniform(math.log(1e-3), math.log(1e3), size=count))
        return [{"y": y.tolist(), "lam": float(l)} for y, l in zip(ys, lams)]
    if name == "xi-monotone":
        ws = sample_cone_points(ctx.cone, gen, count, scale=max(abs(lo), abs(hi)))
        return [{"y2": y.tolist(), "w": w.tolist()} for y, w in zip(ys, ws)]
    if name == "xi-strictly-monotone":
        ws = sample_interior_points(
            ctx.cone, gen, count, scale=max(abs(lo), abs(hi)), depth=0.05
        )
        return [{"y2": y.tolist(), "w": w.tolist()} for y, w in zip(ys, ws)]
    if name == "xi-subadditive":
        y2s = gen.uniform(lo, hi, size=(count, d))
        return [{"y1": a.tolist(), "y2": b.tolist()} for a, b in zip(ys, y2s)]
    return [{"y": y.tolist()} for y in ys]


def check_scalarization_properties(
    ctx: ScalarizationContext, sampler: SampleSpec
) -> PropertyReport:
    """Sampled verification of the scalarization properties (i)-(viii)
    plus the closed-form/bisection agreement contract.

    Every property draws ``sampler.count`` payloads from its own stream;
    a failing property records the worst offending payload for replay.
    """
    report = PropertyReport(subject=f"xi over {ctx.cone!r}, e={ctx.e.tolist()}")
    for name, evaluator in PROPERTY_EVALUATORS.items():
        count = sampler.count
        tolerance = ctx.tol
        if name == "xi-closed-form-vs-bisection":
            tolerance = 10.0 * ctx.tol
        worst = 0.0
        bad = None
        payloads = _property_payloads(ctx, name, sampler, count)
        for payload in payloads:
            violation = evaluator(ctx, payload)
            if violation > worst:
                worst = violation
                bad = payload
        passed = worst <= tolerance
        report.outcomes.append(
            CheckOutcome(name, passed, len(payloads), worst, bad if not passed else None)
        )
    return report


def strong_monotonicity_counterexample(dim: int = 2) -> dict:
    """A comparable pair with equal scalarization on the orthant.

    With e = (1, ..., 1), y2 = (1, 0, ..., 0) and y1 = (1, 1, ..., 1)
    satisfy y1 >= y2, y1 != y2, yet xi(y1) = xi(y2) = 1 exactly: the
    scalarization is monotone but not strongly monotone.
    """
    cone = Orthant(dim)
    ctx = ScalarizationContext(cone, np.ones(dim))
    y2 = np.zeros(dim)
    y2[0] = 1.0
    y1 = np.ones(dim)
    assert order_leq(cone, y2, y1) and not np.array_equal(y1, y2)
    return {
        "e": ctx.e.tolist(),
        "y1": y1.tolist(),
        "y2": y2.tolist(),
        "xi_y1": xi(ctx, y1),
        "xi_y2": xi(ctx, y2),
        "difference_in_cone": order_leq(cone, y2, y1),
        "difference_interior": cone.strictly_contains(y1 - y2),
    }
