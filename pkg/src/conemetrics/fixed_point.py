"""Fixed-point iteration under cone-order contraction hypotheses.

Three solver families are provided:

* ``banach_solve``: p(Tx, Ty) <= k p(x, y) with k < 1.  Iteration stops on
  the a-posteriori bound k/(1-k) * d_p(x_n, x_{n-1}) <= tol, which bounds
  the distance to the true fixed point.
* ``boyd_wong_solve``: p(Tx, Ty) <= phi(p(x, y)) for an increasing
  comparison map phi on the cone.  Scalarizing phi through xi_e yields a
  scalar comparison function below the identity, so the classical
  Boyd-Wong argument applies to d_p.  A linear comparison reuses the
  Banach stopping rule with k = xi_e(phi(e)); otherwise a double residual
  test stops the loop.
* ``weak_contraction_iterate``: the experimental condition
  p(Tx, Ty) <= p(x, y) - phi(p(x, y)).  Scalarization does not transport
  this condition, so the run certifies only the cone-order monotone decay
  of the residual chain, never convergence.

The map and comparison catalogs are closed so that every hypothesis is
machine checkable; extending them means supplying a side-condition check.

Banach iterations run in extended precision internally (when the platform
provides it) so the per-step residual ratio certificate holds at the
reported tolerance even once residuals approach the stopping threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DivergenceError, HypothesisViolated
from .ordered_space import Cone, as_vector, order_leq
from .reporting import CheckOutcome, PropertyReport
from .cone_metric import ConeMetricSpace
from .scalarization import ScalarizationContext, xi
from .sampling import SampleSpec, stream

# Extended precision is used when it genuinely extends float64.
_WORK_DTYPE = (
    np.longdouble if np.finfo(np.longdouble).eps < 1e-18 else np.float64
)


# ---------------------------------------------------------------------------
# Self-map catalog
# ---------------------------------------------------------------------------


class SelfMap:
    """Base class for self-maps T: X -> X from the closed catalog."""

    def apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample_domain(
        self, gen: np.random.Generator, count: int, lo: float, hi: float
    ) -> np.ndarray:
        """Points of the map's domain inside the coordinate box."""
        raise NotImplementedError

    def descriptor(self) -> tuple:
        raise NotImplementedError


class DiagonalAffine(SelfMap):
    """T(x) = a * x + b componentwise; a contraction iff max |a_i| < 1."""

    def __init__(self, diag, shift):
        self.diag = as_vector(diag)
        self.shift = as_vector(shift, dim=self.diag.size)
        self.dim = self.diag.size

    @property
    def contraction_modulus(self) -> float:
        return float(np.max(np.abs(self.diag)))

    def fixed_point(self) -> np.ndarray:
        """Analytic fixed point b / (1 - a); requires a_i != 1."""
        if np.any(self.diag == 1.0):
            raise ValueError("no unique fixed point: some a_i equals 1")
        return self.shift / (1.0 - self.diag)

    def apply(self, x):
        return self.diag * x + self.shift

    def sample_domain(self, gen, count, lo, hi):
        return gen.uniform(lo, hi, size=(count, self.dim))

    def descriptor(self) -> tuple:
        return (
            "diagonal_affine",
            tuple(self.diag.tolist()),
            tuple(self.shift.tolist()),
        )


class CoordinateRatioMap(SelfMap):
    """T(x)_i = x_i / (1 + x_i) on the nonnegative orthant.

    Satisfies |Ts - Tt| <= |s - t| / (1 + |s - t|) coordinatewise for
    s, t >= 0, so it is a nonlinear contraction with the ratio comparison
    function; its unique fixed point is the origin.
    """

    def __init__(self, dim: int):
        self.dim = int(dim)

    def apply(self, x):
        return x / (1.0 + x)

    def sample_domain(self, gen, count, lo, hi):
        return np.abs(gen.uniform(lo, hi, size=(count, self.dim)))

    def descriptor(self) -> tuple:
        return ("coordinate_ratio", self.dim)


class ClippedQuadratic(SelfMap):
    """T(x)_i = clip(x_i - x_i^2 / 2, 0, 1) on the unit box.

    On [0, 1] the decrement never overshoots, and
    |Ts - Tt| <= |s - t| - (s - t)^2 / 2, the weak-contraction inequality
    with the half-square comparison map.
    """

    def __init__(self, dim: int):
        self.dim = int(dim)

    def apply(self, x):
        return np.clip(x - 0.5 * x * x, 0.0, 1.0)

    def sample_domain(self, gen, count, lo, hi):
        return gen.uniform(0.0, 1.0, size=(count, self.dim))

    def descriptor(self) -> tuple:
        return ("clipped_quadratic", self.dim)


class Composite(SelfMap):
    """Composition of catalog maps, applied in list order."""

    def __init__(self, maps):
        self.maps = tuple(maps)
        if not self.maps:
            raise ValueError("composite of no maps")

    def apply(self, x):
        for m in self.maps:
            x = m.apply(x)
        return x

    def sample_domain(self, gen, count, lo, hi):
        return self.maps[0].sample_domain(gen, count, lo, hi)

    def descriptor(self) -> tuple:
        return ("composite", tuple(m.descriptor() for m in self.maps))


# ---------------------------------------------------------------------------
# Comparison function catalog (order maps P -> P)
# ---------------------------------------------------------------------------


class ComparisonFunction:
    """Increasing self-map of the cone used as a contraction gauge."""

    def apply(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def descriptor(self) -> tuple:
        raise NotImplementedError


class LinearComparison(ComparisonFunction):
    """phi(u) = alpha * u with 0 <= alpha < 1.

    Rays scale exactly: phi(r e) = r phi(e), and xi_e(phi(e)) = alpha.
    """

    def __init__(self, alpha: float):
        if not 0.0 <= alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
        self.alpha = float(alpha)

    def apply(self, u):
        return self.alpha * u

    def descriptor(self) -> tuple:
        return ("linear", self.alpha)


class RatioComparison(ComparisonFunction):
    """phi(u)_i = u_i / (1 + u_i): increasing, continuous, phi(0) = 0,
    and phi(r e) << r e strictly for r > 0 and interior e."""

    def apply(self, u):
        return u / (1.0 + u)

    def descriptor(self) -> tuple:
        return ("ratio",)


class HalfSquareComparison(ComparisonFunction):
    """phi(u)_i = u_i^2 / 2: the gauge of the clipped quadratic map's
    weak-contraction inequality.  Vanishes only at the origin; valid as a
    decrement gauge for arguments below 2."""

    def apply(self, u):
        return 0.5 * u * u

    def descriptor(self) -> tuple:
        return ("half_square",)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


class Certificate(str, Enum):
    BANACH = "BanachVerified"
    BOYD_WONG = "BoydWongVerified"
    WEAK_MONOTONE = "WeakContractionMonotone"
    UNVERIFIED = "Unverified"


@dataclass
class FixedPointReport:
    """Outcome of a solver run.

    ``residual_history`` holds d_p(x_{n+1}, x_n) per step;
    ``contraction_estimate`` is the largest ratio of successive residuals
    (0 when fewer than two nonzero residuals exist).
    """

    converged: bool
    iterations: int
    final_point: np.ndarray
    residual_history: list[float]
    contraction_estimate: float
    certificate: Certificate
    failure_step: int | None = None
    failure_condition: str | None = None

    def to_dict(self) -> dict:
        out = {
            "converged": self.converged,
            "iterations": self.iterations,
            "final_point": self.final_point.tolist(),
            "residual_final": (
                self.residual_history[-1] if self.residual_history else 0.0
            ),
            "contraction_estimate": self.contraction_estimate,
            "certificate": self.certificate.value,
        }
        if self.failure_step is not None:
            out["failure_step"] = self.failure_step
            out["failure_condition"] = self.failure_condition
        return out


def _ratio_estimate(residuals: list[float]) -> float:
    ratios = [
        residuals[i + 1] / residuals[i]
        for i in range(len(residuals) - 1)
        if residuals[i] > 0.0
    ]
    return max(ratios) if ratios else 0.0


def _default_context(cone: Cone) -> ScalarizationContext:
    return ScalarizationContext(cone, cone.interior_witness())


def _reject_nonfinite(x) -> None:
    if not np.all(np.isfinite(np.asarray(x, dtype=float))):
        raise DivergenceError("iterate left the finite range")


# ---------------------------------------------------------------------------
# Contraction verification and the Banach solver
# ---------------------------------------------------------------------------


def verify_contraction(
    space: ConeMetricSpace, T: SelfMap, k: float, sampler: SampleSpec
) -> PropertyReport:
    """Sampled check of the cone-order contraction p(Tx, Ty) <= k p(x, y)."""
    if not 0.0 <= k < 1.0:
        raise ValueError(f"contraction factor must lie in [0, 1), got {k}")
    lo, hi = sampler.coordinate_range
    gen = stream(sampler.seed, f"contraction|{T.descriptor()!r}|{k}")
    xs = T.sample_domain(gen, sampler.count, lo, hi)
    ys = T.sample_domain(gen, sampler.count, lo, hi)
    cone = space.value_cone
    worst = 0.0
    bad = None
    for x, y in zip(xs, ys):
        gap = k * space.p(x, y) - space.p(T.apply(x), T.apply(y))
        violation = max(0.0, -cone._slack(gap))
        if violation > worst:
            worst = violation
            bad = {"x": x.tolist(), "y": y.tolist(), "violation": violation}
    scale = max(1.0, abs(hi), abs(lo))
    passed = worst <= 1e-12 * scale
    report = PropertyReport(subject=f"contraction k={k} for {T.descriptor()!r}")
    report.outcomes.append(
        CheckOutcome(
            "cone-order-contraction", passed, sampler.count, worst,
            bad if not passed else None,
        )
    )
    return report


def banach_solve(
    space: ConeMetricSpace,
    T: SelfMap,
    k: float,
    x0,
    tol: float,
    max_iter: int = 500,
    ctx: ScalarizationContext | None = None,
    skip_verification: bool = False,
) -> FixedPointReport:
    """Iterate x_{n+1} = T x_n under a verified Banach contraction.

    Stops when k/(1-k) * d_p(x_n, x_{n-1}) <= tol, which bounds
    d_p(x_n, fixed point) by tol.  Unless ``skip_verification`` is set, a
    sampled contraction check runs first and a failure raises
    HypothesisViolated; skipping yields an Unverified certificate.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if not 0.0 <= k < 1.0:
        raise ValueError(f"contraction factor must lie in [0, 1), got {k}")
    if ctx is None:
        ctx = _default_context(space.value_cone)

    certificate = Certificate.UNVERIFIED
    if not skip_verification:
        sampler = SampleSpec(count=256, seed=7, coordinate_range=(-8.0, 8.0))
        report = verify_contraction(space, T, k, sampler)
        if not report.passed:
            worst = report.outcomes[0]
            raise HypothesisViolated(
                "cone-order-contraction",
                f"violated by {worst.max_violation:.3e} on sampled pairs",
            )
        certificate = Certificate.BANACH

    x = space._check_point(x0).astype(_WORK_DTYPE)
    residuals: list[float] = []
    converged = False
    iterations = 0
    factor = k / (1.0 - k)
    for n in range(1, max_iter + 1):
        x_next = T.apply(x)
        _reject_nonfinite(x_next)
        r = xi(ctx, np.asarray(space.p(x_next, x), dtype=float))
        residuals.append(float(r))
        x = x_next
        iterations = n
        if factor * r <= tol:
            converged = True
            break

    return FixedPointReport(
        converged=converged,
        iterations=iterations,
        final_point=np.asarray(x, dtype=float),
        residual_history=residuals,
        contraction_estimate=_ratio_estimate(residuals),
        certificate=certificate if converged else Certificate.UNVERIFIED,
    )


# ---------------------------------------------------------------------------
# Scalarized nonlinear contractions
# ---------------------------------------------------------------------------


def scalarize_comparison(
    ctx: ScalarizationContext, comparison: ComparisonFunction, r: float
) -> float:
    """The scalar comparison function induced by phi along the e-ray.

    Linear comparisons scalarize to xi_e(phi(e)) * r; nonlinear ones to
    xi_e(phi(r e)).  Both are nondecreasing in r and vanish at 0.
    """
    if r < 0:
        raise ValueError(f"scalar argument must be >= 0, got {r}")
    if isinstance(comparison, LinearComparison):
        return xi(ctx, comparison.apply(ctx.e)) * r
    return xi(ctx, comparison.apply(r * ctx.e))


def _check_comparison_hypotheses(
    space: ConeMetricSpace,
    T: SelfMap,
    comparison: ComparisonFunction,
    ctx: ScalarizationContext,
) -> None:
    """Sampled side conditions for the scalarized solver; raises on failure."""
    from .ordered_space import sample_cone_points

    cone = space.value_cone
    gen = stream(11, f"hypotheses|{T.descriptor()!r}|{comparison.descriptor()!r}")
    count = 512

    us = sample_cone_points(cone, gen, count, scale=5.0)
    ws = sample_cone_points(cone, gen, count, scale=5.0)
    for u, w in zip(us, ws):
        if not order_leq(cone, comparison.apply(u), comparison.apply(u + w), 1e-12):
            raise HypothesisViolated(
                "comparison-increasing", f"failed at u={u.tolist()}, w={w.tolist()}"
            )

    rs = np.exp(gen.uniform(math.log(1e-3), math.log(1e3), size=count))
    if isinstance(comparison, LinearComparison):
        slope = xi(ctx, comparison.apply(ctx.e))
        if not slope < 1.0:
            raise HypothesisViolated(
                "scalarized-slope-below-one", f"xi_e(phi(e)) = {slope}"
            )
        for r in rs:
            lhs = comparison.apply(r * ctx.e)
            rhs = r * comparison.apply(ctx.e)
            if not order_leq(cone, lhs, rhs, 1e-9 * max(1.0, r)):
                raise HypothesisViolated(
                    "ray-domination", f"phi(r e) > r phi(e) at r={r}"
                )
    else:
        for r in rs:
            lhs = comparison.apply(r * ctx.e)
            if not cone.strictly_contains(r * ctx.e - lhs, 1e-12):
                raise HypothesisViolated(
                    "ray-interior-drop", f"phi(r e) << r e fails at r={float(r)}"
                )

    xs = T.sample_domain(gen, count, -8.0, 8.0)
    ys = T.sample_domain(gen, count, -8.0, 8.0)
    for x, y in zip(xs, ys):
        gap = comparison.apply(space.p(x, y)) - space.p(T.apply(x), T.apply(y))
        scale = max(1.0, float(np.max(np.abs(gap))))
        if not cone.contains(gap, 1e-12 * scale):
            raise HypothesisViolated(
                "cone-order-comparison-bound",
                f"p(Tx, Ty) <= phi(p(x, y)) fails at x={x.tolist()}, y={y.tolist()}",
            )


def boyd_wong_solve(
    space: ConeMetricSpace,
    T: SelfMap,
    comparison: ComparisonFunction,
    ctx: ScalarizationContext,
    x0,
    tol: float,
    max_iter: int = 100_000,
) -> FixedPointReport:
    """Fixed-point iteration under p(Tx, Ty) <= phi(p(x, y)).

    All side conditions are verified on samples before iterating; any
    failure raises HypothesisViolated naming the condition.  The linear
    comparison path reuses the Banach a-posteriori stopping rule with
    k = xi_e(phi(e)); otherwise iteration stops once two consecutive
    residuals both fall below tol.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if ctx.cone != space.value_cone:
        raise ValueError("context cone differs from the space's value cone")
    _check_comparison_hypotheses(space, T, comparison, ctx)

    if isinstance(comparison, LinearComparison):
        k = xi(ctx, comparison.apply(ctx.e))
        report = banach_solve(
            space, T, k, x0, tol, max_iter=max_iter, ctx=ctx, skip_verification=True
        )
        report.certificate = (
            Certificate.BOYD_WONG if report.converged else Certificate.UNVERIFIED
        )
        return report

    x_prev = space._check_point(x0).astype(float)
    residuals: list[float] = []
    converged = False
    x = T.apply(x_prev)
    _reject_nonfinite(x)
    r_prev = xi(ctx, np.asarray(space.p(x, x_prev), dtype=float))
    residuals.append(float(r_prev))
    for _ in range(1, max_iter):
        x_next = T.apply(x)
        _reject_nonfinite(x_next)
        r = xi(ctx, np.asarray(space.p(x_next, x), dtype=float))
        residuals.append(float(r))
        stop = r_prev <= tol and r <= tol
        x_prev, x, r_prev = x, x_next, r
        if stop:
            converged = True
            break

    return FixedPointReport(
        converged=converged,
        iterations=len(residuals),
        final_point=np.asarray(x, dtype=float),
        residual_history=residuals,
        contraction_estimate=_ratio_estimate(residuals),
        certificate=Certificate.BOYD_WONG if converged else Certificate.UNVERIFIED,
    )


# ---------------------------------------------------------------------------
# Experimental weak-contraction iteration
# ---------------------------------------------------------------------------


def weak_contraction_iterate(
    space: ConeMetricSpace,
    T: SelfMap,
    comparison: ComparisonFunction,
    x0,
    budget: int,
    ctx: ScalarizationContext | None = None,
    stop_tol: float = 0.0,
) -> FixedPointReport:
    """Iterate under p(Tx, Ty) <= p(x, y) - phi(p(x, y)), checked along
    the orbit only.

    No scalarized convergence guarantee exists for this condition, so the
    strongest certificate is the cone-order monotone decrease of the
    residual vectors, which the decrement inequality implies.  A violated
    step is flagged in the report and iteration stops there.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if ctx is None:
        ctx = _default_context(space.value_cone)
    zero = np.zeros(space.value_cone.dim)
    phi_zero = comparison.apply(zero)
    if np.any(phi_zero != 0.0):
        raise HypothesisViolated(
            "comparison-vanishes-at-zero", f"phi(0) = {phi_zero.tolist()}"
        )

    cone = space.value_cone
    x = space._check_point(x0).astype(float)
    x_next = T.apply(x)
    _reject_nonfinite(x_next)
    v_prev = space.p(x, x_next)
    residuals = [xi(ctx, np.asarray(v_prev, dtype=float))]
    failure_step = None
    failure_condition = None

    for n in range(1, budget):
        if residuals[-1] <= stop_tol:
            break
        x, x_next = x_next, T.apply(x_next)
        _reject_nonfinite(x_next)
        v = space.p(x, x_next)
        residuals.append(xi(ctx, np.asarray(v, dtype=float)))
        scale = max(1.0, float(np.max(np.abs(v_prev))))
        decrement = v_prev - comparison.apply(v_prev) - v
        if not cone.contains(decrement, 1e-12 * scale):
            failure_step = n
            failure_condition = "orbit-decrement-inequality"
            break
        if not cone.contains(v_prev - v, 1e-12 * scale):
            failure_step = n
            failure_condition = "residual-chain-monotone"
            break
        v_prev = v

    chain_ok = failure_step is None
    return FixedPointReport(
        converged=residuals[-1] <= stop_tol,
        iterations=len(residuals),
        final_point=np.asarray(x_next, dtype=float),
        residual_history=[float(r) for r in residuals],
        contraction_estimate=_ratio_estimate([float(r) for r in residuals]),
        certificate=(
            Certificate.WEAK_MONOTONE if chain_ok else Certificate.UNVERIFIED
        ),
        failure_step=failure_step,
        failure_condition=failure_condition,
    )
