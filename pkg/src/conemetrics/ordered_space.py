"""Finite-dimensional ordered vector spaces: cones, order predicates, seminorms.

The ambient space is E = R^n.  A cone P induces the partial order
``x <= y iff y - x in P`` and the strict relation ``x << y iff y - x in
int(P)``.  Three cone families are supported:

* ``Orthant``    the nonnegative orthant {v : v_i >= 0 for all i},
* ``Lorentz``    the second-order cone {v : v_n >= ||(v_1..v_{n-1})||_2},
* ``Polyhedral`` {v : A v >= 0} for a matrix A of full column rank.

Seminorms come from a fixed catalog of kinds that are all monotone for the
orthant order, and a ``SeminormFamily`` aggregates them into the bounded
gauge h(u) = sum_k 2^-k q_k(u) / (1 + q_k(u)).

Interior membership uses a margin relative to max(1, ||v||_inf) so that the
strict relation stays meaningful across magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InteriorWitnessNotFound,
    NonFiniteEntry,
    NotStronglyMinihedral,
    PointednessUncertified,
)
from .reporting import CheckOutcome, PropertyReport

DEFAULT_INTERIOR_MARGIN = 1e-9

# Singular values below RANK_RTOL * sigma_max count as zero.
RANK_RTOL = 1e-10


def as_vector(entries, dim: int | None = None) -> np.ndarray:
    """Validate and freeze a 1-D float vector.

    Rejects NaN/inf entries; optionally enforces an expected dimension.
    The returned array is a read-only copy.
    """
    v = np.array(entries, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteEntry(f"vector has non-finite entries: {v}")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.size}")
    v.flags.writeable = False
    return v


class Cone:
    """Base class: a closed pointed convex cone with nonempty interior."""

    kind: str = ""
    dim: int = 0
    normal_constant: float | None = None

    def _slack(self, v: np.ndarray) -> float:
        """Smallest constraint margin of v; >= 0 on P, > 0 on int(P)."""
        raise NotImplementedError

    def _check_dim(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionMismatch(
                f"{self.kind} cone in R^{self.dim} got vector of shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise NonFiniteEntry(f"vector has non-finite entries: {v}")
        return v

    def contains(self, v, tol: float = 0.0) -> bool:
        """Membership in P with per-constraint slack -tol."""
        if tol < 0:
            raise ValueError("tol must be >= 0")
        v = self._check_dim(v)
        return self._slack(v) >= -tol

    def strictly_contains(self, v, margin: float = DEFAULT_INTERIOR_MARGIN) -> bool:
        """Membership in int(P): every constraint exceeds a relative margin.

        The margin scales with max(1, ||v||_inf); it must be positive.
        """
        if margin <= 0:
            raise ValueError("margin must be > 0")
        v = self._check_dim(v)
        scale = max(1.0, float(np.max(np.abs(v))) if v.size else 1.0)
        return self._slack(v) > margin * scale

    def interior_witness(self) -> np.ndarray:
        """A certified strictly interior point."""
        raise NotImplementedError

    def descriptor(self) -> tuple:
        """Hash-free identity used for equality and serialization."""
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        return isinstance(other, Cone) and self.descriptor() == other.descriptor()

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class Orthant(Cone):
    """Nonnegative orthant in R^n.  Normal with constant 1; strongly
    minihedral (componentwise suprema exist)."""

    kind = "orthant"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("orthant dimension must be >= 1")
        self.dim = int(dim)
        self.normal_constant = 1.0

    def _slack(self, v: np.ndarray) -> float:
        return float(np.min(v))

    def interior_witness(self) -> np.ndarray:
        return as_vector(np.ones(self.dim))

    def descriptor(self) -> tuple:
        return ("orthant", self.dim)


class Lorentz(Cone):
    """Second-order cone {v : v_n >= ||(v_1, ..., v_{n-1})||_2}, n >= 2."""

    kind = "lorentz"

    def __init__(self, dim: int):
        if dim < 2:
            raise ValueError("lorentz dimension must be >= 2")
        self.dim = int(dim)
        self.normal_constant = None

    def _slack(self, v: np.ndarray) -> float:
        return float(v[-1] - np.linalg.norm(v[:-1]))

    def interior_witness(self) -> np.ndarray:
        w = np.zeros(self.dim)
        w[-1] = 1.0
        return as_vector(w)

    def descriptor(self) -> tuple:
        return ("lorentz", self.dim)


class Polyhedral(Cone):
    """Cone {v : A v >= 0 componentwise} for an m x n matrix A.

    Construction certifies pointedness (numerical column rank of A equals
    n) and nonemptiness of the interior; a witness with A w > 0 is found
    by a least-squares candidate followed by random search up to
    ``witness_budget`` draws.
    """

    kind = "polyhedral"

    def __init__(self, matrix, witness_budget: int = 1000):
        A = np.array(matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise ValueError("constraint matrix must be 2-D and nonempty")
        if not np.all(np.isfinite(A)):
            raise NonFiniteEntry("constraint matrix has non-finite entries")
        m, n = A.shape
        sigma = np.linalg.svd(A, compute_uv=False)
        rank = int(np.sum(sigma > RANK_RTOL * sigma[0])) if sigma[0] > 0 else 0
        if rank < n:
            raise PointednessUncertified(
                f"rank(A) = {rank} < {n}; the cone contains a line"
            )
        A.flags.writeable = False
        self.matrix = A
        self.dim = n
        self.normal_constant = None
        self._witness = self._certify_interior(witness_budget)

    def _certify_interior(self, budget: int) -> np.ndarray:
        A = self.matrix
        # Least-squares candidate solving A w ~ 1 before random search.
        w, *_ = np.linalg.lstsq(A, np.ones(A.shape[0]), rcond=None)
        rng = np.random.Generator(np.random.Philox(key=np.uint64(0)))
        candidates = [w] + list(rng.standard_normal((max(0, budget), self.dim)))
        for cand in candidates:
            if np.min(A @ cand) > 0:
                scaled = cand / max(1.0, float(np.max(np.abs(cand))))
                return as_vector(scaled)
        raise InteriorWitnessNotFound(
            f"no strictly interior point found within budget {budget}"
        )

    def _slack(self, v: np.ndarray) -> float:
        return float(np.min(self.matrix @ v))

    def interior_witness(self) -> np.ndarray:
        return self._witness

    def descriptor(self) -> tuple:
        return ("polyhedral", self.dim, tuple(map(tuple, self.matrix.tolist())))

    def __repr__(self) -> str:
        return f"Polyhedral(shape={self.matrix.shape})"


def order_leq(cone: Cone, x, y, tol: float = 0.0) -> bool:
    """x <= y in the cone order: y - x in P (with slack tol)."""
    x = cone._check_dim(x)
    y = cone._check_dim(y)
    return cone.contains(y - x, tol)


def order_ll(cone: Cone, x, y, margin: float = DEFAULT_INTERIOR_MARGIN) -> bool:
    """x << y in the cone order: y - x in int(P)."""
    x = cone._check_dim(x)
    y = cone._check_dim(y)
    return cone.strictly_contains(y - x, margin)


def least_upper_bound(cone: Cone, points) -> np.ndarray:
    """Least upper bound of a finite set, where the cone order admits one.

    Only the orthant order is strongly minihedral in this catalog; there
    the supremum is the componentwise maximum.
    """
    pts = [cone._check_dim(p) for p in points]
    if not pts:
        raise ValueError("least_upper_bound of an empty set")
    if not isinstance(cone, Orthant):
        raise NotStronglyMinihedral(
            f"{cone.kind} cones are not strongly minihedral in this catalog"
        )
    return as_vector(np.max(np.stack(pts), axis=0))


# ---------------------------------------------------------------------------
# Seminorm catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Coordinate:
    """q(v) = |v_k| for a 1-based coordinate index k."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("coordinate index is 1-based and must be >= 1")

    monotone = True

    def __call__(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if self.index > v.size:
            raise DimensionMismatch(
                f"coordinate index {self.index} out of range for dim {v.size}"
            )
        return float(abs(v[self.index - 1]))

    def label(self) -> str:
        return f"coord[{self.index}]"


@dataclass(frozen=True)
class PartialAbsSum:
    """q(v) = sum_{i<=k} |v_i|: the truncated sequence-space seminorms."""

    upto: int

    def __post_init__(self):
        if self.upto < 1:
            raise ValueError("partial sum level must be >= 1")

    monotone = True

    def __call__(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if self.upto > v.size:
            raise DimensionMismatch(
                f"partial sum level {self.upto} out of range for dim {v.size}"
            )
        return float(np.sum(np.abs(v[: self.upto])))

    def label(self) -> str:
        return f"abssum[1..{self.upto}]"


class WeightedAbsSum:
    """q(v) = sum_i w_i |v_i| with nonnegative weights."""

    monotone = True

    def __init__(self, weights):
        w = as_vector(weights)
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        self.weights = w

    def __call__(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if v.size != self.weights.size:
            raise DimensionMismatch(
                f"weight vector has dim {self.weights.size}, input has {v.size}"
            )
        return float(np.sum(self.weights * np.abs(v)))

    def label(self) -> str:
        return f"wsum{self.weights.tolist()}"

    def __eq__(self, other):
        return isinstance(other, WeightedAbsSum) and np.array_equal(
            self.weights, other.weights
        )

    def __repr__(self):
        return f"WeightedAbsSum({self.weights.tolist()})"


SEMINORM_KINDS = (Coordinate, PartialAbsSum, WeightedAbsSum)


def seminorm_eval(q, v) -> float:
    """Evaluate a catalog seminorm on a vector."""
    return q(np.asarray(v, dtype=float))


class SeminormFamily:
    """Ordered seminorms q_1, q_2, ... with the bounded aggregator

        h(u) = sum_{k=1..min(K, len)} 2^-k q_k(u) / (1 + q_k(u)).

    Weights 2^-k follow list order starting at k = 1, so h < 1 always and
    h(0) = 0.  The family is flagged monotone only when every member kind
    belongs to the monotone catalog; all current kinds do.
    """

    def __init__(self, seminorms, truncation_level: int | None = None):
        sems = tuple(seminorms)
        if not sems:
            raise ValueError("seminorm family must be nonempty")
        for q in sems:
            if not isinstance(q, SEMINORM_KINDS):
                raise ValueError(
                    f"seminorm {q!r} is not in the monotone catalog; "
                    "arbitrary seminorms are rejected"
                )
        self.seminorms = sems
        self.truncation_level = (
            len(sems) if truncation_level is None else int(truncation_level)
        )
        if self.truncation_level < 1:
            raise ValueError("truncation level must be >= 1")

    @property
    def monotone(self) -> bool:
        return all(getattr(q, "monotone", False) for q in self.seminorms)

    def __len__(self) -> int:
        return len(self.seminorms)

    def active(self):
        """Members that participate in h, honoring the truncation level."""
        return self.seminorms[: min(self.truncation_level, len(self.seminorms))]

    def h(self, u) -> float:
        u = np.asarray(u, dtype=float)
        total = 0.0
        for k, q in enumerate(self.active(), start=1):
            qu = q(u)
            total += 0.5**k * qu / (1.0 + qu)
        return total

    def values(self, u) -> list[float]:
        """All active seminorm values q_k(u)."""
        return [q(u) for q in self.active()]

    def labels(self) -> list[str]:
        return [q.label() for q in self.active()]

    def descriptor(self) -> tuple:
        parts = []
        for q in self.seminorms:
            if isinstance(q, Coordinate):
                parts.append(("coordinate", q.index))
            elif isinstance(q, PartialAbsSum):
                parts.append(("partial_abs_sum", q.upto))
            else:
                parts.append(("weighted_abs_sum", tuple(q.weights.tolist())))
        return (tuple(parts), self.truncation_level)

    def __eq__(self, other):
        return isinstance(other, SeminormFamily) and self.descriptor() == other.descriptor()

    def __repr__(self):
        return f"SeminormFamily({len(self.seminorms)} seminorms, K={self.truncation_level})"


def coordinate_family(levels: int) -> SeminormFamily:
    """h built from |u_k|, k = 1..levels (the sequence-space example form)."""
    return SeminormFamily([Coordinate(k) for k in range(1, levels + 1)])


def partial_sum_family(levels: int) -> SeminormFamily:
    """h built from the partial absolute sums q_k(u) = sum_{i<=k} |u_i|."""
    return SeminormFamily([PartialAbsSum(k) for k in range(1, levels + 1)])


def h_eval(family: SeminormFamily, u) -> float:
    """Aggregator value h(u); 0 <= h < 1 and h(0) = 0."""
    return family.h(u)


# ---------------------------------------------------------------------------
# Cone point sampling (shared by validation and the harness)
# ---------------------------------------------------------------------------


def sample_cone_points(
    cone: Cone, gen: np.random.Generator, count: int, scale: float = 1.0
) -> np.ndarray:
    """Deterministic points of P, shape (count, dim).

    Orthant and invertible polyhedral cones are sampled exactly; tall
    polyhedral systems fall back to rejection around the interior witness.
    """
    d = cone.dim
    if isinstance(cone, Orthant):
        return gen.uniform(0.0, scale, size=(count, d))
    if isinstance(cone, Lorentz):
        head = gen.uniform(-scale, scale, size=(count, d - 1))
        stretch = 1.0 + gen.uniform(0.0, 1.0, size=count)
        out = np.empty((count, d))
        out[:, :-1] = head
        out[:, -1] = np.linalg.norm(head, axis=1) * stretch
        return out
    if isinstance(cone, Polyhedral):
        A = cone.matrix
        m, n = A.shape
        if m == n:
            s = gen.uniform(0.0, scale, size=(count, m))
            return np.linalg.solve(A, s.T).T
        w = cone.interior_witness()
        out = np.empty((count, d))
        filled = 0
        attempts = 0
        while filled < count:
            attempts += 1
            if attempts > 200 * count:
                raise InteriorWitnessNotFound(
                    "rejection sampling of the polyhedral cone stalled"
                )
            cand = gen.uniform(0.5, 2.0) * scale * w + gen.uniform(
                -0.5, 0.5, size=d
            ) * scale
            if cone.contains(cand, 0.0):
                out[filled] = cand
                filled += 1
        return out
    raise TypeError(f"unknown cone type {type(cone)!r}")


def sample_interior_points(
    cone: Cone,
    gen: np.random.Generator,
    count: int,
    scale: float = 1.0,
    depth: float = 0.05,
) -> np.ndarray:
    """Points with constraint slack at least ``depth * scale``."""
    d = cone.dim
    if isinstance(cone, Orthant):
        return gen.uniform(depth * scale, scale, size=(count, d))
    if isinstance(cone, Lorentz):
        head = gen.uniform(-scale, scale, size=(count, d - 1))
        out = np.empty((count, d))
        out[:, :-1] = head
        out[:, -1] = np.linalg.norm(head, axis=1) + gen.uniform(
            depth * scale, scale, size=count
        )
        return out
    if isinstance(cone, Polyhedral):
        A = cone.matrix
        m, n = A.shape
        if m == n:
            s = gen.uniform(depth * scale, scale, size=(count, m))
            return np.linalg.solve(A, s.T).T
        base = sample_cone_points(cone, gen, count, scale)
        return base + depth * scale * cone.interior_witness()
    raise TypeError(f"unknown cone type {type(cone)!r}")


# ---------------------------------------------------------------------------
# Sampled cone validation
# ---------------------------------------------------------------------------


def validate_cone(
    cone: Cone, sample_budget: int = 1000, rng_seed: int = 0
) -> PropertyReport:
    """Sampled certification of the cone axioms.

    Checks additive closure, positive homogeneity, pointedness, interior
    nonemptiness (witness recorded), and interior arithmetic.  Polyhedral
    pointedness rests on the rank certificate established at construction;
    a rank-deficient matrix never reaches this function.
    """
    if sample_budget < 1:
        raise ValueError("sample_budget must be >= 1")
    from .sampling import stream  # local import to keep module layering flat

    gen = stream(rng_seed, f"validate-{cone.descriptor()!r}")
    report = PropertyReport(subject=repr(cone))
    tol = 1e-12

    pts = sample_cone_points(cone, gen, sample_budget, scale=2.0)
    partner = sample_cone_points(cone, gen, sample_budget, scale=2.0)

    worst = 0.0
    bad = None
    for v, w in zip(pts, partner):
        slack = cone._slack(v + w)
        if -slack > worst:
            worst, bad = -slack, {"v": v.tolist(), "w": w.tolist()}
    report.outcomes.append(
        CheckOutcome(
            "additive-closure", worst <= tol, sample_budget, worst,
            bad if worst > tol else None,
        )
    )

    lams = gen.uniform(0.0, 10.0, size=sample_budget)
    worst = 0.0
    bad = None
    for v, lam in zip(pts, lams):
        slack = cone._slack(lam * v)
        if -slack > worst:
            worst, bad = -slack, {"v": v.tolist(), "lambda": float(lam)}
    report.outcomes.append(
        CheckOutcome(
            "positive-homogeneity", worst <= tol, sample_budget, worst,
            bad if worst > tol else None,
        )
    )

    # Pointedness: nonzero cone points must leave the cone under negation.
    worst = 0.0
    bad = None
    checked = 0
    for v in pts:
        norm = float(np.max(np.abs(v)))
        if norm <= 1e-9:
            continue
        checked += 1
        slack = cone._slack(-v)
        if slack > worst:
            worst, bad = slack, {"v": v.tolist()}
    pointed = worst <= tol
    report.outcomes.append(
        CheckOutcome(
            "pointedness-sampled", pointed, checked, worst, bad if not pointed else None
        )
    )

    witness = cone.interior_witness()
    interior_ok = cone.strictly_contains(witness)
    report.outcomes.append(
        CheckOutcome(
            "interior-nonempty",
            interior_ok,
            1,
            0.0 if interior_ok else 1.0,
            None if interior_ok else {"witness": witness.tolist()},
        )
    )

    inner = sample_interior_points(cone, gen, sample_budget, scale=2.0)
    inner2 = sample_interior_points(cone, gen, sample_budget, scale=2.0)
    pos_lams = gen.uniform(0.1, 10.0, size=sample_budget)
    worst = 0.0
    bad = None
    for u, v, lam in zip(inner, inner2, pos_lams):
        s1 = cone._slack(u + v)
        s2 = cone._slack(lam * u)
        if -min(s1, s2) > worst:
            worst, bad = -min(s1, s2), {"u": u.tolist(), "v": v.tolist(), "lambda": float(lam)}
    interior_arith = worst <= 0.0
    report.outcomes.append(
        CheckOutcome(
            "interior-arithmetic", interior_arith, sample_budget, max(worst, 0.0),
            bad if not interior_arith else None,
        )
    )
    report.details["interior_witness"] = witness.tolist()
    return report
