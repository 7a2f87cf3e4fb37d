"""Cone metric spaces and the scalar metrics they induce.

A space (X, p) carries a vector-valued distance p: X x X -> E whose values
live in the cone P and obey the metric axioms in the cone order:

    (M1) p(x, y) >= 0        (M2) p(x, y) = 0 iff x = y
    (M3) p(x, y) = p(y, x)   (M4) p(x, y) <= p(x, z) + p(z, y)

Two scalar metrics are induced:

* ``dp_eval``  composes p with the nonlinear scalarization xi_e.
* ``dS_eval``  composes p with the seminorm aggregator h.  For a monotone
  family under the orthant order, inf { h(u) : u >= p(x, y) } is attained
  at u = p(x, y), so the composition computes the infimum exactly.

Finite tabulated spaces are validated exhaustively at load; continuous
kinds are validated by sampling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    MonotonicityRequired,
    NonFiniteEntry,
    UnsupportedOrder,
)
from .ordered_space import (
    DEFAULT_INTERIOR_MARGIN,
    Cone,
    Orthant,
    SeminormFamily,
    as_vector,
    least_upper_bound,
    order_leq,
    order_ll,
)
from .scalarization import ScalarizationContext, xi
from .sampling import stream


class ConeMetricSpace:
    """Base class; concrete kinds implement the distance map."""

    point_dim: int
    value_cone: Cone

    def p(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def _check_point(self, x) -> np.ndarray:
        x = np.asarray(x)
        if not np.issubdtype(x.dtype, np.floating):
            x = x.astype(float)  # ints and lists; keeps longdouble untouched
        if x.shape != (self.point_dim,):
            raise DimensionMismatch(
                f"space over R^{self.point_dim} got point of shape {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise NonFiniteEntry(f"point has non-finite entries: {x}")
        return x

    def _sampled_axiom_check(self, samples: int = 32, box: float = 5.0):
        """Constructor-time sampled validation of M1-M4."""
        gen = stream(0, f"space-axioms-{type(self).__name__}-{self.point_dim}")
        triples = gen.uniform(-box, box, size=(samples, 3, self.point_dim))
        cone = self.value_cone
        for x, y, z in triples:
            pxy = self.p(x, y)
            pyx = self.p(y, x)
            scale = max(1.0, float(np.max(np.abs(pxy))))
            if not cone.contains(pxy, 1e-12 * scale):
                raise ValueError(
                    f"(M1) failed: p({x}, {y}) = {pxy} is not in the value cone"
                )
            if not np.allclose(pxy, pyx, rtol=0.0, atol=1e-12 * scale):
                raise ValueError(f"(M3) failed at ({x}, {y})")
            if not np.array_equal(x, y) and not np.any(np.abs(pxy) > 0):
                raise ValueError(f"(M2) failed: distinct points at zero distance")
            rest = self.p(x, z) + self.p(z, y) - pxy
            rscale = max(1.0, float(np.max(np.abs(rest))))
            if not cone.contains(rest, 1e-12 * rscale):
                raise ValueError(f"(M4) failed at ({x}, {y}, {z})")
            if np.any(self.p(x, x) != 0.0):
                raise ValueError(f"(M2) failed: p(x, x) != 0 at {x}")


class ComponentwiseAbs(ConeMetricSpace):
    """p(x, y) = (|x_i - y_i|)_i into E = R^m with the same dimension."""

    def __init__(self, point_dim: int, value_cone: Cone | None = None):
        if point_dim < 1:
            raise ValueError("point dimension must be >= 1")
        self.point_dim = int(point_dim)
        self.value_cone = value_cone if value_cone is not None else Orthant(point_dim)
        if self.value_cone.dim != self.point_dim:
            raise DimensionMismatch(
                f"value cone dim {self.value_cone.dim} != point dim {point_dim}"
            )
        self._sampled_axiom_check()

    def p(self, x, y) -> np.ndarray:
        x = self._check_point(x)
        y = self._check_point(y)
        return np.abs(x - y)

    def descriptor(self) -> tuple:
        return ("componentwise_abs", self.point_dim, self.value_cone.descriptor())


class WeightedComponentwise(ConeMetricSpace):
    """p(x, y) = (w_i |x_i - y_i|)_i with strictly positive weights."""

    def __init__(self, weights, value_cone: Cone | None = None):
        w = as_vector(weights)
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")
        self.weights = w
        self.point_dim = w.size
        self.value_cone = value_cone if value_cone is not None else Orthant(w.size)
        if self.value_cone.dim != self.point_dim:
            raise DimensionMismatch(
                f"value cone dim {self.value_cone.dim} != point dim {w.size}"
            )
        self._sampled_axiom_check()

    def p(self, x, y) -> np.ndarray:
        x = self._check_point(x)
        y = self._check_point(y)
        return self.weights * np.abs(x - y)

    def descriptor(self) -> tuple:
        return (
            "weighted_componentwise",
            tuple(self.weights.tolist()),
            self.value_cone.descriptor(),
        )


class FiniteTable(ConeMetricSpace):
    """A finite space with an explicit table of distance vectors.

    ``points`` lists the elements of X (rows in R^m); ``table[i][j]`` is
    the distance vector p(points[i], points[j]) in E.  All four axioms are
    validated exhaustively at construction; lookups of unknown points
    raise.
    """

    def __init__(self, points, table, value_cone: Cone):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a nonempty 2-D array")
        tab = np.array(table, dtype=float)
        n = pts.shape[0]
        if tab.shape != (n, n, value_cone.dim):
            raise DimensionMismatch(
                f"table shape {tab.shape} != ({n}, {n}, {value_cone.dim})"
            )
        if not np.all(np.isfinite(tab)):
            raise NonFiniteEntry("distance table has non-finite entries")
        self.points = pts
        self.table = tab
        self.point_dim = pts.shape[1]
        self.value_cone = value_cone
        self._validate_exhaustively()

    def _validate_exhaustively(self):
        n = self.points.shape[0]
        cone = self.value_cone
        scale = max(1.0, float(np.max(np.abs(self.table))))
        tol = 1e-12 * scale
        for i in range(n):
            if np.any(self.table[i, i] != 0.0):
                raise ValueError(f"(M2) failed: table[{i}][{i}] is nonzero")
            for j in range(n):
                if i != j and not np.any(np.abs(self.table[i, j]) > 0):
                    raise ValueError(f"(M2) failed: table[{i}][{j}] is zero")
                if not np.array_equal(self.table[i, j], self.table[j, i]):
                    raise ValueError(f"(M3) failed at ({i}, {j})")
                if not cone.contains(self.table[i, j], tol):
                    raise ValueError(f"(M1) failed at ({i}, {j})")
                for k in range(n):
                    gap = self.table[i, k] + self.table[k, j] - self.table[i, j]
                    if not cone.contains(gap, tol):
                        raise ValueError(f"(M4) failed at ({i}, {j}, {k})")

    def _index(self, x) -> int:
        x = self._check_point(x)
        for i, pt in enumerate(self.points):
            if np.array_equal(pt, x):
                return i
        raise ValueError(f"point {x.tolist()} is not in the finite space")

    def p(self, x, y) -> np.ndarray:
        return self.table[self._index(x), self._index(y)]

    def descriptor(self) -> tuple:
        return (
            "finite_table",
            tuple(map(tuple, self.points.tolist())),
            self.value_cone.descriptor(),
        )


def p_eval(space: ConeMetricSpace, x, y) -> np.ndarray:
    """The vector-valued distance p(x, y)."""
    return space.p(x, y)


def dp_eval(space: ConeMetricSpace, ctx: ScalarizationContext, x, y) -> float:
    """Scalar metric d_p(x, y) = xi_e(p(x, y))."""
    if ctx.cone != space.value_cone:
        raise ValueError(
            "scalarization context cone differs from the space's value cone"
        )
    return xi(ctx, space.p(x, y))


def dS_eval(space: ConeMetricSpace, family: SeminormFamily, x, y) -> float:
    """Scalar metric d_S(x, y) = inf { h(u) : u >= p(x, y), u in P }.

    Requires a monotone family and the orthant order, where the infimum
    is attained at u = p(x, y) itself and equals h(p(x, y)).
    """
    if not family.monotone:
        raise MonotonicityRequired(
            "d_S needs a monotone seminorm family for the shortcut to hold"
        )
    if not isinstance(space.value_cone, Orthant):
        raise UnsupportedOrder(
            "d_S is computed for orthant value cones, where the catalog "
            "seminorms are monotone"
        )
    return family.h(space.p(x, y))


def _check_probes(cone: Cone, probes, margin: float) -> list[np.ndarray]:
    out = []
    for c in probes:
        c = np.asarray(c, dtype=float)
        if not cone.strictly_contains(c, margin):
            raise ValueError(f"probe {c.tolist()} is not strictly interior")
        out.append(c)
    if not out:
        raise ValueError("probe family must be nonempty")
    return out


def detect_cone_convergence(
    space: ConeMetricSpace,
    sequence,
    limit,
    probes,
    tail_index: int,
    margin: float = DEFAULT_INTERIOR_MARGIN,
) -> bool:
    """Finite proxy for cone convergence x_n -> x.

    True iff for every probe c >> 0 the tail n >= tail_index (1-based)
    satisfies p(x_n, x) << c.  A finite probe family and a finite tail
    approximate the quantifier over all interior c.
    """
    seq = [space._check_point(x) for x in sequence]
    limit = space._check_point(limit)
    cs = _check_probes(space.value_cone, probes, margin)
    if not 1 <= tail_index < len(seq):
        raise ValueError(
            f"tail index must satisfy 1 <= M < {len(seq)}, got {tail_index}"
        )
    for x in seq[tail_index - 1 :]:
        d = space.p(x, limit)
        for c in cs:
            if not space.value_cone.strictly_contains(c - d, margin):
                return False
    return True


def detect_cone_cauchy(
    space: ConeMetricSpace,
    sequence,
    probes,
    tail_index: int,
    margin: float = DEFAULT_INTERIOR_MARGIN,
) -> bool:
    """Finite proxy for the cone Cauchy property: p(x_n, x_m) << c on the
    tail n, m >= tail_index for every probe c."""
    seq = [space._check_point(x) for x in sequence]
    cs = _check_probes(space.value_cone, probes, margin)
    if not 1 <= tail_index < len(seq):
        raise ValueError(
            f"tail index must satisfy 1 <= M < {len(seq)}, got {tail_index}"
        )
    tail = seq[tail_index - 1 :]
    for i in range(len(tail)):
        for j in range(i, len(tail)):
            d = space.p(tail[i], tail[j])
            for c in cs:
                if not space.value_cone.strictly_contains(c - d, margin):
                    return False
    return True


@dataclass
class DiameterReport:
    """Diameter data for a finite subset A of the space.

    ``delta`` is the least upper bound of all pairwise distance vectors
    and exists only for the strongly minihedral orthant order; the
    per-seminorm diameters ``delta_q`` exist regardless.
    """

    delta: np.ndarray | None
    delta_q: list[float]
    seminorm_labels: list[str]
    bounded_above: bool
    witness_bound: np.ndarray | None

    def to_dict(self) -> dict:
        return {
            "delta": None if self.delta is None else self.delta.tolist(),
            "delta_q": list(self.delta_q),
            "seminorms": list(self.seminorm_labels),
            "bounded_above": self.bounded_above,
            "witness_bound": (
                None if self.witness_bound is None else self.witness_bound.tolist()
            ),
        }


def diameter(
    space: ConeMetricSpace, points, family: SeminormFamily
) -> DiameterReport:
    """Pairwise diameter of a finite set in both vector and seminorm form."""
    pts = [space._check_point(x) for x in points]
    if not pts:
        raise ValueError("diameter of an empty set")
    pairwise = [space.p(pts[i], pts[j]) for i in range(len(pts)) for j in range(i, len(pts))]
    delta_q = [max(q(d) for d in pairwise) for q in family.active()]

    cone = space.value_cone
    if isinstance(cone, Orthant):
        delta = least_upper_bound(cone, pairwise)
        witness = as_vector(delta + 1.0)
    else:
        delta = None
        total = np.sum(np.stack(pairwise), axis=0)
        witness = as_vector(total + cone.interior_witness())
    return DiameterReport(
        delta=delta,
        delta_q=delta_q,
        seminorm_labels=family.labels(),
        bounded_above=True,
        witness_bound=witness,
    )


def ball_membership(
    space: ConeMetricSpace,
    center,
    radius,
    point,
    closed: bool,
    tol: float = 0.0,
    margin: float = DEFAULT_INTERIOR_MARGIN,
) -> bool:
    """Membership of the open/closed ball around ``center`` of vector
    radius c >> 0.  Closed balls use p <= c, open balls p << c."""
    radius = np.asarray(radius, dtype=float)
    if not space.value_cone.strictly_contains(radius, margin):
        raise ValueError(f"ball radius {radius.tolist()} must satisfy 0 << c")
    d = space.p(space._check_point(center), space._check_point(point))
    if closed:
        return space.value_cone.contains(radius - d, tol)
    return space.value_cone.strictly_contains(radius - d, margin)


def load_sequence_csv(path) -> list[np.ndarray]:
    """Read a point sequence from CSV with header ``x1,...,xm``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty sequence file")
        expected = [f"x{i}" for i in range(1, len(header) + 1)]
        if [h.strip() for h in header] != expected:
            raise ValueError(
                f"{path}: header must be {','.join(expected)}, got {','.join(header)}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} columns")
            rows.append(as_vector([float(v) for v in row]))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows
