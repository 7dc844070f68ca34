"""Half-space descriptors and the convex approximation primitives.

A :class:`Descriptor` is a finite list of rows ``xi . v <= b`` cutting out a
(possibly empty or unbounded) polytope in ``R^d``.  On top of it sit the
primitives the selection pipeline leans on:

* directional extent inside a subspace, via a pair of LPs per direction;
* ``produce_box``: an oriented box comparable to a bounded nonempty polytope,
  built by repeatedly extracting near-diameters in shrinking orthocomplements;
* nested direction nets on the unit sphere and ``approx_polytope``, which caps
  a descriptor's length at a resolution-dependent constant while keeping the
  body sandwiched between the original and its diamond enlargement;
* the diamond enlargement ``(1+tau).K = K + (tau/2)K - (tau/2)K`` of a bounded
  convex set, with membership tests and closed-form support values.

Degenerate (lower-dimensional) bodies are handled with an explicit active
subspace mask rather than special cases: flat directions become equality rows.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .lp import FEAS_TOL, LPResult, lp_feasible, solve_lp

# Relative threshold below which a box radius counts as a flat direction.
DEGENERATE_TOL = 1e-12

# Safety cap on direction-net cardinality.
MAX_NET_SIZE = 300_000


@dataclass
class Descriptor:
    """Finite list of half-space constraints ``xi[i] . v <= b[i]`` in ``R^dim``.

    ``vertices`` is an optional V-representation cache; when present, support
    values are matrix products instead of LPs.  ``empty_marker`` tags a body
    known to be empty (kept distinct from descriptors that merely happen to be
    contradictory, so emptiness checks are O(1) after first detection).
    """

    dim: int
    xi: np.ndarray
    b: np.ndarray
    vertices: np.ndarray | None = None
    empty_marker: bool = False

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float).reshape(-1, self.dim)
        self.b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if self.xi.shape[0] != self.b.shape[0]:
            raise ValueError("xi and b row counts differ")
        if self.vertices is not None:
            self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, self.dim)

    def __len__(self) -> int:
        return self.xi.shape[0]

    @classmethod
    def from_rows(cls, rows, dim=None) -> "Descriptor":
        xi = np.array([r[0] for r in rows], dtype=float)
        b = np.array([r[1] for r in rows], dtype=float)
        return cls(dim if dim is not None else xi.shape[1], xi, b)

    @classmethod
    def from_bounds(cls, lo, hi) -> "Descriptor":
        """Axis box ``lo <= v <= hi`` with its vertex cache."""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        d = lo.size
        eye = np.eye(d)
        xi = np.vstack([eye, -eye])
        b = np.concatenate([hi, -lo])
        corners = np.array(list(itertools.product(*zip(lo, hi)))) if d <= 12 else None
        return cls(d, xi, b, vertices=corners)

    @classmethod
    def from_point(cls, v) -> "Descriptor":
        v = np.atleast_1d(np.asarray(v, dtype=float))
        return cls.from_bounds(v, v)

    @classmethod
    def empty(cls, dim: int) -> "Descriptor":
        return cls(dim, np.zeros((0, dim)), np.zeros(0), empty_marker=True)

    def is_empty_marker(self) -> bool:
        return self.empty_marker

    def contains(self, v, tol: float = FEAS_TOL) -> bool:
        if self.empty_marker:
            return False
        v = np.asarray(v, dtype=float)
        scale = np.maximum(np.max(np.abs(self.xi), axis=1), 1.0)
        return bool(np.all(self.xi @ v - self.b <= tol * scale))

    def concat(self, other: "Descriptor") -> "Descriptor":
        if self.empty_marker or other.empty_marker:
            return Descriptor.empty(self.dim)
        return Descriptor(self.dim, np.vstack([self.xi, other.xi]), np.concatenate([self.b, other.b]))

    def translated(self, t) -> "Descriptor":
        """Descriptor of ``K + t``."""
        if self.empty_marker:
            return self
        t = np.asarray(t, dtype=float)
        verts = self.vertices + t if self.vertices is not None else None
        return Descriptor(self.dim, self.xi.copy(), self.b + self.xi @ t, vertices=verts)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "constraints": [
                {"xi": row.tolist(), "b": float(bv)} for row, bv in zip(self.xi, self.b)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Descriptor":
        rows = data.get("constraints", [])
        d = int(data["dim"])
        if not rows:
            return cls(d, np.zeros((0, d)), np.zeros(0))
        xi = np.array([r["xi"] for r in rows], dtype=float)
        b = np.array([r["b"] for r in rows], dtype=float)
        return cls(d, xi, b)


@dataclass
class Box:
    """Oriented box: center, orthonormal axis rows, and per-axis radii."""

    center: np.ndarray
    axes: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.axes = np.asarray(self.axes, dtype=float)
        self.radii = np.asarray(self.radii, dtype=float)
        gram = self.axes @ self.axes.T
        if not np.allclose(gram, np.eye(len(self.axes)), atol=1e-9):
            raise ValueError("box axes must be orthonormal")
        if np.any(self.radii < 0):
            raise ValueError("box radii must be nonnegative")

    @property
    def dim(self) -> int:
        return self.center.size

    def contains(self, v, factor: float = 1.0, tol: float = FEAS_TOL) -> bool:
        proj = self.axes @ (np.asarray(v, dtype=float) - self.center)
        return bool(np.all(np.abs(proj) <= factor * self.radii + tol))

    def scaled(self, factor: float) -> "Box":
        return Box(self.center, self.axes, factor * self.radii)

    def to_descriptor(self) -> Descriptor:
        xi = np.vstack([self.axes, -self.axes])
        b = np.concatenate([self.axes @ self.center + self.radii, -self.axes @ self.center + self.radii])
        return Descriptor(self.dim, xi, b)

    def corners(self) -> np.ndarray:
        signs = np.array(list(itertools.product([-1.0, 1.0], repeat=self.dim)))
        return self.center + (signs * self.radii) @ self.axes

    def support(self, xi) -> float:
        xi = np.asarray(xi, dtype=float)
        return float(xi @ self.center + np.abs(self.axes @ xi) @ self.radii)


def lp_solve(desc: Descriptor, objective) -> LPResult:
    """Maximize ``objective . v`` over ``K(desc)``; tags cover all outcomes."""
    if desc.empty_marker:
        return LPResult("infeasible")
    return solve_lp(np.asarray(objective, dtype=float), desc.xi, desc.b, maximize=True)


def support(desc: Descriptor, xi) -> float:
    """Support value ``max_K xi . v``; ``inf`` when unbounded in that direction."""
    if desc.empty_marker:
        raise ValueError("support of an empty body")
    xi = np.asarray(xi, dtype=float)
    if desc.vertices is not None and len(desc.vertices):
        return float(np.max(desc.vertices @ xi))
    res = lp_solve(desc, xi)
    if res.unbounded:
        return math.inf
    if res.infeasible:
        raise ValueError("support of an empty body")
    return res.value


def supports(desc: Descriptor, directions: np.ndarray) -> np.ndarray:
    """Vectorized support values over direction rows."""
    directions = np.asarray(directions, dtype=float)
    if desc.vertices is not None and len(desc.vertices):
        return np.max(directions @ desc.vertices.T, axis=1)
    return np.array([support(desc, row) for row in directions])


def classify(desc: Descriptor) -> str:
    """One of ``"empty"``, ``"unbounded"``, ``"bounded-nonempty"``."""
    if desc.empty_marker:
        return "empty"
    if lp_feasible(desc.xi, desc.b).infeasible:
        return "empty"
    for i in range(desc.dim):
        e = np.zeros(desc.dim)
        for sign in (1.0, -1.0):
            e[i] = sign
            if lp_solve(desc, e).unbounded:
                return "unbounded"
        e[i] = 0.0
    return "bounded-nonempty"


def _orthocomplement(vectors: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis rows of the orthocomplement of ``span(vectors)``."""
    if len(vectors) == 0:
        return np.eye(dim)
    q, _ = np.linalg.qr(np.asarray(vectors).T, mode="complete")
    return q[:, len(vectors):].T


def diameter_in_subspace(desc: Descriptor, h_basis) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Near-diameter of ``K(desc)`` among chords parallel to a subspace.

    Returns ``(v_plus, v_minus, e_hat, lam)`` with both endpoints in the body,
    their difference ``lam * e_hat`` lying in the subspace, and any competing
    chord at most ``sqrt(dim)`` times longer.  One LP per basis direction; the
    argmax tie-break picks the lowest index, so the output is deterministic.
    """
    h_basis = np.asarray(h_basis, dtype=float)
    if h_basis.ndim == 1:
        h_basis = h_basis.reshape(1, -1)
    L, d = h_basis.shape
    if L == 0:
        raise ValueError("subspace must have dimension >= 1")
    if desc.empty_marker:
        raise ValueError("empty body")

    # Variables (v+, v-); constraints keep both in K and the chord in H.
    k = len(desc)
    a_ub = np.zeros((2 * k, 2 * d))
    a_ub[:k, :d] = desc.xi
    a_ub[k:, d:] = desc.xi
    b_ub = np.concatenate([desc.b, desc.b])
    comp = _orthocomplement(h_basis, d)
    a_eq = np.hstack([comp, -comp]) if len(comp) else None
    b_eq = np.zeros(len(comp)) if len(comp) else None

    best = None
    for ell in range(L):
        c = np.concatenate([h_basis[ell], -h_basis[ell]])
        res = solve_lp(c, a_ub, b_ub, a_eq, b_eq, maximize=True)
        if res.unbounded:
            raise ValueError("body is unbounded in the subspace")
        if res.infeasible:
            raise ValueError("empty body")
        if best is None or res.value > best[0] + 1e-15:
            best = (res.value, res.x)
    v_plus, v_minus = best[1][:d], best[1][d:]
    chord = v_plus - v_minus
    lam = float(np.linalg.norm(chord))
    if lam > 0:
        e_hat = chord / lam
    else:
        e_hat = h_basis[0] / np.linalg.norm(h_basis[0])
    return v_plus, v_minus, e_hat, lam


def produce_box(desc: Descriptor) -> Box:
    """Oriented box comparable to a bounded nonempty polytope.

    Axis ``l`` is a near-diameter direction of the body restricted to the
    orthocomplement of the previous axes; radii carry the ``1/(2 dim)``
    normalization that keeps the box inside the body, and the comparability
    constant of the sandwich depends only on the dimension.
    """
    d = desc.dim
    axes: list[np.ndarray] = []
    radii = np.zeros(d)
    endpoint_sum = np.zeros(d)
    for _ in range(d):
        h = _orthocomplement(np.array(axes), d) if axes else np.eye(d)
        v_plus, v_minus, e_hat, lam = diameter_in_subspace(desc, h)
        axes.append(e_hat)
        radii[len(axes) - 1] = lam / (2 * d)
        endpoint_sum += v_plus + v_minus
    center = endpoint_sum / (2 * d)
    return Box(center, np.array(axes), radii)


def tau_net(dim: int, tau: float) -> np.ndarray:
    """Deterministic direction net on the unit sphere with covering radius ``tau``.

    Normalized lattice points on the boundary of the unit cube; the lattice
    pitch is snapped to a power of two, so coarser nets are subsets of finer
    ones (needed for resolution-nested outer approximations).
    """
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    # Pitch tau/2 on the cube maps to covering radius < tau on the sphere.
    k = 1 << max(1, math.ceil(math.log2(4.0 * math.sqrt(dim) / tau)))
    est = 2 * dim * (k + 1) ** (dim - 1)
    if est > MAX_NET_SIZE:
        raise ValueError(f"direction net would need ~{est} points; coarsen tau")
    ticks = np.linspace(-1.0, 1.0, k + 1)
    pts = []
    for axis in range(dim):
        for side in (-1.0, 1.0):
            grids = [ticks] * (dim - 1)
            face = np.array(np.meshgrid(*grids, indexing="ij")).reshape(dim - 1, -1).T
            block = np.insert(face, axis, side, axis=1)
            pts.append(block)
    pts = np.vstack(pts)
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return np.unique(np.round(pts, 12), axis=0)


def merge_parallel_rows(desc: Descriptor, tol: float = 1e-9) -> Descriptor:
    """Drop duplicate half-spaces: equal direction (to ``tol``), keep the tightest bound."""
    if desc.empty_marker or len(desc) == 0:
        return desc
    norms = np.linalg.norm(desc.xi, axis=1)
    keep_rows: dict[tuple, float] = {}
    order: list[tuple] = []
    for row, bv, nrm in zip(desc.xi, desc.b, norms):
        if nrm < tol:
            continue  # vacuous or contradictory zero row handled by caller
        key = tuple(np.round(row / nrm, 9))
        val = bv / nrm
        if key not in keep_rows:
            keep_rows[key] = val
            order.append(key)
        else:
            keep_rows[key] = min(keep_rows[key], val)
    xi = np.array([k for k in order])
    b = np.array([keep_rows[k] for k in order])
    return Descriptor(desc.dim, xi, b, vertices=desc.vertices)


def approx_polytope(desc: Descriptor, tau: float) -> tuple[np.ndarray, Descriptor]:
    """Resolution-capped outer approximation of a bounded nonempty polytope.

    Returns ``(w0, approx)`` where ``approx`` describes the body recentered at
    ``w0``: the true body satisfies ``K - w0 <= approx <= (1 + C tau) diamond
    (K - w0)`` with ``C`` depending only on the dimension, and ``len(approx)``
    is bounded by the net cardinality plus two rows per flat direction.

    Flat directions (zero box radius) are pinned with equality-style rows and
    the net lives in the active subspace, so lower-dimensional bodies recurse
    into lower-dimensional nets instead of inflating.
    """
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    kind = classify(desc)
    if kind != "bounded-nonempty":
        raise ValueError(f"approx_polytope requires a bounded nonempty body, got {kind}")
    box = produce_box(desc)
    w0 = box.center
    rmax = float(np.max(box.radii))
    if rmax <= 0.0:
        # The body is a single point.
        eye = np.eye(desc.dim)
        return w0, Descriptor(desc.dim, np.vstack([eye, -eye]), np.zeros(2 * desc.dim),
                              vertices=np.zeros((1, desc.dim)))
    active = box.radii > DEGENERATE_TOL * rmax
    axes_a = box.axes[active]
    lam_a = box.radii[active]
    d_active = int(active.sum())

    net = tau_net(d_active, tau)
    # Net directions pulled back through the normalizing transform
    # y = diag(1/lam) . axes . (v - w0).
    rows = (net / lam_a) @ axes_a
    b = supports(desc, rows) - rows @ w0

    flat_rows = []
    flat_b = []
    for axis in box.axes[~active]:
        flat_rows.extend([axis, -axis])
        flat_b.extend([0.0, 0.0])
    if flat_rows:
        rows = np.vstack([rows, flat_rows])
        b = np.concatenate([b, flat_b])
    return w0, merge_parallel_rows(Descriptor(desc.dim, rows, b))


def member_of_enlarged(desc: Descriptor, tau: float, v) -> bool:
    """Membership of ``v`` in the diamond enlargement ``(1+tau).K(desc)``.

    Decided by LP feasibility of ``v = v0 + (tau/2) v1 - (tau/2) v2`` with all
    three points in the body.
    """
    if desc.empty_marker:
        raise ValueError("enlargement of an empty body")
    v = np.asarray(v, dtype=float)
    d, k = desc.dim, len(desc)
    a_ub = np.zeros((3 * k, 3 * d))
    for j in range(3):
        a_ub[j * k : (j + 1) * k, j * d : (j + 1) * d] = desc.xi
    b_ub = np.tile(desc.b, 3)
    a_eq = np.hstack([np.eye(d), (tau / 2) * np.eye(d), -(tau / 2) * np.eye(d)])
    res = lp_feasible(a_ub, b_ub, a_eq, v)
    return res.optimal


def enlarged_support(h_plus: float, h_minus: float, tau: float) -> float:
    """Support of ``(1+tau).K`` from supports of ``K`` at ``xi`` and ``-xi``.

    ``h((1+tau).K)(xi) = (1 + tau/2) h(xi) + (tau/2) h(-xi)`` for compact
    convex ``K``; this closed form is the oracle for enlargement tests.
    """
    return (1.0 + tau / 2.0) * h_plus + (tau / 2.0) * h_minus


def sample_point(desc: Descriptor, rng: np.random.Generator) -> np.ndarray:
    """A deterministic-for-seed extreme point in a random direction (tests, probes)."""
    res = lp_solve(desc, rng.normal(size=desc.dim))
    if not res.optimal:
        raise ValueError("cannot sample from an empty or unbounded body")
    return res.x


def interior_point(desc: Descriptor) -> np.ndarray | None:
    """Chebyshev-style point: maximize the uniform slack; None when empty."""
    if desc.empty_marker:
        return None
    k, d = len(desc), desc.dim
    scale = np.maximum(np.linalg.norm(desc.xi, axis=1), 1e-300)
    a = np.hstack([desc.xi / scale[:, None], np.ones((k, 1))])
    c = np.zeros(d + 1)
    c[d] = 1.0
    # Bound the slack so bodies with interior don't make the LP unbounded.
    a = np.vstack([a, c])
    b = np.concatenate([desc.b / scale, [1e6]])
    res = solve_lp(c, a, b, maximize=True)
    if not res.optimal or res.x[d] < -FEAS_TOL:
        return None
    return res.x[:d]


def vertices_of(desc: Descriptor, tol: float = 1e-8) -> np.ndarray:
    """Vertex enumeration by basis inspection; intended for small descriptors.

    Work grows like ``len(desc) ** dim``; used for target ingestion and test
    oracles, never in the scaled pipeline.
    """
    if desc.empty_marker:
        return np.zeros((0, desc.dim))
    d, k = desc.dim, len(desc)
    if d == 1:
        hi = support(desc, np.array([1.0]))
        lo = -support(desc, np.array([-1.0]))
        return np.unique(np.array([[lo], [hi]]), axis=0)
    found = []
    for rows in itertools.combinations(range(k), d):
        a = desc.xi[list(rows)]
        if abs(np.linalg.det(a)) < 1e-12:
            continue
        v = np.linalg.solve(a, desc.b[list(rows)])
        scale = np.maximum(np.max(np.abs(desc.xi), axis=1), 1.0)
        if np.all(desc.xi @ v - desc.b <= tol * scale):
            found.append(np.round(v, 10))
    if not found:
        return np.zeros((0, desc.dim))
    return np.unique(np.array(found), axis=0)
