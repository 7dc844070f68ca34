"""Jet algebra: truncated Taylor polynomials, multiindex order, labels.

A *jet space* holds real polynomials of degree at most ``m - 1`` on ``R^n``,
stored as coefficient vectors in the monomial basis about the origin.  The
module also implements the combinatorics layered on top of multiindices:

* a graded total order on multiindices (compare trailing partial sums,
  largest differing index decides);
* a total order on sets of multiindices ("labels"): the least element of the
  symmetric difference decides, and the side containing it is smaller, so the
  full set is minimal and the empty set is maximal;
* *monotonic* labels, i.e. sets closed under adding any multiindex that keeps
  the order below ``m``;
* the depth ``1 + 3 * #{monotonic labels strictly below}`` that schedules how
  many refinement rounds each label consumes.

Everything here is pure and deterministic; ``JetSpace`` instances cache their
index tables and are safe to share between threads.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache, total_ordering

import numpy as np

Multiindex = tuple[int, ...]
Label = frozenset  # of Multiindex


def _partial_sums(alpha: Multiindex) -> tuple[int, ...]:
    total, out = 0, []
    for a in alpha:
        total += a
        out.append(total)
    return tuple(out)


def multiindex_key(alpha: Multiindex) -> tuple[int, ...]:
    """Sort key realizing the graded order: trailing partial sums first."""
    return tuple(reversed(_partial_sums(alpha)))


def compare_multiindex(alpha: Multiindex, beta: Multiindex) -> int:
    """Total order on multiindices; returns -1, 0 or +1.

    The largest position where the running sums ``a_1 + ... + a_k`` differ
    decides; since the last running sum is the order ``|a|``, the order is
    graded by total degree.
    """
    if len(alpha) != len(beta):
        raise ValueError(f"dimension mismatch: {len(alpha)} vs {len(beta)}")
    ka, kb = multiindex_key(alpha), multiindex_key(beta)
    return (ka > kb) - (ka < kb)


def compare_label(a, b) -> int:
    """Total order on sets of multiindices; returns -1, 0 or +1.

    The least element of the symmetric difference decides: whichever set
    contains it is the smaller one.  Consequently the full multiindex set is
    minimal, the empty set is maximal, and a strict superset precedes any of
    its subsets.
    """
    a, b = frozenset(a), frozenset(b)
    diff = a ^ b
    if not diff:
        return 0
    gamma = min(diff, key=multiindex_key)
    return -1 if gamma in a else 1


@total_ordering
class _LabelKey:
    """Adapter making ``compare_label`` usable as a sort key."""

    __slots__ = ("label",)

    def __init__(self, label):
        self.label = frozenset(label)

    def __eq__(self, other):
        return compare_label(self.label, other.label) == 0

    def __lt__(self, other):
        return compare_label(self.label, other.label) < 0


class JetSpace:
    """Polynomials of degree ``<= m - 1`` on ``R^n`` with cached index tables."""

    def __init__(self, m: int, n: int):
        if m < 1 or n < 1:
            raise ValueError("m and n must be positive")
        self.m = m
        self.n = n
        self.multiindices: tuple[Multiindex, ...] = tuple(
            sorted(self._enumerate(m - 1, n), key=multiindex_key)
        )
        self.dim = len(self.multiindices)
        self._index = {a: i for i, a in enumerate(self.multiindices)}
        self.orders = np.array([sum(a) for a in self.multiindices])
        self._factorials = np.array([_mi_factorial(a) for a in self.multiindices], dtype=float)
        self._alpha_arr = np.array(self.multiindices, dtype=np.int64)
        self._leibniz = None
        self._monotonic_cache = None

    @staticmethod
    def _enumerate(max_order: int, n: int) -> list[Multiindex]:
        out = []

        def rec(prefix, remaining, slots):
            if slots == 0:
                out.append(tuple(prefix))
                return
            for v in range(remaining + 1):
                rec(prefix + [v], remaining - v, slots - 1)

        rec([], max_order, n)
        return out

    def index(self, alpha: Multiindex) -> int:
        try:
            return self._index[tuple(alpha)]
        except KeyError:
            raise KeyError(f"multiindex {alpha} has order >= m={self.m} or wrong arity") from None

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self._index

    def __repr__(self) -> str:
        return f"JetSpace(m={self.m}, n={self.n}, dim={self.dim})"

    # -- labels -----------------------------------------------------------

    @property
    def full_label(self) -> Label:
        return frozenset(self.multiindices)

    def is_monotonic(self, label) -> bool:
        """True iff ``alpha in label`` and ``alpha + gamma`` of order < m imply membership."""
        label = frozenset(label)
        for alpha in label:
            for gamma in self.multiindices:
                s = tuple(a + g for a, g in zip(alpha, gamma))
                if s in self._index and s not in label:
                    return False
        return True

    def enumerate_monotonic_labels(self) -> tuple[Label, ...]:
        """All monotonic labels in increasing order (full set first, empty last)."""
        if self._monotonic_cache is None:
            if self.dim >= 20:
                warnings.warn(
                    f"enumerating monotonic labels scans 2^{self.dim} subsets",
                    RuntimeWarning,
                    stacklevel=2,
                )
            found = [
                frozenset(combo)
                for combo in _subsets(self.multiindices)
                if self.is_monotonic(combo)
            ]
            found.sort(key=_LabelKey)
            self._monotonic_cache = tuple(found)
        return self._monotonic_cache

    def label_depth(self, label) -> int:
        """``1 + 3 * #{monotonic labels strictly below}``; drives refinement depth."""
        label = frozenset(label)
        if not self.is_monotonic(label):
            raise ValueError("label_depth requires a monotonic label")
        below = sum(
            1 for other in self.enumerate_monotonic_labels() if compare_label(other, label) < 0
        )
        return 1 + 3 * below

    # -- linear maps between coefficient and derivative coordinates --------

    def derivative_matrix(self, x) -> np.ndarray:
        """Matrix ``A`` with ``A @ coeffs = (d^beta P(x))_beta`` over the index order."""
        x = np.asarray(x, dtype=float)
        a = np.zeros((self.dim, self.dim))
        for i, beta in enumerate(self.multiindices):
            for j, gamma in enumerate(self.multiindices):
                diff = tuple(g - b for g, b in zip(gamma, beta))
                if min(diff) < 0:
                    continue
                coef = 1.0
                for g, d in zip(gamma, diff):
                    coef *= math.factorial(g) / math.factorial(d)
                a[i, j] = coef * _power(x, diff)
        return a

    def taylor_matrix(self, x) -> np.ndarray:
        """Inverse map: derivative values at ``x`` back to monomial coefficients."""
        return np.linalg.inv(self.derivative_matrix(x))

    def shift_matrix(self, h) -> np.ndarray:
        """Derivative values at ``x`` to derivative values at ``x + h`` (any ``x``).

        ``d^beta P(x+h) = sum_gamma d^(beta+gamma) P(x) h^gamma / gamma!``;
        the matrix is independent of ``x`` and unit-triangular in the graded
        order, so transporting jet boxes with ``abs()`` of it is stable.
        """
        h = np.asarray(h, dtype=float)
        s = np.zeros((self.dim, self.dim))
        for i, beta in enumerate(self.multiindices):
            for j, target in enumerate(self.multiindices):
                gamma = tuple(t - b for t, b in zip(target, beta))
                if min(gamma) < 0:
                    continue
                s[i, j] = _power(h, gamma) / _mi_factorial(gamma)
        return s

    # -- jet multiplication -------------------------------------------------

    def _leibniz_table(self):
        if self._leibniz is None:
            table = []
            for k, gamma in enumerate(self.multiindices):
                terms = []
                for i, alpha in enumerate(self.multiindices):
                    beta = tuple(g - a for g, a in zip(gamma, alpha))
                    if min(beta) < 0:
                        continue
                    j = self._index[beta]
                    coef = _mi_factorial(gamma) / (_mi_factorial(alpha) * _mi_factorial(beta))
                    terms.append((i, j, coef))
                table.append(terms)
            self._leibniz = table
        return self._leibniz

    def multiply_derivs(self, dp: np.ndarray, dq: np.ndarray) -> np.ndarray:
        """Leibniz product in derivative coordinates, truncated to the space."""
        out = np.zeros(self.dim)
        for k, terms in enumerate(self._leibniz_table()):
            acc = 0.0
            for i, j, coef in terms:
                acc += coef * dp[i] * dq[j]
            out[k] = acc
        return out


@lru_cache(maxsize=None)
def jet_space(m: int, n: int) -> JetSpace:
    """Shared, cached ``JetSpace`` instances (they are immutable)."""
    return JetSpace(m, n)


def _subsets(items):
    n = len(items)
    for mask in range(1 << n):
        yield frozenset(items[i] for i in range(n) if mask >> i & 1)


def _mi_factorial(alpha) -> float:
    out = 1.0
    for a in alpha:
        out *= math.factorial(a)
    return out


def _power(x: np.ndarray, alpha) -> float:
    out = 1.0
    for xi, a in zip(x, alpha):
        if a:
            out *= xi**a
    return out


@dataclass
class Polynomial:
    """Polynomial of degree ``<= m - 1``, monomial coefficients about the origin."""

    space: JetSpace
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.space.dim,):
            raise ValueError(f"expected {self.space.dim} coefficients")

    @classmethod
    def zero(cls, space: JetSpace) -> "Polynomial":
        return cls(space, np.zeros(space.dim))

    @classmethod
    def constant(cls, space: JetSpace, value: float) -> "Polynomial":
        c = np.zeros(space.dim)
        c[space.index((0,) * space.n)] = value
        return cls(space, c)

    @classmethod
    def from_coeff_dict(cls, space: JetSpace, entries: dict) -> "Polynomial":
        c = np.zeros(space.dim)
        for alpha, v in entries.items():
            c[space.index(tuple(alpha))] = v
        return cls(space, c)

    @classmethod
    def from_derivs(cls, space: JetSpace, x, values) -> "Polynomial":
        """Polynomial with prescribed derivative values at ``x``."""
        return cls(space, space.taylor_matrix(x) @ np.asarray(values, dtype=float))

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(
            sum(c * _power(x, a) for c, a in zip(self.coeffs, self.space.multiindices))
        )

    def derivs_at(self, x) -> np.ndarray:
        return self.space.derivative_matrix(x) @ self.coeffs

    def __add__(self, other):
        return Polynomial(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return Polynomial(self.space, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float):
        return Polynomial(self.space, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(self.space, -self.coeffs)


def derivative_at(p: Polynomial, alpha, x) -> float:
    """Exact ``d^alpha p`` at ``x``.

    For ``|alpha| >= m`` the derivative of a degree ``m - 1`` polynomial is
    identically zero and ``0.0`` is returned rather than raising.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != p.space.n:
        raise ValueError("multiindex arity does not match the space")
    if any(a < 0 for a in alpha):
        raise ValueError("multiindex entries must be nonnegative")
    if sum(alpha) >= p.space.m:
        return 0.0
    x = np.asarray(x, dtype=float)
    total = 0.0
    for c, gamma in zip(p.coeffs, p.space.multiindices):
        diff = tuple(g - a for g, a in zip(gamma, alpha))
        if min(diff) < 0:
            continue
        coef = 1.0
        for g, d in zip(gamma, diff):
            coef *= math.factorial(g) / math.factorial(d)
        total += c * coef * _power(x, diff)
    return total


def jet_multiply(p: Polynomial, q: Polynomial, x) -> Polynomial:
    """Truncated product: the degree ``m - 1`` Taylor polynomial of ``p*q`` at ``x``.

    Bilinear and commutative, with the constant 1 as identity; associativity
    holds exactly in the quotient ring (both triple products agree).
    """
    space = p.space
    x = np.asarray(x, dtype=float)
    a = space.derivative_matrix(x)
    dr = space.multiply_derivs(a @ p.coeffs, a @ q.coeffs)
    return Polynomial(space, np.linalg.solve(a, dr))


def jet_power(p: Polynomial, exponent: float, x) -> Polynomial:
    """``p**exponent`` as a jet at ``x`` via the binomial series.

    Requires ``p(x) > 0``.  Exact in the quotient ring: for example the
    square of ``jet_power(p, -0.5, x)`` multiplied by ``p`` is the constant 1
    up to truncation.
    """
    space = p.space
    x = np.asarray(x, dtype=float)
    a = space.derivative_matrix(x)
    dp = a @ p.coeffs
    p0 = dp[space.index((0,) * space.n)]
    if p0 <= 0:
        raise ValueError("jet_power requires a positive value at the basepoint")
    u = dp / p0
    u[space.index((0,) * space.n)] = 0.0
    out = np.zeros(space.dim)
    out[space.index((0,) * space.n)] = 1.0
    term = out.copy()
    coef = 1.0
    for k in range(1, space.m):
        coef *= (exponent - (k - 1)) / k
        term = space.multiply_derivs(term, u)
        out = out + coef * term
    return Polynomial(space, np.linalg.solve(a, (p0**exponent) * out))


@dataclass(frozen=True)
class WhitneyBallSpec:
    """Jet box ``{P : |d^beta P(x)| <= scale * radius^(m - |beta|)}``."""

    center: tuple
    radius: float
    scale: float = 1.0

    def __post_init__(self):
        if self.radius < 0 or self.scale <= 0:
            raise ValueError("radius must be >= 0 and scale > 0")

    def widths(self, space: JetSpace) -> np.ndarray:
        """Half-widths per derivative coordinate, in the index order."""
        return self.scale * float(self.radius) ** (space.m - space.orders)

    def contains(self, p: Polynomial, tol: float = 0.0) -> bool:
        d = p.derivs_at(np.asarray(self.center, dtype=float))
        return bool(np.all(np.abs(d) <= self.widths(p.space) + tol))
