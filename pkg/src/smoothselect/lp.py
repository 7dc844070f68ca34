"""Dense linear programming over free variables.

Every geometric primitive in this package reduces to small LPs (a few to a
few hundred constraints over a fixed, low dimension).  scipy's HiGHS wrapper
carries ~1.5 ms of per-call overhead, which dominates at our call volumes, so
the default backend is a two-phase tableau simplex with Bland's rule.  It is
deterministic, anti-cycling, and cross-checked against scipy in the test
suite.  Set ``backend="scipy"`` on any call to force the reference solver.

All feasibility decisions in the package share one tolerance, ``FEAS_TOL``,
interpreted as absolute slack on row-equilibrated constraints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Absolute feasibility tolerance on constraint slack after row equilibration.
FEAS_TOL = 1e-9

# Pivot tolerance for the tableau; slightly looser than FEAS_TOL to avoid
# stalling on near-degenerate pivots.
_PIV_TOL = 1e-11

# Tableau-cell count above which "auto" routes to scipy.
_SCIPY_CUTOVER = 25_000

_STATUS_OPTIMAL = "optimal"
_STATUS_INFEASIBLE = "infeasible"
_STATUS_UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    """Outcome of an LP solve: ``optimal`` (with witness), ``infeasible`` or ``unbounded``."""

    status: str
    x: np.ndarray | None = None
    value: float | None = None

    @property
    def optimal(self) -> bool:
        return self.status == _STATUS_OPTIMAL

    @property
    def infeasible(self) -> bool:
        return self.status == _STATUS_INFEASIBLE

    @property
    def unbounded(self) -> bool:
        return self.status == _STATUS_UNBOUNDED


def _as_2d(a, n: int) -> np.ndarray:
    if a is None:
        return np.zeros((0, n))
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return a


def _equilibrate(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Scale each row to unit inf-norm so FEAS_TOL means the same thing for
    # constraints written at scale 1e-9 and at scale 1e+9.
    if a.shape[0] == 0:
        return a, b
    scale = np.max(np.abs(a), axis=1)
    scale[scale == 0.0] = 1.0
    return a / scale[:, None], b / scale


def solve_lp(
    c=None,
    a_ub=None,
    b_ub=None,
    a_eq=None,
    b_eq=None,
    *,
    maximize: bool = True,
    backend: str = "auto",
) -> LPResult:
    """Optimize ``c.x`` over free ``x`` subject to ``a_ub x <= b_ub``, ``a_eq x = b_eq``.

    ``c=None`` asks for feasibility only.  Variables are unrestricted in sign.
    ``backend="auto"`` uses the in-package simplex for small tableaus and
    scipy/HiGHS above ``_SCIPY_CUTOVER`` cells, where sparse pricing wins.
    """
    if a_ub is not None:
        n = np.asarray(a_ub).shape[-1]
    elif a_eq is not None:
        n = np.asarray(a_eq).shape[-1]
    elif c is not None:
        n = len(np.asarray(c))
    else:
        raise ValueError("empty linear program")

    c = np.zeros(n) if c is None else np.asarray(c, dtype=float)
    a_ub = _as_2d(a_ub, n)
    b_ub = np.zeros(a_ub.shape[0]) if b_ub is None else np.atleast_1d(np.asarray(b_ub, dtype=float))
    a_eq = _as_2d(a_eq, n)
    b_eq = np.zeros(a_eq.shape[0]) if b_eq is None else np.atleast_1d(np.asarray(b_eq, dtype=float))

    a_ub, b_ub = _equilibrate(a_ub, b_ub)
    a_eq, b_eq = _equilibrate(a_eq, b_eq)

    if backend == "auto":
        m = a_ub.shape[0] + a_eq.shape[0]
        cells = (m + 1) * (2 * n + a_ub.shape[0] + m + 1)
        backend = "scipy" if cells > _SCIPY_CUTOVER else "simplex"
    if backend == "scipy":
        return _solve_scipy(c, a_ub, b_ub, a_eq, b_eq, maximize)
    return _solve_simplex(c, a_ub, b_ub, a_eq, b_eq, maximize)


def lp_feasible(a_ub=None, b_ub=None, a_eq=None, b_eq=None, **kw) -> LPResult:
    """Feasibility-only variant of :func:`solve_lp`."""
    return solve_lp(None, a_ub, b_ub, a_eq, b_eq, **kw)


def _solve_scipy(c, a_ub, b_ub, a_eq, b_eq, maximize) -> LPResult:
    from scipy.optimize import linprog

    sign = -1.0 if maximize else 1.0
    res = linprog(
        sign * c,
        A_ub=a_ub if a_ub.shape[0] else None,
        b_ub=b_ub if a_ub.shape[0] else None,
        A_eq=a_eq if a_eq.shape[0] else None,
        b_eq=b_eq if a_eq.shape[0] else None,
        bounds=(None, None),
        method="highs",
    )
    if res.status == 0:
        return LPResult(_STATUS_OPTIMAL, np.asarray(res.x), float(c @ res.x))
    if res.status == 2:
        return LPResult(_STATUS_INFEASIBLE)
    if res.status == 3:
        return LPResult(_STATUS_UNBOUNDED)
    raise ArithmeticError(f"scipy linprog failed with status {res.status}")


def _solve_simplex(c, a_ub, b_ub, a_eq, b_eq, maximize) -> LPResult:
    n = len(c)
    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    m = m_ub + m_eq

    # Free variables split as x = u - v; one slack per inequality row; one
    # artificial per row for a uniform phase-1 start.
    a = np.vstack([a_ub, a_eq]) if m else np.zeros((0, n))
    b = np.concatenate([b_ub, b_eq])
    slack = np.vstack([np.eye(m_ub), np.zeros((m_eq, m_ub))]) if m else np.zeros((0, 0))

    body = np.hstack([a, -a, slack]) if m else np.zeros((0, 2 * n + m_ub))
    rhs = b.copy()
    neg = rhs < 0
    body[neg] *= -1.0
    rhs[neg] *= -1.0

    n_struct = body.shape[1]

    # Inequality rows that kept their orientation start with a basic slack;
    # only flipped rows and equality rows need an artificial variable.
    needs_art = np.ones(m, dtype=bool)
    if m_ub:
        needs_art[:m_ub] = neg[:m_ub]
    art_rows = np.flatnonzero(needs_art)
    n_art = art_rows.size
    n_total = n_struct + n_art

    # Tableau layout: m constraint rows [body | artificials | rhs], then one
    # cost row updated in-place by each pivot.
    tab = np.zeros((m + 1, n_total + 1))
    tab[:m, :n_struct] = body
    tab[art_rows, n_struct + np.arange(n_art)] = 1.0
    tab[:m, n_total] = rhs

    basis = np.empty(m, dtype=np.int64)
    if m_ub:
        basis[:m_ub] = 2 * n + np.arange(m_ub)
    basis[art_rows] = n_struct + np.arange(n_art)

    if n_art:
        # Phase 1: minimize the sum of artificials; the initial reduced cost
        # row is -(sum of the artificial rows).
        tab[m, :] = -tab[art_rows, :].sum(axis=0)
        tab[m, n_struct:n_total] = 0.0
        status = _simplex_core(tab, basis, lowest=n_total)
        if status != _STATUS_OPTIMAL or -tab[m, n_total] > 1e-7:
            return LPResult(_STATUS_INFEASIBLE)

    # Drive any residual (degenerate) artificials out of the basis.
    for i in np.flatnonzero(basis >= n_struct):
        cand = np.flatnonzero(np.abs(tab[i, :n_struct]) > _PIV_TOL)
        if cand.size:
            _pivot(tab, basis, i, cand[0])
        # Otherwise the row is redundant; its artificial stays basic at zero.

    # Phase 2: the true objective, with artificial columns frozen out.
    obj = np.concatenate([c, -c, np.zeros(m_ub)])
    cost = -obj if maximize else obj
    tab[m, :] = 0.0
    tab[m, :n_struct] = cost
    basic_struct = basis[basis < n_struct]
    rows = np.flatnonzero(basis < n_struct)
    if rows.size:
        tab[m, :] -= cost[basic_struct] @ tab[rows, :]
    status = _simplex_core(tab, basis, lowest=n_struct)
    if status == _STATUS_UNBOUNDED:
        return LPResult(_STATUS_UNBOUNDED)

    z = np.zeros(n_total + 1)
    z[basis] = tab[:m, n_total]
    x = z[:n] - z[n : 2 * n]
    return LPResult(_STATUS_OPTIMAL, x, float(c @ x))


def _pivot(tab, basis, row, col) -> None:
    tab[row] /= tab[row, col]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, tab[row])
    tab[:, col] = 0.0
    tab[row, col] = 1.0
    basis[row] = col


def _simplex_core(tab, basis, lowest) -> str:
    """Minimize the tableau cost row over columns < ``lowest``.

    Dantzig's rule with a Bland fallback after a stall, so the iteration is
    fast in the common case and still provably terminating.
    """
    m = tab.shape[0] - 1
    if m == 0:
        return _STATUS_OPTIMAL
    rhs_col = tab.shape[1] - 1
    cost = tab[m]
    stall = 0
    max_iter = 200 * tab.shape[1]
    for _ in range(max_iter):
        reduced = cost[:lowest]
        if stall < 30:
            col = int(np.argmin(reduced))
            if reduced[col] >= -1e-10:
                return _STATUS_OPTIMAL
        else:  # Bland: lowest eligible index enters
            eligible = np.flatnonzero(reduced < -1e-10)
            if eligible.size == 0:
                return _STATUS_OPTIMAL
            col = int(eligible[0])
        colvals = tab[:m, col]
        pos = colvals > _PIV_TOL
        if not pos.any():
            return _STATUS_UNBOUNDED
        ratios = np.full(m, np.inf)
        ratios[pos] = tab[:m, rhs_col][pos] / colvals[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12)
        row = int(ties[np.argmin(basis[ties])])
        prev = tab[m, rhs_col]
        _pivot(tab, basis, row, col)
        stall = stall + 1 if tab[m, rhs_col] >= prev - 1e-12 else 0
    raise ArithmeticError("simplex failed to converge (cycling or ill-conditioning)")
