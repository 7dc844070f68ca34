"""Approximate Minkowski sums and intersections of descriptor polytopes.

Exact Minkowski sums and repeated intersections blow descriptor lengths up
multiplicatively; these routines keep the output length capped at a
resolution-dependent constant while staying sandwiched:

* ``box_ams``: constant-work box comparable to the sum of two oriented boxes,
  via diagonalization of the infimal quadratic form of the two box ellipsoids;
* ``ams``: ``K + K' <= out <= (1 + C tau) diamond (K + K')``, support values
  over a direction net computed as the sum of the two support values;
* ``ai``: nonemptiness check plus resolution capping of ``K_1 ∩ ... ∩ K_k``
  (the raw intersection is just the concatenated descriptor).
"""

from __future__ import annotations

import numpy as np

from .lp import lp_feasible
from .polytopes import (
    DEGENERATE_TOL,
    Box,
    Descriptor,
    approx_polytope,
    classify,
    merge_parallel_rows,
    produce_box,
    supports,
    tau_net,
)


def box_ams(b1: Box, b2: Box) -> Box:
    """Box comparable (dimensional constants) to the Minkowski sum of two boxes.

    Each box is comparable to the ellipsoid of its axis quadratic form; the
    sum of the ellipsoids is comparable to the ellipsoid of the infimal
    convolution ``Q(w) = min {q1(v) + q2(w - v)}``, computed by eigenvalue
    decomposition.  Flat directions pass through as zero radii.
    """
    if b1.dim != b2.dim:
        raise ValueError("dimension mismatch")
    d = b1.dim
    # Quadratic forms as PSD matrices on their active spans: q = U diag(1/r^2) U^T.
    m1 = _form_inverse(b1)  # inverse forms add under inf-convolution
    m2 = _form_inverse(b2)
    total = m1 + m2
    eigval, eigvec = np.linalg.eigh(total)
    radii = np.sqrt(np.maximum(eigval, 0.0))
    cutoff = 1e-12 * max(radii.max(), 1.0)
    radii[radii < cutoff] = 0.0
    order = np.argsort(-radii)
    return Box(b1.center + b2.center, eigvec.T[order], radii[order])


def _form_inverse(box: Box) -> np.ndarray:
    """Matrix of the inverse quadratic form: sum r_i^2 e_i e_i^T (flat axes drop out)."""
    r2 = box.radii**2
    return (box.axes.T * r2) @ box.axes


def ams(d1: Descriptor, d2: Descriptor, tau: float) -> Descriptor:
    """Approximate Minkowski sum with descriptor length capped by the net size.

    Empty input short-circuits to the empty marker.  For nonempty bounded
    inputs the output satisfies ``K1 + K2 <= out`` exactly (support values
    add) and ``out <= (1 + C tau) diamond (K1 + K2)`` with ``C`` depending
    only on the dimension, because the net lives on the sum's own box frame.
    """
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    if d1.empty_marker or d2.empty_marker:
        return Descriptor.empty(d1.dim)
    if classify(d1) == "empty" or classify(d2) == "empty":
        return Descriptor.empty(d1.dim)
    box = box_ams(produce_box(d1), produce_box(d2))
    rmax = float(np.max(box.radii))
    if rmax <= 0.0:
        return Descriptor.from_point(box.center)
    active = box.radii > DEGENERATE_TOL * rmax
    axes_a, lam_a = box.axes[active], box.radii[active]

    net = tau_net(int(active.sum()), tau)
    rows = (net / lam_a) @ axes_a
    b = supports(d1, rows) + supports(d2, rows)

    flat = box.axes[~active]
    if len(flat):
        offs = flat @ box.center
        rows = np.vstack([rows, flat, -flat])
        b = np.concatenate([b, offs, -offs])
    return merge_parallel_rows(Descriptor(d1.dim, rows, b))


def ai(descs, tau: float) -> Descriptor:
    """Approximate intersection of bounded nonempty polytopes.

    Concatenates the descriptors (that is the exact intersection), decides
    nonemptiness by one LP, then caps the length with the resolution-``tau``
    outer approximation.  An empty intersection returns the empty marker,
    which is a legitimate outcome rather than an error.
    """
    descs = list(descs)
    if not descs:
        raise ValueError("ai needs at least one descriptor")
    dim = descs[0].dim
    combined = descs[0]
    for other in descs[1:]:
        combined = combined.concat(other)
    if combined.empty_marker:
        return Descriptor.empty(dim)
    if lp_feasible(combined.xi, combined.b).infeasible:
        return Descriptor.empty(dim)
    w0, approx = approx_polytope(combined, tau)
    return approx.translated(w0)
