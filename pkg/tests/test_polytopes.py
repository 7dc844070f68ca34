import itertools

import numpy as np
import pytest

from smoothselect.polytopes import (
    Box,
    Descriptor,
    approx_polytope,
    classify,
    diameter_in_subspace,
    enlarged_support,
    interior_point,
    lp_solve,
    member_of_enlarged,
    merge_parallel_rows,
    produce_box,
    sample_point,
    support,
    supports,
    tau_net,
    vertices_of,
)


def random_polytope(rng, dim, n_points=8, scale=1.0) -> Descriptor:
    """Bounded polytope as the convex hull of random points, in H-form."""
    pts = rng.normal(size=(n_points, dim)) * scale
    if dim == 1:
        lo, hi = float(pts.min()), float(pts.max())
        return Descriptor.from_bounds([lo], [hi])
    from scipy.spatial import ConvexHull

    hull = ConvexHull(pts)
    xi = hull.equations[:, :dim]
    b = -hull.equations[:, dim]
    return Descriptor(dim, xi, b, vertices=pts[hull.vertices])


class TestLPSolve:
    def test_unit_square_corner(self):
        square = Descriptor.from_bounds([0, 0], [1, 1])
        res = lp_solve(square, [1.0, 1.0])
        assert res.optimal
        np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-9)

    def test_infeasible(self):
        desc = Descriptor(1, [[1.0], [-1.0]], [-1.0, -1.0])
        assert lp_solve(desc, [1.0]).infeasible

    def test_unbounded(self):
        desc = Descriptor(2, [[1.0, 0.0]], [0.0])
        assert lp_solve(desc, [-1.0, 0.0]).unbounded


class TestClassify:
    def test_cube(self):
        assert classify(Descriptor.from_bounds([0, 0, 0], [1, 1, 1])) == "bounded-nonempty"

    def test_halfspace(self):
        assert classify(Descriptor(2, [[1.0, 0.0]], [0.0])) == "unbounded"

    def test_contradiction(self):
        assert classify(Descriptor(1, [[1.0], [-1.0]], [-1.0, -1.0])) == "empty"

    def test_empty_marker(self):
        assert classify(Descriptor.empty(2)) == "empty"


class TestDiameterInSubspace:
    def test_segment(self):
        seg = Descriptor.from_bounds([-1, 0], [1, 0])
        v_plus, v_minus, e_hat, lam = diameter_in_subspace(seg, np.eye(2))
        assert lam == pytest.approx(2.0, abs=1e-8)
        assert abs(e_hat[0]) == pytest.approx(1.0, abs=1e-8)

    def test_single_point(self):
        pt = Descriptor.from_point([0.3, -0.7])
        *_, e_hat, lam = diameter_in_subspace(pt, np.eye(2))
        assert lam == pytest.approx(0.0, abs=1e-8)
        assert np.linalg.norm(e_hat) == pytest.approx(1.0)

    def test_near_diameter_factor(self):
        rng = np.random.default_rng(10)
        for dim in (2, 3):
            for _ in range(10):
                desc = random_polytope(rng, dim)
                v_plus, v_minus, _, lam = diameter_in_subspace(desc, np.eye(dim))
                verts = desc.vertices
                true_diam = max(
                    np.linalg.norm(a - b) for a, b in itertools.combinations(verts, 2)
                )
                assert true_diam <= np.sqrt(dim) * lam + 1e-7


class TestProduceBox:
    def test_unit_cube(self):
        cube = Descriptor.from_bounds([-1, -1], [1, 1])
        box = produce_box(cube)
        assert box.radii[0] == pytest.approx(box.radii[1], rel=0.3)
        self._check_sandwich(cube, box)

    def test_degenerate_segment(self):
        seg = Descriptor.from_bounds([-2, 0], [2, 0])
        box = produce_box(seg)
        assert np.sum(box.radii > 1e-9) == 1

    def test_translation_covariance(self):
        rng = np.random.default_rng(11)
        desc = random_polytope(rng, 2)
        t = np.array([3.0, -1.5])
        box = produce_box(desc)
        box_t = produce_box(desc.translated(t))
        np.testing.assert_allclose(box_t.center, box.center + t, atol=1e-7)
        np.testing.assert_allclose(np.sort(box_t.radii), np.sort(box.radii), atol=1e-7)

    def test_sandwich_random(self):
        rng = np.random.default_rng(12)
        for dim in (1, 2, 3):
            for _ in range(8):
                desc = random_polytope(rng, dim)
                self._check_sandwich(desc, produce_box(desc))

    @staticmethod
    def _check_sandwich(desc: Descriptor, box: Box):
        d = desc.dim
        # inner: the box shrunk by 1/d sits inside the body
        for corner in box.scaled(1.0 / d).corners():
            assert desc.contains(corner, tol=1e-7)
        # outer: every vertex of the body is inside a dimensional blow-up
        outer = (4.0 * d) ** (d + 1)
        verts = desc.vertices if desc.vertices is not None else vertices_of(desc)
        rmax = max(np.max(box.radii), 1e-300)
        for v in verts:
            proj = np.abs(box.axes @ (v - box.center))
            assert np.all(proj <= outer * np.maximum(box.radii, 1e-12 * rmax) + 1e-7)


class TestTauNet:
    def test_dim_one(self):
        net = tau_net(1, 0.7)
        np.testing.assert_allclose(np.sort(net.ravel()), [-1.0, 1.0])

    def test_covering(self):
        rng = np.random.default_rng(13)
        for dim, tau in [(2, 0.5), (2, 0.25), (3, 0.5)]:
            net = tau_net(dim, tau)
            u = rng.normal(size=(10_000, dim))
            u /= np.linalg.norm(u, axis=1)[:, None]
            dist = np.min(
                np.linalg.norm(u[:, None, :] - net[None, :, :], axis=2), axis=1
            )
            assert dist.max() < tau

    def test_nesting(self):
        for dim in (2, 3):
            coarse = {tuple(row) for row in np.round(tau_net(dim, 0.5), 9)}
            fine = {tuple(row) for row in np.round(tau_net(dim, 0.5 / 2**dim), 9)}
            assert coarse <= fine

    def test_size_scaling(self):
        assert len(tau_net(2, 0.25)) <= 400
        assert len(tau_net(2, 0.5)) < len(tau_net(2, 0.125))


class TestApproxPolytope:
    def test_axis_box_roundtrip(self):
        cube = Descriptor.from_bounds([-1, -2], [1, 2])
        w0, approx = approx_polytope(cube, 0.25)
        recentered = cube.translated(-w0)
        # outer: every original point (recentered) stays inside
        rng = np.random.default_rng(14)
        for _ in range(50):
            v = sample_point(recentered, rng)
            assert approx.contains(v, tol=1e-7)
        # inner-with-enlargement: approx within the diamond enlargement
        for _ in range(30):
            v = sample_point(approx, rng)
            assert member_of_enlarged(recentered, 6 * 16 * 0.25, v)

    def test_polygon_size_cap(self):
        angles = np.linspace(0, 2 * np.pi, 101)[:-1]
        pts = np.c_[np.cos(angles), np.sin(angles)]
        xi = pts  # outward normals of the regular 100-gon touch at the vertices
        b = np.full(100, np.cos(np.pi / 100))
        desc = Descriptor(2, xi, b)
        w0, approx = approx_polytope(desc, 0.1)
        assert len(approx) <= len(tau_net(2, 0.1)) + 4
        for v in (pts * np.cos(np.pi / 100)) - w0:
            assert approx.contains(v, tol=1e-7)

    def test_degenerate_segment_reduces_dimension(self):
        seg = Descriptor.from_bounds([-1, 0.5], [1, 0.5])
        w0, approx = approx_polytope(seg, 0.25)
        # flat direction pinned by equality-style rows
        assert not approx.contains([0.0, 0.2], tol=1e-6)
        assert approx.contains([0.0, 0.0], tol=1e-9)
        assert len(approx) <= 6

    def test_point_body(self):
        pt = Descriptor.from_point([0.5, -0.25])
        w0, approx = approx_polytope(pt, 0.5)
        np.testing.assert_allclose(w0, [0.5, -0.25], atol=1e-9)
        assert approx.contains([0.0, 0.0], tol=1e-9)
        assert not approx.contains([0.01, 0.0], tol=1e-6)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            approx_polytope(Descriptor(2, [[1.0, 0.0]], [0.0]), 0.25)
        with pytest.raises(ValueError):
            approx_polytope(Descriptor.from_bounds([0], [1]), 1.5)


class TestEnlargement:
    def test_interval_boundary(self):
        seg = Descriptor.from_bounds([0.0], [1.0])
        assert member_of_enlarged(seg, 0.5, [-0.25])
        assert not member_of_enlarged(seg, 0.5, [-0.26])

    def test_contains_body(self):
        rng = np.random.default_rng(15)
        desc = random_polytope(rng, 2)
        for _ in range(20):
            assert member_of_enlarged(desc, 0.1, sample_point(desc, rng))

    def test_double_enlargement_identity(self):
        # (1+t).((1+t).K) == (1+(2+t)t).K via support functions
        rng = np.random.default_rng(16)
        tau = 0.3
        for _ in range(50):
            desc = random_polytope(rng, 2, n_points=6)
            dirs = rng.normal(size=(200, 2))
            dirs /= np.linalg.norm(dirs, axis=1)[:, None]
            h_plus = supports(desc, dirs)
            h_minus = supports(desc, -dirs)
            once_p = enlarged_support(h_plus, h_minus, tau)
            once_m = enlarged_support(h_minus, h_plus, tau)
            twice = enlarged_support(once_p, once_m, tau)
            direct = enlarged_support(h_plus, h_minus, (2 + tau) * tau)
            np.testing.assert_allclose(twice, direct, rtol=1e-9, atol=1e-9)

    def test_dilation_bounds(self):
        # recentred enlargement stays between (1+tau) A^-2 and (1+tau) A^2
        # multiples of the body when A^-1 B <= K <= A B
        rng = np.random.default_rng(17)
        tau = 0.2
        for _ in range(10):
            desc = random_polytope(rng, 2, n_points=10)
            box = produce_box(desc)
            centered = desc.translated(-box.center)
            dirs = rng.normal(size=(50, 2))
            dirs /= np.linalg.norm(dirs, axis=1)[:, None]
            h_plus = supports(centered, dirs)
            h_minus = supports(centered, -dirs)
            h_all = np.concatenate([h_plus, h_minus])
            a_const = max(h_all.max(), 1.0 / h_all.min())
            enl = enlarged_support(h_plus, h_minus, tau)
            lo = (1 + tau) * a_const**-2 * h_plus
            hi = (1 + tau) * a_const**2 * h_plus
            assert np.all(enl >= lo - 1e-9)
            assert np.all(enl <= hi + 1e-9)


class TestHelpers:
    def test_merge_parallel_rows(self):
        desc = Descriptor(2, [[1, 0], [2, 0], [0, 1]], [1.0, 1.0, 2.0])
        merged = merge_parallel_rows(desc)
        assert len(merged) == 2
        assert support(merged, [1.0, 0.0]) == pytest.approx(0.5)

    def test_interior_point(self):
        desc = Descriptor.from_bounds([0, 0], [1, 1])
        p = interior_point(desc)
        assert desc.contains(p)
        assert interior_point(Descriptor(1, [[1.0], [-1.0]], [-1.0, -1.0])) is None

    def test_vertices_of_square(self):
        sq = Descriptor.from_bounds([0, 0], [1, 1])
        sq.vertices = None
        verts = vertices_of(sq)
        assert verts.shape == (4, 2)

    def test_serialization_roundtrip(self):
        desc = Descriptor(2, [[1.0, 0.5]], [2.0])
        again = Descriptor.from_dict(desc.to_dict())
        np.testing.assert_allclose(again.xi, desc.xi)
        np.testing.assert_allclose(again.b, desc.b)
