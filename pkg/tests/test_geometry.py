import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from berconvex.constellation import Constellation, make_standard, parse_constellation
from berconvex.geometry import (
    Polyhedron, decision_region, farthest_point_distance, max_boundary_distance,
    min_boundary_distance, prune_redundant, recession_direction, summarize,
)


def test_bisector_half_spaces():
    c = make_standard("pam", 4)
    reg = decision_region(c, 1)
    assert reg.n_constraints == 3
    assert np.allclose(np.abs(reg.normals), 1)
    assert np.allclose(sorted(reg.offsets), np.array([1, 1, 2]) / math.sqrt(5))


def test_pruning_keeps_facets_only():
    geo = summarize(make_standard("qam", 16))
    counts = sorted(r.n_constraints for r in geo.regions)
    assert counts == [2] * 4 + [3] * 8 + [4] * 4
    geo = summarize(make_standard("pam", 4))
    assert [r.sources for r in geo.regions] == [(1,), (0, 2), (1, 3), (2,)]


def test_boundary_distances_pam4():
    c = make_standard("pam", 4)
    assert min_boundary_distance(c, 0) == pytest.approx(1 / math.sqrt(5), abs=1e-15)
    assert max_boundary_distance(c, 1).value == pytest.approx(1 / math.sqrt(5), abs=1e-12)
    assert not max_boundary_distance(c, 0).bounded


def test_qam16_interior_far_corner():
    geo = summarize(make_standard("qam", 16))
    inner = [i for i, m in enumerate(geo.max_distances) if m.bounded]
    assert inner == [5, 6, 9, 10]
    assert geo.d_max_per_point[5] == pytest.approx(math.sqrt(2 / 10), abs=1e-12)


@pytest.mark.parametrize("name", ["bpsk", "psk:4", "psk:8"])
def test_psk_regions_unbounded_with_certificate(name):
    geo = summarize(parse_constellation(name))
    for reg, m in zip(geo.regions, geo.max_distances):
        assert not m.bounded
        d = m.certificate
        assert np.all(reg.normals @ d <= 1e-9)
        assert reg.contains(1e5 * d, tol=1e-6)


def test_bounded_region_has_no_recession_direction():
    box = Polyhedron(np.vstack([np.eye(3), -np.eye(3)]), np.ones(6))
    assert recession_direction(box) is None
    assert farthest_point_distance(box).value == pytest.approx(math.sqrt(3))


def test_high_dimension_uses_support_directions():
    box = Polyhedron(np.vstack([np.eye(4), -np.eye(4)]), np.ones(8))
    m = farthest_point_distance(box)
    assert m.approximate
    assert m.value == pytest.approx(2.0, rel=1e-9)


def test_empty_region_detected():
    p = Polyhedron(np.array([[1.0], [-1.0]]), np.array([-1.0, -1.0]))
    assert p.empty


def test_translate_moves_set():
    p = Polyhedron(np.array([[1.0, 0.0]]), np.array([1.0]))
    q = p.translate([2.0, 0.0])
    assert q.contains([2.9, 5.0]) and not q.contains([3.1, 0.0])


def test_region_in_frame_matches_shift():
    c = make_standard("psk", 8)
    geo = summarize(c)
    rng = np.random.default_rng(0)
    x = rng.standard_normal((1000, 2))
    for i, j in [(0, 1), (3, 7)]:
        r = geo.region_in_frame(j, i)
        assert np.array_equal(r.contains(x), geo.regions[j].contains(x + c.points[i] - c.points[j]))


@st.composite
def constellations(draw):
    n = draw(st.integers(1, 3))
    M = draw(st.integers(2, 7))
    pts = draw(st.lists(st.lists(st.floats(-3, 3), min_size=n, max_size=n), min_size=M, max_size=M))
    pts = np.array(pts)
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2) + np.eye(M)
    if d.min() < 0.05:
        pts = pts + np.arange(M)[:, None] * 0.37
    return Constellation(pts)


@settings(max_examples=25, deadline=None)
@given(constellations(), st.integers(0, 2**32 - 1))
def test_pruned_regions_match_nearest_point(c, seed):
    rng = np.random.default_rng(seed)
    geo = summarize(c)
    x = rng.uniform(-5, 5, (2000, c.n))
    d2 = np.sum((x[:, None] - c.points[None]) ** 2, axis=2)
    s = np.sort(d2, axis=1)
    clear = s[:, 1] - s[:, 0] > 1e-7
    nearest = np.argmin(d2, axis=1)
    for i in range(c.M):
        full = decision_region(c, i).contains(x - c.points[i])
        pruned = geo.regions[i].contains(x - c.points[i])
        assert np.array_equal(full[clear], pruned[clear])
        assert np.array_equal(pruned[clear], (nearest == i)[clear])


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 5.0))
def test_distances_scale_linearly(f):
    c = make_standard("pam", 4)
    a, b = summarize(c), summarize(c.scaled(f))
    assert np.allclose(b.d_min_per_point, f * a.d_min_per_point, rtol=1e-12)
    fin = np.isfinite(a.d_max_per_point)
    assert np.allclose(b.d_max_per_point[fin], f * a.d_max_per_point[fin], rtol=1e-9)
    assert np.array_equal(np.isfinite(b.d_max_per_point), fin)


def test_prune_is_idempotent():
    reg = prune_redundant(decision_region(make_standard("qam", 16), 5))
    again = prune_redundant(reg)
    assert again.sources == reg.sources
