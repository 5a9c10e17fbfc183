import csv
import io
import random
from fractions import Fraction
from itertools import combinations
from math import comb

import pytest

from ifam.family import FamilyError, SetFamily, canonical_form, layer, layers, mask_of
from ifam.layer2 import (
    TRIANGLE,
    Layer2Graph,
    Star,
    census_from_brute,
    classify_trace,
    count_trace_families,
    crossover_csv,
    crossover_rows,
    decomposition_count,
    graph_from_sets,
    layer2_bound_value,
    max_p2,
    p2_count,
    phi_map,
    phi_map_case,
    quasi_graph,
    star_triangle_census,
    stars_ratio_check,
    trace_families,
    triangle_count,
)
from ifam.profile import brute_profile, intersecting_profile, is_intersecting


def S(*xs):
    return mask_of(xs)


def random_graph(rng, n):
    edges = [e for e in layer(n, 2) if rng.random() < rng.random()]
    return Layer2Graph(n, tuple(edges))


# --- quasi constructions and p2 ---------------------------------------------------------


def test_quasi_complete_six_four():
    g = quasi_graph(6, 4, "complete")
    assert set(g.edges) == {S(1, 2), S(1, 3), S(2, 3), S(1, 4)}
    assert g.degrees == (3, 2, 2, 1, 0, 0)
    assert p2_count(g) == 5


def test_quasi_star_six_four():
    g = quasi_graph(6, 4, "star")
    assert sorted(g.degrees) == [0, 1, 1, 1, 1, 4]
    assert p2_count(g) == 6


def test_quasi_extremes():
    assert quasi_graph(5, 10, "complete").edges == tuple(layer(5, 2))
    assert quasi_graph(5, 0, "star").edges == ()
    with pytest.raises(FamilyError):
        quasi_graph(5, 11, "complete")
    with pytest.raises(FamilyError):
        quasi_graph(5, 3, "wheel")


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_quasi_sizes(n):
    for i in range(comb(n, 2) + 1):
        for kind in ("star", "complete"):
            g = quasi_graph(n, i, kind)
            assert len(g) == i
            assert sum(g.degrees) == 2 * i


def test_p2_small():
    assert p2_count(graph_from_sets(3, [(1, 2), (1, 3), (2, 3)])) == 3
    n = 6
    star = graph_from_sets(n, [(1, t) for t in range(2, n + 1)])
    assert p2_count(star) == comb(n - 1, 2)


def test_p2_matches_pair_count_on_random_graphs():
    rng = random.Random(2024)
    for _ in range(200):
        g = random_graph(rng, rng.randint(2, 8))
        brute = sum(1 for a, b in combinations(g.edges, 2) if a & b)
        assert p2_count(g) == brute


def test_max_p2_examples():
    res = max_p2(6, 4)
    assert res.value == 6
    star = graph_from_sets(6, [(1, 2), (1, 3), (1, 4), (1, 5)]).canonical()
    assert star in res.optima
    assert max_p2(5, 1).value == 0


def test_max_p2_ties_keep_both():
    # at (5, 3) both the triangle and the 3-star give 3
    res = max_p2(5, 3)
    tri = graph_from_sets(5, [(1, 2), (1, 3), (2, 3)]).canonical()
    star = graph_from_sets(5, [(1, 2), (1, 3), (1, 4)]).canonical()
    assert res.value == 3
    assert tri in res.optima and star in res.optima


def test_crossover_csv():
    text = crossover_csv(6)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["i", "p2_quasi_star", "p2_quasi_complete", "winner"]
    assert len(rows) == 16
    row4 = rows[4]
    assert (row4["p2_quasi_star"], row4["p2_quasi_complete"], row4["winner"]) == ("6", "5", "star")
    assert all(r["winner"] in ("star", "complete", "tie") for r in rows)
    assert crossover_rows(6)[0]["winner"] == "tie"


# --- census ------------------------------------------------------------------------------


def test_census_triangle_and_star():
    tri = star_triangle_census(graph_from_sets(4, [(1, 2), (1, 3), (2, 3)]))
    assert tri.a[2] == 3 and tri.a[3] == 0 and tri.b == 1
    st3 = star_triangle_census(graph_from_sets(4, [(1, 2), (1, 3), (1, 4)]))
    assert st3.a[2] == 3 and st3.a[3] == 1 and st3.b == 0


def test_census_against_brute():
    rng = random.Random(77)
    for _ in range(60):
        n = rng.randint(3, 6)
        g = random_graph(rng, n)
        cen = star_triangle_census(g)
        assert cen.a[0] == 1 and cen.a[1] == len(g)
        assert cen.b == triangle_count(g) <= comb(n, 3)
        prof = brute_profile(g.family()) if len(g) <= 15 else intersecting_profile(g.family())
        for m in range(2, n):
            want = cen.a[m] + (cen.b if m == 3 else 0)
            assert census_from_brute(g, m) == want == prof[m]
            assert cen.a[m] <= n * comb(n - 1, m)


# --- trace counts ---------------------------------------------------------------------------


def test_trace_examples():
    assert count_trace_families(4, 3, TRIANGLE) == 1
    assert count_trace_families(4, 4, TRIANGLE) == 5
    assert count_trace_families(4, 3, Star(2)) == 5
    with pytest.raises(FamilyError):
        count_trace_families(5, 2, TRIANGLE)


@pytest.mark.parametrize("n", [4, 5])
def test_triangle_closed_form(n):
    for s in range(3, 9):
        assert count_trace_families(n, s, TRIANGLE) == comb(2 ** (n - 1) - 3, s - 3)


@pytest.mark.parametrize("n,r,s", [(4, 2, 4), (5, 3, 5), (5, 0, 3), (5, 4, 6)])
def test_trace_counts_match_listing(n, r, s):
    listed = trace_families(n, s, Star(r))
    assert len(listed) == count_trace_families(n, s, Star(r))
    for E in listed:
        assert is_intersecting(E) and classify_trace(n, E) == Star(r)


def test_triangle_not_above_three_star():
    assert count_trace_families(5, 4, TRIANGLE) <= count_trace_families(5, 4, Star(3))


def test_decomposition_matches_profile():
    rng = random.Random(8)
    tables = {}
    for _ in range(10):
        g = random_graph(rng, 5)
        F = SetFamily.from_masks(5, layers(5, 3) + list(g.edges))
        prof = intersecting_profile(F)
        for s in range(2, 9):
            assert decomposition_count(5, g, s, tables) == prof[s]


# --- the map phi -----------------------------------------------------------------------------


def test_phi_worked_example():
    n, r = 7, 4
    E = [S(1, t) for t in range(2, 6)] + [S(1, 6, 7)]
    F, case = phi_map_case(S(6, 7), E, r, n)
    assert case == 2
    assert F == tuple(sorted([S(1, 2), S(1, 3), S(1, 4), S(1, 5, 6, 7), S(1, 6, 7)]))
    assert classify_trace(n, F) == Star(3)


def test_phi_properties_small():
    n, r, s = 7, 4, 5
    R = [u for u in range(1 << n) if u & 0b11111 == 0 and bin(u).count("1") >= 2]
    images = {}
    for E in trace_families(n, s, Star(r)):
        for U in R:
            G = phi_map(U, E, r, n)
            assert G.N == len(E)
            assert is_intersecting(G)
            assert classify_trace(n, G.members) == Star(r - 1)
            images[G.members] = images.get(G.members, 0) + 1
    assert max(images.values()) <= 2


def test_phi_r3_lands_in_star_or_triangle():
    n, r, s = 6, 3, 4
    for E in trace_families(n, s, Star(r))[:40]:
        for U in (S(5, 6),):
            G = phi_map(U, E, r, n)
            assert classify_trace(n, G.members) in (Star(2), TRIANGLE)


def test_phi_rejects_bad_input():
    E = [S(1, t) for t in range(2, 6)] + [S(1, 6, 7)]
    with pytest.raises(FamilyError):
        phi_map(S(6), E, 4, 7)  # |U| < 2
    with pytest.raises(FamilyError):
        phi_map(S(5, 6), E, 4, 7)  # U leaves [r+2, n]
    with pytest.raises(FamilyError):
        phi_map(S(6, 7), E[:3] + [S(1, 6, 7)], 4, 7)  # trace is S_3, not S_4
    with pytest.raises(FamilyError):
        phi_map(S(6, 7), E, 2, 7)


# --- numeric bounds --------------------------------------------------------------------------


def test_bound_crosses_one_at_21():
    assert layer2_bound_value(20) > 1
    assert layer2_bound_value(21) < 1
    vals = [layer2_bound_value(n) for n in range(21, 41)]
    assert all(v < 1 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert isinstance(vals[0], Fraction)


def test_stars_ratio():
    res = stars_ratio_check(7, 4, 5)
    assert res.passes and res.factor == Fraction(1, 2)
    assert (res.lower, res.upper) == (2073, 61)
    res3 = stars_ratio_check(7, 3, 4)
    assert res3.passes and res3.factor == 1
    assert (res3.lower, res3.upper, res3.triangle) == (2534, 65, 61)
    assert res3.to_json()["status"] == "pass"


def test_layer2_graph_validation():
    with pytest.raises(FamilyError):
        Layer2Graph(4, (S(1, 2, 3),))
    with pytest.raises(FamilyError):
        Layer2Graph(4, (S(1, 2), S(1, 2)))
    g = graph_from_sets(4, [(1, 2), (3, 4)])
    assert g.complement().complement() == g
    assert canonical_form(g.family()) == g.canonical().family()
