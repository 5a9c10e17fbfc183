import pytest

from ifam.compressions import changes, compress_to_fixpoint, left_compressions, uvf_family
from ifam.family import SetFamily, canonical_form, has_layer_form, layers, mask_of
from ifam.profile import LimitExceeded, brute_profile, intersecting_profile
from ifam.search import exhaustive_max, hillclimb, restricted_layer_max, scan_families


def test_three_five_pairs():
    rep = exhaustive_max(3, 5, 2)
    assert rep.max_count == 9
    assert rep.families_scanned == 21
    for F in rep.optima:
        assert brute_profile(F)[2] == 9


def test_four_eleven_unique_optimum():
    rep = exhaustive_max(4, 11, 2)
    assert rep.max_count == 52
    assert rep.optima == (canonical_form(SetFamily.from_masks(4, layers(4, 2))),)


def test_four_ten_structural():
    rep = exhaustive_max(4, 10, 2)
    assert rep.optima
    for F in rep.optima:
        assert has_layer_form(F)
        assert sum(1 for m in F if bin(m).count("1") == 2) == 5


def test_optima_rescored_and_distinct():
    res = scan_families(4, 8, [2, 3, 4])
    for s, rep in res.items():
        assert len({F.members for F in rep.optima}) == len(rep.optima)
        for F in rep.optima:
            assert canonical_form(F) == F
            assert brute_profile(F)[s] == rep.max_count


def test_parallel_matches_serial():
    a = scan_families(4, 7, [2, 3], jobs=1)
    b = scan_families(4, 7, [2, 3], jobs=3)
    for s in (2, 3):
        assert a[s].max_count == b[s].max_count
        assert a[s].optima == b[s].optima
        assert a[s].families_scanned == b[s].families_scanned


def test_budget():
    with pytest.raises(LimitExceeded):
        exhaustive_max(99, 5, 2)
    with pytest.raises(LimitExceeded):
        exhaustive_max(5, 10, 2)


def test_layers_restriction():
    rep = exhaustive_max(5, 20, 2, restriction="layers:2")
    for F in rep.optima:
        assert set(layers(5, 3)) <= set(F.members)
    with pytest.raises(LimitExceeded):
        exhaustive_max(5, 10, 2, restriction="layers:2")
    with pytest.raises(ValueError):
        exhaustive_max(3, 4, 2, restriction="bogus")


def test_upset_only():
    rep = exhaustive_max(3, 4, 2, restriction="upset-only")
    for F in rep.optima:
        have = set(F.members)
        assert all((m | (1 << e)) in have for m in have for e in range(3))


def test_allow_empty():
    with_empty = exhaustive_max(2, 2, 2, allow_empty=True)
    without = exhaustive_max(2, 2, 2)
    assert with_empty.families_scanned == 6 and without.families_scanned == 3
    assert with_empty.max_count == without.max_count == 1


def test_report_json():
    rep = exhaustive_max(3, 5, 2)
    out = rep.to_json()
    assert out["max"] == "9"
    assert out["scanned"] == 21
    assert out["restriction"] == "none"
    assert out["optima"][0].startswith("n 3\n")


# --- restricted layer-2 search -----------------------------------------------------------


def test_layer_max_star_is_optimal():
    rep = restricted_layer_max(5, 4, 2)
    star = SetFamily.from_masks(5, layers(5, 3) + [mask_of((1, t)) for t in range(2, 6)])
    assert canonical_form(star) in rep.optima
    assert rep.note  # small n is labelled exploratory


def test_layer_max_trivial_cases():
    rep = restricted_layer_max(4, 6, 2)
    assert rep.optima == (canonical_form(SetFamily.from_masks(4, layers(4, 2))),)
    rep = restricted_layer_max(5, 0, 3)
    assert rep.optima == (SetFamily.from_masks(5, layers(5, 3)),)


# --- hill climbing ------------------------------------------------------------------------


def test_hillclimb_fixpoint_unchanged():
    F = SetFamily.from_masks(4, layers(4, 2))
    assert hillclimb(F, seed=1) == F


def test_hillclimb_reaches_strict_improvement():
    F = SetFamily.from_masks(6, layers(6, 3) + [mask_of([1])])
    G = hillclimb(F, seed=4, budget=30)
    assert intersecting_profile(G)[2] >= 888


def test_hillclimb_deterministic_and_dominating():
    F = SetFamily.from_masks(4, [1, 2, 4, 8, 3, 12])
    a, b = hillclimb(F, seed=9), hillclimb(F, seed=9)
    assert a == b
    p, q = intersecting_profile(F).counts, intersecting_profile(a).counts
    assert all(y >= x for x, y in zip(p, q))


def test_driver_and_search_agree_at_small_size():
    # compressing an arbitrary family to a fixpoint cannot beat the exhaustive optimum
    F = SetFamily.from_masks(4, [1, 2, 4, 8, 6, 9, 5, 10, 3])
    G = compress_to_fixpoint(F, uvf=uvf_family(4))
    best = exhaustive_max(4, 9, 2).max_count
    assert intersecting_profile(G)[2] <= best
    assert not any(changes(G, c) for c in left_compressions(4))
