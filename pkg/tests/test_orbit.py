"""Mapping-class orbit counting: simple curves, general words, volumes."""

import math

import pytest

from teichlab import orbit as ob


MODULAR = (3.0, 3.0, 3.0)
GENERIC = (3.2, 3.5, 4.1)


class TestSimpleCounting:
    def test_modular_systole_count(self):
        # systole 2 arccosh(3/2) ~ 1.9248; the three trace-3 slopes realize it
        sys_len = 2.0 * math.acosh(1.5)
        assert ob.count_simple(MODULAR, sys_len + 1e-6) == 3
        assert ob.count_simple(MODULAR, sys_len - 1e-6) == 0

    def test_slopes_sorted_unique(self):
        slopes = ob.simple_slopes(GENERIC, 12.0)
        keys = [s for (s, _) in slopes]
        assert len(keys) == len(set(keys))
        bound = 2.0 * math.cosh(6.0)
        assert all(tr <= bound for (_, tr) in slopes)

    def test_quadratic_growth(self):
        c1 = ob.count_simple(GENERIC, 25.0)
        c2 = ob.count_simple(GENERIC, 50.0)
        assert 3.5 <= c2 / c1 <= 4.5

    def test_brute_force_small(self):
        # enumerate all primitive slopes in a box as the oracle
        L = 8.0
        bound = 2.0 * math.cosh(L / 2.0)
        got = ob.count_simple(GENERIC, L)
        want = 0
        for p in range(-60, 61):
            for q in range(0, 61):
                if q == 0 and p <= 0:
                    continue
                if math.gcd(p, q) != 1:
                    continue
                if abs(ob.farey_trace(GENERIC, (p, q))) <= bound:
                    want += 1
        assert got == want


class TestWordClassification:
    def test_simple_power(self):
        assert ob.simple_power("a") == 1
        assert ob.simple_power("aa") == 2
        assert ob.simple_power("abab") == 2
        assert ob.simple_power("abaB") == 0

    def test_peripheral(self):
        assert ob.is_peripheral_word("abAB")
        assert not ob.is_peripheral_word("ab")

    def test_symmetry_order_infinite_for_nonfilling(self):
        # tr(abaB) = x^2 + 2 is twist invariant: infinite stabilizer
        assert ob.curve_symmetry_order("abaB") == 0
        assert ob.curve_symmetry_order("aabb") == 0

    def test_symmetry_order_finite_for_filling(self):
        assert ob.curve_symmetry_order("aabAb") >= 1

    def test_require_filling(self):
        with pytest.raises(ValueError):
            ob.require_filling("a")
        with pytest.raises(ValueError):
            ob.require_filling("abAB")
        with pytest.raises(ValueError):
            ob.require_filling("abaB")
        ob.require_filling("aabAb")


class TestOrbitCount:
    @pytest.mark.parametrize("gamma", ["abaB", "aabAb"])
    def test_matches_brute_force(self, gamma):
        for L in [6.0, 9.0]:
            rep = ob.count_orbit_word(MODULAR, gamma, L)
            brute = ob.count_orbit_word_bruteforce(MODULAR, gamma, L)
            assert rep.counts[-1] == brute
            assert rep.prune_violations == 0

    def test_simple_word_via_slopes(self):
        L = 10.0
        rep = ob.count_orbit_word(GENERIC, "a", L)
        assert rep.counts[-1] == ob.count_simple(GENERIC, L)

    def test_power_rescales_length(self):
        L = 10.0
        rep = ob.count_orbit_word(GENERIC, "aa", L)
        assert rep.counts[-1] == ob.count_simple(GENERIC, L / 2.0)

    def test_report_json_round_trip(self):
        rep = ob.count_orbit_word(MODULAR, "aabAb", 8.0)
        back = ob.CountReport.from_json(rep.to_json())
        assert back.counts == rep.counts
        assert back.X == rep.X

    def test_marked_count_relation(self):
        rep = ob.count_orbit_word(MODULAR, "aabAb", 10.0)
        assert rep.sym_order >= 1
        assert rep.a3 == rep.sym_order * rep.a1


class TestConeCount:
    def test_m_invariance(self):
        # every twist orbit meets each width-l cone exactly once
        counts = [ob.cone_count(MODULAR, m, 20.0) for m in (-2, 0, 5)]
        assert len(set(counts)) == 1

    def test_quadratic_growth(self):
        c1 = ob.cone_count(GENERIC, 0, 30.0)
        c2 = ob.cone_count(GENERIC, 0, 60.0)
        assert 3.4 <= c2 / c1 <= 4.6


class TestThurstonBall:
    def test_positive_and_monotone(self):
        b1 = ob.thurston_ball_B(MODULAR)
        b2 = ob.thurston_ball_B((4.0, 4.0, 4.0))
        assert b1 > b2 > 0  # longer systole means smaller unit ball

    def test_integral_multicurves_track_B(self):
        X = GENERIC
        B = ob.thurston_ball_B(X)
        L = 40.0
        n = ob.integral_multicurve_count(X, L)
        assert n / (L * L * B) == pytest.approx(1.0, rel=0.1)


class TestBallVolume:
    def test_region_volume_scales(self):
        # boundary effects are still visible at this scale; the tight
        # [3.8, 4.2] window is only demanded at L = 50
        v1 = ob.ball_length_region_volume("aabAb", 12.5)
        v2 = ob.ball_length_region_volume("aabAb", 25.0)
        assert v1 > 0
        assert 3.0 <= v2 / v1 <= 5.5

    def test_non_filling_rejected(self):
        with pytest.raises(ValueError):
            ob.ball_length_region_volume("abaB", 20.0)
