import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings

from wavescope.errors import ValidationError
from wavescope.stagnation import (
    MULTI_ZERO_ALPHA0,
    ZERO_TOL,
    bed_stagnation_feasible,
    class4_lambda_threshold,
    class4_y0_bound,
    feasible_region_sample,
    max_level,
    search_zeros,
    stagnation_levels,
    zero_count,
)
from wavescope.wave_model import WaveClassId, WaveParameters, background_current

from .conftest import draw_params, waves

mp.mp.dps = 40

# zeros of U0 at alpha0=-20, lambda=4.39 by mpmath findroot on a sin(th0 (y-1) + lam)
FIG3_ZEROS = (0.0183661579, 0.7208476310)


def mp_threshold(alpha0):
    th0, th1 = mp.sqrt(alpha0), mp.sqrt(alpha0 + 1)
    return (th1 * mp.coth(th1) - th0 * mp.coth(th0)) ** mp.mpf(-0.5)


class TestLevels:
    def test_w2_bed(self):
        levels = stagnation_levels(WaveParameters.create(-1.0, 1.0))
        assert [lv.y0 for lv in levels] == [0.0]

    def test_fig3_two_levels(self, fig3_left):
        levels = stagnation_levels(fig3_left)
        assert len(levels) == 2
        for lv, ref in zip(levels, FIG3_ZEROS):
            assert lv.y0 == pytest.approx(ref, abs=1e-9)
            assert lv.lam == 4.39
        assert [lv.multiplicity_index for lv in levels] == [0, 1]
        # two zeros: the single-zero certificate does not apply
        assert not any(lv.feasible for lv in levels)

    def test_fig3_against_bisection(self, fig3_left):
        f = lambda y: mp.sin(mp.sqrt(20) * (y - 1) + mp.mpf("4.39"))  # noqa: E731
        for lv, (lo, hi) in zip(stagnation_levels(fig3_left), [(0.0, 0.3), (0.5, 0.9)]):
            ref = mp.findroot(f, (lo, hi), solver="bisect")
            assert lv.y0 == pytest.approx(float(ref), abs=1e-12)

    def test_w4_below_threshold_empty(self):
        p = WaveParameters.create(4.0, 0.1)
        assert stagnation_levels(p) == []
        ys = np.linspace(0, 1, 10001)
        vals = background_current(p, ys)
        assert np.all(vals > 0) or np.all(vals < 0)

    def test_zero_count_examples(self, fig3_left):
        assert zero_count(fig3_left) == 2
        assert zero_count(WaveParameters.create(-1.0, 2.0)) == 0
        big = -(1 + (4 * math.pi) ** 2) - 0.5
        assert zero_count(WaveParameters.create(big, math.pi / 2)) >= 3

    @settings(max_examples=80, deadline=None)
    @given(p=waves(classes=(WaveClassId.W1,)))
    def test_zero_count_lower_bound(self, p):
        assert zero_count(p) >= math.floor(p.theta0 / math.pi) - 1

    def test_closed_form_matches_search(self, rng):
        for cls in WaveClassId:
            for _ in range(500 if cls != WaveClassId.W2 else 100):
                p = draw_params(rng, cls)
                closed = [lv.y0 for lv in stagnation_levels(p)]
                found = search_zeros(p)
                assert len(closed) == len(found), (p, closed, found)
                for a, b in zip(closed, found):
                    assert abs(a - b) < 1e-10

    @settings(max_examples=150, deadline=None)
    @given(p=waves())
    def test_round_trip(self, p):
        for lv in stagnation_levels(p):
            assert 0.0 <= lv.y0 <= 1.0
            assert abs(float(background_current(p, lv.y0))) < ZERO_TOL


class TestClass4:
    def test_threshold_value(self):
        assert class4_lambda_threshold(4.0) == pytest.approx(float(mp_threshold(mp.mpf(4))), rel=1e-13)

    def test_threshold_by_bisection(self):
        # smallest lambda with a zero of U0 in [0, 1], found without the closed form
        def has_zero(lam):
            vals = background_current(WaveParameters.create(4.0, lam), np.linspace(0, 1, 4001))
            return vals.min() <= 0.0 <= vals.max()

        lo, hi = 0.1, 5.0
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            lo, hi = (lo, mid) if has_zero(mid) else (mid, hi)
        assert hi == pytest.approx(class4_lambda_threshold(4.0), abs=1e-6)

    @pytest.mark.parametrize("alpha0", [0.3, 1.0, 4.0, 25.0, 100.0])
    def test_threshold_gives_bed(self, alpha0):
        lam = class4_lambda_threshold(alpha0)
        levels = stagnation_levels(WaveParameters.create(alpha0, lam))
        assert len(levels) == 1 and abs(levels[0].y0) < 1e-10

    @pytest.mark.parametrize("bad", [-1.0, 0.0])
    def test_threshold_rejects(self, bad):
        with pytest.raises(ValidationError):
            class4_lambda_threshold(bad)

    @pytest.mark.parametrize("alpha0", [0.5, 4.0, 30.0])
    def test_monotone_and_bounded(self, alpha0):
        lmin = class4_lambda_threshold(alpha0)
        bound = class4_y0_bound(alpha0)
        lams = np.sqrt(np.linspace(lmin**2, 400 * lmin**2, 100))
        ys = [stagnation_levels(WaveParameters.create(alpha0, lam))[0].y0 for lam in lams]
        assert all(b >= a for a, b in zip(ys, ys[1:]))
        assert all(y < bound for y in ys)
        # negative lambda gives the same level
        assert stagnation_levels(WaveParameters.create(alpha0, -lams[5]))[0].y0 == ys[5]


class TestRegion:
    def test_w2_band(self):
        (band,) = feasible_region_sample([-1.0])
        assert band.y0_min == 0.0
        assert band.y0_max == pytest.approx(1 - math.pi / 4, abs=1e-10)

    def test_bed_and_growth(self):
        alphas = [-5.0, -1.0, 1.0, 10.0, 100.0]
        bands = feasible_region_sample(alphas)
        for a in alphas:
            assert bed_stagnation_feasible(bands, a)
        tops = [max_level(bands, a) for a in alphas]
        assert all(b > a for a, b in zip(tops, tops[1:]))
        assert tops[-1] < 1.0
        assert max_level(bands, 100.0) == pytest.approx(class4_y0_bound(100.0), abs=1e-9)

    def test_no_bed_below_minus_pi_squared(self):
        bands = feasible_region_sample([-10.0])
        assert not bed_stagnation_feasible(bands, -10.0)
        assert min(b.y0_min for b in bands) > 0.0

    def test_multi_zero_flag(self):
        bands = feasible_region_sample([MULTI_ZERO_ALPHA0 - 1.0, MULTI_ZERO_ALPHA0 + 1.0])
        flags = {b.alpha0: b.multi_zero for b in bands}
        assert flags[MULTI_ZERO_ALPHA0 - 1.0] and not flags[MULTI_ZERO_ALPHA0 + 1.0]

    def test_certificates(self):
        for band in feasible_region_sample([-5.0, -0.5, 2.0]):
            assert band.certificates
            for y0, lam in band.certificates:
                assert band.y0_min - 1e-12 <= y0 <= band.y0_max + 1e-12
                p = WaveParameters.create(band.alpha0, lam)
                assert abs(float(background_current(p, y0))) < ZERO_TOL

    def test_resolution_checked(self):
        with pytest.raises(ValidationError):
            feasible_region_sample([-1.0], 1)
