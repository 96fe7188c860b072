import numpy as np
import pytest

from irscov.pathloss import PathlossModel, reference_gain, sample_link_state

MODEL = PathlossModel(carrier_hz=2e9)


def test_reference_gain_at_2ghz():
    b0 = reference_gain(2e9)
    assert b0 == pytest.approx((4 * np.pi * 2e9 / 299792458.0) ** -2, rel=1e-15)
    assert b0 == pytest.approx(1.423e-4, rel=1e-3)
    assert 10 * np.log10(b0) == pytest.approx(-38.47, abs=0.01)


class TestLosProbability:
    def test_aerial_above_100m_always_los(self):
        for d in (10.0, 500.0, 5000.0):
            assert MODEL.los_probability(d, 120.0) == 1.0

    def test_aerial_mid_height_formula(self):
        h, d = 60.0, 800.0
        p1 = 4300.0 * np.log10(h) - 3800.0
        d1 = max(460.0 * np.log10(h) - 700.0, 18.0)
        want = d1 / d + np.exp(-d / p1) * (1.0 - d1 / d)
        assert MODEL.los_probability(d, h) == pytest.approx(want, rel=1e-12)

    def test_ground_close_in_is_los(self):
        assert MODEL.los_probability(10.0, 1.5) == 1.0

    def test_ground_decreases_with_distance(self):
        ds = [20.0, 50.0, 100.0, 300.0, 1000.0]
        ps = [MODEL.los_probability(d, 1.5) for d in ds]
        assert all(a >= b for a, b in zip(ps, ps[1:]))
        assert ps[-1] < 0.1

    def test_probability_bounded(self):
        for d in np.linspace(1.0, 3000.0, 40):
            for h in (1.5, 20.0, 60.0, 120.0):
                assert 0.0 <= MODEL.los_probability(float(d), h) <= 1.0


class TestPathloss:
    def test_ground_los_pre_breakpoint_value(self):
        # 28 + 22 log10(d3d) + 20 log10(2), d3d = hypot(100, 23.5)
        d3d = np.hypot(100.0, 25.0 - 1.5)
        want = 28.0 + 22.0 * np.log10(d3d) + 20.0 * np.log10(2.0)
        assert MODEL.pathloss_db(100.0, 1.5, los=True) == pytest.approx(want, rel=1e-12)

    def test_ground_los_continuous_at_breakpoint(self):
        d_bp = 4.0 * 24.0 * 0.5 * 2e9 / 299792458.0
        below = MODEL.pathloss_db(d_bp * (1 - 1e-9), 1.5, los=True)
        above = MODEL.pathloss_db(d_bp * (1 + 1e-9), 1.5, los=True)
        assert below == pytest.approx(above, abs=1e-6)

    def test_nlos_never_below_los(self):
        for d in (30.0, 100.0, 400.0, 1500.0):
            assert MODEL.pathloss_db(d, 1.5, False) >= MODEL.pathloss_db(d, 1.5, True)

    def test_monotone_in_distance_each_state(self):
        for h in (1.5, 120.0):
            for los in (True, False):
                pl = [MODEL.pathloss_db(d, h, los) for d in np.linspace(20, 3000, 60)]
                assert all(a <= b + 1e-12 for a, b in zip(pl, pl[1:]))

    def test_aerial_los_formula(self):
        d3d = np.hypot(300.0, 120.0 - 25.0)
        want = 28.0 + 22.0 * np.log10(d3d) + 20.0 * np.log10(2.0)
        assert MODEL.pathloss_db(300.0, 120.0, los=True) == pytest.approx(want, rel=1e-12)

    def test_aerial_nlos_formula(self):
        h, d2d = 60.0, 500.0
        d3d = np.hypot(d2d, 25.0 - h)
        want = -17.5 + (46.0 - 7.0 * np.log10(h)) * np.log10(d3d) \
            + 20.0 * np.log10(40.0 * np.pi * 2.0 / 3.0)
        assert MODEL.pathloss_db(d2d, h, los=False) == pytest.approx(want, rel=1e-12)

    def test_height_validity_enforced(self):
        with pytest.raises(ValueError):
            MODEL.pathloss_db(100.0, 0.5, True)
        with pytest.raises(ValueError):
            MODEL.los_probability(100.0, 301.0)


class TestSampleLinkState:
    def test_deterministic_under_seed(self):
        a = [sample_link_state(np.random.default_rng(7), 200.0, 1.5, MODEL)
             for _ in range(3)]
        assert all(s == a[0] for s in a)

    def test_gain_is_reciprocal_pathloss(self):
        s = sample_link_state(np.random.default_rng(1), 150.0, 1.5, MODEL)
        assert s.gain == pytest.approx(10 ** (-s.pathloss_db / 10.0), rel=1e-15)

    def test_aerial_high_always_los(self):
        rng = np.random.default_rng(3)
        states = [sample_link_state(rng, 800.0, 120.0, MODEL) for _ in range(50)]
        assert all(s.los for s in states)

    def test_ground_far_mixes_states(self):
        rng = np.random.default_rng(5)
        states = [sample_link_state(rng, 400.0, 1.5, MODEL) for _ in range(200)]
        n_los = sum(s.los for s in states)
        assert 0 < n_los < 200
