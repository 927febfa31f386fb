import math

import numpy as np
import pytest

from qsl_rtn import (
    BlochVector,
    Direction,
    RtnParams,
    monotone_segments,
    n_coh,
    n_coh_closed_equilibrium,
)
from qsl_rtn.errors import DomainError

R0 = BlochVector(0.5, 0.5, 0.5)


class TestMonotoneSegments:
    def test_weak_coupling_single_falling(self):
        segs = monotone_segments(RtnParams.from_g(0.4), 10.0)
        assert len(segs.segments) == 1
        only = segs.segments[0]
        assert (only.t_start, only.t_end) == (0.0, 10.0)
        assert only.direction is Direction.FALLING

    def test_g_sqrt2_three_segments(self):
        segs = monotone_segments(RtnParams.from_g(math.sqrt(2.0)), 7.0)
        dirs = [s.direction for s in segs.segments]
        assert dirs == [Direction.FALLING, Direction.RISING, Direction.FALLING]
        bounds = [s.t_start for s in segs.segments] + [segs.segments[-1].t_end]
        assert bounds == pytest.approx([0.0, 3 * math.pi / 2, 2 * math.pi, 7.0], abs=1e-9)

    def test_biased_strong_coupling_single_falling(self):
        segs = monotone_segments(RtnParams.from_g(4.0, delta_p0=1.0), 12.0)
        assert len(segs.segments) == 1
        assert segs.segments[0].direction is Direction.FALLING

    def test_segments_abut_and_alternate(self):
        segs = monotone_segments(RtnParams.from_g(4.0), 9.0)
        for a, b in zip(segs.segments, segs.segments[1:]):
            assert a.t_end == b.t_start
            assert a.direction is not b.direction

    def test_uncoupled_single_segment(self):
        segs = monotone_segments(RtnParams(gamma=1.0, lam=0.0), 5.0)
        assert len(segs.segments) == 1
        assert segs.segments[0].direction is Direction.FALLING


class TestBackflow:
    def test_zero_below_threshold(self):
        res = n_coh(RtnParams.from_g(0.5), R0, 40.0)
        assert res.n_coh == 0.0
        assert len(res.rising_intervals.segments) == 0

    def test_geometric_series_value(self):
        res = n_coh(RtnParams.from_g(math.sqrt(2.0)), R0, 60.0)
        expect = math.sqrt(0.5) * math.exp(-math.pi) / (1.0 - math.exp(-math.pi))
        assert res.n_coh == pytest.approx(expect, abs=1e-6)
        assert res.n_coh == pytest.approx(0.0319369, abs=1e-6)

    def test_biased_noise_has_no_backflow(self):
        for g in np.geomspace(0.1, 10.0, 17):
            for dp0 in (1.0, -1.0):
                res = n_coh(RtnParams.from_g(float(g), delta_p0=dp0), R0, 40.0)
                assert res.n_coh <= 1e-9

    @pytest.mark.parametrize("g", [1.1, math.sqrt(2.0), 2.0, 4.0, 8.0])
    def test_matches_closed_equilibrium(self, g):
        horizon = 60.0
        res = n_coh(RtnParams.from_g(g), R0, horizon)
        expect = n_coh_closed_equilibrium(g, R0.r_perp)
        tol = max(1e-6, math.exp(-horizon / 2.0))
        assert abs(res.n_coh - expect) <= tol

    def test_linear_in_initial_coherence(self):
        p = RtnParams.from_g(2.0)
        small = n_coh(p, BlochVector(0.2, 0.1, 0.3), 30.0).n_coh
        big = n_coh(p, BlochVector(0.4, 0.2, 0.3), 30.0).n_coh
        assert big == pytest.approx(2.0 * small, abs=1e-12)

    def test_monotone_in_horizon(self):
        p = RtnParams.from_g(3.0)
        values = [n_coh(p, R0, T).n_coh for T in (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_truncation_bound_reported(self):
        res = n_coh(RtnParams.from_g(2.0), R0, 10.0)
        assert res.truncation_bound == pytest.approx(
            R0.r_perp * math.exp(-5.0), rel=1e-12
        )
        assert res.horizon == 10.0

    def test_zero_iff_no_rising_segments(self, rng):
        from conftest import random_params

        for _ in range(40):
            p = random_params(rng)
            res = n_coh(p, R0, 25.0 / p.gamma)
            assert (res.n_coh == 0.0) == (len(res.rising_intervals.segments) == 0)
            assert res.n_coh >= 0.0


class TestClosedEquilibrium:
    def test_domain_error(self):
        with pytest.raises(DomainError):
            n_coh_closed_equilibrium(1.0, 1.0)
        with pytest.raises(DomainError):
            n_coh_closed_equilibrium(0.5, 1.0)

    def test_continuity_toward_critical(self):
        assert n_coh_closed_equilibrium(1.0001, 1.0) < 1e-90

    def test_values(self):
        assert n_coh_closed_equilibrium(math.sqrt(2.0), math.sqrt(0.5)) == pytest.approx(
            0.0319369, abs=1e-6
        )
        beta = math.sqrt(15.0)
        expect = math.exp(-math.pi / beta) / (1.0 - math.exp(-math.pi / beta))
        assert n_coh_closed_equilibrium(4.0, 1.0) == pytest.approx(expect, rel=1e-14)
        assert n_coh_closed_equilibrium(4.0, 1.0) == pytest.approx(0.79967, abs=1e-4)
