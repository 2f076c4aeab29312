"""Codebook construction, beam metric and nearest-beam mapping."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from expobeam.antenna import ArrayConfig, beam_gain_db
from expobeam.codebook import (BeamId, Codebook, CodebookError, SectorSpan,
                               beam_distance, build_codebook)
from expobeam.geometry import Direction

CFG = ArrayConfig()
SECTOR = SectorSpan(-60.0, 60.0, -35.0, 25.0)

beam_ids = st.builds(BeamId, st.integers(0, 63), st.integers(0, 63))


class TestBeamDistance:
    def test_identity(self):
        assert beam_distance(BeamId(3, 3), BeamId(3, 3)) == 0.0

    def test_three_four_five(self):
        assert beam_distance(BeamId(1, 1), BeamId(4, 5)) == 5.0

    def test_single_row(self):
        assert beam_distance(BeamId(2, 0), BeamId(5, 0)) == 3.0

    @given(beam_ids, beam_ids)
    def test_symmetry_and_positivity(self, a, b):
        assert beam_distance(a, b) == beam_distance(b, a)
        assert beam_distance(a, b) >= 0.0
        assert (beam_distance(a, b) == 0.0) == (a == b)

    @given(beam_ids, beam_ids, beam_ids)
    def test_triangle_inequality(self, a, b, c):
        assert beam_distance(a, c) <= beam_distance(a, b) + beam_distance(b, c) + 1e-12

    def test_bound_checked_variant(self):
        cb = Codebook.uniform_grid(4, 4)
        with pytest.raises(CodebookError):
            cb.beam_distance(BeamId(0, 0), BeamId(9, 0))


class TestBuildCodebook:
    def test_3db_spacing_and_count(self):
        cb = build_codebook(CFG, SECTOR, 3.0)
        assert cb.spacing_az_deg == pytest.approx(3.17, abs=0.1)
        assert cb.az_count == 38  # 120 degree sector at ~3.17 degrees

    def test_finer_crossover_gives_denser_grid(self):
        coarse = build_codebook(CFG, SECTOR, 3.0)
        fine = build_codebook(CFG, SECTOR, 0.5)
        assert fine.spacing_az_deg < coarse.spacing_az_deg
        assert len(fine) > len(coarse)

    def test_crossover_level_at_adjacent_pair(self):
        # Adjacent beams near boresight drop to the crossover level at
        # their shared midpoint.
        for level in (3.0, 0.5):
            cb = build_codebook(CFG, SECTOR, level)
            m0 = cb.nearest_beam(Direction(0.0, 0.0)).beam
            for other in (BeamId(m0.m + 1, m0.n), BeamId(m0.m, m0.n + 1)):
                s0, s1 = cb.steering(m0), cb.steering(other)
                mid = Direction(0.5 * (s0.azimuth_deg + s1.azimuth_deg),
                                0.5 * (s0.downtilt_deg + s1.downtilt_deg))
                peak = beam_gain_db(CFG, s0, s0)
                drop = peak - beam_gain_db(CFG, s0, mid)
                assert drop == pytest.approx(level, abs=0.05)

    def test_steering_inside_sector(self):
        for level in (3.0, 0.5):
            cb = build_codebook(CFG, SECTOR, level)
            for beam in cb.beams():
                d = cb.steering(beam)
                assert SECTOR.az_min_deg - 1e-9 <= d.azimuth_deg <= SECTOR.az_max_deg + 1e-9
                assert SECTOR.tilt_min_deg - 1e-9 <= d.downtilt_deg <= SECTOR.tilt_max_deg + 1e-9

    def test_single_element_spacing_is_element_hpbw(self):
        cfg = ArrayConfig(n_h=1, n_v=1)
        cb = build_codebook(cfg, SECTOR, 3.0)
        assert cb.spacing_az_deg == pytest.approx(65.0, abs=0.1)

    def test_narrow_sector_yields_single_beam(self):
        cb = build_codebook(CFG, SectorSpan(-0.5, 0.5, -0.5, 0.5), 3.0)
        assert (cb.az_count, cb.tilt_count) == (1, 1)
        d = cb.steering(BeamId(0, 0))
        assert d.azimuth_deg == pytest.approx(0.0)

    def test_symmetric_sector_has_on_axis_beam(self):
        cb = build_codebook(CFG, SECTOR, 0.5)
        best = min(abs(cb.steering(b).azimuth_deg) for b in cb.beams())
        assert best == pytest.approx(0.0, abs=1e-9)

    def test_crossover_bounds(self):
        with pytest.raises(CodebookError):
            build_codebook(CFG, SECTOR, 0.0)
        with pytest.raises(CodebookError):
            build_codebook(CFG, SECTOR, 6.5)

    def test_azimuth_only_mode(self):
        cb = build_codebook(CFG, SECTOR, 0.5, axes="azimuth")
        fine = build_codebook(CFG, SECTOR, 0.5, axes="both")
        assert cb.spacing_az_deg == fine.spacing_az_deg
        assert cb.spacing_tilt_deg > fine.spacing_tilt_deg
        with pytest.raises(CodebookError):
            build_codebook(CFG, SECTOR, 0.5, axes="tilt")

    def test_empty_sector_rejected(self):
        with pytest.raises(CodebookError):
            SectorSpan(10.0, -10.0, 0.0, 1.0)


class TestNearestBeam:
    def test_exact_steering_maps_to_itself(self):
        cb = build_codebook(CFG, SECTOR, 3.0)
        for beam in list(cb.beams())[:40]:
            got = cb.nearest_beam(cb.steering(beam))
            assert got.beam == beam
            assert not got.clamped

    def test_midpoint_ties_to_lower_index(self):
        cb = Codebook.uniform_grid(8, 1, spacing_deg=2.0)
        s2, s3 = cb.steering(BeamId(2, 0)), cb.steering(BeamId(3, 0))
        mid = Direction(0.5 * (s2.azimuth_deg + s3.azimuth_deg), s2.downtilt_deg)
        assert cb.nearest_beam(mid).beam == BeamId(2, 0)

    def test_out_of_sector_clamps(self):
        cb = build_codebook(CFG, SECTOR, 3.0)
        got = cb.nearest_beam(Direction(90.0, 0.0))
        assert got.clamped
        assert got.beam.m == cb.az_count - 1

    def test_weights_require_array(self):
        cb = Codebook.uniform_grid(4, 4)
        with pytest.raises(CodebookError, match="array"):
            cb.weights(BeamId(0, 0))

    def test_validate_and_contains(self):
        cb = Codebook.uniform_grid(4, 4)
        assert BeamId(3, 3) in cb
        assert BeamId(4, 0) not in cb
        with pytest.raises(CodebookError):
            cb.steering(BeamId(4, 0))

    @given(st.floats(-59.0, 59.0), st.floats(-34.0, 24.0))
    @settings(max_examples=50, deadline=None)
    def test_nearest_is_actually_nearest(self, az, tilt):
        cb = build_codebook(CFG, SECTOR, 3.0)
        got = cb.nearest_beam(Direction(az, tilt)).beam
        s = cb.steering(got)

        def axis_err(beam):
            d = cb.steering(beam)
            return max(abs(d.azimuth_deg - az) - abs(s.azimuth_deg - az),
                       abs(d.downtilt_deg - tilt) - abs(s.downtilt_deg - tilt))

        # No other beam is strictly closer on both axes.
        for other in cb.beams():
            assert axis_err(other) >= -1e-9
