import io
import math

import pytest

from icqam.constellation import (
    PartitionedConstellation,
    SignalPoint,
    build_psk,
    build_qam,
    dmin_formula,
    dump_csv,
    level_path,
    psk_min_distance_sq,
    ungerboeck_split,
)

REL = 1e-9


def rel_close(a, b, tol=REL):
    return abs(a - b) <= tol * max(abs(a), abs(b))


class TestBuildQam:
    def test_16qam_base_distance(self):
        c = build_qam(4)
        assert rel_close(c.delta_sq[0], 1.6)

    def test_8qam_delta_ladder(self):
        c = build_qam(3)
        assert rel_close(c.delta_sq[0], 2.4)
        assert rel_close(c.delta_sq[1], 4.8)
        assert rel_close(c.delta_sq[2], 9.6)

    def test_32qam_base_distance(self):
        c = build_qam(5)
        assert abs(c.delta_sq[0] - 0.952) < 5e-4

    def test_point_count_and_indexing(self):
        for bits in (2, 3, 4, 5):
            c = build_qam(bits)
            assert c.size == 1 << bits
            assert [p.index for p in c.points] == list(range(c.size))

    def test_bits_range_guard(self):
        with pytest.raises(ValueError):
            build_qam(1)
        with pytest.raises(ValueError):
            build_qam(13)

    def test_odd_bits_keep_most_negative_corner(self):
        c = build_qam(3)
        corner = min(c.points, key=lambda p: (p.I, p.Q))
        full_corner = -3 * math.sqrt(1.5 * 3 / 15)
        assert rel_close(corner.I, full_corner)
        assert rel_close(corner.Q, full_corner)

    @pytest.mark.parametrize("bits", range(2, 11))
    def test_partition_invariants(self, bits):
        c = build_qam(bits)
        assert rel_close(c.mean_energy(), float(bits))
        assert len(c.levels) == bits
        all_points = set(range(c.size))
        for k, level in enumerate(c.levels):
            assert len(level) == 1 << k
            assert all(len(s) == 1 << (bits - k) for s in level)
            covered = [i for s in level for i in s]
            assert len(covered) == c.size and set(covered) == all_points
            if k:
                assert rel_close(c.delta_sq[k], 2.0 * c.delta_sq[k - 1])
        leaves = c.levels[bits - 1]
        assert len(leaves) == 1 << (bits - 1)
        assert all(len(s) == 2 for s in leaves)

    @pytest.mark.parametrize("bits", range(2, 13))
    def test_base_distance_matches_formula(self, bits):
        c = build_qam(bits)
        assert rel_close(c.delta_sq[0], dmin_formula(bits) ** 2)


class TestUngerboeckSplit:
    def test_4qam_split_into_antipodal_pairs(self):
        c = build_qam(2)
        a, b = ungerboeck_split(c.points)
        assert len(a) == len(b) == 2
        for half in (a, b):
            (p, q) = half
            # Antipodal: squared distance doubles from 4d^2 to 8d^2.
            d2 = (p.I - q.I) ** 2 + (p.Q - q.Q) ** 2
            assert rel_close(d2, 2.0 * c.delta_sq[0])
            assert rel_close(p.I, -q.I) and rel_close(p.Q, -q.Q)
        assert a[0].index == 0  # lowest-indexed point lands in the first half

    def test_16qam_energy3_cosets_share_mean_energy(self):
        # The odd-bits parent grid: 16 points at mean energy 3.
        half = math.sqrt(1.5 * 3 / 15)
        points = []
        idx = 0
        for qi in range(4):
            for ii in range(4):
                points.append(
                    SignalPoint(idx, (2 * ii - 3) * half, (2 * qi - 3) * half)
                )
                idx += 1
        a, b = ungerboeck_split(points)
        ea = sum(p.energy() for p in a) / len(a)
        eb = sum(p.energy() for p in b) / len(b)
        assert rel_close(ea, 3.0) and rel_close(eb, 3.0)

    def test_64qam_energy5_split_reaches_table_distance(self):
        half = math.sqrt(1.5 * 5 / 63)
        points = []
        idx = 0
        for qi in range(8):
            for ii in range(8):
                points.append(
                    SignalPoint(idx, (2 * ii - 7) * half, (2 * qi - 7) * half)
                )
                idx += 1
        a, _ = ungerboeck_split(points)
        assert len(a) == 32
        coords = [complex(p.I, p.Q) for p in a]
        d2 = min(
            abs(x - y) ** 2 for i, x in enumerate(coords) for y in coords[i + 1 :]
        )
        assert abs(d2 - 0.952) < 5e-4

    def test_rejects_non_lattice_input(self):
        # Equilateral triangle: odd cycle at min distance, not bipartite.
        pts = [
            SignalPoint(0, 0.0, 0.0),
            SignalPoint(1, 1.0, 0.0),
            SignalPoint(2, 0.5, math.sqrt(3) / 2),
        ]
        with pytest.raises(ValueError):
            ungerboeck_split(pts)

    def test_rejects_disconnected_input(self):
        pts = [
            SignalPoint(0, 0.0, 0.0),
            SignalPoint(1, 1.0, 0.0),
            SignalPoint(2, 10.0, 0.0),
            SignalPoint(3, 11.0, 0.0),
        ]
        with pytest.raises(ValueError, match="disconnected"):
            ungerboeck_split(pts)


class TestDminFormula:
    def test_table_values(self):
        assert abs(dmin_formula(4) ** 2 - 1.6) < 5e-4
        assert abs(dmin_formula(3) ** 2 - 2.4) < 5e-4
        assert abs(dmin_formula(5) ** 2 - 0.952) < 5e-4

    def test_strictly_decreasing(self):
        values = [dmin_formula(bits) for bits in range(2, 17)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_minimum_bits(self):
        with pytest.raises(ValueError):
            dmin_formula(1)


class TestBuildPsk:
    def test_16psk_min_distance(self):
        c = build_psk(4)
        assert abs(c.min_distance_sq() - 0.609) < 5e-3
        assert rel_close(c.min_distance_sq(), psk_min_distance_sq(4))

    def test_qpsk(self):
        c = build_psk(2)
        assert rel_close(c.min_distance_sq(), 4.0)

    def test_8psk_closed_form(self):
        c = build_psk(3)
        expected = 4 * 3 * math.sin(math.pi / 8) ** 2
        assert rel_close(c.min_distance_sq(), expected)
        assert abs(expected - 1.757) < 5e-4

    @pytest.mark.parametrize("bits", range(2, 9))
    def test_energy_on_circle(self, bits):
        c = build_psk(bits)
        assert c.size == 1 << bits
        for p in c.points:
            assert rel_close(p.energy(), float(bits))


class TestDump:
    def test_csv_shape_and_paths(self):
        c = build_qam(3)
        buf = io.StringIO()
        dump_csv(c, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "index,I,Q,level-path"
        assert len(lines) == 1 + c.size
        paths = {line.split(",")[3] for line in lines[1:]}
        # Pairs at the leaf level share their 2-bit path; 4 distinct paths.
        assert len(paths) == 4
        for p in c.points:
            assert len(level_path(c, p.index)) == c.bits - 1
