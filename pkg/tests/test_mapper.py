import io
import json
import math

import pytest

from icqam.constellation import build_qam
from icqam.errors import ValidationError
from icqam.gf2 import BitMatrix
from icqam.index_coding import IndexCode, IndexCodingProblem
from icqam.mapper import (
    build_mapping,
    codeword_bits,
    consistent_codewords,
    initial_pool,
    mapping_hash,
    resolve_threshold,
    verify_mapping,
    write_mapping_csv,
    write_mapping_json,
)
from icqam.receiver_analysis import receiver_dmin_sq
from conftest import (
    five_user_matrix_l3,
    five_user_matrix_l4,
    five_user_problem,
    seven_user_problem,
)

REL = 1e-9


def dmin_vector(mapping, code):
    return tuple(receiver_dmin_sq(mapping, code, i) for i in range(code.problem.m))


class TestConsistentCodewords:
    def test_seven_user_first_receiver_pairs(self, seven_user_code):
        # Only x1 is unknown to the first receiver: one free bit.
        for a in range(1 << 6):
            cset = consistent_codewords(seven_user_code, 0, a)
            assert len(cset) == 2
            lo, hi = sorted(cset)
            assert lo ^ hi == 0b0001

    def test_no_side_information_sees_whole_code(self, seven_user_code):
        assert consistent_codewords(seven_user_code, 6, 0) == frozenset(range(16))

    def test_five_user_l4_second_receiver(self, five_user_code_l4):
        cset = consistent_codewords(five_user_code_l4, 1, 0)
        assert cset == {0b0000, 0b0001, 0b0100, 0b0101}

    def test_cosets_partition_code(self, five_user_code_l3):
        for i in range(5):
            seen = {}
            pool = initial_pool(five_user_code_l3, i)
            assert pool.receiver == i
            for a in pool.remaining:
                cset = consistent_codewords(five_user_code_l3, i, a)
                key = min(cset)
                assert seen.setdefault(key, cset) == cset
            union = set().union(*seen.values())
            assert union == set(range(8))

    def test_realization_out_of_range(self, seven_user_code):
        with pytest.raises(ValidationError):
            consistent_codewords(seven_user_code, 0, 1 << 6)


class TestBuildMapping:
    def test_seven_user_table(self, seven_user_code):
        mapping = build_mapping(seven_user_code, build_qam(4))
        expected = (12.8, 6.4, 6.4, 1.6, 1.6, 1.6, 1.6)
        got = dmin_vector(mapping, seven_user_code)
        assert all(abs(a - b) <= 1e-6 for a, b in zip(got, expected)), got

    def test_five_user_8qam_table(self, five_user_code_l3):
        mapping = build_mapping(five_user_code_l3, build_qam(3))
        expected = (9.6, 4.8, 2.4, 2.4, 2.4)
        got = dmin_vector(mapping, five_user_code_l3)
        assert all(abs(a - b) <= 5e-3 for a, b in zip(got, expected)), got

    def test_five_user_16qam_table(self, five_user_code_l4):
        mapping = build_mapping(five_user_code_l4, build_qam(4))
        expected = (12.8, 6.4, 1.6, 1.6, 1.6)
        got = dmin_vector(mapping, five_user_code_l4)
        assert all(abs(a - b) <= 5e-3 for a, b in zip(got, expected)), got

    def test_five_user_32qam_table(self, five_user_code_identity):
        mapping = build_mapping(five_user_code_identity, build_qam(5))
        expected = (15.24, 3.81, 0.952, 0.952, 0.952)
        got = dmin_vector(mapping, five_user_code_identity)
        assert all(abs(a - b) <= 5e-3 for a, b in zip(got, expected)), got

    def test_bijection(self, seven_user_code):
        for seed in (None, 3):
            mapping = build_mapping(seven_user_code, build_qam(4), seed=seed)
            assert sorted(mapping.assignment) == list(range(16))

    def test_deterministic_per_seed(self, five_user_code_l3):
        con = build_qam(3)
        a = build_mapping(five_user_code_l3, con, seed=5)
        b = build_mapping(five_user_code_l3, con, seed=5)
        assert a.assignment == b.assignment
        c = build_mapping(five_user_code_l3, con, seed=6)
        assert c.assignment != a.assignment

    def test_seed_preserves_distances(self, seven_user_code):
        con = build_qam(4)
        base = dmin_vector(build_mapping(seven_user_code, con), seven_user_code)
        for seed in range(8):
            mapping = build_mapping(seven_user_code, con, seed=seed)
            got = dmin_vector(mapping, seven_user_code)
            assert all(abs(a - b) <= REL * a for a, b in zip(base, got))

    def test_arbitrary_branch_when_nobody_prioritized(self):
        problem = IndexCodingProblem.of(2, [([0], []), ([1], [])])
        code = IndexCode(problem, BitMatrix.identity(2))
        con = build_qam(2)
        mapping = build_mapping(code, con)
        assert mapping.assignment == (0, 1, 2, 3)  # identity, codeword order
        got = dmin_vector(mapping, code)
        assert all(abs(d - con.delta_sq[0]) <= REL * d for d in got)

    def test_rank_deficient_rejected(self):
        problem = IndexCodingProblem.of(2, [([0], [1])])
        code = IndexCode(problem, BitMatrix.from_rows([[1, 1], [0, 0]]))
        with pytest.raises(ValidationError, match="rank"):
            build_mapping(code, build_qam(2))

    def test_size_mismatch_rejected(self, seven_user_code):
        with pytest.raises(ValidationError, match="size"):
            build_mapping(seven_user_code, build_qam(3))

    def test_threshold_length_marks_thm1_receivers(self, five_user_code_l4):
        mapping = build_mapping(five_user_code_l4, build_qam(4), threshold="length")
        report = verify_mapping(mapping, five_user_code_l4)
        # eta = (1,2,3,4,4): exactly eta < l receivers get priority.
        assert [c.prioritized for c in report.checks] == [True, True, True, False, False]
        assert report.all_ok

    def test_threshold_minrank_default(self, five_user_code_l4):
        mapping = build_mapping(five_user_code_l4, build_qam(4))
        assert mapping.threshold == 3
        report = verify_mapping(mapping, five_user_code_l4)
        assert [c.prioritized for c in report.checks] == [True, True, False, False, False]

    def test_explicit_threshold_and_validation(self, five_user_code_l4):
        assert resolve_threshold(five_user_code_l4, 2) == 2
        with pytest.raises(ValidationError):
            resolve_threshold(five_user_code_l4, "optimal")

    def test_custom_order_must_be_eta_sorted(self, seven_user_code):
        con = build_qam(4)
        ok = build_mapping(seven_user_code, con, order=(0, 2, 1, 3, 4, 5, 6))
        assert ok.receiver_order == (0, 2, 1, 3, 4, 5, 6)
        with pytest.raises(ValidationError, match="non-decreasing"):
            build_mapping(seven_user_code, con, order=(1, 0, 2, 3, 4, 5, 6))
        with pytest.raises(ValidationError, match="permutation"):
            build_mapping(seven_user_code, con, order=(0, 0, 1, 2, 3, 4, 5))

    def test_equal_eta_same_known_transmissions_match(self, seven_user_code):
        # Receivers 2 and 3 share eta and S; their worst-case distances agree.
        mapping = build_mapping(seven_user_code, build_qam(4))
        d = dmin_vector(mapping, seven_user_code)
        assert abs(d[1] - d[2]) <= REL * d[1]

    @pytest.mark.parametrize("seed", [None, 0, 4, 7])
    def test_top_receiver_cosets_confined_to_one_subset(
        self, five_user_code_identity, seed
    ):
        # Every realization of the top-priority receiver must land inside a
        # single subset at its partition level (the exact-gain guarantee).
        from icqam.index_coding import eta

        code = five_user_code_identity
        con = build_qam(5)
        mapping = build_mapping(code, con, seed=seed)
        top = mapping.receiver_order[0]
        level = code.length - eta(code, top)
        for a in range(1 << len(code.problem.receivers[top].knows)):
            points = {
                mapping.assignment[c] for c in consistent_codewords(code, top, a)
            }
            subsets = {con.subset_of_point(level, p) for p in points}
            assert len(subsets) == 1, (seed, a, subsets)


class TestVerifyMapping:
    def test_seven_user_brackets(self, seven_user_code):
        mapping = build_mapping(seven_user_code, build_qam(4))
        report = verify_mapping(mapping, seven_user_code)
        assert report.all_ok and report.top_exact
        by_receiver = {c.receiver: c for c in report.checks}
        # Receivers with eta=2 carry the [3.2, 6.4] bracket and hit 6.4.
        for i in (1, 2):
            c = by_receiver[i]
            assert abs(c.bracket_lo_sq - 3.2) < 1e-9
            assert abs(c.bracket_hi_sq - 6.4) < 1e-9
            assert abs(c.dmin_sq - 6.4) < 1e-6

    def test_five_user_16qam_third_receiver_at_base(self, five_user_code_l4):
        mapping = build_mapping(five_user_code_l4, build_qam(4))
        report = verify_mapping(mapping, five_user_code_l4)
        c = report.checks[2]
        assert not c.prioritized  # eta = 3 >= threshold 3
        assert abs(c.dmin_sq - 1.6) < 5e-3
        assert c.ok

    def test_arbitrary_mapping_all_pass_at_base(self):
        problem = IndexCodingProblem.of(2, [([0], []), ([1], [])])
        code = IndexCode(problem, BitMatrix.identity(2))
        mapping = build_mapping(code, build_qam(2))
        report = verify_mapping(mapping, code)
        assert report.top_receiver is None
        assert report.all_ok

    def test_top_exactness_enforced_every_seed(self, five_user_code_identity):
        con = build_qam(5)
        for seed in range(8):
            mapping = build_mapping(five_user_code_identity, con, seed=seed)
            report = verify_mapping(mapping, five_user_code_identity)
            assert report.top_receiver == 0
            assert report.top_exact
            assert report.all_ok


class TestMappingFiles:
    def test_codeword_bits_order(self):
        assert codeword_bits(0b0001, 4) == "1000"  # y1 first

    def test_csv_layout(self, five_user_code_l3):
        mapping = build_mapping(five_user_code_l3, build_qam(3))
        buf = io.StringIO()
        write_mapping_csv(mapping, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "codeword_bits,point_index,I,Q"
        assert len(lines) == 9
        assert lines[1].startswith("000,")

    def test_json_replay_fields(self, five_user_code_l3):
        mapping = build_mapping(five_user_code_l3, build_qam(3), seed=4)
        buf = io.StringIO()
        write_mapping_json(mapping, five_user_code_l3, buf, "0.1.0")
        data = json.loads(buf.getvalue())
        assert data["l"] == 3
        assert data["seed"] == 4
        assert data["threshold"] == 3
        assert data["mapping_hash"] == mapping_hash(mapping)
        assert len(data["assignment"]) == 8
        assert set(data["assignment"].values()) == set(range(8))
