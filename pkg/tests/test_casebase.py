"""Parsing, splitting, discretization, retention, and persistence."""

from __future__ import annotations

import io
import random

import pytest

from cdss import store
from cdss.casebase import (
    ATTRIBUTE_NAMES,
    CLASS_LABELS,
    MISSING_BIN,
    AttributeSchema,
    Case,
    CaseBase,
    assign_bin,
    class_counts,
    compute_bin_edges,
    default_schema,
    discretize,
    encode_case,
    load_case_base,
    parse_pima_line,
    retain_case,
    split_train_test,
    validate_new_case,
)
from cdss.errors import (
    ArgumentError,
    DiagnosisDomainError,
    DuplicateIdError,
    EmptyInputError,
    FieldParseError,
    MalformedRecordError,
    ValidationFailure,
)
from conftest import FIGURE_ROWS, make_case, random_base


class TestParsePimaLine:
    def test_first_sample_row(self):
        case = parse_pima_line(FIGURE_ROWS[0], id="r0001")
        assert case.descriptors == (6, 148, 72, 35, 0, 33.6, 0.627, 50)
        assert case.diagnosis == 1
        assert case.actions == ("tested positive for diabetes",)

    def test_second_sample_row(self):
        case = parse_pima_line(FIGURE_ROWS[1], id="r0002")
        assert case.descriptors == (1, 85, 66, 29, 0, 26.6, 0.351, 31)
        assert case.diagnosis == 0
        assert case.actions == ("tested negative for diabetes",)

    def test_eight_fields_is_malformed(self):
        with pytest.raises(MalformedRecordError) as err:
            parse_pima_line("6,148,72,35,0,33.6,0.627,50", id="x", line_no=7)
        assert "line 7" in str(err.value)

    def test_non_numeric_names_attribute(self):
        with pytest.raises(FieldParseError) as err:
            parse_pima_line("6,abc,72,35,0,33.6,0.627,50,1", id="x")
        assert ATTRIBUTE_NAMES[1] in str(err.value)

    @pytest.mark.parametrize("diag", ["2", "-1", "0.5"])
    def test_diagnosis_domain(self, diag):
        with pytest.raises(DiagnosisDomainError):
            parse_pima_line(f"6,148,72,35,0,33.6,0.627,50,{diag}", id="x")

    def test_crlf_terminator(self):
        case = parse_pima_line(FIGURE_ROWS[0] + "\r\n", id="r0001")
        assert case.diagnosis == 1


class TestLoadCaseBase:
    def test_canonical_counts(self, pima_base):
        assert len(pima_base) == 768
        assert class_counts(pima_base) == {0: 500, 1: 268}

    def test_two_line_base(self):
        stream = io.BytesIO("\n".join(FIGURE_ROWS[:2]).encode())
        cb = load_case_base(stream)
        assert len(cb) == 2
        assert class_counts(cb) == {0: 1, 1: 1}
        assert [c.id for c in cb.cases] == ["r0001", "r0002"]

    def test_empty_stream(self):
        with pytest.raises(EmptyInputError):
            load_case_base(io.BytesIO(b""))

    def test_bad_line_aborts_with_line_number(self):
        text = FIGURE_ROWS[0] + "\n" + "1,2,3\n"
        with pytest.raises(MalformedRecordError) as err:
            load_case_base(io.BytesIO(text.encode()))
        assert "line 2" in str(err.value)

    def test_ids_unique(self, pima_base):
        ids = [c.id for c in pima_base.cases]
        assert len(set(ids)) == len(ids)


class TestSplit:
    def test_file_order_cut(self, pima_base):
        train, test = split_train_test(pima_base, 512)
        assert (len(train), len(test)) == (512, 256)
        assert train.cases[0].id == "r0001"
        assert test.cases[0].id == "r0513"

    def test_seeded_split_deterministic(self, pima_base):
        a = split_train_test(pima_base, 512, seed=42)
        b = split_train_test(pima_base, 512, seed=42)
        assert [c.id for c in a[0].cases] == [c.id for c in b[0].cases]
        assert [c.id for c in a[1].cases] == [c.id for c in b[1].cases]

    @pytest.mark.parametrize("seed", [None, 0, 7, 123])
    def test_partition_properties(self, pima_base, seed):
        train, test = split_train_test(pima_base, 512, seed=seed)
        train_ids = {c.id for c in train.cases}
        test_ids = {c.id for c in test.cases}
        assert len(train_ids) == 512
        assert train_ids & test_ids == set()
        assert train_ids | test_ids == {c.id for c in pima_base.cases}

    def test_empty_test_rejected(self):
        cb = CaseBase(schema=default_schema(), cases=(
            make_case("a", [1] * 8, 0), make_case("b", [2] * 8, 1)))
        with pytest.raises(ArgumentError):
            split_train_test(cb, 2)


class TestDiscretize:
    def two_bin_base(self, values, missing=True):
        schema = tuple(
            AttributeSchema(index=i, name=n, kind="continuous",
                            missing_code_is_zero=(i == 2) and missing, bin_count=2)
            for i, n in enumerate(ATTRIBUTE_NAMES, start=1)
        )
        cases = tuple(
            make_case(f"c{i}", [1, v, 1, 1, 1, 1, 1, 1], diagnosis=0)
            for i, v in enumerate(values)
        )
        return CaseBase(schema=schema, cases=cases)

    def test_missing_bin_and_equal_width(self):
        # Non-missing range [50, 100] with 2 bins: edges 50 / 75 / 100.
        cb = discretize(self.two_bin_base([0, 50, 100]))
        bins = [c.discretized[1] for c in cb.cases]
        assert bins == [MISSING_BIN, 1, 2]

    def test_all_identical_single_bin(self):
        cb = discretize(self.two_bin_base([60, 60, 60]))
        assert {c.discretized[1] for c in cb.cases} == {1}

    def test_interior_edge_goes_to_higher_bin(self):
        # Edge at 75 exactly: half-open intervals send it up.
        cb = discretize(self.two_bin_base([0, 50, 75, 100]))
        bins = [c.discretized[1] for c in cb.cases]
        assert bins == [MISSING_BIN, 1, 2, 2]

    def test_each_value_in_exactly_one_bin(self):
        rng = random.Random(11)
        cb = random_base(rng, 60, bin_count=5)
        for case in cb.cases:
            for attr in cb.schema:
                v = case.descriptors[attr.index - 1]
                b = case.discretized[attr.index - 1]
                edges = cb.bin_edges[attr.index - 1]
                if attr.missing_code_is_zero and v == 0.0:
                    assert b == MISSING_BIN
                    continue
                assert 1 <= b <= len(edges) - 1
                assert b == assign_bin(attr, edges, v)

    def test_missing_bin_only_for_zero_coded(self):
        rng = random.Random(12)
        cb = random_base(rng, 80, bin_count=4)
        for case in cb.cases:
            for attr in cb.schema:
                v = case.descriptors[attr.index - 1]
                b = case.discretized[attr.index - 1]
                assert (b == MISSING_BIN) == (attr.missing_code_is_zero and v == 0.0)

    def test_out_of_range_queries_clamp(self):
        cb = discretize(self.two_bin_base([0, 50, 100]))
        attr = cb.schema[1]
        edges = cb.bin_edges[1]
        assert assign_bin(attr, edges, 10) == 1
        assert assign_bin(attr, edges, 1e6) == 2

    def test_empty_base_rejected(self):
        cb = CaseBase(schema=default_schema(), cases=())
        with pytest.raises(EmptyInputError):
            compute_bin_edges(cb)


class TestValidateNewCase:
    def test_sample_row_fields_valid(self):
        case = validate_new_case(default_schema(), (6, 148, 72, 35, 0, 33.6, 0.627, 50),
                                 diagnosis=1)
        assert case.diagnosis == 1
        assert case.descriptors[0] == 6.0

    def test_arity_violation(self):
        with pytest.raises(ValidationFailure):
            validate_new_case(default_schema(), (1, 2, 3, 4, 5, 6, 7))

    def test_negative_age(self):
        with pytest.raises(ValidationFailure) as err:
            validate_new_case(default_schema(), (6, 148, 72, 35, 0, 33.6, 0.627, -1))
        assert any("Age" in v for v in err.value.details)

    def test_reports_all_violations(self):
        with pytest.raises(ValidationFailure) as err:
            validate_new_case(default_schema(),
                              (-6, 148, float("nan"), 35, 0, 33.6, 0.627, -1),
                              diagnosis=3)
        assert len(err.value.details) == 4


class TestRetain:
    def test_growth_and_version(self, pima_base):
        case = make_case("", (6, 148, 72, 35, 0, 33.6, 0.627, 50),
                         diagnosis=1, actions=("insulin",))
        cb2 = retain_case(pima_base, case)
        assert len(cb2) == len(pima_base) + 1
        assert cb2.version == pima_base.version + 1
        assert len(pima_base) == 768  # original snapshot untouched

    def test_assigned_id_is_fresh(self, pima_base):
        case = make_case("", (1,) * 8, diagnosis=0, actions=("a",))
        cb2 = retain_case(pima_base, case)
        assert cb2.cases[-1].id == "r0769"

    def test_duplicate_id_conflict(self, pima_base):
        case = make_case("r0001", (1,) * 8, diagnosis=0, actions=("a",))
        with pytest.raises(DuplicateIdError):
            retain_case(pima_base, case)

    def test_missing_diagnosis_rejected(self, pima_base):
        case = make_case("", (1,) * 8, diagnosis=None, actions=("a",))
        with pytest.raises(ValidationFailure):
            retain_case(pima_base, case)

    def test_retained_case_discretized_when_base_has_edges(self):
        rng = random.Random(3)
        cb = random_base(rng, 20)
        case = make_case("", (2, 120, 70, 20, 80, 30, 0.5, 40),
                         diagnosis=1, actions=("a",))
        cb2 = retain_case(cb, case)
        assert cb2.cases[-1].discretized is not None


class TestPersistence:
    def test_round_trip_exact(self, pima_base, tmp_path):
        cb = discretize(pima_base)
        path = tmp_path / "cb.json"
        store.save_case_base(cb, path)
        loaded, model = store.load_saved_case_base(path)
        assert model is None
        assert loaded.version == cb.version
        assert loaded.bin_edges == cb.bin_edges
        assert len(loaded) == len(cb)
        for a, b in zip(loaded.cases, cb.cases):
            assert a == b  # descriptor floats compare exactly

    def test_corrupt_file_rejected(self, tmp_path):
        path = tmp_path / "cb.json"
        path.write_text("{\"format\": \"something-else\"}")
        with pytest.raises(Exception) as err:
            store.load_saved_case_base(path)
        assert "cdss-casebase" in str(err.value)
