"""Value-difference model fitting, distances, and retrieval.

Oracles: probability values recomputed by hand for the two-case example,
an independent per-attribute summation for case distance, and an
exhaustive full-scan sort for retrieval.
"""

from __future__ import annotations

import random

import pytest

from cdss.casebase import CaseBase, default_schema, discretize, encode_case, retain_case
from cdss.errors import (
    ArgumentError,
    FitError,
    NotDiscretizedError,
    StaleModelError,
    UnknownBinError,
)
from cdss.similarity import (
    VdmModel,
    case_distance,
    fit_vdm,
    majority_diagnosis,
    retrieve_k_nearest,
    value_distance,
)
from conftest import make_case, random_base, random_descriptors


def two_case_model():
    """One case in each class, far enough apart to land in distinct bins."""
    cases = (
        make_case("u", (0, 200, 1, 1, 1, 1, 1, 1), diagnosis=1),
        make_case("v", (0, 50, 1, 1, 1, 1, 1, 1), diagnosis=0),
    )
    cb = discretize(CaseBase(schema=default_schema(bin_count=2), cases=cases))
    return cb, fit_vdm(cb, alpha=1.0, q=1.0)


class TestFit:
    def test_hand_smoothed_probabilities(self):
        cb, model = two_case_model()
        u, v = cb.cases[0].discretized[1], cb.cases[1].discretized[1]
        assert u != v
        # counts: bin u holds one class-1 case, bin v one class-0 case
        assert model.probabilities(2, u) == pytest.approx((1 / 3, 2 / 3), abs=1e-12)
        assert model.probabilities(2, v) == pytest.approx((2 / 3, 1 / 3), abs=1e-12)

    def test_rows_sum_to_one(self):
        rng = random.Random(21)
        cb = random_base(rng, 40)
        model = fit_vdm(cb)
        for rows in model.tables.values():
            for probs in rows.values():
                assert sum(probs) == pytest.approx(1.0, abs=1e-9)
                assert all(0 < p < 1 for p in probs)

    def test_unseen_bin_uniform(self):
        cb, model = two_case_model()
        # Attribute 1 (pregnancies) is constant 0 here, binned once; glucose
        # has two bins plus MISSING, and MISSING never occurs in training.
        assert model.probabilities(2, 0) == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_empty_base_rejected(self):
        cb = CaseBase(schema=default_schema(), cases=(), bin_edges=((0.0, 1.0),) * 8)
        with pytest.raises(FitError):
            fit_vdm(cb)

    def test_undiscretized_base_rejected(self):
        cb = CaseBase(schema=default_schema(),
                      cases=(make_case("a", (1,) * 8, diagnosis=0),))
        with pytest.raises(NotDiscretizedError):
            fit_vdm(cb)

    def test_incremental_consistency(self):
        """Refit after retention equals a direct count update."""
        rng = random.Random(22)
        cb = random_base(rng, 30)
        new = make_case("", random_descriptors(rng), diagnosis=1, actions=("a",))
        cb2 = retain_case(cb, new)
        refit = fit_vdm(cb2)

        stored = cb2.cases[-1]
        base = fit_vdm(cb)
        for attr in cb.schema:
            ai = attr.index
            for v, probs in refit.tables[ai].items():
                # reconstruct counts from the smoothed base-model row
                joint = {}
                old_total = sum(
                    1 for c in cb.cases if c.discretized[ai - 1] == v)
                for ci, cls in enumerate(base.classes):
                    joint[cls] = base.tables[ai][v][ci] * (old_total + 2.0) - 1.0
                if stored.discretized[ai - 1] == v:
                    joint[stored.diagnosis] += 1
                    old_total += 1
                expected = tuple(
                    (joint[cls] + 1.0) / (old_total + 2.0) for cls in base.classes)
                assert probs == pytest.approx(expected, abs=1e-12)


class TestValueDistance:
    def test_identity_zero(self):
        _, model = two_case_model()
        for attr, rows in model.tables.items():
            for v in rows:
                assert value_distance(model, attr, v, v) == 0.0

    def test_hand_value(self):
        cb, model = two_case_model()
        u, v = cb.cases[0].discretized[1], cb.cases[1].discretized[1]
        assert value_distance(model, 2, u, v) == pytest.approx(2 / 3, abs=1e-12)

    def test_symmetry_random_models(self):
        rng = random.Random(23)
        for _ in range(30):
            cb = random_base(rng, rng.randint(4, 25), bin_count=3)
            model = fit_vdm(cb)
            for attr, rows in model.tables.items():
                bins = list(rows)
                v1, v2 = rng.choice(bins), rng.choice(bins)
                assert value_distance(model, attr, v1, v2) == value_distance(model, attr, v2, v1)

    def test_triangle_inequality_q1(self):
        rng = random.Random(24)
        for _ in range(30):
            cb = random_base(rng, rng.randint(4, 25), bin_count=4)
            model = fit_vdm(cb)
            for attr, rows in model.tables.items():
                bins = list(rows)
                u, v, w = (rng.choice(bins) for _ in range(3))
                duw = value_distance(model, attr, u, w)
                duv = value_distance(model, attr, u, v)
                dvw = value_distance(model, attr, v, w)
                assert duw <= duv + dvw + 1e-12

    def test_bounded_by_two(self):
        rng = random.Random(25)
        for _ in range(20):
            cb = random_base(rng, rng.randint(4, 20))
            model = fit_vdm(cb)
            for attr, rows in model.tables.items():
                for v1 in rows:
                    for v2 in rows:
                        assert value_distance(model, attr, v1, v2) <= 2.0

    def test_unknown_bin(self):
        _, model = two_case_model()
        with pytest.raises(UnknownBinError):
            value_distance(model, 2, 1, 99)


def summation_oracle(model: VdmModel, c1, c2) -> float:
    """Independent re-summation straight from the probability tables."""
    total = 0.0
    for i in range(8):
        p1 = model.tables[i + 1][c1.discretized[i]]
        p2 = model.tables[i + 1][c2.discretized[i]]
        total += sum(abs(a - b) ** model.q for a, b in zip(p1, p2))
    return total


class TestCaseDistance:
    def test_identity(self):
        rng = random.Random(26)
        cb = random_base(rng, 10)
        model = fit_vdm(cb)
        for c in cb.cases:
            assert case_distance(model, c, c) == 0.0

    def test_single_differing_attribute(self):
        cb, model = two_case_model()
        c1, c2 = cb.cases
        diffs = [i for i in range(8) if c1.discretized[i] != c2.discretized[i]]
        assert diffs == [1]
        assert case_distance(model, c1, c2) == pytest.approx(
            value_distance(model, 2, c1.discretized[1], c2.discretized[1]), abs=1e-15)

    def test_matches_summation_oracle(self):
        rng = random.Random(27)
        for _ in range(20):
            cb = random_base(rng, rng.randint(5, 30))
            model = fit_vdm(cb)
            for _ in range(10):
                c1, c2 = rng.choice(cb.cases), rng.choice(cb.cases)
                assert case_distance(model, c1, c2) == summation_oracle(model, c1, c2)

    def test_undiscretized_rejected(self):
        cb, model = two_case_model()
        bare = make_case("q", (1,) * 8)
        with pytest.raises(NotDiscretizedError):
            case_distance(model, bare, cb.cases[0])


def full_scan_oracle(model, cb, query, k):
    query = encode_case(cb, query) if query.discretized is None else query
    scored = sorted(
        (summation_oracle(model, query, c), c.id) for c in cb.cases)
    return scored[:k]


class TestRetrieve:
    def test_identity_retrieval(self):
        rng = random.Random(28)
        cb = random_base(rng, 25)
        model = fit_vdm(cb)
        target = cb.cases[7]
        top = retrieve_k_nearest(model, cb, target, 1)
        assert top[0].case_id == target.id
        assert top[0].distance == 0.0

    def test_k_equals_size(self):
        rng = random.Random(29)
        cb = random_base(rng, 12)
        model = fit_vdm(cb)
        neighbors = retrieve_k_nearest(model, cb, cb.cases[0], len(cb))
        assert [n.rank for n in neighbors] == list(range(1, 13))
        dists = [n.distance for n in neighbors]
        assert dists == sorted(dists)

    def test_matches_full_scan_oracle(self):
        rng = random.Random(30)
        for _ in range(25):
            cb = random_base(rng, rng.randint(6, 40))
            model = fit_vdm(cb)
            query = make_case("q", random_descriptors(rng))
            k = rng.randint(1, len(cb))
            got = retrieve_k_nearest(model, cb, query, k)
            expected = full_scan_oracle(model, cb, query, k)
            assert [(n.distance, n.case_id) for n in got] == expected

    @pytest.mark.parametrize("k", [0, -1, 99])
    def test_k_out_of_range(self, k):
        rng = random.Random(31)
        cb = random_base(rng, 5)
        model = fit_vdm(cb)
        with pytest.raises(ArgumentError):
            retrieve_k_nearest(model, cb, cb.cases[0], k)

    def test_stale_model_rejected(self):
        rng = random.Random(32)
        cb = random_base(rng, 10)
        model = fit_vdm(cb)
        cb2 = retain_case(cb, make_case("", random_descriptors(rng),
                                        diagnosis=0, actions=("a",)))
        with pytest.raises(StaleModelError):
            retrieve_k_nearest(model, cb2, cb2.cases[0], 3)
        refit = fit_vdm(cb2)
        top = retrieve_k_nearest(refit, cb2, cb2.cases[-1], 1)
        assert top[0].case_id == cb2.cases[-1].id
        assert top[0].distance == 0.0


class TestMajorityDiagnosis:
    def base_of(self, diagnoses):
        cases = tuple(
            make_case(f"n{i}", (float(i),) * 8, diagnosis=d)
            for i, d in enumerate(diagnoses))
        return discretize(CaseBase(schema=default_schema(bin_count=2), cases=cases))

    def neighbors_for(self, cb):
        model = fit_vdm(cb)
        return retrieve_k_nearest(model, cb, cb.cases[0], len(cb))

    def test_unanimous(self):
        cb = self.base_of([1, 1, 1])
        assert majority_diagnosis(self.neighbors_for(cb), cb) == (1, 1.0)

    def test_three_of_five(self):
        cb = self.base_of([0, 0, 0, 1, 1])
        assert majority_diagnosis(self.neighbors_for(cb), cb) == (0, 0.6)

    def test_tie_goes_to_class_zero(self):
        cb = self.base_of([1, 1, 0, 0])
        assert majority_diagnosis(self.neighbors_for(cb), cb) == (0, 0.5)

    def test_empty_rejected(self):
        cb = self.base_of([0])
        with pytest.raises(ArgumentError):
            majority_diagnosis([], cb)
