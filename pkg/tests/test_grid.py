import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stairline import reference as ref
from stairline.errors import DimensionError, DomainError
from stairline.grid import (
    PathType,
    boundary_slots,
    enumerate_types,
    extend_to_boundary,
    fsl_objective,
    fsl_objective_batch,
    grid_objective,
    normalize_type,
    recfsg,
    recfsg_batch,
)

unit = st.floats(0.0, 1.0)


def test_recfsg_examples():
    assert recfsg((0.3,), (0.7,)) == pytest.approx(0.4)
    assert recfsg((0.5, 0.9), (0.2, 0.4)) == pytest.approx(0.262, abs=1e-12)
    assert recfsg((1, 1, F(4, 5)), (F(1, 2), F(1, 2), 0)) == F(6, 25)


def test_recfsg_errors():
    with pytest.raises(DomainError):
        recfsg((1.2, 0.5), (0.1, 0.1))
    with pytest.raises(DimensionError):
        recfsg((0.2,), (0.1, 0.1))


@settings(max_examples=200)
@given(st.integers(1, 6).flatmap(lambda d: st.tuples(
    st.lists(unit, min_size=d, max_size=d), st.lists(unit, min_size=d, max_size=d))))
def test_recfsg_is_symmetric_and_a_probability(qp):
    q, p = qp
    v = recfsg(q, p)
    assert v == pytest.approx(recfsg(p, q), abs=1e-12)
    assert -1e-12 <= v <= 1 + 1e-12


def test_recfsg_batch_matches_scalar():
    rng = np.random.default_rng(0)
    for d in range(1, 7):
        Q, P = rng.random((50, d)), rng.random((50, d))
        want = [recfsg(q, p) for q, p in zip(Q, P)]
        assert np.allclose(recfsg_batch(Q, P), want, rtol=1e-13, atol=1e-15)


def test_enumerate_types():
    assert [T.label() for T in enumerate_types(3)] == ["{}", "{2}"]
    assert [T.label() for T in enumerate_types(4)] == ["{}", "{2}", "{3}", "{2,3}"]
    assert len(enumerate_types(6)) == 16
    assert [T.label() for T in enumerate_types(2)] == ["{}"]
    with pytest.raises(DimensionError):
        enumerate_types(1)


def test_path_type_parse_and_of():
    assert PathType.parse(4, "{2,3}") == PathType(4, {2, 3})
    assert PathType.parse(3, "∅") == PathType.parse(3, "empty") == PathType(3, set())
    assert PathType.of((0.2, 0.5, 0.9), (0.4, 0.1, 0.3)) == PathType(3, {1})
    with pytest.raises(DomainError):
        PathType(3, {4})


def test_normalize_type_examples():
    q, p = (0.7, 0.6, 0.2), (0.4, 0.3, 0.8)          # type {3}
    cfg = normalize_type(PathType(3, {3}), q, p)
    assert cfg.type == PathType(3, {2})
    assert recfsg(cfg.q, cfg.p) == pytest.approx(recfsg(q, p), abs=1e-15)

    q, p = (0.9, 0.3, 0.1), (0.2, 0.1, 0.05)
    cfg = normalize_type(PathType(3, set()), q, p)
    assert (cfg.q, cfg.p, cfg.type) == (q, p, PathType(3, set()))

    q, p = (0.2, 0.6, 0.7, 0.1), (0.5, 0.3, 0.2, 0.4)  # type {1,4}
    cfg = normalize_type(PathType(4, {1, 4}), q, p)
    assert cfg.type == PathType(4, {2, 3})
    assert recfsg(cfg.q, cfg.p) == pytest.approx(recfsg(q, p), abs=1e-15)


def test_normalize_type_checks_sign_pattern():
    with pytest.raises(DomainError):
        normalize_type(PathType(3, {2}), (0.5, 0.5, 0.5), (0.1, 0.1, 0.1))


@settings(max_examples=200)
@given(st.integers(2, 6).flatmap(lambda d: st.tuples(
    st.lists(st.floats(0.01, 0.99), min_size=d, max_size=d),
    st.lists(st.floats(0.01, 0.99), min_size=d, max_size=d))))
def test_normalization_preserves_recfsg(qp):
    q, p = qp
    if any(a == b for a, b in zip(q, p)):
        return
    cfg = normalize_type(PathType.of(q, p), q, p)
    assert cfg.type.is_normalized
    assert recfsg(cfg.q, cfg.p) == pytest.approx(recfsg(q, p), rel=1e-12, abs=1e-15)


def test_boundary_extension():
    assert boundary_slots(PathType(3, set())) == {"p3": 0, "q1": 1}
    assert boundary_slots(PathType(3, {2})) == {"p3": 0, "q2": 0}
    assert boundary_slots(PathType(4, {2, 3})) == {"p4": 0, "q3": 0}
    q, p = ref.GRID_D3["{2}"][:2]
    cfg = extend_to_boundary(normalize_type(PathType(3, {2}), (F(2, 3), F(1, 10), F(4, 5)), p))
    assert cfg.q == q


@settings(max_examples=100)
@given(st.integers(3, 5).flatmap(lambda d: st.tuples(
    st.just(d), st.lists(st.floats(0.01, 0.99), min_size=d, max_size=d),
    st.lists(st.floats(0.01, 0.99), min_size=d, max_size=d))))
def test_boundary_extension_never_decreases(args):
    d, q, p = args
    if any(a == b for a, b in zip(q, p)):
        return
    cfg = normalize_type(PathType.of(q, p), q, p)
    ext = extend_to_boundary(cfg)
    assert recfsg(ext.q, ext.p) >= recfsg(cfg.q, cfg.p) - 1e-12


def test_grid_objective_d3_optimum():
    spec = grid_objective(3, PathType(3, set()))
    assert spec.free_slots == ("p1", "p2", "q2", "q3")
    assert spec.evaluator((F(1, 2), F(1, 2), 1, F(4, 5))) == F(1, 25)
    assert spec.evaluator((F(1, 2), F(1, 2), 1, 0)) == 0


@pytest.mark.parametrize("name,free,value", ref.GRID_D3_FACETS)
def test_grid_objective_facets(name, free, value):
    spec = grid_objective(3, PathType(3, set()))
    assert spec.evaluator([free[s] for s in spec.free_slots]) == value


@pytest.mark.parametrize("d", [4, 5])
def test_grid_objective_printed_rows(d):
    for label, (q, p, val) in ref.GRID_TABLES[d].items():
        spec = grid_objective(d, PathType.parse(d, label))
        assert spec.feasible(q, p)
        assert spec.evaluator(spec.free_vector(q, p)) == pytest.approx(val, abs=1e-6)


def test_grid_objective_batch_matches_scalar():
    rng = np.random.default_rng(1)
    for d in (3, 4, 5, 6):
        for T in enumerate_types(d):
            spec = grid_objective(d, T)
            X = rng.random((64, len(spec.free_slots)))
            want = [spec.evaluator(x) for x in X]
            assert np.allclose(spec.batch_evaluator(X), want, rtol=1e-13, atol=1e-17)


def test_grid_objective_clamps_infeasible():
    spec = grid_objective(3, PathType(3, {2}))
    x = spec.free_vector((F(2, 3), 0, F(4, 5)), (F(1, 3), F(3, 4), 0))
    assert spec.evaluator(x) == F(1, 25)
    bad = spec.free_vector((F(1, 5), 0, F(4, 5)), (F(1, 3), F(3, 4), 0))  # p1 > q1
    assert spec.evaluator(bad) == 0


def test_grid_objective_rejects_unnormalized():
    with pytest.raises(DomainError):
        grid_objective(3, PathType(3, {1}))


def test_fsl_objective_examples():
    assert fsl_objective((F(1, 2), F(2, 3))) == F(1, 27)
    assert fsl_objective((F(2, 3), F(2, 3))) == F(8, 243)
    A = np.array([[0.0, 0.5], [0.5, 1.0], [0.5, 2 / 3]])
    assert np.allclose(fsl_objective_batch(A), [0, 0, 1 / 27])


@pytest.mark.parametrize("d", range(2, 7))
def test_fsl_closed_form_argmax(d):
    a = [F(j, j + 1) for j in range(1, d + 1)]
    assert fsl_objective(a) == F(1, (d + 1) ** (d + 1))


def test_d3_value_over_factorial():
    q, p, val = ref.GRID_D3["{}"]
    assert recfsg(q, p) / math.factorial(3) == val
