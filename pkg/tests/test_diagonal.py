from fractions import Fraction as F

import numpy as np
import pytest

from stairline import reference as ref
from stairline.diagonal import (
    check_conditions,
    diag3_catalog,
    fsd,
    fsd_closed_form,
    recfsd,
    theorem2_path,
)
from stairline.errors import ConditionViolation, DimensionError
from stairline.targets import random_diagonal_pair


def test_recfsd_examples():
    assert recfsd((1, F(3, 4)), (F(1, 4), F(1, 2))) == F(1, 2)
    assert recfsd((1, F(3, 5), F(4, 5)), (F(1, 5), F(2, 5), F(2, 5))) == F(3, 25)


@pytest.mark.parametrize("d", range(3, 9))
def test_recfsd_of_explicit_path(d):
    # the unlifted path gives d / (d+2)^(d-1)
    assert recfsd(*theorem2_path(d)) == F(d, (d + 2) ** (d - 1))


def test_fsd_examples():
    assert fsd((1,), (F(3, 10),)) == F(7, 10)
    assert fsd((1, F(3, 4)), (F(1, 4), F(1, 2))) == F(3, 16)
    assert fsd(*theorem2_path(3)) == F(1, 25)


@pytest.mark.parametrize("d", range(3, 9))
def test_explicit_path_identity(d):
    assert fsd(*theorem2_path(d)) == F(1, (d + 2) ** (d - 1))


def test_theorem2_path_coordinates():
    assert theorem2_path(3) == ((1, F(3, 5), F(4, 5)), (F(1, 5), F(2, 5), F(2, 5)))
    assert theorem2_path(4) == ((1, F(1, 2), F(2, 3), F(5, 6)), (F(1, 6), F(1, 3), F(1, 2), F(1, 2)))
    with pytest.raises(DimensionError):
        theorem2_path(2)


@pytest.mark.parametrize("q,p,violated", [
    ((F(9, 10), F(1, 2), F(3, 5)), (F(1, 5), F(2, 5), F(1, 2)), "q_1 = 1"),
    ((1, F(1, 2), F(3, 5)), (F(1, 5), F(2, 5), F(3, 10)), "p_i <= p_(i+1)"),
    ((1, F(7, 10), F(3, 5)), (F(1, 5), F(2, 5), F(1, 2)), "q_i <= q_(i+1)"),
    ((1, F(1, 2), F(3, 5)), (F(1, 5), F(7, 10), F(4, 5)), "p_i <= q_i"),
])
def test_condition_violations_name_the_inequality(q, p, violated):
    with pytest.raises(ConditionViolation) as err:
        recfsd(q, p)
    assert err.value.inequality == violated
    with pytest.raises(ConditionViolation):
        check_conditions(q, p)


def test_closed_forms_agree_with_recursion():
    rng = np.random.default_rng(4)
    for d in (1, 2, 3):
        for _ in range(10_000 if d == 3 else 2000):
            if d == 1:
                q, p = (1.0,), (float(rng.random()),)
            else:
                q, p = random_diagonal_pair(rng, d)
            assert abs(fsd(q, p) - fsd_closed_form(q, p)) <= 1e-14


def test_closed_form_dimension_limit():
    with pytest.raises(DimensionError):
        fsd_closed_form((1, 1, 1, 1), (0, 0, 0, 0))


def test_catalog_shape():
    cat = diag3_catalog()
    assert [f.id for f in cat] == list(range(1, 16))
    assert all(f.fixed.get("q1") == 1 for f in cat[:4])
    assert all(f.fixed.get("q1") == 0 for f in cat[4:9])
    assert all("q1" in f.variables for f in cat[9:])


def test_catalog_examples():
    cat = {f.id: f for f in diag3_catalog()}
    f1, f9 = cat[1], cat[9]
    assert f1(f1.assignment((1, F(3, 5), F(4, 5)), (F(1, 5), F(2, 5), 0))) == F(1, 25)
    assert f9(f9.assignment((0, F(1, 3), F(2, 3)), (F(11, 16), F(5, 32), 0))) == F(1, 27)
    # p2 > q2 leaves the domain of F1
    assert f1(f1.assignment((1, F(1, 5), F(4, 5)), (F(1, 10), F(2, 5), 0))) == 0


@pytest.mark.parametrize("fid", range(1, 16))
def test_catalog_printed_argmax(fid):
    f = next(f for f in diag3_catalog() if f.id == fid)
    q, p, val = ref.DIAG3[fid]
    assert f(f.assignment(q, p)) == val


def test_catalog_batch_matches_scalar():
    rng = np.random.default_rng(8)
    for f in diag3_catalog():
        X = rng.random((300, len(f.variables)))
        want = [f.evaluate(x) for x in X]
        assert np.allclose(f.evaluate_batch(X), want, atol=1e-15)
        assert (np.asarray(want) >= 0).any()


def test_catalog_points_round_trip():
    for f in diag3_catalog():
        q, p, _ = ref.DIAG3[f.id]
        x = [f.assignment(q, p)[v] for v in f.variables]
        assert f.points(x) == (tuple(q), tuple(p))
