import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetaforge.divisor import (
    PolyTail,
    SpectralDivisor,
    direct_sum,
    dumps,
    from_eigenvalues,
    loads,
    make_dualP,
    make_Dj,
    make_Dsigma,
    naturals,
    scale,
    shift,
)
from zetaforge.errors import DomainError, ValidationError
from zetaforge.specfun import PolyQ


def test_from_eigenvalues_merges_and_counts_kernel():
    d = from_eigenvalues([0, 2.0, 1.0, 2.0, 0])
    assert d.kernel == 2
    assert d.finite == ((1.0, 1), (2.0, 2))


def test_negative_eigenvalue_rejected():
    with pytest.raises(DomainError):
        from_eigenvalues([-1.0])


def test_finite_part_must_increase():
    with pytest.raises(ValidationError):
        SpectralDivisor(((2.0, 1), (1.0, 1)))


def test_tail_multiplicity_checked():
    with pytest.raises(ValidationError):
        PolyTail(0.0, 1.0, 1, PolyQ([-1]))


def test_dual_P_points():
    d = make_dualP()
    t = d.tail
    assert [t.point(n) for n in range(3)] == [0.5, 1.5, 2.5]
    assert [t.mult_at(n) for n in range(3)] == [1, 3, 5]


def test_Dsigma_parity_dictionary():
    odd = make_Dsigma(PolyQ([0, 1], "odd")).tail
    even = make_Dsigma(PolyQ([1], "even")).tail
    assert odd.point(odd.start) == 1.0
    assert even.point(even.start) == 2.0
    with pytest.raises(DomainError):
        make_Dsigma(PolyQ([1, 1]))


@given(st.lists(st.floats(min_value=0.01, max_value=100), max_size=8),
       st.integers(min_value=0, max_value=3))
@settings(max_examples=50, deadline=None)
def test_json_round_trip(values, j):
    d = direct_sum(from_eigenvalues(values), make_Dj(j)) if all(v < 1 for v in values) else from_eigenvalues(values)
    assert loads(dumps(d)) == d
    assert dumps(loads(dumps(d))) == dumps(d)


def test_json_format_fields():
    obj = json.loads(dumps(naturals()))
    assert set(obj) >= {"finite", "tail", "kernel"}


def test_shift_and_scale_move_points():
    d = shift(naturals(), 0.5)
    assert d.tail.first_point == 1.5
    s = scale(make_Dj(0), 3.0)
    assert s.tail.first_point == 3.0


def test_peel_moves_points_to_finite():
    d = naturals().peel(3)
    assert d.finite == ((1.0, 1), (2.0, 1), (3.0, 1))
    assert d.tail.first_point == 4.0
