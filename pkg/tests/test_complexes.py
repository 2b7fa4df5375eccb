import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetaforge.complexes import (
    A_identity,
    GradedComplex,
    VirtualSpectra,
    abelian_lie_cohomology_dims,
    betti_product,
    betti_twist,
    chi_gen,
    chi_r,
    det_virtual,
    iterated_twist,
    joint_kernel_dim,
    laplacian_spectra,
    signed_multiset,
    tau1,
    tau2_hodge_check,
    tau_r,
    twist,
)
from zetaforge.errors import DomainError, HypothesisError, ValidationError

from oracles import random_complex, spectra_with_vanishing_lower_torsion




def test_chain_condition_enforced():
    with pytest.raises(ValidationError):
        GradedComplex([np.ones((1, 1)), np.ones((1, 1))])


def test_shared_eigenvalues_cancel_in_the_twist():
    # d = 2 gives Delta_0 = Delta_1 = 4 from different products, alternating sum is empty
    spec, _ = laplacian_spectra(GradedComplex([np.array([[2.0]])]))
    assert spec.degrees[0] == spec.degrees[1]
    assert twist(spec).horizon is None


def test_laplacian_kernels_are_betti_numbers():
    rng = np.random.default_rng(0)
    C = random_complex(rng, [2, 1], betti=[1, 0, 2])
    _, kernels = laplacian_spectra(C)
    assert kernels == [1, 0, 2]


@pytest.mark.parametrize("seed", range(20))
def test_exact_complex_det_virtual_is_one(seed):
    rng = np.random.default_rng(seed)
    ranks = list(rng.integers(1, 4, rng.integers(1, 4)))
    spec, kernels = laplacian_spectra(random_complex(rng, ranks))
    assert sum(kernels) == 0
    assert abs(det_virtual(spec) - 1) < 1e-8




@pytest.mark.parametrize("r", [1, 2, 3, 4])
@pytest.mark.parametrize("seed", range(5))
def test_closed_form_matches_iterated_twist(r, seed):
    rng = np.random.default_rng(100 * r + seed)
    spec = spectra_with_vanishing_lower_torsion(rng, r, r + 3)
    closed = tau_r(spec, r, tol=1e-8)
    twisted = tau1(iterated_twist(spec, r - 1))
    assert abs(math.log(closed) - math.log(twisted)) < 1e-9


def test_tau_r_checks_hypothesis():
    spec = VirtualSpectra.from_lists({0: [2.0]})
    with pytest.raises(HypothesisError):
        tau_r(spec, 1)


def test_twist_of_non_acyclic_is_flagged():
    t = twist(VirtualSpectra.from_lists({1: [math.e]}))
    assert t.horizon == 2
    assert not t.pseudofinite
    with pytest.raises(HypothesisError):
        tau1(t)


def test_twist_with_cancelling_degrees_is_finite():
    t = twist(VirtualSpectra.from_lists({0: [2.0], 1: [2.0]}))
    assert t.horizon is None


@given(st.dictionaries(st.sampled_from([(0, 0), (0, 1), (1, 0), (1, 1)]),
                       st.lists(st.floats(min_value=0.1, max_value=10), min_size=1, max_size=3), min_size=1))
@settings(max_examples=50, deadline=None)
def test_hodge_second_torsion_relation(hodge):
    # bidegrees in {0,1}^2: C(p,2) = C(q,2) = 0 so lhs = rhs^2 exactly
    lhs, rhs = tau2_hodge_check(hodge)
    assert abs(math.log(lhs) - 2 * math.log(rhs)) < 1e-9


def test_hodge_example():
    lhs, rhs = tau2_hodge_check({(1, 1): [math.e]})
    assert abs(lhs - math.e) < 1e-14
    assert abs(rhs - math.exp(0.5)) < 1e-14


def test_binomial_identity_exhaustive():
    for i in range(21):
        for r in range(11):
            for rp in range(11):
                lhs, rhs = A_identity(i, r, rp)
                assert lhs == rhs


def test_binomial_example():
    assert A_identity(3, 2, 1) == (-3, -3)


betti = st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=6)


@given(betti, betti)
@settings(max_examples=200, deadline=None)
def test_chi_gen_is_multiplicative(b1, b2):
    r1, c1 = chi_gen(b1)
    r2, c2 = chi_gen(b2)
    r, c = chi_gen(betti_product(b1, b2))
    if r1 is None or r2 is None:
        assert r is None
    else:
        assert (r, c) == (r1 + r2, c1 * c2)


def test_chi_r_of_circle_and_torus():
    assert chi_r([1, 1], 0) == 0
    assert chi_gen([1, 1]) == (1, 1)
    assert chi_gen([1, 2, 1]) == (2, 1)


def test_betti_twist_small():
    assert betti_twist([1, 2, 1]) == [1, 1, 0]


def test_abelian_cohomology_trivial_action():
    assert abelian_lie_cohomology_dims([np.zeros((1, 1)), np.zeros((1, 1))]) == [1, 2, 1]


@given(st.integers(min_value=1, max_value=3),
       st.lists(st.integers(min_value=0, max_value=2), min_size=1, max_size=4))
@settings(max_examples=40, deadline=None)
def test_abelian_cohomology_dimension_formula(r, diag_pattern):
    # diagonal actions: the joint kernel spans the coordinates where every action vanishes
    acts = [np.diag([0.0 if x == 0 else 1.0 + k for x in diag_pattern]) for k in range(r)]
    dims = abelian_lie_cohomology_dims(acts)
    k0 = joint_kernel_dim(acts)
    assert dims == [math.comb(r, p) * k0 for p in range(r + 1)]


def test_noncommuting_actions_rejected():
    with pytest.raises(DomainError):
        abelian_lie_cohomology_dims([np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])])


def test_signed_multiset_rejects_nonpositive():
    with pytest.raises(DomainError):
        signed_multiset([0.0])
