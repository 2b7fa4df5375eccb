import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetaforge.errors import ConvergenceError, DomainError, ValidationError
from zetaforge.geodesics import (
    FuchsianGroup,
    LengthSpectrum,
    SpectrumEntry,
    cyclic_classes,
    length_from_trace,
    load_spectrum,
    minimal_rotation,
    octagon_group,
    primitive_root,
    save_spectrum,
    schottky_lengths,
    surface_group_lengths,
)

from oracles import SCHOTTKY_GENS, brute_force_classes

SCHOTTKY = SCHOTTKY_GENS




@pytest.mark.parametrize("rank", [1, 2])
def test_class_enumeration_matches_brute_force(rank):
    for n in range(1, 9):
        assert set(cyclic_classes(rank, n)) == brute_force_classes(rank, n)


def test_schottky_lengths_match_brute_force():
    G = FuchsianGroup(SCHOTTKY)
    L = 16.0
    spec = schottky_lengths(G, L)
    M = {0: np.array(SCHOTTKY[0], float), 1: np.array(SCHOTTKY[1], float)}
    M[2], M[3] = np.linalg.inv(M[0]), np.linalg.inv(M[1])
    oracle = []
    shortest_at_8 = math.inf
    for n in range(1, 9):
        for w in brute_force_classes(2, n):
            m = np.eye(2)
            for x in w:
                m = m @ M[x]
            ell = 2 * math.acosh(abs(np.trace(m)) / 2)
            if n == 8:
                shortest_at_8 = min(shortest_at_8, ell)
            if ell <= L:
                oracle.append(ell)
    assert len(spec.entries) == len(oracle)
    assert np.allclose(sorted(oracle), spec.lengths(), rtol=0, atol=1e-9)
    # lengths grow with word length here, so words longer than 8 letters cannot reach L
    assert shortest_at_8 > L


def test_single_generator_powers():
    G = FuchsianGroup([[[2, 1], [1, 1]]])
    spec = schottky_lengths(G, 4.0)
    ell = 2 * math.acosh(1.5)
    assert [e.multiplicity for e in spec.entries] == [1, 1, 2, 2]
    assert all(abs(e.primitive_length - ell) < 1e-12 for e in spec.entries)


def test_parabolic_generator_rejected():
    with pytest.raises(DomainError):
        FuchsianGroup([[[1, 1], [0, 1]]])


def test_determinant_checked():
    with pytest.raises(DomainError):
        FuchsianGroup([[[2, 0], [0, 2]]])


def test_length_from_trace():
    assert abs(length_from_trace(3.0) - 2 * math.acosh(1.5)) < 1e-15
    with pytest.raises(DomainError):
        length_from_trace(2.0)


@given(st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=8))
@settings(max_examples=100, deadline=None)
def test_minimal_rotation_is_rotation_invariant(w):
    w = tuple(w)
    assert minimal_rotation(w) == minimal_rotation(w[1:] + w[:1])


@given(st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=4), st.integers(min_value=1, max_value=4))
@settings(max_examples=100, deadline=None)
def test_primitive_root_of_power(root, k):
    r, j = primitive_root(tuple(root))
    assert primitive_root(tuple(root) * k) == (r, j * k)


def test_spectrum_round_trip(tmp_path):
    spec = schottky_lengths(FuchsianGroup(SCHOTTKY), 10.0)
    path = tmp_path / "s.json"
    save_spectrum(spec, path)
    back = load_spectrum(path)
    assert back.entries == spec.entries


def test_spectrum_validation_paths():
    with pytest.raises(ValidationError, match=r"entries\[0\]"):
        LengthSpectrum.from_json({"entries": [{"length": 3.0, "primitive_length": 2.0}]})
    with pytest.raises(ValidationError, match=r"entries\[1\].length"):
        LengthSpectrum.from_json({"entries": [{"length": 1.0, "primitive_length": 1.0},
                                              {"primitive_length": 1.0}]})


def test_json_syntax_error_has_location(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"entries": [\n  {"length": 1.0,}\n]}')
    with pytest.raises(ValidationError, match="line 2"):
        load_spectrum(path)


def test_entry_multiplicity_must_be_integral():
    with pytest.raises(ValidationError):
        LengthSpectrum([SpectrumEntry(3.0, 2.0)])


def test_octagon_relator_is_identity():
    G = octagon_group()
    m = np.array(G.matrix(G.relator), dtype=float)
    assert np.allclose(m, np.eye(2), atol=1e-9) or np.allclose(m, -np.eye(2), atol=1e-9)


def test_surface_heuristic_systole():
    # regular octagon systole 2 arccosh(1 + sqrt 2)
    spec = surface_group_lengths(octagon_group(), 5.0, word_length=2)
    assert spec.meta["label"] == "HEURISTIC"
    assert abs(spec.systole() - 2 * math.acosh(1 + math.sqrt(2))) < 1e-9


def test_word_budget():
    with pytest.raises(ConvergenceError):
        schottky_lengths(FuchsianGroup(SCHOTTKY), 30.0, budget=100)
