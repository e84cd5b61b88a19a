"""Tests for shifts, Cesaro means and the shift-sum bounds."""
from itertools import product

import numpy as np
import pytest

from app.errors import NilpotenceError, PreconditionError, WindowOverflowError
from app.ergodic_lab import (
    CurvePoint,
    MixingCurve,
    cesaro_distance,
    compressed_mixing,
    is_wick_ordered,
    lemma_sum1_check,
    nilpotence_witness,
    observable_decay_bound,
    required_window,
    sum_bound_check,
    vector_cesaro_residual,
)
from app.fock_engine import build_fock
from app.monotone_symbolic import IDENTITY, ZERO, Pi, reduce
from app.specialized_fock import BooleanFockModel, specialized_monotone_fock
from app.words import IDENTITY_WORD, ObservableWord, a, c, shift_word
from app.yb_catalog import ModeWindow, build_standard

PIVOT0 = ObservableWord.of(a(0), c(0))


def test_shift_word():
    assert shift_word(PIVOT0, 3) == ObservableWord.of(a(3), c(3))
    assert shift_word(IDENTITY_WORD, 5) == IDENTITY_WORD
    w = ObservableWord.of(c(1), a(2))
    assert shift_word(w, -1, ModeWindow(0, 5)) == ObservableWord.of(c(0), a(1))


def test_shift_word_overflow_reports_window():
    with pytest.raises(WindowOverflowError) as info:
        shift_word(ObservableWord.of(c(4), a(5)), 2, ModeWindow(0, 5))
    assert info.value.required == (0, 7)


def test_monotone_cesaro_distance_stays_at_one():
    model = specialized_monotone_fock(ModeWindow(0, 30), 2)
    curve = cesaro_distance(model, PIVOT0, model.vacuum_projection(), range(2, 26))
    assert np.allclose(curve.distances, 1.0, atol=1e-9)


@pytest.mark.parametrize("j", [1, 3, 7])
@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_monotone_vector_residual_counts_shifts(j, n):
    model = specialized_monotone_fock(ModeWindow(0, 14), 2)
    xi = model.sequence_vector((j,))
    residual = vector_cesaro_residual(model, PIVOT0, model.vacuum_projection(), xi, n)
    assert residual == pytest.approx(min(n, j) / n, abs=1e-12)


def test_vacuum_vector_residual_is_zero():
    model = specialized_monotone_fock(ModeWindow(0, 10), 2)
    residual = vector_cesaro_residual(model, PIVOT0, model.vacuum_projection(), model.vacuum(), 7)
    assert residual == pytest.approx(0.0, abs=1e-12)


def test_identity_observable_has_zero_distance():
    model = specialized_monotone_fock(ModeWindow(0, 3), 2)
    curve = cesaro_distance(model, IDENTITY_WORD, model.identity(), [1, 4, 9])
    assert curve.distances == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)


def test_boolean_rank_one_distance_is_inverse_sqrt():
    model = BooleanFockModel(ModeWindow(0, 12))
    # a+_0 with target 0: the shifted ranges are orthonormal, the source is common
    curve = cesaro_distance(model, ObservableWord.of(c(0)), model.zero(), range(1, 13))
    expected = [1 / np.sqrt(n) for n in range(1, 13)]
    assert curve.distances == pytest.approx(expected, abs=1e-9)


def test_cesaro_overflow():
    model = specialized_monotone_fock(ModeWindow(0, 5), 1)
    with pytest.raises(WindowOverflowError) as info:
        cesaro_distance(model, PIVOT0, model.vacuum_projection(), [10])
    assert info.value.required == (0, 9)
    assert required_window(PIVOT0, 9) == (0, 9)


def test_free_decay_bound_holds():
    w = ModeWindow(0, 12)
    fock = build_fock(build_standard("free", w), 2)
    word = ObservableWord.of(c(0), a(1))
    bound = observable_decay_bound(fock, word)
    curve = cesaro_distance(fock, word, fock.zero(), range(1, 12), bound)
    assert curve.within_bounds(1e-9)
    assert curve.entries[-1].bound == pytest.approx(1 / np.sqrt(11))


def test_wick_ordering():
    assert is_wick_ordered(ObservableWord.of(c(0), a(1)))
    assert is_wick_ordered(ObservableWord.of(a(0), a(1)))
    assert not is_wick_ordered(PIVOT0)
    assert not is_wick_ordered(IDENTITY_WORD)
    model = specialized_monotone_fock(ModeWindow(0, 3), 2)
    assert observable_decay_bound(model, PIVOT0) is None


def test_monotone_shift_sum_bound():
    model = specialized_monotone_fock(ModeWindow(0, 12), 3)
    check = sum_bound_check(model, ObservableWord.of(c(0), a(1)), [0, 5, 10])
    assert check.passed
    assert check.bound == pytest.approx(np.sqrt(3))


def test_boolean_shift_sum_bound():
    model = BooleanFockModel(ModeWindow(0, 5))
    check = sum_bound_check(model, ObservableWord.of(c(0), a(1)), [0, 1, 2, 3])
    assert check.passed
    assert check.bound == pytest.approx(2.0)


@pytest.mark.slow
def test_random_monotone_shift_sums(rng):
    model = specialized_monotone_fock(ModeWindow(0, 14), 3)
    for _ in range(100):
        r = int(rng.integers(1, 5))
        letters = [c(int(m)) if rng.random() < 0.5 else a(int(m)) for m in rng.integers(0, 3, size=r)]
        word = ObservableWord(tuple(letters))
        if not is_wick_ordered(word):
            word = ObservableWord((c(0),) + word.letters[1:])
        n = int(rng.integers(1, 11))
        shifts = sorted(rng.choice(np.arange(0, 12), size=n, replace=False).tolist())
        assert sum_bound_check(model, word, shifts).passed


def test_shift_sum_rejects_repeated_shifts():
    model = specialized_monotone_fock(ModeWindow(0, 5), 2)
    with pytest.raises(PreconditionError):
        sum_bound_check(model, ObservableWord.of(c(0)), [1, 1])


def test_creator_family_sum_bound(rng):
    w = ModeWindow(0, 2)
    fock = build_fock(build_standard("monotone", w), 3)
    fs = [w.basis_vector(m) for m in w.modes]
    xis = [rng.standard_normal(fock.level_dims[1]) for _ in fs]
    assert lemma_sum1_check(fock, fs, xis, 1).passed


def test_creator_family_sum_boolean_scalars():
    w = ModeWindow(0, 1)
    fock = build_fock(build_standard("boolean", w), 1)
    check = lemma_sum1_check(fock, [w.basis_vector(0), w.basis_vector(1)], [[3.0], [4.0]], 0)
    assert check.lhs == pytest.approx(5.0)
    assert check.passed


def test_creator_family_sum_rejects_non_orthonormal():
    w = ModeWindow(0, 1)
    fock = build_fock(build_standard("free", w), 2)
    with pytest.raises(PreconditionError):
        lemma_sum1_check(fock, [w.basis_vector(0), w.basis_vector(0)], [[1.0], [1.0]], 0)


def test_nilpotence_witness():
    assert nilpotence_witness(ObservableWord.of(a(0))) == (1, "right")
    assert nilpotence_witness(ObservableWord.of(c(0))) == (1, "left")
    assert nilpotence_witness(ObservableWord.of(c(2), c(1))) == (1, "left")


def test_nilpotence_witness_errors():
    with pytest.raises(NilpotenceError):
        nilpotence_witness(IDENTITY_WORD)
    with pytest.raises(NilpotenceError):
        nilpotence_witness(PIVOT0)


@pytest.mark.slow
def test_every_short_word_has_a_witness_or_is_a_pivot():
    letters = [c(m) for m in range(3)] + [a(m) for m in range(3)]
    for length in range(1, 5):
        for combo in product(letters, repeat=length):
            w = ObservableWord(combo)
            form = reduce(w)
            if form == IDENTITY or (isinstance(form, Pi) and form.is_pure):
                with pytest.raises(NilpotenceError):
                    nilpotence_witness(w)
                continue
            k, side = nilpotence_witness(w)
            assert 1 <= k <= w.width + 2, str(w)
            moved = w.shift(k)
            product_word = moved + w if side == "left" else w + moved
            assert reduce(product_word) is ZERO, str(w)


def test_compressed_mixing_within_bound():
    model = specialized_monotone_fock(ModeWindow(0, 10), 2)
    curve = compressed_mixing(model, 1, ObservableWord.of(c(0), a(1)), 1, range(1, 9))
    assert curve.within_bounds(1e-9)


def test_bose_compressed_mixing_decays():
    fock = build_fock(build_standard("bose", ModeWindow(0, 9)), 2)
    curve = compressed_mixing(fock, 1, ObservableWord.of(c(0), a(1)), 1, [1, 2, 4, 8])
    # on one particle the shifted hops form a partial isometry
    assert curve.distances == pytest.approx([1.0, 0.5, 0.25, 0.125], abs=1e-9)
    assert curve.within_bounds(1e-9)


def test_compressed_mixing_keeps_identity_part():
    fock = build_fock(build_standard("bose", ModeWindow(0, 9)), 2)
    observable = [(1.0, IDENTITY_WORD), (1.0, ObservableWord.of(c(0), a(1)))]
    curve = compressed_mixing(fock, 1, observable, 1, [1, 2, 4, 8])
    assert curve.distances == pytest.approx([1.0, 0.5, 0.25, 0.125], abs=1e-9)
    assert curve.within_bounds(1e-9)
    other = compressed_mixing(fock, 1, observable, 2, [1, 4])
    assert other.distances == pytest.approx([0.0, 0.0], abs=1e-12)


def test_compressed_identity_target():
    model = specialized_monotone_fock(ModeWindow(0, 3), 2)
    curve = compressed_mixing(model, 1, IDENTITY_WORD, 1, [1, 2])
    assert curve.distances == pytest.approx([0.0, 0.0], abs=1e-12)


def test_mixing_curve_validation_and_csv():
    with pytest.raises(ValueError):
        MixingCurve((CurvePoint(2, 0.1), CurvePoint(1, 0.2)))
    curve = MixingCurve((CurvePoint(1, 1.0, 1.0), CurvePoint(4, 0.5)))
    text = curve.to_csv(seed=7)
    lines = text.splitlines()
    assert lines[0] == "# seed=7"
    assert lines[1] == "n,distance,bound"
    assert lines[2] == "1,1,1"
    assert lines[3] == "4,0.5,"
