"""Tests for the Boolean Fock space and its conditional expectation."""
import numpy as np
import pytest

from app.boolean_model import (
    BooleanOp,
    boolean_annihilate,
    boolean_create,
    boolean_invariant_state,
    compact_support,
    conditional_expectation,
    e_mixing_curve,
    fixed_point_membership,
    infinity_state,
    mixing_constant,
    permutation_average,
    permutation_fixed_residual,
    permutation_op,
    rank_one,
    scalar_op,
    shift_op,
    vacuum_projection,
    vacuum_state,
    verify_boolrel,
    zero_op,
)
from app.errors import PreconditionError, WindowOverflowError
from app.yb_catalog import ModeWindow


def test_boolean_relations(window3):
    assert verify_boolrel(window3).worst <= 1e-12


def test_creation_on_vacuum(window2):
    op = boolean_create(window2, np.array([1.0, 1j]))
    vac = np.array([1.0, 0.0, 0.0])
    assert np.array_equal(op.full() @ vac, np.array([0.0, 1.0, 1j]))
    assert not np.any(boolean_annihilate(window2, 0).full() @ vac)


def test_operator_algebra(window2):
    x = rank_one(window2, 0, "#") + scalar_op(window2, 2.0)
    y = x @ x.adjoint()
    assert np.allclose(y.full(), x.full() @ x.full().conj().T)
    assert (3 * x).scalar == 6.0
    assert (x - x).distance(zero_op(window2)) == 0.0


def test_compact_shape_validated(window2):
    with pytest.raises(ValueError):
        BooleanOp(window2, np.zeros((2, 2)))


def test_conditional_expectation_and_states():
    w = ModeWindow(0, 1)
    x = rank_one(w, "#", "#", 3.0) + rank_one(w, 0, 1) + scalar_op(w, 0.5)
    e = conditional_expectation(x)
    assert e.distance(vacuum_projection(w) * 3.0 + scalar_op(w, 0.5)) == 0.0
    assert vacuum_state(x) == pytest.approx(3.5)
    assert infinity_state(x) == pytest.approx(0.5)
    assert boolean_invariant_state(0.5, x) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        boolean_invariant_state(1.5, x)


def test_shift_moves_compact_part():
    w = ModeWindow(0, 4)
    x = rank_one(w, 0, "#")
    moved = shift_op(x, 3)
    assert moved.distance(rank_one(w, 3, "#")) == 0.0
    assert compact_support(moved) == (3, 3)


def test_shift_overflow():
    w = ModeWindow(0, 2)
    with pytest.raises(WindowOverflowError) as info:
        shift_op(rank_one(w, 1, 2), 2)
    assert info.value.required == (0, 4)


def test_rank_one_e_mixing_is_inverse_sqrt():
    w = ModeWindow(0, 400)
    x = rank_one(w, 0, "#")
    ns = [1, 2, 5, 50, 400]
    curve = e_mixing_curve(x, range(1, 401), ns)
    assert curve.distances == pytest.approx([1 / np.sqrt(n) for n in ns], abs=1e-9)
    assert curve.within_bounds(1e-9)


def test_random_compact_operators_respect_bound(rng):
    w = ModeWindow(0, 14)
    for _ in range(20):
        compact = np.zeros((w.d + 1, w.d + 1), dtype=complex)
        compact[:4, :4] = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        x = BooleanOp(w, compact)
        curve = e_mixing_curve(x, range(1, 12), range(1, 12))
        assert curve.within_bounds(1e-9)


def test_e_mixing_input_checks():
    w = ModeWindow(0, 5)
    x = rank_one(w, 0, "#")
    with pytest.raises(ValueError):
        e_mixing_curve(x, [1, 2], [3])
    with pytest.raises(ValueError):
        e_mixing_curve(x, [2, 1, 3], [3])


def test_mixing_constant_skips_vacuum_entry():
    w = ModeWindow(0, 1)
    x = rank_one(w, "#", "#", 5.0) + rank_one(w, 0, 1, -2.0) + rank_one(w, 1, "#", 1j)
    assert mixing_constant(x) == pytest.approx(3.0)


def test_fixed_point_membership():
    w = ModeWindow(0, 2)
    inside = vacuum_projection(w) * 2.0 + scalar_op(w, -1.0)
    assert fixed_point_membership(inside) <= 1e-9
    outside = rank_one(w, 0, "#")
    # no multiple of P_# or its complement reduces the off-diagonal entry
    assert fixed_point_membership(outside) == pytest.approx(1.0, abs=1e-9)


def test_permutation_action():
    w = ModeWindow(0, 2)
    x = rank_one(w, 0, 1)
    assert permutation_op(x, {0: 1, 1: 0}).distance(rank_one(w, 1, 0)) == 0.0
    assert permutation_fixed_residual(conditional_expectation(x)) == 0.0
    assert permutation_fixed_residual(x) > 0.5
    with pytest.raises(PreconditionError):
        permutation_op(x, {0: 1})


def test_permutation_average_approaches_expectation():
    w = ModeWindow(0, 5)
    x = rank_one(w, 0, "#")
    distances = []
    for size in range(1, 6):
        avg = permutation_average(x, range(size))
        distances.append(avg.distance(conditional_expectation(x)))
    assert distances == pytest.approx([1 / np.sqrt(k) for k in range(1, 6)], abs=1e-12)
    assert all(a >= b for a, b in zip(distances, distances[1:]))


def test_permutation_average_cap(monkeypatch):
    from app import boolean_model

    monkeypatch.setattr(boolean_model.settings, "permutation_cap", 3)
    with pytest.raises(PreconditionError):
        permutation_average(rank_one(ModeWindow(0, 5), 0, "#"), range(4))


def _random_local_op(rng, window, modes=3):
    """Random A + bI whose compact part touches e_# and the first ``modes`` modes."""
    m = np.zeros((window.d + 1, window.d + 1), dtype=complex)
    block = rng.standard_normal((modes + 1, modes + 1)) + 1j * rng.standard_normal((modes + 1, modes + 1))
    m[: modes + 1, : modes + 1] = block
    scalar = complex(rng.standard_normal(), rng.standard_normal())
    return BooleanOp(window, m, scalar)


def _close(x, y, tol=1e-12):
    return x.distance(y) <= tol


@pytest.mark.parametrize("count", [50, pytest.param(1000, marks=pytest.mark.slow)])
def test_conditional_expectation_properties(rng, count):
    window = ModeWindow(0, 5)
    p = vacuum_projection(window)
    for _ in range(count):
        x = _random_local_op(rng, window)
        ex = conditional_expectation(x)
        assert _close(conditional_expectation(ex), ex)
        assert _close(conditional_expectation(x.adjoint()), ex.adjoint())
        assert _close(ex @ p, p @ ex)
        positive = conditional_expectation(x.adjoint() @ x)
        assert np.min(np.linalg.eigvalsh(positive.full())) >= -1e-12


def test_conditional_expectation_commutes_with_both_actions(rng):
    window = ModeWindow(0, 5)
    for _ in range(50):
        x = _random_local_op(rng, window)
        ex = conditional_expectation(x)
        for k in (1, 2, 3):
            assert _close(conditional_expectation(shift_op(x, k)), shift_op(ex, k))
        g = {0: 4, 4: 1, 1: 0, 2: 5, 5: 2}
        assert _close(conditional_expectation(permutation_op(x, g)), permutation_op(ex, g))


@pytest.mark.parametrize("gamma", [0.0, 0.3, 1.0])
def test_invariant_state_ignores_shifts_and_permutations(rng, gamma):
    window = ModeWindow(0, 5)
    for _ in range(50):
        x = _random_local_op(rng, window)
        value = boolean_invariant_state(gamma, x)
        assert boolean_invariant_state(gamma, shift_op(x, 2)) == pytest.approx(value, abs=1e-12)
        assert boolean_invariant_state(gamma, permutation_op(x, {0: 3, 3: 0})) == pytest.approx(value, abs=1e-12)


def test_permutation_fixed_operators_are_in_the_fixed_algebra(rng):
    window = ModeWindow(0, 3)
    p = vacuum_projection(window)
    for _ in range(20):
        c1, c2, b = (complex(*rng.standard_normal(2)) for _ in range(3))
        x = p * (c1 - c2) + scalar_op(window, c2) + scalar_op(window, b)
        assert permutation_fixed_residual(x) <= 1e-12
        assert fixed_point_membership(x) <= 1e-9


def test_averaged_rank_one_part_is_fixed_but_outside_on_a_finite_window():
    window = ModeWindow(0, 2)
    ones = np.zeros((4, 4), dtype=complex)
    ones[1:, 1:] = 1.0 / 3.0
    x = BooleanOp(window, ones)
    assert permutation_fixed_residual(x) <= 1e-12
    # eigenvalues 1, 0, 0 on H: no multiple of P_#^perp comes closer than 1/2
    assert fixed_point_membership(x) >= 0.5 - 1e-9
