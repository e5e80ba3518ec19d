import numpy as np
import pytest
from pydantic import ValidationError

from core.core_model import (NonNegMatrix, Tolerances, entrywise_leq,
                             make_split, validate_matrix)
from core.errors import (DimensionMismatch, InputError, NegativeEntry,
                         NonFiniteEntry, NotSquare, SubcriticalityViolated)


class TestValidateMatrix:
    def test_accepts_nonnegative(self):
        A = validate_matrix([[1, 1], [0.5, 0]])
        assert A.n == 2
        np.testing.assert_array_equal(A.entries, [[1.0, 1.0], [0.5, 0.0]])

    def test_zero_is_cone_preserving(self):
        assert validate_matrix([[0]]).is_zero()

    def test_negative_entry_reports_position(self):
        with pytest.raises(NegativeEntry) as info:
            validate_matrix([[1, -0.1], [0, 0]])
        assert (info.value.i, info.value.j) == (0, 1)

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_non_finite_entry(self, bad):
        with pytest.raises(NonFiniteEntry) as info:
            validate_matrix([[0, 0], [bad, 0]])
        assert (info.value.i, info.value.j) == (1, 0)

    @pytest.mark.parametrize("raw", [[[1, 2, 3], [4, 5, 6]], [1, 2], [], [[1, 2], [3]]])
    def test_not_square(self, raw):
        with pytest.raises(NotSquare):
            validate_matrix(raw)

    def test_negative_zero_is_normalised(self):
        A = validate_matrix([[-0.0]])
        assert not np.signbit(A.entries[0, 0])

    def test_entries_are_read_only(self):
        A = validate_matrix([[1.0]])
        with pytest.raises(ValueError):
            A.entries[0, 0] = 2.0

    def test_errors_are_input_errors(self):
        with pytest.raises(InputError):
            validate_matrix([[-1]])


class TestMakeSplit:
    def test_worked_example(self, worked_split):
        np.testing.assert_array_equal(worked_split.A.entries, [[1, 1], [0.5, 0]])
        assert worked_split.r_T == 0.0

    def test_r_t_equal_to_one_is_rejected(self):
        with pytest.raises(SubcriticalityViolated) as info:
            make_split(NonNegMatrix(entries=[[1, 0], [0, 0]]), NonNegMatrix(entries=[[0, 0], [0, 0]]))
        assert info.value.r_T == pytest.approx(1.0)

    def test_zero_transition(self, split_of):
        sys = split_of([[0]], [[1]])
        np.testing.assert_array_equal(sys.A.entries, [[1]])
        assert sys.r_T == 0.0

    def test_dimension_mismatch(self, split_of):
        with pytest.raises(DimensionMismatch):
            split_of([[0]], [[1, 0], [0, 1]])

    def test_tol_split_margin(self, split_of):
        with pytest.raises(SubcriticalityViolated):
            split_of([[0.995]], [[0]], Tolerances(tol_split=0.01))
        assert split_of([[0.995]], [[0]]).r_T == pytest.approx(0.995)

    def test_frozen(self, worked_split):
        with pytest.raises(ValidationError):
            worked_split.r_T = 0.5


class TestEntrywiseLeq:
    def test_zero_is_minimum(self):
        assert entrywise_leq(validate_matrix([[0, 0], [0, 0]]), validate_matrix([[1, 1], [0.5, 0]]))

    def test_reflexive(self):
        A = validate_matrix([[1, 1], [0.5, 0]])
        assert entrywise_leq(A, A)

    def test_larger_entry(self):
        assert not entrywise_leq(validate_matrix([[2]]), validate_matrix([[1]]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            entrywise_leq(validate_matrix([[1]]), validate_matrix([[1, 0], [0, 1]]))


class TestTolerances:
    def test_defaults(self):
        tol = Tolerances()
        assert (tol.tol_eq, tol.tol_spec, tol.tol_split, tol.max_iter) == (1e-9, 1e-10, 1e-8, 100000)

    def test_must_be_positive(self):
        with pytest.raises(ValidationError):
            Tolerances(tol_eq=0.0)

    def test_from_env(self, monkeypatch):
        monkeypatch.setenv("R0_TOL_EQ", "1e-6")
        monkeypatch.setenv("R0_MAX_ITER", "500")
        tol = Tolerances.from_env()
        assert tol.tol_eq == 1e-6
        assert tol.max_iter == 500
        assert tol.tol_spec == 1e-10

    def test_overrides_win(self, monkeypatch):
        monkeypatch.setenv("R0_TOL_EQ", "1e-6")
        assert Tolerances.from_env(tol_eq=1e-3).tol_eq == 1e-3
