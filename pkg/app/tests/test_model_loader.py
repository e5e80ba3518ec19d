import math

import numpy as np
import pytest

from core.commands.model_loader import parse_model, read_source
from core.core_model import SplitSystem
from core.errors import ModelValidationError, ParseError
from engine.leslie import GeometricFertility, LeslieModel


class TestSplitFiles:
    def test_example(self, fixtures_dir):
        sys = parse_model(fixtures_dir / "example_split.json")
        assert isinstance(sys, SplitSystem)
        np.testing.assert_array_equal(sys.T.entries, [[0, 0], [0.5, 0]])
        np.testing.assert_array_equal(sys.F.entries, [[1, 1], [0, 0]])

    def test_path_given_as_string(self, fixtures_dir):
        assert isinstance(parse_model(str(fixtures_dir / "subcritical_split.json")), SplitSystem)

    def test_inline_json(self):
        sys = parse_model('{"kind": "split", "T": [[0.5]], "F": [[1]]}')
        assert sys.n == 1
        assert sys.r_T == pytest.approx(0.5)

    def test_supercritical_transition(self, fixtures_dir):
        with pytest.raises(ModelValidationError) as info:
            parse_model(fixtures_dir / "supercritical_T.json")
        assert info.value.field == "T"
        assert "r(T) ≥ 1" in info.value.reason

    def test_bad_entry_names_its_position(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model('{"kind": "split", "T": [[0, "x"], [0, 0]], "F": [[0, 0], [0, 0]]}')
        assert info.value.field == "T.0.1"

    def test_negative_fertility(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model('{"kind": "split", "T": [[0]], "F": [[-1]]}')
        assert info.value.field == "F"

    def test_dimension_mismatch(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model('{"kind": "split", "T": [[0]], "F": [[0, 0], [0, 0]]}')
        assert info.value.field == "F"

    def test_missing_matrix(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model('{"kind": "split", "T": [[0]]}')
        assert info.value.field == "F"

    def test_unknown_kind(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model('{"kind": "sir", "T": [[0]], "F": [[0]]}')
        assert info.value.field == "kind"

    def test_unsupported_schema_version(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model('{"schema_version": "2", "kind": "split", "T": [[0]], "F": [[0]]}')
        assert info.value.field == "schema_version"


class TestLeslieFiles:
    def test_geometric(self, fixtures_dir):
        model = parse_model(fixtures_dir / "geo.json")
        assert isinstance(model, LeslieModel)
        assert model.fertility == GeometricFertility(c=0.5, beta=0.5)
        assert model.p == 2.0

    def test_infinite_p(self, fixtures_dir):
        model = parse_model(fixtures_dir / "finite_leslie.json")
        assert model.p == math.inf
        assert model.q == 1.0

    def test_survival_at_one_is_rejected(self):
        text = ('{"kind": "leslie", "fertility": {"type": "finite", "values": [1]},'
                ' "survival": {"type": "constant", "t": 1.0}}')
        with pytest.raises(ModelValidationError) as info:
            parse_model(text)
        assert info.value.field == "survival.t"


class TestTolerances:
    def test_environment(self, monkeypatch, fixtures_dir):
        monkeypatch.setenv("R0_TOL_EQ", "1e-6")
        assert parse_model(fixtures_dir / "example_split.json").tolerances.tol_eq == 1e-6

    def test_file_overrides_environment(self, monkeypatch):
        monkeypatch.setenv("R0_TOL_EQ", "1e-6")
        monkeypatch.setenv("R0_MAX_ITER", "500")
        sys = parse_model('{"kind": "split", "T": [[0]], "F": [[1]], "tolerances": {"tol_eq": 1e-4}}')
        assert sys.tolerances.tol_eq == 1e-4
        assert sys.tolerances.max_iter == 500

    def test_unknown_tolerance(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model('{"kind": "split", "T": [[0]], "F": [[1]], "tolerances": {"tol_x": 1}}')
        assert info.value.field.startswith("tolerances")

    def test_bad_environment_value(self, monkeypatch, fixtures_dir):
        monkeypatch.setenv("R0_TOL_SPEC", "-1")
        with pytest.raises(ModelValidationError) as info:
            parse_model(fixtures_dir / "example_split.json")
        assert info.value.field == "tolerances.tol_spec"


class TestParseErrors:
    def test_malformed_json(self):
        with pytest.raises(ParseError) as info:
            parse_model('{"kind": "split",\n "T": [[0]] "F": [[1]]}')
        assert info.value.location.startswith("line 2")
        assert "column" in info.value.location

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ParseError):
            parse_model(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError) as info:
            read_source(tmp_path / "absent.json")
        assert "absent.json" in info.value.location

    def test_not_utf8(self, tmp_path):
        path = tmp_path / "latin1.json"
        path.write_bytes(b'{"kind": "\xe9"}')
        with pytest.raises(ParseError) as info:
            parse_model(path)
        assert info.value.reason == "not valid UTF-8"
